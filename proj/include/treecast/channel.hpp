#pragma once

#include <optional>

#include <Eigen/Dense>

#include "treecast/errors.hpp"

namespace treecast {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Constants C with ||P a - 1||_pi <= C ||a - 1||_pi for every likelihood
// vector a normalized to pi-mean 1.
enum class ContractionMode {
  reversible_eig,     // |theta_1|; reversible channels only
  general_singular,   // sigma_1(P - 1 pi^T) * max_i sqrt(pi_i) / min_i sqrt(pi_i)
  tight_pi_operator,  // L2(pi) operator norm of P on the pi-orthogonal complement of 1
};

struct SpectralProfile {
  double sigma1 = 0.0;     // largest singular value of P - 1 pi^T
  double c_general = 0.0;  // sigma1 scaled by max_i sqrt(pi_i) / min_i sqrt(pi_i)
  double c_tight = 0.0;    // largest singular value of Psi^{1/2} (P - 1 pi^T) Psi^{-1/2}

  // Present for reversible channels: second-largest absolute eigenvalue.
  std::optional<double> theta1_abs;

  // Reversible channels only. Real spectrum with the unit eigenvalue first,
  // the rest ordered by decreasing absolute value. Column k of the eigenvector
  // matrices holds the right eigenvector v_k and the left eigenvector
  // h_k = pi o v_k, with v_0 ~ 1 and h_0 ~ pi.
  Vector eigenvalues;
  Matrix right_eigenvectors;
  Matrix left_eigenvectors;
};

struct ChannelOptions {
  double reversibility_tol = 1e-10;  // absolute tolerance on detailed-balance residuals
};

// A validated noisy channel: a row-stochastic matrix together with its
// equilibrium distribution and cached spectral data. Immutable after
// construction and safe to share across threads.
class Channel {
 public:
  int size() const { return static_cast<int>(matrix_.rows()); }  // alphabet cardinality K+1
  const Matrix& matrix() const { return matrix_; }
  const Vector& pi() const { return pi_; }
  bool reversible() const { return reversible_; }
  // False only for channels built through trusted_channel with a
  // non-primitive matrix (e.g. the noiseless identity).
  bool primitive() const { return profile_.has_value(); }
  double min_pi() const { return pi_.minCoeff(); }

  // Spectral data; throws NotPrimitive for trusted non-primitive channels.
  const SpectralProfile& profile() const;

 private:
  Channel(Matrix matrix, Vector pi, bool reversible, std::optional<SpectralProfile> profile)
      : matrix_(std::move(matrix)),
        pi_(std::move(pi)),
        reversible_(reversible),
        profile_(std::move(profile)) {}

  Matrix matrix_;
  Vector pi_;
  bool reversible_;
  std::optional<SpectralProfile> profile_;

  friend Channel validate_channel(const Matrix&, const ChannelOptions&);
  friend Channel trusted_channel(const Matrix&, const Vector&, const ChannelOptions&);
};

// Full validation path: checks row-stochasticity, primitivity (strict
// positivity of a boolean matrix power at the Wielandt exponent), solves for
// the equilibrium distribution and computes the spectral profile.
Channel validate_channel(const Matrix& matrix, const ChannelOptions& options = {});

// Escape hatch for boundary channels the broadcasting process supports but
// the spectral machinery does not (noiseless transmission, p_ij in {0,1}).
// Checks stochasticity and that pi is an invariant distribution, but skips
// the primitivity test and the spectral profile.
Channel trusted_channel(const Matrix& matrix, const Vector& pi, const ChannelOptions& options = {});

// Equilibrium distribution of a primitive stochastic matrix, by direct linear
// solve of the stationarity equations augmented with the normalization row.
Vector stationary_distribution(const Matrix& matrix);

const SpectralProfile& spectral_profile(const Channel& channel);

double contraction_constant(const Channel& channel, ContractionMode mode);

// P applied to a likelihood vector with pi-mean 1; the result keeps pi-mean 1.
Vector apply_to_normalized(const Channel& channel, const Vector& rho_tilde);

}  // namespace treecast
