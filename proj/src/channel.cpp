#include "treecast/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace treecast {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;

void check_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw DimensionMismatch("channel matrix must be square with size >= 2, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void check_stochastic(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) < 0.0) {
        throw NotStochastic("negative entry at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
      }
      row_sum += m(i, j);
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol) {
      throw NotStochastic("row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
    }
  }
}

// Boolean adjacency rows as bitmasks. Entries are structural: exactly-zero
// probabilities stay zero, so float underflow cannot fake connectivity.
using BoolMatrix = std::vector<std::vector<std::uint64_t>>;

BoolMatrix adjacency_of(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  const int words = (n + 63) / 64;
  BoolMatrix b(n, std::vector<std::uint64_t>(words, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m(i, j) > 0.0) b[i][j / 64] |= (std::uint64_t{1} << (j % 64));
    }
  }
  return b;
}

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  const int n = static_cast<int>(a.size());
  const int words = static_cast<int>(a[0].size());
  BoolMatrix out(n, std::vector<std::uint64_t>(words, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a[i][j / 64] >> (j % 64) & 1) {
        for (int w = 0; w < words; ++w) out[i][w] |= b[j][w];
      }
    }
  }
  return out;
}

bool all_ones(const BoolMatrix& b, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!(b[i][j / 64] >> (j % 64) & 1)) return false;
    }
  }
  return true;
}

// A nonnegative matrix is primitive iff its boolean power at the Wielandt
// exponent n^2 - 2n + 2 is strictly positive; any power at or beyond that
// exponent decides it, so repeated squaring suffices.
bool is_primitive(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  const std::int64_t wielandt = static_cast<std::int64_t>(n) * n - 2 * n + 2;
  BoolMatrix power = adjacency_of(m);
  std::int64_t exponent = 1;
  while (exponent < wielandt) {
    power = bool_multiply(power, power);
    exponent *= 2;
  }
  return all_ones(power, n);
}

void check_invariant(const Matrix& m, const Vector& pi) {
  const double residual = ((pi.transpose() * m).transpose() - pi).cwiseAbs().maxCoeff();
  if (residual >= kStationaryResidualTol) {
    throw SingularSolve("stationarity residual " + std::to_string(residual));
  }
}

bool detailed_balance_holds(const Matrix& m, const Vector& pi, double tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(pi(i) * m(i, j) - pi(j) * m(j, i)) > tol) return false;
    }
  }
  return true;
}

SpectralProfile compute_profile(const Matrix& p, const Vector& pi, bool reversible) {
  const Eigen::Index n = p.rows();
  SpectralProfile profile;

  const Matrix deviation = p - Vector::Ones(n) * pi.transpose();
  profile.sigma1 = Eigen::JacobiSVD<Matrix>(deviation).singularValues()(0);

  const Vector sqrt_pi = pi.cwiseSqrt();
  profile.c_general = profile.sigma1 * sqrt_pi.maxCoeff() / sqrt_pi.minCoeff();

  const Matrix similar_dev =
      sqrt_pi.asDiagonal() * deviation * sqrt_pi.cwiseInverse().asDiagonal();
  profile.c_tight = Eigen::JacobiSVD<Matrix>(similar_dev).singularValues()(0);

  if (reversible) {
    // Psi^{1/2} P Psi^{-1/2} is symmetric up to the detailed-balance residual;
    // symmetrizing keeps the solver exact and the spectrum real.
    Matrix similar = sqrt_pi.asDiagonal() * p * sqrt_pi.cwiseInverse().asDiagonal();
    similar = 0.5 * (similar + similar.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(similar);

    // Ascending order from Eigen; the unit (Perron) eigenvalue is the largest.
    std::vector<int> order;
    order.push_back(static_cast<int>(n) - 1);
    std::vector<int> rest;
    for (int k = 0; k < static_cast<int>(n) - 1; ++k) rest.push_back(k);
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
      return std::abs(solver.eigenvalues()(a)) > std::abs(solver.eigenvalues()(b));
    });
    order.insert(order.end(), rest.begin(), rest.end());

    profile.eigenvalues.resize(n);
    profile.right_eigenvectors.resize(n, n);
    profile.left_eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      Vector w = solver.eigenvectors().col(order[k]);
      if (k == 0 && w.sum() < 0.0) w = -w;  // orient the Perron vector onto sqrt(pi)
      profile.eigenvalues(k) = solver.eigenvalues()(order[k]);
      profile.right_eigenvectors.col(k) = w.cwiseQuotient(sqrt_pi);
      profile.left_eigenvectors.col(k) = w.cwiseProduct(sqrt_pi);
    }
    profile.theta1_abs = std::abs(profile.eigenvalues(1));
  }
  return profile;
}

}  // namespace

Vector stationary_distribution(const Matrix& matrix) {
  check_square(matrix);
  const Eigen::Index n = matrix.rows();

  // (P^T - I) pi = 0 stacked with the normalization row sum(pi) = 1.
  Matrix system(n + 1, n);
  system.topRows(n) = matrix.transpose() - Matrix::Identity(n, n);
  system.bottomRows(1).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;

  Eigen::ColPivHouseholderQR<Matrix> qr(system);
  if (qr.rank() < n) {
    throw SingularSolve("stationarity system rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(n));
  }
  Vector pi = qr.solve(rhs);
  if ((pi.array() <= 0.0).any()) {
    throw SingularSolve("computed equilibrium has nonpositive entries");
  }
  check_invariant(matrix, pi);
  return pi;
}

Channel validate_channel(const Matrix& matrix, const ChannelOptions& options) {
  check_square(matrix);
  check_stochastic(matrix);
  if (!is_primitive(matrix)) {
    throw NotPrimitive("matrix is reducible or periodic");
  }
  Vector pi = stationary_distribution(matrix);
  const bool reversible = detailed_balance_holds(matrix, pi, options.reversibility_tol);
  SpectralProfile profile = compute_profile(matrix, pi, reversible);
  return Channel(matrix, std::move(pi), reversible, std::move(profile));
}

Channel trusted_channel(const Matrix& matrix, const Vector& pi, const ChannelOptions& options) {
  check_square(matrix);
  check_stochastic(matrix);
  if (pi.size() != matrix.rows()) {
    throw DimensionMismatch("pi length does not match matrix size");
  }
  if ((pi.array() <= 0.0).any() || std::abs(pi.sum() - 1.0) > kRowSumTol) {
    throw BadPrior("pi must be strictly positive and sum to 1");
  }
  check_invariant(matrix, pi);
  const bool reversible = detailed_balance_holds(matrix, pi, options.reversibility_tol);
  return Channel(matrix, pi, reversible, std::nullopt);
}

const SpectralProfile& Channel::profile() const {
  if (!profile_) {
    throw NotPrimitive("spectral profile unavailable for trusted non-primitive channel");
  }
  return *profile_;
}

const SpectralProfile& spectral_profile(const Channel& channel) { return channel.profile(); }

double contraction_constant(const Channel& channel, ContractionMode mode) {
  const SpectralProfile& profile = channel.profile();
  switch (mode) {
    case ContractionMode::reversible_eig:
      if (!channel.reversible()) {
        throw ModeUnavailable("reversible_eig requested for a non-reversible channel");
      }
      return *profile.theta1_abs;
    case ContractionMode::general_singular:
      return profile.c_general;
    case ContractionMode::tight_pi_operator:
      return profile.c_tight;
  }
  throw Error("unreachable contraction mode");
}

Vector apply_to_normalized(const Channel& channel, const Vector& rho_tilde) {
  if (rho_tilde.size() != channel.size()) {
    throw DimensionMismatch("vector length does not match channel size");
  }
  if ((rho_tilde.array() < 0.0).any()) {
    throw NotNormalized("normalized likelihood vector has negative entries");
  }
  const double mean = channel.pi().dot(rho_tilde);
  if (std::abs(mean - 1.0) > 1e-10) {
    throw NotNormalized("pi-mean is " + std::to_string(mean));
  }
  return channel.matrix() * rho_tilde;
}

}  // namespace treecast
