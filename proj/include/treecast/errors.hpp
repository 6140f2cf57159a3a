#pragma once

#include <stdexcept>
#include <string>

namespace treecast {

// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TREECAST_ERROR_TYPE(Name)                      \
  class Name : public Error {                          \
   public:                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

TREECAST_ERROR_TYPE(DimensionMismatch);
TREECAST_ERROR_TYPE(NotStochastic);
TREECAST_ERROR_TYPE(NotPrimitive);
TREECAST_ERROR_TYPE(SingularSolve);
TREECAST_ERROR_TYPE(ModeUnavailable);
TREECAST_ERROR_TYPE(NotNormalized);
TREECAST_ERROR_TYPE(SizeOverflow);
TREECAST_ERROR_TYPE(MixedEquilibria);
TREECAST_ERROR_TYPE(MalformedSpec);
TREECAST_ERROR_TYPE(UnknownChannel);
TREECAST_ERROR_TYPE(EnumerationTooLarge);
TREECAST_ERROR_TYPE(StateOutOfRange);
TREECAST_ERROR_TYPE(PatternImpossible);
TREECAST_ERROR_TYPE(BadPrior);
TREECAST_ERROR_TYPE(SOutOfRange);

#undef TREECAST_ERROR_TYPE

}  // namespace treecast
