#pragma once

#include <stdexcept>
#include <string>

namespace licremedy {

/// Base for every error raised by the library. Each subclass corresponds to
/// one failure mode named in the public contract; callers that only care
/// about "something went wrong" can catch this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LICREMEDY_DEFINE_ERROR(Name)        \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// model
LICREMEDY_DEFINE_ERROR(MalformedVersion);
LICREMEDY_DEFINE_ERROR(MalformedRequirement);
LICREMEDY_DEFINE_ERROR(MalformedTimestamp);

// index / registry
LICREMEDY_DEFINE_ERROR(IoFailure);
LICREMEDY_DEFINE_ERROR(SchemaViolation);
LICREMEDY_DEFINE_ERROR(NetworkFailure);
LICREMEDY_DEFINE_ERROR(NotFound);
LICREMEDY_DEFINE_ERROR(RateLimited);

// licensing
LICREMEDY_DEFINE_ERROR(OutOfMatrix);

// resolver
LICREMEDY_DEFINE_ERROR(UnknownRoot);
LICREMEDY_DEFINE_ERROR(NodeNotInGraph);

// remediator
LICREMEDY_DEFINE_ERROR(UniverseTooLarge);
LICREMEDY_DEFINE_ERROR(NoSolution);
LICREMEDY_DEFINE_ERROR(SolverTimeout);
LICREMEDY_DEFINE_ERROR(InconsistentSolution);

#undef LICREMEDY_DEFINE_ERROR

}  // namespace licremedy
