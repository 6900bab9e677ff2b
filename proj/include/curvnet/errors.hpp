#pragma once

#include <stdexcept>
#include <string>

namespace curvnet {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CURVNET_DEFINE_ERROR(Name)                                 \
  struct Name : Error {                                            \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

CURVNET_DEFINE_ERROR(InvalidArgument);
CURVNET_DEFINE_ERROR(DegenerateCurve);
CURVNET_DEFINE_ERROR(NotSimple);
CURVNET_DEFINE_ERROR(NotEmbedded);
CURVNET_DEFINE_ERROR(UnsupportedTopology);
CURVNET_DEFINE_ERROR(JunctionSolveFailed);
CURVNET_DEFINE_ERROR(MeshCollapse);
CURVNET_DEFINE_ERROR(StepRejected);
CURVNET_DEFINE_ERROR(SolverFailed);
CURVNET_DEFINE_ERROR(EmptyBlowup);
CURVNET_DEFINE_ERROR(TransitionRefused);
CURVNET_DEFINE_ERROR(ContinuationUnsupported);
CURVNET_DEFINE_ERROR(IoError);

#undef CURVNET_DEFINE_ERROR

}  // namespace curvnet
