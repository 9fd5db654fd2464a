#include "kdvb/error.hpp"

namespace kdvb {

BlowUpError::BlowUpError(double time, const std::string& what)
    : Error(what), time_(time) {}

NonContractionError::NonContractionError(double last_ratio, const std::string& what)
    : Error(what), last_ratio_(last_ratio) {}

NoConvergenceError::NoConvergenceError(double last_residual, const std::string& what)
    : Error(what), last_residual_(last_residual) {}

InconsistentEigenpairError::InconsistentEigenpairError(double residual,
                                                       const std::string& what)
    : Error(what), residual_(residual) {}

}  // namespace kdvb
