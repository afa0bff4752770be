#ifndef SCRI_SCATTER_ERRORS_HPP
#define SCRI_SCATTER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scri {

// Base class for all run-aborting conditions. The CLI converts these to
// machine-readable error JSON and a nonzero exit status.
struct Error : std::runtime_error {
  Error(std::string kind_, const std::string &what_)
      : std::runtime_error(what_), kind(std::move(kind_)) {}
  std::string kind;
};

struct DomainError : Error {
  explicit DomainError(const std::string &w) : Error("domain", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &w) : Error("config", w) {}
};

struct CFLViolation : Error {
  explicit CFLViolation(const std::string &w) : Error("cfl_violation", w) {}
};

struct WorldtubeContamination : Error {
  explicit WorldtubeContamination(const std::string &w)
      : Error("worldtube_contamination", w) {}
};

struct BoundaryContamination : Error {
  explicit BoundaryContamination(const std::string &w)
      : Error("boundary_contamination", w) {}
};

struct ConeOutsideDomain : Error {
  explicit ConeOutsideDomain(const std::string &w)
      : Error("cone_outside_domain", w) {}
};

struct NonlinearDivergence : Error {
  explicit NonlinearDivergence(const std::string &w)
      : Error("nonlinear_divergence", w) {}
};

struct NoContraction : Error {
  explicit NoContraction(const std::string &w) : Error("no_contraction", w) {}
};

struct FoliationOutsideDomain : Error {
  explicit FoliationOutsideDomain(const std::string &w)
      : Error("foliation_outside_domain", w) {}
};

struct ExtractionInconsistency : Error {
  explicit ExtractionInconsistency(const std::string &w)
      : Error("extraction_inconsistency", w) {}
};

} // namespace scri

#endif
