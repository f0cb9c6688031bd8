#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace siegel {

// Process exit codes used by the CLI. Library code throws typed errors; the
// CLI maps them to these classes. 0 = success, 1 = unexpected internal error.
enum class ErrorClass : int {
  Usage = 2,         // malformed inputs, bad config, unusable files
  Precision = 3,     // working precision exhausted
  Domain = 4,        // mathematically out of domain (rational angle, ...)
  SearchBudget = 5,  // a search ran out of budget without meeting its target
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what),
        cls_(cls),
        name_(std::move(name)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorClass cls_;
  std::string name_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what)
      : Error(ErrorClass::Usage, "UsageError", what) {}
};

// Requested result has fewer trustworthy bits than required.
struct PrecisionExhausted : Error {
  explicit PrecisionExhausted(const std::string& what)
      : Error(ErrorClass::Precision, "PrecisionExhausted", what) {}
};

// A continued-fraction expansion is too short for the quantity requested.
struct InsufficientDepth : Error {
  explicit InsufficientDepth(const std::string& what)
      : Error(ErrorClass::Domain, "InsufficientDepth", what) {}
};

// The angle is rational: there is no Siegel disk to study.
struct RationalAngle : Error {
  explicit RationalAngle(const std::string& what)
      : Error(ErrorClass::Domain, "RationalAngle", what) {}
};

// A least-squares fit was requested over too few or degenerate data.
struct DegenerateFit : Error {
  explicit DegenerateFit(const std::string& what)
      : Error(ErrorClass::Domain, "DegenerateFit", what) {}
};

// Truncation tail at the requested radius exceeds the tolerance.
struct TailTooLarge : Error {
  explicit TailTooLarge(const std::string& what)
      : Error(ErrorClass::Domain, "TailTooLarge", what) {}
};

// A sampled curve has coincident consecutive points.
struct CoincidentPoints : Error {
  explicit CoincidentPoints(const std::string& what)
      : Error(ErrorClass::Usage, "CoincidentPoints", what) {}
};

// Two curves that must share a parameter grid do not.
struct GridMismatch : Error {
  explicit GridMismatch(const std::string& what)
      : Error(ErrorClass::Usage, "GridMismatch", what) {}
};

// An experiment was configured with an empty candidate family.
struct NoCandidates : Error {
  explicit NoCandidates(const std::string& what)
      : Error(ErrorClass::Usage, "NoCandidates", what) {}
};

// A regularity probe has too few separation scales to fit an exponent.
struct InsufficientScales : Error {
  explicit InsufficientScales(const std::string& what)
      : Error(ErrorClass::Usage, "InsufficientScales", what) {}
};

// A search exhausted its budget without reaching its target.
struct SearchBudgetExhausted : Error {
  explicit SearchBudgetExhausted(const std::string& what)
      : Error(ErrorClass::SearchBudget, "SearchBudgetExhausted", what) {}
};

}  // namespace siegel
