#pragma once

#include <stdexcept>
#include <string>

namespace pointproc {

// Base of every error the library throws. `kind()` is a stable short name
// the CLI prints alongside the message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define POINTPROC_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(tag, what) {}            \
  }

POINTPROC_DEFINE_ERROR(ParameterError, "parameter");
POINTPROC_DEFINE_ERROR(IntervalError, "interval");
POINTPROC_DEFINE_ERROR(EnvelopeError, "envelope");
POINTPROC_DEFINE_ERROR(InsufficientDataError, "insufficient-data");
POINTPROC_DEFINE_ERROR(DegenerateError, "degenerate");
POINTPROC_DEFINE_ERROR(ShapeError, "shape");
POINTPROC_DEFINE_ERROR(OutOfBoundsError, "out-of-bounds");
POINTPROC_DEFINE_ERROR(UnboundedRegimeError, "unbounded-regime");
POINTPROC_DEFINE_ERROR(UnsupportedKernelError, "unsupported-kernel");
POINTPROC_DEFINE_ERROR(BaselineError, "baseline");
POINTPROC_DEFINE_ERROR(BudgetError, "budget");
POINTPROC_DEFINE_ERROR(ParseError, "parse");

#undef POINTPROC_DEFINE_ERROR

}  // namespace pointproc
