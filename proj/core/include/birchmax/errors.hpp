#pragma once

#include <stdexcept>
#include <string>

namespace birchmax {

// Error taxonomy shared by every module. Each condition gets its own type so
// callers can catch precisely; `code()` gives a stable machine-readable tag
// for report files and CLI exit mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define BIRCHMAX_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                         \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

BIRCHMAX_DEFINE_ERROR(SyntaxError);
BIRCHMAX_DEFINE_ERROR(NotHomogeneous);
BIRCHMAX_DEFINE_ERROR(DegreeTooLow);
BIRCHMAX_DEFINE_ERROR(DimensionMismatch);
BIRCHMAX_DEFINE_ERROR(BudgetExceeded);
BIRCHMAX_DEFINE_ERROR(DegenerateFit);
BIRCHMAX_DEFINE_ERROR(EmptyCloud);
BIRCHMAX_DEFINE_ERROR(RoundingUnsafe);
BIRCHMAX_DEFINE_ERROR(NonconvergentShell);
BIRCHMAX_DEFINE_ERROR(TruncationTooSmall);
BIRCHMAX_DEFINE_ERROR(UnknownPreset);
BIRCHMAX_DEFINE_ERROR(ConfigInvalid);
BIRCHMAX_DEFINE_ERROR(IoError);

#undef BIRCHMAX_DEFINE_ERROR

}  // namespace birchmax
