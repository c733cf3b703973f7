#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace narep {

enum class Errc {
  SyntaxError,
  TypeError,
  DivisionByZero,
  Overflow,
  IndexOutOfRange,
  AccessViolation,
  UnknownPlace,
  UnknownPath,
  KindMismatch,
  InvalidSharingSpec,
  InvalidArgument,
  InconsistentInitialization,
  NotRepShared,
  ValidationError,
  InvalidRate,
  LivelockError,
  NegativeMarking,
  HorizonExceeded,
  IoError,
};

std::string_view to_string(Errc code);

struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

/// Every failure in the library is reported through this type. `rule()` is a
/// stable machine-readable id (e.g. "OWNER_NOT_IN_ACCESS") when one applies.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, SourcePos pos = {}, std::string rule = {});

  Errc code() const noexcept { return code_; }
  SourcePos pos() const noexcept { return pos_; }
  const std::string& rule() const noexcept { return rule_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  SourcePos pos_;
  std::string rule_;
  std::string detail_;
};

[[noreturn]] void fail(Errc code, const std::string& message, SourcePos pos = {},
                       std::string rule = {});

}  // namespace narep
