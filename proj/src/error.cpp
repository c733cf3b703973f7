#include "narep/error.hpp"

namespace narep {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::TypeError: return "TypeError";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::Overflow: return "Overflow";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AccessViolation: return "AccessViolation";
    case Errc::UnknownPlace: return "UnknownPlace";
    case Errc::UnknownPath: return "UnknownPath";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::InvalidSharingSpec: return "InvalidSharingSpec";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InconsistentInitialization: return "InconsistentInitialization";
    case Errc::NotRepShared: return "NotRepShared";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InvalidRate: return "InvalidRate";
    case Errc::LivelockError: return "LivelockError";
    case Errc::NegativeMarking: return "NegativeMarking";
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

namespace {

std::string format_message(Errc code, const std::string& message, SourcePos pos,
                           const std::string& rule) {
  std::string out(to_string(code));
  if (pos.line > 0) {
    out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
  }
  if (!rule.empty()) out += " [" + rule + "]";
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, SourcePos pos, std::string rule)
    : std::runtime_error(format_message(code, message, pos, rule)),
      code_(code),
      pos_(pos),
      rule_(std::move(rule)),
      detail_(message) {}

void fail(Errc code, const std::string& message, SourcePos pos, std::string rule) {
  throw Error(code, message, pos, std::move(rule));
}

}  // namespace narep
