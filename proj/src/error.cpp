#include "epfbench/error.hpp"

namespace epf {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::FileUnreadable: return "FileUnreadable";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::GapTooLarge: return "GapTooLarge";
    case Errc::NonContiguous: return "NonContiguous";
    case Errc::FormatViolation: return "FormatViolation";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DegenerateDistribution: return "DegenerateDistribution";
    case Errc::EmptyContext: return "EmptyContext";
    case Errc::ContextTooShort: return "ContextTooShort";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::OptimizationFailed: return "OptimizationFailed";
    case Errc::TooShort: return "TooShort";
    case Errc::DidNotConverge: return "DidNotConverge";
    case Errc::SpawnFailed: return "SpawnFailed";
    case Errc::HandshakeFailed: return "HandshakeFailed";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::Timeout: return "Timeout";
    case Errc::ChildCrashed: return "ChildCrashed";
    case Errc::DuplicateDay: return "DuplicateDay";
    case Errc::MissingDay: return "MissingDay";
    case Errc::DegenerateLosses: return "DegenerateLosses";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DateMisaligned: return "DateMisaligned";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& message, std::optional<std::size_t> line) {
    std::string out{to_string(code)};
    if (line) {
        out += " (line " + std::to_string(*line) + ")";
    }
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

} // namespace epf
