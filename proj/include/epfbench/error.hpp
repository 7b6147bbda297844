#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epf {

enum class Errc {
    FileUnreadable,
    MalformedRow,
    EmptyInput,
    GapTooLarge,
    NonContiguous,
    FormatViolation,
    OutOfRange,
    TooFewSamples,
    DegenerateDistribution,
    EmptyContext,
    ContextTooShort,
    SeriesTooShort,
    InvalidWindow,
    OptimizationFailed,
    TooShort,
    DidNotConverge,
    SpawnFailed,
    HandshakeFailed,
    ProtocolError,
    Timeout,
    ChildCrashed,
    DuplicateDay,
    MissingDay,
    DegenerateLosses,
    LengthMismatch,
    DateMisaligned,
    InvalidArgument,
    Io,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error kind. Parsers attach the
/// 1-based line number of the offending input row when one exists.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

} // namespace epf
