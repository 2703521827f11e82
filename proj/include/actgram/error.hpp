#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace actgram {

enum class ErrorKind {
    MalformedRow,
    NonMonotoneTime,
    MissingPhaseFile,
    EmptyPhase,
    InvalidPhase,
    SeriesTooShort,
    EmptyCorpus,
    CalibrationDegenerate,
    EmptySequence,
    UnknownLabel,
    SingleClass,
    DegenerateFeatures,
    DimensionMismatch,
    UntrainedModel,
    UnfittedForest,
    InvalidProfile,
    InsufficientTrials,
    NothingEncoded,
    BadFile,
    Usage,
    Invariant,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

/// Re-throws `e` with a context prefix ("axis Fx, phase insertion: ...").
[[noreturn]] void rethrow_with_context(const Error& e, std::string_view context);

}  // namespace actgram
