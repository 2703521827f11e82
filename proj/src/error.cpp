#include "actgram/error.hpp"

namespace actgram {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
        case ErrorKind::MissingPhaseFile: return "MissingPhaseFile";
        case ErrorKind::EmptyPhase: return "EmptyPhase";
        case ErrorKind::InvalidPhase: return "InvalidPhase";
        case ErrorKind::SeriesTooShort: return "SeriesTooShort";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::CalibrationDegenerate: return "CalibrationDegenerate";
        case ErrorKind::EmptySequence: return "EmptySequence";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::DegenerateFeatures: return "DegenerateFeatures";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::UntrainedModel: return "UntrainedModel";
        case ErrorKind::UnfittedForest: return "UnfittedForest";
        case ErrorKind::InvalidProfile: return "InvalidProfile";
        case ErrorKind::InsufficientTrials: return "InsufficientTrials";
        case ErrorKind::NothingEncoded: return "NothingEncoded";
        case ErrorKind::BadFile: return "BadFile";
        case ErrorKind::Usage: return "Usage";
        case ErrorKind::Invariant: return "Invariant";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

void rethrow_with_context(const Error& e, std::string_view context) {
    std::string msg(context);
    msg += ": ";
    msg += e.detail();
    throw Error(e.kind(), msg);
}

}  // namespace actgram
