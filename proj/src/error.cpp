#include "emoxpt/error.hpp"

namespace emoxpt {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::MalformedDate: return "MalformedDate";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyWordlist: return "EmptyWordlist";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DuplicateToken: return "DuplicateToken";
        case ErrorCode::NoKnownTokens: return "NoKnownTokens";
        case ErrorCode::NoEmbeddableDocuments: return "NoEmbeddableDocuments";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::DegenerateRow: return "DegenerateRow";
        case ErrorCode::LabelLengthMismatch: return "LabelLengthMismatch";
        case ErrorCode::NoLexiconHits: return "NoLexiconHits";
        case ErrorCode::UnsupportedK: return "UnsupportedK";
        case ErrorCode::UnknownCluster: return "UnknownCluster";
        case ErrorCode::LevelMismatch: return "LevelMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace emoxpt
