#ifndef EMOXPT_ERROR_HPP
#define EMOXPT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace emoxpt {

enum class ErrorCode {
    // corpus
    MissingField,
    MalformedDate,
    MalformedRecord,
    DuplicateId,
    EmptyCorpus,
    // eda / cleaning
    EmptyInput,
    EmptyWordlist,
    // embedding
    BadHeader,
    DimensionMismatch,
    DuplicateToken,
    NoKnownTokens,
    NoEmbeddableDocuments,
    // clustering / projection
    TooFewPoints,
    NonFiniteInput,
    SingleCluster,
    DegenerateRow,
    LabelLengthMismatch,
    // sentiment
    NoLexiconHits,
    UnsupportedK,
    UnknownCluster,
    LevelMismatch,
    // plumbing
    IoError,
    InvalidArgument,
    ConfigError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` is stable and is what the
/// CLI reports in its machine-readable error line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace emoxpt

#endif  // EMOXPT_ERROR_HPP
