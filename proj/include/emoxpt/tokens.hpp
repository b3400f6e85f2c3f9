#ifndef EMOXPT_TOKENS_HPP
#define EMOXPT_TOKENS_HPP

#include <string>
#include <string_view>
#include <vector>

namespace emoxpt {

enum class Origin { HumanComment, LlmResponse, Tweet };

std::string_view origin_name(Origin origin) noexcept;
Origin parse_origin(std::string_view name);

/// Cleaned tokens of one source document. Tokens are [a-z]{2,} and carry
/// no stopwords (nor neutral words for LLM responses).
struct TokenSequence {
    std::string source_id;
    Origin origin = Origin::HumanComment;
    std::vector<std::string> tokens;

    bool operator==(const TokenSequence&) const = default;
};

/// One JSON object per line: {"id":..,"origin":..,"tokens":[..]}.
std::string to_jsonl(const std::vector<TokenSequence>& docs);
std::vector<TokenSequence> parse_token_jsonl(std::string_view text);

}  // namespace emoxpt

#endif  // EMOXPT_TOKENS_HPP
