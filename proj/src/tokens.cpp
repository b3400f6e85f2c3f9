#include "emoxpt/tokens.hpp"

#include "emoxpt/error.hpp"

#include <json.hpp>

namespace emoxpt {

std::string_view origin_name(Origin origin) noexcept {
    switch (origin) {
        case Origin::HumanComment: return "human_comment";
        case Origin::LlmResponse: return "llm_response";
        case Origin::Tweet: return "tweet";
    }
    return "unknown";
}

Origin parse_origin(std::string_view name) {
    if (name == "human_comment") return Origin::HumanComment;
    if (name == "llm_response") return Origin::LlmResponse;
    if (name == "tweet") return Origin::Tweet;
    throw Error(ErrorCode::InvalidArgument, "unknown origin '" + std::string(name) + "'");
}

std::string to_jsonl(const std::vector<TokenSequence>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        nlohmann::json obj;
        obj["id"] = doc.source_id;
        obj["origin"] = origin_name(doc.origin);
        obj["tokens"] = doc.tokens;
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

std::vector<TokenSequence> parse_token_jsonl(std::string_view text) {
    std::vector<TokenSequence> docs;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            auto obj = nlohmann::json::parse(line);
            TokenSequence doc;
            doc.source_id = obj.at("id").get<std::string>();
            doc.origin = parse_origin(obj.at("origin").get<std::string>());
            doc.tokens = obj.at("tokens").get<std::vector<std::string>>();
            docs.push_back(std::move(doc));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedRecord, "token line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

}  // namespace emoxpt
