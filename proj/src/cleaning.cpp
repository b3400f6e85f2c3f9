#include "emoxpt/cleaning.hpp"

#include "emoxpt/eda.hpp"
#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"

#include <algorithm>

namespace emoxpt {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_lower_alpha(char c) { return c >= 'a' && c <= 'z'; }

bool is_scheme_char(char c) {
    return is_lower_alpha(c) || (c >= '0' && c <= '9') || c == '+' || c == '.' || c == '-';
}

std::size_t skip_nonspace(std::string_view s, std::size_t i) {
    while (i < s.size() && !is_space(s[i])) ++i;
    return i;
}

// Length of the UTF-8 sequence starting at s[i] and its codepoint; a broken
// sequence decodes as a single byte with codepoint 0xFFFD.
std::pair<std::size_t, char32_t> decode_utf8(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {1, b0};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {1, 0xFFFD};
    }
    if (i + len > s.size()) return {1, 0xFFFD};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {1, 0xFFFD};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {len, cp};
}

TokenSequence tokenize_tail(std::string_view text, const Wordlist& stopwords, Origin origin,
                            std::string source_id) {
    TokenSequence seq;
    seq.source_id = std::move(source_id);
    seq.origin = origin;

    std::string token;
    auto flush = [&] {
        if (token.size() >= kMinTokenLength && !stopwords.contains(token)) seq.tokens.push_back(token);
        token.clear();
    };
    // Anything outside [a-z] (including every byte of a multi-byte
    // sequence) acts as a separator.
    for (char c : text) {
        if (is_lower_alpha(c)) token.push_back(c);
        else flush();
    }
    flush();
    return seq;
}

}  // namespace

namespace detail {

std::string lowercase_ascii(std::string_view text) {
    std::string out(text);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string strip_urls(std::string_view text) {
    // scheme://... links
    std::string pass1;
    pass1.reserve(text.size());
    std::size_t emitted = 0;
    std::size_t search = 0;
    while (true) {
        const auto sep = text.find("://", search);
        if (sep == std::string_view::npos) break;
        std::size_t start = sep;
        while (start > emitted && is_scheme_char(text[start - 1])) --start;
        while (start < sep && !is_lower_alpha(text[start])) ++start;
        if (start == sep) {
            search = sep + 1;
            continue;
        }
        pass1.append(text.substr(emitted, start - emitted));
        emitted = skip_nonspace(text, sep);
        search = emitted;
    }
    pass1.append(text.substr(emitted));

    // bare www. links at the start of a whitespace-delimited word
    std::string out;
    out.reserve(pass1.size());
    std::size_t i = 0;
    while (i < pass1.size()) {
        const bool word_start = i == 0 || is_space(pass1[i - 1]);
        if (word_start && pass1.compare(i, 4, "www.") == 0) {
            i = skip_nonspace(pass1, i);
            continue;
        }
        out.push_back(pass1[i++]);
    }
    return out;
}

std::string strip_mentions(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '@') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (is_lower_alpha(text[j]) || (text[j] >= '0' && text[j] <= '9') || text[j] == '_')) {
                ++j;
            }
            if (j > i + 1) {
                i = j;
                continue;
            }
        }
        out.push_back(text[i++]);
    }
    return out;
}

bool is_emoji_codepoint(char32_t cp) noexcept {
    return (cp >= 0x1F600 && cp <= 0x1F64F)     // emoticons
           || (cp >= 0x1F300 && cp <= 0x1F5FF)  // misc symbols and pictographs
           || (cp >= 0x1F680 && cp <= 0x1F6FF)  // transport and map
           || (cp >= 0x1F900 && cp <= 0x1F9FF)  // supplemental symbols and pictographs
           || (cp >= 0x2600 && cp <= 0x26FF)    // misc symbols
           || (cp >= 0x2700 && cp <= 0x27BF);   // dingbats
}

std::string strip_emoji(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto [len, cp] = decode_utf8(text, i);
        if (!is_emoji_codepoint(cp)) out.append(text.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace detail

Wordlist::Wordlist(std::string name, std::set<std::string> words)
    : name_(std::move(name)), words_(std::move(words)), content_hash_(sha256_hex(serialize())) {}

std::string Wordlist::serialize() const {
    std::string out;
    for (const auto& w : words_) {
        out += w;
        out.push_back('\n');
    }
    return out;
}

Wordlist parse_wordlist(std::string_view text, std::string name) {
    std::set<std::string> words;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        words.insert(detail::lowercase_ascii(line.substr(first, last - first + 1)));
    }
    if (words.empty()) throw Error(ErrorCode::EmptyWordlist, "wordlist '" + name + "' has no words");
    return Wordlist(std::move(name), std::move(words));
}

Wordlist load_wordlist(const std::filesystem::path& path) {
    return parse_wordlist(read_text_file(path), path.stem().string());
}

TokenSequence clean_common(std::string_view text, const Wordlist& stopwords, Origin origin,
                           std::string source_id) {
    return tokenize_tail(detail::lowercase_ascii(text), stopwords, origin, std::move(source_id));
}

TokenSequence clean_human(std::string_view text, const Wordlist& stopwords, Origin origin,
                          std::string source_id) {
    auto s = detail::lowercase_ascii(text);
    s = detail::strip_urls(s);
    s = detail::strip_mentions(s);
    s = detail::strip_emoji(s);
    return tokenize_tail(s, stopwords, origin, std::move(source_id));
}

TokenSequence clean_llm(std::string_view text, const Wordlist& stopwords, const Wordlist& neutral,
                        std::string source_id) {
    auto seq = clean_human(text, stopwords, Origin::LlmResponse, std::move(source_id));
    std::erase_if(seq.tokens, [&](const std::string& t) { return neutral.contains(t); });
    return seq;
}

Wordlist derive_neutral_words(std::span<const TokenSequence> docs, double min_doc_frequency,
                              std::size_t top_k) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents to derive neutral words from");
    if (!(min_doc_frequency > 0.0 && min_doc_frequency <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "min_doc_frequency must lie in (0, 1]");
    }
    if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be at least 1");

    std::set<std::string> words;
    for (const auto& e : token_frequencies(docs).entries) {
        if (words.size() == top_k) break;
        if (e.doc_frequency >= min_doc_frequency) words.insert(e.token);
    }
    if (words.empty()) {
        throw Error(ErrorCode::EmptyWordlist, "no token reaches the minimum document frequency");
    }
    return Wordlist("neutral", std::move(words));
}

}  // namespace emoxpt
