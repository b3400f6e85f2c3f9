#include "emoxpt/cleaning.hpp"
#include "emoxpt/error.hpp"
#include "emoxpt/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <string>

using namespace emoxpt;
using namespace emoxpt::testing;

namespace {

const Wordlist& stopwords() {
    static const Wordlist w = load_wordlist(data_dir() / "stopwords_en.txt");
    return w;
}

const Wordlist& neutral() {
    static const Wordlist w = load_wordlist(data_dir() / "neutral_llm.txt");
    return w;
}

using Tokens = std::vector<std::string>;

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Random text mixing words, stopwords, links, mentions, emoji, non-Latin
// scripts and occasional raw (possibly invalid) bytes.
std::string random_text(Rng& rng) {
    static const char* fragments[] = {"https://", "http://x.y/z", "www.", "@", "#", " ", "  ", "\t", "\n", ".",
                                      "!", "'", "don't", "AI", "Model", "language", "the", "and", "Great",
                                      "terrible", "42", "x", "co", "_", "-"};
    static const char32_t codepoints[] = {0x1F600, 0x1F64F, 0x1F680, 0x2600, 0x27BF, 0x1F900, 0x1F5FF, 0x00E9,
                                          0x00DF, 0x4E2D, 0x0416, 0x200D, 0xFE0F, 0x1F1FA, 0x3042};
    std::string s;
    const std::size_t parts = rng.index(25);
    for (std::size_t i = 0; i < parts; ++i) {
        const double u = rng.uniform();
        if (u < 0.35) {
            s += fragments[rng.index(std::size(fragments))];
        } else if (u < 0.6) {
            const std::size_t len = 1 + rng.index(7);
            for (std::size_t j = 0; j < len; ++j)
                s += static_cast<char>((rng.uniform() < 0.3 ? 'A' : 'a') + static_cast<char>(rng.index(26)));
        } else if (u < 0.85) {
            append_utf8(s, codepoints[rng.index(std::size(codepoints))]);
        } else if (u < 0.95) {
            append_utf8(s, static_cast<char32_t>(0x20 + rng.index(0x2FFF)));
        } else {
            s += static_cast<char>(rng.index(256));
        }
    }
    return s;
}

std::string join(const Tokens& t) {
    std::string s;
    for (const auto& w : t) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    return s;
}

void check_token_invariants(const TokenSequence& seq, const Wordlist* neutral_list) {
    for (const auto& tok : seq.tokens) {
        CHECK(tok.size() >= kMinTokenLength);
        for (char c : tok) CHECK((c >= 'a' && c <= 'z'));
        CHECK_FALSE(stopwords().contains(tok));
        if (neutral_list) CHECK_FALSE(neutral_list->contains(tok));
    }
}

}  // namespace

TEST_CASE("shipped wordlists are pinned by content hash") {
    CHECK(stopwords().size() == 179);
    CHECK(stopwords().content_hash() == "649e2341238138974f7fc014ba2c3655dc334605136791a9d1918a41fca86143");
    CHECK(neutral().words() == std::set<std::string>{"ai", "language", "model"});
    CHECK(neutral().content_hash() == "9f0dcf75e7d32b2e2fab6449e97841c9c2dfffa8181148259d0254d0423ff055");
}

TEST_CASE("wordlist parsing skips comments and rejects empty lists") {
    const auto w = parse_wordlist("# header\nBeta\n\nalpha\n  gamma  \n", "x");
    CHECK(w.words() == std::set<std::string>{"alpha", "beta", "gamma"});
    CHECK(w.serialize() == "alpha\nbeta\ngamma\n");
    try {
        parse_wordlist("# only a comment\n", "empty");
        FAIL("expected EmptyWordlist");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyWordlist);
    }
}

TEST_CASE("clean_common examples") {
    CHECK(clean_common("Blessing or curse at once", stopwords()).tokens == Tokens{"blessing", "curse"});
    CHECK(clean_common("", stopwords()).tokens.empty());
    CHECK(clean_common("A I 42!!", stopwords()).tokens.empty());
    CHECK(clean_common("x", stopwords()).origin == Origin::Tweet);
}

TEST_CASE("clean_human examples") {
    CHECK(clean_human("Love it \xF0\x9F\x98\x8D @sam https://t.co/xyz", stopwords()).tokens == Tokens{"love"});
    CHECK(clean_human("@a @b @c", stopwords()).tokens.empty());
    CHECK(clean_human("#ChatGPT rocks", stopwords()).tokens == Tokens{"chatgpt", "rocks"});
    CHECK(clean_human("see www.example.com now", stopwords()).tokens == Tokens{"see"});
    CHECK(clean_human("I don't know", stopwords()).tokens == Tokens{"know"});
}

TEST_CASE("clean_human removes each emoji block") {
    const char32_t samples[] = {0x1F600, 0x1F64F, 0x1F300, 0x1F5FF, 0x1F680, 0x1F6FF,
                                0x2600,  0x26FF,  0x2700,  0x27BF,  0x1F900, 0x1F9FF};
    for (char32_t cp : samples) {
        CHECK(detail::is_emoji_codepoint(cp));
        std::string text = "good";
        append_utf8(text, cp);
        text += "news";
        CHECK(clean_human(text, stopwords()).tokens == Tokens{"goodnews"});
    }
    CHECK_FALSE(detail::is_emoji_codepoint(U'a'));
    CHECK_FALSE(detail::is_emoji_codepoint(0x1F650));
    CHECK_FALSE(detail::is_emoji_codepoint(0x27C0));
}

TEST_CASE("clean_llm examples") {
    CHECK(clean_llm("As an AI language model, I do not have access", stopwords(), neutral()).tokens ==
          Tokens{"access"});
    CHECK(clean_llm("model model model", stopwords(), neutral()).tokens.empty());
    const auto seq = clean_llm("great", stopwords(), neutral(), "r1");
    CHECK(seq.origin == Origin::LlmResponse);
    CHECK(seq.source_id == "r1");
}

TEST_CASE("derive_neutral_words") {
    const std::vector<TokenSequence> docs = {{"a", Origin::LlmResponse, {"x", "y"}},
                                             {"b", Origin::LlmResponse, {"x"}}};
    CHECK(derive_neutral_words(docs, 0.9, 5).words() == std::set<std::string>{"x"});
    CHECK(derive_neutral_words(docs, 0.5, 5).words() == std::set<std::string>{"x", "y"});
    CHECK(derive_neutral_words(docs, 0.5, 1).words() == std::set<std::string>{"x"});

    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    const std::vector<TokenSequence> sparse = {{"a", Origin::LlmResponse, {"x"}},
                                               {"b", Origin::LlmResponse, {"y"}},
                                               {"c", Origin::LlmResponse, {"z"}}};
    CHECK(code([&] { derive_neutral_words(sparse, 0.9, 5); }) == ErrorCode::EmptyWordlist);
    CHECK(code([&] { derive_neutral_words({}, 0.3, 5); }) == ErrorCode::EmptyInput);
    CHECK(code([&] { derive_neutral_words(docs, 0.0, 5); }) == ErrorCode::InvalidArgument);
    CHECK(code([&] { derive_neutral_words(docs, 1.5, 5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: cleaning over random unicode text") {
    Rng rng(2024);
    const Wordlist empty_neutral("none", {});
    for (int trial = 0; trial < 1000; ++trial) {
        const std::string text = random_text(rng);
        CAPTURE(text);
        const auto common = clean_common(text, stopwords());
        const auto human = clean_human(text, stopwords());
        const auto llm = clean_llm(text, stopwords(), neutral());
        check_token_invariants(common, nullptr);
        check_token_invariants(human, nullptr);
        check_token_invariants(llm, &neutral());

        CHECK(clean_common(join(common.tokens), stopwords()).tokens == common.tokens);
        CHECK(clean_human(join(human.tokens), stopwords()).tokens == human.tokens);
        CHECK(clean_llm(join(llm.tokens), stopwords(), neutral()).tokens == llm.tokens);

        CHECK(clean_llm(text, stopwords(), empty_neutral).tokens == human.tokens);

        CHECK(clean_human(text, stopwords()) == human);
        CHECK(clean_llm(text, stopwords(), neutral()) == llm);
    }
}

TEST_CASE("token jsonl round trip") {
    const std::vector<TokenSequence> docs = {{"a/c0", Origin::HumanComment, {"love", "it"}},
                                             {"b", Origin::LlmResponse, {}},
                                             {"c", Origin::Tweet, {"x\"y"}}};
    const auto text = to_jsonl(docs);
    CHECK(text.substr(0, text.find('\n')) == R"({"id":"a/c0","origin":"human_comment","tokens":["love","it"]})");
    CHECK(parse_token_jsonl(text) == docs);
}
