#ifndef EMOXPT_CLEANING_HPP
#define EMOXPT_CLEANING_HPP

#include "emoxpt/tokens.hpp"

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace emoxpt {

/// A named word set pinned by a SHA-256 over its canonical serialization
/// (sorted words, each followed by '\n').
class Wordlist {
public:
    Wordlist() = default;
    Wordlist(std::string name, std::set<std::string> words);

    const std::string& name() const { return name_; }
    const std::set<std::string>& words() const { return words_; }
    const std::string& content_hash() const { return content_hash_; }
    bool contains(std::string_view word) const { return words_.find(std::string(word)) != words_.end(); }
    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }

    /// One word per line, sorted.
    std::string serialize() const;

private:
    std::string name_;
    std::set<std::string> words_;
    std::string content_hash_;
};

/// UTF-8, one word per line, '#' lines are comments. Words are trimmed and
/// lowercased. An empty list is rejected with EmptyWordlist.
Wordlist parse_wordlist(std::string_view text, std::string name);
Wordlist load_wordlist(const std::filesystem::path& path);

inline constexpr double kDefaultNeutralMinDocFrequency = 0.30;
inline constexpr std::size_t kDefaultNeutralTopK = 10;
inline constexpr std::size_t kMinTokenLength = 2;

// Shared rules: lowercase, non-[a-z] to space, collapse whitespace, split,
// drop tokens shorter than two characters, drop stopwords.
TokenSequence clean_common(std::string_view text, const Wordlist& stopwords,
                           Origin origin = Origin::Tweet, std::string source_id = {});

// Social media rules: URLs, @mentions and emoji go first, then the shared
// rules. '#' falls to the non-alphabetic rule so hashtag words survive.
TokenSequence clean_human(std::string_view text, const Wordlist& stopwords,
                          Origin origin = Origin::HumanComment, std::string source_id = {});

// clean_human followed by removal of neutral words.
TokenSequence clean_llm(std::string_view text, const Wordlist& stopwords, const Wordlist& neutral,
                        std::string source_id = {});

/// The top_k most frequent tokens whose document frequency reaches
/// `min_doc_frequency`.
Wordlist derive_neutral_words(std::span<const TokenSequence> docs,
                              double min_doc_frequency = kDefaultNeutralMinDocFrequency,
                              std::size_t top_k = kDefaultNeutralTopK);

namespace detail {

// Individual stages, exposed for tests. All expect already-lowercased text.
std::string lowercase_ascii(std::string_view text);
std::string strip_urls(std::string_view text);
std::string strip_mentions(std::string_view text);
std::string strip_emoji(std::string_view text);
bool is_emoji_codepoint(char32_t cp) noexcept;

}  // namespace detail

}  // namespace emoxpt

#endif  // EMOXPT_CLEANING_HPP
