#ifndef EMOXPT_CORPUS_HPP
#define EMOXPT_CORPUS_HPP

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace emoxpt {

/// One tweet with its LLM response and the human comments posted under it.
struct Record {
    std::string id;
    std::chrono::year_month_day date;
    std::set<std::string> hashtags;  // lowercase, no '#', [a-z0-9_]+
    std::string tweet_text;
    std::string llm_response;         // may be empty
    std::vector<std::string> comments;  // never blank

    bool operator==(const Record&) const = default;
};

struct Corpus {
    std::vector<Record> records;
    std::string source_path;

    bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat parse_corpus_format(std::string_view name);

struct CommentStats {
    std::size_t total_tweets = 0;
    std::size_t total_comments = 0;
    std::size_t zero_comment_tweets = 0;
    double zero_comment_fraction = 0.0;
    std::size_t max_comments = 0;
    double mean_comments = 0.0;
    std::map<std::size_t, std::size_t> histogram;  // comment count -> tweets

    bool operator==(const CommentStats&) const = default;
};

/// Loads a corpus file. JSONL holds one object per line; CSV has a header
/// row and '|'-separated hashtags and comments cells. Both need the keys
/// id, date, hashtags, tweet, response, comments.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Parses the corpus from memory; `source` is only used for diagnostics.
Corpus parse_corpus(std::string_view text, CorpusFormat format, std::string source = {});

/// Percentage of records carrying each tag. Tags co-occur, so the values
/// may add up to more than 100.
std::map<std::string, double> hashtag_distribution(const Corpus& corpus);

CommentStats comment_count_stats(const Corpus& corpus);

/// "YYYY-MM-DD"
std::string format_date(const std::chrono::year_month_day& date);

}  // namespace emoxpt

#endif  // EMOXPT_CORPUS_HPP
