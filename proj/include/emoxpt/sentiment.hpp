#ifndef EMOXPT_SENTIMENT_HPP
#define EMOXPT_SENTIMENT_HPP

#include "emoxpt/clustering.hpp"
#include "emoxpt/embedding.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoxpt {

enum class Polarity { Positive, Negative };
enum class Group { Human, Llm };

std::string_view polarity_name(Polarity p) noexcept;
std::string_view group_name(Group g) noexcept;

/// Disjoint, nonempty positive and negative word sets.
class Lexicon {
public:
    Lexicon(std::set<std::string> positive, std::set<std::string> negative);

    const std::set<std::string>& positive() const { return positive_; }
    const std::set<std::string>& negative() const { return negative_; }
    const std::string& content_hash() const { return content_hash_; }

    /// +1 for a positive word, -1 for a negative word, 0 otherwise.
    int score(std::string_view word) const;

private:
    std::set<std::string> positive_;
    std::set<std::string> negative_;
    std::string content_hash_;
};

/// Lines of "positive <word>" or "negative <word>"; '#' starts a comment.
Lexicon parse_lexicon(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path);

using ClusterPolarity = std::map<std::size_t, Polarity>;

/// Signs a two-cluster model by lexicon vote: each cluster scores
/// (positive hits - negative hits) / members over the tokens of its points,
/// and the higher score is positive. On an exact tie, the cluster whose
/// centroid is nearer the mean vector of the known positive words wins.
/// `point_tokens[i]` holds the tokens behind point i.
ClusterPolarity label_clusters(const ClusterModel& model, const EmbeddingMatrix& points, const Lexicon& lexicon,
                               const EmbeddingProvider& provider,
                               std::span<const std::vector<std::string>> point_tokens);

/// Word-level form: each point's label is its token.
ClusterPolarity label_clusters(const ClusterModel& model, const EmbeddingMatrix& points, const Lexicon& lexicon,
                               const EmbeddingProvider& provider);

struct SentimentCounts {
    std::size_t positive_count = 0;
    std::size_t negative_count = 0;
    double positive_pct = 0.0;  // unrounded
    double negative_pct = 0.0;

    long positive_display() const;  // whole percent
    long negative_display() const;

    bool operator==(const SentimentCounts&) const = default;
};

SentimentCounts sentiment_percentages(std::span<const std::size_t> labels, const ClusterPolarity& polarity);

struct SentimentReport {
    Group group = Group::Human;
    Level level = Level::Sentence;
    SentimentCounts counts;
    double silhouette_mean = 0.0;
    ClusterPolarity cluster_polarity;
};

struct ComparisonReport {
    Level level = Level::Sentence;
    SentimentReport human;
    SentimentReport llm;
    std::string verdict;  // "human", "llm" or "equal"
};

ComparisonReport compare_groups(const SentimentReport& human, const SentimentReport& llm);

/// Machine-readable form of one comparison.
std::string comparison_json(const ComparisonReport& report);

/// Plain-text tables: silhouette by level (word, then sentence), emotion
/// percentages by level, and the verdict lines.
std::string render_report_tables(std::span<const ComparisonReport> reports);

}  // namespace emoxpt

#endif  // EMOXPT_SENTIMENT_HPP
