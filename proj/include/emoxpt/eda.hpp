#ifndef EMOXPT_EDA_HPP
#define EMOXPT_EDA_HPP

#include "emoxpt/tokens.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace emoxpt {

/// Token counts sorted by count descending, ties lexicographically ascending.
struct FrequencyTable {
    struct Entry {
        std::string token;
        std::size_t count = 0;
        double doc_frequency = 0.0;  // fraction of documents containing token

        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    bool operator==(const FrequencyTable&) const = default;
};

struct LengthSummary {
    std::size_t n = 0;
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::vector<std::string> outlier_ids;  // sorted

    double lower_fence() const { return q1 - 1.5 * (q3 - q1); }
    double upper_fence() const { return q3 + 1.5 * (q3 - q1); }

    bool operator==(const LengthSummary&) const = default;
};

/// Full, untruncated table over every token of `docs`.
FrequencyTable token_frequencies(std::span<const TokenSequence> docs);

FrequencyTable word_frequency(std::span<const TokenSequence> docs, std::size_t top_k);

/// Keyword-frequency stand-in for topic analysis: like word_frequency but
/// only tokens of three or more characters count.
FrequencyTable topic_frequency(std::span<const TokenSequence> comments, std::size_t top_k);

/// Token-count distribution with quartiles by linear interpolation and
/// Tukey 1.5 IQR outlier fences. Ids come from `source_id`.
LengthSummary word_count_distribution(std::span<const TokenSequence> docs);

/// Quantile at probability p by linear interpolation between order
/// statistics; `sorted` must be ascending and nonempty.
double interpolated_quantile(std::span<const double> sorted, double p);

std::string frequency_table_csv(const FrequencyTable& table);

/// id,length,outlier rows in input order.
std::string document_lengths_csv(std::span<const TokenSequence> docs, const LengthSummary& summary);

}  // namespace emoxpt

#endif  // EMOXPT_EDA_HPP
