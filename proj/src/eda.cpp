#include "emoxpt/eda.hpp"

#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace emoxpt {

namespace {

FrequencyTable count_tokens(std::span<const TokenSequence> docs, std::size_t min_length) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents to count");

    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // token -> (count, docs)
    for (const auto& doc : docs) {
        std::set<std::string_view> seen;
        for (const auto& tok : doc.tokens) {
            if (tok.size() < min_length) continue;
            auto& slot = counts[tok];
            ++slot.first;
            if (seen.insert(tok).second) ++slot.second;
        }
    }

    FrequencyTable table;
    table.entries.reserve(counts.size());
    const auto n_docs = static_cast<double>(docs.size());
    for (const auto& [tok, c] : counts) {
        table.entries.push_back({tok, c.first, static_cast<double>(c.second) / n_docs});
    }
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    return table;
}

void truncate(FrequencyTable& table, std::size_t top_k) {
    if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be at least 1");
    if (table.entries.size() > top_k) table.entries.resize(top_k);
}

}  // namespace

FrequencyTable token_frequencies(std::span<const TokenSequence> docs) {
    return count_tokens(docs, 0);
}

FrequencyTable word_frequency(std::span<const TokenSequence> docs, std::size_t top_k) {
    auto table = count_tokens(docs, 0);
    truncate(table, top_k);
    return table;
}

FrequencyTable topic_frequency(std::span<const TokenSequence> comments, std::size_t top_k) {
    auto table = count_tokens(comments, 3);
    truncate(table, top_k);
    return table;
}

double interpolated_quantile(std::span<const double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LengthSummary word_count_distribution(std::span<const TokenSequence> docs) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents to summarize");

    std::vector<double> lengths;
    lengths.reserve(docs.size());
    for (const auto& d : docs) lengths.push_back(static_cast<double>(d.tokens.size()));
    std::sort(lengths.begin(), lengths.end());

    LengthSummary s;
    s.n = docs.size();
    s.min = static_cast<std::size_t>(lengths.front());
    s.max = static_cast<std::size_t>(lengths.back());
    // Integer sum first so the mean does not depend on document order.
    std::size_t total = 0;
    for (const auto& d : docs) total += d.tokens.size();
    s.mean = static_cast<double>(total) / static_cast<double>(s.n);
    s.q1 = interpolated_quantile(lengths, 0.25);
    s.median = interpolated_quantile(lengths, 0.5);
    s.q3 = interpolated_quantile(lengths, 0.75);

    const double lo = s.lower_fence();
    const double hi = s.upper_fence();
    for (const auto& d : docs) {
        const auto len = static_cast<double>(d.tokens.size());
        if (len < lo || len > hi) s.outlier_ids.push_back(d.source_id);
    }
    std::sort(s.outlier_ids.begin(), s.outlier_ids.end());
    return s;
}

std::string frequency_table_csv(const FrequencyTable& table) {
    std::string out = "token,count,doc_frequency\n";
    for (const auto& e : table.entries) {
        out += csv::join_row({e.token, std::to_string(e.count), format_fixed(e.doc_frequency, 6)});
    }
    return out;
}

std::string document_lengths_csv(std::span<const TokenSequence> docs, const LengthSummary& summary) {
    std::string out = "id,length,outlier\n";
    for (const auto& d : docs) {
        const bool outlier =
            std::binary_search(summary.outlier_ids.begin(), summary.outlier_ids.end(), d.source_id);
        out += csv::join_row({d.source_id, std::to_string(d.tokens.size()), outlier ? "1" : "0"});
    }
    return out;
}

}  // namespace emoxpt
