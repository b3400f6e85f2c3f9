#ifndef EMOXPT_EMBEDDING_HPP
#define EMOXPT_EMBEDDING_HPP

#include "emoxpt/tokens.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoxpt {

inline constexpr std::size_t kDefaultEmbeddingDim = 768;

enum class Level { Word, Sentence };

std::string_view level_name(Level level) noexcept;
Level parse_level(std::string_view name);

/// Static token -> vector source. Either a fixed table (word2vec text
/// format) or a seeded hash embedder that knows every token.
class EmbeddingProvider {
public:
    static EmbeddingProvider from_table(std::size_t dim,
                                        std::unordered_map<std::string, std::vector<double>> table);
    static EmbeddingProvider hashed(std::size_t dim, std::uint64_t seed);

    std::size_t dim() const { return dim_; }
    bool is_hashed() const { return hashed_; }
    bool contains(std::string_view token) const;
    std::optional<std::vector<double>> lookup(std::string_view token) const;

    /// Table vocabulary, sorted. Empty for the hash embedder, whose
    /// vocabulary is every token.
    std::vector<std::string> vocabulary() const;
    std::size_t vocabulary_size() const { return table_.size(); }

private:
    EmbeddingProvider() = default;

    std::size_t dim_ = 0;
    bool hashed_ = false;
    std::uint64_t seed_ = 0;
    std::unordered_map<std::string, std::vector<double>> table_;
};

/// word2vec text format: "V D" header, then V lines "token v1 .. vD".
EmbeddingProvider load_embedding_table(const std::filesystem::path& path);
EmbeddingProvider parse_embedding_table(std::string_view text);

/// Unit-norm vectors drawn from a stream keyed on (seed, token).
EmbeddingProvider hash_embedder(std::size_t dim, std::uint64_t seed);

/// Row-major n x d matrix, one row per data point, with unique row labels.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> labels, std::size_t cols, std::vector<double> data, Level level);

    /// Labels default to "p0", "p1", ...
    static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows, Level level = Level::Word);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return cols_; }
    Level level() const { return level_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& data() const { return data_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const EmbeddingMatrix&) const = default;

private:
    std::vector<std::string> labels_;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    Level level_ = Level::Word;
};

struct WordEmbedding {
    EmbeddingMatrix matrix;
    std::size_t oov_occurrences = 0;
    std::vector<std::string> oov_tokens;  // unique, sorted
};

struct SentenceEmbedding {
    EmbeddingMatrix matrix;
    std::size_t oov_occurrences = 0;
    std::vector<std::string> dropped_ids;  // documents with no known token
};

/// One row per unique in-vocabulary token, labels sorted.
WordEmbedding embed_words(std::span<const TokenSequence> docs, const EmbeddingProvider& provider);

/// One row per document: the mean of its in-vocabulary token vectors,
/// repeated tokens counted with multiplicity.
SentenceEmbedding embed_sentences(std::span<const TokenSequence> docs, const EmbeddingProvider& provider);

/// "label,d0,..,d{D-1}" header, one row per point, shortest round-trip
/// decimal values.
std::string matrix_to_csv(const EmbeddingMatrix& m);
EmbeddingMatrix matrix_from_csv(std::string_view text, Level level);

}  // namespace emoxpt

#endif  // EMOXPT_EMBEDDING_HPP
