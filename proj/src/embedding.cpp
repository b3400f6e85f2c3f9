#include "emoxpt/embedding.hpp"

#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_set>

namespace emoxpt {

namespace {

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string line_label(std::size_t line) { return "line " + std::to_string(line); }

}  // namespace

std::string_view level_name(Level level) noexcept {
    return level == Level::Word ? "word" : "sentence";
}

Level parse_level(std::string_view name) {
    if (name == "word") return Level::Word;
    if (name == "sentence") return Level::Sentence;
    throw Error(ErrorCode::InvalidArgument, "unknown level '" + std::string(name) + "'");
}

EmbeddingProvider EmbeddingProvider::from_table(std::size_t dim,
                                                std::unordered_map<std::string, std::vector<double>> table) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be at least 1");
    for (const auto& [tok, vec] : table) {
        if (vec.size() != dim) throw Error(ErrorCode::DimensionMismatch, "vector for '" + tok + "' has wrong size");
        if (!std::all_of(vec.begin(), vec.end(), [](double v) { return std::isfinite(v); })) {
            throw Error(ErrorCode::NonFiniteInput, "vector for '" + tok + "' is not finite");
        }
    }
    EmbeddingProvider p;
    p.dim_ = dim;
    p.table_ = std::move(table);
    return p;
}

EmbeddingProvider EmbeddingProvider::hashed(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be at least 1");
    EmbeddingProvider p;
    p.dim_ = dim;
    p.hashed_ = true;
    p.seed_ = seed;
    return p;
}

bool EmbeddingProvider::contains(std::string_view token) const {
    return hashed_ || table_.find(std::string(token)) != table_.end();
}

std::optional<std::vector<double>> EmbeddingProvider::lookup(std::string_view token) const {
    if (!hashed_) {
        auto it = table_.find(std::string(token));
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }
    Rng rng(keyed_seed(seed_, token));
    std::vector<double> v(dim_);
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        for (auto& x : v) x = rng.normal();
        norm2 = 0.0;
        for (double x : v) norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

std::vector<std::string> EmbeddingProvider::vocabulary() const {
    std::vector<std::string> out;
    out.reserve(table_.size());
    for (const auto& kv : table_) out.push_back(kv.first);
    std::sort(out.begin(), out.end());
    return out;
}

EmbeddingProvider parse_embedding_table(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++line_no;
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) lines.emplace_back(line_no, line);
    }
    if (lines.empty()) throw Error(ErrorCode::BadHeader, "empty embedding table");

    auto header = split_ws(lines.front().second);
    std::optional<double> v_count, dim;
    if (header.size() == 2) {
        v_count = parse_number(header[0]);
        dim = parse_number(header[1]);
    }
    if (!v_count || !dim || *v_count < 1 || *dim < 1 || *v_count != std::floor(*v_count) ||
        *dim != std::floor(*dim)) {
        throw Error(ErrorCode::BadHeader, "header must be \"<vocabulary size> <dimension>\"");
    }
    const auto vocab = static_cast<std::size_t>(*v_count);
    const auto d = static_cast<std::size_t>(*dim);
    if (lines.size() - 1 != vocab) {
        throw Error(ErrorCode::BadHeader, "header declares " + std::to_string(vocab) + " tokens but file has " +
                                              std::to_string(lines.size() - 1));
    }

    std::unordered_map<std::string, std::vector<double>> table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [no, line] = lines[i];
        auto fields = split_ws(line);
        if (fields.size() != d + 1) {
            throw Error(ErrorCode::DimensionMismatch, line_label(no) + ": expected " + std::to_string(d) +
                                                          " components, found " +
                                                          std::to_string(fields.size() - 1));
        }
        std::vector<double> vec;
        vec.reserve(d);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            auto v = parse_number(fields[j]);
            if (!v || !std::isfinite(*v)) {
                throw Error(ErrorCode::NonFiniteInput, line_label(no) + ": bad component '" + std::string(fields[j]) + "'");
            }
            vec.push_back(*v);
        }
        std::string token(fields[0]);
        if (!table.emplace(token, std::move(vec)).second) {
            throw Error(ErrorCode::DuplicateToken, line_label(no) + ": duplicate token '" + token + "'");
        }
    }
    return EmbeddingProvider::from_table(d, std::move(table));
}

EmbeddingProvider load_embedding_table(const std::filesystem::path& path) {
    return parse_embedding_table(read_text_file(path));
}

EmbeddingProvider hash_embedder(std::size_t dim, std::uint64_t seed) {
    return EmbeddingProvider::hashed(dim, seed);
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> labels, std::size_t cols, std::vector<double> data,
                                 Level level)
    : labels_(std::move(labels)), cols_(cols), data_(std::move(data)), level_(level) {
    if (data_.size() != labels_.size() * cols_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix data does not match labels x columns");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate matrix label '" + l + "'");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
    }
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows, Level level) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    std::vector<std::string> labels;
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
        labels.push_back("p" + std::to_string(i));
        data.insert(data.end(), rows[i].begin(), rows[i].end());
    }
    return EmbeddingMatrix(std::move(labels), cols, std::move(data), level);
}

WordEmbedding embed_words(std::span<const TokenSequence> docs, const EmbeddingProvider& provider) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents to embed");

    std::set<std::string> known;
    std::set<std::string> oov;
    WordEmbedding out;
    for (const auto& doc : docs) {
        for (const auto& tok : doc.tokens) {
            if (provider.contains(tok)) {
                known.insert(tok);
            } else {
                oov.insert(tok);
                ++out.oov_occurrences;
            }
        }
    }
    if (known.empty()) throw Error(ErrorCode::NoKnownTokens, "every token is out of vocabulary");

    std::vector<std::string> labels(known.begin(), known.end());
    std::vector<double> data;
    data.reserve(labels.size() * provider.dim());
    for (const auto& tok : labels) {
        auto v = provider.lookup(tok);
        data.insert(data.end(), v->begin(), v->end());
    }
    out.matrix = EmbeddingMatrix(std::move(labels), provider.dim(), std::move(data), Level::Word);
    out.oov_tokens.assign(oov.begin(), oov.end());
    return out;
}

SentenceEmbedding embed_sentences(std::span<const TokenSequence> docs, const EmbeddingProvider& provider) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents to embed");

    const std::size_t d = provider.dim();
    SentenceEmbedding out;
    std::vector<std::string> labels;
    std::vector<double> data;
    std::vector<double> sum(d);
    for (const auto& doc : docs) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::size_t count = 0;
        for (const auto& tok : doc.tokens) {
            auto v = provider.lookup(tok);
            if (!v) {
                ++out.oov_occurrences;
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) sum[j] += (*v)[j];
            ++count;
        }
        if (count == 0) {
            out.dropped_ids.push_back(doc.source_id);
            continue;
        }
        labels.push_back(doc.source_id);
        for (std::size_t j = 0; j < d; ++j) data.push_back(sum[j] / static_cast<double>(count));
    }
    if (labels.empty()) throw Error(ErrorCode::NoEmbeddableDocuments, "no document has an in-vocabulary token");
    out.matrix = EmbeddingMatrix(std::move(labels), d, std::move(data), Level::Sentence);
    return out;
}

std::string matrix_to_csv(const EmbeddingMatrix& m) {
    std::vector<std::string> header{"label"};
    for (std::size_t j = 0; j < m.cols(); ++j) header.push_back("d" + std::to_string(j));
    std::string out = csv::join_row(header);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row{m.labels()[i]};
        for (double v : m.row(i)) row.push_back(format_double(v));
        out += csv::join_row(row);
    }
    return out;
}

EmbeddingMatrix matrix_from_csv(std::string_view text, Level level) {
    auto table = csv::parse(text);
    if (table.empty() || table[0].empty() || table[0][0] != "label") {
        throw Error(ErrorCode::BadHeader, "matrix CSV must start with a 'label' column");
    }
    const std::size_t cols = table[0].size() - 1;
    std::vector<std::string> labels;
    std::vector<double> data;
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (table[r].size() != cols + 1) {
            throw Error(ErrorCode::DimensionMismatch, "matrix row " + std::to_string(r) + " has wrong width");
        }
        labels.push_back(table[r][0]);
        for (std::size_t j = 1; j <= cols; ++j) {
            auto v = parse_number(table[r][j]);
            if (!v) throw Error(ErrorCode::NonFiniteInput, "matrix row " + std::to_string(r) + ": bad number");
            data.push_back(*v);
        }
    }
    return EmbeddingMatrix(std::move(labels), cols, std::move(data), level);
}

}  // namespace emoxpt
