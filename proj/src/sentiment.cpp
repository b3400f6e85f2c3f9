#include "emoxpt/sentiment.hpp"

#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace emoxpt {

std::string_view polarity_name(Polarity p) noexcept {
    return p == Polarity::Positive ? "positive" : "negative";
}

std::string_view group_name(Group g) noexcept { return g == Group::Human ? "human" : "llm"; }

Lexicon::Lexicon(std::set<std::string> positive, std::set<std::string> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {
    if (positive_.empty() || negative_.empty()) {
        throw Error(ErrorCode::EmptyWordlist, "lexicon needs both positive and negative words");
    }
    std::string canonical;
    for (const auto& w : positive_) {
        if (negative_.contains(w)) throw Error(ErrorCode::InvalidArgument, "word '" + w + "' has both polarities");
        canonical += "positive " + w + "\n";
    }
    for (const auto& w : negative_) canonical += "negative " + w + "\n";
    content_hash_ = sha256_hex(canonical);
}

int Lexicon::score(std::string_view word) const {
    const std::string w(word);
    if (positive_.contains(w)) return 1;
    if (negative_.contains(w)) return -1;
    return 0;
}

Lexicon parse_lexicon(std::string_view text) {
    std::set<std::string> pos, neg;
    std::size_t pos_i = 0;
    std::size_t line_no = 0;
    while (pos_i < text.size()) {
        auto nl = text.find('\n', pos_i);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos_i, nl - pos_i);
        pos_i = nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        line = line.substr(first);
        const auto sp = line.find_first_of(" \t");
        const auto rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp);
        const auto w0 = rest.find_first_not_of(" \t");
        const auto w1 = rest.find_last_not_of(" \t\r");
        if (sp == std::string_view::npos || w0 == std::string_view::npos) {
            throw Error(ErrorCode::MalformedRecord, "lexicon line " + std::to_string(line_no) + ": expected '<polarity> <word>'");
        }
        const auto tag = line.substr(0, sp);
        std::string word(rest.substr(w0, w1 - w0 + 1));
        if (tag == "positive") pos.insert(std::move(word));
        else if (tag == "negative") neg.insert(std::move(word));
        else throw Error(ErrorCode::MalformedRecord, "lexicon line " + std::to_string(line_no) + ": unknown polarity");
    }
    return Lexicon(std::move(pos), std::move(neg));
}

Lexicon load_lexicon(const std::filesystem::path& path) { return parse_lexicon(read_text_file(path)); }

ClusterPolarity label_clusters(const ClusterModel& model, const EmbeddingMatrix& points, const Lexicon& lexicon,
                               const EmbeddingProvider& provider,
                               std::span<const std::vector<std::string>> point_tokens) {
    if (model.k != 2) throw Error(ErrorCode::UnsupportedK, "polarity labelling needs exactly 2 clusters");
    if (model.assignments.size() != points.rows() || point_tokens.size() != points.rows()) {
        throw Error(ErrorCode::LabelLengthMismatch, "model, points and tokens must describe the same points");
    }

    double net[2] = {0.0, 0.0};
    std::size_t members[2] = {0, 0};
    std::size_t hits = 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto c = model.assignments[i];
        ++members[c];
        for (const auto& tok : point_tokens[i]) {
            const int s = lexicon.score(tok);
            net[c] += s;
            if (s != 0) ++hits;
        }
    }
    if (hits == 0) throw Error(ErrorCode::NoLexiconHits, "no clustered token appears in the lexicon");

    const double score0 = members[0] ? net[0] / static_cast<double>(members[0]) : 0.0;
    const double score1 = members[1] ? net[1] / static_cast<double>(members[1]) : 0.0;
    std::size_t positive = score0 > score1 ? 0 : 1;
    if (score0 == score1) {
        std::vector<double> anchor(provider.dim(), 0.0);
        std::size_t known = 0;
        for (const auto& w : lexicon.positive()) {
            auto v = provider.lookup(w);
            if (!v) continue;
            for (std::size_t j = 0; j < anchor.size(); ++j) anchor[j] += (*v)[j];
            ++known;
        }
        positive = 0;
        if (known > 0 && anchor.size() == model.dim) {
            for (auto& a : anchor) a /= static_cast<double>(known);
            if (squared_distance(model.centroid(1), anchor) < squared_distance(model.centroid(0), anchor)) positive = 1;
        }
    }
    return {{positive, Polarity::Positive}, {1 - positive, Polarity::Negative}};
}

ClusterPolarity label_clusters(const ClusterModel& model, const EmbeddingMatrix& points, const Lexicon& lexicon,
                               const EmbeddingProvider& provider) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(points.rows());
    for (const auto& l : points.labels()) tokens.push_back({l});
    return label_clusters(model, points, lexicon, provider, tokens);
}

long SentimentCounts::positive_display() const { return std::lround(positive_pct); }
long SentimentCounts::negative_display() const { return std::lround(negative_pct); }

SentimentCounts sentiment_percentages(std::span<const std::size_t> labels, const ClusterPolarity& polarity) {
    if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no labels to count");
    SentimentCounts c;
    for (auto l : labels) {
        auto it = polarity.find(l);
        if (it == polarity.end()) throw Error(ErrorCode::UnknownCluster, "cluster " + std::to_string(l) + " has no polarity");
        if (it->second == Polarity::Positive) ++c.positive_count;
        else ++c.negative_count;
    }
    const auto total = static_cast<double>(c.positive_count + c.negative_count);
    c.positive_pct = 100.0 * static_cast<double>(c.positive_count) / total;
    c.negative_pct = 100.0 * static_cast<double>(c.negative_count) / total;
    return c;
}

ComparisonReport compare_groups(const SentimentReport& human, const SentimentReport& llm) {
    if (human.level != llm.level) throw Error(ErrorCode::LevelMismatch, "reports are at different levels");
    ComparisonReport out;
    out.level = human.level;
    out.human = human;
    out.llm = llm;
    const auto hp = static_cast<double>(human.counts.positive_count) *
                    static_cast<double>(llm.counts.positive_count + llm.counts.negative_count);
    const auto lp = static_cast<double>(llm.counts.positive_count) *
                    static_cast<double>(human.counts.positive_count + human.counts.negative_count);
    // Cross-multiplied counts compare the exact ratios.
    out.verdict = hp > lp ? "human" : lp > hp ? "llm" : "equal";
    return out;
}

namespace {

nlohmann::json report_json(const SentimentReport& r) {
    nlohmann::json j;
    j["group"] = group_name(r.group);
    j["level"] = level_name(r.level);
    j["counts"] = {{"positive", r.counts.positive_count}, {"negative", r.counts.negative_count}};
    j["percentages"] = {{"positive", r.counts.positive_pct},
                        {"negative", r.counts.negative_pct},
                        {"positive_display", r.counts.positive_display()},
                        {"negative_display", r.counts.negative_display()}};
    j["silhouette_mean"] = r.silhouette_mean;
    nlohmann::json pol = nlohmann::json::object();
    for (const auto& [c, p] : r.cluster_polarity) pol[std::to_string(c)] = polarity_name(p);
    j["cluster_polarity"] = pol;
    return j;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string table(const std::string& caption, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& r : rows) widths[c] = std::max(widths[c], r[c].size());
    }
    std::string rule = "+";
    for (auto w : widths) rule += std::string(w + 2, '-') + "+";
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s = "|";
        for (std::size_t c = 0; c < cells.size(); ++c) s += " " + pad(cells[c], widths[c]) + " |";
        return s + "\n";
    };
    std::string out = caption + "\n" + rule + "\n" + line(header) + rule + "\n";
    for (const auto& r : rows) out += line(r) + rule + "\n";
    return out;
}

std::string pct(long v) { return std::to_string(v) + "%"; }

}  // namespace

std::string comparison_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["level"] = level_name(report.level);
    j["human"] = report_json(report.human);
    j["llm"] = report_json(report.llm);
    j["verdict"] = report.verdict;
    return j.dump(2) + "\n";
}

std::string render_report_tables(std::span<const ComparisonReport> reports) {
    std::string out;
    for (const auto& r : reports) {
        const bool word = r.level == Level::Word;
        const std::string caption = word ? "WORD LEVEL K-MEANS MODEL EVALUATION" : "SENTENCE LEVEL K-MEANS MODEL EVALUATION";
        // Word level lists the LLM column first, sentence level the human one.
        if (word) {
            out += table(caption, {"", "LWrd", "HWrd"},
                         {{"Silhouette Score", format_fixed(r.llm.silhouette_mean, 3),
                           format_fixed(r.human.silhouette_mean, 3)}});
        } else {
            out += table(caption, {"", "HCmnt", "LRspn"},
                         {{"Silhouette Score", format_fixed(r.human.silhouette_mean, 3),
                           format_fixed(r.llm.silhouette_mean, 3)}});
        }
        out += "\n";
    }
    for (const auto& r : reports) {
        const bool word = r.level == Level::Word;
        out += table(word ? "PERCENTAGES OF EMOTIONS (WORD LEVEL)" : "PERCENTAGES OF EMOTIONS",
                     {"", "Positive", "Negative"},
                     {{word ? "Human Words" : "Human Comments", pct(r.human.counts.positive_display()),
                       pct(r.human.counts.negative_display())},
                      {word ? "LLM Words" : "LLM Responses", pct(r.llm.counts.positive_display()),
                       pct(r.llm.counts.negative_display())}});
        out += "verdict (" + std::string(level_name(r.level)) + "): " + r.verdict + "\n\n";
    }
    return out;
}

}  // namespace emoxpt
