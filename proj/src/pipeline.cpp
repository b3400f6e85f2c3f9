#include "emoxpt/pipeline.hpp"

#include "emoxpt/eda.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/sentiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <unordered_map>

namespace emoxpt {

namespace fs = std::filesystem;

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "corpus.path",          "corpus.format",
        "cleaning.stopwords",   "cleaning.neutral",
        "cleaning.neutral_min_doc_frequency", "cleaning.neutral_top_k",
        "embedding.table",      "embedding.hash.dim",
        "embedding.hash.seed",  "kmeans.k",
        "kmeans.seed",          "kmeans.init",
        "kmeans.max_iter",      "kmeans.tol",
        "tsne.perplexity",      "tsne.learning_rate",
        "tsne.iterations",      "tsne.exaggeration",
        "tsne.exaggeration_iters", "tsne.seed",
        "sentiment.lexicon",    "eda.top_k",
        "output.dir",
    };
    return keys;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(const ConfigMap& values, const std::string& key, T fallback) {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    const auto& s = it->second;
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorCode::ConfigError, "config key '" + key + "' has invalid value '" + s + "'");
    }
    return v;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : base / p;
}

std::optional<fs::path> optional_path(const ConfigMap& values, const std::string& key, const fs::path& base) {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty()) return std::nullopt;
    return resolve(base, it->second);
}

fs::path required_path(const ConfigMap& values, const std::string& key, const fs::path& base) {
    auto p = optional_path(values, key, base);
    if (!p) throw Error(ErrorCode::ConfigError, "config key '" + key + "' is required");
    return *p;
}

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e);
    }
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct Variant {
    Group group;
    Level level;
    std::string name;     // e.g. human_word
    std::string caption;  // figure title
};

}  // namespace

EmbeddingProvider make_provider(const EmbeddingSource& source) {
    if (source.table.has_value() == source.hash_dim.has_value()) {
        throw Error(ErrorCode::ConfigError, "exactly one embedding source (table or hash) must be given");
    }
    if (source.table) return load_embedding_table(*source.table);
    return hash_embedder(*source.hash_dim, source.hash_seed);
}

ConfigMap parse_config_text(std::string_view text) {
    ConfigMap values;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": empty key");
        values[key] = std::string(trim(line.substr(eq + 1)));
    }
    return values;
}

PipelineConfig config_from_map(const ConfigMap& values, const fs::path& base_dir) {
    for (const auto& [key, value] : values) {
        if (!known_keys().contains(key)) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }

    PipelineConfig c;
    c.corpus_path = required_path(values, "corpus.path", base_dir);
    if (auto it = values.find("corpus.format"); it != values.end()) {
        try {
            c.format = parse_corpus_format(it->second);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, e.what());
        }
    }
    c.stopwords_path = required_path(values, "cleaning.stopwords", base_dir);
    c.neutral_path = optional_path(values, "cleaning.neutral", base_dir);
    c.neutral_min_doc_frequency =
        parse_value(values, "cleaning.neutral_min_doc_frequency", kDefaultNeutralMinDocFrequency);
    c.neutral_top_k = parse_value(values, "cleaning.neutral_top_k", kDefaultNeutralTopK);

    c.embedding.table = optional_path(values, "embedding.table", base_dir);
    if (values.contains("embedding.hash.dim")) {
        c.embedding.hash_dim = parse_value<std::size_t>(values, "embedding.hash.dim", 0);
    }
    c.embedding.hash_seed = parse_value<std::uint64_t>(values, "embedding.hash.seed", 0);
    if (values.contains("embedding.hash.seed") && !c.embedding.hash_dim) {
        throw Error(ErrorCode::ConfigError, "embedding.hash.seed given without embedding.hash.dim");
    }

    c.k = parse_value<std::size_t>(values, "kmeans.k", 2);
    c.kmeans.seed = parse_value<std::uint64_t>(values, "kmeans.seed", 0);
    if (auto it = values.find("kmeans.init"); it != values.end()) {
        try {
            c.kmeans.init = parse_init_method(it->second);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, e.what());
        }
    }
    c.kmeans.max_iter = parse_value(values, "kmeans.max_iter", c.kmeans.max_iter);
    c.kmeans.tol = parse_value(values, "kmeans.tol", c.kmeans.tol);

    c.tsne.perplexity = parse_value(values, "tsne.perplexity", c.tsne.perplexity);
    c.tsne.learning_rate = parse_value(values, "tsne.learning_rate", c.tsne.learning_rate);
    c.tsne.iterations = parse_value(values, "tsne.iterations", c.tsne.iterations);
    c.tsne.exaggeration_factor = parse_value(values, "tsne.exaggeration", c.tsne.exaggeration_factor);
    c.tsne.exaggeration_iters = parse_value(values, "tsne.exaggeration_iters", c.tsne.exaggeration_iters);
    c.tsne.momentum_switch_iter = c.tsne.exaggeration_iters;
    c.tsne.seed = parse_value<std::uint64_t>(values, "tsne.seed", 0);

    c.lexicon_path = required_path(values, "sentiment.lexicon", base_dir);
    c.out_dir = required_path(values, "output.dir", base_dir);
    c.eda_top_k = parse_value(values, "eda.top_k", c.eda_top_k);
    return c;
}

PipelineConfig load_config(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    auto values = parse_config_text(text);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    // Override paths are relative to the caller, so make them absolute.
    static const std::set<std::string> path_keys = {"corpus.path", "cleaning.stopwords", "cleaning.neutral",
                                                    "embedding.table", "sentiment.lexicon", "output.dir"};
    for (const auto& [key, value] : overrides) {
        if (path_keys.contains(key) && !value.empty()) values[key] = fs::absolute(value).string();
        else values[key] = value;
    }
    return config_from_map(values, base);
}

void validate_config(const PipelineConfig& config) {
    if (config.embedding.table.has_value() == config.embedding.hash_dim.has_value()) {
        throw Error(ErrorCode::ConfigError, "exactly one of embedding.table or embedding.hash.dim must be set");
    }
    if (config.embedding.hash_dim && *config.embedding.hash_dim == 0) {
        throw Error(ErrorCode::ConfigError, "embedding.hash.dim must be at least 1");
    }
    if (config.k < 2) throw Error(ErrorCode::ConfigError, "kmeans.k must be at least 2");
    if (config.eda_top_k == 0) throw Error(ErrorCode::ConfigError, "eda.top_k must be at least 1");
    if (!(config.neutral_min_doc_frequency > 0.0 && config.neutral_min_doc_frequency <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "cleaning.neutral_min_doc_frequency must lie in (0, 1]");
    }
    if (config.neutral_top_k == 0) throw Error(ErrorCode::ConfigError, "cleaning.neutral_top_k must be at least 1");
    const auto& t = config.tsne;
    if (!(t.perplexity > 0.0) || !(t.learning_rate > 0.0) || t.iterations < t.exaggeration_iters) {
        throw Error(ErrorCode::ConfigError, "invalid t-SNE settings");
    }
    if (!(config.kmeans.tol >= 0.0) || config.kmeans.max_iter == 0) {
        throw Error(ErrorCode::ConfigError, "invalid k-means settings");
    }
    for (const auto* p : {&config.corpus_path, &config.stopwords_path, &config.lexicon_path}) {
        if (!fs::is_regular_file(*p)) throw Error(ErrorCode::ConfigError, "input file not found: " + p->string());
    }
    if (config.neutral_path && !fs::is_regular_file(*config.neutral_path)) {
        throw Error(ErrorCode::ConfigError, "input file not found: " + config.neutral_path->string());
    }
    if (config.embedding.table && !fs::is_regular_file(*config.embedding.table)) {
        throw Error(ErrorCode::ConfigError, "input file not found: " + config.embedding.table->string());
    }
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec || !fs::is_directory(config.out_dir)) {
        throw Error(ErrorCode::ConfigError, "output directory is not writable: " + config.out_dir.string());
    }
    const auto probe = config.out_dir / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw Error(ErrorCode::ConfigError, "output directory is not writable: " + config.out_dir.string());
    }
    fs::remove(probe, ec);
}

CleanedCorpus clean_corpus(const Corpus& corpus, const Wordlist& stopwords, const std::optional<Wordlist>& neutral,
                           double min_doc_frequency, std::size_t top_k) {
    CleanedCorpus out;
    for (const auto& rec : corpus.records) {
        out.tweets.push_back(clean_human(rec.tweet_text, stopwords, Origin::Tweet, rec.id));
        for (std::size_t c = 0; c < rec.comments.size(); ++c) {
            out.human_comments.push_back(
                clean_human(rec.comments[c], stopwords, Origin::HumanComment, rec.id + "/c" + std::to_string(c)));
        }
        if (!rec.llm_response.empty()) {
            auto seq = clean_human(rec.llm_response, stopwords, Origin::LlmResponse, rec.id);
            out.llm_unfiltered.push_back(std::move(seq));
        }
    }
    out.neutral = neutral ? *neutral : derive_neutral_words(out.llm_unfiltered, min_doc_frequency, top_k);
    for (const auto& rec : corpus.records) {
        if (!rec.llm_response.empty()) out.llm_responses.push_back(clean_llm(rec.llm_response, stopwords, out.neutral, rec.id));
    }
    return out;
}

void OutputDir::write(const std::string& relative, std::string_view content) {
    write_text_file(root_ / relative, content);
    entries_.push_back({relative, sha256_hex(content)});
}

void OutputDir::write_manifest(bool complete) const {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : sorted) files.push_back({{"path", e.path}, {"sha256", e.sha256}});
    nlohmann::json j;
    j["complete"] = complete;
    j["files"] = files;
    write_text_file(root_ / "manifest.json", json_text(j));
}

void write_eda(OutputDir& out, const Corpus& corpus, const CleanedCorpus& cleaned, std::size_t top_k,
               const std::string& prefix) {
    std::string hashtags = "tag,percentage\n";
    for (const auto& [tag, pct] : hashtag_distribution(corpus)) {
        hashtags += csv::join_row({tag, format_fixed(pct, 4)});
    }
    out.write(prefix + "hashtag_distribution.csv", hashtags);

    const auto stats = comment_count_stats(corpus);
    nlohmann::json js;
    js["total_tweets"] = stats.total_tweets;
    js["total_comments"] = stats.total_comments;
    js["zero_comment_tweets"] = stats.zero_comment_tweets;
    js["zero_comment_fraction"] = stats.zero_comment_fraction;
    js["max_comments"] = stats.max_comments;
    js["mean_comments"] = stats.mean_comments;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [count, tweets] : stats.histogram) hist[std::to_string(count)] = tweets;
    js["histogram"] = hist;
    out.write(prefix + "comment_stats.json", json_text(js));

    if (!cleaned.llm_unfiltered.empty()) {
        out.write(prefix + "llm_word_frequency.csv", frequency_table_csv(word_frequency(cleaned.llm_unfiltered, top_k)));
    }
    nlohmann::json lengths = nlohmann::json::object();
    auto summarize = [&](const std::vector<TokenSequence>& docs, const std::string& name) {
        if (docs.empty()) return;
        const auto s = word_count_distribution(docs);
        out.write(prefix + name + "_lengths.csv", document_lengths_csv(docs, s));
        lengths[name] = {{"n", s.n},       {"min", s.min}, {"max", s.max},
                         {"mean", s.mean}, {"q1", s.q1},   {"median", s.median},
                         {"q3", s.q3},     {"outlier_ids", s.outlier_ids}};
    };
    if (!cleaned.human_comments.empty()) {
        out.write(prefix + "comment_topics.csv", frequency_table_csv(topic_frequency(cleaned.human_comments, top_k)));
    }
    summarize(cleaned.human_comments, "comment");
    summarize(cleaned.llm_responses, "response");
    out.write(prefix + "length_summary.json", json_text(lengths));
}

std::string cluster_metrics_json(const ClusterModel& model, double silhouette_mean) {
    nlohmann::json j;
    j["k"] = model.k;
    j["inertia"] = model.inertia;
    j["silhouette_mean"] = silhouette_mean;
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    return json_text(j);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    validate_config(config);

    // Clear previous stage outputs so the directory holds only this run.
    for (const char* sub : {"eda", "cleaned", "embeddings", "clusters", "projections", "report"}) {
        fs::remove_all(config.out_dir / sub);
    }
    fs::remove(config.out_dir / "manifest.json");

    OutputDir out(config.out_dir);
    try {
        const auto corpus = in_stage("load", [&] { return load_corpus(config.corpus_path, config.format); });
        const auto stopwords = in_stage("load", [&] { return load_wordlist(config.stopwords_path); });
        const auto lexicon = in_stage("load", [&] { return load_lexicon(config.lexicon_path); });
        std::optional<Wordlist> neutral;
        if (config.neutral_path) neutral = in_stage("load", [&] { return load_wordlist(*config.neutral_path); });

        const auto cleaned = in_stage("clean", [&] {
            return clean_corpus(corpus, stopwords, neutral, config.neutral_min_doc_frequency, config.neutral_top_k);
        });

        in_stage("eda", [&] { write_eda(out, corpus, cleaned, config.eda_top_k); });

        in_stage("clean", [&] {
            out.write("cleaned/human_comments.jsonl", to_jsonl(cleaned.human_comments));
            out.write("cleaned/llm_responses.jsonl", to_jsonl(cleaned.llm_responses));
            out.write("cleaned/tweets.jsonl", to_jsonl(cleaned.tweets));
            out.write("cleaned/neutral_words.txt", cleaned.neutral.serialize());
        });

        const auto provider = in_stage("embed", [&] { return make_provider(config.embedding); });
        const std::array<Variant, 4> variants = {{
            {Group::Human, Level::Word, "human_word", "K-means on Human Words"},
            {Group::Llm, Level::Word, "llm_word", "K-means on LLM Words"},
            {Group::Human, Level::Sentence, "human_sentence", "K-means on Human Comments"},
            {Group::Llm, Level::Sentence, "llm_sentence", "K-means on LLM Responses"},
        }};

        struct Embedded {
            EmbeddingMatrix matrix;
            std::vector<std::vector<std::string>> point_tokens;
        };
        std::vector<Embedded> embedded;
        in_stage("embed", [&] {
            nlohmann::json diag;
            for (const auto& v : variants) {
                const auto& docs = v.group == Group::Human ? cleaned.human_comments : cleaned.llm_responses;
                Embedded e;
                if (v.level == Level::Word) {
                    auto w = embed_words(docs, provider);
                    e.matrix = std::move(w.matrix);
                    for (const auto& l : e.matrix.labels()) e.point_tokens.push_back({l});
                    diag[v.name] = {{"rows", e.matrix.rows()},
                                    {"oov_occurrences", w.oov_occurrences},
                                    {"oov_tokens", w.oov_tokens}};
                } else {
                    auto s = embed_sentences(docs, provider);
                    e.matrix = std::move(s.matrix);
                    std::unordered_map<std::string, const TokenSequence*> by_id;
                    for (const auto& d : docs) by_id[d.source_id] = &d;
                    for (const auto& l : e.matrix.labels()) e.point_tokens.push_back(by_id.at(l)->tokens);
                    diag[v.name] = {{"rows", e.matrix.rows()},
                                    {"oov_occurrences", s.oov_occurrences},
                                    {"dropped_ids", s.dropped_ids}};
                }
                out.write("embeddings/" + v.name + ".csv", matrix_to_csv(e.matrix));
                embedded.push_back(std::move(e));
            }
            out.write("embeddings/diagnostics.json", json_text(diag));
        });

        std::vector<ClusterModel> models;
        std::vector<double> silhouettes;
        in_stage("cluster", [&] {
            for (std::size_t i = 0; i < variants.size(); ++i) {
                const auto& m = embedded[i].matrix;
                auto model = kmeans_fit(m, config.k, config.kmeans);
                const double sil = silhouette(m, model.assignments).mean_score;
                out.write("clusters/" + variants[i].name + "_assignments.csv", assignments_csv(m, model.assignments));
                out.write("clusters/" + variants[i].name + "_metrics.json", cluster_metrics_json(model, sil));
                models.push_back(std::move(model));
                silhouettes.push_back(sil);
            }
        });

        in_stage("project", [&] {
            for (std::size_t i = 0; i < variants.size(); ++i) {
                const auto proj = tsne(embedded[i].matrix, config.tsne);
                const auto& labels = models[i].assignments;
                out.write("projections/" + variants[i].name + ".svg",
                          render_scatter_svg(proj, labels, variants[i].caption));
                out.write("projections/" + variants[i].name + "_coords.csv", coords_csv(proj, labels));
            }
        });

        in_stage("report", [&] {
            std::vector<SentimentReport> reports;
            for (std::size_t i = 0; i < variants.size(); ++i) {
                SentimentReport r;
                r.group = variants[i].group;
                r.level = variants[i].level;
                r.cluster_polarity =
                    label_clusters(models[i], embedded[i].matrix, lexicon, provider, embedded[i].point_tokens);
                r.counts = sentiment_percentages(models[i].assignments, r.cluster_polarity);
                r.silhouette_mean = silhouettes[i];
                reports.push_back(std::move(r));
            }
            const std::array<ComparisonReport, 2> comparisons = {compare_groups(reports[0], reports[1]),
                                                                 compare_groups(reports[2], reports[3])};
            nlohmann::json j;
            j["word"] = nlohmann::json::parse(comparison_json(comparisons[0]));
            j["sentence"] = nlohmann::json::parse(comparison_json(comparisons[1]));
            j["lexicon_sha256"] = lexicon.content_hash();
            j["stopwords_sha256"] = stopwords.content_hash();
            j["neutral_sha256"] = cleaned.neutral.content_hash();
            out.write("report/report.json", json_text(j));
            out.write("report/report.txt", render_report_tables(comparisons));
        });
    } catch (...) {
        out.write_manifest(false);
        throw;
    }
    out.write_manifest(true);
    return PipelineResult{out.entries()};
}

}  // namespace emoxpt
