// emoxpt: command-line front end for the sentiment clustering pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 stage failure. Errors are
// printed to stderr as a single JSON line.

#include "emoxpt/cleaning.hpp"
#include "emoxpt/clustering.hpp"
#include "emoxpt/corpus.hpp"
#include "emoxpt/embedding.hpp"
#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/pipeline.hpp"
#include "emoxpt/projection.hpp"
#include "emoxpt/sentiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace emoxpt;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitStage = 2;

int report_error(std::string_view code, std::string_view message, std::string_view stage, int exit_code) {
    nlohmann::json j;
    j["error"] = code;
    j["message"] = message;
    j["stage"] = stage.empty() ? nlohmann::json(nullptr) : nlohmann::json(stage);
    std::cerr << j.dump() << std::endl;
    return exit_code;
}

bool is_validation(ErrorCode code) {
    return code == ErrorCode::ConfigError || code == ErrorCode::InvalidArgument;
}

struct EmbeddingFlags {
    std::string table;
    std::size_t hash_dim = 0;
    std::uint64_t hash_seed = 0;

    void add_to(CLI::App* cmd) {
        auto* t = cmd->add_option("--table", table, "word2vec text embedding table");
        auto* h = cmd->add_option("--hash-dim", hash_dim, "use the seeded hash embedder with this dimension");
        cmd->add_option("--hash-seed", hash_seed, "seed for the hash embedder");
        t->excludes(h);
        h->excludes(t);
    }

    EmbeddingProvider provider() const {
        EmbeddingSource src;
        if (!table.empty()) src.table = table;
        if (hash_dim > 0) src.hash_dim = hash_dim;
        src.hash_seed = hash_seed;
        if (!src.table && !src.hash_dim) {
            throw Error(ErrorCode::InvalidArgument, "one of --table or --hash-dim is required");
        }
        return make_provider(src);
    }
};

std::optional<Wordlist> optional_wordlist(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return load_wordlist(path);
}

fs::path sibling_csv(const fs::path& svg) {
    auto p = svg;
    p.replace_filename(svg.stem().string() + "_coords.csv");
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised sentiment clustering of human and LLM text"};
    app.require_subcommand(1);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "run every stage from a config file");
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_override;
    pipeline->add_option("--config", config_path, "key = value config file")->required();
    pipeline->add_option("--set", overrides, "override a config key (key=value)");
    pipeline->add_option("--out", out_override, "override output.dir");

    // shared corpus flags
    std::string corpus_path, format = "jsonl", stopwords_path, neutral_path;

    auto* eda = app.add_subcommand("eda", "frequency tables and length summaries as CSV");
    std::string eda_out;
    std::size_t top_k = 30;
    eda->add_option("--corpus", corpus_path)->required();
    eda->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));
    eda->add_option("--stopwords", stopwords_path)->required();
    eda->add_option("--neutral", neutral_path, "neutral word list; derived from the responses when absent");
    eda->add_option("--top-k", top_k);
    eda->add_option("--out", eda_out, "output directory")->required();

    auto* clean = app.add_subcommand("clean", "write cleaned token sequences as JSONL");
    std::string clean_class, clean_out;
    clean->add_option("--corpus", corpus_path)->required();
    clean->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));
    clean->add_option("--class", clean_class)->required()->check(CLI::IsMember({"human", "llm", "tweet"}));
    clean->add_option("--stopwords", stopwords_path)->required();
    clean->add_option("--neutral", neutral_path);
    clean->add_option("--out", clean_out)->required();

    auto* embed = app.add_subcommand("embed", "build a word or sentence embedding matrix CSV");
    std::string tokens_path, level_str = "sentence", embed_out;
    EmbeddingFlags embed_flags;
    embed->add_option("--tokens", tokens_path, "token JSONL from 'clean'")->required();
    embed->add_option("--level", level_str)->check(CLI::IsMember({"word", "sentence"}));
    embed_flags.add_to(embed);
    embed->add_option("--out", embed_out)->required();

    auto* cluster = app.add_subcommand("cluster", "k-means plus silhouette on an embedding matrix");
    std::string emb_path, cluster_out, cluster_name, init = "kmeanspp";
    std::size_t k = 2, max_iter = 300;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    cluster->add_option("--embeddings", emb_path)->required();
    cluster->add_option("--level", level_str)->check(CLI::IsMember({"word", "sentence"}));
    cluster->add_option("--k", k);
    cluster->add_option("--seed", seed);
    cluster->add_option("--init", init)->check(CLI::IsMember({"kmeanspp", "random"}));
    cluster->add_option("--max-iter", max_iter);
    cluster->add_option("--tol", tol);
    cluster->add_option("--out-dir", cluster_out)->required();
    cluster->add_option("--name", cluster_name, "file prefix (default: level)");

    auto* project = app.add_subcommand("project", "t-SNE to 2-D with an SVG scatter and coords CSV");
    std::string assignments_path, svg_out;
    TsneConfig tsne_cfg;
    project->add_option("--embeddings", emb_path)->required();
    project->add_option("--assignments", assignments_path, "label,cluster CSV")->required();
    project->add_option("--level", level_str)->check(CLI::IsMember({"word", "sentence"}));
    project->add_option("--perplexity", tsne_cfg.perplexity);
    project->add_option("--learning-rate", tsne_cfg.learning_rate);
    project->add_option("--iterations", tsne_cfg.iterations);
    project->add_option("--seed", tsne_cfg.seed);
    project->add_option("--out", svg_out, "SVG path; coords go next to it as <stem>_coords.csv")->required();

    auto* report = app.add_subcommand("report", "sign clusters and compare human and LLM groups");
    std::string lexicon_path, report_out;
    std::string h_tokens, h_emb, h_assign, l_tokens, l_emb, l_assign;
    EmbeddingFlags report_flags;
    report->add_option("--level", level_str)->check(CLI::IsMember({"word", "sentence"}));
    report->add_option("--lexicon", lexicon_path)->required();
    report->add_option("--human-tokens", h_tokens)->required();
    report->add_option("--human-embeddings", h_emb)->required();
    report->add_option("--human-assignments", h_assign)->required();
    report->add_option("--llm-tokens", l_tokens)->required();
    report->add_option("--llm-embeddings", l_emb)->required();
    report->add_option("--llm-assignments", l_assign)->required();
    report_flags.add_to(report);
    report->add_option("--out", report_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("UsageError", e.what(), "", kExitValidation);
    }

    std::string stage;
    try {
        if (*pipeline) {
            stage = "config";
            std::vector<std::pair<std::string, std::string>> kv;
            for (const auto& o : overrides) {
                const auto eq = o.find('=');
                if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + o + "'");
                kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
            }
            if (!out_override.empty()) kv.emplace_back("output.dir", out_override);
            auto cfg = load_config(config_path, kv);
            validate_config(cfg);
            stage.clear();
            const auto result = run_pipeline(cfg);
            std::cout << "wrote " << result.files.size() << " files to " << cfg.out_dir.string() << "\n";
            return 0;
        }

        if (*eda || *clean) {
            stage = "load";
            const auto corpus = load_corpus(corpus_path, parse_corpus_format(format));
            const auto stopwords = load_wordlist(stopwords_path);
            const auto neutral = optional_wordlist(neutral_path);
            stage = "clean";
            const auto cleaned = clean_corpus(corpus, stopwords, neutral);
            if (*eda) {
                stage = "eda";
                OutputDir out(eda_out);
                write_eda(out, corpus, cleaned, top_k, "");
                return 0;
            }
            const auto& docs = clean_class == "human" ? cleaned.human_comments
                               : clean_class == "llm" ? cleaned.llm_responses
                                                      : cleaned.tweets;
            write_text_file(clean_out, to_jsonl(docs));
            return 0;
        }

        if (*embed) {
            stage = "embed";
            const auto docs = parse_token_jsonl(read_text_file(tokens_path));
            const auto provider = embed_flags.provider();
            const auto m = parse_level(level_str) == Level::Word ? embed_words(docs, provider).matrix
                                                                  : embed_sentences(docs, provider).matrix;
            write_text_file(embed_out, matrix_to_csv(m));
            return 0;
        }

        if (*cluster) {
            stage = "cluster";
            const auto m = matrix_from_csv(read_text_file(emb_path), parse_level(level_str));
            KMeansOptions opts;
            opts.init = parse_init_method(init);
            opts.seed = seed;
            opts.max_iter = max_iter;
            opts.tol = tol;
            const auto model = kmeans_fit(m, k, opts);
            const double sil = silhouette(m, model.assignments).mean_score;
            const std::string name = cluster_name.empty() ? level_str : cluster_name;
            write_text_file(fs::path(cluster_out) / (name + "_assignments.csv"), assignments_csv(m, model.assignments));
            write_text_file(fs::path(cluster_out) / (name + "_metrics.json"), cluster_metrics_json(model, sil));
            return 0;
        }

        if (*project) {
            stage = "project";
            const auto m = matrix_from_csv(read_text_file(emb_path), parse_level(level_str));
            const auto labels = parse_assignments_csv(read_text_file(assignments_path), m);
            tsne_cfg.momentum_switch_iter = tsne_cfg.exaggeration_iters;
            const auto proj = tsne(m, tsne_cfg);
            emit_scatter_svg(proj, labels, svg_out);
            write_text_file(sibling_csv(svg_out), coords_csv(proj, labels));
            return 0;
        }

        if (*report) {
            stage = "report";
            const auto level = parse_level(level_str);
            const auto lexicon = load_lexicon(lexicon_path);
            const auto provider = report_flags.provider();
            auto build = [&](Group group, const std::string& tok_path, const std::string& emb, const std::string& asg) {
                const auto docs = parse_token_jsonl(read_text_file(tok_path));
                const auto m = matrix_from_csv(read_text_file(emb), level);
                const auto labels = parse_assignments_csv(read_text_file(asg), m);
                const auto model = model_from_assignments(m, labels, 2);
                std::vector<std::vector<std::string>> point_tokens;
                if (level == Level::Word) {
                    for (const auto& l : m.labels()) point_tokens.push_back({l});
                } else {
                    std::unordered_map<std::string, const TokenSequence*> by_id;
                    for (const auto& d : docs) by_id[d.source_id] = &d;
                    for (const auto& l : m.labels()) {
                        auto it = by_id.find(l);
                        if (it == by_id.end()) throw Error(ErrorCode::LabelLengthMismatch, "no tokens for '" + l + "'");
                        point_tokens.push_back(it->second->tokens);
                    }
                }
                SentimentReport r;
                r.group = group;
                r.level = level;
                r.cluster_polarity = label_clusters(model, m, lexicon, provider, point_tokens);
                r.counts = sentiment_percentages(labels, r.cluster_polarity);
                r.silhouette_mean = silhouette(m, labels).mean_score;
                return r;
            };
            const std::array<ComparisonReport, 1> cmp = {
                compare_groups(build(Group::Human, h_tokens, h_emb, h_assign), build(Group::Llm, l_tokens, l_emb, l_assign))};
            const std::string name(level_name(level));
            write_text_file(fs::path(report_out) / (name + "_report.json"), comparison_json(cmp[0]));
            write_text_file(fs::path(report_out) / (name + "_report.txt"), render_report_tables(cmp));
            return 0;
        }
    } catch (const StageError& e) {
        return report_error(e.code_name(), e.what(), e.stage(), kExitStage);
    } catch (const Error& e) {
        const bool validation = is_validation(e.code()) || stage == "config";
        return report_error(e.code_name(), e.what(), stage, validation ? kExitValidation : kExitStage);
    } catch (const std::exception& e) {
        return report_error("InternalError", e.what(), stage, kExitStage);
    }
    return 0;
}
