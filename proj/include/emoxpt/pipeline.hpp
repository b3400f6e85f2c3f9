#ifndef EMOXPT_PIPELINE_HPP
#define EMOXPT_PIPELINE_HPP

#include "emoxpt/cleaning.hpp"
#include "emoxpt/clustering.hpp"
#include "emoxpt/corpus.hpp"
#include "emoxpt/embedding.hpp"
#include "emoxpt/error.hpp"
#include "emoxpt/projection.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emoxpt {

/// An Error raised inside a named pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.code(), cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct EmbeddingSource {
    std::optional<std::filesystem::path> table;
    std::optional<std::size_t> hash_dim;
    std::uint64_t hash_seed = 0;
};

EmbeddingProvider make_provider(const EmbeddingSource& source);

struct PipelineConfig {
    std::filesystem::path corpus_path;
    CorpusFormat format = CorpusFormat::Jsonl;
    std::filesystem::path stopwords_path;
    std::optional<std::filesystem::path> neutral_path;  // derived when absent
    double neutral_min_doc_frequency = kDefaultNeutralMinDocFrequency;
    std::size_t neutral_top_k = kDefaultNeutralTopK;
    EmbeddingSource embedding;
    std::size_t k = 2;
    KMeansOptions kmeans;
    TsneConfig tsne;
    std::filesystem::path lexicon_path;
    std::filesystem::path out_dir;
    std::size_t eda_top_k = 30;
};

using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines with flat dotted keys; '#' starts a comment line.
ConfigMap parse_config_text(std::string_view text);

/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
PipelineConfig config_from_map(const ConfigMap& values, const std::filesystem::path& base_dir);

/// Reads a config file and applies `overrides` (key, value) on top.
/// Override paths resolve against the working directory.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Throws ConfigError when the configuration cannot run.
void validate_config(const PipelineConfig& config);

struct CleanedCorpus {
    std::vector<TokenSequence> human_comments;  // ids "<record>/c<index>"
    std::vector<TokenSequence> llm_responses;   // records with a response only
    std::vector<TokenSequence> llm_unfiltered;  // same, before neutral-word removal
    std::vector<TokenSequence> tweets;
    Wordlist neutral;
};

/// Runs the human rules on comments and tweets and the LLM rules on
/// responses. Without `neutral`, the list is derived from the responses.
CleanedCorpus clean_corpus(const Corpus& corpus, const Wordlist& stopwords, const std::optional<Wordlist>& neutral,
                           double min_doc_frequency = kDefaultNeutralMinDocFrequency,
                           std::size_t top_k = kDefaultNeutralTopK);

struct ManifestEntry {
    std::string path;  // relative to the output directory, '/' separated
    std::string sha256;
};

/// Output directory that remembers every file written through it.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

    void write(const std::string& relative, std::string_view content);
    const std::filesystem::path& root() const { return root_; }
    const std::vector<ManifestEntry>& entries() const { return entries_; }

    /// manifest.json with entries sorted by path.
    void write_manifest(bool complete) const;

private:
    std::filesystem::path root_;
    std::vector<ManifestEntry> entries_;
};

void write_eda(OutputDir& out, const Corpus& corpus, const CleanedCorpus& cleaned, std::size_t top_k,
               const std::string& prefix = "eda/");

/// {k, inertia, silhouette_mean, iterations, converged}
std::string cluster_metrics_json(const ClusterModel& model, double silhouette_mean);

struct PipelineResult {
    std::vector<ManifestEntry> files;
};

/// Runs every stage in order and writes manifest.json last. On a stage
/// failure the manifest is written with "complete": false and a
/// StageError is thrown.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace emoxpt

#endif  // EMOXPT_PIPELINE_HPP
