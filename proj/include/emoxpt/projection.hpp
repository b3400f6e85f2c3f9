#ifndef EMOXPT_PROJECTION_HPP
#define EMOXPT_PROJECTION_HPP

#include "emoxpt/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace emoxpt {

struct TsneConfig {
    double perplexity = 30.0;  // clamped to (n - 1) / 3
    double learning_rate = 200.0;
    std::size_t iterations = 1000;
    double exaggeration_factor = 12.0;
    std::size_t exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
    std::uint64_t seed = 0;
};

struct Projection2D {
    std::vector<std::string> labels;
    std::vector<double> coords;  // n x 2, row-major
    double final_kl = 0.0;
    double kl_after_exaggeration = 0.0;
    double perplexity = 0.0;  // after clamping

    std::size_t size() const { return labels.size(); }
    double x(std::size_t i) const { return coords[2 * i]; }
    double y(std::size_t i) const { return coords[2 * i + 1]; }
};

struct RowCalibration {
    double sigma = 0.0;
    double beta = 0.0;  // 1 / (2 sigma^2)
    double entropy_bits = 0.0;
    std::vector<double> probs;
};

/// Gaussian bandwidth search for one point: bisection on the precision,
/// doubling the bracket while it is open, until the conditional entropy is
/// within 1e-5 bits of log2(perplexity).
RowCalibration calibrate_row(std::span<const double> squared_distances, double perplexity);

/// Symmetrized affinities p_ij = (p_j|i + p_i|j) / 2n, dense n x n.
std::vector<double> joint_probabilities(const EmbeddingMatrix& points, double perplexity);

/// dC/dY for KL(P||Q) with a Student-t kernel in 2-D; `grad` is n x 2.
void tsne_gradient(std::span<const double> p, std::span<const double> y, std::span<double> grad);

double kl_divergence(std::span<const double> p, std::span<const double> y);

double effective_perplexity(double requested, std::size_t n);

/// Exact t-SNE into two dimensions. The initial position of each point is
/// drawn from a stream keyed on (seed, label).
Projection2D tsne(const EmbeddingMatrix& points, const TsneConfig& config = {});

/// "label,x,y,cluster"
std::string coords_csv(const Projection2D& proj, std::span<const std::size_t> clusters);

/// Standalone 800x600 SVG scatter, one circle per point colored by cluster.
std::string render_scatter_svg(const Projection2D& proj, std::span<const std::size_t> clusters,
                               const std::string& title = {});
void emit_scatter_svg(const Projection2D& proj, std::span<const std::size_t> clusters,
                      const std::filesystem::path& path, const std::string& title = {});

}  // namespace emoxpt

#endif  // EMOXPT_PROJECTION_HPP
