#ifndef EMOXPT_CLUSTERING_HPP
#define EMOXPT_CLUSTERING_HPP

#include "emoxpt/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoxpt {

enum class InitMethod { KMeansPlusPlus, Random };

std::string_view init_method_name(InitMethod init) noexcept;
InitMethod parse_init_method(std::string_view name);

struct KMeansOptions {
    InitMethod init = InitMethod::KMeansPlusPlus;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    double tol = 1e-6;  // max centroid shift, in embedding units
};

struct ClusterModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;  // k x dim, row-major
    std::vector<std::size_t> assignments;
    std::size_t iterations = 0;
    bool converged = false;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    InitMethod init = InitMethod::KMeansPlusPlus;

    std::span<const double> centroid(std::size_t c) const { return {centroids.data() + c * dim, dim}; }
};

/// Lloyd iterations from a seeded initialization. Stops when no centroid
/// moves by `tol` or more, or after `max_iter` rounds. A cluster left empty
/// takes over the point farthest from its own centroid.
ClusterModel kmeans_fit(const EmbeddingMatrix& points, std::size_t k, const KMeansOptions& options = {});

/// Nearest centroid per point; ties go to the lowest index.
std::vector<std::size_t> assign(const ClusterModel& model, const EmbeddingMatrix& points);

/// Within-cluster sum of squared Euclidean distances.
double inertia(const EmbeddingMatrix& points, const ClusterModel& model);

/// Model whose centroids are the member means of a given labelling.
ClusterModel model_from_assignments(const EmbeddingMatrix& points, std::span<const std::size_t> labels,
                                    std::size_t k);

struct SilhouetteReport {
    std::vector<double> per_point;
    std::vector<double> a_values;  // mean distance to own cluster
    std::vector<double> b_values;  // mean distance to nearest other cluster
    double mean_score = 0.0;
};

/// s(i) = (b(i) - a(i)) / max(a(i), b(i)) with Euclidean distances.
/// Members of singleton clusters score 0, as does the 0/0 case.
SilhouetteReport silhouette(const EmbeddingMatrix& points, std::span<const std::size_t> labels);

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// "label,cluster" rows.
std::string assignments_csv(const EmbeddingMatrix& points, std::span<const std::size_t> labels);
std::vector<std::size_t> parse_assignments_csv(std::string_view text, const EmbeddingMatrix& points);

}  // namespace emoxpt

#endif  // EMOXPT_CLUSTERING_HPP
