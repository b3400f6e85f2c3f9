#include "emoxpt/clustering.hpp"

#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/rng.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace emoxpt {

namespace {

std::size_t nearest(std::span<const double> x, const std::vector<double>& centroids, std::size_t k,
                    std::size_t dim, double* best_d2 = nullptr) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double d2 = squared_distance(x, {centroids.data() + c * dim, dim});
        if (d2 < best_dist) {
            best_dist = d2;
            best = c;
        }
    }
    if (best_d2) *best_d2 = best_dist;
    return best;
}

std::vector<double> init_random(const EmbeddingMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);

    std::vector<double> centroids;
    centroids.reserve(k * points.cols());
    for (std::size_t i = 0; i < k; ++i) {
        auto r = points.row(idx[i]);
        centroids.insert(centroids.end(), r.begin(), r.end());
    }
    return centroids;
}

std::vector<double> init_plusplus(const EmbeddingMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    std::vector<double> centroids;
    centroids.reserve(k * points.cols());
    auto first = points.row(rng.index(n));
    centroids.insert(centroids.end(), first.begin(), first.end());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), first);

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(n);
        }
        auto chosen = points.row(pick);
        centroids.insert(centroids.end(), chosen.begin(), chosen.end());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), chosen));
    }
    return centroids;
}

double total_inertia(const EmbeddingMatrix& points, const std::vector<double>& centroids,
                     const std::vector<std::size_t>& assignments, std::size_t dim) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        total += squared_distance(points.row(i), {centroids.data() + assignments[i] * dim, dim});
    }
    return total;
}

}  // namespace

std::string_view init_method_name(InitMethod init) noexcept {
    return init == InitMethod::KMeansPlusPlus ? "kmeanspp" : "random";
}

InitMethod parse_init_method(std::string_view name) {
    if (name == "kmeanspp") return InitMethod::KMeansPlusPlus;
    if (name == "random") return InitMethod::Random;
    throw Error(ErrorCode::InvalidArgument, "unknown init method '" + std::string(name) + "'");
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

ClusterModel kmeans_fit(const EmbeddingMatrix& points, std::size_t k, const KMeansOptions& options) {
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();
    if (k == 0 || n < k) {
        throw Error(ErrorCode::TooFewPoints,
                    "need at least k points (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    if (!std::all_of(points.data().begin(), points.data().end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::NonFiniteInput, "points contain non-finite values");
    }

    Rng rng(options.seed);
    ClusterModel model;
    model.k = k;
    model.dim = dim;
    model.seed = options.seed;
    model.init = options.init;
    model.centroids = options.init == InitMethod::KMeansPlusPlus ? init_plusplus(points, k, rng)
                                                                 : init_random(points, k, rng);
    model.assignments.assign(n, 0);

    std::vector<double> dist2(n);
    std::vector<std::size_t> sizes(k);
    std::vector<double> next(k * dim);
    [[maybe_unused]] double previous = std::numeric_limits<double>::infinity();

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            model.assignments[i] = nearest(points.row(i), model.centroids, k, dim, &dist2[i]);
            ++sizes[model.assignments[i]];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t far = n;
            double far_d2 = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[model.assignments[i]] > 1 && dist2[i] > far_d2) {
                    far_d2 = dist2[i];
                    far = i;
                }
            }
            --sizes[model.assignments[far]];
            model.assignments[far] = c;
            sizes[c] = 1;
            dist2[far] = 0.0;
        }

        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto x = points.row(i);
            double* dst = next.data() + model.assignments[i] * dim;
            for (std::size_t j = 0; j < dim; ++j) dst[j] += x[j];
        }
        double shift2 = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double inv = 1.0 / static_cast<double>(sizes[c]);
            for (std::size_t j = 0; j < dim; ++j) next[c * dim + j] *= inv;
            shift2 = std::max(shift2, squared_distance({next.data() + c * dim, dim},
                                                       {model.centroids.data() + c * dim, dim}));
        }
        model.centroids.swap(next);
        model.iterations = iter;
        model.inertia = total_inertia(points, model.centroids, model.assignments, dim);

        // Lloyd steps never increase the objective.
        assert(model.inertia <= previous * (1.0 + 1e-12) + 1e-12);
        previous = model.inertia;

        if (std::sqrt(shift2) < options.tol) {
            model.converged = true;
            break;
        }
    }
    return model;
}

std::vector<std::size_t> assign(const ClusterModel& model, const EmbeddingMatrix& points) {
    if (points.cols() != model.dim) {
        throw Error(ErrorCode::DimensionMismatch, "points have " + std::to_string(points.cols()) +
                                                      " columns, model expects " + std::to_string(model.dim));
    }
    std::vector<std::size_t> out(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) out[i] = nearest(points.row(i), model.centroids, model.k, model.dim);
    return out;
}

double inertia(const EmbeddingMatrix& points, const ClusterModel& model) {
    if (points.cols() != model.dim || points.rows() != model.assignments.size()) {
        throw Error(ErrorCode::DimensionMismatch, "points do not match the model");
    }
    return total_inertia(points, model.centroids, model.assignments, model.dim);
}

ClusterModel model_from_assignments(const EmbeddingMatrix& points, std::span<const std::size_t> labels,
                                    std::size_t k) {
    if (labels.size() != points.rows()) throw Error(ErrorCode::LabelLengthMismatch, "one label per point required");
    ClusterModel model;
    model.k = k;
    model.dim = points.cols();
    model.centroids.assign(k * model.dim, 0.0);
    model.assignments.assign(labels.begin(), labels.end());
    std::vector<std::size_t> sizes(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= k) throw Error(ErrorCode::UnknownCluster, "cluster index out of range");
        ++sizes[labels[i]];
        auto x = points.row(i);
        for (std::size_t j = 0; j < model.dim; ++j) model.centroids[labels[i] * model.dim + j] += x[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        for (std::size_t j = 0; j < model.dim; ++j) model.centroids[c * model.dim + j] /= static_cast<double>(sizes[c]);
    }
    model.converged = true;
    model.inertia = total_inertia(points, model.centroids, model.assignments, model.dim);
    return model;
}

SilhouetteReport silhouette(const EmbeddingMatrix& points, std::span<const std::size_t> labels) {
    const std::size_t n = points.rows();
    if (labels.size() != n) throw Error(ErrorCode::LabelLengthMismatch, "one label per point required");
    if (n < 2) throw Error(ErrorCode::TooFewPoints, "silhouette needs at least two points");

    // Dense relabelling so arbitrary indices are accepted.
    std::map<std::size_t, std::size_t> dense;
    for (auto l : labels) dense.emplace(l, dense.size());
    const std::size_t k = dense.size();
    if (k < 2) throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");

    std::vector<std::size_t> cluster(n);
    std::vector<std::size_t> sizes(k);
    for (std::size_t i = 0; i < n; ++i) {
        cluster[i] = dense.at(labels[i]);
        ++sizes[cluster[i]];
    }

    SilhouetteReport rep;
    rep.per_point.resize(n);
    rep.a_values.resize(n);
    rep.b_values.resize(n);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sums[cluster[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
        }
        const std::size_t own = cluster[i];
        const double a = sizes[own] > 1 ? sums[own] / static_cast<double>(sizes[own] - 1) : 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        rep.a_values[i] = a;
        rep.b_values[i] = b;
        rep.per_point[i] = (sizes[own] == 1 || denom == 0.0) ? 0.0 : (b - a) / denom;
    }
    double total = 0.0;
    for (double s : rep.per_point) total += s;
    rep.mean_score = total / static_cast<double>(n);
    return rep;
}

std::string assignments_csv(const EmbeddingMatrix& points, std::span<const std::size_t> labels) {
    if (labels.size() != points.rows()) throw Error(ErrorCode::LabelLengthMismatch, "one label per point required");
    std::string out = "label,cluster\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += csv::join_row({points.labels()[i], std::to_string(labels[i])});
    }
    return out;
}

std::vector<std::size_t> parse_assignments_csv(std::string_view text, const EmbeddingMatrix& points) {
    auto table = csv::parse(text);
    if (table.empty() || table[0].size() < 2 || table[0][0] != "label" || table[0][1] != "cluster") {
        throw Error(ErrorCode::BadHeader, "assignments CSV must start with 'label,cluster'");
    }
    std::unordered_map<std::string, std::size_t> by_label;
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (table[r].size() < 2) throw Error(ErrorCode::MalformedRecord, "short assignments row");
        std::size_t c = 0;
        const auto& s = table[r][1];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw Error(ErrorCode::MalformedRecord, "bad cluster index '" + s + "'");
        }
        by_label[table[r][0]] = c;
    }
    std::vector<std::size_t> out;
    out.reserve(points.rows());
    for (const auto& l : points.labels()) {
        auto it = by_label.find(l);
        if (it == by_label.end()) throw Error(ErrorCode::LabelLengthMismatch, "no assignment for '" + l + "'");
        out.push_back(it->second);
    }
    if (by_label.size() != points.rows()) {
        throw Error(ErrorCode::LabelLengthMismatch, "assignments do not match the embedding rows");
    }
    return out;
}

}  // namespace emoxpt
