#include "emoxpt/projection.hpp"

#include "emoxpt/clustering.hpp"
#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace emoxpt {

namespace {

// Stricter than the 1e-5 bits the contract requires so probabilities settle too.
constexpr double kEntropyTolerance = 1e-10;
constexpr std::size_t kMaxBisectionSteps = 50;
constexpr double kProbabilityFloor = 1e-12;
constexpr double kInitStddev = 1e-4;

// Conditional distribution for precision beta; distances are shifted by
// their minimum, which leaves the normalized probabilities unchanged.
double row_entropy(std::span<const double> d2, double d2_min, double beta, std::vector<double>& probs) {
    double sum = 0.0;
    for (std::size_t j = 0; j < d2.size(); ++j) {
        probs[j] = std::exp(-beta * (d2[j] - d2_min));
        sum += probs[j];
    }
    double h = 0.0;
    for (auto& p : probs) {
        p /= sum;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

RowCalibration calibrate_row(std::span<const double> squared_distances, double perplexity) {
    if (!(perplexity >= 1.0)) throw Error(ErrorCode::InvalidArgument, "perplexity must be at least 1");
    if (squared_distances.empty() ||
        std::none_of(squared_distances.begin(), squared_distances.end(), [](double d) { return d > 0.0; })) {
        throw Error(ErrorCode::DegenerateRow, "all distances are zero");
    }

    const double target = std::log2(perplexity);
    const double d2_min = *std::min_element(squared_distances.begin(), squared_distances.end());

    RowCalibration out;
    out.probs.resize(squared_distances.size());
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double h = row_entropy(squared_distances, d2_min, beta, out.probs);

    for (std::size_t step = 0; step < kMaxBisectionSteps && std::abs(h - target) >= kEntropyTolerance; ++step) {
        if (h > target) {
            // too flat: sharpen
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
        } else {
            hi = beta;
            beta = lo == 0.0 ? beta * 0.5 : 0.5 * (beta + lo);
        }
        h = row_entropy(squared_distances, d2_min, beta, out.probs);
    }
    out.beta = beta;
    out.sigma = std::sqrt(1.0 / (2.0 * beta));
    out.entropy_bits = h;
    return out;
}

double effective_perplexity(double requested, std::size_t n) {
    const double cap = (static_cast<double>(n) - 1.0) / 3.0;
    return std::min(requested, cap);
}

std::vector<double> joint_probabilities(const EmbeddingMatrix& points, double perplexity) {
    const std::size_t n = points.rows();
    std::vector<double> cond(n * n, 0.0);
    std::vector<double> d2(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0, k = 0; j < n; ++j) {
            if (j != i) d2[k++] = squared_distance(points.row(i), points.row(j));
        }
        RowCalibration row;
        try {
            row = calibrate_row(d2, perplexity);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateRow) throw;
            throw Error(ErrorCode::DegenerateRow,
                        "point '" + points.labels()[i] + "' coincides with every other point");
        }
        for (std::size_t j = 0, k = 0; j < n; ++j) {
            if (j != i) cond[i * n + j] = row.probs[k++];
        }
    }

    std::vector<double> p(n * n, 0.0);
    const double denom = 2.0 * static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            p[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / denom, kProbabilityFloor);
            total += p[i * n + j];
        }
    }
    for (auto& v : p) v /= total;
    return p;
}

void tsne_gradient(std::span<const double> p, std::span<const double> y, std::span<double> grad) {
    const std::size_t n = y.size() / 2;
    std::vector<double> num(n * n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
            z += num[i * n + j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double gx = 0.0, gy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = (p[i * n + j] - num[i * n + j] / z) * num[i * n + j];
            gx += w * (y[2 * i] - y[2 * j]);
            gy += w * (y[2 * i + 1] - y[2 * j + 1]);
        }
        grad[2 * i] = 4.0 * gx;
        grad[2 * i + 1] = 4.0 * gy;
    }
}

double kl_divergence(std::span<const double> p, std::span<const double> y) {
    const std::size_t n = y.size() / 2;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            z += 1.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p[i * n + j];
            if (i == j || pij <= 0.0) continue;
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            const double q = 1.0 / ((1.0 + dx * dx + dy * dy) * z);
            kl += pij * std::log(pij / q);
        }
    }
    return std::max(kl, 0.0);
}

Projection2D tsne(const EmbeddingMatrix& points, const TsneConfig& config) {
    const std::size_t n = points.rows();
    if (n < 4) throw Error(ErrorCode::TooFewPoints, "t-SNE needs at least 4 points, got " + std::to_string(n));
    if (!(config.perplexity > 0.0) || !(config.learning_rate > 0.0) ||
        config.iterations < config.exaggeration_iters) {
        throw Error(ErrorCode::InvalidArgument, "invalid t-SNE configuration");
    }

    // Optimize in label order so that permuting the input rows permutes the
    // output exactly, independent of floating-point summation order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points.labels()[a] < points.labels()[b]; });
    std::vector<std::string> sorted_labels;
    std::vector<double> sorted_data;
    sorted_labels.reserve(n);
    sorted_data.reserve(n * points.cols());
    for (auto i : order) {
        sorted_labels.push_back(points.labels()[i]);
        sorted_data.insert(sorted_data.end(), points.row(i).begin(), points.row(i).end());
    }
    const EmbeddingMatrix canonical(std::move(sorted_labels), points.cols(), std::move(sorted_data), points.level());

    Projection2D out;
    out.labels = points.labels();
    out.perplexity = effective_perplexity(config.perplexity, n);
    auto p = joint_probabilities(canonical, out.perplexity);

    std::vector<double> y(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(keyed_seed(config.seed, canonical.labels()[i]));
        y[2 * i] = kInitStddev * rng.normal();
        y[2 * i + 1] = kInitStddev * rng.normal();
    }

    std::vector<double> velocity(2 * n, 0.0);
    std::vector<double> grad(2 * n);
    std::vector<double> p_exaggerated(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) p_exaggerated[k] = p[k] * config.exaggeration_factor;

    out.kl_after_exaggeration = kl_divergence(p, y);
    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        const bool exaggerate = iter < config.exaggeration_iters;
        tsne_gradient(exaggerate ? p_exaggerated : p, y, grad);
        const double momentum = iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
        for (std::size_t k = 0; k < y.size(); ++k) {
            velocity[k] = momentum * velocity[k] - config.learning_rate * grad[k];
            y[k] += velocity[k];
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += y[2 * i];
            my += y[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= mx;
            y[2 * i + 1] -= my;
        }
        if (iter + 1 == config.exaggeration_iters) out.kl_after_exaggeration = kl_divergence(p, y);
    }
    out.final_kl = kl_divergence(p, y);
    if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::NonFiniteInput, "t-SNE diverged; lower the learning rate");
    }
    out.coords.resize(2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        out.coords[2 * order[r]] = y[2 * r];
        out.coords[2 * order[r] + 1] = y[2 * r + 1];
    }
    return out;
}

std::string coords_csv(const Projection2D& proj, std::span<const std::size_t> clusters) {
    if (clusters.size() != proj.size()) throw Error(ErrorCode::LabelLengthMismatch, "one cluster per point required");
    std::string out = "label,x,y,cluster\n";
    for (std::size_t i = 0; i < proj.size(); ++i) {
        out += csv::join_row({proj.labels[i], format_double(proj.x(i)), format_double(proj.y(i)),
                              std::to_string(clusters[i])});
    }
    return out;
}

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kPad = 50.0;  // pixels reserved around the plot area

struct Axis {
    double lo;
    double hi;
};

Axis padded_range(double lo, double hi) {
    double span = hi - lo;
    if (!(span > 0.0)) {
        span = std::max(std::abs(lo), 1.0);
        return {lo - 0.5 * span, hi + 0.5 * span};
    }
    return {lo - 0.05 * span, hi + 0.05 * span};
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_scatter_svg(const Projection2D& proj, std::span<const std::size_t> clusters,
                               const std::string& title) {
    const std::size_t n = proj.size();
    if (clusters.size() != n) {
        throw Error(ErrorCode::LabelLengthMismatch, "got " + std::to_string(clusters.size()) + " cluster labels for " +
                                                        std::to_string(n) + " points");
    }

    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || proj.x(i) < xmin) xmin = proj.x(i);
        if (i == 0 || proj.x(i) > xmax) xmax = proj.x(i);
        if (i == 0 || proj.y(i) < ymin) ymin = proj.y(i);
        if (i == 0 || proj.y(i) > ymax) ymax = proj.y(i);
    }
    const Axis xa = padded_range(xmin, xmax);
    const Axis ya = padded_range(ymin, ymax);
    const double left = kPad, right = kWidth - kPad, top = kPad, bottom = kHeight - kPad;
    auto px = [&](double v) { return left + (v - xa.lo) / (xa.hi - xa.lo) * (right - left); };
    auto py = [&](double v) { return bottom - (v - ya.lo) / (ya.hi - ya.lo) * (bottom - top); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        svg += "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               xml_escape(title) + "</text>\n";
    }
    svg += "<g stroke=\"#333333\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + format_fixed(left, 2) + "\" y1=\"" + format_fixed(bottom, 2) + "\" x2=\"" +
           format_fixed(right, 2) + "\" y2=\"" + format_fixed(bottom, 2) + "\"/>\n";
    svg += "<line x1=\"" + format_fixed(left, 2) + "\" y1=\"" + format_fixed(top, 2) + "\" x2=\"" +
           format_fixed(left, 2) + "\" y2=\"" + format_fixed(bottom, 2) + "\"/>\n";
    svg += "</g>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    svg += "<text x=\"" + format_fixed(left, 2) + "\" y=\"" + format_fixed(bottom + 16, 2) + "\">" +
           format_fixed(xa.lo, 3) + "</text>\n";
    svg += "<text x=\"" + format_fixed(right, 2) + "\" y=\"" + format_fixed(bottom + 16, 2) +
           "\" text-anchor=\"end\">" + format_fixed(xa.hi, 3) + "</text>\n";
    svg += "<text x=\"" + format_fixed(left - 6, 2) + "\" y=\"" + format_fixed(bottom, 2) +
           "\" text-anchor=\"end\">" + format_fixed(ya.lo, 3) + "</text>\n";
    svg += "<text x=\"" + format_fixed(left - 6, 2) + "\" y=\"" + format_fixed(top + 8, 2) +
           "\" text-anchor=\"end\">" + format_fixed(ya.hi, 3) + "</text>\n";
    svg += "</g>\n";
    svg += "<g stroke=\"none\" fill-opacity=\"0.85\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        svg += "<circle cx=\"" + format_fixed(px(proj.x(i)), 2) + "\" cy=\"" + format_fixed(py(proj.y(i)), 2) +
               "\" r=\"4\" fill=\"" + kPalette[clusters[i] % kPalette.size()] + "\"><title>" +
               xml_escape(proj.labels[i]) + "</title></circle>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void emit_scatter_svg(const Projection2D& proj, std::span<const std::size_t> clusters,
                      const std::filesystem::path& path, const std::string& title) {
    write_text_file(path, render_scatter_svg(proj, clusters, title));
}

}  // namespace emoxpt
