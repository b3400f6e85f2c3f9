#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/projection.hpp"
#include "emoxpt/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

using namespace emoxpt;
using namespace emoxpt::testing;

namespace {

double entropy_bits(double p) { return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p)); }

// Solve H(p, 1 - p) = log2(perplexity) for p in (0.5, 1) by bisection on p.
double two_neighbor_oracle(double perplexity) {
    double lo = 0.5, hi = 1.0;
    const double target = std::log2(perplexity);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (entropy_bits(mid) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::size_t> knn_2d(const Projection2D& p, std::size_t i, std::size_t k) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    idx.erase(idx.begin() + static_cast<long>(i));
    auto d = [&](std::size_t j) {
        return (p.x(i) - p.x(j)) * (p.x(i) - p.x(j)) + (p.y(i) - p.y(j)) * (p.y(i) - p.y(j));
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) { return d(a) < d(b); });
    idx.resize(k);
    return idx;
}

}  // namespace

TEST_CASE("calibrate_row examples") {
    const std::vector<double> equal = {2.0, 2.0};
    const auto r = calibrate_row(equal, 2.0);
    CHECK(r.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.probs[1] == doctest::Approx(0.5).epsilon(1e-12));

    const std::vector<double> d = {1.0, 4.0};
    const auto c = calibrate_row(d, 1.5);
    const double p = two_neighbor_oracle(1.5);
    CHECK(std::abs(c.probs[0] - p) < 1e-6);
    CHECK(std::abs(c.probs[1] - (1.0 - p)) < 1e-6);
    CHECK(std::abs(c.entropy_bits - std::log2(1.5)) < 1e-5);
    CHECK(c.beta == doctest::Approx(1.0 / (2.0 * c.sigma * c.sigma)));

    const std::vector<double> five(5, 3.0);
    for (double perp : {1.0, 2.5, 4.0}) {
        const auto u = calibrate_row(five, perp);
        for (double q : u.probs) CHECK(q == doctest::Approx(0.2).epsilon(1e-12));
    }

    const std::vector<double> zeros(3, 0.0);
    try {
        calibrate_row(zeros, 2.0);
        FAIL("expected DegenerateRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateRow);
    }
}

TEST_CASE("property: calibrated rows hit the target entropy") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> d(3 + rng.index(40));
        for (auto& x : d) x = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
        const double perp = 1.0 + rng.uniform() * static_cast<double>(d.size() - 1) / 1.5;
        const auto r = calibrate_row(d, perp);
        double sum = 0.0, h = 0.0;
        for (double q : r.probs) {
            sum += q;
            if (q > 0) h -= q * std::log2(q);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(h - std::log2(perp)) < 1e-5);
    }
}

TEST_CASE("joint probabilities are symmetric, positive and normalized") {
    Rng rng(12);
    const auto pts = EmbeddingMatrix::from_rows(random_rows(rng, 25, 6));
    const auto p = joint_probabilities(pts, 5.0);
    const std::size_t n = 25;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(p[i * n + i] == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            sum += p[i * n + j];
            if (i != j) CHECK(p[i * n + j] > 0.0);
            CHECK(p[i * n + j] == doctest::Approx(p[j * n + i]).epsilon(1e-15));
        }
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("joint probabilities report the label of a duplicate point") {
    const EmbeddingMatrix pts({"a", "b", "c", "d"}, 1, {1.0, 1.0, 1.0, 1.0}, Level::Word);
    try {
        joint_probabilities(pts, 1.0);
        FAIL("expected DegenerateRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateRow);
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    Rng rng(3);
    const std::size_t n = 12;
    const auto pts = EmbeddingMatrix::from_rows(random_rows(rng, n, 5));
    const auto p = joint_probabilities(pts, 3.0);
    std::vector<double> y(2 * n), grad(2 * n);
    for (auto& v : y) v = rng.normal();
    tsne_gradient(p, y, grad);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto yp = y, ym = y;
        yp[i] += 1e-5;
        ym[i] -= 1e-5;
        const double fd = (kl_divergence(p, yp) - kl_divergence(p, ym)) / 2e-5;
        num += (fd - grad[i]) * (fd - grad[i]);
        den += grad[i] * grad[i];
    }
    CHECK(std::sqrt(num / den) < 1e-4);
}

TEST_CASE("KL divergence is nonnegative at random layouts") {
    Rng rng(4);
    const auto pts = EmbeddingMatrix::from_rows(random_rows(rng, 15, 4));
    const auto p = joint_probabilities(pts, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(30);
        for (auto& v : y) v = std::pow(10.0, 3.0 * rng.uniform() - 2.0) * rng.normal();
        CHECK(kl_divergence(p, y) >= 0.0);
    }
}

TEST_CASE("perplexity is clamped for small inputs") {
    CHECK(effective_perplexity(30.0, 10) == 3.0);
    CHECK(effective_perplexity(2.0, 100) == 2.0);
}

TEST_CASE("two well-separated pairs stay mutually nearest") {
    std::vector<std::vector<double>> rows(4, std::vector<double>(8, 0.0));
    rows[1][1] = 1.0;
    rows[2][0] = 100.0;
    rows[3][0] = 100.0;
    rows[3][1] = 1.0;
    TsneConfig cfg;
    cfg.seed = 21;
    // With n = 4 each pair carries p = 0.25, so exaggerated descent is only
    // stable for learning rates below 1 / 12.
    cfg.learning_rate = 0.05;
    const auto proj = tsne(EmbeddingMatrix::from_rows(rows), cfg);
    CHECK(knn_2d(proj, 0, 1) == std::vector<std::size_t>{1});
    CHECK(knn_2d(proj, 1, 1) == std::vector<std::size_t>{0});
    CHECK(knn_2d(proj, 2, 1) == std::vector<std::size_t>{3});
    CHECK(knn_2d(proj, 3, 1) == std::vector<std::size_t>{2});
    CHECK(proj.perplexity == 1.0);
}

TEST_CASE("tsne is deterministic and validates input") {
    const auto blobs = make_blobs(15, 4, 0.2, 3.0, 2);
    TsneConfig cfg;
    cfg.seed = 9;
    cfg.iterations = 300;
    const auto a = tsne(blobs.points, cfg);
    const auto b = tsne(blobs.points, cfg);
    CHECK(a.coords == b.coords);
    CHECK(a.final_kl == b.final_kl);
    CHECK(a.final_kl >= 0.0);
    CHECK(a.labels == blobs.points.labels());
    for (double v : a.coords) CHECK(std::isfinite(v));

    cfg.seed = 10;
    CHECK(tsne(blobs.points, cfg).coords != a.coords);

    try {
        tsne(EmbeddingMatrix::from_rows({{0.0}, {1.0}, {2.0}}), cfg);
        FAIL("expected TooFewPoints");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewPoints);
    }
    auto bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(tsne(blobs.points, bad), Error);
}

TEST_CASE("property: row permutation permutes the embedding") {
    const auto blobs = make_blobs(10, 3, 0.3, 2.0, 6);
    const auto& pts = blobs.points;
    const std::size_t n = pts.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<std::string> labels;
    std::vector<double> data;
    for (auto i : perm) {
        labels.push_back(pts.labels()[i]);
        data.insert(data.end(), pts.row(i).begin(), pts.row(i).end());
    }
    const EmbeddingMatrix permuted(labels, pts.cols(), data, Level::Word);

    const auto p = joint_probabilities(pts, 5.0);
    const auto pp = joint_probabilities(permuted, 5.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) CHECK(std::abs(pp[a * n + b] - p[perm[a] * n + perm[b]]) < 1e-14);

    TsneConfig cfg;
    cfg.seed = 4;
    const auto y = tsne(pts, cfg);
    const auto yp = tsne(permuted, cfg);
    for (std::size_t a = 0; a < n; ++a) {
        CHECK(yp.x(a) == y.x(perm[a]));
        CHECK(yp.y(a) == y.y(perm[a]));
    }
}

TEST_CASE("scatter svg") {
    Projection2D proj;
    proj.labels = {"a", "b"};
    proj.coords = {0.0, 0.0, 1.0, 2.0};
    const std::vector<std::size_t> clusters = {0, 1};
    const auto svg = render_scatter_svg(proj, clusters, "t");
    const std::regex circle("<circle[^>]*fill=\"([^\"]+)\"");
    std::set<std::string> fills;
    std::size_t count = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator(); ++it) {
        ++count;
        fills.insert((*it)[1]);
    }
    CHECK(count == 2);
    CHECK(fills.size() == 2);

    const auto dir = fresh_dir("svg");
    emit_scatter_svg(proj, clusters, dir / "a.svg");
    emit_scatter_svg(proj, clusters, dir / "b.svg");
    CHECK(read_text_file(dir / "a.svg") == read_text_file(dir / "b.svg"));

    const std::vector<std::size_t> short_labels = {0};
    try {
        emit_scatter_svg(proj, short_labels, dir / "c.svg");
        FAIL("expected LabelLengthMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LabelLengthMismatch);
    }
    CHECK_FALSE(std::filesystem::exists(dir / "c.svg"));

    const auto csv = coords_csv(proj, clusters);
    CHECK(csv.substr(0, csv.find('\n')) == "label,x,y,cluster");
}
