#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "doctest.h"

#include "excursion/errors.hpp"
#include "excursion/parallel.hpp"
#include "excursion/rng.hpp"
#include "excursion/sampler.hpp"
#include "excursion/stats.hpp"

using namespace excursion;
using doctest::Approx;

namespace {

// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_p_value(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        dmax = std::max(dmax, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * dmax;
    // The alternating series stalls near zero, where Q(lambda) is 1 to 1e-5.
    if (lambda < 0.3) return 1.0;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

// Pooled correlation of values at node pairs offset by one step along `axis`.
std::pair<double, double> neighbour_correlation(const Eigen::VectorXd& v, const GridSpec& g, int axis) {
    std::vector<double> a, b;
    const std::int64_t stride = g.stride(axis), side = g.side();
    for (std::int64_t i = 0; i < v.size(); ++i) {
        if ((i / stride) % side == side - 1) continue;
        a.push_back(v[i]);
        b.push_back(v[i + stride]);
    }
    const double c = stats::covariance(a, b) / std::sqrt(stats::variance(a) * stats::variance(b));
    return {c, static_cast<double>(a.size())};
}

}  // namespace

TEST_CASE("grid sampler: zero mean and unit variance") {
    const GridSpec g(2, 128, 0.25);  // 256 x 256 nodes
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    CHECK(sampler.padding() == 2);
    std::vector<double> means, vars;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Eigen::VectorXd v = sampler.draw(seed);
        REQUIRE(v.size() == 256 * 256);
        means.push_back(v.mean());
        vars.push_back((v.array() - v.mean()).square().mean());
    }
    CHECK(std::abs(stats::mean(means)) < 0.02);
    CHECK(stats::mean(vars) == Approx(1.0).epsilon(0.03));
}

TEST_CASE("grid sampler: neighbour correlation and isotropy") {
    const GridSpec g(2, 128, 0.5);
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    std::vector<double> cx, cy;
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        const Eigen::VectorXd v = sampler.draw(seed);
        cx.push_back(neighbour_correlation(v, g, 0).first);
        cy.push_back(neighbour_correlation(v, g, 1).first);
    }
    CHECK(stats::mean(cx) == Approx(std::exp(-0.125)).epsilon(0.02 / 0.8825));
    CHECK(stats::mean(cy) == Approx(std::exp(-0.125)).epsilon(0.02 / 0.8825));
    const double se = std::sqrt(stats::variance(cx) / cx.size() + stats::variance(cy) / cy.size());
    CHECK(std::abs(stats::mean(cx) - stats::mean(cy)) < 3.0 * se);
}

TEST_CASE("grid sampler: 3D shape and variance") {
    const GridSpec g(3, 8, 0.5);
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    std::vector<double> first;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) first.push_back(sampler.draw(seed)[0]);
    CHECK(std::abs(stats::mean(first)) < 0.1);
    CHECK(stats::variance(first) == Approx(1.0).epsilon(0.1));
}

TEST_CASE("grid sampler: determinism across threads") {
    const GridSpec g(2, 16, 0.25);
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    const Eigen::VectorXd ref = sampler.draw(42);
    CHECK(sampler.draw(42) == ref);
    CHECK(sampler.draw(43) != ref);
    std::vector<Eigen::VectorXd> out(16);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = sampler.draw(40 + i % 4); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == sampler.draw(40 + i % 4));
    const FieldSample s = sample_gaussian_grid(CovarianceModel(1.0), g, 42);
    CHECK(s.values == ref);
    CHECK(s.locations.cols() == s.values.size());
    CHECK(s.model_tag.find("mt19937_64") != std::string::npos);
}

TEST_CASE("grid sampler: embedding failure is reported") {
    // A length scale far beyond the torus wraps the covariance into a
    // markedly indefinite circulant.
    CHECK_THROWS_AS(GaussianGridSampler(CovarianceModel(1000.0), GridSpec(2, 4, 0.1), 8), NumericError);
}

TEST_CASE("point sampler: marginal law") {
    const CovarianceModel m(1.0);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Zero(2, 1);
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) v.push_back(sample_gaussian_points(m, one, seed).values[0]);
    CHECK(std::abs(stats::mean(v)) < 0.03);
    CHECK(stats::variance(v) == Approx(1.0).epsilon(0.05));
}

TEST_CASE("point sampler: coincident and distant pairs") {
    const CovarianceModel m(1.0);
    Eigen::MatrixXd same(2, 3);
    same << 0.3, 0.3, 1.0,
            -0.2, -0.2, 0.0;
    const FieldSample s = sample_gaussian_points(m, same, 5);
    CHECK(s.values[0] == s.values[1]);
    CHECK(s.values[0] != s.values[2]);

    Eigen::MatrixXd far(2, 2);
    far << 0.0, 2.0,
           0.0, 0.0;
    std::vector<double> a, b;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const Eigen::VectorXd v = sample_gaussian_points(m, far, seed).values;
        a.push_back(v[0]);
        b.push_back(v[1]);
    }
    const double corr = stats::covariance(a, b) / std::sqrt(stats::variance(a) * stats::variance(b));
    CHECK(corr == Approx(std::exp(-2.0)).epsilon(0.03 / std::exp(-2.0)));
}

TEST_CASE("point sampler: capacity") {
    const Eigen::MatrixXd many = Eigen::MatrixXd::Random(2, 40);
    CHECK_THROWS_AS(sample_gaussian_points(CovarianceModel(1.0), many, 1, 10), NumericError);
    CHECK_NOTHROW(sample_gaussian_points(CovarianceModel(1.0), many, 1, 40));
    CHECK(sample_gaussian_points(CovarianceModel(1.0), Eigen::MatrixXd(2, 0), 1).size() == 0);
}

TEST_CASE("grid and point samplers agree in law") {
    const GridSpec g(2, 2, 0.5);  // 4 x 4
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    const Eigen::MatrixXd nodes = g.nodes();
    const Eigen::Index node = 5;
    std::vector<double> from_grid, from_points, grid_diff, point_diff;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const Eigen::VectorXd a = sampler.draw(seed);
        const Eigen::VectorXd b = sample_gaussian_points(CovarianceModel(1.0), nodes, seed + 100000).values;
        from_grid.push_back(a[node]);
        from_points.push_back(b[node]);
        grid_diff.push_back(a[node] - a[node + 1]);
        point_diff.push_back(b[node] - b[node + 1]);
    }
    CHECK(ks_p_value(from_grid, from_points) > 1e-3);
    CHECK(ks_p_value(grid_diff, point_diff) > 1e-3);
}

TEST_CASE("ks helper rejects shifted samples") {
    std::vector<double> a, b;
    for (int i = 0; i < 500; ++i) {
        a.push_back(i / 500.0);
        b.push_back(0.3 + i / 500.0);
    }
    CHECK(ks_p_value(a, b) < 1e-6);
    CHECK(ks_p_value(a, a) > 0.99);
}

TEST_CASE("chi-square sampler moments") {
    const GridSpec g(2, 2, 0.5);
    const GaussianGridSampler sampler(CovarianceModel(1.0), g);
    std::vector<double> k3, k1;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        k3.push_back(draw_chi_square(sampler, 3, seed)[3]);
        k1.push_back(draw_chi_square(sampler, 1, seed + 50000)[3]);
    }
    CHECK(stats::mean(k3) == Approx(3.0).epsilon(0.05));
    CHECK(stats::variance(k3) == Approx(6.0).epsilon(0.1));
    const double tail = std::count_if(k1.begin(), k1.end(), [](double x) { return x >= 1.0; }) / 10000.0;
    CHECK(tail == Approx(0.3173).epsilon(0.015 / 0.3173));

    // Component k is the Gaussian draw with seed mix_seed(seed, k).
    const Eigen::VectorXd two = draw_chi_square(sampler, 2, 9);
    const Eigen::VectorXd manual =
        sampler.draw(mix_seed(9, 0)).array().square() + sampler.draw(mix_seed(9, 1)).array().square();
    CHECK(two == manual);
    CHECK(sample_chi_square(CovarianceModel(1.0), 2, g, 9).values == two);
    CHECK_THROWS_AS(draw_chi_square(sampler, 0, 1), ContractError);
}

TEST_CASE("chi-square points sampler") {
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 0.0,
         0.0, 0.0;
    const FieldSample s = sample_chi_square(CovarianceModel(1.0), 3, p, 4);
    CHECK(s.values[0] == s.values[1]);
    CHECK(s.values[0] >= 0.0);
}

TEST_CASE("poisson process") {
    const Box box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(10.0, 10.0));
    std::vector<double> counts;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Eigen::MatrixXd pts = sample_poisson_process(1.0, box, seed);
        REQUIRE(pts.rows() == 2);
        counts.push_back(static_cast<double>(pts.cols()));
        if (pts.cols() > 0) {
            CHECK(pts.minCoeff() >= 0.0);
            CHECK(pts.maxCoeff() <= 10.0);
        }
    }
    CHECK(stats::mean(counts) == Approx(100.0).epsilon(0.03));
    CHECK(stats::variance(counts) / stats::mean(counts) == Approx(1.0).epsilon(0.1));
    CHECK(sample_poisson_process(0.0, box, 1).cols() == 0);
    const Box flat(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(5.0, 1.0));
    CHECK(sample_poisson_process(1.0, flat, 1).cols() == 0);
    CHECK(sample_poisson_process(1.0, box, 7) == sample_poisson_process(1.0, box, 7));
}

TEST_CASE("csv export") {
    FieldSample s;
    s.locations = Eigen::MatrixXd(2, 1);
    s.locations << 0.5, -1.0;
    s.values = Eigen::VectorXd::Constant(1, 0.25);
    std::ostringstream os;
    write_csv(os, s);
    CHECK(os.str() == "x1,x2,value\n0.5,-1,0.25\n");
}
