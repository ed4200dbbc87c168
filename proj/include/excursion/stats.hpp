#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace excursion::stats {

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 16) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<const double> x) {
    return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample variance (n - 1 denominator).
inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

inline double stderr_of_mean(std::span<const double> x) {
    return x.size() < 2 ? 0.0 : std::sqrt(variance(x) / static_cast<double>(x.size()));
}

inline double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || x.size() != y.size()) return 0.0;
    const double mx = mean(x), my = mean(y);
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my);
    return pairwise_sum(p) / static_cast<double>(x.size() - 1);
}

/// Moment skewness g1 = m3 / m2^{3/2}.
inline double skewness(std::span<const double> x) {
    const double m = mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double c = v - m;
        m2 += c * c;
        m3 += c * c * c;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

/// Moment excess kurtosis g2 = m4 / m2^2 - 3.
inline double excess_kurtosis(std::span<const double> x) {
    const double m = mean(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double c2 = (v - m) * (v - m);
        m2 += c2;
        m4 += c2 * c2;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

}  // namespace excursion::stats
