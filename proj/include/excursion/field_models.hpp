#pragma once

// Closed-form reference quantities for smooth isotropic unit-variance fields:
// the dimensional constant beta_d and the analytic volume / surface-area
// densities of Gaussian and chi-square excursion sets.

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "excursion/errors.hpp"

namespace excursion {

/// Stationary isotropic covariance exp(-|t|^2 / (2 l^2)) with unit variance.
struct CovarianceModel {
    enum class Kind { SquaredExponential };

    Kind kind = Kind::SquaredExponential;
    double length_scale = 1.0;

    CovarianceModel() = default;
    explicit CovarianceModel(double l) : length_scale(l) {
        if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("covariance length scale must be positive");
    }

    /// Covariance at Euclidean lag |t| = r.
    template <typename Scalar>
    Scalar operator()(Scalar r) const {
        const Scalar l = static_cast<Scalar>(length_scale);
        return std::exp(-r * r / (Scalar(2) * l * l));
    }

    /// Second spectral moment, the variance of any directional derivative.
    double lambda() const { return 1.0 / (length_scale * length_scale); }
};

namespace detail {

// Gamma((d+1)/2) / Gamma(d/2) through log-gamma, stable for large d.
template <typename Scalar>
Scalar half_gamma_ratio(int d) {
    return std::exp(std::lgamma(Scalar(d + 1) / 2) - std::lgamma(Scalar(d) / 2));
}

}  // namespace detail

/// beta_d = 2 sqrt(pi) Gamma((d+1)/2) / Gamma(d/2).
template <typename Scalar = double>
Scalar beta_d(int d) {
    if (d < 1) throw DomainError("beta_d requires d >= 1");
    return Scalar(2) * std::sqrt(std::numbers::pi_v<Scalar>) * detail::half_gamma_ratio<Scalar>(d);
}

/// Asymptotic bias factor 2d / beta_d of the naive lattice surface estimator.
template <typename Scalar = double>
Scalar bias_factor(int d) {
    return Scalar(2 * d) / beta_d<Scalar>(d);
}

/// C*_{d-1}(u) of a zero-mean unit-variance isotropic Gaussian field.
template <typename Scalar = double>
Scalar gaussian_surface_density(Scalar u, Scalar lambda, int d) {
    if (!(lambda > 0)) throw DomainError("second spectral moment must be positive");
    if (d < 1) throw DomainError("dimension must be >= 1");
    return std::sqrt(lambda / std::numbers::pi_v<Scalar>) * std::exp(-u * u / 2) *
           detail::half_gamma_ratio<Scalar>(d);
}

/// C*_d(u) = P(Z >= u), evaluated through erfc so the upper tail keeps precision.
template <typename Scalar = double>
Scalar gaussian_volume_density(Scalar u) {
    return std::erfc(u / std::numbers::sqrt2_v<Scalar>) / 2;
}

/// C*_{d-1}(u) of a chi-square field with K degrees of freedom. The familiar
/// closed form sqrt(lambda) (u/2)^{(K-1)/2} e^{-u/2} G((d+1)/2) / (G(K/2) G(d/2))
/// is a Lipschitz-Killing density, half the level-set measure; this returns
/// twice it, so K = 1 gives both Gaussian level sets at +-sqrt(u). Diverges at
/// u -> 0 for K = 1, so u <= 0 is rejected.
template <typename Scalar = double>
Scalar chisq_surface_density(Scalar u, Scalar lambda, int d, int K) {
    if (!(u > 0)) throw DomainError("chi-square surface density requires a positive level");
    if (!(lambda > 0)) throw DomainError("second spectral moment must be positive");
    if (K < 1) throw DomainError("degrees of freedom must be >= 1");
    if (d < 1) throw DomainError("dimension must be >= 1");
    const Scalar log_value = std::lgamma(Scalar(d + 1) / 2) - std::lgamma(Scalar(K) / 2) -
                             std::lgamma(Scalar(d) / 2) + Scalar(K - 1) / 2 * std::log(u / 2) - u / 2;
    return 2 * std::sqrt(lambda) * std::exp(log_value);
}

/// Chi-square(K) survival function P(X >= u).
template <typename Scalar = double>
Scalar chisq_volume_density(Scalar u, int K) {
    if (K < 1) throw DomainError("degrees of freedom must be >= 1");
    if (u <= 0) return Scalar(1);
    return boost::math::gamma_q(Scalar(K) / 2, u / 2);
}

/// p_X(u) E[|grad X|_1 | X = u] for the Gaussian field: each partial derivative
/// is N(0, lambda) and independent of X(0), so E|d_j X| = sqrt(2 lambda / pi).
template <typename Scalar = double>
Scalar gaussian_l1_limit(Scalar u, Scalar lambda, int d) {
    if (!(lambda > 0)) throw DomainError("second spectral moment must be positive");
    const Scalar phi = std::exp(-u * u / 2) / std::sqrt(2 * std::numbers::pi_v<Scalar>);
    return phi * Scalar(d) * std::sqrt(2 * lambda / std::numbers::pi_v<Scalar>);
}

}  // namespace excursion
