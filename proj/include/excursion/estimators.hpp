#pragma once

// Volume and surface-area density estimators computed from which reference
// points of a honeycomb lie in the excursion set {X >= u}.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "excursion/field_models.hpp"
#include "excursion/grid.hpp"
#include "excursion/rng.hpp"
#include "excursion/tessellation.hpp"

namespace excursion {

/// 1{X(P*) >= u} per inside cell. Ties at the level count as exceedance.
struct ExcursionIndicator {
    std::vector<std::uint8_t> above;
    double level = 0.0;
    std::string source_tag;

    std::size_t size() const { return above.size(); }
};

ExcursionIndicator make_indicator(const Eigen::Ref<const Eigen::VectorXd>& values, double u, std::string tag = {});

/// Gathers the field at the reference points of h's inside cells. `values` is
/// indexed like h.mesh.cells.
ExcursionIndicator inside_indicator(const WindowedHoneycomb& h, const Eigen::Ref<const Eigen::VectorXd>& values,
                                    double u, std::string tag = {});

/// (1 / sigma_d(T)) sum over inside cells of sigma_d(P) 1{X(P*) >= u}.
double volume_estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind);

/// (1 / sigma_d(T)) sum over ordered interior adjacent pairs of
/// sigma_{d-1}(P1 n P2) 1{X(P1*) <= u < X(P2*)}; each crossing facet counts once.
double surface_estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind);

/// Volume estimate on the hypercubic lattice straight from grid values.
double hypercubic_volume_fast(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u);

/// delta^{d-1} / sigma_d(T) times the number of axis-neighbour node pairs on
/// opposite sides of u.
double hypercubic_surface_fast(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u);

/// Removes the asymptotic 2d / beta_d bias: raw * beta_d / (2d).
template <typename Scalar = double>
Scalar corrected_surface(Scalar raw, int d) {
    if (raw < 0) throw ContractError("surface estimate must be nonnegative");
    return raw / bias_factor<Scalar>(d);
}

struct EstimateReport {
    int d = 2;
    double delta = 0.0;  // lattice spacing, or the diameter bound for general honeycombs
    double level = 0.0;
    double volume_density = 0.0;
    double surface_raw = 0.0;
    double surface_corrected = 0.0;
    double window_volume = 0.0;
    double coverage_ratio = 1.0;

    static std::string csv_header();  // d,delta,u,volume,surface_raw,surface_corrected,coverage
    std::string csv_row() const;
    std::string to_json() const;
};

EstimateReport estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind);
EstimateReport estimate_hypercubic(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u);

/// Draws one (X(0), X(q e1)) pair.
using PairSampler = std::function<std::pair<double, double>(Engine&)>;

PairSampler gaussian_pair_sampler(const CovarianceModel& model, double q);
PairSampler chi_square_pair_sampler(const CovarianceModel& model, int K, double q);
/// Pair (X(0), X(t)) for an arbitrary lag vector t.
PairSampler gaussian_pair_sampler(const CovarianceModel& model, const Eigen::VectorXd& lag);

struct CrossingEstimate {
    double p_hat = 0.0;
    double p_stderr = 0.0;
    double surface_first_order = 0.0;  // beta_d p_hat / q
    double surface_stderr = 0.0;
    std::int64_t n_pairs = 0;
};

/// Frequency of {X(0) <= u < X(q e1)} over n_pairs draws and the first-order
/// surface density beta_d p_hat / q, which approaches C*_{d-1}(u) from below.
CrossingEstimate crossing_rate_surface(const PairSampler& pairs, double u, double q, int d, std::int64_t n_pairs,
                                       std::uint64_t seed);

}  // namespace excursion
