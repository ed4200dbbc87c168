#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "excursion/field_models.hpp"
#include "excursion/grid.hpp"

namespace excursion {

/// Field values attached to sample locations (one column per location).
struct FieldSample {
    Eigen::MatrixXd locations;  // d x n
    Eigen::VectorXd values;     // n
    std::uint64_t seed = 0;
    std::string model_tag;

    int dim() const { return static_cast<int>(locations.rows()); }
    Eigen::Index size() const { return values.size(); }
};

/// Largest torus (in complex points) the circulant embedding will allocate.
inline constexpr std::int64_t kMaxTorusPoints = std::int64_t{1} << 26;

/// Default cap on the number of points for the dense-factorization sampler.
inline constexpr Eigen::Index kDefaultDenseCap = 4096;

/// Exact stationary Gaussian sampling on a GridSpec by circulant embedding.
///
/// The covariance is wrapped onto a torus of pad * 2N nodes per axis and
/// diagonalised with a d-dimensional FFT. Padding starts at 2 and doubles up
/// to `max_padding`; if the smallest eigenvalue is still below -1e-9 times
/// the largest, construction throws NumericError. Surviving negative
/// eigenvalues (all within that tolerance) are set to zero.
///
/// The embedding is computed once; draw() is const and safe to call from
/// many threads at once.
class GaussianGridSampler {
public:
    GaussianGridSampler(const CovarianceModel& model, const GridSpec& grid, int max_padding = 8);
    ~GaussianGridSampler();
    GaussianGridSampler(GaussianGridSampler&&) noexcept;
    GaussianGridSampler& operator=(GaussianGridSampler&&) noexcept;

    /// Values at grid nodes in GridSpec flat order.
    Eigen::VectorXd draw(std::uint64_t seed) const;

    const GridSpec& grid() const { return grid_; }
    const CovarianceModel& model() const { return model_; }
    int padding() const { return padding_; }
    /// Most negative eigenvalue relative to the largest, before clipping.
    double min_relative_eigenvalue() const { return min_relative_eigenvalue_; }
    std::string tag() const;

private:
    struct Plan;
    CovarianceModel model_;
    GridSpec grid_;
    int padding_ = 2;
    std::int64_t torus_side_ = 0;
    std::int64_t torus_size_ = 0;
    double min_relative_eigenvalue_ = 0.0;
    std::vector<double> sqrt_weights_;
    std::unique_ptr<Plan> plan_;
};

FieldSample sample_gaussian_grid(const CovarianceModel& model, const GridSpec& grid, std::uint64_t seed);

/// Exact draw at arbitrary points through a Cholesky factor of the dense
/// covariance matrix. A 1e-10 diagonal jitter is added once if the plain
/// factorization fails. `points` is d x n.
FieldSample sample_gaussian_points(const CovarianceModel& model, const Eigen::MatrixXd& points,
                                   std::uint64_t seed, Eigen::Index cap = kDefaultDenseCap);

/// Sum of squares of K independent Gaussian fields; component k uses the
/// seed mix_seed(seed, k).
FieldSample sample_chi_square(const CovarianceModel& model, int K, const GridSpec& grid, std::uint64_t seed);
FieldSample sample_chi_square(const CovarianceModel& model, int K, const Eigen::MatrixXd& points,
                              std::uint64_t seed, Eigen::Index cap = kDefaultDenseCap);

/// Chi-square draw on a grid reusing an existing Gaussian embedding.
Eigen::VectorXd draw_chi_square(const GaussianGridSampler& sampler, int K, std::uint64_t seed);

using Box = Eigen::AlignedBox<double, Eigen::Dynamic>;

/// Homogeneous Poisson process in an axis-aligned box, returned as d x n.
Eigen::MatrixXd sample_poisson_process(double rate, const Box& box, std::uint64_t seed);

/// CSV with header x1,...,xd,value.
void write_csv(std::ostream& out, const FieldSample& sample);

}  // namespace excursion
