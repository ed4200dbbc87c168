#include "excursion/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <fftw3.h>

#include "excursion/rng.hpp"

namespace excursion {

namespace {

// The FFTW planner is not re-entrant; plan execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(std::int64_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)))) {
        if (data == nullptr) throw NumericError("out of memory allocating FFT buffer");
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

std::string format_length(double l) {
    std::ostringstream os;
    os << std::setprecision(17) << l;
    return os.str();
}

}  // namespace

struct GaussianGridSampler::Plan {
    fftw_plan plan = nullptr;
    ~Plan() {
        if (plan != nullptr) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

GaussianGridSampler::GaussianGridSampler(const CovarianceModel& model, const GridSpec& grid, int max_padding)
    : model_(model), grid_(grid) {
    const int d = grid.d;
    const std::int64_t n = grid.side();
    for (int pad = 2; pad <= max_padding; pad *= 2) {
        const std::int64_t m = pad * n;
        std::int64_t total = 1;
        for (int k = 0; k < d; ++k) {
            total *= m;
            if (total > kMaxTorusPoints)
                throw NumericError("circulant embedding exceeds the torus size cap of 2^26 points");
        }

        FftwBuffer buf(total);
        // Wrapped covariance: lag along each axis is min(k, m - k) * delta.
        std::vector<int> idx(d, 0);
        for (std::int64_t flat = 0; flat < total; ++flat) {
            double r2 = 0.0;
            std::int64_t rest = flat;
            for (int k = 0; k < d; ++k) {
                const std::int64_t i = rest % m;
                rest /= m;
                const double lag = grid.spacing * static_cast<double>(std::min(i, m - i));
                r2 += lag * lag;
            }
            buf.data[flat][0] = model(std::sqrt(r2));
            buf.data[flat][1] = 0.0;
        }

        std::vector<int> dims(d, static_cast<int>(m));
        fftw_plan plan;
        {
            std::lock_guard lock(fftw_planner_mutex());
            plan = fftw_plan_dft(d, dims.data(), buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        fftw_execute(plan);

        double max_eig = 0.0, min_eig = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k < total; ++k) {
            max_eig = std::max(max_eig, buf.data[k][0]);
            min_eig = std::min(min_eig, buf.data[k][0]);
        }
        min_relative_eigenvalue_ = min_eig / max_eig;
        if (min_eig < -1e-9 * max_eig) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
            continue;
        }

        padding_ = pad;
        torus_side_ = m;
        torus_size_ = total;
        sqrt_weights_.resize(static_cast<std::size_t>(total));
        const double inv_total = 1.0 / static_cast<double>(total);
        for (std::int64_t k = 0; k < total; ++k)
            sqrt_weights_[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, buf.data[k][0]) * inv_total);
        plan_ = std::make_unique<Plan>();
        plan_->plan = plan;
        return;
    }
    throw NumericError("circulant embedding not nonnegative-definite up to the maximum padding");
}

GaussianGridSampler::~GaussianGridSampler() = default;
GaussianGridSampler::GaussianGridSampler(GaussianGridSampler&&) noexcept = default;
GaussianGridSampler& GaussianGridSampler::operator=(GaussianGridSampler&&) noexcept = default;

std::string GaussianGridSampler::tag() const {
    return "gaussian squared-exponential l=" + format_length(model_.length_scale) +
           " circulant pad=" + std::to_string(padding_) + " rng=" + std::string(kRngName);
}

Eigen::VectorXd GaussianGridSampler::draw(std::uint64_t seed) const {
    Engine rng = make_engine(seed);
    std::normal_distribution<double> normal;
    FftwBuffer buf(torus_size_);
    for (std::int64_t k = 0; k < torus_size_; ++k) {
        const double w = sqrt_weights_[static_cast<std::size_t>(k)];
        const double re = normal(rng);
        const double im = normal(rng);
        buf.data[k][0] = w * re;
        buf.data[k][1] = w * im;
    }
    fftw_execute_dft(plan_->plan, buf.data, buf.data);

    // The field is the real part restricted to the first 2N nodes per axis.
    const int d = grid_.d;
    const std::int64_t n = grid_.side();
    Eigen::VectorXd out(grid_.node_count());
    for (std::int64_t flat = 0; flat < out.size(); ++flat) {
        std::int64_t rest = flat, torus_index = 0, torus_stride = 1;
        for (int k = 0; k < d; ++k) {
            torus_index += (rest % n) * torus_stride;
            rest /= n;
            torus_stride *= torus_side_;
        }
        out[flat] = buf.data[torus_index][0];
    }
    return out;
}

FieldSample sample_gaussian_grid(const CovarianceModel& model, const GridSpec& grid, std::uint64_t seed) {
    GaussianGridSampler sampler(model, grid);
    FieldSample s;
    s.locations = grid.nodes();
    s.values = sampler.draw(seed);
    s.seed = seed;
    s.model_tag = sampler.tag();
    return s;
}

namespace {

// Exactly coincident locations share one value (their correlation is 1), so
// only the distinct columns are factored; `slot` maps each point to its column.
struct DistinctPoints {
    Eigen::MatrixXd points;
    std::vector<Eigen::Index> slot;
};

DistinctPoints distinct_points(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index k = 0; k < points.rows(); ++k)
            if (points(k, a) != points(k, b)) return points(k, a) < points(k, b);
        return false;
    };
    std::stable_sort(order.begin(), order.end(), less);
    DistinctPoints out;
    out.slot.resize(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> first;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || less(order[i - 1], order[i])) first.push_back(order[i]);
        out.slot[static_cast<std::size_t>(order[i])] = static_cast<Eigen::Index>(first.size()) - 1;
    }
    // Keep the distinct columns in order of first appearance in `points`.
    std::vector<Eigen::Index> rank(first.size());
    std::iota(rank.begin(), rank.end(), Eigen::Index{0});
    std::sort(rank.begin(), rank.end(), [&](Eigen::Index a, Eigen::Index b) {
        return first[static_cast<std::size_t>(a)] < first[static_cast<std::size_t>(b)];
    });
    std::vector<Eigen::Index> position(first.size());
    out.points.resize(points.rows(), static_cast<Eigen::Index>(first.size()));
    for (std::size_t r = 0; r < rank.size(); ++r) {
        position[static_cast<std::size_t>(rank[r])] = static_cast<Eigen::Index>(r);
        out.points.col(static_cast<Eigen::Index>(r)) = points.col(first[static_cast<std::size_t>(rank[r])]);
    }
    for (Eigen::Index& s : out.slot) s = position[static_cast<std::size_t>(s)];
    return out;
}

Eigen::VectorXd scatter(const Eigen::VectorXd& distinct_values, const std::vector<Eigen::Index>& slot) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(slot.size()));
    for (std::size_t i = 0; i < slot.size(); ++i) out[static_cast<Eigen::Index>(i)] = distinct_values[slot[i]];
    return out;
}

Eigen::MatrixXd cholesky_factor(const CovarianceModel& model, const Eigen::MatrixXd& points, Eigen::Index cap) {
    const Eigen::Index n = points.cols();
    if (n > cap)
        throw NumericError("point count " + std::to_string(n) + " exceeds the dense factorization cap " +
                           std::to_string(cap));
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cov(j, j) = 1.0;
        for (Eigen::Index i = j + 1; i < n; ++i) cov(i, j) = model((points.col(i) - points.col(j)).norm());
    }
    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-10;
        llt.compute(cov);
        if (llt.info() != Eigen::Success) throw NumericError("covariance not positive definite");
    }
    return llt.matrixL();
}

Eigen::VectorXd standard_normals(Eigen::Index n, std::uint64_t seed) {
    Engine rng = make_engine(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    return z;
}

std::string dense_tag(const CovarianceModel& model) {
    return "gaussian squared-exponential l=" + format_length(model.length_scale) +
           " dense-cholesky rng=" + std::string(kRngName);
}

}  // namespace

FieldSample sample_gaussian_points(const CovarianceModel& model, const Eigen::MatrixXd& points, std::uint64_t seed,
                                   Eigen::Index cap) {
    FieldSample s;
    s.locations = points;
    s.seed = seed;
    s.model_tag = dense_tag(model);
    if (points.cols() == 0) return s;
    const DistinctPoints u = distinct_points(points);
    const Eigen::MatrixXd L = cholesky_factor(model, u.points, cap);
    s.values = scatter(L.triangularView<Eigen::Lower>() * standard_normals(u.points.cols(), seed), u.slot);
    return s;
}

Eigen::VectorXd draw_chi_square(const GaussianGridSampler& sampler, int K, std::uint64_t seed) {
    if (K < 1) throw ContractError("chi-square degrees of freedom must be >= 1");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(sampler.grid().node_count());
    for (int k = 0; k < K; ++k) acc.array() += sampler.draw(mix_seed(seed, static_cast<std::uint64_t>(k))).array().square();
    return acc;
}

FieldSample sample_chi_square(const CovarianceModel& model, int K, const GridSpec& grid, std::uint64_t seed) {
    GaussianGridSampler sampler(model, grid);
    FieldSample s;
    s.locations = grid.nodes();
    s.values = draw_chi_square(sampler, K, seed);
    s.seed = seed;
    s.model_tag = "chi-square K=" + std::to_string(K) + " of " + sampler.tag();
    return s;
}

FieldSample sample_chi_square(const CovarianceModel& model, int K, const Eigen::MatrixXd& points, std::uint64_t seed,
                              Eigen::Index cap) {
    if (K < 1) throw ContractError("chi-square degrees of freedom must be >= 1");
    FieldSample s;
    s.locations = points;
    s.seed = seed;
    s.model_tag = "chi-square K=" + std::to_string(K) + " of " + dense_tag(model);
    if (points.cols() == 0) {
        s.values.resize(0);
        return s;
    }
    const DistinctPoints u = distinct_points(points);
    const Eigen::MatrixXd L = cholesky_factor(model, u.points, cap);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.points.cols());
    for (int k = 0; k < K; ++k) {
        const Eigen::VectorXd g = L.triangularView<Eigen::Lower>() *
                                  standard_normals(u.points.cols(), mix_seed(seed, static_cast<std::uint64_t>(k)));
        acc.array() += g.array().square();
    }
    s.values = scatter(acc, u.slot);
    return s;
}

Eigen::MatrixXd sample_poisson_process(double rate, const Box& box, std::uint64_t seed) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw ContractError("Poisson rate must be finite and nonnegative");
    const int d = static_cast<int>(box.dim());
    if (box.isEmpty() || rate == 0.0) return Eigen::MatrixXd(d, 0);
    const double volume = box.volume();
    if (!(volume > 0.0)) return Eigen::MatrixXd(d, 0);

    Engine rng = make_engine(seed);
    std::poisson_distribution<long long> count_dist(rate * volume);
    const long long count = count_dist(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd pts(d, count);
    const Eigen::VectorXd lo = box.min();
    const Eigen::VectorXd extent = box.sizes();
    for (long long i = 0; i < count; ++i)
        for (int k = 0; k < d; ++k) pts(k, i) = lo[k] + extent[k] * unit(rng);
    return pts;
}

void write_csv(std::ostream& out, const FieldSample& sample) {
    const int d = sample.dim();
    for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
    out << "value\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        for (int k = 0; k < d; ++k) out << sample.locations(k, i) << ',';
        out << sample.values[i] << '\n';
    }
}

}  // namespace excursion
