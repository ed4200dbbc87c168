#include "excursion/estimators.hpp"

#include <cmath>
#include <iomanip>
#include <locale>
#include <random>
#include <sstream>

namespace excursion {

ExcursionIndicator make_indicator(const Eigen::Ref<const Eigen::VectorXd>& values, double u, std::string tag) {
    ExcursionIndicator ind;
    ind.level = u;
    ind.source_tag = std::move(tag);
    ind.above.resize(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) ind.above[static_cast<std::size_t>(i)] = values[i] >= u;
    return ind;
}

ExcursionIndicator inside_indicator(const WindowedHoneycomb& h, const Eigen::Ref<const Eigen::VectorXd>& values,
                                    double u, std::string tag) {
    if (values.size() != static_cast<Eigen::Index>(h.mesh.cells.size()))
        throw ContractError("field values must be indexed like the honeycomb cells");
    ExcursionIndicator ind;
    ind.level = u;
    ind.source_tag = std::move(tag);
    ind.above.reserve(h.inside_cells.size());
    for (int c : h.inside_cells) ind.above.push_back(values[c] >= u);
    return ind;
}

namespace {

void check_aligned(const WindowedHoneycomb& h, const ExcursionIndicator& ind) {
    if (ind.size() != h.inside_cells.size())
        throw ContractError("indicator length " + std::to_string(ind.size()) + " does not match " +
                            std::to_string(h.inside_cells.size()) + " inside cells");
}

void check_grid(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid) {
    if (values.size() != grid.node_count()) throw ContractError("grid values do not match the lattice shape");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

double volume_estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind) {
    check_aligned(h, ind);
    double sum = 0.0;
    for (std::size_t s = 0; s < ind.size(); ++s)
        if (ind.above[s]) sum += h.inside_cell(s).volume;
    return sum / h.window_volume();
}

double surface_estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind) {
    check_aligned(h, ind);
    double sum = 0.0;
    // One pass over unordered facets: exactly one orientation can satisfy
    // X(P1*) <= u < X(P2*) when the two indicators differ.
    for (int fi : h.interior_facets) {
        const Facet& f = h.mesh.facets[static_cast<std::size_t>(fi)];
        const int a = h.inside_slot[static_cast<std::size_t>(f.cell_a)];
        const int b = h.inside_slot[static_cast<std::size_t>(f.cell_b)];
        if (ind.above[static_cast<std::size_t>(a)] != ind.above[static_cast<std::size_t>(b)]) sum += f.measure;
    }
    return sum / h.window_volume();
}

double hypercubic_volume_fast(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u) {
    check_grid(values, grid);
    std::int64_t count = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) count += values[i] >= u;
    return static_cast<double>(count) * std::pow(grid.spacing, grid.d) / grid.window_volume();
}

double hypercubic_surface_fast(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u) {
    check_grid(values, grid);
    const std::int64_t n = values.size();
    const std::int64_t side = grid.side();
    std::int64_t crossings = 0;
    for (int j = 0; j < grid.d; ++j) {
        const std::int64_t stride = grid.stride(j);
        for (std::int64_t i = 0; i < n; ++i) {
            if ((i / stride) % side == side - 1) continue;
            crossings += (values[i] >= u) != (values[i + stride] >= u);
        }
    }
    // Summing the facet measure crossing-by-crossing matches the explicit
    // honeycomb route bit-for-bit.
    const double facet = std::pow(grid.spacing, grid.d - 1);
    double sum = 0.0;
    for (std::int64_t c = 0; c < crossings; ++c) sum += facet;
    return sum / grid.window_volume();
}

std::string EstimateReport::csv_header() { return "d,delta,u,volume,surface_raw,surface_corrected,coverage"; }

std::string EstimateReport::csv_row() const {
    return std::to_string(d) + ',' + fmt(delta) + ',' + fmt(level) + ',' + fmt(volume_density) + ',' + fmt(surface_raw) +
           ',' + fmt(surface_corrected) + ',' + fmt(coverage_ratio);
}

std::string EstimateReport::to_json() const {
    return "{\"d\":" + std::to_string(d) + ",\"delta\":" + fmt(delta) + ",\"u\":" + fmt(level) +
           ",\"volume\":" + fmt(volume_density) + ",\"surface_raw\":" + fmt(surface_raw) +
           ",\"surface_corrected\":" + fmt(surface_corrected) + ",\"coverage\":" + fmt(coverage_ratio) +
           ",\"window_volume\":" + fmt(window_volume) + "}";
}

EstimateReport estimate(const WindowedHoneycomb& h, const ExcursionIndicator& ind) {
    EstimateReport r;
    r.d = h.dim();
    r.delta = h.mesh.diameter_bound;
    r.level = ind.level;
    r.volume_density = volume_estimate(h, ind);
    r.surface_raw = surface_estimate(h, ind);
    r.surface_corrected = corrected_surface(r.surface_raw, r.d);
    r.window_volume = h.window_volume();
    r.coverage_ratio = h.coverage_ratio();
    return r;
}

EstimateReport estimate_hypercubic(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid, double u) {
    EstimateReport r;
    r.d = grid.d;
    r.delta = grid.spacing;
    r.level = u;
    r.volume_density = hypercubic_volume_fast(values, grid, u);
    r.surface_raw = hypercubic_surface_fast(values, grid, u);
    r.surface_corrected = corrected_surface(r.surface_raw, r.d);
    r.window_volume = grid.window_volume();
    r.coverage_ratio = 1.0;
    return r;
}

PairSampler gaussian_pair_sampler(const CovarianceModel& model, double q) {
    if (!(q > 0.0)) throw ContractError("crossing lag q must be positive");
    const double rho = model(q);
    const double tail = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    return [rho, tail](Engine& rng) {
        std::normal_distribution<double> normal;
        const double z0 = normal(rng);
        const double z1 = normal(rng);
        return std::pair<double, double>(z0, rho * z0 + tail * z1);
    };
}

PairSampler gaussian_pair_sampler(const CovarianceModel& model, const Eigen::VectorXd& lag) {
    const double r = lag.norm();
    if (!(r > 0.0)) throw ContractError("lag must be nonzero");
    return gaussian_pair_sampler(model, r);
}

PairSampler chi_square_pair_sampler(const CovarianceModel& model, int K, double q) {
    if (K < 1) throw ContractError("chi-square degrees of freedom must be >= 1");
    PairSampler g = gaussian_pair_sampler(model, q);
    return [g, K](Engine& rng) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < K; ++k) {
            const auto [x, y] = g(rng);
            a += x * x;
            b += y * y;
        }
        return std::pair<double, double>(a, b);
    };
}

CrossingEstimate crossing_rate_surface(const PairSampler& pairs, double u, double q, int d, std::int64_t n_pairs,
                                       std::uint64_t seed) {
    if (n_pairs <= 0) throw ContractError("crossing estimate needs at least one pair");
    if (!(q > 0.0)) throw ContractError("crossing lag q must be positive");
    Engine rng = make_engine(seed);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n_pairs; ++i) {
        const auto [x0, xq] = pairs(rng);
        hits += (x0 <= u && u < xq);
    }
    CrossingEstimate e;
    e.n_pairs = n_pairs;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(n_pairs);
    e.p_stderr = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n_pairs));
    const double scale = beta_d(d) / q;
    e.surface_first_order = scale * e.p_hat;
    e.surface_stderr = scale * e.p_stderr;
    return e;
}

}  // namespace excursion
