#include "excursion/campaign.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>
#include <sstream>

#include "excursion/crofton.hpp"
#include "excursion/errors.hpp"
#include "excursion/estimators.hpp"
#include "excursion/field_models.hpp"
#include "excursion/parallel.hpp"
#include "excursion/rng.hpp"
#include "excursion/sampler.hpp"
#include "excursion/stats.hpp"
#include "excursion/tessellation.hpp"

namespace excursion {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + '"';
}

bool is_gaussian(const CampaignConfig& cfg) { return cfg.field == "gaussian"; }

double surface_target(const CampaignConfig& cfg) {
    const double lambda = CovarianceModel(cfg.length_scale).lambda();
    return is_gaussian(cfg) ? gaussian_surface_density(cfg.level, lambda, cfg.dim)
                            : chisq_surface_density(cfg.level, lambda, cfg.dim, cfg.dof);
}

double volume_target(const CampaignConfig& cfg) {
    return is_gaussian(cfg) ? gaussian_volume_density(cfg.level) : chisq_volume_density(cfg.level, cfg.dof);
}

/// N with N * delta = window, or a ConfigError.
int half_extent(double window, double delta) {
    const double ratio = window / delta;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
        throw ConfigError("window " + fmt(window) + " is not a whole number of spacings " + fmt(delta));
    return static_cast<int>(n);
}

Box centred_box(int d, double half) {
    return Box(Eigen::VectorXd::Constant(d, -half), Eigen::VectorXd::Constant(d, half));
}

Eigen::VectorXd draw_grid(const GaussianGridSampler& sampler, const CampaignConfig& cfg, std::uint64_t seed) {
    return is_gaussian(cfg) ? sampler.draw(seed) : draw_chi_square(sampler, cfg.dof, seed);
}

Eigen::VectorXd draw_points(const CampaignConfig& cfg, const Eigen::MatrixXd& points, std::uint64_t seed) {
    const CovarianceModel model(cfg.length_scale);
    const Eigen::Index cap = static_cast<Eigen::Index>(cfg.dense_cap);
    return is_gaussian(cfg) ? sample_gaussian_points(model, points, seed, cap).values
                            : sample_chi_square(model, cfg.dof, points, seed, cap).values;
}

Eigen::MatrixXd inside_refs(const WindowedHoneycomb& h) {
    Eigen::MatrixXd refs(h.dim(), static_cast<Eigen::Index>(h.inside_cells.size()));
    for (std::size_t s = 0; s < h.inside_cells.size(); ++s) refs.col(static_cast<Eigen::Index>(s)) = h.inside_cell(s).ref;
    return refs;
}

class Runner {
public:
    Runner(const CampaignConfig& cfg, std::string statistic, std::vector<std::string> raw_columns,
           std::vector<std::string> extra_columns)
        : start_(std::chrono::steady_clock::now()) {
        cfg.validate();
        result_.config = cfg;
        result_.config_hash = cfg.hash();
        result_.statistic = std::move(statistic);
        result_.raw_columns = std::move(raw_columns);
        result_.extra_columns = std::move(extra_columns);
        const std::size_t slots = cfg.sweep.size() * static_cast<std::size_t>(cfg.replicates);
        result_.raw.resize(slots);
    }

    const CampaignConfig& cfg() const { return result_.config; }

    /// Fills the replicate slots of sweep index s in parallel.
    template <typename Body>
    void replicates(int s, Body&& body) {
        const int R = cfg().replicates;
        parallel_for(static_cast<std::size_t>(R), cfg().threads, [&](std::size_t r) {
            RawRecord& rec = result_.raw[static_cast<std::size_t>(s) * static_cast<std::size_t>(R) + r];
            rec.sweep_index = s;
            rec.replicate = static_cast<int>(r);
            rec.seed = mix_seed(cfg().seed, static_cast<std::uint64_t>(s), r);
            rec.values = body(rec.seed);
        });
    }

    /// Column c of the raw table for sweep index s.
    std::vector<double> column(int s, std::size_t c) const {
        const int R = cfg().replicates;
        std::vector<double> out(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r)
            out[static_cast<std::size_t>(r)] =
                result_.raw[static_cast<std::size_t>(s) * static_cast<std::size_t>(R) + static_cast<std::size_t>(r)]
                    .values[c];
        return out;
    }

    void row(int s, const std::vector<double>& sample, std::vector<double> extras) {
        SweepRow r;
        r.sweep = cfg().sweep[static_cast<std::size_t>(s)];
        r.mean = stats::mean(sample);
        r.std_error = stats::stderr_of_mean(sample);
        r.count = static_cast<std::int64_t>(sample.size());
        r.extras = std::move(extras);
        result_.rows.push_back(std::move(r));
    }

    McCampaignResult finish() {
        result_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return std::move(result_);
    }

private:
    McCampaignResult result_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

McCampaignResult run_bias_sweep(const CampaignConfig& cfg) {
    if (cfg.honeycomb == "voronoi" && cfg.dim != 2) throw ConfigError("voronoi sweeps are two-dimensional");
    if (cfg.honeycomb == "hexagonal" && cfg.dim != 2) throw ConfigError("hexagonal sweeps are two-dimensional");
    Runner run(cfg, "surface_ratio", {"surface_ratio", "corrected_ratio", "surface_raw", "volume", "coverage"},
               {"corrected_mean", "corrected_stderr", "volume_mean", "coverage_mean", "target"});
    const double target = surface_target(cfg);
    const CovarianceModel model(cfg.length_scale);
    const Box window = centred_box(cfg.dim, cfg.window);

    auto record = [&](const EstimateReport& e) {
        return std::vector<double>{e.surface_raw / target, e.surface_corrected / target, e.surface_raw,
                                   e.volume_density, e.coverage_ratio};
    };

    for (int s = 0; s < static_cast<int>(cfg.sweep.size()); ++s) {
        const double delta = cfg.sweep[static_cast<std::size_t>(s)];
        if (cfg.honeycomb == "hypercubic") {
            const GridSpec grid(cfg.dim, half_extent(cfg.window, delta), delta);
            const GaussianGridSampler sampler(model, grid);
            run.replicates(s, [&](std::uint64_t seed) {
                return record(estimate_hypercubic(draw_grid(sampler, cfg, seed), grid, cfg.level));
            });
        } else if (cfg.honeycomb == "hexagonal") {
            const WindowedHoneycomb h = hexagonal_honeycomb(delta, window);
            const Eigen::MatrixXd refs = inside_refs(h);
            run.replicates(s, [&](std::uint64_t seed) {
                return record(estimate(h, make_indicator(draw_points(cfg, refs, seed), cfg.level)));
            });
        } else {
            // Unit-rate generators in T / delta plus a guard band, rescaled by delta.
            const double half = cfg.window / delta + cfg.guard;
            const Box cloud_box = centred_box(2, half);
            run.replicates(s, [&](std::uint64_t seed) {
                const Eigen::Matrix2Xd points = delta * sample_poisson_process(1.0, cloud_box, mix_seed(seed, 0));
                const WindowedHoneycomb h = voronoi_honeycomb_2d(points, window, cfg.guard * delta);
                const Eigen::VectorXd values = draw_points(cfg, inside_refs(h), mix_seed(seed, 1));
                return record(estimate(h, make_indicator(values, cfg.level)));
            });
        }
        run.row(s, run.column(s, 0),
                {stats::mean(run.column(s, 1)), stats::stderr_of_mean(run.column(s, 1)), stats::mean(run.column(s, 3)),
                 stats::mean(run.column(s, 4)), target});
    }
    return run.finish();
}

McCampaignResult run_crossing_convergence(const CampaignConfig& cfg) {
    Runner run(cfg, "surface_first_order", {"surface_first_order", "p_hat"}, {"p_hat_mean", "target", "below_limit"});
    const double target = surface_target(cfg);
    const CovarianceModel model(cfg.length_scale);
    const std::int64_t per_replicate = cfg.pairs / cfg.replicates;
    for (int s = 0; s < static_cast<int>(cfg.sweep.size()); ++s) {
        const double q = cfg.sweep[static_cast<std::size_t>(s)];
        const PairSampler pairs =
            is_gaussian(cfg) ? gaussian_pair_sampler(model, q) : chi_square_pair_sampler(model, cfg.dof, q);
        run.replicates(s, [&](std::uint64_t seed) {
            const CrossingEstimate e = crossing_rate_surface(pairs, cfg.level, q, cfg.dim, per_replicate, seed);
            return std::vector<double>{e.surface_first_order, e.p_hat};
        });
        const std::vector<double> est = run.column(s, 0);
        const bool below = stats::mean(est) <= target + 3.0 * stats::stderr_of_mean(est);
        run.row(s, est, {stats::mean(run.column(s, 1)), target, below ? 1.0 : 0.0});
    }
    return run.finish();
}

McCampaignResult run_clt(const CampaignConfig& cfg) {
    if (cfg.honeycomb != "hypercubic") throw ConfigError("clt diagnostics use the hypercubic lattice");
    Runner run(cfg, "volume", {"volume", "surface_raw"},
               {"surface_mean", "surface_stderr", "scaled_var_volume", "scaled_var_surface", "scaled_cov",
                "skew_volume", "kurt_volume", "skew_surface", "kurt_surface", "window_volume"});
    const CovarianceModel model(cfg.length_scale);
    for (int s = 0; s < static_cast<int>(cfg.sweep.size()); ++s) {
        const GridSpec grid(cfg.dim, static_cast<int>(cfg.sweep[static_cast<std::size_t>(s)]), cfg.delta);
        const GaussianGridSampler sampler(model, grid);
        run.replicates(s, [&](std::uint64_t seed) {
            const EstimateReport e = estimate_hypercubic(draw_grid(sampler, cfg, seed), grid, cfg.level);
            return std::vector<double>{e.volume_density, e.surface_raw};
        });
        const std::vector<double> vol = run.column(s, 0), sur = run.column(s, 1);
        const double area = grid.window_volume();
        run.row(s, vol,
                {stats::mean(sur), stats::stderr_of_mean(sur), area * stats::variance(vol),
                 area * stats::variance(sur), area * stats::covariance(vol, sur), stats::skewness(vol),
                 stats::excess_kurtosis(vol), stats::skewness(sur), stats::excess_kurtosis(sur), area});
    }
    return run.finish();
}

McCampaignResult run_crofton_demo(const CampaignConfig& cfg) {
    if (cfg.shape == "square" && cfg.dim != 2) throw ConfigError("the square demo is two-dimensional");
    if (cfg.dim < 2) throw ConfigError("crofton demos need dim >= 2");
    Runner run(cfg, "measure", {"measure"}, {"truth", "relative_error", "bounding_radius"});
    const std::int64_t per_replicate = cfg.lines / cfg.replicates;
    const int d = cfg.dim;
    for (int s = 0; s < static_cast<int>(cfg.sweep.size()); ++s) {
        const double size = cfg.sweep[static_cast<std::size_t>(s)];
        IntersectionOracle oracle;
        double truth = 0.0, bound = 0.0;
        if (cfg.shape == "circle") {
            oracle = sphere_oracle(Eigen::VectorXd::Zero(d), size);
            truth = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d) * std::pow(size, d - 1);
            bound = 2.0 * size;
        } else {
            oracle = square_boundary_oracle(Eigen::Vector2d::Zero(), size);
            truth = 4.0 * size;
            bound = size;
        }
        run.replicates(s, [&](std::uint64_t seed) {
            return std::vector<double>{crofton_measure_mc(oracle, d, per_replicate, bound, seed).measure};
        });
        const std::vector<double> m = run.column(s, 0);
        run.row(s, m, {truth, std::abs(stats::mean(m) - truth) / truth, bound});
    }
    return run.finish();
}

McCampaignResult run_volume_check(const CampaignConfig& cfg) {
    if (cfg.honeycomb != "hypercubic") throw ConfigError("volume checks use the hypercubic lattice");
    Runner run(cfg, "volume", {"volume"}, {"target", "coverage"});
    const double target = volume_target(cfg);
    const CovarianceModel model(cfg.length_scale);
    for (int s = 0; s < static_cast<int>(cfg.sweep.size()); ++s) {
        const double delta = cfg.sweep[static_cast<std::size_t>(s)];
        const GridSpec grid(cfg.dim, half_extent(cfg.window, delta), delta);
        const GaussianGridSampler sampler(model, grid);
        run.replicates(s, [&](std::uint64_t seed) {
            return std::vector<double>{hypercubic_volume_fast(draw_grid(sampler, cfg, seed), grid, cfg.level)};
        });
        run.row(s, run.column(s, 0), {target, 1.0});
    }
    return run.finish();
}

McCampaignResult run_campaign(const CampaignConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::BiasSweep: return run_bias_sweep(cfg);
        case Experiment::Crossing: return run_crossing_convergence(cfg);
        case Experiment::Clt: return run_clt(cfg);
        case Experiment::CroftonDemo: return run_crofton_demo(cfg);
        case Experiment::VolumeCheck: return run_volume_check(cfg);
    }
    throw ConfigError("unknown experiment");
}

void McCampaignResult::write_csv(std::ostream& out) const {
    out.imbue(std::locale::classic());
    out << "config_hash,experiment,statistic,sweep,mean,stderr,count";
    for (const std::string& c : extra_columns) out << ',' << c;
    out << '\n';
    for (const SweepRow& r : rows) {
        out << config_hash << ',' << to_string(config.experiment) << ',' << statistic << ',' << fmt(r.sweep) << ','
            << fmt(r.mean) << ',' << fmt(r.std_error) << ',' << r.count;
        for (double x : r.extras) out << ',' << fmt(x);
        out << '\n';
    }
}

void McCampaignResult::write_raw_csv(std::ostream& out) const {
    out.imbue(std::locale::classic());
    out << "config_hash,sweep,replicate,seed";
    for (const std::string& c : raw_columns) out << ',' << c;
    out << '\n';
    for (const RawRecord& r : raw) {
        out << config_hash << ',' << fmt(config.sweep[static_cast<std::size_t>(r.sweep_index)]) << ',' << r.replicate
            << ',' << r.seed;
        for (double x : r.values) out << ',' << fmt(x);
        out << '\n';
    }
}

void McCampaignResult::write_json(std::ostream& out) const {
    out.imbue(std::locale::classic());
    out << "{\n  \"config_hash\": " << json_string(config_hash) << ",\n  \"config\": {";
    std::istringstream lines(config.canonical());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        out << (first ? "" : ",") << "\n    " << json_string(line.substr(0, eq)) << ": "
            << json_string(line.substr(eq + 1));
        first = false;
    }
    out << "\n  },\n  \"statistic\": " << json_string(statistic) << ",\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        out << (i ? "," : "") << "\n    {\"sweep\": " << fmt(r.sweep) << ", \"mean\": " << fmt(r.mean)
            << ", \"stderr\": " << fmt(r.std_error) << ", \"count\": " << r.count;
        for (std::size_t c = 0; c < extra_columns.size(); ++c)
            out << ", " << json_string(extra_columns[c]) << ": " << fmt(r.extras[c]);
        out << '}';
    }
    out << "\n  ],\n  \"wall_seconds\": " << fmt(wall_seconds) << "\n}\n";
}

double McCampaignResult::extra(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < extra_columns.size(); ++c)
        if (extra_columns[c] == column) return rows.at(row).extras.at(c);
    throw ContractError("no column '" + column + "'");
}

}  // namespace excursion
