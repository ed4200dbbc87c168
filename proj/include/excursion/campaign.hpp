#pragma once

// Reproducible Monte Carlo campaigns. Every replicate draws from the seed
// mix_seed(base_seed, sweep_index, replicate_index) and writes into a
// pre-indexed slot, so output depends only on the configuration.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace excursion {

enum class Experiment { BiasSweep, Crossing, Clt, CroftonDemo, VolumeCheck };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

struct CampaignConfig {
    Experiment experiment = Experiment::BiasSweep;
    std::string honeycomb = "hypercubic";  // hypercubic | hexagonal | voronoi
    std::string field = "gaussian";        // gaussian | chi_square
    std::string shape = "circle";          // circle | square (crofton-demo)
    int dim = 2;
    double length_scale = 1.0;
    int dof = 2;  // K for the chi-square field
    double level = 0.0;
    /// delta list (bias-sweep, volume-check), q list (crossing), shape sizes
    /// (crofton-demo): strictly descending. Window half-extents N (clt):
    /// strictly ascending.
    std::vector<double> sweep{0.5, 0.25};
    double window = 8.0;   // T = [-window, window]^d
    double delta = 0.1;    // fixed spacing for clt
    double guard = 1.5;    // Voronoi guard band in unit-rate units: 3x the mean nearest-neighbour distance
    int replicates = 20;
    std::uint64_t seed = 1;
    std::int64_t pairs = 1000000;  // crossing pairs per sweep value, over all replicates
    std::int64_t lines = 100000;   // Crofton lines per sweep value, over all replicates
    std::int64_t dense_cap = 8192;
    unsigned threads = 1;
    std::string output;
    std::string summary;
    std::string raw;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
    /// Sorted key=value lines of every setting that affects results
    /// (threads and output paths excluded).
    std::string canonical() const;
    /// FNV-1a of canonical(), as 16 hex digits.
    std::string hash() const;
};

/// Applies one key=value setting; throws ConfigError for unknown keys or bad values.
void apply_setting(CampaignConfig& cfg, const std::string& key, const std::string& value);
/// Applies flat key=value text ('#' starts a comment) without validating.
void read_settings(std::istream& in, CampaignConfig& cfg);
/// read_settings followed by validate().
CampaignConfig parse_config(std::istream& in, CampaignConfig base = {});
CampaignConfig load_config(const std::string& path, CampaignConfig base = {});

struct SweepRow {
    double sweep = 0.0;
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(count)
    std::int64_t count = 0;
    std::vector<double> extras;  // named by McCampaignResult::extra_columns
};

struct RawRecord {
    int sweep_index = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // named by McCampaignResult::raw_columns
};

struct McCampaignResult {
    CampaignConfig config;
    std::string config_hash;
    std::string statistic;  // what `mean` averages
    std::vector<std::string> extra_columns;
    std::vector<SweepRow> rows;
    std::vector<std::string> raw_columns;
    std::vector<RawRecord> raw;
    double wall_seconds = 0.0;

    void write_csv(std::ostream& out) const;
    void write_raw_csv(std::ostream& out) const;
    /// Config echo, rows and wall-clock time.
    void write_json(std::ostream& out) const;
    /// Value of an extra column in a row.
    double extra(std::size_t row, const std::string& column) const;
};

/// Mean surface ratio estimate / C*_{d-1}(u) per delta.
McCampaignResult run_bias_sweep(const CampaignConfig& cfg);
/// beta_d p_hat / q per q, averaged over replicates.
McCampaignResult run_crossing_convergence(const CampaignConfig& cfg);
/// Scaled variances, covariance and shape of (volume, surface) per window.
McCampaignResult run_clt(const CampaignConfig& cfg);
/// Crofton estimates of a circle (radius) or square (side) per size.
McCampaignResult run_crofton_demo(const CampaignConfig& cfg);
/// Mean hypercubic volume estimate per delta against C*_d(u).
McCampaignResult run_volume_check(const CampaignConfig& cfg);

McCampaignResult run_campaign(const CampaignConfig& cfg);

}  // namespace excursion
