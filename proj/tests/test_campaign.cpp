#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "excursion/campaign.hpp"
#include "excursion/errors.hpp"
#include "excursion/field_models.hpp"
#include "excursion/stats.hpp"

using namespace excursion;
using doctest::Approx;

namespace {

CampaignConfig from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string csv_of(const McCampaignResult& r) {
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const CampaignConfig c = from_text(
        "# bias sweep\n"
        "experiment = bias-sweep\n"
        "honeycomb=hexagonal  # trailing comment\n"
        "sweep = 0.5, 0.25,0.125\n"
        "replicates=4\n"
        "seed=18446744073709551615\n"
        "\n"
        "level=-0.5\n");
    CHECK(c.experiment == Experiment::BiasSweep);
    CHECK(c.honeycomb == "hexagonal");
    CHECK(c.sweep == std::vector<double>{0.5, 0.25, 0.125});
    CHECK(c.replicates == 4);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.level == -0.5);

    CHECK_THROWS_AS(from_text("colour=blue\n"), ConfigError);
    CHECK_THROWS_AS(from_text("replicates=1\n"), ConfigError);
    CHECK_THROWS_AS(from_text("replicates=two\n"), ConfigError);
    CHECK_THROWS_AS(from_text("sweep=0.25,0.5\n"), ConfigError);
    CHECK_THROWS_AS(from_text("sweep=0.5,-0.25\n"), ConfigError);
    CHECK_THROWS_AS(from_text("sweep=0.5,0.5\n"), ConfigError);
    CHECK_THROWS_AS(from_text("honeycomb=triangle\n"), ConfigError);
    CHECK_THROWS_AS(from_text("just text\n"), ConfigError);
    CHECK_THROWS_AS(from_text("experiment=clt\nsweep=40,20\n"), ConfigError);
    CHECK_THROWS_AS(from_text("experiment=clt\nsweep=20.5,40\n"), ConfigError);
    CHECK_NOTHROW(from_text("experiment=clt\nsweep=20,40\n"));
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config hash") {
    CampaignConfig a;
    CampaignConfig b = a;
    b.threads = 8;
    b.output = "x.csv";
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.seed = 2;
    CHECK(a.hash() != b.hash());
    // FNV-1a of the empty string.
    CHECK(a.canonical().find("seed=1\n") != std::string::npos);
}

TEST_CASE("bias sweep rows and raw table") {
    CampaignConfig c;
    c.window = 4.0;
    c.sweep = {0.5, 0.25};
    c.replicates = 6;
    const McCampaignResult r = run_bias_sweep(c);
    REQUIRE(r.rows.size() == 2);
    REQUIRE(r.raw.size() == 12);
    for (std::size_t s = 0; s < 2; ++s) {
        std::vector<double> ratios;
        for (const RawRecord& rec : r.raw)
            if (rec.sweep_index == static_cast<int>(s)) ratios.push_back(rec.values[0]);
        CHECK(r.rows[s].mean == stats::mean(ratios));
        CHECK(r.rows[s].std_error == Approx(std::sqrt(stats::variance(ratios) / 6)).epsilon(1e-14));
        CHECK(r.rows[s].count == 6);
        CHECK(r.extra(s, "target") == 0.5);
        CHECK(r.extra(s, "coverage_mean") == 1.0);
        CHECK(r.extra(s, "corrected_mean") == Approx(r.rows[s].mean / bias_factor(2)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(r.extra(0, "missing"), ContractError);
}

TEST_CASE("campaign output is independent of the thread count") {
    CampaignConfig c;
    c.window = 4.0;
    c.sweep = {0.5, 0.25};
    c.replicates = 8;
    c.threads = 1;
    const std::string one = csv_of(run_bias_sweep(c));
    c.threads = 4;
    const std::string four = csv_of(run_bias_sweep(c));
    CHECK(one == four);

    c.experiment = Experiment::Crossing;
    c.sweep = {0.2, 0.1};
    c.pairs = 80000;
    c.threads = 1;
    const std::string cross_one = csv_of(run_crossing_convergence(c));
    c.threads = 3;
    CHECK(csv_of(run_crossing_convergence(c)) == cross_one);
}

TEST_CASE("every csv row echoes the config hash") {
    CampaignConfig c;
    c.experiment = Experiment::VolumeCheck;
    c.window = 2.0;
    c.sweep = {0.5, 0.25};
    c.replicates = 3;
    const McCampaignResult r = run_volume_check(c);
    std::istringstream csv(csv_of(r));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "config_hash,experiment,statistic,sweep,mean,stderr,count,target,coverage");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line.rfind(c.hash() + ",volume-check,volume,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 2);

    std::ostringstream raw;
    r.write_raw_csv(raw);
    CHECK(raw.str().rfind("config_hash,sweep,replicate,seed,volume\n" + c.hash(), 0) == 0);
}

TEST_CASE("json summary mirrors the csv") {
    CampaignConfig c;
    c.experiment = Experiment::CroftonDemo;
    c.sweep = {2.0, 1.0};
    c.lines = 20000;
    c.replicates = 4;
    const McCampaignResult r = run_crofton_demo(c);
    std::ostringstream os;
    r.write_json(os);
    const nlohmann::json j = nlohmann::json::parse(os.str());
    CHECK(j["config_hash"] == c.hash());
    CHECK(j["config"]["experiment"] == "crofton-demo");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][1]["mean"].get<double>() == r.rows[1].mean);
    CHECK(j["rows"][1]["truth"].get<double>() == Approx(2 * std::numbers::pi));
    CHECK(j["wall_seconds"].get<double>() >= 0.0);
}

TEST_CASE("degenerate two-replicate run") {
    CampaignConfig c;
    c.window = 2.0;
    c.sweep = {0.25};
    c.replicates = 2;
    const McCampaignResult r = run_bias_sweep(c);
    CHECK(std::isfinite(r.rows[0].std_error));
    CHECK(r.rows[0].count == 2);
}

TEST_CASE("unsupported configurations") {
    CampaignConfig c;
    c.honeycomb = "voronoi";
    c.dim = 3;
    CHECK_THROWS_AS(run_bias_sweep(c), ConfigError);
    c.dim = 2;
    c.window = 1.0;
    c.sweep = {0.3};
    c.honeycomb = "hypercubic";
    CHECK_THROWS_AS(run_bias_sweep(c), ConfigError);  // 1 / 0.3 is not whole
    c.experiment = Experiment::VolumeCheck;
    c.honeycomb = "hexagonal";
    CHECK_THROWS_AS(run_volume_check(c), ConfigError);
    c.experiment = Experiment::CroftonDemo;
    c.shape = "square";
    c.dim = 3;
    CHECK_THROWS_AS(run_crofton_demo(c), ConfigError);
    c.replicates = 1;
    CHECK_THROWS_AS(run_campaign(c), ConfigError);
}

TEST_CASE("crossing campaign below the level range") {
    CampaignConfig c;
    c.experiment = Experiment::Crossing;
    c.level = -6.0;
    c.sweep = {0.4, 0.1};
    c.pairs = 20000;
    c.replicates = 4;
    const McCampaignResult r = run_crossing_convergence(c);
    for (std::size_t s = 0; s < r.rows.size(); ++s) {
        CHECK(r.extra(s, "p_hat_mean") == 0.0);
        CHECK(r.extra(s, "below_limit") == 1.0);
    }
}

TEST_CASE("crossing campaign approaches the density from below") {
    CampaignConfig c;
    c.experiment = Experiment::Crossing;
    c.sweep = {1.5, 0.05};
    c.pairs = 400000;
    c.replicates = 8;
    const McCampaignResult r = run_crossing_convergence(c);
    CHECK(r.rows[0].mean + 3 * r.rows[0].std_error < 0.5);
    CHECK(r.rows[1].mean == Approx(0.5).epsilon(0.05));
}

TEST_CASE("volume check targets") {
    CampaignConfig c;
    c.experiment = Experiment::VolumeCheck;
    c.window = 4.0;
    c.sweep = {0.25};
    c.replicates = 40;
    for (auto [field, level, target] : {std::tuple{"gaussian", 0.0, 0.5}, std::tuple{"gaussian", 1.0, 0.15866},
                                        std::tuple{"chi_square", 2.0, std::exp(-1.0)}}) {
        c.field = field;
        c.level = level;
        const McCampaignResult r = run_volume_check(c);
        CHECK(r.extra(0, "target") == Approx(target).epsilon(1e-4));
        CHECK(std::abs(r.rows[0].mean - target) <= 3 * r.rows[0].std_error);
    }
}

TEST_CASE("crofton demo truths") {
    CampaignConfig c;
    c.experiment = Experiment::CroftonDemo;
    c.sweep = {1.0};
    c.lines = 40000;
    c.replicates = 4;
    c.shape = "square";
    const McCampaignResult sq = run_crofton_demo(c);
    CHECK(sq.extra(0, "truth") == 4.0);
    CHECK(std::abs(sq.rows[0].mean - 4.0) < 3.5 * sq.rows[0].std_error + 1e-9);
    c.shape = "circle";
    c.dim = 3;
    const McCampaignResult sphere = run_crofton_demo(c);
    CHECK(sphere.extra(0, "truth") == Approx(4 * std::numbers::pi));
}

TEST_CASE("clt campaign diagnostics") {
    CampaignConfig c;
    c.experiment = Experiment::Clt;
    c.delta = 0.2;
    c.sweep = {10, 20};
    c.replicates = 30;
    const McCampaignResult r = run_clt(c);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.extra(1, "window_volume") == Approx(64.0));
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(r.extra(s, "scaled_var_volume") > 0.0);
        CHECK(r.extra(s, "scaled_var_surface") > 0.0);
        CHECK(std::isfinite(r.extra(s, "scaled_cov")));
        CHECK(std::isfinite(r.extra(s, "kurt_surface")));
    }
    c.honeycomb = "voronoi";
    CHECK_THROWS_AS(run_clt(c), ConfigError);
}

TEST_CASE("hexagonal and voronoi sweeps run") {
    CampaignConfig c;
    c.window = 2.0;
    c.sweep = {0.25};
    c.replicates = 3;
    c.honeycomb = "hexagonal";
    const McCampaignResult hex = run_bias_sweep(c);
    CHECK(hex.extra(0, "coverage_mean") < 1.0);
    CHECK(hex.rows[0].mean > 0.5);
    c.honeycomb = "voronoi";
    const McCampaignResult vor = run_bias_sweep(c);
    CHECK(vor.extra(0, "coverage_mean") > 0.7);
    CHECK(vor.rows[0].mean > 0.5);
    c.field = "chi_square";
    c.level = 2.0;
    CHECK_NOTHROW(run_bias_sweep(c));
}
