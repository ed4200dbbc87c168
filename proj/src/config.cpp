#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <sstream>

#include "excursion/campaign.hpp"
#include "excursion/errors.hpp"

namespace excursion {

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::BiasSweep: return "bias-sweep";
        case Experiment::Crossing: return "crossing";
        case Experiment::Clt: return "clt";
        case Experiment::CroftonDemo: return "crofton-demo";
        case Experiment::VolumeCheck: return "volume-check";
    }
    return "unknown";
}

Experiment parse_experiment(const std::string& name) {
    for (Experiment e : {Experiment::BiasSweep, Experiment::Crossing, Experiment::Clt, Experiment::CroftonDemo,
                         Experiment::VolumeCheck})
        if (to_string(e) == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    T value{};
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || end != t.data() + t.size() || t.empty())
        throw ConfigError("bad value '" + text + "' for " + key);
    return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
    if (out.empty()) throw ConfigError(key + " needs at least one value");
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

std::string choice(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
    const std::string v = trim(value);
    for (const char* a : allowed)
        if (v == a) return v;
    throw ConfigError("bad value '" + value + "' for " + key);
}

}  // namespace

void apply_setting(CampaignConfig& cfg, const std::string& key_in, const std::string& value) {
    const std::string key = trim(key_in);
    if (key == "experiment") cfg.experiment = parse_experiment(trim(value));
    else if (key == "honeycomb") cfg.honeycomb = choice(key, value, {"hypercubic", "hexagonal", "voronoi"});
    else if (key == "field") cfg.field = choice(key, value, {"gaussian", "chi_square"});
    else if (key == "shape") cfg.shape = choice(key, value, {"circle", "square"});
    else if (key == "dim") cfg.dim = parse_number<int>(key, value);
    else if (key == "length_scale") cfg.length_scale = parse_number<double>(key, value);
    else if (key == "dof") cfg.dof = parse_number<int>(key, value);
    else if (key == "level") cfg.level = parse_number<double>(key, value);
    else if (key == "sweep") cfg.sweep = parse_list(key, value);
    else if (key == "window") cfg.window = parse_number<double>(key, value);
    else if (key == "delta") cfg.delta = parse_number<double>(key, value);
    else if (key == "guard") cfg.guard = parse_number<double>(key, value);
    else if (key == "replicates") cfg.replicates = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "pairs") cfg.pairs = parse_number<std::int64_t>(key, value);
    else if (key == "lines") cfg.lines = parse_number<std::int64_t>(key, value);
    else if (key == "dense_cap") cfg.dense_cap = parse_number<std::int64_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
    else if (key == "output") cfg.output = trim(value);
    else if (key == "summary") cfg.summary = trim(value);
    else if (key == "raw") cfg.raw = trim(value);
    else throw ConfigError("unknown key '" + key + "'");
}

void CampaignConfig::validate() const {
    if (replicates < 2) throw ConfigError("replicates must be >= 2");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (!(length_scale > 0.0)) throw ConfigError("length_scale must be positive");
    if (dof < 1) throw ConfigError("dof must be >= 1");
    if (!(window > 0.0)) throw ConfigError("window must be positive");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(guard >= 0.0)) throw ConfigError("guard must be nonnegative");
    if (pairs < replicates) throw ConfigError("pairs must be at least the replicate count");
    if (lines < replicates) throw ConfigError("lines must be at least the replicate count");
    if (dense_cap < 1) throw ConfigError("dense_cap must be positive");
    if (sweep.empty()) throw ConfigError("sweep needs at least one value");
    for (double v : sweep)
        if (!(v > 0.0)) throw ConfigError("sweep values must be strictly positive");
    const bool ascending = experiment == Experiment::Clt;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (ascending && !(sweep[i] > sweep[i - 1]))
            throw ConfigError("clt window list must be strictly increasing");
        if (!ascending && !(sweep[i] < sweep[i - 1]))
            throw ConfigError("sweep values must be strictly decreasing");
    }
    if (ascending)
        for (double v : sweep)
            if (v != static_cast<double>(static_cast<std::int64_t>(v)))
                throw ConfigError("clt windows are integer half-extents");
}

std::string CampaignConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["experiment"] = to_string(experiment);
    kv["honeycomb"] = honeycomb;
    kv["field"] = field;
    kv["shape"] = shape;
    kv["dim"] = std::to_string(dim);
    kv["length_scale"] = fmt(length_scale);
    kv["dof"] = std::to_string(dof);
    kv["level"] = fmt(level);
    std::string list;
    for (std::size_t i = 0; i < sweep.size(); ++i) list += (i ? "," : "") + fmt(sweep[i]);
    kv["sweep"] = list;
    kv["window"] = fmt(window);
    kv["delta"] = fmt(delta);
    kv["guard"] = fmt(guard);
    kv["replicates"] = std::to_string(replicates);
    kv["seed"] = std::to_string(seed);
    kv["pairs"] = std::to_string(pairs);
    kv["lines"] = std::to_string(lines);
    kv["dense_cap"] = std::to_string(dense_cap);
    std::string out;
    for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
    return out;
}

std::string CampaignConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void read_settings(std::istream& in, CampaignConfig& cfg) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key=value");
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

CampaignConfig parse_config(std::istream& in, CampaignConfig cfg) {
    read_settings(in, cfg);
    cfg.validate();
    return cfg;
}

CampaignConfig load_config(const std::string& path, CampaignConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

}  // namespace excursion
