#include "qcomp/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qcomp {

const char* to_string(Preset preset) {
    switch (preset) {
        case Preset::MaxPowerVsSinr: return "max_power_vs_sinr";
        case Preset::AntennaCdf: return "antenna_cdf";
        case Preset::PaprTable: return "papr_table";
        case Preset::SingleRun: return "single_run";
    }
    return "unknown";
}

Preset parse_preset(const std::string& text) {
    for (Preset p : {Preset::MaxPowerVsSinr, Preset::AntennaCdf, Preset::PaprTable, Preset::SingleRun}) {
        if (text == to_string(p)) {
            return p;
        }
    }
    throw ConfigError("unknown preset '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("expected a number, got '" + s + "'");
    }
    return v;
}

long long to_int(const std::string& s) {
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("expected an integer, got '" + s + "'");
    }
    return v;
}

std::size_t to_count(const std::string& s) {
    const long long v = to_int(s);
    if (v < 0) {
        throw ConfigError("expected a nonnegative integer, got '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<std::string> to_list(const std::string& s) {
    std::string body = s;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') {
            throw ConfigError("unterminated list '" + s + "'");
        }
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ConfigError("empty list element in '" + s + "'");
        }
        items.push_back(item);
    }
    if (items.empty()) {
        throw ConfigError("empty list");
    }
    return items;
}

Bits to_bits(const std::string& s) {
    try {
        return Bits::parse(s);
    } catch (const std::exception&) {
        throw ConfigError("expected a positive bit count or inf, got '" + s + "'");
    }
}

template <class E>
E pick(const std::string& s, std::initializer_list<std::pair<const char*, E>> options) {
    std::string names;
    for (const auto& [name, value] : options) {
        if (s == name) {
            return value;
        }
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError("expected one of " + names + ", got '" + s + "'");
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"preset", [](ExperimentSpec& e, const std::string& v) { e.preset = parse_preset(v); }},
        {"n_cells", [](ExperimentSpec& e, const std::string& v) { e.network.n_cells = to_count(v); }},
        {"n_users_per_cell", [](ExperimentSpec& e, const std::string& v) { e.network.n_users_per_cell = to_count(v); }},
        {"n_antennas", [](ExperimentSpec& e, const std::string& v) { e.network.n_antennas = to_count(v); }},
        {"target_sinr_db",
         [](ExperimentSpec& e, const std::string& v) {
             e.target_sinr_db.clear();
             for (const auto& item : to_list(v)) e.target_sinr_db.push_back(to_double(item));
         }},
        {"bits",
         [](ExperimentSpec& e, const std::string& v) {
             e.bits.clear();
             for (const auto& item : to_list(v)) e.bits.push_back(to_bits(item));
         }},
        {"n_realizations", [](ExperimentSpec& e, const std::string& v) { e.n_realizations = static_cast<int>(to_int(v)); }},
        {"share_channels_across_sweep",
         [](ExperimentSpec& e, const std::string& v) { e.share_channels_across_sweep = to_bool(v); }},
        {"seed", [](ExperimentSpec& e, const std::string& v) { e.network.seed = to_count(v); }},
        {"jobs", [](ExperimentSpec& e, const std::string& v) { e.jobs = static_cast<int>(to_int(v)); }},
        {"output_dir", [](ExperimentSpec& e, const std::string& v) { e.output_dir = v; }},
        {"inter_bs_distance_m", [](ExperimentSpec& e, const std::string& v) { e.network.inter_bs_distance_m = to_double(v); }},
        {"min_bs_user_distance_m",
         [](ExperimentSpec& e, const std::string& v) { e.network.min_bs_user_distance_m = to_double(v); }},
        {"carrier_freq_hz", [](ExperimentSpec& e, const std::string& v) { e.network.carrier_freq_hz = to_double(v); }},
        {"bandwidth_hz", [](ExperimentSpec& e, const std::string& v) { e.network.bandwidth_hz = to_double(v); }},
        {"noise_figure_db", [](ExperimentSpec& e, const std::string& v) { e.network.noise_figure_db = to_double(v); }},
        {"shadowing_std_db", [](ExperimentSpec& e, const std::string& v) { e.network.shadowing_std_db = to_double(v); }},
        {"pathloss_exponent", [](ExperimentSpec& e, const std::string& v) { e.network.pathloss_exponent = to_double(v); }},
        {"pathloss_ref_distance_m",
         [](ExperimentSpec& e, const std::string& v) { e.network.pathloss_ref_distance_m = to_double(v); }},
        {"ascent",
         [](ExperimentSpec& e, const std::string& v) {
             e.solver.ascent = pick<AscentRule>(
                 v, {{"multiplicative", AscentRule::Multiplicative}, {"euclidean", AscentRule::Euclidean}});
         }},
        {"step_rule",
         [](ExperimentSpec& e, const std::string& v) {
             e.solver.step_rule =
                 pick<StepRule>(v, {{"diminishing", StepRule::Diminishing}, {"fixed", StepRule::Fixed}});
         }},
        {"step_scale", [](ExperimentSpec& e, const std::string& v) { e.solver.step_scale = to_double(v); }},
        {"multiplicative_step",
         [](ExperimentSpec& e, const std::string& v) { e.solver.multiplicative_step = to_double(v); }},
        {"outer_tol", [](ExperimentSpec& e, const std::string& v) { e.solver.outer_tol = to_double(v); }},
        {"gap_tol", [](ExperimentSpec& e, const std::string& v) { e.solver.gap_tol = to_double(v); }},
        {"stall_iters", [](ExperimentSpec& e, const std::string& v) { e.solver.stall_iters = static_cast<int>(to_int(v)); }},
        {"stall_rel_tol", [](ExperimentSpec& e, const std::string& v) { e.solver.stall_rel_tol = to_double(v); }},
        {"max_outer_iters",
         [](ExperimentSpec& e, const std::string& v) { e.solver.max_outer_iters = static_cast<int>(to_int(v)); }},
        {"trace_scope",
         [](ExperimentSpec& e, const std::string& v) {
             e.solver.trace_scope =
                 pick<TraceScope>(v, {{"network", TraceScope::Network}, {"per_cell", TraceScope::PerCell}});
         }},
        {"noise_floor", [](ExperimentSpec& e, const std::string& v) { e.solver.noise_floor = to_double(v); }},
        {"papr_mode",
         [](ExperimentSpec& e, const std::string& v) {
             e.solver.papr_mode = pick<PaprMode>(v, {{"network", PaprMode::Network}, {"per_bs", PaprMode::PerBs}});
         }},
        {"inner_tol", [](ExperimentSpec& e, const std::string& v) { e.solver.inner.tol = to_double(v); }},
        {"inner_max_iter",
         [](ExperimentSpec& e, const std::string& v) { e.solver.inner.max_iter = static_cast<int>(to_int(v)); }},
        {"lambda_init", [](ExperimentSpec& e, const std::string& v) { e.solver.inner.lambda_init = to_double(v); }},
        {"lambda_cap_factor",
         [](ExperimentSpec& e, const std::string& v) { e.solver.inner.lambda_cap_factor = to_double(v); }},
    };
    return table;
}

}  // namespace

ExperimentSpec parse_config(std::istream& in) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": missing value for '" + key + "'");
        }
        try {
            it->second(spec, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
        }
    }
    for (const char* required : {"n_cells", "n_users_per_cell", "n_antennas"}) {
        if (!seen.count(required)) {
            throw ConfigError(std::string("missing required key '") + required + "'");
        }
    }
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentSpec& spec) {
    const NetworkConfig& n = spec.network;
    const OuterConfig& s = spec.solver;
    auto list = [](const auto& items, auto fmt) {
        std::string text = "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            text += (i ? ", " : "") + fmt(items[i]);
        }
        return text + "]";
    };
    out << "preset = " << to_string(spec.preset) << "\n"
        << "n_cells = " << n.n_cells << "\n"
        << "n_users_per_cell = " << n.n_users_per_cell << "\n"
        << "n_antennas = " << n.n_antennas << "\n"
        << "target_sinr_db = " << list(spec.target_sinr_db, num) << "\n"
        << "bits = " << list(spec.bits, [](const Bits& b) { return b.to_string(); }) << "\n"
        << "n_realizations = " << spec.n_realizations << "\n"
        << "share_channels_across_sweep = " << (spec.share_channels_across_sweep ? "true" : "false") << "\n"
        << "seed = " << n.seed << "\n"
        << "jobs = " << spec.jobs << "\n"
        << "output_dir = " << spec.output_dir << "\n"
        << "inter_bs_distance_m = " << num(n.inter_bs_distance_m) << "\n"
        << "min_bs_user_distance_m = " << num(n.min_bs_user_distance_m) << "\n"
        << "carrier_freq_hz = " << num(n.carrier_freq_hz) << "\n"
        << "bandwidth_hz = " << num(n.bandwidth_hz) << "\n"
        << "noise_figure_db = " << num(n.noise_figure_db) << "\n"
        << "shadowing_std_db = " << num(n.shadowing_std_db) << "\n"
        << "pathloss_exponent = " << num(n.pathloss_exponent) << "\n"
        << "pathloss_ref_distance_m = " << num(n.pathloss_ref_distance_m) << "\n"
        << "ascent = " << (s.ascent == AscentRule::Multiplicative ? "multiplicative" : "euclidean") << "\n"
        << "step_rule = " << (s.step_rule == StepRule::Diminishing ? "diminishing" : "fixed") << "\n"
        << "step_scale = " << num(s.step_scale) << "\n"
        << "multiplicative_step = " << num(s.multiplicative_step) << "\n"
        << "outer_tol = " << num(s.outer_tol) << "\n"
        << "gap_tol = " << num(s.gap_tol) << "\n"
        << "stall_iters = " << s.stall_iters << "\n"
        << "stall_rel_tol = " << num(s.stall_rel_tol) << "\n"
        << "max_outer_iters = " << s.max_outer_iters << "\n"
        << "trace_scope = " << (s.trace_scope == TraceScope::Network ? "network" : "per_cell") << "\n"
        << "noise_floor = " << num(s.noise_floor) << "\n"
        << "papr_mode = " << (s.papr_mode == PaprMode::Network ? "network" : "per_bs") << "\n"
        << "inner_tol = " << num(s.inner.tol) << "\n"
        << "inner_max_iter = " << s.inner.max_iter << "\n"
        << "lambda_init = " << num(s.inner.lambda_init) << "\n"
        << "lambda_cap_factor = " << num(s.inner.lambda_cap_factor) << "\n";
}

void validate(const ExperimentSpec& spec) {
    validate(spec.network);
    if (spec.target_sinr_db.empty()) throw ConfigError("target_sinr_db: empty sweep");
    if (spec.bits.empty()) throw ConfigError("bits: empty sweep");
    if (spec.n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
    if (spec.jobs < 0) throw ConfigError("jobs must be >= 0");
    if (spec.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    const OuterConfig& s = spec.solver;
    if (!(s.step_scale > 0.0)) throw ConfigError("step_scale must be > 0");
    if (!(s.multiplicative_step > 0.0)) throw ConfigError("multiplicative_step must be > 0");
    if (!(s.outer_tol > 0.0)) throw ConfigError("outer_tol must be > 0");
    if (!(s.gap_tol >= 0.0)) throw ConfigError("gap_tol must be >= 0");
    if (s.stall_iters < 0) throw ConfigError("stall_iters must be >= 0");
    if (!(s.stall_rel_tol >= 0.0)) throw ConfigError("stall_rel_tol must be >= 0");
    if (s.max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
    if (!(s.noise_floor >= 0.0) || s.noise_floor >= 1.0) throw ConfigError("noise_floor must be in [0, 1)");
    if (!(s.inner.tol > 0.0)) throw ConfigError("inner_tol must be > 0");
    if (s.inner.max_iter < 1) throw ConfigError("inner_max_iter must be >= 1");
    if (!(s.inner.lambda_init > 0.0)) throw ConfigError("lambda_init must be > 0");
    if (!(s.inner.lambda_cap_factor > 1.0)) throw ConfigError("lambda_cap_factor must be > 1");
}

}  // namespace qcomp
