#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcomp/netgen.hpp"
#include "qcomp/outer.hpp"
#include "qcomp/quant.hpp"

namespace qcomp {

enum class Preset { MaxPowerVsSinr, AntennaCdf, PaprTable, SingleRun };

const char* to_string(Preset preset);
Preset parse_preset(const std::string& text);

/// Everything a `run` needs. `network.bits` and `network.target_sinr_db` are
/// overwritten per sweep point from the two lists.
struct ExperimentSpec {
    Preset preset = Preset::SingleRun;
    NetworkConfig network;
    std::vector<double> target_sinr_db{0.0};
    std::vector<Bits> bits{Bits::infinite()};
    int n_realizations = 1;
    // When set, realization r uses the same channels at every (gamma, b) point.
    bool share_channels_across_sweep = false;
    int jobs = 0;  // 0: all available threads
    std::string output_dir = "out";
    OuterConfig solver;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Parses the flat `key = value` format. `#` starts a comment; lists are
/// written `[a, b, c]`. Unknown or repeated keys, malformed values and missing
/// required keys (n_cells, n_users_per_cell, n_antennas) raise ConfigError
/// with the line number or field name.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::string& path);

/// Writes every key, so the output parses back to an equal spec.
void write_config(std::ostream& out, const ExperimentSpec& spec);

/// Range checks beyond parsing: network validity, non-empty sweeps, positive
/// tolerances.
void validate(const ExperimentSpec& spec);

}  // namespace qcomp
