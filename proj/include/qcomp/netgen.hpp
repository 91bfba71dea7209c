#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "qcomp/quant.hpp"
#include "qcomp/types.hpp"

namespace qcomp {

struct NetworkConfig {
    std::size_t n_cells = 1;
    std::size_t n_users_per_cell = 1;
    std::size_t n_antennas = 1;
    Bits bits = Bits::infinite();
    double target_sinr_db = 0.0;

    double inter_bs_distance_m = 2000.0;
    double min_bs_user_distance_m = 100.0;
    double carrier_freq_hz = 2.4e9;
    double bandwidth_hz = 10e6;
    double noise_figure_db = 5.0;
    double shadowing_std_db = 8.7;
    double pathloss_exponent = 3.5;
    double pathloss_ref_distance_m = 100.0;

    std::uint64_t seed = 1;

    std::size_t n_users_total() const { return n_cells * n_users_per_cell; }
    bool operator==(const NetworkConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const NetworkConfig& cfg);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

struct Geometry {
    std::vector<Point> bs;     // one per cell
    std::vector<Point> users;  // flat user index, cell-major
};

/// Deterministic RNG stream. Independent streams are derived from a master
/// seed and a tuple of indices through SplitMix64 mixing.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    /// Circularly-symmetric complex Gaussian with unit variance.
    cdouble complex_normal();

private:
    std::mt19937_64 engine_;
};

/// BS sites are the hexagonal-lattice points closest to the origin, ordered by
/// (radius, angle). Users are uniform over the serving hexagon, at least the
/// minimum distance away from their BS.
Geometry place_network(const NetworkConfig& cfg, RngStream& rng);

/// Hexagonal lattice sites only (no users).
std::vector<Point> bs_sites(std::size_t n_cells, double spacing);

/// Log-distance pathloss in dB with free-space loss at the reference distance.
/// Distances below the reference are clamped to it.
double pathloss_db(const NetworkConfig& cfg, double distance_m);

/// Thermal noise power in watts: -174 dBm/Hz + 10 log10(B) + NF.
double thermal_noise_w(double bandwidth_hz, double noise_figure_db);

/// Channels h[j][i][u] from every BS j to every user (i,u). Per BS, the
/// N_b x (N_c N_u) matrix stacks user columns in flat (cell, user) order.
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(std::size_t n_cells, std::size_t n_users, std::size_t n_antennas, double noise_variance);

    std::size_t n_cells() const { return n_cells_; }
    std::size_t n_users() const { return n_users_; }
    std::size_t n_antennas() const { return n_antennas_; }
    std::size_t n_users_total() const { return n_cells_ * n_users_; }
    double noise_variance() const { return noise_variance_; }
    void set_noise_variance(double value) { noise_variance_ = value; }

    /// All channels out of BS j, one column per user.
    const CMat& from_bs(std::size_t bs) const { return stacked_[bs]; }
    CMat& from_bs(std::size_t bs) { return stacked_[bs]; }

    /// Channel from BS j to user k (flat index).
    auto h(std::size_t bs, std::size_t k) const { return stacked_[bs].col(static_cast<Eigen::Index>(k)); }
    auto h(std::size_t bs, UserIndex id) const { return h(bs, flat_index(id, n_users_)); }

    /// Channel from the serving BS of user k.
    auto own(std::size_t k) const { return h(k / n_users_, k); }

private:
    std::size_t n_cells_ = 0;
    std::size_t n_users_ = 0;
    std::size_t n_antennas_ = 0;
    double noise_variance_ = 1.0;
    std::vector<CMat> stacked_;
};

ChannelSet gen_channels(const NetworkConfig& cfg, const Geometry& geom, RngStream& rng);

/// Geometry and channels for one seed.
ChannelSet make_realization(const NetworkConfig& cfg, std::uint64_t seed);

/// CSV fixture format: a "# qcomp-channels n_cells n_users n_antennas noise_variance"
/// line, a header, then one row per (bs, cell, user, antenna) with re/im.
void write_channels_csv(std::ostream& out, const ChannelSet& channels);
ChannelSet read_channels_csv(std::istream& in);

}  // namespace qcomp
