#include "qcomp/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qcomp {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr int kMaxPlacementAttempts = 100000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        throw ConfigError(field + ": " + why);
    }
}

// Inside the hexagonal Voronoi cell of a lattice site with the given spacing,
// with p relative to the site.
bool in_hexagon(Point p, double spacing) {
    const double half = 0.5 * spacing + 1e-9;
    for (double angle : {0.0, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0}) {
        if (std::abs(p.x * std::cos(angle) + p.y * std::sin(angle)) > half) {
            return false;
        }
    }
    return true;
}

}  // namespace

void validate(const NetworkConfig& cfg) {
    require(cfg.n_cells >= 1, "n_cells", "must be >= 1");
    require(cfg.n_users_per_cell >= 1, "n_users_per_cell", "must be >= 1");
    require(cfg.n_antennas >= 1, "n_antennas", "must be >= 1");
    require(std::isfinite(cfg.target_sinr_db), "target_sinr_db", "must be finite");
    require(cfg.inter_bs_distance_m > 0.0, "inter_bs_distance_m", "must be positive");
    require(cfg.min_bs_user_distance_m >= 0.0, "min_bs_user_distance_m", "must be non-negative");
    // Users live inside the hexagon; its inscribed radius is half the spacing.
    require(cfg.min_bs_user_distance_m < 0.5 * cfg.inter_bs_distance_m, "min_bs_user_distance_m",
            "users cannot be placed: minimum distance reaches the cell edge");
    require(cfg.carrier_freq_hz > 0.0, "carrier_freq_hz", "must be positive");
    require(cfg.bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
    require(std::isfinite(cfg.noise_figure_db), "noise_figure_db", "must be finite");
    require(cfg.shadowing_std_db >= 0.0, "shadowing_std_db", "must be non-negative");
    require(cfg.pathloss_exponent > 0.0, "pathloss_exponent", "must be positive");
    require(cfg.pathloss_ref_distance_m > 0.0, "pathloss_ref_distance_m", "must be positive");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::uint64_t RngStream::derive(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t state = splitmix64(master);
    for (std::uint64_t index : indices) {
        state = splitmix64(state ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    }
    return state;
}

cdouble RngStream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::vector<Point> bs_sites(std::size_t n_cells, double spacing) {
    struct Site {
        Point p;
        long radius_key;
        long angle_key;
    };
    // Enough rings to hold n_cells sites: ring r holds 6r sites.
    long rings = 0;
    for (std::size_t held = 1; held < n_cells; held += 6 * static_cast<std::size_t>(++rings)) {
    }
    std::vector<Site> sites;
    const double row = spacing * std::sqrt(3.0) / 2.0;
    for (long a = -2 * rings - 1; a <= 2 * rings + 1; ++a) {
        for (long b = -2 * rings - 1; b <= 2 * rings + 1; ++b) {
            Point p{a * spacing + b * spacing / 2.0, b * row};
            double angle = std::atan2(p.y, p.x);
            if (angle < -1e-12) {
                angle += 2.0 * std::numbers::pi;
            }
            sites.push_back({p, std::lround(std::hypot(p.x, p.y) / spacing * 1e6), std::lround(angle * 1e9)});
        }
    }
    std::sort(sites.begin(), sites.end(), [](const Site& l, const Site& r) {
        return l.radius_key != r.radius_key ? l.radius_key < r.radius_key : l.angle_key < r.angle_key;
    });
    std::vector<Point> out;
    out.reserve(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        Point p = sites[c].p;
        // Snap round-off so the first site is exactly the origin.
        if (std::abs(p.x) < 1e-9 * spacing) p.x = 0.0;
        if (std::abs(p.y) < 1e-9 * spacing) p.y = 0.0;
        out.push_back(p);
    }
    return out;
}

Geometry place_network(const NetworkConfig& cfg, RngStream& rng) {
    validate(cfg);
    Geometry geom;
    geom.bs = bs_sites(cfg.n_cells, cfg.inter_bs_distance_m);
    const double circumradius = cfg.inter_bs_distance_m / std::sqrt(3.0);
    geom.users.reserve(cfg.n_users_total());
    for (std::size_t cell = 0; cell < cfg.n_cells; ++cell) {
        for (std::size_t u = 0; u < cfg.n_users_per_cell; ++u) {
            int attempt = 0;
            for (; attempt < kMaxPlacementAttempts; ++attempt) {
                Point offset{rng.uniform(-circumradius, circumradius), rng.uniform(-circumradius, circumradius)};
                if (in_hexagon(offset, cfg.inter_bs_distance_m) &&
                    std::hypot(offset.x, offset.y) >= cfg.min_bs_user_distance_m) {
                    geom.users.push_back({geom.bs[cell].x + offset.x, geom.bs[cell].y + offset.y});
                    break;
                }
            }
            if (attempt == kMaxPlacementAttempts) {
                throw ConfigError("user placement failed in cell " + std::to_string(cell));
            }
        }
    }
    return geom;
}

double pathloss_db(const NetworkConfig& cfg, double distance_m) {
    const double wavelength = kSpeedOfLight / cfg.carrier_freq_hz;
    const double d0 = cfg.pathloss_ref_distance_m;
    const double free_space = 20.0 * std::log10(4.0 * std::numbers::pi * d0 / wavelength);
    return free_space + 10.0 * cfg.pathloss_exponent * std::log10(std::max(distance_m, d0) / d0);
}

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return db_to_linear(dbm - 30.0);
}

ChannelSet::ChannelSet(std::size_t n_cells, std::size_t n_users, std::size_t n_antennas, double noise_variance)
    : n_cells_(n_cells),
      n_users_(n_users),
      n_antennas_(n_antennas),
      noise_variance_(noise_variance),
      stacked_(n_cells, CMat::Zero(static_cast<Eigen::Index>(n_antennas),
                                   static_cast<Eigen::Index>(n_cells * n_users))) {}

ChannelSet gen_channels(const NetworkConfig& cfg, const Geometry& geom, RngStream& rng) {
    ChannelSet channels(cfg.n_cells, cfg.n_users_per_cell, cfg.n_antennas,
                        thermal_noise_w(cfg.bandwidth_hz, cfg.noise_figure_db));
    const auto n_ant = static_cast<Eigen::Index>(cfg.n_antennas);
    for (std::size_t bs = 0; bs < cfg.n_cells; ++bs) {
        CMat& out = channels.from_bs(bs);
        for (std::size_t k = 0; k < cfg.n_users_total(); ++k) {
            const double shadow = cfg.shadowing_std_db > 0.0 ? cfg.shadowing_std_db * rng.normal() : 0.0;
            const double gain = db_to_linear(-(pathloss_db(cfg, distance(geom.bs[bs], geom.users[k])) + shadow));
            const double amplitude = std::sqrt(gain);
            for (Eigen::Index m = 0; m < n_ant; ++m) {
                out(m, static_cast<Eigen::Index>(k)) = amplitude * rng.complex_normal();
            }
        }
    }
    return channels;
}

ChannelSet make_realization(const NetworkConfig& cfg, std::uint64_t seed) {
    RngStream rng(seed);
    const Geometry geom = place_network(cfg, rng);
    return gen_channels(cfg, geom, rng);
}

void write_channels_csv(std::ostream& out, const ChannelSet& channels) {
    out << std::setprecision(17);
    out << "# qcomp-channels " << channels.n_cells() << ' ' << channels.n_users() << ' ' << channels.n_antennas()
        << ' ' << channels.noise_variance() << '\n';
    out << "bs,cell,user,antenna,re,im\n";
    for (std::size_t bs = 0; bs < channels.n_cells(); ++bs) {
        for (std::size_t k = 0; k < channels.n_users_total(); ++k) {
            const UserIndex id = user_of(k, channels.n_users());
            for (std::size_t m = 0; m < channels.n_antennas(); ++m) {
                const cdouble v = channels.from_bs(bs)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
                out << bs << ',' << id.cell << ',' << id.user << ',' << m << ',' << v.real() << ',' << v.imag()
                    << '\n';
            }
        }
    }
}

ChannelSet read_channels_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("channel file: empty input");
    }
    std::istringstream head(line);
    std::string hash, tag;
    std::size_t n_cells = 0, n_users = 0, n_antennas = 0;
    double noise = 0.0;
    if (!(head >> hash >> tag >> n_cells >> n_users >> n_antennas >> noise) || hash != "#" ||
        tag != "qcomp-channels") {
        throw ConfigError("channel file: bad preamble line");
    }
    if (!std::getline(in, line) || line != "bs,cell,user,antenna,re,im") {
        throw ConfigError("channel file: missing column header");
    }
    ChannelSet channels(n_cells, n_users, n_antennas, noise);
    std::size_t rows = 0;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::size_t bs = 0, cell = 0, user = 0, m = 0;
        double re = 0.0, im = 0.0;
        char c1, c2, c3, c4, c5;
        if (!(row >> bs >> c1 >> cell >> c2 >> user >> c3 >> m >> c4 >> re >> c5 >> im) || bs >= n_cells ||
            cell >= n_cells || user >= n_users || m >= n_antennas) {
            throw ConfigError("channel file: malformed row at line " + std::to_string(line_no));
        }
        channels.from_bs(bs)(static_cast<Eigen::Index>(m),
                             static_cast<Eigen::Index>(flat_index({cell, user}, n_users))) = {re, im};
        ++rows;
    }
    if (rows != n_cells * n_cells * n_users * n_antennas) {
        throw ConfigError("channel file: expected " + std::to_string(n_cells * n_cells * n_users * n_antennas) +
                          " rows, read " + std::to_string(rows));
    }
    return channels;
}

}  // namespace qcomp
