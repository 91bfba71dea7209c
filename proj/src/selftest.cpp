#include "qcomp/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcomp/config.hpp"
#include "qcomp/dual.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/netgen.hpp"
#include "qcomp/outer.hpp"
#include "qcomp/primal.hpp"
#include "qcomp/quant.hpp"

namespace qcomp {

namespace {

struct Check {
    const char* name;
    std::function<bool()> body;
};

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

CMat random_cmat(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {n(rng), n(rng)};
    return m;
}

ChannelSet random_channels(std::mt19937_64& rng, std::size_t nc, std::size_t nu, std::size_t nb) {
    ChannelSet ch(nc, nu, nb, 1.0);
    for (std::size_t j = 0; j < nc; ++j) {
        ch.from_bs(j) = random_cmat(rng, static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nc * nu));
    }
    return ch;
}

std::vector<Check> checks() {
    return {
        {"quant: b=inf gives alpha=1 beta=0",
         [] {
             const auto q = from_bits(Bits::infinite());
             return q.alpha == 1.0 && q.beta == 0.0;
         }},
        {"quant: b=1 beta is 1-2/pi to 4 digits",
         [] { return close(from_bits(Bits::of(1)).beta, 1.0 - 2.0 / std::numbers::pi, 5e-4); }},
        {"quant: N_b=1 w=2 b=1 covariance is 4 alpha beta",
         [] {
             const auto q = from_bits(Bits::of(1));
             CMat w(1, 1);
             w(0, 0) = 2.0;
             return close(quant_noise_cov(q, w)(0), 4.0 * q.alpha * q.beta, 1e-15);
         }},
        {"quant: per-antenna power identity alpha^2 + alpha beta = alpha",
         [] {
             std::mt19937_64 rng(7);
             const auto q = from_bits(Bits::of(2));
             const CMat w = random_cmat(rng, 6, 3);
             const RVec lhs = (q.alpha * q.alpha * (w * w.adjoint())).diagonal().real() + quant_noise_cov(q, w);
             const RVec rhs = q.alpha * (w * w.adjoint()).diagonal().real();
             return (lhs - rhs).cwiseAbs().maxCoeff() <= 1e-14 * rhs.maxCoeff();
         }},
        {"netgen: noise power for 10 MHz, NF 5 dB is -99 dBm",
         [] { return std::abs(linear_to_db(thermal_noise_w(10e6, 5.0)) + 30.0 + 99.0) < 1e-9; }},
        {"netgen: 4 sites at 2000 m spacing",
         [] {
             const auto s = bs_sites(4, 2000.0);
             for (std::size_t i = 1; i < 4; ++i) {
                 if (std::abs(distance(s[0], s[i]) - 2000.0) > 1e-6) return false;
             }
             return true;
         }},
        {"netgen: same seed gives identical channels",
         [] {
             NetworkConfig cfg;
             cfg.n_cells = 2;
             cfg.n_users_per_cell = 2;
             cfg.n_antennas = 4;
             const auto a = make_realization(cfg, 42);
             const auto b = make_realization(cfg, 42);
             return a.from_bs(0) == b.from_bs(0) && a.from_bs(1) == b.from_bs(1);
         }},
        {"dual: scalar K = 2 for beta=0, lambda=1, |h|=1, D=1",
         [] {
             ChannelSet ch(1, 1, 1, 1.0);
             ch.from_bs(0)(0, 0) = 1.0;
             const RVec lambda = RVec::Ones(1);
             return std::abs(build_K(ch, from_bits(Bits::infinite()), lambda, RVec::Ones(1), 0)(0, 0) - 2.0) < 1e-15;
         }},
        {"dual: Z = alpha K - alpha^2 lambda h h^H",
         [] {
             std::mt19937_64 rng(3);
             const auto ch = random_channels(rng, 2, 2, 4);
             const auto q = from_bits(Bits::of(2));
             const RVec lambda = RVec::LinSpaced(4, 0.5, 2.0);
             const RVec d = RVec::LinSpaced(4, 0.2, 1.8);
             const CMat k = build_K(ch, q, lambda, d, 1);
             const CMat z = build_Z(ch, q, lambda, d, 2);
             const CVec h = ch.h(1, 2);
             const CMat ref = q.alpha * k - q.alpha * q.alpha * lambda(2) * h * h.adjoint();
             return (z - ref).norm() <= 1e-12 * ref.norm();
         }},
        {"dual: scalar fixed point lambda = gamma d / g",
         [] {
             ChannelSet ch(1, 1, 1, 1.0);
             ch.from_bs(0)(0, 0) = std::sqrt(3.0);
             RVec d(1);
             d << 0.5;
             RVec gamma(1);
             gamma << 2.0;
             const auto fp = fixed_point_lambda(ch, from_bits(Bits::infinite()), d, gamma, InnerConfig{});
             return close(fp.lambda(0), 2.0 * 0.5 / 3.0, 1e-8);
         }},
        {"primal: single-user unquantized tau = sigma^2 gamma / |h^H f|^2",
         [] {
             ChannelSet ch(1, 1, 3, 0.7);
             ch.from_bs(0).col(0) << cdouble(1, 1), cdouble(0, 2), cdouble(-1, 0);
             const CVec f = ch.h(0, 0);
             RVec gamma(1);
             gamma << 4.0;
             const RMat s = build_sigma(ch, from_bits(Bits::infinite()), {f}, gamma);
             const auto beams = recover_precoders(s, {f}, 0.7, 1, 1);
             return close(beams.tau(0), 0.7 * 4.0 / std::norm(f.dot(ch.h(0, 0))), 1e-12);
         }},
        {"primal: random instance meets targets with equality",
         [] {
             std::mt19937_64 rng(11);
             auto ch = random_channels(rng, 2, 2, 4);
             ch.set_noise_variance(0.1);
             const auto q = from_bits(Bits::of(3));
             const RVec gamma = RVec::Constant(4, 1.5);
             const Solution s = solve_baseline(ch, q, gamma, InnerConfig{});
             return ((s.report.achieved_sinr.array() / gamma.array()) - 1.0).abs().maxCoeff() < 1e-6;
         }},
        {"outer: subgradient of [1, 2i] is (1, 4)",
         [] {
             CMat w(2, 1);
             w << cdouble(1, 0), cdouble(0, 2);
             const RVec g = subgradient(w);
             return g(0) == 1.0 && g(1) == 4.0;
         }},
        {"outer: projection of (3,1) and (2.5,0.1) with cap 2",
         [] {
             RVec a(2), b(2);
             a << 3.0, 1.0;
             b << 2.5, 0.1;
             const RVec pa = project_D(a, 2.0);
             const RVec pb = project_D(b, 2.0);
             return std::abs(pa(0) - 2.0) < 1e-15 && pa(1) == 0.0 && std::abs(pb(0) - 2.0) < 1e-15 && pb(1) == 0.0;
         }},
        {"outer: single-user PA matches equal-magnitude closed form",
         [] {
             std::mt19937_64 rng(5);
             auto ch = random_channels(rng, 1, 1, 8);
             ch.set_noise_variance(0.3);
             RVec gamma(1);
             gamma << 2.0;
             OuterConfig cfg;
             cfg.gap_tol = 1e-4;
             const Solution s = solve_pa(ch, from_bits(Bits::infinite()), gamma, cfg);
             const double l1 = ch.h(0, 0).cwiseAbs().sum();
             return close(s.report.max_antenna_power, 2.0 * 0.3 / (l1 * l1), 1e-3);
         }},
        {"outer: PA dominates baseline on peak power, baseline on total",
         [] {
             std::mt19937_64 rng(9);
             auto ch = random_channels(rng, 2, 2, 4);
             ch.set_noise_variance(0.1);
             const auto q = from_bits(Bits::of(3));
             const RVec gamma = RVec::Constant(4, 1.0);
             const Solution bl = solve_baseline(ch, q, gamma, InnerConfig{});
             const Solution pa = solve_pa(ch, q, gamma, OuterConfig{});
             return pa.report.max_antenna_power <= bl.report.max_antenna_power * (1 + 1e-9) &&
                    bl.report.total_power <= pa.report.total_power * (1 + 1e-9) && pa.report.duality_gap_rel < 0.01;
         }},
        {"metrics: PAPR of (4,1,1,1,1,1,1,1) is 4.64 dB",
         [] {
             const std::vector<double> p{4, 1, 1, 1, 1, 1, 1, 1};
             return std::abs(papr_db(p) - 10.0 * std::log10(4.0 / 1.375)) < 1e-12;
         }},
        {"metrics: CDF of (1,2,2,3)",
         [] {
             const std::vector<double> v{1, 2, 2, 3};
             const auto c = empirical_cdf(v);
             return c.size() == 3 && c[0].probability == 0.25 && c[1].probability == 0.75 && c[2].probability == 1.0;
         }},
        {"metrics: quantization noise two ways agree",
         [] {
             std::mt19937_64 rng(13);
             const auto ch = random_channels(rng, 2, 2, 3);
             const auto q = from_bits(Bits::of(1));
             std::vector<CVec> w;
             for (int k = 0; k < 4; ++k) w.push_back(random_cmat(rng, 3, 1).col(0));
             const RVec a = quant_noise_terms(ch, q, w);
             const RVec b = quant_noise_terms_by_precoder(ch, q, w);
             return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff();
         }},
        {"config: list of two targets parses and round-trips",
         [] {
             std::istringstream in("n_cells = 2\nn_users_per_cell = 1\nn_antennas = 4\ntarget_sinr_db = [-3, 2]\n"
                                   "bits = [2, 3, inf]\n");
             const ExperimentSpec a = parse_config(in);
             std::stringstream buf;
             write_config(buf, a);
             const ExperimentSpec b = parse_config(buf);
             return a.target_sinr_db.size() == 2 && a.bits.size() == 3 && a == b;
         }},
    };
}

}  // namespace

int run_selftest(std::ostream& out) {
    int failures = 0;
    for (const Check& c : checks()) {
        bool ok = false;
        std::string error;
        try {
            ok = c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        failures += ok ? 0 : 1;
        out << (ok ? "PASS  " : "FAIL  ") << c.name;
        if (!error.empty()) out << " (" << error << ")";
        out << "\n";
    }
    out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
    return failures;
}

}  // namespace qcomp
