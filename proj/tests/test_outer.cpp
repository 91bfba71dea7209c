#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qcomp/outer.hpp"

using namespace qcomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("subgradient examples") {
    CMat w(2, 1);
    w << cdouble(1, 0), cdouble(0, 2);
    const RVec g = subgradient(w);
    CHECK(g(0) == 1.0);
    CHECK(g(1) == 4.0);
    CHECK(subgradient(CMat::Zero(3, 2)).isZero());
}

TEST_CASE("subgradient is the diagonal of W W^H") {
    std::mt19937_64 rng(1);
    const CMat w = oracle::random_cmat(rng, 6, 3);
    const RVec ref = (w * w.adjoint()).diagonal().real();
    CHECK((subgradient(w) - ref).cwiseAbs().maxCoeff() <= 1e-14 * ref.maxCoeff());
}

TEST_CASE("projection worked examples") {
    RVec a(2), b(2), c(3);
    a << 3.0, 1.0;
    b << 2.5, 0.1;
    c << 0.5, 0.2, 0.3;
    const RVec pa = project_D(a, 2.0);
    CHECK_THAT(pa(0), WithinAbs(2.0, 1e-15));
    CHECK(pa(1) == 0.0);
    const RVec pb = project_D(b, 2.0);
    CHECK_THAT(pb(0), WithinAbs(2.0, 1e-15));
    CHECK(pb(1) == 0.0);
    CHECK(project_D(c, 3.0) == c);
}

TEST_CASE("projection of 2-vectors matches a grid search") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 4.0);
    for (int trial = 0; trial < 40; ++trial) {
        RVec d(2);
        d << u(rng), u(rng);
        const RVec p = project_D(d, 2.0);
        const RVec grid = oracle::project_grid_2d(d, 2.0);
        INFO("d = " << d.transpose());
        CHECK((p - grid).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("projection on 10^4 random vectors: feasible, idempotent, equal to bisection") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 40);
    std::normal_distribution<double> n(0.5, 2.0);
    std::uniform_real_distribution<double> cap_dist(0.1, 20.0);
    int failures = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int len = dim(rng);
        RVec d(len);
        for (int i = 0; i < len; ++i) d(i) = n(rng);
        const double cap = cap_dist(rng);
        const RVec p = project_D(d, cap);
        const RVec ref = oracle::project_bisect(d, cap);
        const bool ok = p.minCoeff() >= 0.0 && p.sum() <= cap * (1 + 1e-12) &&
                        (project_D(p, cap) - p).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, cap) &&
                        (p - ref).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, cap);
        failures += ok ? 0 : 1;
    }
    CHECK(failures == 0);
}

TEST_CASE("floored projection keeps the floor and the cap") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(1.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        RVec d(8);
        for (int i = 0; i < 8; ++i) d(i) = n(rng);
        const RVec p = project_D(d, 8.0, 1e-3);
        CHECK(p.minCoeff() >= 1e-3 - 1e-15);
        CHECK(p.sum() <= 8.0 + 1e-12);
    }
}

TEST_CASE("network and per-cell scopes cap the right sums") {
    RVec d(4);
    d << 5.0, 1.0, 0.5, 0.5;
    const RVec net = project_noise(d, 2, 2, TraceScope::Network, 0.0);
    CHECK_THAT(net.sum(), WithinAbs(4.0, 1e-12));
    const RVec cell = project_noise(d, 2, 2, TraceScope::PerCell, 0.0);
    CHECK_THAT(cell.head(2).sum(), WithinAbs(2.0, 1e-12));
    CHECK(cell.tail(2) == d.tail(2));
}

TEST_CASE("closed form for one user matches a grid search at two antennas") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const CVec h = oracle::random_cvec(rng, 2);
        const double closed = 1.7 / std::pow(h.cwiseAbs().sum(), 2);
        CHECK_THAT(oracle::single_user_minimax_grid_2(h, 1.7), WithinRel(closed, 1e-6));
    }
}

TEST_CASE("single-user PA reaches the equal-magnitude closed form") {
    std::mt19937_64 rng(6);
    for (const std::size_t nb : {2u, 4u, 8u, 32u}) {
        for (int trial = 0; trial < 5; ++trial) {
            ChannelSet ch(1, 1, nb, 0.2);
            ch.from_bs(0) = oracle::random_cmat(rng, static_cast<Eigen::Index>(nb), 1);
            const double gamma = 2.0;
            OuterConfig cfg;
            cfg.gap_tol = 1e-4;
            const Solution s = solve_pa(ch, from_bits(Bits::infinite()), RVec::Constant(1, gamma), cfg);
            const CVec h = ch.h(0, 0);
            const double p = gamma * 0.2 / std::pow(h.cwiseAbs().sum(), 2);
            CHECK(s.report.converged);
            CHECK_THAT(s.report.max_antenna_power, WithinRel(p, 1e-3));
            // w_m = sqrt(p) exp(j arg h_m) up to a common phase
            const CVec w = s.beams.precoder[0];
            const cdouble common = std::polar(1.0, std::arg(w(0)) - std::arg(h(0)));
            for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(nb); ++m) {
                CHECK(std::abs(w(m) - std::sqrt(p) * std::polar(1.0, std::arg(h(m))) * common) < 0.05 * std::sqrt(p));
            }
        }
    }
}

TEST_CASE("baseline single user: matched filter and total power gamma sigma^2 / |h|^2") {
    std::mt19937_64 rng(7);
    ChannelSet ch(1, 1, 5, 0.3);
    ch.from_bs(0) = oracle::random_cmat(rng, 5, 1);
    const Solution s = solve_baseline(ch, from_bits(Bits::infinite()), RVec::Constant(1, 2.0), InnerConfig{});
    const CVec h = ch.h(0, 0);
    CHECK_THAT(s.report.total_power, WithinRel(2.0 * 0.3 / h.squaredNorm(), 1e-9));
    const CVec dir = s.beams.precoder[0] / s.beams.precoder[0].norm();
    CHECK_THAT(std::abs(dir.dot(h)) / h.norm(), WithinRel(1.0, 1e-12));
}

TEST_CASE("PA and baseline each win their own objective; gap closes") {
    std::mt19937_64 rng(8);
    for (const auto ascent : {AscentRule::Multiplicative, AscentRule::Euclidean}) {
        for (int trial = 0; trial < 6; ++trial) {
            const auto q = from_bits(trial % 2 ? Bits::of(3) : Bits::infinite());
            const auto ch = oracle::random_channels(rng, 2, 2, 4, 0.05);
            const RVec gamma = RVec::Constant(4, 1.0);
            OuterConfig cfg;
            cfg.ascent = ascent;
            cfg.trace_scope = TraceScope::Network;
            const Solution bl = solve_baseline(ch, q, gamma, cfg.inner);
            const Solution pa = solve_pa(ch, q, gamma, cfg);
            CHECK(pa.report.max_antenna_power <= bl.report.max_antenna_power * (1 + 1e-9));
            CHECK(bl.report.total_power <= pa.report.total_power * (1 + 1e-9));
            if (ascent == AscentRule::Multiplicative) {
                CHECK(pa.stop == StopReason::GapClosed);
                CHECK(pa.report.duality_gap_rel <= 0.01);
            }
        }
    }
}

TEST_CASE("best dual trace never decreases and starts at the baseline") {
    std::mt19937_64 rng(9);
    const auto q = from_bits(Bits::of(2));
    const auto ch = oracle::random_channels(rng, 2, 2, 4, 0.05);
    const RVec gamma = RVec::Constant(4, 1.0);
    const Solution bl = solve_baseline(ch, q, gamma, InnerConfig{});
    OuterConfig cfg;
    cfg.max_outer_iters = 60;
    cfg.gap_tol = 0.0;
    cfg.stall_iters = 0;
    const Solution pa = solve_pa(ch, q, gamma, cfg);
    const auto& trace = pa.report.best_dual_trace;
    REQUIRE(trace.size() == 60);
    CHECK_THAT(trace.front(), WithinRel(bl.report.dual_objective, 1e-12));
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
    CHECK(pa.report.dual_objective == trace.back());
}

TEST_CASE("duality gap closes with a certified bound on the best dual") {
    std::mt19937_64 rng(10);
    const auto q = from_bits(Bits::of(3));
    const auto ch = oracle::random_channels(rng, 3, 2, 6, 0.05);
    const RVec gamma = RVec::Constant(6, 1.5);
    const Solution pa = solve_pa(ch, q, gamma, OuterConfig{});
    REQUIRE(pa.report.converged);
    // weak duality: the dual never exceeds N_c N_b p0 of any feasible precoder set
    CHECK(pa.report.dual_objective <= 18.0 * pa.report.max_antenna_power * (1 + 1e-9));
    CHECK(pa.certified_gap_rel <= 1e-3);
    CHECK_THAT(pa.best_noise.sum(), WithinRel(18.0, 1e-9));
}

TEST_CASE("Euclidean iterates stay feasible") {
    std::mt19937_64 rng(11);
    const auto ch = oracle::random_channels(rng, 2, 1, 4, 0.05);
    OuterConfig cfg;
    cfg.ascent = AscentRule::Euclidean;
    cfg.trace_scope = TraceScope::PerCell;
    cfg.max_outer_iters = 40;
    cfg.gap_tol = 0.0;
    cfg.stall_iters = 0;
    const Solution pa = solve_pa(ch, from_bits(Bits::of(3)), RVec::Constant(2, 1.0), cfg);
    const RVec& d = pa.best_noise;
    CHECK(d.minCoeff() >= 0.0);
    CHECK(d.head(4).sum() <= 4.0 + 1e-9);
    CHECK(d.tail(4).sum() <= 4.0 + 1e-9);
}

TEST_CASE("higher targets need more peak power") {
    std::mt19937_64 rng(12);
    const auto q = from_bits(Bits::of(3));
    const auto ch = oracle::random_channels(rng, 2, 2, 4, 0.05);
    double prev = 0.0;
    for (double db : {-3.0, 0.0, 3.0, 6.0}) {
        const Solution pa = solve_pa(ch, q, RVec::Constant(4, db_to_linear(db)), OuterConfig{});
        CHECK(pa.report.max_antenna_power > prev);
        prev = pa.report.max_antenna_power;
    }
}

TEST_CASE("complementary slackness: the trace budget is used up") {
    std::mt19937_64 rng(13);
    const auto ch = oracle::random_channels(rng, 2, 2, 4, 0.05);
    OuterConfig cfg;
    cfg.trace_scope = TraceScope::PerCell;
    cfg.max_outer_iters = 200;
    const Solution pa = solve_pa(ch, from_bits(Bits::of(3)), RVec::Constant(4, 1.0), cfg);
    CHECK_THAT(pa.best_noise.head(4).sum(), WithinAbs(4.0, 1e-6));
    CHECK_THAT(pa.best_noise.tail(4).sum(), WithinAbs(4.0, 1e-6));
}
