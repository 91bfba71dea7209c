#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qcomp/dual.hpp"

using namespace qcomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double rel_err(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

RVec random_positive(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    RVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

const Bits kBits[] = {Bits::of(1), Bits::of(3), Bits::infinite()};

}  // namespace

TEST_CASE("K without users is the noise covariance") {
    std::mt19937_64 rng(1);
    const auto ch = oracle::random_channels(rng, 2, 2, 3);
    const RVec d = random_positive(rng, 3, 0.1, 2.0);
    const CMat k = build_K(ch, from_bits(Bits::of(2)), RVec::Zero(4), d, 1);
    CHECK(rel_err(k, CMat(d.cast<cdouble>().asDiagonal())) == 0.0);
}

TEST_CASE("scalar K") {
    ChannelSet ch(1, 1, 1, 1.0);
    ch.from_bs(0)(0, 0) = 1.0;
    CHECK_THAT(build_K(ch, from_bits(Bits::infinite()), RVec::Ones(1), RVec::Ones(1), 0)(0, 0).real(),
               WithinAbs(2.0, 1e-15));
}

TEST_CASE("K and Z match elementwise oracles") {
    std::mt19937_64 rng(2);
    for (const Bits b : kBits) {
        const auto q = from_bits(b);
        const auto ch = oracle::random_channels(rng, 3, 2, 5);
        const RVec lambda = random_positive(rng, 6, 0.1, 3.0);
        const RVec d = random_positive(rng, 5, 0.0, 2.0);
        for (std::size_t cell = 0; cell < 3; ++cell) {
            CHECK(rel_err(build_K(ch, q, lambda, d, cell), oracle::K(ch, q, lambda, d, cell)) < 1e-13);
        }
        for (std::size_t k = 0; k < 6; ++k) {
            const RVec& dk = d;
            CHECK(rel_err(build_Z(ch, q, lambda, dk, k), oracle::Z(ch, q, lambda, dk, k)) < 1e-13);
        }
    }
}

TEST_CASE("Z equals alpha K minus the user's own rank-one term") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto q = from_bits(kBits[trial % 3]);
        const auto ch = oracle::random_channels(rng, 2, 2, 4);
        const RVec lambda = random_positive(rng, 4, 0.01, 5.0);
        const RVec d = random_positive(rng, 4, 0.1, 2.0);
        for (std::size_t k = 0; k < 4; ++k) {
            const std::size_t cell = k / 2;
            const CVec h = ch.h(cell, k);
            const CMat ref = q.alpha * build_K(ch, q, lambda, d, cell) -
                             q.alpha * q.alpha * lambda(static_cast<Eigen::Index>(k)) * h * h.adjoint();
            CHECK(rel_err(build_Z(ch, q, lambda, d, k), ref) < 1e-12);
        }
    }
}

TEST_CASE("Z in the single-user and unquantized limits") {
    std::mt19937_64 rng(4);
    SECTION("single user") {
        const auto q = from_bits(Bits::of(2));
        const auto ch = oracle::random_channels(rng, 1, 1, 3);
        RVec lambda(1);
        lambda << 0.7;
        const RVec d = random_positive(rng, 3, 0.5, 1.5);
        const RVec diag = q.alpha * q.alpha * d.array() +
                          q.alpha * q.beta * (0.7 * ch.h(0, 0).cwiseAbs2().array() + d.array());
        CHECK(rel_err(build_Z(ch, q, lambda, d, 0), CMat(diag.cast<cdouble>().asDiagonal())) < 1e-14);
    }
    SECTION("beta = 0") {
        const auto q = from_bits(Bits::infinite());
        const auto ch = oracle::random_channels(rng, 2, 1, 3);
        const RVec lambda = random_positive(rng, 2, 0.5, 1.5);
        const RVec d = random_positive(rng, 3, 0.5, 1.5);
        const CVec h = ch.h(0, 1);
        const CMat ref = lambda(1) * h * h.adjoint() + CMat(d.cast<cdouble>().asDiagonal());
        CHECK(rel_err(build_Z(ch, q, lambda, d, 0), ref) < 1e-14);
    }
}

TEST_CASE("K is Hermitian positive definite") {
    std::mt19937_64 rng(5);
    const auto q = from_bits(Bits::of(3));
    const auto ch = oracle::random_channels(rng, 2, 2, 6);
    const CMat k = build_K(ch, q, random_positive(rng, 4, 0.1, 1.0), random_positive(rng, 6, 0.1, 1.0), 0);
    CHECK((k - k.adjoint()).norm() == 0.0);
    CHECK(Eigen::LLT<CMat>(k).info() == Eigen::Success);
}

TEST_CASE("MMSE combiner examples") {
    std::mt19937_64 rng(6);
    const CVec h = oracle::random_cvec(rng, 4);
    CHECK((mmse_combiner(CMat::Identity(4, 4), h) - h).norm() < 1e-15);
    CHECK((mmse_combiner(2.0 * CMat::Identity(4, 4), h) - h / 2.0).norm() < 1e-15);
}

TEST_CASE("MMSE combiner beats random directions") {
    std::mt19937_64 rng(7);
    const auto q = from_bits(Bits::of(2));
    const CMat a = oracle::random_cmat(rng, 5, 5);
    const CMat z = a * a.adjoint() + 0.1 * CMat::Identity(5, 5);
    const CVec h = oracle::random_cvec(rng, 5);
    const CVec f = mmse_combiner(z, h);
    const double best = ul_sinr(1.0, f, z, h, q);
    CHECK_THAT(best, WithinRel(q.alpha * q.alpha * h.dot(z.llt().solve(h)).real(), 1e-12));
    for (int i = 0; i < 100; ++i) {
        CVec u = oracle::random_cvec(rng, 5);
        u.normalize();
        CHECK(ul_sinr(1.0, u, z, h, q) <= best * (1 + 1e-12));
    }
}

TEST_CASE("indefinite Z is reported with the user") {
    CMat z = CMat::Identity(2, 2);
    z(1, 1) = -1.0;
    CHECK_THROWS_AS(mmse_combiner(z, CVec::Ones(2), UserIndex{1, 0}), NumericalError);
    CHECK_THROWS_WITH(mmse_combiner(z, CVec::Ones(2), UserIndex{1, 0}), Catch::Matchers::ContainsSubstring("cell 1"));
}

TEST_CASE("UL SINR of a silent user is zero") {
    CHECK(ul_sinr(0.0, CVec::Ones(2), CMat::Identity(2, 2), CVec::Ones(2), from_bits(Bits::of(3))) == 0.0);
}

TEST_CASE("scalar fixed point lambda = gamma d / g") {
    ChannelSet ch(1, 1, 1, 1.0);
    const double g = 2.5, d = 0.4, gamma = 3.0;
    ch.from_bs(0)(0, 0) = std::sqrt(g);
    const auto fp = fixed_point_lambda(ch, from_bits(Bits::infinite()), RVec::Constant(1, d),
                                       RVec::Constant(1, gamma), InnerConfig{});
    CHECK(fp.converged);
    CHECK_THAT(fp.lambda(0), WithinRel(gamma * d / g, 1e-8));
}

TEST_CASE("vanishing targets give vanishing powers") {
    std::mt19937_64 rng(8);
    const auto ch = oracle::random_channels(rng, 2, 2, 4);
    const auto q = from_bits(Bits::of(3));
    double prev = INFINITY;
    for (double gamma : {1.0, 1e-2, 1e-4, 1e-6}) {
        const auto fp = fixed_point_lambda(ch, q, RVec::Ones(8), RVec::Constant(4, gamma), InnerConfig{});
        CHECK(fp.lambda.maxCoeff() < prev);
        prev = fp.lambda.maxCoeff();
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("two-user fixed point matches a bisection oracle") {
    // Two single-antenna cells, beta = 0: the balance equations
    //   lambda_1 g_11 = gamma (lambda_2 g_12 + d_1),  lambda_2 g_22 = gamma (lambda_1 g_21 + d_2)
    // with g_ij the gain from user j to BS i. Bisect on lambda_1 after
    // eliminating lambda_2.
    ChannelSet ch(2, 1, 1, 1.0);
    const double g11 = 1.0, g12 = 0.2, g21 = 0.3, g22 = 0.8, d1 = 0.7, d2 = 1.3, gamma = 1.5;
    ch.from_bs(0)(0, 0) = std::sqrt(g11);
    ch.from_bs(0)(0, 1) = cdouble(0.0, std::sqrt(g12));
    ch.from_bs(1)(0, 0) = std::sqrt(g21);
    ch.from_bs(1)(0, 1) = std::sqrt(g22);
    RVec d(2);
    d << d1, d2;

    auto residual = [&](double l1) {
        const double l2 = gamma * (l1 * g21 + d2) / g22;
        return l1 * g11 - gamma * (l2 * g12 + d1);
    };
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    const double l1 = 0.5 * (lo + hi);
    const double l2 = gamma * (l1 * g21 + d2) / g22;

    const auto fp = fixed_point_lambda(ch, from_bits(Bits::infinite()), d, RVec::Constant(2, gamma), InnerConfig{});
    CHECK_THAT(fp.lambda(0), WithinRel(l1, 1e-7));
    CHECK_THAT(fp.lambda(1), WithinRel(l2, 1e-7));
}

TEST_CASE("fixed-point iterates increase monotonically from a small start") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto q = from_bits(kBits[trial % 3]);
        const auto ch = oracle::random_channels(rng, 2, 2, 4);
        std::vector<RVec> trace;
        InnerConfig cfg;
        cfg.lambda_init = 1e-9;
        fixed_point_lambda(ch, q, random_positive(rng, 8, 0.2, 1.8), RVec::Constant(4, 1.0), cfg, nullptr, &trace);
        REQUIRE(trace.size() > 2);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK((trace[i] - trace[i - 1]).minCoeff() >= -1e-12 * trace[i].maxCoeff());
        }
    }
}

TEST_CASE("converged uplink SINRs equal their targets") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 15; ++trial) {
        const auto q = from_bits(kBits[trial % 3]);
        const auto ch = oracle::random_channels(rng, 3, 2, 6);
        const RVec noise = random_positive(rng, 18, 0.2, 1.8);
        const RVec gamma = random_positive(rng, 6, 0.3, 1.0);
        InnerConfig cfg;
        const DualState s = solve_dual(ch, q, noise, gamma, cfg);
        REQUIRE(s.converged);
        for (std::size_t k = 0; k < 6; ++k) {
            const std::size_t cell = k / 2;
            const CMat z = build_Z(ch, q, s.lambda, s.cell_noise(cell, 6), k);
            const double sinr = ul_sinr(s.lambda(static_cast<Eigen::Index>(k)), s.combiner[k], z, ch.h(cell, k), q);
            CHECK_THAT(sinr, WithinRel(gamma(static_cast<Eigen::Index>(k)), 10 * cfg.tol));
        }
    }
}

TEST_CASE("warm start reaches the same fixed point") {
    std::mt19937_64 rng(11);
    const auto q = from_bits(Bits::of(3));
    const auto ch = oracle::random_channels(rng, 2, 2, 4);
    const RVec gamma = RVec::Constant(4, 1.2);
    const auto cold = fixed_point_lambda(ch, q, RVec::Ones(8), gamma, InnerConfig{});
    const RVec warm_start = 3.0 * cold.lambda;
    const auto warm = fixed_point_lambda(ch, q, RVec::Ones(8), gamma, InnerConfig{}, &warm_start);
    CHECK((warm.lambda - cold.lambda).cwiseAbs().maxCoeff() <= 1e-7 * cold.lambda.maxCoeff());
}

TEST_CASE("infeasible targets raise a typed error carrying lambda") {
    // Two users on one single-antenna BS cannot both reach 3 dB.
    ChannelSet ch(1, 2, 1, 1.0);
    ch.from_bs(0)(0, 0) = 1.0;
    ch.from_bs(0)(0, 1) = 1.0;
    try {
        fixed_point_lambda(ch, from_bits(Bits::infinite()), RVec::Ones(1), RVec::Constant(2, 2.0), InnerConfig{});
        FAIL("expected InfeasibleTargetError");
    } catch (const InfeasibleTargetError& e) {
        CHECK(e.lambda.size() == 2);
        CHECK(e.lambda.allFinite());
    }
}

TEST_CASE("iteration limit is reported, not thrown") {
    std::mt19937_64 rng(12);
    const auto ch = oracle::random_channels(rng, 2, 2, 4);
    InnerConfig cfg;
    cfg.max_iter = 2;
    const auto fp = fixed_point_lambda(ch, from_bits(Bits::of(3)), RVec::Ones(8), RVec::Constant(4, 1.0), cfg);
    CHECK_FALSE(fp.converged);
    CHECK(fp.iterations == 2);
    CHECK(fp.residual > cfg.tol);
}

TEST_CASE("dual objective is sum lambda sigma^2") {
    RVec l(3);
    l << 1.0, 2.0, 0.5;
    CHECK_THAT(dual_objective(l, 0.2), WithinRel(0.7, 1e-15));
}
