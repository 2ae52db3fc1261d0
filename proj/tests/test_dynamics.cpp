#include <random>

#include "doctest.h"
#include "hetcycle/dynamics.hpp"
#include "hetcycle/numerics.hpp"

using namespace hetcycle;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 r(2024);
    return r;
}

double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

PhaseState random_state(int M, int N) {
    std::vector<double> th(static_cast<std::size_t>(M * N));
    for (auto& v : th) v = uni(0.0, kTwoPi);
    return PhaseState(M, N, th);
}

ModelParams random_params(int M) {
    return ModelParams::builtin(M, uni(0.3 * kPi, 0.7 * kPi), uni(0.01, 0.5), uni(-0.1, 0.1),
                                M == 4 ? uni(-0.1, 0.1) : 0.0);
}

}  // namespace

TEST_CASE("coupling function g") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    CHECK(g(0.0, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(kPi, p) == doctest::Approx(-1.0).epsilon(1e-14));
    ModelParams q = p;
    q.r = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = uni(-10, 10);
        CHECK(g(t, q) == doctest::Approx(std::sin(t + q.alpha)).epsilon(1e-14));
    }
    const double h = 1e-6, t = 0.7;
    CHECK(g_prime(t, p) == doctest::Approx((g(t + h, p) - g(t - h, p)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("nonpairwise interaction g4") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    const std::vector<double> sync{0.4, 0.4}, splay{0.0, kPi};
    CHECK(g4(sync, 0.0, p) == doctest::Approx(-0.5 * std::cos(kPi / 2)));
    CHECK(std::abs(g4(sync, 0.0, p)) < 1e-15);
    for (int i = 0; i < 10; ++i) {
        const double t = uni(0, kTwoPi);
        CHECK(g4(splay, t, p) == doctest::Approx(-0.5 * std::sin(t)).epsilon(1e-12));
    }
    CHECK(g4(splay, kPi / 2, p) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(g4(splay, kPi, p)) < 1e-15);
}

TEST_CASE("pairwise-approximation coupling g2") {
    const ModelParams p3 = ModelParams::builtin(3, 1.1, 0.3, 0.05);
    for (int i = 0; i < 20; ++i) {
        const double t = uni(0, kTwoPi);
        for (int s = 0; s < 3; ++s) CHECK(g2(t, s, p3) == doctest::Approx(g(t, p3)).epsilon(1e-14));
    }
    const ModelParams p4 = ModelParams::builtin(4, kPi / 2, 0.2, 0.01);
    CHECK(g2(0.0, 0, p4) == doctest::Approx(1.0).epsilon(1e-14));
    const ModelParams q = ModelParams::builtin(4, 0.4 * kPi, 0.2, 0.0);
    CHECK(g2(0.0, 1, q) == doctest::Approx(std::sin(0.4 * kPi) + 0.2 * 0.5 * (-1.0) * std::cos(0.4 * kPi)));
}

TEST_CASE("order parameter") {
    const std::vector<double> same{1.3, 1.3}, splay{0.0, kPi}, quarter{0.0, kPi / 2};
    CHECK(std::abs(order_parameter(same)) == doctest::Approx(1.0));
    CHECK(std::abs(order_parameter(splay)) < 1e-15);
    CHECK(std::abs(order_parameter(quarter)) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(order_parameter_sq(quarter) == doctest::Approx(0.5));
    const std::vector<double> three{0.1, 1.0, 2.5};
    CHECK(order_parameter_sq(three) == doctest::Approx(std::norm(order_parameter(three))));
}

TEST_CASE("full phase-shift field") {
    ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    p.omega = 0.3;
    const auto v = rhs_full(PhaseState(3, 2, {0.1, 0.1, 2.0, 2.0, 4.0, 4.0}), p);
    for (double x : v) CHECK(x == doctest::Approx(p.omega + g(0.0, p)));

    ModelParams k0 = p;
    k0.K = 0.0;
    const PhaseState th = random_state(3, 2);
    const auto full = rhs_full(th, k0);
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < 2; ++k) {
            const double other = th.at(s, 1 - k) - th.at(s, k);
            CHECK(full[static_cast<std::size_t>(2 * s + k)] == doctest::Approx(k0.omega + g(other, k0)).epsilon(1e-13));
        }

    // DSS: R^2 = (0, 1, 1); the phase shift of each population is K * sum_t K_st (1 - R_t^2).
    const auto dss = rhs_full(lift(equilibrium_state(Word("DSS")), std::vector<double>{0, 0, 0}), p);
    const double shift[3] = {0.0, 0.2 * 1.0, 0.2 * -1.0};
    CHECK(dss[0] == doctest::Approx(p.omega + g(kPi + shift[0], p)));
    CHECK(dss[2] == doctest::Approx(p.omega + g(0.0 + shift[1], p)));
    CHECK(dss[4] == doctest::Approx(p.omega + g(0.0 + shift[2], p)));
}

TEST_CASE("nonpairwise field velocities at equilibria") {
    ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    p.omega = 0.25;
    const auto v = rhs_nonpairwise(lift(equilibrium_state(Word("DSS")), std::vector<double>{0, 0, 0}), p);
    const double expect3[3] = {-1, 1, 1};
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < 2; ++k) CHECK(v[static_cast<std::size_t>(2 * s + k)] == doctest::Approx(p.omega + expect3[s]));
    ModelParams p4 = ModelParams::builtin(4, kPi / 2, 0.2, 0.01);
    p4.omega = 0.25;
    const auto w = rhs_nonpairwise(lift(equilibrium_state(Word("SDSS")), std::vector<double>{0, 0, 0, 0}), p4);
    const double expect4[4] = {1, -1, 1, 1};
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < 2; ++k) CHECK(w[static_cast<std::size_t>(2 * s + k)] == doctest::Approx(p4.omega + expect4[s]));
}

TEST_CASE("reduced field") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    for (const Word& w : Word::all(3)) {
        const auto v = rhs_reduced(equilibrium_state(w), p);
        for (double x : v) CHECK(std::abs(x) < 1e-12);
    }
    const ReducedState x(3, 2, {kPi + 0.01, 0.0, 0.0});
    const auto v = rhs_reduced(x, p);
    CHECK(v[0] == doctest::Approx(-0.04 * 0.01).epsilon(1e-3));

    // Lift independence.
    const ReducedState y(3, 2, {0.4, 2.1, 5.0});
    const auto ref = rhs_reduced(y, p);
    const ReducedField f(p, FieldKind::NonpairwiseApprox);
    for (int it = 0; it < 10; ++it) {
        const std::vector<double> base{uni(0, kTwoPi), uni(0, kTwoPi), uni(0, kTwoPi)};
        const auto th = lift(y, base);
        const auto full = rhs_nonpairwise(th, p);
        for (int s = 0; s < 3; ++s)
            CHECK(full[static_cast<std::size_t>(2 * s + 1)] - full[static_cast<std::size_t>(2 * s)] ==
                  doctest::Approx(ref[static_cast<std::size_t>(s)]).epsilon(1e-12));
    }
}

TEST_CASE("explicit N = 2 reduced field agrees with the lifted field") {
    for (FieldKind kind : {FieldKind::NonpairwiseApprox, FieldKind::FullPhaseShift})
        for (int M : {3, 4})
            for (int it = 0; it < 20; ++it) {
                const ModelParams p = random_params(M);
                const ReducedField slow(p, kind);
                const ReducedFieldN2 fast(p, kind);
                std::vector<double> x(static_cast<std::size_t>(M)), a(x.size()), b(x.size());
                for (auto& v : x) v = uni(0, kTwoPi);
                slow(x, a);
                fast(x, b);
                for (std::size_t i = 0; i < x.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
            }
    ModelParams n3 = ModelParams::builtin(3, 1.0, 0.2, 0.01);
    n3.N = 3;
    CHECK_THROWS_AS(ReducedFieldN2(n3, FieldKind::NonpairwiseApprox), UnsupportedError);
}

TEST_CASE("S D psi3 psi4 subspace") {
    const ModelParams p = ModelParams::builtin(4, kPi / 2, 0.2, 0.01);
    auto v = rhs_sd_subspace(0.0, 0.0, p);
    CHECK(std::abs(v[0]) < 1e-15);
    CHECK(std::abs(v[1]) < 1e-15);
    v = rhs_sd_subspace(kPi / 2, kPi, p);
    CHECK(std::abs(v[0]) < 1e-12);
    CHECK(std::abs(v[1]) < 1e-12);
    for (int i = 0; i < 10; ++i) {
        const double psi = uni(0, kTwoPi);
        const auto d = rhs_sd_subspace(psi, psi, p);
        const double expect = std::sin(psi) * ((p.K - 4 * p.r) * std::cos(psi) + p.K);
        CHECK(d[0] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(d[1] == doctest::Approx(expect).epsilon(1e-12));
    }
    // Explicit form against the reduced field at alpha = pi/2 with delta != 0.
    const ModelParams q = ModelParams::builtin(4, kPi / 2, 0.2, 0.01, 0.07);
    for (int i = 0; i < 20; ++i) {
        const double a = uni(0, kTwoPi), b = uni(0, kTwoPi);
        const auto e = rhs_sd_subspace(a, b, q);
        const auto r = rhs_reduced(ReducedState(4, 2, {0.0, kPi, a, b}), q);
        CHECK(e[0] == doctest::Approx(r[2]).epsilon(1e-12));
        CHECK(e[1] == doctest::Approx(r[3]).epsilon(1e-12));
        CHECK(std::abs(r[0]) < 1e-12);
        CHECK(std::abs(r[1]) < 1e-12);
    }
}

TEST_CASE("equivariance of the nonpairwise field") {
    for (int M : {3, 4})
        for (int it = 0; it < 10; ++it) {
            const ModelParams p = random_params(M);
            const PhaseState th = random_state(M, 2);
            const auto ref = rhs_nonpairwise(th, p);
            const int s = it % M;

            PhaseState swapped = th;
            std::swap(swapped.theta[static_cast<std::size_t>(2 * s)], swapped.theta[static_cast<std::size_t>(2 * s + 1)]);
            auto v = rhs_nonpairwise(swapped, p);
            std::swap(v[static_cast<std::size_t>(2 * s)], v[static_cast<std::size_t>(2 * s + 1)]);
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(ref[i]).epsilon(1e-12));

            PhaseState shifted = th;
            const double c = uni(0, kTwoPi);
            shifted.theta[static_cast<std::size_t>(2 * s)] += c;
            shifted.theta[static_cast<std::size_t>(2 * s + 1)] += c;
            v = rhs_nonpairwise(shifted, p);
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
}

TEST_CASE("population symmetries") {
    // M = 3: the cyclic permutation 1 -> 2 -> 3.
    for (int it = 0; it < 10; ++it) {
        const ModelParams p = random_params(3);
        const PhaseState th = random_state(3, 2);
        const auto ref = rhs_nonpairwise(th, p);
        PhaseState perm = th;
        for (int s = 0; s < 3; ++s)
            for (int k = 0; k < 2; ++k)
                perm.theta[static_cast<std::size_t>(2 * ((s + 1) % 3) + k)] = th.theta[static_cast<std::size_t>(2 * s + k)];
        const auto v = rhs_nonpairwise(perm, p);
        for (int s = 0; s < 3; ++s)
            for (int k = 0; k < 2; ++k)
                CHECK(v[static_cast<std::size_t>(2 * ((s + 1) % 3) + k)] ==
                      doctest::Approx(ref[static_cast<std::size_t>(2 * s + k)]).epsilon(1e-12));
    }
    // M = 4: swapping populations 3 and 4 together with delta -> -delta.
    for (int it = 0; it < 10; ++it) {
        const ModelParams p = random_params(4);
        const ModelParams q = p.with_delta(-p.delta);
        const PhaseState th = random_state(4, 2);
        PhaseState sw = th;
        for (int k = 0; k < 2; ++k) std::swap(sw.theta[static_cast<std::size_t>(4 + k)], sw.theta[static_cast<std::size_t>(6 + k)]);
        const auto ref = rhs_nonpairwise(th, p);
        auto v = rhs_nonpairwise(sw, q);
        for (int k = 0; k < 2; ++k) std::swap(v[static_cast<std::size_t>(4 + k)], v[static_cast<std::size_t>(6 + k)]);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        if (it == 0) {
            const ModelParams z = p.with_delta(0.0);
            auto u = rhs_nonpairwise(sw, z);
            for (int k = 0; k < 2; ++k) std::swap(u[static_cast<std::size_t>(4 + k)], u[static_cast<std::size_t>(6 + k)]);
            const auto r0 = rhs_nonpairwise(th, z);
            for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(r0[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("full and nonpairwise fields differ at second order") {
    for (int it = 0; it < 5; ++it) {
        const PhaseState th = random_state(3, 2);
        const double alpha = uni(0.3 * kPi, 0.7 * kPi);
        double prev = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double K = 0.2 / std::pow(2.0, j);
            const ModelParams p = ModelParams::builtin(3, alpha, K, K);
            const auto a = rhs_full(th, p), b = rhs_nonpairwise(th, p);
            double d = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
            if (j > 0) CHECK(d <= prev / 3.5);
            prev = d;
        }
    }
}
