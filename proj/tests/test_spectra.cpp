#include <random>

#include "doctest.h"
#include "hetcycle/dynamics.hpp"
#include "hetcycle/numerics.hpp"
#include "hetcycle/spectra.hpp"

using namespace hetcycle;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 r(99);
    return r;
}
double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

// Tabulated eigenvalues, written out independently of the library.
std::vector<double> table_dss(double al, double K, double r) {
    const double c = std::cos(al), s = std::sin(al), c2 = std::cos(2 * al);
    return {2 * c + 4 * r * c2, 2 * K * s - 2 * c + 4 * r * c2, -2 * K * s - 2 * c + 4 * r * c2};
}
std::vector<double> table_dds(double al, double K, double r) {
    const double c = std::cos(al), s = std::sin(al), c2 = std::cos(2 * al);
    return {2 * K * s + 2 * c + 4 * r * c2, -2 * K * s + 2 * c + 4 * r * c2, -2 * c + 4 * r * c2};
}
std::vector<double> table_sdss(double al, double K, double r, double d) {
    const double c = std::cos(al), s = std::sin(al), c2 = std::cos(2 * al);
    return {-2 * K * s - 2 * c + 4 * r * c2, 2 * c + 4 * r * c2, 2 * K * (1 + d) * s - 2 * c + 4 * r * c2,
            2 * K * (1 - d) * s - 2 * c + 4 * r * c2};
}

}  // namespace

TEST_CASE("closed-form spectra at the tabulated words") {
    const auto dss = eigenvalues_closed_form(Word("DSS"), ModelParams::builtin(3, kPi / 2, 0.2, 0.01));
    CHECK(dss[0] == doctest::Approx(-0.04).epsilon(1e-13));
    CHECK(dss[1] == doctest::Approx(0.36).epsilon(1e-13));
    CHECK(dss[2] == doctest::Approx(-0.44).epsilon(1e-13));
    const auto sdss = eigenvalues_closed_form(Word("SDSS"), ModelParams::builtin(4, kPi / 2, 0.2, 0.01));
    const double expect[4] = {-0.44, -0.04, 0.36, 0.36};
    for (int i = 0; i < 4; ++i) CHECK(sdss[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]).epsilon(1e-13));

    for (int it = 0; it < 50; ++it) {
        const double al = uni(0, kTwoPi), K = uni(0, 1), r = uni(-0.3, 0.3), d = uni(-0.2, 0.2);
        const ModelParams p3 = ModelParams::builtin(3, al, K, r);
        const ModelParams p4 = ModelParams::builtin(4, al, K, r, d);
        const auto a = eigenvalues_closed_form(Word("DSS"), p3), ta = table_dss(al, K, r);
        const auto b = eigenvalues_closed_form(Word("DDS"), p3), tb = table_dds(al, K, r);
        const auto c = eigenvalues_closed_form(Word("SDSS"), p4), tc = table_sdss(al, K, r, d);
        for (int i = 0; i < 3; ++i) {
            CHECK(a[static_cast<std::size_t>(i)] == doctest::Approx(ta[static_cast<std::size_t>(i)]).epsilon(1e-12));
            CHECK(b[static_cast<std::size_t>(i)] == doctest::Approx(tb[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
        for (int i = 0; i < 4; ++i)
            CHECK(c[static_cast<std::size_t>(i)] == doctest::Approx(tc[static_cast<std::size_t>(i)]).epsilon(1e-12));
        const double quad = 4 * r * std::cos(2 * al) - 2 * std::cos(al);
        for (double v : eigenvalues_closed_form(Word("SSSS"), p4)) CHECK(v == doctest::Approx(quad).epsilon(1e-12));
    }
}

TEST_CASE("closed-form spectra match finite-difference Jacobians at every word") {
    for (FieldKind kind : {FieldKind::NonpairwiseApprox, FieldKind::FullPhaseShift})
        for (int M : {3, 4})
            for (int it = 0; it < 5; ++it) {
                const ModelParams p = ModelParams::builtin(M, uni(0.4 * kPi, 0.6 * kPi), uni(0.01, 0.5), uni(-0.1, 0.1),
                                                           M == 4 ? uni(-0.1, 0.1) : 0.0);
                const ReducedFieldN2 f(p, kind);
                for (const Word& w : Word::all(M)) {
                    const Eigen::MatrixXd J = jacobian_fd(f, w.point());
                    const auto closed = eigenvalues_closed_form(w, p, kind);
                    for (int i = 0; i < M; ++i) {
                        CHECK(J(i, i) == doctest::Approx(closed[static_cast<std::size_t>(i)]).epsilon(1e-6));
                        for (int j = 0; j < M; ++j)
                            if (j != i) CHECK(std::abs(J(i, j)) < 1e-7);
                    }
                }
            }
}

TEST_CASE("cyclic relabelling of M = 3 spectra") {
    for (int it = 0; it < 20; ++it) {
        const ModelParams p = ModelParams::builtin(3, uni(0, kTwoPi), uni(0, 1), uni(-0.3, 0.3));
        const auto a = eigenvalues_closed_form(Word("DSS"), p), b = eigenvalues_closed_form(Word("SDS"), p);
        for (int s = 0; s < 3; ++s)
            CHECK(b[static_cast<std::size_t>((s + 1) % 3)] == doctest::Approx(a[static_cast<std::size_t>(s)]).epsilon(1e-12));
    }
}

TEST_CASE("saddle data") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    const SaddleData s = saddle_data(cycle_c2(), 0, p);
    CHECK(s.word == Word("DSS"));
    CHECK(s.c == doctest::Approx(0.44));
    CHECK(s.e == doctest::Approx(0.36));
    CHECK(s.t == doctest::Approx(-0.04));
    CHECK(s.a() == doctest::Approx(11.0 / 9).epsilon(1e-13));
    CHECK(s.b() == doctest::Approx(1.0 / 9).epsilon(1e-13));
    CHECK(!s.t_perp);

    const SaddleData hat0 = saddle_data(cycle_c2_hat(), 0, ModelParams::builtin(4, kPi / 2, 0.2, 0.01));
    CHECK(hat0.b_perp() == -1.0);
    const SaddleData hat1 = saddle_data(cycle_c2_hat(), 0, ModelParams::builtin(4, kPi / 2, 0.2, 0.01, 0.01));
    CHECK(hat1.b_perp() == doctest::Approx(-0.356 / 0.364).epsilon(1e-12));
    CHECK(hat1.b_perp() == doctest::Approx(-0.97802).epsilon(1e-5));

    for (int it = 0; it < 50; ++it) {
        const double K = uni(0.01, 1.0), r = uni(1e-4, K / 2 - 1e-4);
        const SaddleData h = saddle_data(cycle_c2_hat(), 0, ModelParams::builtin(4, kPi / 2, K, r));
        CHECK(h.b_perp() == -1.0);
    }
    CHECK_THROWS_AS(saddle_data(cycle_c2(), 0, ModelParams::builtin(3, kPi / 2, 0.2, 0.15)), std::domain_error);
}

TEST_CASE("role-sum identities for C2") {
    for (int it = 0; it < 50; ++it) {
        const double al = uni(0.4 * kPi, 0.6 * kPi), K = uni(0.05, 0.5), r = uni(-0.02, 0.02);
        const ModelParams p = ModelParams::builtin(3, al, K, r);
        const double S = 2 * K * std::sin(al);
        const auto dss = eigenvalues_closed_form(Word("DSS"), p);
        const auto dds = eigenvalues_closed_form(Word("DDS"), p);
        const double c1 = -dss[2], e1 = dss[1], t1 = dss[0];
        const double c2 = -dds[1], e2 = dds[0], t2 = dds[2];
        CHECK(e1 == doctest::Approx(S + t2).epsilon(1e-12));
        CHECK(c1 == doctest::Approx(S - t2).epsilon(1e-12));
        CHECK(e2 == doctest::Approx(S + t1).epsilon(1e-12));
        CHECK(c2 == doctest::Approx(S - t1).epsilon(1e-12));
    }
}

TEST_CASE("cycle existence") {
    CHECK(cycle_exists(cycle_c2(), ModelParams::builtin(3, kPi / 2, 0.2, 0.01)).exists);
    const auto no = cycle_exists(cycle_c2(), ModelParams::builtin(3, kPi / 2, 0.2, 0.15));
    CHECK_FALSE(no.exists);
    CHECK_FALSE(no.reasons.empty());
    CHECK_FALSE(cycle_exists(cycle_c2(), ModelParams::builtin(3, kPi / 2, 0.0, 0.01)).exists);
    CHECK(cycle_exists(cycle_c2(), ModelParams::builtin(3, kPi / 2, 0.2, 0.1)).boundary);
    CHECK(network_exists(ModelParams::builtin(4, kPi / 2, 0.2, 0.01, 0.01)).exists);
    CHECK(network_words().size() == 9);
}

TEST_CASE("nonresonance") {
    CHECK(nonresonance_ok(ModelParams::builtin(3, kPi / 2, 0.2, 0.01)));
    CHECK_FALSE(nonresonance_ok(ModelParams::builtin(3, kPi / 2, 0.2, 0.2)));
    CHECK_FALSE(nonresonance_ok(ModelParams::builtin(3, kPi / 2, 0.2, -0.2)));
    CHECK_FALSE(nonresonance_ok(ModelParams::builtin(3, kPi / 2, 0.2, 0.0)));
    CHECK(nonresonance_ok(ModelParams::builtin(4, kPi / 2, 0.2, 0.01, 0.01)));
}
