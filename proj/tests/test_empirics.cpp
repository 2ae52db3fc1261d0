#include <algorithm>
#include <set>

#include "doctest.h"
#include "hetcycle/empirics.hpp"

using namespace hetcycle;

namespace {

ModelParams net(double delta, double r = 0.01) { return ModelParams::builtin(4, kPi / 2, 0.2, r, delta); }

WedgeClass swapped(WedgeClass c) {
    if (c == WedgeClass::SDDS) return WedgeClass::SDSD;
    if (c == WedgeClass::SDSD) return WedgeClass::SDDS;
    return c;
}

}  // namespace

TEST_CASE("wilson interval") {
    const auto [lo, hi] = wilson_interval(5, 10);
    CHECK(lo == doctest::Approx(0.236593).epsilon(1e-5));
    CHECK(hi == doctest::Approx(0.763407).epsilon(1e-5));
    const auto z = wilson_interval(0, 10);
    CHECK(z.first == 0.0);
    CHECK(z.second == doctest::Approx(0.277533).epsilon(1e-5));
    const auto all = wilson_interval(1000, 1000);
    CHECK(all.second == doctest::Approx(1.0));
    CHECK(all.first > 0.99);
}

TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                     if (i == 57) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("cycle geometry helpers") {
    const CycleSpec c = cycle_c2();
    const auto mid = connection_midpoint(c, 0);
    CHECK(distance_to_cycle(mid, c) == doctest::Approx(0.0).epsilon(1e-14));
    for (const Word& w : c.equilibria) CHECK(distance_to_cycle(equilibrium_state(w).psi, c) < 1e-14);
    const std::vector<double> off{kPi / 2, kPi / 2, kPi / 2};
    CHECK(distance_to_cycle(off, c) == doctest::Approx(kPi / 2));

    BasinOptions opt;
    opt.epsilon = 1e-3;
    opt.seed = 3;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto x = basin_sample_point(c, opt, i);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(circular_distance(x[k], mid[k]) <= 1e-3 + 1e-15);
    }
    CHECK(basin_sample_point(c, opt, 5) == basin_sample_point(c, opt, 5));
    CHECK(basin_sample_point(c, opt, 5) != basin_sample_point(c, opt, 6));
}

TEST_CASE("basin estimates are independent of the worker count") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    BasinOptions opt;
    opt.n = 24;
    opt.T_max = 200;
    opt.seed = 11;
    opt.workers = 1;
    const BasinEstimate a = basin_fraction(p, cycle_c2(), opt);
    opt.workers = 4;
    const BasinEstimate b = basin_fraction(p, cycle_c2(), opt);
    CHECK(a.attracted == b.attracted);
    CHECK(a.fraction == b.fraction);
    CHECK(a.n == 24);
    CHECK(a.fraction > 0.9);
    CHECK(a.ci95.first <= a.fraction);
    CHECK(a.ci95.second >= a.fraction);

    const BasinEstimate u = basin_fraction(ModelParams::builtin(3, kPi / 2, 0.2, -0.01), cycle_c2(), opt);
    CHECK(u.fraction < 0.1);
    ModelParams p3 = p;
    p3.N = 3;
    CHECK_THROWS_AS(basin_fraction(p3, cycle_c2(), opt), UnsupportedError);
}

TEST_CASE("empirical index sign") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    BasinOptions opt;
    opt.n = 16;
    opt.T_max = 200;
    CHECK_THROWS_AS(empirical_index_sign(p, cycle_c2(), 0, {1e-2, 1e-3}, opt), std::invalid_argument);
    CHECK_THROWS_AS(empirical_index_sign(p, cycle_c2(), 0, {1e-3, 1e-2, 1e-4}, opt), std::invalid_argument);
    const IndexSignEstimate s = empirical_index_sign(p, cycle_c2(), 0, {1e-2, 1e-3, 1e-4}, opt);
    CHECK(s.sign == IndexSign::Positive);
    CHECK(s.ladder.size() == 3);
    const IndexSignEstimate n =
        empirical_index_sign(ModelParams::builtin(3, kPi / 2, 0.2, -0.01), cycle_c2(), 0, {1e-2, 1e-3, 1e-4}, opt);
    CHECK(n.sign == IndexSign::Negative);
}

TEST_CASE("special equilibria in the S D psi3 psi4 subspace") {
    const auto s0 = special_equilibria_sd(net(0.0));
    REQUIRE(s0.size() == 2);
    CHECK(s0[0].first == doctest::Approx(kPi / 2));
    CHECK(s0[0].second == doctest::Approx(kPi));
    CHECK(s0[1].first == doctest::Approx(kPi));
    CHECK(s0[1].second == doctest::Approx(kPi / 2));

    const auto s7 = special_equilibria_sd(net(0.07));
    REQUIRE(s7.size() == 2);
    CHECK(s7[0].first == doctest::Approx(0.79540).epsilon(1e-5));
    CHECK(s7[1].second == doctest::Approx(2.34619).epsilon(1e-5));
    for (const auto& [a, b] : s7) {
        const auto v = rhs_sd_subspace(a, b, net(0.07));
        CHECK(std::abs(v[0]) < 1e-12);
        CHECK(std::abs(v[1]) < 1e-12);
    }
    CHECK(special_equilibria_sd(net(0.15)).empty());
    CHECK_THROWS_AS(special_equilibria_sd(net(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("coarse wedge maps") {
    WedgeOptions opt;
    opt.resolution = 20;
    const WedgeGrid g0 = wedge_map(net(0.0), opt);
    CHECK(g0.cells.size() == 400);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) CHECK(g0.at(j, i) == swapped(g0.at(i, j)));
    CHECK(g0.share(WedgeClass::SDDS) == doctest::Approx(g0.share(WedgeClass::SDSD)));
    const double cell = kPi / 20;
    for (double d : {0.0, 0.07}) {
        const WedgeGrid g = wedge_map(net(d), opt);
        REQUIRE(g.saddles.size() == 2);
        const auto [top, right] = wedge_edge_transitions(g);
        REQUIRE(top);
        REQUIRE(right);
        CHECK(std::abs(*top - g.saddles[0].first) <= cell);
        CHECK(std::abs(*right - g.saddles[1].second) <= cell);
        for (WedgeClass c : {WedgeClass::SDDS, WedgeClass::SDSD, WedgeClass::SDDD}) CHECK(g.share(c) > 0.05);
    }
    const WedgeGrid g7 = wedge_map(net(0.07), opt);
    CHECK(g7.share(WedgeClass::SDDS) > g7.share(WedgeClass::SDSD));

    CHECK(classify_wedge_point(net(0.0), 3.0, 0.1, opt) == WedgeClass::SDDS);
    CHECK(classify_wedge_point(net(0.0), 0.1, 3.0, opt) == WedgeClass::SDSD);
    CHECK(classify_wedge_point(net(0.0), 3.0, 3.0, opt) == WedgeClass::SDDD);
}

TEST_CASE("frequencies at equilibria") {
    const ModelParams p3 = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    const FrequencyProfile f = average_frequencies(p3, lift(equilibrium_state(Word("DSS")), std::vector<double>(3, 0.0)), 50);
    const double expect[6] = {-1, -1, 1, 1, 1, 1};
    for (int i = 0; i < 6; ++i) CHECK(f.Omega[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]).epsilon(1e-9));
    const SynchronyResult s = detect_localized_frequency_synchrony(f);
    CHECK(s.localized);
    CHECK(s.partition == std::vector<std::vector<int>>{{0}, {1, 2}});

    // All-synchronous state: every oscillator runs at g(0).
    for (double al : {0.4 * kPi, 0.55 * kPi}) {
        const ModelParams p = ModelParams::builtin(4, al, 0.2, 0.03);
        const FrequencyProfile q = average_frequencies(p, lift(equilibrium_state(Word("SSSS")), std::vector<double>(4, 0.0)), 20);
        for (double o : q.Omega) CHECK(o == doctest::Approx(std::sin(al) - 0.03 * std::sin(2 * al)).epsilon(1e-9));
        const SynchronyResult u = detect_localized_frequency_synchrony(q);
        CHECK_FALSE(u.localized);
        CHECK(u.partition.size() == 1);
    }

    const FrequencyProfile s4 = average_frequencies(net(0.01), lift(equilibrium_state(Word("SDSS")), std::vector<double>(4, 0.0)), 50);
    CHECK(s4.population_mean(1) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(s4.population_mean(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("frequencies alternate along the cycle") {
    const ModelParams p = ModelParams::builtin(3, kPi / 2, 0.2, 0.01);
    const PhaseField f(p, FieldKind::NonpairwiseApprox);
    const PhaseState x = lift(ReducedState(3, 2, {kPi - 1e-3, 1e-3, 2e-3}), std::vector<double>(3, 0.0));
    IntegrateOptions o;
    o.stride = 10;
    const Trajectory tr = integrate_rk4(f, x.theta, 0.01, 400, o);
    const auto windows = windowed_frequencies(tr, 3, 2, 100);
    REQUIRE(windows.size() >= 30);
    int flips = 0;
    for (std::size_t i = 1; i < windows.size(); ++i)
        if (windows[i].population_mean(0) * windows[i - 1].population_mean(0) < 0) ++flips;
    CHECK(flips >= 2);
    CHECK(windows.front().population_mean(0) == doctest::Approx(-1.0).epsilon(1e-3));

    // Averages from the stored trajectory agree with the direct accumulation.
    const FrequencyProfile direct = average_frequencies(p, x, 400);
    const FrequencyProfile sampled = average_frequencies(tr, 3, 2);
    for (std::size_t i = 0; i < direct.Omega.size(); ++i) CHECK(sampled.Omega[i] == doctest::Approx(direct.Omega[i]).epsilon(1e-6));
}

TEST_CASE("noisy itinerary vocabulary and transitions") {
    const auto v = noisy_vocabulary(4);
    const std::set<Word> vs(v.begin(), v.end());
    CHECK(vs.size() == 11);
    CHECK(vs.count(Word("SDDD")) == 1);
    CHECK(vs.count(Word("SSSS")) == 1);
    CHECK(noisy_vocabulary(3).size() == 8);

    CHECK(allowed_network_transition(Word("SDSS"), Word("SDDS")));
    CHECK(allowed_network_transition(Word("SDSS"), Word("SDSD")));
    CHECK(allowed_network_transition(Word("SDSS"), Word("SDDD")));
    CHECK(allowed_network_transition(Word("SDDD"), Word("SSSS")));
    CHECK(allowed_network_transition(Word("DDSS"), Word("SDSS")));
    CHECK_FALSE(allowed_network_transition(Word("SDSS"), Word("DDSS")));
    CHECK_FALSE(allowed_network_transition(Word("SSSS"), Word("SDSS")));

    NoisyRunOptions opt;
    opt.T = 300;
    opt.seed = 5;
    const ReducedState x0 = equilibrium_state(Word("SDSS"));
    const Itinerary a = noisy_itinerary(net(0.01), x0, opt);
    const Itinerary b = noisy_itinerary(net(0.01), x0, opt);
    CHECK(a.symbols == b.symbols);
    REQUIRE_FALSE(a.symbols.empty());
    CHECK(a.symbols.front() == Word("SDSS"));
    for (const Word& w : a.symbols) CHECK(vs.count(w) == 1);

    const NoisyRun run = noisy_run(net(0.01), x0, opt);
    CHECK(run.itinerary.symbols == a.symbols);
    REQUIRE(run.departures);
    CHECK(run.departures->from == Word("SDSS"));
    CHECK(run.departures->by_coord[0] == 0);
    CHECK(run.departures->by_coord[1] == 0);
    long sdss_exits = 0;
    for (std::size_t k = 0; k + 1 < a.symbols.size(); ++k)
        if (a.symbols[k] == Word("SDSS")) ++sdss_exits;
    CHECK(std::abs(run.departures->total() - sdss_exits) <= 1);
    CHECK_FALSE(noisy_run(ModelParams::builtin(3, kPi / 2, 0.2, 0.01), equilibrium_state(Word("DSS")), opt).departures);
}
