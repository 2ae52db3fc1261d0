#include "hetcycle/empirics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "hetcycle/spectra.hpp"

namespace hetcycle {

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilson_interval: n must be >= 1");
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (ph + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double distance_to_cycle(std::span<const double> psi, const CycleSpec& cycle) {
    double best = HUGE_VAL;
    for (std::size_t q = 0; q < cycle.length(); ++q) {
        const Word& w = cycle.equilibria[q];
        const auto moving = static_cast<std::size_t>(cycle.connection_coords[q]);
        double d = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            if (i != moving) d = std::max(d, circular_distance(psi[i], w.is_splay(i) ? kPi : 0.0));
        best = std::min(best, d);
    }
    return best;
}

std::vector<double> connection_midpoint(const CycleSpec& cycle, int q) {
    if (q < 0 || q >= static_cast<int>(cycle.length())) throw std::out_of_range("connection index out of range");
    std::vector<double> x = cycle.equilibria[static_cast<std::size_t>(q)].point();
    x[static_cast<std::size_t>(cycle.connection_coords[static_cast<std::size_t>(q)])] = kPi / 2;
    return x;
}

std::vector<double> basin_sample_point(const CycleSpec& cycle, const BasinOptions& opt, std::size_t i) {
    std::vector<double> x = connection_midpoint(cycle, opt.connection);
    const CounterRng rng(opt.seed, i);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += opt.epsilon * (2.0 * rng.uniform(0, k) - 1.0);
    wrap_all(x);
    return x;
}

namespace {

template <class F>
SampleOutcome run_sample(const F& field, const CycleSpec& cycle, std::span<const double> x0, const BasinOptions& opt) {
    SampleOutcome out;
    ItineraryTracker tracker(Word::all(cycle.dimension()));
    std::size_t seen = 0;
    std::vector<double> x(x0.begin(), x0.end());
    const double early_end = 0.1 * opt.T_max;
    const double late_start = 0.9 * opt.T_max;
    integrate_rk4_observe(field, x, opt.dt, opt.T_max, [&](long long, double t, const std::vector<double>& s) {
        tracker.feed(t, s);
        const auto& syms = tracker.current().symbols;
        for (; seen < syms.size(); ++seen)
            if (!cycle.contains(syms[seen])) out.left_words = true;
        const double d = distance_to_cycle(s, cycle);
        if (d >= opt.max_distance) out.left_tube = true;
        if (t <= early_end) out.early_excursion = std::max(out.early_excursion, d);
        if (t >= late_start) out.late_excursion = std::max(out.late_excursion, d);
        return !(out.left_words || out.left_tube);
    });
    out.not_converging = !(out.late_excursion < out.early_excursion);
    out.attracted = !(out.left_words || out.left_tube || out.not_converging);
    return out;
}

}  // namespace

SampleOutcome basin_sample(const ModelParams& p, const CycleSpec& cycle, std::span<const double> x0,
                           const BasinOptions& opt) {
    if (!(opt.epsilon > 0.0)) throw std::invalid_argument("basin: epsilon must be > 0");
    if (cycle.dimension() != p.M) throw std::invalid_argument("basin: cycle dimension must equal M");
    if (p.N == 2) return run_sample(ReducedFieldN2(p, opt.kind), cycle, x0, opt);
    return run_sample(ReducedField(p, opt.kind), cycle, x0, opt);
}

BasinEstimate basin_fraction(const ModelParams& p, const CycleSpec& cycle, const BasinOptions& opt) {
    if (opt.n < 1) throw std::invalid_argument("basin: n must be >= 1");
    if (p.N != 2) throw UnsupportedError("basin sampling around S/D cycles requires N = 2");
    std::vector<char> hit(opt.n, 0);
    parallel_for(opt.n, opt.workers, [&](std::size_t i) {
        const auto x0 = basin_sample_point(cycle, opt, i);
        hit[i] = basin_sample(p, cycle, x0, opt).attracted ? 1 : 0;
    });
    BasinEstimate est;
    est.target = cycle.name;
    est.connection = opt.connection;
    est.epsilon = opt.epsilon;
    est.n = opt.n;
    est.attracted = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    est.fraction = static_cast<double>(est.attracted) / static_cast<double>(opt.n);
    est.ci95 = wilson_interval(est.attracted, opt.n);
    est.seed = opt.seed;
    est.T_max = opt.T_max;
    est.base_point = connection_midpoint(cycle, opt.connection);
    return est;
}

std::string to_string(IndexSign s) {
    switch (s) {
        case IndexSign::Positive: return "Positive";
        case IndexSign::Negative: return "Negative";
        default: return "Unresolved";
    }
}

IndexSignEstimate empirical_index_sign(const ModelParams& p, const CycleSpec& cycle, int connection,
                                       const std::vector<double>& eps_ladder, const BasinOptions& base) {
    if (eps_ladder.size() < 3) throw std::invalid_argument("empirical_index_sign needs at least 3 epsilon values");
    for (std::size_t i = 1; i < eps_ladder.size(); ++i)
        if (!(eps_ladder[i] < eps_ladder[i - 1])) throw std::invalid_argument("epsilon ladder must decrease");
    IndexSignEstimate out;
    out.note = "sign-level estimate only; magnitudes are not estimated";
    for (double eps : eps_ladder) {
        BasinOptions opt = base;
        opt.connection = connection;
        opt.epsilon = eps;
        out.ladder.push_back(basin_fraction(p, cycle, opt));
    }
    const std::size_t L = out.ladder.size();
    std::vector<double> x(L), f(L);
    for (std::size_t i = 0; i < L; ++i) {
        x[i] = std::log(out.ladder[i].epsilon);
        f[i] = out.ladder[i].fraction;
    }
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(L);
    const double fm = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(L);
    double sxx = 0.0, sxf = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxf += (x[i] - xm) * (f[i] - fm);
    }
    out.slope = sxf / sxx;
    const double var_f = std::max(fm * (1.0 - fm), 1e-12) / static_cast<double>(base.n);
    out.t_stat = out.slope / std::sqrt(var_f / sxx);

    const bool all_high = std::all_of(f.begin(), f.end(), [](double v) { return v >= 0.99; });
    const bool all_low = std::all_of(f.begin(), f.end(), [](double v) { return v <= 0.01; });
    if (all_high || (!all_low && out.t_stat < -3.0))
        out.sign = IndexSign::Positive;
    else if (all_low || out.t_stat > 3.0)
        out.sign = IndexSign::Negative;
    else
        out.sign = IndexSign::Unresolved;
    return out;
}

std::vector<std::pair<double, double>> special_equilibria_sd(const ModelParams& p) {
    if (p.r == 0.0) throw std::invalid_argument("special_equilibria_sd requires r != 0");
    std::vector<std::pair<double, double>> out;
    if (!(std::abs(p.delta) * p.K < 2.0 * std::abs(p.r))) return out;
    const double q = p.delta * p.K / (2.0 * p.r);
    out.emplace_back(std::acos(q), kPi);
    out.emplace_back(kPi, std::acos(-q));
    for (const auto& [a, b] : out) {
        const auto v = rhs_sd_subspace(a, b, p);
        if (std::abs(v[0]) > 1e-10 || std::abs(v[1]) > 1e-10)
            throw std::domain_error("special equilibrium formula does not hold at these parameters");
    }
    return out;
}

std::string to_string(WedgeClass c) {
    switch (c) {
        case WedgeClass::SDDS: return "SDDS";
        case WedgeClass::SDSD: return "SDSD";
        case WedgeClass::SDDD: return "SDDD";
        default: return "Unresolved";
    }
}

double WedgeGrid::share(WedgeClass c) const {
    if (cells.empty()) return 0.0;
    return static_cast<double>(std::count(cells.begin(), cells.end(), c)) / static_cast<double>(cells.size());
}

WedgeClass classify_wedge_point(const ModelParams& p, double psi3, double psi4, const WedgeOptions& opt) {
    static const std::vector<OmegaTarget> targets{
        {"SDDS", {kPi, 0.0}}, {"SDSD", {0.0, kPi}}, {"SDDD", {kPi, kPi}}, {"SDSS", {0.0, 0.0}}};
    const SdSubspaceField f(p);
    const std::array<double, 2> x0{psi3, psi4};
    const auto label = classify_omega_limit(f, x0, opt.T_max, opt.tol, targets, opt.dt);
    if (!label) return WedgeClass::Unresolved;
    if (*label == "SDDS") return WedgeClass::SDDS;
    if (*label == "SDSD") return WedgeClass::SDSD;
    if (*label == "SDDD") return WedgeClass::SDDD;
    return WedgeClass::Unresolved;
}

WedgeGrid wedge_map(const ModelParams& p, const WedgeOptions& opt) {
    if (opt.resolution < 2) throw std::invalid_argument("wedge_map: resolution must be >= 2");
    WedgeGrid g;
    g.resolution = opt.resolution;
    const auto R = static_cast<std::size_t>(opt.resolution);
    g.cells.assign(R * R, WedgeClass::Unresolved);
    parallel_for(R * R, opt.workers, [&](std::size_t idx) {
        const int i3 = static_cast<int>(idx / R), i4 = static_cast<int>(idx % R);
        g.cells[idx] = classify_wedge_point(p, g.center(i3), g.center(i4), opt);
    });
    if (p.r != 0.0) g.saddles = special_equilibria_sd(p);
    return g;
}

std::pair<std::optional<double>, std::optional<double>> wedge_edge_transitions(const WedgeGrid& g) {
    const int R = g.resolution;
    std::optional<double> along_top, along_right;
    for (int i = 1; i < R; ++i)
        if (g.at(i - 1, R - 1) == WedgeClass::SDSD && g.at(i, R - 1) == WedgeClass::SDDD) {
            along_top = 0.5 * (g.center(i - 1) + g.center(i));
            break;
        }
    for (int i = 1; i < R; ++i)
        if (g.at(R - 1, i - 1) == WedgeClass::SDDS && g.at(R - 1, i) == WedgeClass::SDDD) {
            along_right = 0.5 * (g.center(i - 1) + g.center(i));
            break;
        }
    return {along_top, along_right};
}

double FrequencyProfile::population_mean(int sigma) const {
    double s = 0.0;
    for (int k = 0; k < N; ++k) s += at(sigma, k);
    return s / N;
}

FrequencyProfile average_frequencies(const ModelParams& p, const PhaseState& x0, double T, double dt,
                                     FieldKind kind) {
    if (x0.M != p.M || x0.N != p.N) throw std::invalid_argument("phase state does not match parameters");
    const PhaseField f(p, kind);
    const long long n = step_count(dt, T);
    Rk4Stepper stepper(f.dimension());
    std::vector<double> x = x0.theta, prev(x.size()), acc(x.size(), 0.0);
    wrap_all(x);
    for (long long s = 1; s <= n; ++s) {
        prev = x;
        stepper.step(f, x, dt);
        check_finite(x, s);
        for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i] - prev[i];
        wrap_all(x);
    }
    FrequencyProfile prof;
    prof.M = p.M;
    prof.N = p.N;
    prof.T = static_cast<double>(n) * dt;
    prof.Omega.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) prof.Omega[i] = acc[i] / prof.T;
    return prof;
}

namespace {

double signed_circular_diff(double to, double from) {
    double d = std::fmod(to - from, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d <= -kPi) d += kTwoPi;
    return d;
}

FrequencyProfile frequencies_between(const Trajectory& traj, int M, int N, std::size_t first, std::size_t last) {
    FrequencyProfile prof;
    prof.M = M;
    prof.N = N;
    prof.T = traj.times[last] - traj.times[first];
    if (!(prof.T > 0.0)) throw std::invalid_argument("frequency window has zero length");
    const std::size_t dim = static_cast<std::size_t>(M * N);
    std::vector<double> acc(dim, 0.0);
    for (std::size_t k = first + 1; k <= last; ++k)
        for (std::size_t i = 0; i < dim; ++i) acc[i] += signed_circular_diff(traj.states[k][i], traj.states[k - 1][i]);
    prof.Omega.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) prof.Omega[i] = acc[i] / prof.T;
    return prof;
}

}  // namespace

FrequencyProfile average_frequencies(const Trajectory& traj, int M, int N) {
    if (traj.size() < 2) throw std::invalid_argument("average_frequencies needs at least two samples");
    if (traj.states.front().size() != static_cast<std::size_t>(M * N))
        throw std::invalid_argument("trajectory must hold the full M*N phases");
    return frequencies_between(traj, M, N, 0, traj.size() - 1);
}

std::vector<FrequencyProfile> windowed_frequencies(const Trajectory& traj, int M, int N, std::size_t window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1 sample");
    std::vector<FrequencyProfile> out;
    for (std::size_t start = 0; start + window < traj.size(); start += window)
        out.push_back(frequencies_between(traj, M, N, start, start + window));
    return out;
}

SynchronyResult detect_localized_frequency_synchrony(const FrequencyProfile& profile, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    SynchronyResult res;
    for (int s = 0; s < profile.M; ++s) {
        double lo = HUGE_VAL, hi = -HUGE_VAL;
        for (int k = 0; k < profile.N; ++k) {
            lo = std::min(lo, profile.at(s, k));
            hi = std::max(hi, profile.at(s, k));
        }
        if (hi - lo > tol) {
            std::ostringstream os;
            os << "population " << s + 1 << " frequency spread " << hi - lo << " exceeds tolerance " << tol;
            res.diagnostic = os.str();
            return res;
        }
    }
    std::vector<int> order(static_cast<std::size_t>(profile.M));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return profile.population_mean(a) < profile.population_mean(b); });
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || profile.population_mean(order[i]) - profile.population_mean(order[i - 1]) > tol)
            res.partition.emplace_back();
        res.partition.back().push_back(order[i]);
    }
    for (auto& grp : res.partition) std::sort(grp.begin(), grp.end());
    std::sort(res.partition.begin(), res.partition.end());
    res.localized = res.partition.size() > 1;
    res.diagnostic = res.localized ? "populations split into " + std::to_string(res.partition.size()) +
                                         " frequency groups"
                                   : "all populations share one frequency";
    return res;
}

std::vector<Word> noisy_vocabulary(int M) {
    if (M != 4) return Word::all(M);
    std::vector<Word> out = network_words();
    out.emplace_back("SDDD");
    out.emplace_back("SSSS");
    return out;
}

long DepartureCounts::total() const {
    return std::accumulate(by_coord.begin(), by_coord.end(), simultaneous);
}

NoisyRun noisy_run(const ModelParams& p, const ReducedState& x0, const NoisyRunOptions& opt) {
    if (p.N != 2) throw UnsupportedError("noisy itineraries over S/D words require N = 2");
    if (opt.sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
    const PhaseField f(p, opt.kind);
    const std::vector<double> base(static_cast<std::size_t>(p.M), 0.0);
    std::vector<double> x = lift(x0, base).theta;
    ItineraryTracker tracker(opt.words.empty() ? noisy_vocabulary(p.M) : opt.words, opt.eps_near, opt.eps_leave);

    NoisyRun run;
    std::optional<Word> from = opt.depart_from;
    if (!from && p.M == 4) from = Word("SDSS");
    std::vector<double> target;
    if (from) {
        if (static_cast<int>(from->size()) != p.M) throw std::invalid_argument("depart_from has the wrong length");
        run.departures = DepartureCounts{*from, std::vector<long>(static_cast<std::size_t>(p.M), 0), 0};
        target = from->point();
    }
    bool armed = false;

    std::vector<double> psi(static_cast<std::size_t>(p.M));
    const auto every = static_cast<long long>(opt.sample_every);
    integrate_em_observe(
        f, x, opt.dt, opt.T, opt.eta, opt.seed,
        [&](long long s, double t, const std::vector<double>& th) {
            if (s % every != 0) return true;
            for (std::size_t sg = 0; sg < psi.size(); ++sg) psi[sg] = wrap_angle(th[2 * sg + 1] - th[2 * sg]);
            tracker.feed(t, psi);
            if (run.departures) {
                double dist = 0.0;
                int crossed = -1, n_crossed = 0;
                for (std::size_t k = 0; k < psi.size(); ++k) {
                    const double d = circular_distance(psi[k], target[k]);
                    dist = std::max(dist, d);
                    if (d > kPi / 2) {
                        crossed = static_cast<int>(k);
                        ++n_crossed;
                    }
                }
                if (dist < opt.depart_radius) {
                    armed = true;
                } else if (armed && n_crossed > 0) {
                    armed = false;
                    if (n_crossed == 1)
                        run.departures->by_coord[static_cast<std::size_t>(crossed)]++;
                    else
                        run.departures->simultaneous++;
                }
            }
            return true;
        },
        true);
    run.itinerary = tracker.finish(opt.T);
    return run;
}

Itinerary noisy_itinerary(const ModelParams& p, const ReducedState& x0, const NoisyRunOptions& opt) {
    return noisy_run(p, x0, opt).itinerary;
}

bool allowed_network_transition(const Word& from, const Word& to) {
    const CycleSpec hat = cycle_c2_hat(), check = cycle_c2_check();
    if (hat.has_edge(from, to) || check.has_edge(from, to)) return true;
    const Word sdss("SDSS"), sddd("SDDD"), ssss("SSSS");
    if (from == sdss && to == sddd) return true;
    if (from == sddd) {
        if (to == ssss) return true;
        const auto words = network_words();
        return std::find(words.begin(), words.end(), to) != words.end();
    }
    return false;
}

}  // namespace hetcycle
