#pragma once

// Simulation-based checks of the analytic predictions: Monte Carlo basin
// fractions near a cycle, a sign-level index estimator, the wedge map of the
// S D psi3 psi4 subspace, noisy network itineraries and average frequencies.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetcycle/dynamics.hpp"
#include "hetcycle/model.hpp"
#include "hetcycle/numerics.hpp"

namespace hetcycle {

/// Runs body(i) for i in [0, n) on `workers` threads (0: hardware concurrency).
/// Results must be written to index-addressed storage by the caller.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// Wilson score interval for k successes out of n at 95%.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

/// Infinity-norm circular distance from psi to the union of the cycle's
/// connection lines (only the connection coordinate varies along each).
double distance_to_cycle(std::span<const double> psi, const CycleSpec& cycle);

/// Point on connection q with the moving coordinate at pi/2.
std::vector<double> connection_midpoint(const CycleSpec& cycle, int q);

struct BasinOptions {
    int connection = 0;         // sample around the midpoint of this connection
    double epsilon = 1e-3;      // half-width of the sampling box (infinity norm)
    std::size_t n = 1000;
    double T_max = 500.0;
    std::uint64_t seed = 0;
    double dt = 0.01;
    double max_distance = 0.5;  // allowed distance from the cycle's connection lines
    unsigned workers = 0;
    FieldKind kind = FieldKind::NonpairwiseApprox;
};

struct SampleOutcome {
    bool attracted = false;
    bool left_words = false;      // itinerary visited a word outside the cycle
    bool left_tube = false;       // distance exceeded max_distance
    bool not_converging = false;  // final-window excursion not below the first window's
    double early_excursion = 0.0;
    double late_excursion = 0.0;
};

struct BasinEstimate {
    std::string target;
    int connection = 0;
    double epsilon = 0.0;
    std::size_t n = 0;
    std::size_t attracted = 0;
    double fraction = 0.0;
    std::pair<double, double> ci95;
    std::uint64_t seed = 0;
    double T_max = 0.0;
    std::vector<double> base_point;
};

/// One Monte Carlo sample: attracted iff the itinerary stays in the cycle's
/// words, the state stays within max_distance of the connection lines, and its
/// largest distance over the final 10% of the run is below that over the first 10%.
SampleOutcome basin_sample(const ModelParams& p, const CycleSpec& cycle, std::span<const double> x0,
                           const BasinOptions& opt);

/// Initial point of sample i: the connection midpoint plus a uniform offset in [-eps, eps]^M.
std::vector<double> basin_sample_point(const CycleSpec& cycle, const BasinOptions& opt, std::size_t i);

BasinEstimate basin_fraction(const ModelParams& p, const CycleSpec& cycle, const BasinOptions& opt);

enum class IndexSign { Positive, Negative, Unresolved };
std::string to_string(IndexSign s);

struct IndexSignEstimate {
    IndexSign sign = IndexSign::Unresolved;
    std::vector<BasinEstimate> ladder;
    double slope = 0.0;   // d fraction / d log(epsilon)
    double t_stat = 0.0;
    std::string note;     // sign-level estimate only; no magnitude claim
};

/// Basin fractions along a decreasing epsilon ladder (>= 3 rungs). Positive if
/// the fraction tends to 1 (all rungs >= 0.99, or a significant increase as
/// epsilon shrinks), Negative if it tends to 0, Unresolved otherwise.
IndexSignEstimate empirical_index_sign(const ModelParams& p, const CycleSpec& cycle, int connection,
                                       const std::vector<double>& eps_ladder, const BasinOptions& base);

/// Saddles on the edges of the S D psi3 psi4 square: (arccos(dK/2r), pi) and
/// (pi, arccos(-dK/2r)) when |d| K < 2 |r|; empty otherwise. Requires r != 0.
std::vector<std::pair<double, double>> special_equilibria_sd(const ModelParams& p);

enum class WedgeClass : unsigned char { SDDS, SDSD, SDDD, Unresolved };
std::string to_string(WedgeClass c);

struct WedgeOptions {
    int resolution = 200;
    double T_max = 2000.0;
    double dt = 0.05;
    double tol = 0.05;
    unsigned workers = 0;
};

struct WedgeGrid {
    int resolution = 0;
    std::vector<WedgeClass> cells;  // row-major: index i3 * resolution + i4
    std::vector<std::pair<double, double>> saddles;

    double center(int i) const { return (i + 0.5) * kPi / resolution; }
    WedgeClass at(int i3, int i4) const { return cells[static_cast<std::size_t>(i3 * resolution + i4)]; }
    double share(WedgeClass c) const;
};

/// omega-limit of (psi3, psi4) in the S D psi3 psi4 subspace; SDSS and
/// anything not settling by T_max are Unresolved.
WedgeClass classify_wedge_point(const ModelParams& p, double psi3, double psi4, const WedgeOptions& opt);

WedgeGrid wedge_map(const ModelParams& p, const WedgeOptions& opt = {});

/// Estimated saddle positions from class changes along the grid edges:
/// SDSD/SDDD boundary along psi4 ~ pi and SDDS/SDDD boundary along psi3 ~ pi.
std::pair<std::optional<double>, std::optional<double>> wedge_edge_transitions(const WedgeGrid& g);

struct FrequencyProfile {
    int M = 0;
    int N = 0;
    double T = 0.0;
    std::vector<double> Omega;  // index sigma * N + k

    double at(int sigma, int k) const { return Omega[static_cast<std::size_t>(sigma * N + k)]; }
    double population_mean(int sigma) const;
};

/// Integrates the phase field with RK4, accumulating raw per-step increments.
FrequencyProfile average_frequencies(const ModelParams& p, const PhaseState& x0, double T, double dt = 0.01,
                                     FieldKind kind = FieldKind::NonpairwiseApprox);

/// From a phase trajectory with wrapped states; increments between samples are
/// taken as the circular difference, so samples must be dense enough.
FrequencyProfile average_frequencies(const Trajectory& traj, int M, int N);

/// Frequencies over consecutive windows of `window` samples.
std::vector<FrequencyProfile> windowed_frequencies(const Trajectory& traj, int M, int N, std::size_t window);

struct SynchronyResult {
    bool localized = false;
    std::vector<std::vector<int>> partition;  // 0-based populations grouped by frequency
    std::string diagnostic;
};

SynchronyResult detect_localized_frequency_synchrony(const FrequencyProfile& profile, double tol = 1e-2);

struct NoisyRunOptions {
    double T = 1e4;
    double dt = 1e-3;
    double eta = 1e-4;
    std::uint64_t seed = 0;
    std::size_t sample_every = 10;  // itinerary update stride in steps
    double eps_near = 1.2;
    double eps_leave = 1.4;
    std::vector<Word> words;        // empty: noisy_vocabulary(M)
    std::optional<Word> depart_from;  // empty: SDSS for M = 4, no departure tracking otherwise
    double depart_radius = 0.5;
    FieldKind kind = FieldKind::NonpairwiseApprox;
};

/// Network words plus SDDD and SSSS for M = 4; all 2^M words otherwise.
std::vector<Word> noisy_vocabulary(int M);

/// Departures from one word, keyed by the coordinate that first moves more
/// than pi/2 away after the state was within depart_radius of the word.
struct DepartureCounts {
    Word from;
    std::vector<long> by_coord;
    long simultaneous = 0;  // several coordinates crossed within one sample
    long total() const;
};

struct NoisyRun {
    Itinerary itinerary;
    std::optional<DepartureCounts> departures;
};

/// Euler-Maruyama on the full phases with independent noise per oscillator,
/// started at lift(x0, 0); the itinerary is over opt.words.
NoisyRun noisy_run(const ModelParams& p, const ReducedState& x0, const NoisyRunOptions& opt);
Itinerary noisy_itinerary(const ModelParams& p, const ReducedState& x0, const NoisyRunOptions& opt);

/// Allowed transitions for noisy M = 4 runs: network edges, SDSS -> SDDD and
/// SDDD -> any network word or SSSS.
bool allowed_network_transition(const Word& from, const Word& to);

}  // namespace hetcycle
