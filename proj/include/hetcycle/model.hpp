#pragma once

// Parameter records, phase states and the S/D words naming relative
// equilibria of coupled two-oscillator populations.

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hetcycle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an operation is asked for a configuration it does not cover
/// (e.g. no built-in coupling for M=5, words for N != 2).
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Wraps an angle to [0, 2pi).
double wrap_angle(double x);

/// Distance on the circle, in [0, pi].
double circular_distance(double a, double b);

/// Infinity-norm of the componentwise circular distance.
double circular_distance_inf(std::span<const double> a, std::span<const double> b);

/// The built-in inter-population coupling matrices (K_{sigma tau}).
/// M=3: cyclic +-1 pattern with vanishing row sums.
/// M=4: asymmetry delta between populations 3 and 4.
Eigen::MatrixXd builtin_coupling(int M, double delta = 0.0);

struct ModelParams {
    int M = 3;
    int N = 2;
    double alpha = kPi / 2;
    double K = 0.2;
    double r = 0.01;
    int a = 2;
    double omega = 0.0;
    double delta = 0.0;
    Eigen::MatrixXd coupling = builtin_coupling(3);

    /// Parameters with the built-in coupling for M populations.
    static ModelParams builtin(int M, double alpha, double K, double r, double delta = 0.0);

    /// Copy with delta replaced and (for M=4) the built-in coupling rebuilt.
    ModelParams with_delta(double d) const;
    ModelParams with_r(double value) const;

    /// K_sigma = sum_tau K_{sigma tau}; recomputed on every call.
    double row_sum(int sigma) const;

    /// Throws std::invalid_argument on inconsistent fields.
    void validate() const;
};

/// Phases theta_{sigma,k} stored population-major: index sigma*N + k.
struct PhaseState {
    int M = 0;
    int N = 0;
    std::vector<double> theta;

    PhaseState() = default;
    PhaseState(int populations, int per_population, std::vector<double> values);

    double at(int sigma, int k) const { return theta[static_cast<std::size_t>(sigma * N + k)]; }
    std::span<const double> population(int sigma) const;
};

/// Phase differences psi_{sigma,k} = theta_{sigma,k+1} - theta_{sigma,1}, index sigma*(N-1) + k.
struct ReducedState {
    int M = 0;
    int N = 0;
    std::vector<double> psi;

    ReducedState() = default;
    ReducedState(int populations, int per_population, std::vector<double> values);
};

ReducedState reduce(const PhaseState& theta);

/// Right inverse of reduce: oscillator (sigma,1) gets base[sigma].
PhaseState lift(const ReducedState& psi, std::span<const double> base);

/// Length-M word over {S, D}; S is psi_sigma = 0, D is psi_sigma = pi (N = 2).
class Word {
public:
    Word() = default;
    explicit Word(std::string_view letters);

    std::size_t size() const { return letters_.size(); }
    char operator[](std::size_t i) const { return letters_[i]; }
    bool is_splay(std::size_t i) const { return letters_[i] == 'D'; }
    const std::string& str() const { return letters_; }

    /// Copy with letter i toggled.
    Word flipped(std::size_t i) const;

    /// Coordinates psi in the reduced N=2 system.
    std::vector<double> point() const;

    /// All 2^M words in lexicographic order with S < D.
    static std::vector<Word> all(int M);

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::string letters_;
};

/// Requires N = 2.
ReducedState equilibrium_state(const Word& word, int N = 2);

/// A cyclic sequence of relative equilibria; connection q joins equilibria[q]
/// to equilibria[q+1] and moves coordinate connection_coords[q].
struct CycleSpec {
    std::string name;
    std::vector<Word> equilibria;
    std::vector<int> connection_coords;

    CycleSpec() = default;
    CycleSpec(std::string cycle_name, std::vector<Word> words);

    std::size_t length() const { return equilibria.size(); }
    int dimension() const { return static_cast<int>(equilibria.front().size()); }

    /// Coordinates moved along some connection (the cycle's subspace).
    std::vector<int> active_coords() const;
    /// Coordinates fixed along the whole cycle.
    std::vector<int> frozen_coords() const;

    bool contains(const Word& w) const;
    bool has_edge(const Word& from, const Word& to) const;
};

/// C2 = (DSS, DDS, SDS, SDD, SSD, DSD) for M = 3.
CycleSpec cycle_c2();
/// The network cycle inside psi1 psi2 psi3 S, xi_1 = SDSS.
CycleSpec cycle_c2_hat();
/// The network cycle inside psi1 psi2 S psi4, xi_1 = SDSS.
CycleSpec cycle_c2_check();

}  // namespace hetcycle
