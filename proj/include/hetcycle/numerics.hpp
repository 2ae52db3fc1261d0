#pragma once

// Fixed-step integrators, a counter-based RNG, finite-difference Jacobians,
// a small dense eigensolver and trajectory post-processing.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hetcycle/model.hpp"

namespace hetcycle {

/// Anything callable as f(x, out) writing dx/dt into out.
template <class F>
concept VectorField = requires(const F& f, std::span<const double> x, std::span<double> out) {
    { f(x, out) };
};

/// A non-finite state was produced during integration.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long long step) : std::runtime_error(what), step_(step) {}
    long long step() const { return step_; }

private:
    long long step_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    double dt = 0.0;
    std::optional<std::uint64_t> seed;
    double eta = 0.0;

    std::size_t size() const { return times.size(); }
};

struct IntegrateOptions {
    std::size_t stride = 1;  // record every stride-th step
    bool wrap = true;        // wrap every component to [0, 2pi) after each step
};

/// Number of steps for horizon T; validates dt > 0 and T >= dt.
long long step_count(double dt, double T);

void wrap_all(std::span<double> x);

/// Throws NumericalError if any entry is not finite.
void check_finite(std::span<const double> x, long long step);

/// Classical RK4 stepper with reusable stage buffers.
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    /// Advances x in place by one step (no wrapping).
    template <VectorField F>
    void step(const F& f, std::span<double> x, double dt) {
        const std::size_t n = x.size();
        f(std::span<const double>(x), std::span<double>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
        f(std::span<const double>(tmp_), std::span<double>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
        f(std::span<const double>(tmp_), std::span<double>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
        f(std::span<const double>(tmp_), std::span<double>(k4_));
        for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

private:
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, step, lane), so ensembles are scheduling independent.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t step, std::uint64_t lane) const;
    /// Uniform in the open interval (0, 1).
    double uniform(std::uint64_t step, std::uint64_t lane) const;
    /// Standard normal via Box-Muller; lanes 2j and 2j+1 share one uniform pair.
    double normal(std::uint64_t step, std::uint64_t lane) const;
    /// Both Box-Muller outputs for lanes 2j and 2j+1.
    std::pair<double, double> normal_pair(std::uint64_t step, std::uint64_t j) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Integrates with RK4, calling obs(step, t, x) after every step (and once at
/// t = 0). Integration stops early when obs returns false. Returns the number
/// of steps taken.
template <VectorField F, class Observer>
long long integrate_rk4_observe(const F& f, std::vector<double>& x, double dt, double T, Observer&& obs,
                                bool wrap = true) {
    const long long n = step_count(dt, T);
    Rk4Stepper stepper(x.size());
    if (!obs(0LL, 0.0, std::as_const(x))) return 0;
    for (long long s = 1; s <= n; ++s) {
        stepper.step(f, x, dt);
        check_finite(x, s);
        if (wrap) wrap_all(x);
        if (!obs(s, static_cast<double>(s) * dt, std::as_const(x))) return s;
    }
    return n;
}

template <VectorField F>
Trajectory integrate_rk4(const F& f, std::span<const double> x0, double dt, double T, IntegrateOptions opt = {}) {
    if (opt.stride == 0) throw std::invalid_argument("stride must be >= 1");
    Trajectory traj;
    traj.dt = dt;
    std::vector<double> x(x0.begin(), x0.end());
    if (opt.wrap) wrap_all(x);
    integrate_rk4_observe(
        f, x, dt, T,
        [&](long long s, double t, const std::vector<double>& state) {
            if (s % static_cast<long long>(opt.stride) == 0) {
                traj.times.push_back(t);
                traj.states.push_back(state);
            }
            return true;
        },
        opt.wrap);
    return traj;
}

/// Euler-Maruyama for dx = f dt + eta dW with independent unit Wiener
/// processes per component; the noise of component i at step s is drawn from
/// CounterRng(seed, stream) at (s, i).
template <VectorField F, class Observer>
long long integrate_em_observe(const F& f, std::vector<double>& x, double dt, double T, double eta,
                               std::uint64_t seed, Observer&& obs, bool wrap = true, std::uint64_t stream = 0) {
    if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
    const long long n = step_count(dt, T);
    const CounterRng rng(seed, stream);
    const double amp = eta * std::sqrt(dt);
    std::vector<double> v(x.size());
    if (!obs(0LL, 0.0, std::as_const(x))) return 0;
    for (long long s = 1; s <= n; ++s) {
        f(std::span<const double>(x), std::span<double>(v));
        if (eta > 0.0) {
            for (std::size_t i = 0; i < x.size(); i += 2) {
                const auto [z0, z1] = rng.normal_pair(static_cast<std::uint64_t>(s), i / 2);
                x[i] += dt * v[i] + amp * z0;
                if (i + 1 < x.size()) x[i + 1] += dt * v[i + 1] + amp * z1;
            }
        } else {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * v[i];
        }
        check_finite(x, s);
        if (wrap) wrap_all(x);
        if (!obs(s, static_cast<double>(s) * dt, std::as_const(x))) return s;
    }
    return n;
}

template <VectorField F>
Trajectory integrate_em(const F& f, std::span<const double> x0, double dt, double T, double eta, std::uint64_t seed,
                        IntegrateOptions opt = {}, std::uint64_t stream = 0) {
    if (opt.stride == 0) throw std::invalid_argument("stride must be >= 1");
    Trajectory traj;
    traj.dt = dt;
    traj.seed = seed;
    traj.eta = eta;
    std::vector<double> x(x0.begin(), x0.end());
    if (opt.wrap) wrap_all(x);
    integrate_em_observe(
        f, x, dt, T, eta, seed,
        [&](long long s, double t, const std::vector<double>& state) {
            if (s % static_cast<long long>(opt.stride) == 0) {
                traj.times.push_back(t);
                traj.states.push_back(state);
            }
            return true;
        },
        opt.wrap, stream);
    return traj;
}

/// Central-difference Jacobian, entry (i,j) = [f_i(x + h e_j) - f_i(x - h e_j)] / 2h.
template <VectorField F>
Eigen::MatrixXd jacobian_fd(const F& f, std::span<const double> x, double h = 1e-6) {
    if (!(h > 0.0)) throw std::invalid_argument("jacobian_fd: h must be > 0");
    const std::size_t n = x.size();
    Eigen::MatrixXd J(n, n);
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> fp(n), fm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double orig = xp[j];
        xp[j] = orig + h;
        f(std::span<const double>(xp), std::span<double>(fp));
        xp[j] = orig - h;
        f(std::span<const double>(xp), std::span<double>(fm));
        xp[j] = orig;
        for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return J;
}

struct EigenData {
    Eigen::VectorXcd values;   // sorted by real part, descending
    Eigen::MatrixXcd vectors;  // column i pairs with values(i), unit 2-norm
    int dimension = 0;
};

/// Full eigendecomposition of a real n x n matrix, 1 <= n <= 8.
/// n <= 2 uses the closed-form quadratic; larger n uses a Hessenberg/QR solver.
/// Throws NumericalError if the solver fails or a residual exceeds 1e-8.
EigenData eigen_small(const Eigen::MatrixXd& A);

struct Itinerary {
    std::vector<Word> symbols;
    std::vector<double> entry;
    std::vector<double> exit;

    std::size_t size() const { return symbols.size(); }
};

/// Streaming symbolic coding with hysteresis: a symbol opens when the
/// infinity-norm circular distance to its equilibrium drops below eps_near and
/// closes once it exceeds eps_leave. Re-entering the last symbol extends it.
class ItineraryTracker {
public:
    ItineraryTracker(std::vector<Word> words, double eps_near = 0.1, double eps_leave = 0.3);

    void feed(double t, std::span<const double> psi);
    /// Closes any open symbol at time t and returns the result.
    Itinerary finish(double t);
    const Itinerary& current() const { return out_; }

private:
    std::vector<Word> words_;
    std::vector<std::vector<double>> points_;
    double eps_near_;
    double eps_leave_;
    int open_ = -1;
    double last_t_ = 0.0;
    Itinerary out_;
};

Itinerary itinerary(const Trajectory& traj, const std::vector<Word>& words, double eps_near = 0.1,
                    double eps_leave = 0.3);

struct OmegaTarget {
    std::string label;
    std::vector<double> point;
};

std::vector<OmegaTarget> word_targets(const std::vector<Word>& words);

/// Integrates with RK4 until the state has stayed within tol (infinity-norm,
/// circular) of one target for the trailing 10% of elapsed time; returns its
/// label, or nullopt at T_max.
template <VectorField F>
std::optional<std::string> classify_omega_limit(const F& f, std::span<const double> x0, double T_max, double tol,
                                                const std::vector<OmegaTarget>& targets, double dt = 0.01) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify_omega_limit: tol must be > 0");
    std::vector<double> x(x0.begin(), x0.end());
    wrap_all(x);
    int inside = -1;
    double t_entry = 0.0;
    std::optional<std::string> result;
    integrate_rk4_observe(f, x, dt, T_max, [&](long long, double t, const std::vector<double>& state) {
        int hit = -1;
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (circular_distance_inf(state, targets[i].point) < tol) {
                hit = static_cast<int>(i);
                break;
            }
        if (hit != inside) {
            inside = hit;
            t_entry = t;
        }
        if (inside >= 0 && t - t_entry >= 0.1 * t) {
            result = targets[static_cast<std::size_t>(inside)].label;
            return false;
        }
        return true;
    });
    return result;
}

/// CSV with header t,<prefix>_1,...; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix = "psi");

}  // namespace hetcycle
