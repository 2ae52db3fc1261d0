#pragma once

// Coupling functions and vector fields of M populations of N phase oscillators.
//
// Two models are provided:
//   FullPhaseShift     theta'_{s,k} = w + sum_{j!=k} g(theta_{s,j} - theta_{s,k} + K dalpha_s)
//                      with dalpha_s = sum_{t!=s} K_{st} (1 - R_t^2),
//   NonpairwiseApprox  its first-order expansion in K:
//                      theta'_{s,k} = w + sum_{j!=k} [ g2_s(v) + K sum_t K_{st} g4(theta_t; v) ].
// For M=3 and M=4 with the built-in coupling matrices the second one is the
// system studied for the heteroclinic cycle and network.

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "hetcycle/model.hpp"

namespace hetcycle {

enum class FieldKind { FullPhaseShift, NonpairwiseApprox };

/// g(v) = sin(v + alpha) - r sin(a (v + alpha)).
double g(double theta, const ModelParams& p);

/// Derivative of g.
double g_prime(double theta, const ModelParams& p);

/// g4(theta_tau; v) = -(1/N^2) sum_{p != q} cos(theta_{tau,p} - theta_{tau,q} + v + alpha).
double g4(std::span<const double> theta_tau, double theta, const ModelParams& p);

/// g2_sigma(v) = g(v) + K (1 - 1/N) K_sigma cos(v + alpha); sigma is 0-based.
double g2(double theta, int sigma, const ModelParams& p);

/// Kuramoto order parameter Z = (1/N) sum_j exp(i theta_j).
std::complex<double> order_parameter(std::span<const double> theta_sigma);

/// |Z|^2 computed without the complex exponential.
double order_parameter_sq(std::span<const double> theta_sigma);

/// Full-phase vector field evaluated into a caller-provided buffer.
class PhaseField {
public:
    PhaseField(ModelParams params, FieldKind kind);

    void operator()(std::span<const double> theta, std::span<double> out) const;
    std::size_t dimension() const { return static_cast<std::size_t>(params_.M * params_.N); }
    const ModelParams& params() const { return params_; }
    FieldKind kind() const { return kind_; }

private:
    ModelParams params_;
    FieldKind kind_;
    double sin_alpha_;
    double cos_alpha_;
    std::vector<double> coupling_;  // row-major copy of K_{st}
    mutable std::vector<double> shift_;
    mutable std::vector<double> one_minus_r2_;
};

/// Reduced field: lifts psi with base 0, evaluates the phase field and differences.
/// Holds scratch buffers, so use one instance per thread.
class ReducedField {
public:
    ReducedField(ModelParams params, FieldKind kind);

    void operator()(std::span<const double> psi, std::span<double> out) const;
    std::size_t dimension() const { return static_cast<std::size_t>(phase_.params().M * (phase_.params().N - 1)); }
    const ModelParams& params() const { return phase_.params(); }

private:
    PhaseField phase_;
    mutable std::vector<double> theta_;
    mutable std::vector<double> velocity_;
};

/// Reduced field for N = 2 written directly in the phase differences, with
/// ks = K sum_t K_st (1 - cos psi_t) / 2:
///   Nonpairwise  psi'_s = -2 cos(alpha) sin(psi_s) + 2 r cos(a alpha) sin(a psi_s) + 2 sin(alpha) sin(psi_s) ks
///   Full         psi'_s = g(-psi_s + ks) - g(psi_s + ks)
/// Numerically equivalent to ReducedField but several times cheaper.
class ReducedFieldN2 {
public:
    ReducedFieldN2(ModelParams params, FieldKind kind);

    void operator()(std::span<const double> psi, std::span<double> out) const;
    std::size_t dimension() const { return static_cast<std::size_t>(params_.M); }
    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    FieldKind kind_;
    double two_cos_alpha_;
    double two_sin_alpha_;
    double two_r_cos_a_alpha_;
    std::vector<double> coupling_;
    mutable std::vector<double> sin_;
    mutable std::vector<double> half_one_minus_cos_;
};

std::vector<double> rhs_full(const PhaseState& theta, const ModelParams& p);
std::vector<double> rhs_nonpairwise(const PhaseState& theta, const ModelParams& p);
std::vector<double> rhs_reduced(const ReducedState& psi, const ModelParams& p,
                                FieldKind kind = FieldKind::NonpairwiseApprox);

/// Dynamics of (psi3, psi4) on the invariant subspace S D psi3 psi4 (M = 4, N = 2).
/// At alpha = pi/2 this is the explicit two-dimensional system; otherwise the
/// reduced nonpairwise field restricted to psi1 = 0, psi2 = pi.
std::array<double, 2> rhs_sd_subspace(double psi3, double psi4, const ModelParams& p);

/// rhs_sd_subspace as a vector field on R^2.
class SdSubspaceField {
public:
    explicit SdSubspaceField(ModelParams params);

    void operator()(std::span<const double> x, std::span<double> out) const;
    std::size_t dimension() const { return 2; }

private:
    ModelParams params_;
    bool explicit_form_;
    ReducedField reduced_;
    mutable std::array<double, 4> psi_{};
    mutable std::array<double, 4> vel_{};
};

}  // namespace hetcycle
