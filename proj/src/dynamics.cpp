#include "hetcycle/dynamics.hpp"

#include <cmath>

namespace hetcycle {

double g(double theta, const ModelParams& p) {
    const double y = theta + p.alpha;
    return std::sin(y) - p.r * std::sin(p.a * y);
}

double g_prime(double theta, const ModelParams& p) {
    const double y = theta + p.alpha;
    return std::cos(y) - p.r * p.a * std::cos(p.a * y);
}

double g4(std::span<const double> theta_tau, double theta, const ModelParams& p) {
    const double n = static_cast<double>(theta_tau.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta_tau.size(); ++i)
        for (std::size_t j = 0; j < theta_tau.size(); ++j)
            if (i != j) sum += std::cos(theta_tau[i] - theta_tau[j] + theta + p.alpha);
    return -sum / (n * n);
}

double g2(double theta, int sigma, const ModelParams& p) {
    const double n = static_cast<double>(p.N);
    return g(theta, p) + p.K * (1.0 - 1.0 / n) * p.row_sum(sigma) * std::cos(theta + p.alpha);
}

std::complex<double> order_parameter(std::span<const double> theta_sigma) {
    std::complex<double> z{0.0, 0.0};
    for (double t : theta_sigma) z += std::polar(1.0, t);
    return z / static_cast<double>(theta_sigma.size());
}

double order_parameter_sq(std::span<const double> theta_sigma) {
    if (theta_sigma.size() == 2) return 0.5 * (1.0 + std::cos(theta_sigma[1] - theta_sigma[0]));
    double c = 0.0, s = 0.0;
    for (double t : theta_sigma) {
        c += std::cos(t);
        s += std::sin(t);
    }
    const double n = static_cast<double>(theta_sigma.size());
    return (c * c + s * s) / (n * n);
}

PhaseField::PhaseField(ModelParams params, FieldKind kind)
    : params_(std::move(params)),
      kind_(kind),
      sin_alpha_(std::sin(params_.alpha)),
      cos_alpha_(std::cos(params_.alpha)),
      shift_(static_cast<std::size_t>(params_.M)),
      one_minus_r2_(static_cast<std::size_t>(params_.M)) {
    params_.validate();
    const int M = params_.M;
    coupling_.resize(static_cast<std::size_t>(M * M));
    for (int s = 0; s < M; ++s)
        for (int t = 0; t < M; ++t) coupling_[static_cast<std::size_t>(s * M + t)] = params_.coupling(s, t);
}

void PhaseField::operator()(std::span<const double> theta, std::span<double> out) const {
    const int M = params_.M;
    const int N = params_.N;
    const std::size_t n = static_cast<std::size_t>(N);
    for (int s = 0; s < M; ++s)
        one_minus_r2_[static_cast<std::size_t>(s)] =
            1.0 - order_parameter_sq(theta.subspan(static_cast<std::size_t>(s) * n, n));
    for (int s = 0; s < M; ++s) {
        double acc = 0.0;
        for (int t = 0; t < M; ++t)
            if (t != s) acc += coupling_[static_cast<std::size_t>(s * M + t)] * one_minus_r2_[static_cast<std::size_t>(t)];
        shift_[static_cast<std::size_t>(s)] = acc;
    }

    const double r = params_.r;
    const int a = params_.a;
    const double K = params_.K;
    for (int s = 0; s < M; ++s) {
        const double kshift = K * shift_[static_cast<std::size_t>(s)];
        const double* th = theta.data() + static_cast<std::size_t>(s) * n;
        for (int k = 0; k < N; ++k) {
            double v = params_.omega;
            for (int j = 0; j < N; ++j) {
                if (j == k) continue;
                const double vartheta = th[j] - th[k];
                if (kind_ == FieldKind::FullPhaseShift) {
                    const double y = vartheta + kshift + params_.alpha;
                    v += std::sin(y) - r * std::sin(a * y);
                } else {
                    const double y = vartheta + params_.alpha;
                    const double sy = std::sin(y);
                    const double cy = std::cos(y);
                    const double harmonic = a == 2 ? 2.0 * sy * cy : std::sin(a * y);
                    v += sy - r * harmonic + kshift * cy;
                }
            }
            out[static_cast<std::size_t>(s * N + k)] = v;
        }
    }
}

ReducedField::ReducedField(ModelParams params, FieldKind kind)
    : phase_(std::move(params), kind),
      theta_(phase_.dimension()),
      velocity_(phase_.dimension()) {}

void ReducedField::operator()(std::span<const double> psi, std::span<double> out) const {
    const int M = phase_.params().M;
    const int N = phase_.params().N;
    for (int s = 0; s < M; ++s) {
        theta_[static_cast<std::size_t>(s * N)] = 0.0;
        for (int k = 1; k < N; ++k)
            theta_[static_cast<std::size_t>(s * N + k)] = psi[static_cast<std::size_t>(s * (N - 1) + k - 1)];
    }
    phase_(theta_, velocity_);
    for (int s = 0; s < M; ++s)
        for (int k = 1; k < N; ++k)
            out[static_cast<std::size_t>(s * (N - 1) + k - 1)] =
                velocity_[static_cast<std::size_t>(s * N + k)] - velocity_[static_cast<std::size_t>(s * N)];
}

ReducedFieldN2::ReducedFieldN2(ModelParams params, FieldKind kind)
    : params_(std::move(params)),
      kind_(kind),
      two_cos_alpha_(2.0 * std::cos(params_.alpha)),
      two_sin_alpha_(2.0 * std::sin(params_.alpha)),
      two_r_cos_a_alpha_(2.0 * params_.r * std::cos(params_.a * params_.alpha)),
      sin_(static_cast<std::size_t>(params_.M)),
      half_one_minus_cos_(static_cast<std::size_t>(params_.M)) {
    params_.validate();
    if (params_.N != 2) throw UnsupportedError("ReducedFieldN2 requires N = 2");
    const int M = params_.M;
    coupling_.resize(static_cast<std::size_t>(M * M));
    for (int s = 0; s < M; ++s)
        for (int t = 0; t < M; ++t) coupling_[static_cast<std::size_t>(s * M + t)] = params_.coupling(s, t);
}

void ReducedFieldN2::operator()(std::span<const double> psi, std::span<double> out) const {
    const std::size_t M = static_cast<std::size_t>(params_.M);
    for (std::size_t s = 0; s < M; ++s) {
        sin_[s] = std::sin(psi[s]);
        half_one_minus_cos_[s] = 0.5 * (1.0 - std::cos(psi[s]));
    }
    const int a = params_.a;
    for (std::size_t s = 0; s < M; ++s) {
        double acc = 0.0;
        for (std::size_t t = 0; t < M; ++t) acc += coupling_[s * M + t] * half_one_minus_cos_[t];
        const double ks = params_.K * acc;
        if (kind_ == FieldKind::NonpairwiseApprox) {
            const double sa = a == 2 ? 2.0 * sin_[s] * (1.0 - 2.0 * half_one_minus_cos_[s]) : std::sin(a * psi[s]);
            out[s] = (-two_cos_alpha_ + two_sin_alpha_ * ks) * sin_[s] + two_r_cos_a_alpha_ * sa;
        } else {
            out[s] = g(-psi[s] + ks, params_) - g(psi[s] + ks, params_);
        }
    }
}

namespace {

std::vector<double> eval_phase(const PhaseState& theta, const ModelParams& p, FieldKind kind) {
    if (theta.M != p.M || theta.N != p.N) throw std::invalid_argument("phase state does not match parameters");
    PhaseField f(p, kind);
    std::vector<double> out(f.dimension());
    f(theta.theta, out);
    return out;
}

}  // namespace

std::vector<double> rhs_full(const PhaseState& theta, const ModelParams& p) {
    return eval_phase(theta, p, FieldKind::FullPhaseShift);
}

std::vector<double> rhs_nonpairwise(const PhaseState& theta, const ModelParams& p) {
    return eval_phase(theta, p, FieldKind::NonpairwiseApprox);
}

std::vector<double> rhs_reduced(const ReducedState& psi, const ModelParams& p, FieldKind kind) {
    if (psi.M != p.M || psi.N != p.N) throw std::invalid_argument("reduced state does not match parameters");
    ReducedField f(p, kind);
    std::vector<double> out(f.dimension());
    f(psi.psi, out);
    return out;
}

namespace {

bool has_explicit_sd_form(const ModelParams& p) {
    return p.M == 4 && p.N == 2 && p.a == 2 && p.alpha == kPi / 2 &&
           (p.coupling - builtin_coupling(4, p.delta)).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

SdSubspaceField::SdSubspaceField(ModelParams params)
    : params_(params),
      explicit_form_(has_explicit_sd_form(params)),
      reduced_(std::move(params), FieldKind::NonpairwiseApprox) {
    if (params_.M != 4 || params_.N != 2)
        throw UnsupportedError("S D psi3 psi4 subspace requires M = 4, N = 2");
}

void SdSubspaceField::operator()(std::span<const double> x, std::span<double> out) const {
    if (explicit_form_) {
        const double K = params_.K;
        const double r = params_.r;
        const double d = params_.delta;
        const double s3 = std::sin(x[0]), c3 = std::cos(x[0]);
        const double s4 = std::sin(x[1]), c4 = std::cos(x[1]);
        out[0] = s3 * (K * c4 - 4.0 * r * c3 + K * (1.0 + 2.0 * d));
        out[1] = s4 * (K * c3 - 4.0 * r * c4 + K * (1.0 - 2.0 * d));
        return;
    }
    psi_ = {0.0, kPi, x[0], x[1]};
    reduced_(psi_, vel_);
    out[0] = vel_[2];
    out[1] = vel_[3];
}

std::array<double, 2> rhs_sd_subspace(double psi3, double psi4, const ModelParams& p) {
    SdSubspaceField f(p);
    std::array<double, 2> x{psi3, psi4};
    std::array<double, 2> out{};
    f(x, out);
    return out;
}

}  // namespace hetcycle
