#pragma once

// Stability of quasi-simple heteroclinic cycles from transition matrices:
// the index function F^ind, conditions (A)-(C), the AS/CU dichotomy for the
// M = 3 cycle and the six-index formula for the cycles of the M = 4 network.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetcycle/model.hpp"
#include "hetcycle/spectra.hpp"

namespace hetcycle {

/// Extended real with explicit infinities.
class IndexValue {
public:
    enum class Kind { NegInfinity, Finite, PosInfinity };

    static IndexValue neg_inf() { return IndexValue(Kind::NegInfinity, 0.0); }
    static IndexValue pos_inf() { return IndexValue(Kind::PosInfinity, 0.0); }
    static IndexValue finite(double v) { return IndexValue(Kind::Finite, v); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_pos_inf() const { return kind_ == Kind::PosInfinity; }
    bool is_neg_inf() const { return kind_ == Kind::NegInfinity; }
    /// Finite value; throws std::logic_error on an infinity.
    double value() const;
    /// As a double, mapping the infinities to +-HUGE_VAL.
    double as_double() const;
    /// "inf", "-inf" or the number with 17 significant digits.
    std::string to_string() const;

    bool positive() const { return is_pos_inf() || (is_finite() && value_ > 0.0); }
    bool negative() const { return is_neg_inf() || (is_finite() && value_ < 0.0); }

    friend bool operator==(const IndexValue&, const IndexValue&) = default;
    friend bool operator<(const IndexValue& x, const IndexValue& y);

private:
    IndexValue(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

struct FindResult {
    IndexValue value;
    bool boundary;  // |sum| within 10x of the zero-sum tolerance
};

inline constexpr double kFindZeroTol = 1e-12;

/// F^ind(beta) for a nonzero vector of any length. Throws std::invalid_argument for beta = 0.
FindResult f_ind_checked(std::span<const double> beta);
IndexValue f_ind(std::span<const double> beta);

struct TransitionMatrix {
    Eigen::MatrixXd entries;
    SaddleData saddle;
};

/// [[b,1],[a,0]] for dim 2, [[b,1,0],[a,0,0],[b_perp,0,1]] for dim 3.
TransitionMatrix transition_matrix(const SaddleData& saddle, int dim);
Eigen::MatrixXd transition_matrix(double a, double b, std::optional<double> b_perp = std::nullopt);

struct AbcResult {
    bool A = false;
    bool B = false;
    bool C = false;
    bool boundary = false;
    std::complex<double> lambda_max;
    Eigen::VectorXd u_max;  // real part, unit norm; empty when A fails
    bool all() const { return A && B && C; }
};

/// Conditions (A)-(C) for the eigenvalue of largest modulus.
AbcResult check_abc(const Eigen::MatrixXd& M);

struct EigPair2 {
    double lambda1, lambda2;
    Eigen::Vector2d u1, u2;  // first component normalized to 1
};

/// Eigenpairs of [[b1 b2 + a2, b1], [a1 b2, a1]] by the radical formulas.
/// Requires b1 != 0 and a nonnegative discriminant.
EigPair2 eigpair_2x2_closed(double a1, double b1, double a2, double b2);

/// M_{q+Q-1} ... M_{q+1} M_q with indices mod Q (0-based q); with 1-based
/// labels this is M^{(q+1)}.
Eigen::MatrixXd cyclic_product(const std::vector<Eigen::MatrixXd>& mats, int q);

enum class StabilityClass {
    AsymptoticallyStable,
    EssentiallyAS,
    FragmentarilyAS,
    CompletelyUnstable,
    Boundary,
    NotApplicable
};

std::string to_string(StabilityClass c);

struct StabilityReport {
    std::string cycle;
    StabilityClass cls = StabilityClass::NotApplicable;
    std::vector<IndexValue> sigma;  // sigma[k]: connection into equilibria[k]
    std::vector<SaddleData> saddles;
    std::vector<Eigen::MatrixXd> matrices;
    std::vector<double> mu, nu;
    std::optional<AbcResult> abc;
    bool boundary = false;
    std::vector<std::string> notes;
};

/// AS/CU classification of a cycle from its 2x2 transition matrices (one
/// transverse direction per saddle); uses the nonnegative-entry dichotomy or,
/// with negative entries, conditions (A)-(C) on every cyclic product.
StabilityReport classify_cycle_2d(const CycleSpec& cycle, const ModelParams& p);

/// classify_cycle_2d for C2 after the existence and linearizability checks.
StabilityReport classify_m3(const ModelParams& p);

/// Six stability indices of C2_hat or C2_check inside the M = 4 network.
/// sigma_q = F^ind(mu_q, nu_q, 1), computed by the backward recursion and by
/// the last rows of M_1 M_6 ... M_q; the two must agree to 1e-12.
StabilityReport network_cycle_indices(const ModelParams& p, const CycleSpec& cycle);

struct NetworkReport {
    StabilityClass cls = StabilityClass::NotApplicable;
    std::string rule;
    StabilityReport hat;
    StabilityReport check;
};

NetworkReport network_report(const ModelParams& p);

struct LocalMapResult {
    double v, w, z;
    std::optional<double> z_perp;
    double time_of_flight;
};

/// Linearized passage from the in-section |v| = 1 to the out-section |w| = 1:
/// (+-1, w, z, z_perp) -> (w^a, +-1, w^b z, w^{b_perp} z_perp). Requires 0 < w <= 1.
LocalMapResult local_map(double w, double z, const SaddleData& saddle, std::optional<double> z_perp = std::nullopt,
                         double v_sign = 1.0);

}  // namespace hetcycle
