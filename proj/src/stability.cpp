#include "hetcycle/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hetcycle/numerics.hpp"

namespace hetcycle {

double IndexValue::value() const {
    if (kind_ != Kind::Finite) throw std::logic_error("IndexValue is infinite");
    return value_;
}

double IndexValue::as_double() const {
    switch (kind_) {
        case Kind::NegInfinity: return -HUGE_VAL;
        case Kind::PosInfinity: return HUGE_VAL;
        default: return value_;
    }
}

std::string IndexValue::to_string() const {
    if (kind_ == Kind::PosInfinity) return "inf";
    if (kind_ == Kind::NegInfinity) return "-inf";
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

bool operator<(const IndexValue& x, const IndexValue& y) { return x.as_double() < y.as_double(); }

FindResult f_ind_checked(std::span<const double> beta) {
    if (beta.empty()) throw std::invalid_argument("f_ind: empty argument");
    const auto [mn, mx] = std::minmax_element(beta.begin(), beta.end());
    if (*mn == 0.0 && *mx == 0.0) throw std::invalid_argument("f_ind: beta must be nonzero");
    const double sum = std::accumulate(beta.begin(), beta.end(), 0.0);
    const bool boundary = std::abs(sum) < 10.0 * kFindZeroTol;
    if (*mn >= 0.0) return {IndexValue::pos_inf(), boundary};
    if (*mx <= 0.0) return {IndexValue::neg_inf(), boundary};
    if (std::abs(sum) <= kFindZeroTol) return {IndexValue::finite(0.0), boundary};
    if (sum > 0.0) return {IndexValue::finite(-sum / *mn), boundary};
    return {IndexValue::finite(sum / *mx), boundary};
}

IndexValue f_ind(std::span<const double> beta) { return f_ind_checked(beta).value; }

Eigen::MatrixXd transition_matrix(double a, double b, std::optional<double> b_perp) {
    if (!b_perp) {
        Eigen::MatrixXd m(2, 2);
        m << b, 1.0, a, 0.0;
        return m;
    }
    Eigen::MatrixXd m(3, 3);
    m << b, 1.0, 0.0, a, 0.0, 0.0, *b_perp, 0.0, 1.0;
    return m;
}

TransitionMatrix transition_matrix(const SaddleData& saddle, int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("transition matrices are 2x2 or 3x3");
    if (!std::isfinite(saddle.a()) || !std::isfinite(saddle.b()) || !std::isfinite(saddle.b_perp()))
        throw std::domain_error("saddle ratios must be finite");
    if (dim == 3 && !saddle.t_perp) throw std::invalid_argument("3x3 transition matrix needs t_perp");
    return {dim == 2 ? transition_matrix(saddle.a(), saddle.b())
                     : transition_matrix(saddle.a(), saddle.b(), saddle.b_perp()),
            saddle};
}

AbcResult check_abc(const Eigen::MatrixXd& M) {
    const EigenData ed = eigen_small(M);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < ed.values.size(); ++i) {
        const double mi = std::abs(ed.values(i)), mb = std::abs(ed.values(best));
        // Prefer a real eigenvalue on modulus ties.
        if (mi > mb * (1.0 + 1e-14) ||
            (mi >= mb * (1.0 - 1e-14) && std::abs(ed.values(i).imag()) < std::abs(ed.values(best).imag())))
            best = i;
    }
    AbcResult r;
    r.lambda_max = ed.values(best);
    const double scale = std::max(1.0, std::abs(r.lambda_max));
    r.A = std::abs(r.lambda_max.imag()) <= 1e-12 * scale;
    if (!r.A) return r;
    r.B = r.lambda_max.real() > 1.0;
    if (std::abs(r.lambda_max.real() - 1.0) <= 1e-12) r.boundary = true;

    // Rotate the complex eigenvector onto the real axis before taking its real part.
    Eigen::VectorXcd v = ed.vectors.col(best);
    Eigen::Index piv = 0;
    v.cwiseAbs().maxCoeff(&piv);
    v *= std::conj(v(piv)) / std::abs(v(piv));
    r.u_max = v.real();
    r.u_max /= r.u_max.norm();

    double min_prod = HUGE_VAL;
    for (Eigen::Index m = 0; m < r.u_max.size(); ++m)
        for (Eigen::Index n = 0; n < r.u_max.size(); ++n) min_prod = std::min(min_prod, r.u_max(m) * r.u_max(n));
    r.C = min_prod > 1e-10;
    if (std::abs(min_prod) <= 1e-10) r.boundary = true;
    return r;
}

EigPair2 eigpair_2x2_closed(double a1, double b1, double a2, double b2) {
    if (b1 == 0.0) throw std::domain_error("eigpair_2x2_closed requires b1 != 0");
    const double d = a1 - a2 - b1 * b2;
    const double disc = d * d + 4.0 * a1 * b1 * b2;
    if (disc < 0.0) throw std::domain_error("eigpair_2x2_closed: complex eigenvalues");
    const double sq = std::sqrt(disc);
    EigPair2 r;
    r.lambda1 = 0.5 * (a1 + a2 + b1 * b2 + sq);
    r.lambda2 = 0.5 * (a1 + a2 + b1 * b2 - sq);
    r.u1 = Eigen::Vector2d(1.0, (d + sq) / (2.0 * b1));
    r.u2 = Eigen::Vector2d(1.0, (d - sq) / (2.0 * b1));
    return r;
}

Eigen::MatrixXd cyclic_product(const std::vector<Eigen::MatrixXd>& mats, int q) {
    const int Q = static_cast<int>(mats.size());
    if (Q == 0) throw std::invalid_argument("cyclic_product: no matrices");
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(mats.front().rows(), mats.front().cols());
    for (int k = 0; k < Q; ++k) P = mats[static_cast<std::size_t>(((q + k) % Q + Q) % Q)] * P;
    return P;
}

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::AsymptoticallyStable: return "AsymptoticallyStable";
        case StabilityClass::EssentiallyAS: return "EssentiallyAS";
        case StabilityClass::FragmentarilyAS: return "FragmentarilyAS";
        case StabilityClass::CompletelyUnstable: return "CompletelyUnstable";
        case StabilityClass::Boundary: return "Boundary";
        case StabilityClass::NotApplicable: return "NotApplicable";
    }
    return "?";
}

namespace {

bool has_negative_entry(const Eigen::MatrixXd& m) { return (m.array() < 0.0).any(); }

void fill_all(StabilityReport& rep, IndexValue v) { rep.sigma.assign(rep.saddles.size(), v); }

// Min of F^ind over the rows with a negative entry of M_q, M_{q+1} M_q, ...
IndexValue index_from_rows(const std::vector<Eigen::MatrixXd>& mats, int q) {
    const int Q = static_cast<int>(mats.size());
    IndexValue best = IndexValue::pos_inf();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(mats.front().rows(), mats.front().cols());
    for (int k = 0; k < Q; ++k) {
        P = mats[static_cast<std::size_t>((q + k) % Q)] * P;
        for (Eigen::Index i = 0; i < P.rows(); ++i) {
            if (!(P.row(i).array() < 0.0).any()) continue;
            Eigen::VectorXd row = P.row(i).transpose();
            const IndexValue v = f_ind(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
            if (v < best) best = v;
        }
    }
    return best;
}

}  // namespace

StabilityReport classify_cycle_2d(const CycleSpec& cycle, const ModelParams& p) {
    StabilityReport rep;
    rep.cycle = cycle.name;
    const int Q = static_cast<int>(cycle.length());
    for (int q = 0; q < Q; ++q) {
        rep.saddles.push_back(saddle_data(cycle, q, p));
        rep.matrices.push_back(transition_matrix(rep.saddles.back(), 2).entries);
    }
    const bool nonneg = std::none_of(rep.matrices.begin(), rep.matrices.end(), has_negative_entry);
    if (nonneg) {
        const AbcResult abc = check_abc(cyclic_product(rep.matrices, 0));
        rep.abc = abc;
        const double mod = std::abs(abc.lambda_max);
        if (std::abs(mod - 1.0) <= 1e-12) {
            rep.cls = StabilityClass::Boundary;
            rep.boundary = true;
            rep.notes.push_back("|lambda_max| = 1 within tolerance");
            fill_all(rep, IndexValue::finite(0.0));
            return rep;
        }
        rep.notes.push_back("all transition matrices nonnegative");
        if (mod > 1.0) {
            rep.cls = StabilityClass::AsymptoticallyStable;
            fill_all(rep, IndexValue::pos_inf());
        } else {
            rep.cls = StabilityClass::CompletelyUnstable;
            fill_all(rep, IndexValue::neg_inf());
        }
        return rep;
    }

    rep.notes.push_back("negative transition-matrix entries: testing (A)-(C) on every cyclic product");
    bool all_ok = true;
    for (int q = 0; q < Q; ++q) {
        const AbcResult abc = check_abc(cyclic_product(rep.matrices, q));
        if (q == 0) rep.abc = abc;
        rep.boundary = rep.boundary || abc.boundary;
        if (!abc.all()) {
            all_ok = false;
            rep.abc = abc;
            rep.notes.push_back("(A)-(C) fail for the product starting at saddle " + std::to_string(q + 1));
            break;
        }
    }
    if (!all_ok) {
        rep.cls = StabilityClass::CompletelyUnstable;
        fill_all(rep, IndexValue::neg_inf());
        return rep;
    }
    rep.cls = StabilityClass::FragmentarilyAS;
    for (int q = 0; q < Q; ++q) rep.sigma.push_back(index_from_rows(rep.matrices, q));
    if (std::all_of(rep.sigma.begin(), rep.sigma.end(), [](const IndexValue& v) { return v.positive(); }))
        rep.cls = StabilityClass::EssentiallyAS;
    return rep;
}

StabilityReport classify_m3(const ModelParams& p) {
    const CycleSpec c2 = cycle_c2();
    StabilityReport rep;
    rep.cycle = c2.name;
    if (p.M != 3 || p.N != 2) throw UnsupportedError("classify_m3 requires M = 3, N = 2");
    const ExistenceReport ex = cycle_exists(c2, p);
    if (!ex.exists) {
        rep.cls = ex.boundary ? StabilityClass::Boundary : StabilityClass::NotApplicable;
        rep.boundary = ex.boundary;
        rep.notes = ex.reasons;
        return rep;
    }
    if (!nonresonance_ok(p)) {
        rep.cls = StabilityClass::Boundary;
        rep.boundary = true;
        rep.notes.push_back("nonresonance conditions violated");
        return rep;
    }
    return classify_cycle_2d(c2, p);
}

StabilityReport network_cycle_indices(const ModelParams& p, const CycleSpec& cycle) {
    StabilityReport rep;
    rep.cycle = cycle.name;
    if (p.M != 4 || p.N != 2) throw UnsupportedError("network indices require M = 4, N = 2");
    const ExistenceReport ex = network_exists(p);
    if (!ex.exists) {
        rep.cls = StabilityClass::NotApplicable;
        rep.boundary = ex.boundary;
        rep.notes = ex.reasons;
        return rep;
    }

    // Within the cycle's own subspace the 2x2 blocks must give asymptotic stability.
    const StabilityReport sub = classify_cycle_2d(cycle, p);
    if (sub.cls != StabilityClass::AsymptoticallyStable) {
        rep.cls = StabilityClass::NotApplicable;
        rep.boundary = sub.boundary;
        rep.notes.push_back("cycle is not asymptotically stable inside its subspace (" + to_string(sub.cls) + ")");
        return rep;
    }

    const int Q = static_cast<int>(cycle.length());
    for (int q = 0; q < Q; ++q) {
        rep.saddles.push_back(saddle_data(cycle, q, p));
        rep.matrices.push_back(transition_matrix(rep.saddles.back(), 3).entries);
    }
    for (int q = 1; q < Q; ++q)
        if (has_negative_entry(rep.matrices[static_cast<std::size_t>(q)]))
            rep.notes.push_back("M_" + std::to_string(q + 1) + " has a negative entry");

    // Recursion, processed from q = Q down to 2 with index Q+1 identified with 1.
    rep.mu.assign(static_cast<std::size_t>(Q), 0.0);
    rep.nu.assign(static_cast<std::size_t>(Q), 0.0);
    rep.mu[0] = rep.saddles[0].b_perp();
    rep.nu[0] = 0.0;
    for (int q = Q - 1; q >= 1; --q) {
        const std::size_t next = static_cast<std::size_t>((q + 1) % Q);
        const SaddleData& s = rep.saddles[static_cast<std::size_t>(q)];
        rep.mu[static_cast<std::size_t>(q)] = s.b() * rep.mu[next] + s.a() * rep.nu[next] + s.b_perp();
        rep.nu[static_cast<std::size_t>(q)] = rep.mu[next];
    }

    // Product route: last row of M_1 M_Q ... M_q.
    Eigen::MatrixXd P = rep.matrices[0];
    for (int q = 0; q < Q; ++q) {
        if (q > 0) {
            P = rep.matrices[0];
            for (int k = Q - 1; k >= q; --k) P = P * rep.matrices[static_cast<std::size_t>(k)];
        }
        const double mu = P(2, 0), nu = P(2, 1), last = P(2, 2);
        const double tol = 1e-12 * std::max({1.0, std::abs(mu), std::abs(nu)});
        if (std::abs(mu - rep.mu[static_cast<std::size_t>(q)]) > tol ||
            std::abs(nu - rep.nu[static_cast<std::size_t>(q)]) > tol || last != 1.0)
            throw NumericalError("recursion and product routes disagree at q = " + std::to_string(q + 1), q);
    }

    const AbcResult abc = check_abc(cyclic_product(rep.matrices, 1));
    rep.abc = abc;
    rep.boundary = abc.boundary;
    if (!abc.C) {
        rep.cls = StabilityClass::CompletelyUnstable;
        fill_all(rep, IndexValue::neg_inf());
        rep.notes.push_back("M^(2) violates condition (C)");
        return rep;
    }
    for (int q = 0; q < Q; ++q) {
        const std::array<double, 3> beta{rep.mu[static_cast<std::size_t>(q)], rep.nu[static_cast<std::size_t>(q)],
                                         1.0};
        const FindResult fr = f_ind_checked(beta);
        rep.sigma.push_back(fr.value);
        rep.boundary = rep.boundary || fr.boundary;
    }
    const bool all_pos =
        std::all_of(rep.sigma.begin(), rep.sigma.end(), [](const IndexValue& v) { return v.positive(); });
    rep.cls = all_pos ? StabilityClass::EssentiallyAS : StabilityClass::FragmentarilyAS;
    return rep;
}

namespace {

bool is_attracting(StabilityClass c) {
    return c == StabilityClass::FragmentarilyAS || c == StabilityClass::EssentiallyAS ||
           c == StabilityClass::AsymptoticallyStable;
}

// Indices of `other` on connections that are not edges of `cycle`.
bool nonshared_positive(const StabilityReport& other_rep, const CycleSpec& other, const CycleSpec& cycle) {
    if (other_rep.sigma.size() != other.length()) return false;
    const std::size_t Q = other.length();
    for (std::size_t k = 0; k < Q; ++k) {
        const Word& from = other.equilibria[(k + Q - 1) % Q];
        const Word& to = other.equilibria[k];
        if (cycle.has_edge(from, to)) continue;
        if (!other_rep.sigma[k].positive()) return false;
    }
    return true;
}

}  // namespace

NetworkReport network_report(const ModelParams& p) {
    NetworkReport out;
    const CycleSpec hat = cycle_c2_hat(), check = cycle_c2_check();
    out.hat = network_cycle_indices(p, hat);
    out.check = network_cycle_indices(p, check);
    if (out.hat.cls == StabilityClass::NotApplicable || out.check.cls == StabilityClass::NotApplicable) {
        out.cls = StabilityClass::NotApplicable;
        out.rule = "network cycle indices not applicable";
        return out;
    }
    if (out.hat.cls == StabilityClass::EssentiallyAS && nonshared_positive(out.check, check, hat)) {
        out.cls = StabilityClass::EssentiallyAS;
        out.rule = "C2_hat e.a.s. and C2_check has positive indices off the shared connections";
        return out;
    }
    if (out.check.cls == StabilityClass::EssentiallyAS && nonshared_positive(out.hat, hat, check)) {
        out.cls = StabilityClass::EssentiallyAS;
        out.rule = "C2_check e.a.s. and C2_hat has positive indices off the shared connections";
        return out;
    }
    if (is_attracting(out.hat.cls) || is_attracting(out.check.cls)) {
        out.cls = StabilityClass::FragmentarilyAS;
        out.rule = std::string(is_attracting(out.hat.cls) ? "C2_hat" : "C2_check") + " f.a.s.";
        return out;
    }
    out.cls = StabilityClass::NotApplicable;
    out.rule = "no network rule applies";
    return out;
}

LocalMapResult local_map(double w, double z, const SaddleData& saddle, std::optional<double> z_perp, double v_sign) {
    if (!(w > 0.0 && w <= 1.0)) throw std::domain_error("local_map requires 0 < w <= 1");
    LocalMapResult r;
    r.v = std::pow(w, saddle.a());
    r.w = v_sign >= 0.0 ? 1.0 : -1.0;
    r.z = std::pow(w, saddle.b()) * z;
    if (z_perp) r.z_perp = std::pow(w, saddle.b_perp()) * *z_perp;
    r.time_of_flight = -std::log(w) / saddle.e;
    return r;
}

}  // namespace hetcycle
