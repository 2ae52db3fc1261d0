#include "hetcycle/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace hetcycle {

namespace {

constexpr double kZeroTol = 1e-12;

double splay_sum(const Word& w, const ModelParams& p, int s) {
    double acc = 0.0;
    for (int t = 0; t < p.M; ++t)
        if (t != s && w.is_splay(static_cast<std::size_t>(t))) acc += p.coupling(s, t);
    return acc;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::vector<double> eigenvalues_closed_form(const Word& word, const ModelParams& p, FieldKind kind) {
    if (p.N != 2) throw UnsupportedError("closed-form eigenvalues require N = 2; use jacobian_fd");
    if (static_cast<int>(word.size()) != p.M) throw std::invalid_argument("word length must equal M");
    std::vector<double> out(static_cast<std::size_t>(p.M));
    for (int s = 0; s < p.M; ++s) {
        const double psi = word.is_splay(static_cast<std::size_t>(s)) ? kPi : 0.0;
        const double delta_s = splay_sum(word, p, s);
        if (kind == FieldKind::NonpairwiseApprox) {
            out[static_cast<std::size_t>(s)] =
                -2.0 * g_prime(psi, p) + 2.0 * p.K * std::sin(p.alpha) * std::cos(psi) * delta_s;
        } else {
            out[static_cast<std::size_t>(s)] = -2.0 * g_prime(psi + p.K * delta_s, p);
        }
    }
    return out;
}

SaddleData saddle_data(const CycleSpec& cycle, int q, const ModelParams& p) {
    const int Q = static_cast<int>(cycle.length());
    if (q < 0 || q >= Q) throw std::out_of_range("saddle index out of range");
    SaddleData s;
    s.word = cycle.equilibria[static_cast<std::size_t>(q)];
    s.q = q;
    s.coord_in = cycle.connection_coords[static_cast<std::size_t>((q - 1 + Q) % Q)];
    s.coord_out = cycle.connection_coords[static_cast<std::size_t>(q)];
    for (int i : cycle.active_coords())
        if (i != s.coord_in && i != s.coord_out) s.coord_t = i;
    const auto frozen = cycle.frozen_coords();
    if (frozen.size() > 1) throw UnsupportedError("more than one frozen coordinate");
    if (!frozen.empty()) s.coord_perp = frozen.front();

    const auto lam = eigenvalues_closed_form(s.word, p);
    s.c = -lam[static_cast<std::size_t>(s.coord_in)];
    s.e = lam[static_cast<std::size_t>(s.coord_out)];
    s.t = s.coord_t >= 0 ? lam[static_cast<std::size_t>(s.coord_t)] : 0.0;
    if (s.coord_perp >= 0) s.t_perp = lam[static_cast<std::size_t>(s.coord_perp)];
    if (!(s.c > 0.0) || !(s.e > 0.0))
        throw std::domain_error("not a saddle-sink connection at " + s.word.str() + " (c = " + fmt(s.c) +
                                ", e = " + fmt(s.e) + ")");
    return s;
}

ExistenceReport cycle_exists(const CycleSpec& cycle, const ModelParams& p) {
    ExistenceReport rep;
    rep.exists = true;
    if (p.N != 2) {
        rep.exists = false;
        rep.reasons.push_back("cycles are defined only for N = 2");
        return rep;
    }
    if (cycle.dimension() != p.M) {
        rep.exists = false;
        rep.reasons.push_back("cycle dimension does not match M");
        return rep;
    }
    const std::size_t Q = cycle.length();
    for (std::size_t q = 0; q < Q; ++q) {
        const Word& from = cycle.equilibria[q];
        const Word& to = cycle.equilibria[(q + 1) % Q];
        const auto i = static_cast<std::size_t>(cycle.connection_coords[q]);
        const double out_rate = eigenvalues_closed_form(from, p)[i];
        const double in_rate = eigenvalues_closed_form(to, p)[i];
        if (std::abs(out_rate) < kZeroTol || std::abs(in_rate) < kZeroTol) rep.boundary = true;
        if (!(out_rate > 0.0)) {
            rep.exists = false;
            rep.reasons.push_back(from.str() + ": outgoing rate along psi_" + std::to_string(i + 1) + " = " +
                                  fmt(out_rate) + " is not positive");
        }
        if (!(in_rate < 0.0)) {
            rep.exists = false;
            rep.reasons.push_back(to.str() + ": incoming rate along psi_" + std::to_string(i + 1) + " = " +
                                  fmt(in_rate) + " is not negative");
        }
    }
    return rep;
}

ExistenceReport network_exists(const ModelParams& p) {
    ExistenceReport rep;
    rep.exists = true;
    for (const CycleSpec& c : {cycle_c2_hat(), cycle_c2_check()}) {
        const auto r = cycle_exists(c, p);
        rep.exists = rep.exists && r.exists;
        rep.boundary = rep.boundary || r.boundary;
        for (const auto& s : r.reasons) rep.reasons.push_back(c.name + ": " + s);
    }
    return rep;
}

std::vector<Word> network_words() {
    std::set<Word> s;
    for (const CycleSpec& c : {cycle_c2_hat(), cycle_c2_check()})
        for (const Word& w : c.equilibria) s.insert(w);
    return {s.begin(), s.end()};
}

bool nonresonance_ok(const ModelParams& p) {
    if (p.N != 2) throw UnsupportedError("nonresonance conditions are implemented for N = 2");
    auto nz = [](double v) { return std::abs(v) > kZeroTol; };
    if (p.M == 3) {
        const double ca = std::cos(p.alpha), sa = std::sin(p.alpha), c2a = std::cos(2.0 * p.alpha);
        if (!nz(eigenvalues_closed_form(Word("DSS"), p)[0])) return false;
        if (!nz(eigenvalues_closed_form(Word("DDS"), p)[2])) return false;
        for (double s1 : {1.0, -1.0})
            if (!nz(2.0 * p.r * c2a + s1 * 3.0 * ca)) return false;
        for (double s1 : {1.0, -1.0})
            for (double s2 : {1.0, -1.0})
                if (!nz(4.0 * p.K * sa + s1 * 4.0 * p.r * c2a + s2 * 2.0 * ca)) return false;
        return true;
    }
    if (p.M != 4) throw UnsupportedError("nonresonance check implemented for M = 3 and M = 4");
    for (const Word& w : network_words()) {
        const auto lam = eigenvalues_closed_form(w, p);
        for (double l : lam)
            if (!nz(l)) return false;
        for (double lj : lam) {
            if (!(lj < 0.0)) continue;
            for (double lk : lam) {
                if (!(lk > 0.0)) continue;
                for (double l : lam)
                    if (!nz(l - lj - lk)) return false;
            }
        }
    }
    return true;
}

}  // namespace hetcycle
