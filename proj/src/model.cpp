#include "hetcycle/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hetcycle {

double wrap_angle(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2pi.
    if (y >= kTwoPi) y = 0.0;
    return y;
}

double circular_distance(double a, double b) {
    double d = std::abs(a - b);
    if (d >= kTwoPi) d = std::fmod(d, kTwoPi);
    return d > kPi ? kTwoPi - d : d;
}

double circular_distance_inf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, circular_distance(a[i], b[i]));
    return m;
}

Eigen::MatrixXd builtin_coupling(int M, double delta) {
    if (M == 3) {
        Eigen::MatrixXd k(3, 3);
        k << 0, -1, 1,
             1, 0, -1,
            -1, 1, 0;
        return k;
    }
    if (M == 4) {
        if (std::abs(delta) > 1.0) throw std::invalid_argument("delta must satisfy |delta| <= 1");
        Eigen::MatrixXd k(4, 4);
        k << 0, -1, 1, 1,
             1, 0, -1, -1,
            -1, 1 + delta, 0, -1,
            -1, 1 - delta, -1, 0;
        return k;
    }
    throw UnsupportedError("no built-in coupling for M = " + std::to_string(M));
}

ModelParams ModelParams::builtin(int M, double alpha, double K, double r, double delta) {
    ModelParams p;
    p.M = M;
    p.alpha = alpha;
    p.K = K;
    p.r = r;
    p.delta = M == 4 ? delta : 0.0;
    p.coupling = builtin_coupling(M, p.delta);
    return p;
}

ModelParams ModelParams::with_delta(double d) const {
    ModelParams p = *this;
    p.delta = d;
    if (M == 4) p.coupling = builtin_coupling(4, d);
    return p;
}

ModelParams ModelParams::with_r(double value) const {
    ModelParams p = *this;
    p.r = value;
    return p;
}

double ModelParams::row_sum(int sigma) const { return coupling.row(sigma).sum(); }

void ModelParams::validate() const {
    if (M < 2) throw std::invalid_argument("M must be >= 2");
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    if (a < 1) throw std::invalid_argument("harmonic index a must be a positive integer");
    if (K < 0.0) throw std::invalid_argument("K must be >= 0");
    if (std::abs(delta) > 1.0) throw std::invalid_argument("delta must satisfy |delta| <= 1");
    if (coupling.rows() != M || coupling.cols() != M)
        throw std::invalid_argument("coupling matrix must be M x M");
    for (int s = 0; s < M; ++s)
        if (coupling(s, s) != 0.0) throw std::invalid_argument("coupling diagonal must be zero");
    if (!std::isfinite(alpha) || !std::isfinite(r) || !std::isfinite(omega))
        throw std::invalid_argument("non-finite parameter");
}

PhaseState::PhaseState(int populations, int per_population, std::vector<double> values)
    : M(populations), N(per_population), theta(std::move(values)) {
    if (theta.size() != static_cast<std::size_t>(M * N))
        throw std::invalid_argument("phase state length must equal M*N");
    for (double v : theta)
        if (!std::isfinite(v)) throw std::invalid_argument("phase state entries must be finite");
}

std::span<const double> PhaseState::population(int sigma) const {
    return std::span<const double>(theta).subspan(static_cast<std::size_t>(sigma * N),
                                                  static_cast<std::size_t>(N));
}

ReducedState::ReducedState(int populations, int per_population, std::vector<double> values)
    : M(populations), N(per_population), psi(std::move(values)) {
    if (psi.size() != static_cast<std::size_t>(M * (N - 1)))
        throw std::invalid_argument("reduced state length must equal M*(N-1)");
}

ReducedState reduce(const PhaseState& theta) {
    std::vector<double> psi;
    psi.reserve(static_cast<std::size_t>(theta.M * (theta.N - 1)));
    for (int s = 0; s < theta.M; ++s)
        for (int k = 1; k < theta.N; ++k) psi.push_back(wrap_angle(theta.at(s, k) - theta.at(s, 0)));
    return ReducedState(theta.M, theta.N, std::move(psi));
}

PhaseState lift(const ReducedState& psi, std::span<const double> base) {
    if (base.size() != static_cast<std::size_t>(psi.M))
        throw std::invalid_argument("lift: base must have one angle per population");
    std::vector<double> theta;
    theta.reserve(static_cast<std::size_t>(psi.M * psi.N));
    for (int s = 0; s < psi.M; ++s) {
        theta.push_back(wrap_angle(base[s]));
        for (int k = 0; k < psi.N - 1; ++k)
            theta.push_back(wrap_angle(base[s] + psi.psi[static_cast<std::size_t>(s * (psi.N - 1) + k)]));
    }
    return PhaseState(psi.M, psi.N, std::move(theta));
}

Word::Word(std::string_view letters) : letters_(letters) {
    if (letters_.empty()) throw std::invalid_argument("empty equilibrium word");
    for (char c : letters_)
        if (c != 'S' && c != 'D') throw std::invalid_argument("equilibrium word letters must be S or D: " + letters_);
}

Word Word::flipped(std::size_t i) const {
    Word w = *this;
    w.letters_[i] = letters_[i] == 'S' ? 'D' : 'S';
    return w;
}

std::vector<double> Word::point() const {
    std::vector<double> p(letters_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = is_splay(i) ? kPi : 0.0;
    return p;
}

std::vector<Word> Word::all(int M) {
    std::vector<Word> out;
    for (int mask = 0; mask < (1 << M); ++mask) {
        std::string s(static_cast<std::size_t>(M), 'S');
        for (int i = 0; i < M; ++i)
            if (mask & (1 << (M - 1 - i))) s[static_cast<std::size_t>(i)] = 'D';
        out.emplace_back(s);
    }
    return out;
}

ReducedState equilibrium_state(const Word& word, int N) {
    if (N != 2) throw UnsupportedError("equilibrium words are defined only for N = 2");
    const int M = static_cast<int>(word.size());
    return ReducedState(M, 2, word.point());
}

CycleSpec::CycleSpec(std::string cycle_name, std::vector<Word> words)
    : name(std::move(cycle_name)), equilibria(std::move(words)) {
    if (equilibria.size() < 2) throw std::invalid_argument("a cycle needs at least two equilibria");
    const std::size_t Q = equilibria.size();
    for (std::size_t q = 0; q < Q; ++q) {
        const Word& from = equilibria[q];
        const Word& to = equilibria[(q + 1) % Q];
        if (from.size() != to.size()) throw std::invalid_argument("cycle words differ in length");
        int changed = -1;
        int count = 0;
        for (std::size_t i = 0; i < from.size(); ++i)
            if (from[i] != to[i]) {
                changed = static_cast<int>(i);
                ++count;
            }
        if (count != 1)
            throw std::invalid_argument("consecutive cycle words must differ in exactly one letter: " +
                                        from.str() + " -> " + to.str());
        connection_coords.push_back(changed);
    }
}

std::vector<int> CycleSpec::active_coords() const {
    std::set<int> s(connection_coords.begin(), connection_coords.end());
    return {s.begin(), s.end()};
}

std::vector<int> CycleSpec::frozen_coords() const {
    const auto act = active_coords();
    std::vector<int> out;
    for (int i = 0; i < dimension(); ++i)
        if (std::find(act.begin(), act.end(), i) == act.end()) out.push_back(i);
    return out;
}

bool CycleSpec::contains(const Word& w) const {
    return std::find(equilibria.begin(), equilibria.end(), w) != equilibria.end();
}

bool CycleSpec::has_edge(const Word& from, const Word& to) const {
    for (std::size_t q = 0; q < equilibria.size(); ++q)
        if (equilibria[q] == from && equilibria[(q + 1) % equilibria.size()] == to) return true;
    return false;
}

CycleSpec cycle_c2() {
    return CycleSpec("C2", {Word("DSS"), Word("DDS"), Word("SDS"), Word("SDD"), Word("SSD"), Word("DSD")});
}

CycleSpec cycle_c2_hat() {
    return CycleSpec("C2_hat",
                     {Word("SDSS"), Word("SDDS"), Word("SSDS"), Word("DSDS"), Word("DSSS"), Word("DDSS")});
}

CycleSpec cycle_c2_check() {
    return CycleSpec("C2_check",
                     {Word("SDSS"), Word("SDSD"), Word("SSSD"), Word("DSSD"), Word("DSSS"), Word("DDSS")});
}

}  // namespace hetcycle
