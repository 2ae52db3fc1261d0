#include "hetcycle/numerics.hpp"

#include <algorithm>
#include <complex>
#include <iomanip>

namespace hetcycle {

long long step_count(double dt, double T) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(T >= dt)) throw std::invalid_argument("T must be >= dt");
    return std::llround(T / dt);
}

void wrap_all(std::span<double> x) {
    for (double& v : x) v = wrap_angle(v);
}

void check_finite(std::span<const double> x, long long step) {
    for (double v : x)
        if (!std::isfinite(v)) throw NumericalError("non-finite state at step " + std::to_string(step), step);
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t step, std::uint64_t lane) const {
    std::uint64_t h = splitmix(seed_);
    h = splitmix(h ^ stream_);
    h = splitmix(h ^ step);
    return splitmix(h ^ lane);
}

double CounterRng::uniform(std::uint64_t step, std::uint64_t lane) const {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(bits(step, lane) >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t step, std::uint64_t j) const {
    const double rad = std::sqrt(-2.0 * std::log(uniform(step, 2 * j)));
    const double ang = kTwoPi * uniform(step, 2 * j + 1);
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

double CounterRng::normal(std::uint64_t step, std::uint64_t lane) const {
    const auto [z0, z1] = normal_pair(step, lane / 2);
    return lane % 2 == 0 ? z0 : z1;
}

namespace {

using cd = std::complex<double>;

Eigen::VectorXcd eigvec_2x2(const Eigen::MatrixXd& A, cd lambda, int which) {
    const cd a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    Eigen::VectorXcd v(2);
    const cd v1a = b, v2a = lambda - a;  // first-row null vector
    const cd v1b = lambda - d, v2b = c;  // second-row null vector
    const double na = std::abs(v1a) + std::abs(v2a);
    const double nb = std::abs(v1b) + std::abs(v2b);
    if (na == 0.0 && nb == 0.0) {
        // A - lambda I = 0: any basis works.
        v << (which == 0 ? 1.0 : 0.0), (which == 0 ? 0.0 : 1.0);
        return v;
    }
    if (na >= nb)
        v << v1a, v2a;
    else
        v << v1b, v2b;
    return v / v.norm();
}

}  // namespace

EigenData eigen_small(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    if (n != A.cols()) throw std::invalid_argument("eigen_small: matrix must be square");
    if (n < 1 || n > 8) throw std::invalid_argument("eigen_small: dimension must be in [1, 8]");
    if (!A.allFinite()) throw std::invalid_argument("eigen_small: non-finite entries");

    EigenData out;
    out.dimension = static_cast<int>(n);
    if (n == 1) {
        out.values = Eigen::VectorXcd::Constant(1, A(0, 0));
        out.vectors = Eigen::MatrixXcd::Identity(1, 1);
        return out;
    }
    if (n == 2) {
        const double tr = A(0, 0) + A(1, 1);
        const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        const double disc = tr * tr / 4.0 - det;
        cd l1, l2;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            // Avoid cancellation: compute the larger-magnitude root first.
            const double big = tr / 2.0 + (tr >= 0.0 ? s : -s);
            const double small = big != 0.0 ? det / big : 0.0;
            l1 = std::max(big, small);
            l2 = std::min(big, small);
        } else {
            const double s = std::sqrt(-disc);
            l1 = cd(tr / 2.0, s);
            l2 = cd(tr / 2.0, -s);
        }
        out.values.resize(2);
        out.values << l1, l2;
        out.vectors.resize(2, 2);
        out.vectors.col(0) = eigvec_2x2(A, l1, 0);
        out.vectors.col(1) = eigvec_2x2(A, l2, 1);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
        if (es.info() != Eigen::Success) throw NumericalError("eigen_small: QR iteration did not converge", 0);
        Eigen::VectorXcd vals = es.eigenvalues();
        Eigen::MatrixXcd vecs = es.eigenvectors();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
            if (vals(x).real() != vals(y).real()) return vals(x).real() > vals(y).real();
            return vals(x).imag() > vals(y).imag();
        });
        out.values.resize(n);
        out.vectors.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.values(i) = vals(order[static_cast<std::size_t>(i)]);
            Eigen::VectorXcd v = vecs.col(order[static_cast<std::size_t>(i)]);
            out.vectors.col(i) = v / v.norm();
        }
    }

    const Eigen::MatrixXcd Ac = A.cast<cd>();
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double res = (Ac * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
        if (!(res < 1e-8 * scale)) throw NumericalError("eigen_small: eigenpair residual too large", 0);
    }
    return out;
}

ItineraryTracker::ItineraryTracker(std::vector<Word> words, double eps_near, double eps_leave)
    : words_(std::move(words)), eps_near_(eps_near), eps_leave_(eps_leave) {
    if (!(eps_near > 0.0 && eps_near < eps_leave))
        throw std::invalid_argument("itinerary requires 0 < eps_near < eps_leave");
    for (const Word& w : words_) points_.push_back(w.point());
}

void ItineraryTracker::feed(double t, std::span<const double> psi) {
    last_t_ = t;
    if (open_ >= 0) {
        if (circular_distance_inf(psi, points_[static_cast<std::size_t>(open_)]) > eps_leave_) {
            out_.exit.back() = t;
            open_ = -1;
        }
        return;
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (circular_distance_inf(psi, points_[i]) < eps_near_) {
            open_ = static_cast<int>(i);
            if (!out_.symbols.empty() && out_.symbols.back() == words_[i]) {
                out_.exit.back() = t;
            } else {
                out_.symbols.push_back(words_[i]);
                out_.entry.push_back(t);
                out_.exit.push_back(t);
            }
            return;
        }
    }
}

Itinerary ItineraryTracker::finish(double t) {
    if (open_ >= 0) {
        out_.exit.back() = std::max(t, last_t_);
        open_ = -1;
    }
    return out_;
}

Itinerary itinerary(const Trajectory& traj, const std::vector<Word>& words, double eps_near, double eps_leave) {
    ItineraryTracker tr(words, eps_near, eps_leave);
    for (std::size_t i = 0; i < traj.size(); ++i) tr.feed(traj.times[i], traj.states[i]);
    return tr.finish(traj.times.empty() ? 0.0 : traj.times.back());
}

std::vector<OmegaTarget> word_targets(const std::vector<Word>& words) {
    std::vector<OmegaTarget> out;
    for (const Word& w : words) out.push_back({w.str(), w.point()});
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix) {
    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    os << "t";
    for (std::size_t i = 0; i < dim; ++i) os << ',' << prefix << '_' << (i + 1);
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.times[k];
        for (double v : traj.states[k]) os << ',' << v;
        os << '\n';
    }
}

}  // namespace hetcycle
