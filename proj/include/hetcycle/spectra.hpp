#pragma once

// Closed-form spectra at the S/D relative equilibria (N = 2) and the
// contracting/expanding/transverse roles they play along a cycle.

#include <optional>
#include <string>
#include <vector>

#include "hetcycle/dynamics.hpp"
#include "hetcycle/model.hpp"

namespace hetcycle {

/// Eigenvalues of the reduced linearization at a word; entry sigma belongs to
/// coordinate psi_sigma (the Jacobian is diagonal at every S/D word).
/// Nonpairwise: lambda_s = -2 g'(psi_s) + 2 K sin(alpha) cos(psi_s) sum_{t in D} K_st.
/// Full phase shift: lambda_s = -2 g'(psi_s + K sum_{t in D} K_st).
/// Throws UnsupportedError for N != 2 (use jacobian_fd there).
std::vector<double> eigenvalues_closed_form(const Word& word, const ModelParams& p,
                                            FieldKind kind = FieldKind::NonpairwiseApprox);

struct SaddleData {
    Word word;
    int q = 0;           // position of the saddle in the cycle (0-based)
    int coord_in = -1;   // coordinate of the incoming connection
    int coord_out = -1;  // coordinate of the outgoing connection
    int coord_t = -1;    // remaining active coordinate, -1 if none
    int coord_perp = -1; // frozen coordinate, -1 if none
    double c = 0.0;
    double e = 0.0;
    double t = 0.0;
    std::optional<double> t_perp;

    double a() const { return c / e; }
    double b() const { return -t / e; }
    double b_perp() const { return t_perp ? -*t_perp / e : 0.0; }
};

/// Assigns the eigenvalues at equilibria[q] to their roles.
/// Throws std::domain_error unless c > 0 and e > 0.
SaddleData saddle_data(const CycleSpec& cycle, int q, const ModelParams& p);

struct ExistenceReport {
    bool exists = false;
    bool boundary = false;  // some deciding eigenvalue within 1e-12 of 0
    std::vector<std::string> reasons;
    explicit operator bool() const { return exists; }
};

/// Every connection is saddle-sink inside its one-dimensional invariant line:
/// outgoing rate > 0 at the source and incoming rate < 0 at the target.
ExistenceReport cycle_exists(const CycleSpec& cycle, const ModelParams& p);

/// Both cycles of the M = 4 network exist.
ExistenceReport network_exists(const ModelParams& p);

/// Linearizability conditions. M = 3: the explicit expressions for C2 plus
/// lambda_1(DSS), lambda_3(DDS) != 0. Other M: hyperbolicity and
/// lambda_l != lambda_j + lambda_k (lambda_j < 0 < lambda_k) at every network word.
bool nonresonance_ok(const ModelParams& p);

/// Words of the M = 4 network (the union of both cycles).
std::vector<Word> network_words();

}  // namespace hetcycle
