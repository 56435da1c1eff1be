#pragma once

#include <span>

#include "lcav/fock.hpp"
#include "lcav/types.hpp"

namespace lcav {

// Shannon entropy of a density-matrix spectrum, in nats. Eigenvalues in
// [-1e-10, 0] are treated as 0; anything more negative is rejected as an
// invalid density.
double von_neumann_entropy(std::span<const double> eigenvalues);

double atom_entropy(const AtomDensityMatrix& rho);

// Atom-field entanglement entropy: von Neumann entropy of the reduced atom.
double dem(const JointState& state);

// Entropy of the reduced two-mode field (dense, test-scale only). For pure
// joint states this equals dem() and provides an independent route to it.
double field_entropy(const JointState& state);

// First and second moments of the two modes, each computed independently via
// the generic operator-word machinery.
struct ModeMoments {
    c64 a_left = 0.0, a_right = 0.0;   // <a>
    c64 a2_left = 0.0, a2_right = 0.0; // <a^2>
    double n_left = 0.0, n_right = 0.0;
    c64 ar_al = 0.0;       // <a_R a_L>
    c64 ardag_aldag = 0.0; // <a_R^dag a_L^dag>
    c64 ardag_al = 0.0;    // <a_R^dag a_L>
    c64 ar_aldag = 0.0;    // <a_R a_L^dag>
    double word_leakage = 0.0; // worst creation leakage across the words
};

ModeMoments mode_moments(const JointState& state);

// Throws consistency_error unless the state is normalized with negligible
// truncation loss (|1 - norm^2| + recorded leakage below 1e-9). The variance
// functions taking a JointState call this; the ModeMoments overloads are pure
// arithmetic and trust the caller to have checked the source state.
void require_converged_state(const JointState& state);

// Total variance of u = x_R + x_L, v = p_R - p_L; values below 2 witness
// two-mode entanglement. The assembled combination is verified real.
double duan_total_variance(const ModeMoments& m);
double duan_total_variance(const JointState& state);

// Variances of c+ = x_R + x_L and c- = p_R + p_L ([c+, c-] = 2i); values
// below 1 witness two-mode squeezing. Means are always subtracted.
struct SqueezingVariances {
    double plus;
    double minus;
};

SqueezingVariances squeezing_variances(const ModeMoments& m);
SqueezingVariances squeezing_variances(const JointState& state);

} // namespace lcav
