#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "lcav/model.hpp"
#include "lcav/types.hpp"

namespace lcav {

// One excitation-conserving 3x3 subspace. The triple of basis labels is
// |1, n_left+1, n_right>, |2, n_left, n_right>, |3, n_left, n_right+1>.
struct SubspaceBlock {
    int n_left = 0;
    int n_right = 0;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0; // diagonal energies
    c64 v_left = 0.0;                    // field coupling on the 1<->2 leg
    c64 v_right = 0.0;                   // field coupling on the 3<->2 leg
    c64 omega = 0.0;                     // classical drive on the 1<->3 leg

    Eigen::Matrix3cd matrix() const;
    std::array<Label, 3> labels() const;
};

SubspaceBlock block_coefficients(const ValidatedModel& model, int n_left, int n_right);

struct SubspaceEigensystem {
    Eigen::Vector3d energies;  // ascending
    Eigen::Matrix3cd vectors;  // unitary, columns match energies
    bool used_fallback = false;
};

// Trigonometric solution of the characteristic cubic, energies ascending.
// Returns nullopt in the near-triple-root regime where the closed form loses
// meaning (the caller falls back to the numeric solver).
std::optional<std::array<double, 3>> eigenvalues_closed(const SubspaceBlock& block);

// Closed-form eigenvectors over the closed-form energies, switching to a
// numeric Hermitian solve when the analytic expressions are ill-conditioned
// (near-degenerate energies, vanishing denominators) or when the assembled
// basis fails its unitarity/residual self-check.
SubspaceEigensystem eigensystem(const SubspaceBlock& block);

// U(t) = V exp(-i E t) V^dagger; exactly the identity at t = 0.
Eigen::Matrix3cd propagator(const SubspaceEigensystem& eig, double t);

} // namespace lcav
