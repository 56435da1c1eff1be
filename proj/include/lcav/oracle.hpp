#pragma once

#include <span>

#include <Eigen/Dense>

#include "lcav/fock.hpp"
#include "lcav/model.hpp"
#include "lcav/types.hpp"

namespace lcav {

// Brute-force reference evolution in the full truncated product basis,
// independent of the per-subspace analytic machinery. The two variants differ
// only in the classical-drive term: block_consistent places it on the
// photon-exchanging leg |1,m+1,n> <-> |3,m,n+1> exactly as the subspace
// solution does, literal places it on the number-preserving leg
// |1,m,n> <-> |3,m,n>. With a vanishing drive the two assemblies coincide.
enum class OracleVariant { block_consistent, literal };

class DenseOracle {
public:
    // Basis covers 0..nmax per mode; the dimension 3*(nmax_left+1)*(nmax_right+1)
    // is capped at 4096. The Hermitian spectral decomposition is computed once
    // here and reused by every evolve call.
    DenseOracle(const ValidatedModel& model, int nmax_left, int nmax_right,
                OracleVariant variant = OracleVariant::block_consistent);

    int dimension() const { return dim_; }
    int nmax_left() const { return kl_; }
    int nmax_right() const { return kr_; }
    OracleVariant variant() const { return variant_; }

    const Eigen::MatrixXcd& hamiltonian() const { return h_; }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

    // Basis index of a label, ascending exactly in canonical label order.
    int index_of(const Label& label) const;
    Label label_of(int index) const;

    // Interaction-frame states only; labels must fit the basis.
    Eigen::VectorXcd to_vector(const JointState& state) const;
    JointState to_state(const Eigen::VectorXcd& v) const;

    JointState evolve(const JointState& psi0, double t) const;

private:
    int kl_, kr_, dim_;
    OracleVariant variant_;
    Eigen::MatrixXcd h_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

// Runs the analytic evolution and the dense reference side by side over the
// grid and returns the largest amplitude deviation |psi_a - psi_o| across all
// grid points and labels. The reference basis extends one photon past the
// initial state's bounds so every subspace the state occupies fits whole.
double compare_with_oracle(const JointState& initial, const ValidatedModel& model,
                           std::span<const double> grid,
                           OracleVariant variant = OracleVariant::block_consistent);

} // namespace lcav
