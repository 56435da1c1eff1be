#pragma once

#include <span>
#include <vector>

#include "lcav/dressed.hpp"
#include "lcav/fock.hpp"
#include "lcav/model.hpp"
#include "lcav/types.hpp"

namespace lcav {

struct BlockSlot {
    SubspaceBlock block;
    Eigen::Vector3cd psi0; // amplitudes on the block's label triple
};

// An out-of-block label (|1, 0, n> or |3, m, 0>): no coupling acts on it, so
// it only accumulates the phase of its diagonal energy.
struct ResidualEntry {
    Label label;
    c64 amplitude;
    double energy;
};

struct BlockDecomposition {
    std::vector<BlockSlot> blocks;       // sorted by (n_left, n_right)
    std::vector<ResidualEntry> residual; // sorted by label
    int nmax_left = 0;
    int nmax_right = 0;
    Frame frame = Frame::interaction;
};

// Routes every entry into its subspace block or the residual list. The block
// masses plus the residual mass partition the state's norm exactly.
BlockDecomposition decompose(const JointState& state, const ValidatedModel& model);

// Exact propagation: per-block spectral evolution plus residual phases. The
// full-phase frame additionally needs model.absolute_freqs. t = 0 returns the
// input unchanged.
JointState evolve_state(const JointState& state, const ValidatedModel& model, double t);

struct ObservableRow {
    double t = 0.0;
    double entropy = 0.0;
    double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0;
    double duan_total = 0.0;
    double sq_plus = 0.0, sq_minus = 0.0;
    double mean_n_left = 0.0, mean_n_right = 0.0;
    double norm = 0.0; // total probability
    double residual_mass = 0.0;
};

// Which row fields to compute; everything else is left zero.
struct ObservableSelection {
    bool populations = true; // rho11..rho33, norm, residual_mass
    bool entropy = true;
    bool variances = true; // duan_total, sq_plus, sq_minus
    bool moments = true;   // mean_n_left, mean_n_right

    static ObservableSelection all() { return {}; }
};

// Evolves once per grid point, reusing the block eigensystems across the
// whole sweep. The grid must be finite and strictly increasing.
std::vector<ObservableRow> time_sweep(const JointState& initial, const ValidatedModel& model,
                                      std::span<const double> grid,
                                      ObservableSelection select = ObservableSelection::all());

} // namespace lcav
