#pragma once

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lcav/types.hpp"

namespace lcav {

// Initial single-mode field state. Amplitudes refer to the Fock basis.
struct FieldSpec {
    enum class Kind { coherent, binomial, explicit_list };

    Kind kind = Kind::coherent;
    c64 alpha = 0.0;               // coherent
    double eta = 0.0;              // binomial success probability
    int max_photons = 0;           // binomial M
    std::vector<c64> amplitudes;   // explicit list, g_0..g_K
    double tail_eps = 1e-12;       // discarded-probability budget per mode

    static FieldSpec coherent_state(c64 alpha, double tail_eps = 1e-12);
    static FieldSpec binomial_state(double eta, int max_photons, double tail_eps = 1e-12);
    static FieldSpec explicit_state(std::vector<c64> amplitudes, double tail_eps = 1e-12);
};

// Throws std::invalid_argument on out-of-range eta, negative M, non-finite or
// unnormalized explicit amplitudes, or a tail budget outside (0, 1e-2].
void validate_field(const FieldSpec& spec);

// Fock amplitudes g_0..g_nmax. Coherent states use the stable recurrence
// g_n = g_{n-1} * alpha / sqrt(n); binomial states are evaluated in log space.
std::vector<c64> field_amplitudes(const FieldSpec& spec, int nmax);

// Smallest cutoff whose discarded probability is below spec.tail_eps
// (binomial states simply return M). Throws std::invalid_argument with the
// required cutoff when it exceeds `cap`.
int choose_truncation(const FieldSpec& spec, int cap = 4096);

struct AtomInit {
    c64 a = 0.0; // level 1 amplitude
    c64 b = 0.0; // level 2 amplitude
    c64 c = 0.0; // level 3 amplitude
};

// Throws std::invalid_argument unless |a|^2 + |b|^2 + |c|^2 = 1 within 1e-12.
void validate_atom(const AtomInit& atom);

// Sparse pure state of atom + two modes. Entries are sorted by Label in the
// canonical order and hold no duplicate labels; leakage accumulates the
// probability mass dropped by creation operators at the cutoff.
struct JointState {
    std::vector<std::pair<Label, c64>> entries;
    int nmax_left = 0;
    int nmax_right = 0;
    Frame frame = Frame::interaction;
    double leakage = 0.0;

    double norm_squared() const;
    c64 amplitude(const Label& label) const; // 0 for absent labels
};

// Sorts (and sanity-checks) raw entries into a JointState.
JointState make_state(std::vector<std::pair<Label, c64>> entries, int nmax_left,
                      int nmax_right, Frame frame = Frame::interaction);

// Product state atom (x) left (x) right, truncated per choose_truncation.
JointState make_initial_state(const AtomInit& atom, const FieldSpec& left,
                              const FieldSpec& right,
                              Frame frame = Frame::interaction, int cap = 4096);

enum class ModeSide { left, right };
enum class LadderKind { annihilate, create, number };

struct LadderOp {
    ModeSide mode;
    LadderKind kind;
};

JointState apply_ladder(const JointState& state, LadderOp op);

// <bra|ket> summed in canonical label order (merge join; atom labels must
// match exactly).
c64 inner_product(const JointState& bra, const JointState& ket);

struct ExpectationResult {
    c64 value;
    double leakage; // creation mass dropped while applying the word
};

// <state| word |state> with the word applied right to left. Words are at most
// four operators long.
ExpectationResult expectation_with_leakage(const JointState& state,
                                           std::span<const LadderOp> word);
c64 expectation(const JointState& state, std::span<const LadderOp> word);
c64 expectation(const JointState& state, std::initializer_list<LadderOp> word);

struct AtomDensityMatrix {
    Eigen::Matrix3cd rho;
    Eigen::Vector3d eigenvalues; // ascending
};

// Reduced atom state (field traced out).
AtomDensityMatrix reduced_atom(const JointState& state);

struct FieldDensityMatrix {
    Eigen::MatrixXcd rho; // indexed by m * (nmax_right + 1) + n
    int dim_left;
    int dim_right;
};

// Reduced two-mode field state (atom traced out). Dense and test-scale only:
// throws std::invalid_argument when the field dimension exceeds 4096.
FieldDensityMatrix reduced_field(const JointState& state);

} // namespace lcav
