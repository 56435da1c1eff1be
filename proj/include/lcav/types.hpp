#pragma once

#include <compare>
#include <complex>
#include <stdexcept>
#include <string>

namespace lcav {

using c64 = std::complex<double>;

// Basis label |atom, n_left, n_right> with atom in {1,2,3}.
// The default three-way comparison gives the canonical lexicographic order
// (atom, n_left, n_right); every deterministic sum in the library iterates
// labels in this order.
struct Label {
    int atom;
    int n_left;
    int n_right;

    friend auto operator<=>(const Label&, const Label&) = default;
};

// interaction: dynamics generated by the coupling part of the Hamiltonian only.
// full_phase: additionally applies the free-evolution phase per label, which
// requires the absolute mode/level frequencies.
enum class Frame { interaction, full_phase };

// Bad user input (config file, preset id, CLI flag combination). Exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical invariant or a cross-check against the dense reference solver
// failed. Exit code 2.
class consistency_error : public std::runtime_error {
public:
    explicit consistency_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lcav
