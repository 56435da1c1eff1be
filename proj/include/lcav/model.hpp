#pragma once

#include <optional>

#include "lcav/types.hpp"

namespace lcav {

// Exponent of the intensity-dependent coupling f(n) = n^beta.
enum class Beta { minus_half, zero, plus_half };

double beta_exponent(Beta beta);
std::optional<Beta> beta_from_value(double value);

// Absolute frequencies (units of the coupling constant). The two lower atomic
// levels are implicit: omega_1 = omega_2 - omega_L - delta_L and
// omega_3 = omega_2 - omega_R - delta_R.
struct AbsoluteFreqs {
    double omega_L;
    double omega_R;
    double omega_2;
};

struct ModelParams {
    double delta_L = 0.0;  // omega_2 - omega_1 - omega_L
    double delta_R = 0.0;  // omega_2 - omega_3 - omega_R
    double chi_L = 0.0;    // left-mode Kerr coefficient
    double chi_R = 0.0;    // right-mode Kerr coefficient
    double chi_C = 0.0;    // cross-Kerr coefficient
    double lambda_L = 1.0; // left-mode coupling (sets the time unit)
    double lambda_R = 1.0; // right-mode coupling
    Beta beta = Beta::zero;
    c64 omega_rabi = 0.0;  // classical drive between the two lower levels
    std::optional<AbsoluteFreqs> absolute_freqs;
};

// Proof token that a ModelParams passed validate(); downstream modules accept
// only this wrapper so unchecked parameters cannot reach the solvers.
class ValidatedModel {
public:
    const ModelParams& params() const { return params_; }
    const ModelParams* operator->() const { return &params_; }

private:
    explicit ValidatedModel(ModelParams p) : params_(std::move(p)) {}
    friend ValidatedModel validate(const ModelParams& params);

    ModelParams params_;
};

// Throws std::invalid_argument when a coupling is non-positive, a Kerr
// coefficient is negative, any value is non-finite, or the absolute
// frequencies are inconsistent with a Lambda-type level ordering.
ValidatedModel validate(const ModelParams& params);

// f(n) = n^beta for integer n >= 0. f(0) is 1 for beta = 0 (empty product),
// 0 for beta = +1/2, and a domain error for beta = -1/2.
double coupling_f(int n, Beta beta);

// Self-Kerr energy shift chi * n * (n - 1).
double kerr_shift(int n, double chi);

// Cross-Kerr energy shift chi_c * n_left * n_right (symmetric).
double cross_kerr_shift(int n_left, int n_right, double chi_c);

// Diagonal energy of a basis label under the coupling-frame Hamiltonian:
// detuning terms for the two lower atomic levels plus all Kerr shifts.
double interaction_diagonal(const ModelParams& params, const Label& label);

} // namespace lcav
