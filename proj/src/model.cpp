#include "lcav/model.hpp"

#include <cmath>
#include <sstream>

namespace lcav {

double beta_exponent(Beta beta)
{
    switch (beta) {
    case Beta::minus_half: return -0.5;
    case Beta::zero: return 0.0;
    case Beta::plus_half: return 0.5;
    }
    throw std::logic_error("unreachable beta value");
}

std::optional<Beta> beta_from_value(double value)
{
    if (value == -0.5) return Beta::minus_half;
    if (value == 0.0) return Beta::zero;
    if (value == 0.5) return Beta::plus_half;
    return std::nullopt;
}

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(c64 z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

ValidatedModel validate(const ModelParams& params)
{
    std::ostringstream bad;
    if (!finite(params.delta_L) || !finite(params.delta_R))
        bad << "detunings must be finite; ";
    if (!finite(params.lambda_L) || params.lambda_L <= 0.0 ||
        !finite(params.lambda_R) || params.lambda_R <= 0.0)
        bad << "couplings lambda_L, lambda_R must be finite and positive; ";
    if (!finite(params.chi_L) || params.chi_L < 0.0 ||
        !finite(params.chi_R) || params.chi_R < 0.0 ||
        !finite(params.chi_C) || params.chi_C < 0.0)
        bad << "Kerr coefficients must be finite and non-negative; ";
    if (!finite(params.omega_rabi))
        bad << "omega_rabi must be finite; ";
    if (params.absolute_freqs) {
        const auto& w = *params.absolute_freqs;
        if (!finite(w.omega_L) || !finite(w.omega_R) || !finite(w.omega_2) ||
            w.omega_L <= 0.0 || w.omega_R <= 0.0 || w.omega_2 <= 0.0)
            bad << "absolute frequencies must be finite and positive; ";
        else if (w.omega_L + params.delta_L <= 0.0 || w.omega_R + params.delta_R <= 0.0)
            bad << "absolute frequencies place a lower level at or above the upper level; ";
    }
    const std::string msg = bad.str();
    if (!msg.empty())
        throw std::invalid_argument("invalid model parameters: " + msg);
    return ValidatedModel(params);
}

double coupling_f(int n, Beta beta)
{
    if (n < 0)
        throw std::invalid_argument("coupling_f: photon number must be non-negative");
    switch (beta) {
    case Beta::zero:
        return 1.0;
    case Beta::plus_half:
        return std::sqrt(static_cast<double>(n));
    case Beta::minus_half:
        if (n == 0)
            throw std::domain_error("coupling_f: n^(-1/2) undefined at n = 0");
        return 1.0 / std::sqrt(static_cast<double>(n));
    }
    throw std::logic_error("unreachable beta value");
}

double kerr_shift(int n, double chi)
{
    if (n < 0)
        throw std::invalid_argument("kerr_shift: photon number must be non-negative");
    return chi * static_cast<double>(n) * static_cast<double>(n - 1);
}

double cross_kerr_shift(int n_left, int n_right, double chi_c)
{
    if (n_left < 0 || n_right < 0)
        throw std::invalid_argument("cross_kerr_shift: photon numbers must be non-negative");
    return chi_c * static_cast<double>(n_left) * static_cast<double>(n_right);
}

double interaction_diagonal(const ModelParams& params, const Label& label)
{
    double e = kerr_shift(label.n_left, params.chi_L) +
               kerr_shift(label.n_right, params.chi_R) +
               cross_kerr_shift(label.n_left, label.n_right, params.chi_C);
    if (label.atom == 1)
        e -= params.delta_L;
    else if (label.atom == 3)
        e -= params.delta_R;
    else if (label.atom != 2)
        throw std::invalid_argument("interaction_diagonal: atom level must be 1, 2 or 3");
    return e;
}

} // namespace lcav
