#include "lcav/observables.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace lcav {

double von_neumann_entropy(std::span<const double> eigenvalues)
{
    double s = 0.0;
    for (double eps : eigenvalues) {
        if (eps < -1e-10)
            throw consistency_error("von_neumann_entropy: negative density eigenvalue");
        if (eps <= 1e-14)
            continue;
        s -= eps * std::log(eps);
    }
    if (s < 0.0 && s > -1e-12)
        s = 0.0;
    return s;
}

double atom_entropy(const AtomDensityMatrix& rho)
{
    const double e[3] = {rho.eigenvalues(0), rho.eigenvalues(1), rho.eigenvalues(2)};
    return von_neumann_entropy(e);
}

double dem(const JointState& state)
{
    return atom_entropy(reduced_atom(state));
}

double field_entropy(const JointState& state)
{
    const FieldDensityMatrix rho = reduced_field(state);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    solver.compute(rho.rho, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return von_neumann_entropy(std::span<const double>(ev.data(), ev.size()));
}

namespace {

constexpr LadderOp al{ModeSide::left, LadderKind::annihilate};
constexpr LadderOp cl{ModeSide::left, LadderKind::create};
constexpr LadderOp nl{ModeSide::left, LadderKind::number};
constexpr LadderOp ar{ModeSide::right, LadderKind::annihilate};
constexpr LadderOp cr{ModeSide::right, LadderKind::create};
constexpr LadderOp nr{ModeSide::right, LadderKind::number};

double real_checked(c64 z, const char* what)
{
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real())))
        throw consistency_error(std::string("imaginary residue in ") + what);
    return z.real();
}

} // namespace

ModeMoments mode_moments(const JointState& state)
{
    ModeMoments m;
    double leak = 0.0;
    const auto take = [&](std::initializer_list<LadderOp> word) {
        const auto r = expectation_with_leakage(
            state, std::span<const LadderOp>(word.begin(), word.size()));
        leak = std::max(leak, r.leakage);
        return r.value;
    };
    m.a_left = take({al});
    m.a_right = take({ar});
    m.a2_left = take({al, al});
    m.a2_right = take({ar, ar});
    m.n_left = real_checked(take({nl}), "<n_left>");
    m.n_right = real_checked(take({nr}), "<n_right>");
    m.ar_al = take({ar, al});
    m.ardag_aldag = take({cr, cl});
    m.ardag_al = take({cr, al});
    m.ar_aldag = take({ar, cl});
    m.word_leakage = leak;
    return m;
}

void require_converged_state(const JointState& state)
{
    const double deficit = std::abs(1.0 - state.norm_squared()) + state.leakage;
    if (deficit > 1e-9) {
        std::ostringstream msg;
        msg << "quadrature variances need a normalized state with converged truncation;"
            << " probability deficit " << std::scientific << std::setprecision(3)
            << deficit << "; tighten tail_eps";
        throw consistency_error(msg.str());
    }
}

double duan_total_variance(const ModeMoments& m)
{
    const c64 ar_mean = m.a_right, al_mean = m.a_left;
    const c64 total = 1.0 + m.n_right + m.n_left + m.ardag_aldag + m.ar_al -
                      ar_mean * std::conj(ar_mean) - al_mean * std::conj(al_mean) -
                      std::conj(ar_mean) * std::conj(al_mean) - ar_mean * al_mean;
    return 2.0 * real_checked(total, "the total-variance combination");
}

double duan_total_variance(const JointState& state)
{
    require_converged_state(state);
    return duan_total_variance(mode_moments(state));
}

SqueezingVariances squeezing_variances(const ModeMoments& m)
{
    const double base = 1.0 + m.n_right + m.n_left + 2.0 * std::real(m.ardag_al);
    const double second_plus =
        base + std::real(m.a2_right) + std::real(m.a2_left) + 2.0 * std::real(m.ar_al);
    const double second_minus =
        base - std::real(m.a2_right) - std::real(m.a2_left) - 2.0 * std::real(m.ar_al);
    const double sqrt2 = std::sqrt(2.0);
    const double mean_plus = sqrt2 * (m.a_right.real() + m.a_left.real());
    const double mean_minus = sqrt2 * (m.a_right.imag() + m.a_left.imag());
    return {second_plus - mean_plus * mean_plus, second_minus - mean_minus * mean_minus};
}

SqueezingVariances squeezing_variances(const JointState& state)
{
    require_converged_state(state);
    return squeezing_variances(mode_moments(state));
}

} // namespace lcav
