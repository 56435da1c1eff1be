#include "lcav/dressed.hpp"

#include <algorithm>
#include <cmath>

namespace lcav {

Eigen::Matrix3cd SubspaceBlock::matrix() const
{
    Eigen::Matrix3cd h;
    h << c64(r1), std::conj(v_left), omega,
         v_left, c64(r2), v_right,
         std::conj(omega), std::conj(v_right), c64(r3);
    return h;
}

std::array<Label, 3> SubspaceBlock::labels() const
{
    return {Label{1, n_left + 1, n_right}, Label{2, n_left, n_right},
            Label{3, n_left, n_right + 1}};
}

SubspaceBlock block_coefficients(const ValidatedModel& model, int n_left, int n_right)
{
    if (n_left < 0 || n_right < 0)
        throw std::invalid_argument("block_coefficients: block indices must be non-negative");
    const ModelParams& p = model.params();
    SubspaceBlock b;
    b.n_left = n_left;
    b.n_right = n_right;
    b.r1 = interaction_diagonal(p, Label{1, n_left + 1, n_right});
    b.r2 = interaction_diagonal(p, Label{2, n_left, n_right});
    b.r3 = interaction_diagonal(p, Label{3, n_left, n_right + 1});
    b.v_left = p.lambda_L * coupling_f(n_left + 1, p.beta) *
               std::sqrt(static_cast<double>(n_left + 1));
    b.v_right = p.lambda_R * coupling_f(n_right + 1, p.beta) *
                std::sqrt(static_cast<double>(n_right + 1));
    b.omega = p.omega_rabi;
    return b;
}

namespace {

double block_scale(const SubspaceBlock& b)
{
    return std::max({std::abs(b.r1), std::abs(b.r2), std::abs(b.r3), std::abs(b.v_left),
                     std::abs(b.v_right), std::abs(b.omega), 1.0});
}

SubspaceEigensystem numeric_eigensystem(const SubspaceBlock& block)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(block.matrix());
    SubspaceEigensystem out;
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    out.used_fallback = true;
    return out;
}

// Eigenvalues relative to the diagonal mean mu. Working in the shifted frame
// keeps the cubic coefficients at the scale of the level spread; without the
// shift, blocks whose diagonal is dominated by a large shared Kerr energy
// lose the spread to cancellation in y1^2 - 3 y2.
struct ShiftedRoots {
    double mu;
    std::array<double, 3> e; // ascending, add mu for absolute energies
};

std::optional<ShiftedRoots> closed_roots(const SubspaceBlock& block)
{
    const double mu = (block.r1 + block.r2 + block.r3) / 3.0;
    const double s1 = block.r1 - mu, s2 = block.r2 - mu, s3 = block.r3 - mu;
    const double vl2 = std::norm(block.v_left);
    const double vr2 = std::norm(block.v_right);
    const double om2 = std::norm(block.omega);

    const double y1 = -(s1 + s2 + s3);
    const double y2 = s1 * s2 + s2 * s3 + s1 * s3 - (vl2 + vr2 + om2);
    const double y3 = s1 * vr2 + s2 * om2 + s3 * vl2 - s1 * s2 * s3 -
                      2.0 * std::real(block.v_left * std::conj(block.v_right) * block.omega);

    // y1^2 - 3 y2 equals half the sum of squared eigenvalue gaps; a vanishing
    // value means a (near-)triple root and no usable trigonometric form.
    const double disc = y1 * y1 - 3.0 * y2;
    const double spread_tol = 1e-8 * block_scale(block);
    if (!(disc > spread_tol * spread_tol))
        return std::nullopt;

    const double w = std::sqrt(disc);
    const double arg = (9.0 * y1 * y2 - 2.0 * y1 * y1 * y1 - 27.0 * y3) / (2.0 * disc * w);
    // The exact argument lies in [-1, 1]; a clear escape means roundoff has
    // swamped the trig form and the numeric solver must take over.
    if (!(std::abs(arg) <= 1.0 + 1e-9))
        return std::nullopt;
    const double theta = std::acos(std::clamp(arg, -1.0, 1.0));

    ShiftedRoots out;
    out.mu = mu;
    constexpr double two_pi_third = 2.0943951023931953; // 2*pi/3
    for (int k = 0; k < 3; ++k)
        out.e[k] = -y1 / 3.0 + (2.0 / 3.0) * w * std::cos(theta / 3.0 - two_pi_third * k);
    std::sort(out.e.begin(), out.e.end());
    return out;
}

} // namespace

std::optional<std::array<double, 3>> eigenvalues_closed(const SubspaceBlock& block)
{
    const auto roots = closed_roots(block);
    if (!roots)
        return std::nullopt;
    return std::array<double, 3>{roots->mu + roots->e[0], roots->mu + roots->e[1],
                                 roots->mu + roots->e[2]};
}

SubspaceEigensystem eigensystem(const SubspaceBlock& block)
{
    const auto roots = closed_roots(block);
    if (!roots)
        return numeric_eigensystem(block);

    const auto& e = roots->e;
    const double mu = roots->mu;
    const double scale = block_scale(block);
    const double range = e[2] - e[0];
    if (std::min(e[1] - e[0], e[2] - e[1]) < 1e-8 * range)
        return numeric_eigensystem(block);
    const double s1 = block.r1 - mu, s3 = block.r3 - mu;
    for (double ek : e)
        if (std::abs(ek - s3) < 1e-8 * scale)
            return numeric_eigensystem(block);

    const c64 vl_c = std::conj(block.v_left);
    const c64 vr_c = std::conj(block.v_right);
    const c64 om = block.omega;
    const double om2 = std::norm(om);

    // All ingredients are differences of eigenvalues and diagonal entries, so
    // they are evaluated in the shifted frame as well.
    SubspaceEigensystem out;
    for (int k = 0; k < 3; ++k) {
        const double ek = e[k];
        const c64 d = ek - s3;
        const c64 a = vl_c + vr_c * om / d;
        const c64 b = (ek - s1) - om2 / d;
        const c64 c = (vl_c * std::conj(om) + vr_c * (ek - s1)) / d;
        const double h = std::sqrt(std::norm(a) + std::norm(b) + std::norm(c));
        if (!(h > 1e-14 * scale))
            return numeric_eigensystem(block);
        out.energies(k) = mu + ek;
        out.vectors(0, k) = a / h;
        out.vectors(1, k) = b / h;
        out.vectors(2, k) = c / h;
    }

    // self-check; the numeric solver handles whatever the closed form cannot
    const Eigen::Matrix3cd gram = out.vectors.adjoint() * out.vectors;
    if ((gram - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() > 1e-11)
        return numeric_eigensystem(block);
    const Eigen::Matrix3cd residual = block.matrix() * out.vectors -
                                      out.vectors * out.energies.cast<c64>().asDiagonal();
    if (residual.cwiseAbs().maxCoeff() > 1e-11 * scale)
        return numeric_eigensystem(block);
    return out;
}

Eigen::Matrix3cd propagator(const SubspaceEigensystem& eig, double t)
{
    if (t == 0.0)
        return Eigen::Matrix3cd::Identity();
    Eigen::Vector3cd phases;
    for (int k = 0; k < 3; ++k)
        phases(k) = std::exp(c64(0.0, -eig.energies(k) * t));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

} // namespace lcav
