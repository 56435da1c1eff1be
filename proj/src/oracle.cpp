#include "lcav/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "lcav/evolve.hpp"

namespace lcav {

namespace {

int checked_dimension(int nmax_left, int nmax_right)
{
    if (nmax_left < 0 || nmax_right < 0)
        throw std::invalid_argument("DenseOracle: negative photon cutoff");
    const long d = 3L * (nmax_left + 1) * (nmax_right + 1);
    if (d > 4096)
        throw std::invalid_argument("DenseOracle: dimension " + std::to_string(d) +
                                    " exceeds the 4096 desk-scale cap");
    return static_cast<int>(d);
}

} // namespace

DenseOracle::DenseOracle(const ValidatedModel& model, int nmax_left, int nmax_right,
                         OracleVariant variant)
    : kl_(nmax_left), kr_(nmax_right), dim_(checked_dimension(nmax_left, nmax_right)),
      variant_(variant)
{
    const ModelParams& p = model.params();

    // Everything below is assembled from the raw parameters, on purpose not
    // through the block-coefficient helpers this class is meant to check.
    const double bexp = beta_exponent(p.beta);
    const auto fw = [bexp](int n) { return std::pow(static_cast<double>(n), bexp); };
    const auto idx = [this](int atom, int m, int n) {
        return ((atom - 1) * (kl_ + 1) + m) * (kr_ + 1) + n;
    };

    h_ = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int atom = 1; atom <= 3; ++atom)
        for (int m = 0; m <= kl_; ++m)
            for (int n = 0; n <= kr_; ++n) {
                double e = p.chi_L * m * (m - 1) + p.chi_R * n * (n - 1) + p.chi_C * m * n;
                if (atom == 1)
                    e -= p.delta_L;
                else if (atom == 3)
                    e -= p.delta_R;
                h_(idx(atom, m, n), idx(atom, m, n)) = e;
            }

    for (int m = 0; m + 1 <= kl_; ++m)
        for (int n = 0; n <= kr_; ++n) {
            const double v = p.lambda_L * fw(m + 1) * std::sqrt(m + 1.0);
            h_(idx(2, m, n), idx(1, m + 1, n)) = v;
            h_(idx(1, m + 1, n), idx(2, m, n)) = v;
        }
    for (int m = 0; m <= kl_; ++m)
        for (int n = 0; n + 1 <= kr_; ++n) {
            const double v = p.lambda_R * fw(n + 1) * std::sqrt(n + 1.0);
            h_(idx(2, m, n), idx(3, m, n + 1)) = v;
            h_(idx(3, m, n + 1), idx(2, m, n)) = v;
        }

    if (p.omega_rabi != 0.0) {
        if (variant_ == OracleVariant::block_consistent) {
            for (int m = 0; m + 1 <= kl_; ++m)
                for (int n = 0; n + 1 <= kr_; ++n) {
                    h_(idx(1, m + 1, n), idx(3, m, n + 1)) = p.omega_rabi;
                    h_(idx(3, m, n + 1), idx(1, m + 1, n)) = std::conj(p.omega_rabi);
                }
        } else {
            for (int m = 0; m <= kl_; ++m)
                for (int n = 0; n <= kr_; ++n) {
                    h_(idx(1, m, n), idx(3, m, n)) = p.omega_rabi;
                    h_(idx(3, m, n), idx(1, m, n)) = std::conj(p.omega_rabi);
                }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h_);
    if (solver.info() != Eigen::Success)
        throw consistency_error("DenseOracle: dense eigensolve failed to converge");
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

int DenseOracle::index_of(const Label& label) const
{
    if (label.atom < 1 || label.atom > 3 || label.n_left < 0 || label.n_left > kl_ ||
        label.n_right < 0 || label.n_right > kr_)
        throw std::invalid_argument("DenseOracle: label outside the oracle basis");
    return ((label.atom - 1) * (kl_ + 1) + label.n_left) * (kr_ + 1) + label.n_right;
}

Label DenseOracle::label_of(int index) const
{
    if (index < 0 || index >= dim_)
        throw std::invalid_argument("DenseOracle: basis index out of range");
    const int n = index % (kr_ + 1);
    const int rest = index / (kr_ + 1);
    return {rest / (kl_ + 1) + 1, rest % (kl_ + 1), n};
}

Eigen::VectorXcd DenseOracle::to_vector(const JointState& state) const
{
    if (state.frame != Frame::interaction)
        throw std::invalid_argument("DenseOracle: only interaction-frame states are accepted");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
    for (const auto& [label, amp] : state.entries)
        v(index_of(label)) = amp;
    return v;
}

JointState DenseOracle::to_state(const Eigen::VectorXcd& v) const
{
    if (v.size() != dim_)
        throw std::invalid_argument("DenseOracle: vector size does not match the basis");
    JointState out;
    out.nmax_left = kl_;
    out.nmax_right = kr_;
    out.frame = Frame::interaction;
    // Ascending basis index is exactly the canonical label order.
    for (int i = 0; i < dim_; ++i)
        if (v(i) != 0.0)
            out.entries.emplace_back(label_of(i), v(i));
    return out;
}

JointState DenseOracle::evolve(const JointState& psi0, double t) const
{
    if (!std::isfinite(t))
        throw std::invalid_argument("DenseOracle: time must be finite");
    if (t == 0.0)
        return psi0;
    const Eigen::VectorXcd v0 = to_vector(psi0);
    Eigen::VectorXcd w = vectors_.adjoint() * v0;
    for (int k = 0; k < dim_; ++k)
        w(k) *= std::exp(c64(0.0, -energies_(k) * t));
    JointState out = to_state(vectors_ * w);
    out.leakage = psi0.leakage;
    return out;
}

double compare_with_oracle(const JointState& initial, const ValidatedModel& model,
                           std::span<const double> grid, OracleVariant variant)
{
    const DenseOracle oracle(model, initial.nmax_left + 1, initial.nmax_right + 1, variant);
    double worst = 0.0;
    for (double t : grid) {
        const JointState a = evolve_state(initial, model, t);
        const JointState b = oracle.evolve(initial, t);
        auto ia = a.entries.begin();
        auto ib = b.entries.begin();
        while (ia != a.entries.end() || ib != b.entries.end()) {
            if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first))
                worst = std::max(worst, std::abs(ia++->second));
            else if (ia == a.entries.end() || ib->first < ia->first)
                worst = std::max(worst, std::abs(ib++->second));
            else {
                worst = std::max(worst, std::abs(ia->second - ib->second));
                ++ia;
                ++ib;
            }
        }
    }
    return worst;
}

} // namespace lcav
