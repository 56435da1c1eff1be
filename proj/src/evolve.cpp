#include "lcav/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lcav/observables.hpp"

namespace lcav {

namespace {

// Free-evolution phase rate of a label in the full-phase frame. Both
// excitation numbers are shifted so that they are constant across a block.
double label_phase_rate(const AbsoluteFreqs& w, const Label& l)
{
    const int n1 = l.n_left - (l.atom == 1 ? 1 : 0) + 1;
    const int n2 = l.n_right - (l.atom == 3 ? 1 : 0) + 1;
    return w.omega_L * n1 + w.omega_R * n2 + w.omega_2 - w.omega_L - w.omega_R;
}

} // namespace

BlockDecomposition decompose(const JointState& state, const ValidatedModel& model)
{
    if (state.frame == Frame::full_phase && !model->absolute_freqs)
        throw std::invalid_argument(
            "decompose: the full-phase frame requires absolute frequencies");

    std::map<std::pair<int, int>, Eigen::Vector3cd> blocks;
    BlockDecomposition out;
    out.nmax_left = state.nmax_left;
    out.nmax_right = state.nmax_right;
    out.frame = state.frame;

    const auto slot_of = [&blocks](int nl, int nr) -> Eigen::Vector3cd& {
        const auto [it, inserted] = blocks.try_emplace({nl, nr});
        if (inserted)
            it->second.setZero();
        return it->second;
    };

    for (const auto& [label, amp] : state.entries) {
        if (label.atom == 1) {
            if (label.n_left == 0)
                out.residual.push_back(
                    {label, amp, interaction_diagonal(model.params(), label)});
            else
                slot_of(label.n_left - 1, label.n_right)(0) = amp;
        } else if (label.atom == 2) {
            slot_of(label.n_left, label.n_right)(1) = amp;
        } else {
            if (label.n_right == 0)
                out.residual.push_back(
                    {label, amp, interaction_diagonal(model.params(), label)});
            else
                slot_of(label.n_left, label.n_right - 1)(2) = amp;
        }
    }

    out.blocks.reserve(blocks.size());
    for (const auto& [key, psi0] : blocks)
        out.blocks.push_back({block_coefficients(model, key.first, key.second), psi0});
    std::sort(out.residual.begin(), out.residual.end(),
              [](const ResidualEntry& x, const ResidualEntry& y) { return x.label < y.label; });
    return out;
}

namespace {

// Shared worker for evolve_state and time_sweep: block eigensystems, the
// rotated initial vectors, and the sorted label layout are built once.
class SweepEngine {
public:
    SweepEngine(const JointState& initial, const ValidatedModel& model)
        : dec_(decompose(initial, model)), frame_phases_(dec_.frame == Frame::full_phase)
    {
        eigs_.reserve(dec_.blocks.size());
        rotated_.reserve(dec_.blocks.size());
        for (const BlockSlot& slot : dec_.blocks) {
            eigs_.push_back(eigensystem(slot.block));
            rotated_.push_back(eigs_.back().vectors.adjoint() * slot.psi0);
        }

        int top_left = initial.nmax_left, top_right = initial.nmax_right;
        std::vector<std::pair<Label, size_t>> order;
        order.reserve(3 * dec_.blocks.size() + dec_.residual.size());
        for (size_t b = 0; b < dec_.blocks.size(); ++b) {
            const auto labels = dec_.blocks[b].block.labels();
            for (int s = 0; s < 3; ++s) {
                order.emplace_back(labels[s], 3 * b + s);
                top_left = std::max(top_left, labels[s].n_left);
                top_right = std::max(top_right, labels[s].n_right);
            }
        }
        const size_t residual_base = 3 * dec_.blocks.size();
        for (size_t r = 0; r < dec_.residual.size(); ++r)
            order.emplace_back(dec_.residual[r].label, residual_base + r);
        std::sort(order.begin(), order.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });

        template_.nmax_left = top_left;
        template_.nmax_right = top_right;
        template_.frame = dec_.frame;
        template_.entries.resize(order.size());
        position_.resize(order.size());
        for (size_t i = 0; i < order.size(); ++i) {
            template_.entries[i].first = order[i].first;
            position_[order[i].second] = i;
        }
        if (frame_phases_) {
            const AbsoluteFreqs& w = *model->absolute_freqs;
            rates_.resize(order.size());
            for (size_t i = 0; i < order.size(); ++i)
                rates_[i] = label_phase_rate(w, template_.entries[i].first);
        }
    }

    const BlockDecomposition& decomposition() const { return dec_; }

    // State at time t written into the reusable layout.
    const JointState& state_at(double t)
    {
        for (size_t b = 0; b < dec_.blocks.size(); ++b) {
            Eigen::Vector3cd scaled;
            for (int k = 0; k < 3; ++k)
                scaled(k) = std::exp(c64(0.0, -eigs_[b].energies(k) * t)) * rotated_[b](k);
            const Eigen::Vector3cd psi = eigs_[b].vectors * scaled;
            for (int s = 0; s < 3; ++s)
                template_.entries[position_[3 * b + s]].second = psi(s);
        }
        const size_t residual_base = 3 * dec_.blocks.size();
        for (size_t r = 0; r < dec_.residual.size(); ++r) {
            const ResidualEntry& re = dec_.residual[r];
            template_.entries[position_[residual_base + r]].second =
                re.amplitude * std::exp(c64(0.0, -re.energy * t));
        }
        if (frame_phases_)
            for (size_t i = 0; i < template_.entries.size(); ++i)
                template_.entries[i].second *= std::exp(c64(0.0, -rates_[i] * t));
        return template_;
    }

    double residual_mass() const
    {
        double s = 0.0;
        for (const ResidualEntry& re : dec_.residual)
            s += std::norm(re.amplitude);
        return s;
    }

private:
    BlockDecomposition dec_;
    bool frame_phases_;
    std::vector<SubspaceEigensystem> eigs_;
    std::vector<Eigen::Vector3cd> rotated_;
    std::vector<size_t> position_; // slot index -> entry index
    std::vector<double> rates_;
    JointState template_;
};

} // namespace

JointState evolve_state(const JointState& state, const ValidatedModel& model, double t)
{
    if (!std::isfinite(t))
        throw std::invalid_argument("evolve_state: time must be finite");
    if (t == 0.0)
        return state;
    SweepEngine engine(state, model);
    return engine.state_at(t);
}

std::vector<ObservableRow> time_sweep(const JointState& initial, const ValidatedModel& model,
                                      std::span<const double> grid, ObservableSelection select)
{
    if (grid.empty())
        throw std::invalid_argument("time_sweep: empty time grid");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw std::invalid_argument("time_sweep: grid times must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("time_sweep: grid must be strictly increasing");
    }

    SweepEngine engine(initial, model);
    const double residual_mass = engine.residual_mass();

    std::vector<ObservableRow> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        const JointState& state = (t == 0.0) ? initial : engine.state_at(t);
        ObservableRow row;
        row.t = t;
        if (select.populations) {
            row.norm = state.norm_squared();
            row.residual_mass = residual_mass;
        }
        if (select.populations || select.entropy) {
            const AtomDensityMatrix rho = reduced_atom(state);
            if (select.populations) {
                row.rho11 = rho.rho(0, 0).real();
                row.rho22 = rho.rho(1, 1).real();
                row.rho33 = rho.rho(2, 2).real();
            }
            if (select.entropy)
                row.entropy = atom_entropy(rho);
        }
        if (select.variances || select.moments) {
            if (select.variances)
                require_converged_state(state);
            const ModeMoments m = mode_moments(state);
            if (select.moments) {
                row.mean_n_left = m.n_left;
                row.mean_n_right = m.n_right;
            }
            if (select.variances) {
                row.duan_total = duan_total_variance(m);
                const SqueezingVariances sq = squeezing_variances(m);
                row.sq_plus = sq.plus;
                row.sq_minus = sq.minus;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace lcav
