#include "lcav/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcav {

FieldSpec FieldSpec::coherent_state(c64 alpha, double tail_eps)
{
    FieldSpec s;
    s.kind = Kind::coherent;
    s.alpha = alpha;
    s.tail_eps = tail_eps;
    return s;
}

FieldSpec FieldSpec::binomial_state(double eta, int max_photons, double tail_eps)
{
    FieldSpec s;
    s.kind = Kind::binomial;
    s.eta = eta;
    s.max_photons = max_photons;
    s.tail_eps = tail_eps;
    return s;
}

FieldSpec FieldSpec::explicit_state(std::vector<c64> amplitudes, double tail_eps)
{
    FieldSpec s;
    s.kind = Kind::explicit_list;
    s.amplitudes = std::move(amplitudes);
    s.tail_eps = tail_eps;
    return s;
}

void validate_field(const FieldSpec& spec)
{
    if (!(spec.tail_eps > 0.0) || spec.tail_eps > 1e-2)
        throw std::invalid_argument("field: tail_eps must lie in (0, 1e-2]");
    switch (spec.kind) {
    case FieldSpec::Kind::coherent:
        if (!std::isfinite(spec.alpha.real()) || !std::isfinite(spec.alpha.imag()))
            throw std::invalid_argument("field: coherent alpha must be finite");
        return;
    case FieldSpec::Kind::binomial:
        if (!(spec.eta >= 0.0 && spec.eta <= 1.0))
            throw std::invalid_argument("field: binomial eta must lie in [0, 1]");
        if (spec.max_photons < 0)
            throw std::invalid_argument("field: binomial M must be non-negative");
        return;
    case FieldSpec::Kind::explicit_list: {
        if (spec.amplitudes.empty())
            throw std::invalid_argument("field: explicit amplitude list is empty");
        double norm2 = 0.0;
        for (const c64& g : spec.amplitudes) {
            if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
                throw std::invalid_argument("field: explicit amplitudes must be finite");
            norm2 += std::norm(g);
        }
        if (std::abs(norm2 - 1.0) > 1e-12)
            throw std::invalid_argument("field: explicit amplitudes are not normalized");
        return;
    }
    }
    throw std::logic_error("unreachable field kind");
}

namespace {

std::vector<double> binomial_log_probs(double eta, int m)
{
    // log of C(M,n) eta^n (1-eta)^(M-n); eta strictly inside (0,1)
    std::vector<double> lp(static_cast<size_t>(m) + 1);
    const double le = std::log(eta), l1e = std::log1p(-eta);
    const double lm = std::lgamma(m + 1.0);
    for (int n = 0; n <= m; ++n)
        lp[n] = lm - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0) + n * le + (m - n) * l1e;
    return lp;
}

} // namespace

std::vector<c64> field_amplitudes(const FieldSpec& spec, int nmax)
{
    if (nmax < 0)
        throw std::invalid_argument("field_amplitudes: nmax must be non-negative");
    validate_field(spec);
    std::vector<c64> g(static_cast<size_t>(nmax) + 1, 0.0);
    switch (spec.kind) {
    case FieldSpec::Kind::coherent: {
        g[0] = std::exp(-0.5 * std::norm(spec.alpha));
        for (int n = 1; n <= nmax; ++n)
            g[n] = g[n - 1] * spec.alpha / std::sqrt(static_cast<double>(n));
        return g;
    }
    case FieldSpec::Kind::binomial: {
        if (spec.eta == 0.0) {
            g[0] = 1.0;
            return g;
        }
        if (spec.eta == 1.0) {
            if (spec.max_photons <= nmax)
                g[spec.max_photons] = 1.0;
            return g;
        }
        const auto lp = binomial_log_probs(spec.eta, spec.max_photons);
        const int top = std::min(nmax, spec.max_photons);
        for (int n = 0; n <= top; ++n)
            g[n] = std::exp(0.5 * lp[n]);
        return g;
    }
    case FieldSpec::Kind::explicit_list: {
        const int top = std::min<int>(nmax, static_cast<int>(spec.amplitudes.size()) - 1);
        for (int n = 0; n <= top; ++n)
            g[n] = spec.amplitudes[n];
        return g;
    }
    }
    throw std::logic_error("unreachable field kind");
}

namespace {

[[noreturn]] void truncation_overflow(int required, int cap)
{
    std::ostringstream msg;
    msg << "choose_truncation: required cutoff " << required
        << " exceeds the ceiling " << cap;
    throw std::invalid_argument(msg.str());
}

// Smallest K with sum_{n > K} probs[n] < eps; probs beyond the stored range
// are assumed negligible. Suffix sums avoid cancellation near 1.
int cutoff_from_probs(const std::vector<double>& probs, double eps)
{
    std::vector<double> tail(probs.size() + 1, 0.0);
    for (size_t n = probs.size(); n-- > 0;)
        tail[n] = tail[n + 1] + probs[n];
    for (size_t k = 0; k < probs.size(); ++k)
        if (tail[k + 1] < eps)
            return static_cast<int>(k);
    return static_cast<int>(probs.size()) - 1;
}

} // namespace

int choose_truncation(const FieldSpec& spec, int cap)
{
    validate_field(spec);
    if (cap < 0)
        throw std::invalid_argument("choose_truncation: cap must be non-negative");
    switch (spec.kind) {
    case FieldSpec::Kind::coherent: {
        const double mu = std::norm(spec.alpha);
        if (mu == 0.0)
            return 0;
        // Poisson weights by recurrence until the stored remainder is
        // negligible against tail_eps, then scan suffix sums.
        std::vector<double> p;
        p.push_back(std::exp(-mu));
        const int hard_stop = 4 * cap + 1024;
        for (int n = 1;; ++n) {
            p.push_back(p.back() * mu / n);
            if (n > mu && p.back() < spec.tail_eps * 1e-8)
                break;
            if (n > hard_stop)
                truncation_overflow(n, cap);
        }
        const int k = cutoff_from_probs(p, spec.tail_eps);
        if (k > cap)
            truncation_overflow(k, cap);
        return k;
    }
    case FieldSpec::Kind::binomial:
        if (spec.max_photons > cap)
            truncation_overflow(spec.max_photons, cap);
        return spec.max_photons;
    case FieldSpec::Kind::explicit_list: {
        std::vector<double> p(spec.amplitudes.size());
        for (size_t n = 0; n < p.size(); ++n)
            p[n] = std::norm(spec.amplitudes[n]);
        const int k = cutoff_from_probs(p, spec.tail_eps);
        if (k > cap)
            truncation_overflow(k, cap);
        return k;
    }
    }
    throw std::logic_error("unreachable field kind");
}

void validate_atom(const AtomInit& atom)
{
    const double norm2 = std::norm(atom.a) + std::norm(atom.b) + std::norm(atom.c);
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-12)
        throw std::invalid_argument("atom: initial amplitudes are not normalized");
}

double JointState::norm_squared() const
{
    double s = 0.0;
    for (const auto& [label, amp] : entries)
        s += std::norm(amp);
    return s;
}

c64 JointState::amplitude(const Label& label) const
{
    const auto it = std::lower_bound(entries.begin(), entries.end(), label,
                                     [](const auto& e, const Label& l) { return e.first < l; });
    if (it != entries.end() && it->first == label)
        return it->second;
    return 0.0;
}

JointState make_state(std::vector<std::pair<Label, c64>> entries, int nmax_left,
                      int nmax_right, Frame frame)
{
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t i = 0; i < entries.size(); ++i) {
        const Label& l = entries[i].first;
        if (l.atom < 1 || l.atom > 3 || l.n_left < 0 || l.n_right < 0 ||
            l.n_left > nmax_left || l.n_right > nmax_right)
            throw std::invalid_argument("make_state: label outside the basis");
        if (i > 0 && entries[i - 1].first == l)
            throw std::invalid_argument("make_state: duplicate label");
    }
    JointState state;
    state.entries = std::move(entries);
    state.nmax_left = nmax_left;
    state.nmax_right = nmax_right;
    state.frame = frame;
    return state;
}

JointState make_initial_state(const AtomInit& atom, const FieldSpec& left,
                              const FieldSpec& right, Frame frame, int cap)
{
    validate_atom(atom);
    const int kl = choose_truncation(left, cap);
    const int kr = choose_truncation(right, cap);
    const auto gl = field_amplitudes(left, kl);
    const auto gr = field_amplitudes(right, kr);

    JointState state;
    state.nmax_left = kl;
    state.nmax_right = kr;
    state.frame = frame;
    const c64 levels[3] = {atom.a, atom.b, atom.c};
    for (int i = 1; i <= 3; ++i) {
        if (levels[i - 1] == 0.0)
            continue;
        for (int m = 0; m <= kl; ++m) {
            if (gl[m] == 0.0)
                continue;
            const c64 am = levels[i - 1] * gl[m];
            for (int n = 0; n <= kr; ++n) {
                if (gr[n] == 0.0)
                    continue;
                state.entries.emplace_back(Label{i, m, n}, am * gr[n]);
            }
        }
    }

    const double tol = 10.0 * std::max(left.tail_eps, right.tail_eps);
    const double norm2 = state.norm_squared();
    if (norm2 < 1.0 - tol || norm2 > 1.0 + 1e-12)
        throw consistency_error("make_initial_state: truncated norm outside tolerance");
    return state;
}

JointState apply_ladder(const JointState& state, LadderOp op)
{
    JointState out;
    out.nmax_left = state.nmax_left;
    out.nmax_right = state.nmax_right;
    out.frame = state.frame;
    out.leakage = state.leakage;
    out.entries.reserve(state.entries.size());
    const bool on_left = (op.mode == ModeSide::left);
    const int top = on_left ? state.nmax_left : state.nmax_right;

    for (const auto& [label, amp] : state.entries) {
        const int n = on_left ? label.n_left : label.n_right;
        Label shifted = label;
        switch (op.kind) {
        case LadderKind::annihilate:
            if (n == 0)
                continue;
            (on_left ? shifted.n_left : shifted.n_right) = n - 1;
            out.entries.emplace_back(shifted, amp * std::sqrt(static_cast<double>(n)));
            break;
        case LadderKind::create:
            if (n + 1 > top) {
                out.leakage += static_cast<double>(n + 1) * std::norm(amp);
                continue;
            }
            (on_left ? shifted.n_left : shifted.n_right) = n + 1;
            out.entries.emplace_back(shifted, amp * std::sqrt(static_cast<double>(n + 1)));
            break;
        case LadderKind::number:
            if (n == 0)
                continue;
            out.entries.emplace_back(shifted, amp * static_cast<double>(n));
            break;
        }
    }
    return out;
}

c64 inner_product(const JointState& bra, const JointState& ket)
{
    c64 s = 0.0;
    auto i = bra.entries.begin();
    auto j = ket.entries.begin();
    while (i != bra.entries.end() && j != ket.entries.end()) {
        if (i->first < j->first)
            ++i;
        else if (j->first < i->first)
            ++j;
        else {
            s += std::conj(i->second) * j->second;
            ++i;
            ++j;
        }
    }
    return s;
}

ExpectationResult expectation_with_leakage(const JointState& state,
                                           std::span<const LadderOp> word)
{
    if (word.size() > 4)
        throw std::invalid_argument("expectation: operator words are limited to length 4");
    JointState current = state;
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        current = apply_ladder(current, *it);
    return {inner_product(state, current), current.leakage - state.leakage};
}

c64 expectation(const JointState& state, std::span<const LadderOp> word)
{
    return expectation_with_leakage(state, word).value;
}

c64 expectation(const JointState& state, std::initializer_list<LadderOp> word)
{
    return expectation(state, std::span<const LadderOp>(word.begin(), word.size()));
}

namespace {

using EntryIter = std::vector<std::pair<Label, c64>>::const_iterator;

std::pair<EntryIter, EntryIter> atom_slice(const JointState& state, int atom)
{
    const auto by_label = [](const auto& e, const Label& l) { return e.first < l; };
    const auto lo = std::lower_bound(state.entries.begin(), state.entries.end(),
                                     Label{atom, 0, 0}, by_label);
    const auto hi = std::lower_bound(lo, state.entries.end(), Label{atom + 1, 0, 0}, by_label);
    return {lo, hi};
}

} // namespace

AtomDensityMatrix reduced_atom(const JointState& state)
{
    AtomDensityMatrix out;
    out.rho.setZero();
    std::pair<EntryIter, EntryIter> slice[3] = {atom_slice(state, 1), atom_slice(state, 2),
                                                atom_slice(state, 3)};
    for (int i = 0; i < 3; ++i) {
        double pop = 0.0;
        for (auto it = slice[i].first; it != slice[i].second; ++it)
            pop += std::norm(it->second);
        out.rho(i, i) = pop;
    }
    // off-diagonals: merge join the two atom slices on the photon labels
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            c64 s = 0.0;
            auto p = slice[i].first;
            auto q = slice[j].first;
            while (p != slice[i].second && q != slice[j].second) {
                const auto pm = std::pair(p->first.n_left, p->first.n_right);
                const auto qm = std::pair(q->first.n_left, q->first.n_right);
                if (pm < qm)
                    ++p;
                else if (qm < pm)
                    ++q;
                else {
                    s += p->second * std::conj(q->second);
                    ++p;
                    ++q;
                }
            }
            out.rho(i, j) = s;
            out.rho(j, i) = std::conj(s);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver;
    solver.compute(out.rho, Eigen::EigenvaluesOnly);
    out.eigenvalues = solver.eigenvalues();
    return out;
}

FieldDensityMatrix reduced_field(const JointState& state)
{
    const int dl = state.nmax_left + 1;
    const int dr = state.nmax_right + 1;
    if (static_cast<long>(dl) * dr > 4096)
        throw std::invalid_argument("reduced_field: field dimension exceeds 4096");
    FieldDensityMatrix out;
    out.dim_left = dl;
    out.dim_right = dr;
    out.rho = Eigen::MatrixXcd::Zero(dl * dr, dl * dr);
    for (int atom = 1; atom <= 3; ++atom) {
        const auto [lo, hi] = atom_slice(state, atom);
        if (lo == hi)
            continue;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dl * dr);
        for (auto it = lo; it != hi; ++it)
            v(it->first.n_left * dr + it->first.n_right) = it->second;
        out.rho += v * v.adjoint();
    }
    return out;
}

} // namespace lcav
