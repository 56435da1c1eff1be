#include "lcav/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "lcav/observables.hpp"
#include "lcav/oracle.hpp"

namespace lcav {

namespace {

// ---------------------------------------------------------------- numbers --

void append_number(std::string& out, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

std::string format_number(double v)
{
    std::string s;
    append_number(s, v);
    return s;
}

std::string format_complex(c64 v)
{
    std::string s = "(";
    append_number(s, v.real());
    s += ',';
    append_number(s, v.imag());
    s += ')';
    return s;
}

// ------------------------------------------------------------- INI reader --

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_at(int line, const std::string& message)
{
    throw config_error("config line " + std::to_string(line) + ": " + message);
}

struct RawItem {
    std::string value;
    int line = 0;
};

struct RawSection {
    int line = 0;
    std::map<std::string, RawItem> items;
};

std::map<std::string, RawSection> read_sections(std::istream& in)
{
    static constexpr std::array<std::string_view, 5> known = {"model", "atom", "left",
                                                              "right", "run"};
    std::map<std::string, RawSection> sections;
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                fail_at(lineno, "unterminated section header");
            current = trim(std::string_view(t).substr(1, t.size() - 2));
            if (std::find(known.begin(), known.end(), current) == known.end())
                fail_at(lineno, "unknown section [" + current + "]");
            const auto [it, inserted] = sections.try_emplace(current);
            if (!inserted)
                fail_at(lineno, "duplicate section [" + current + "]");
            it->second.line = lineno;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            fail_at(lineno, "expected 'key = value'");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty())
            fail_at(lineno, "empty key");
        if (current.empty())
            fail_at(lineno, "key '" + key + "' appears before any section header");
        const auto [it, inserted] = sections[current].items.try_emplace(
            key, RawItem{trim(std::string_view(t).substr(eq + 1)), lineno});
        if (!inserted)
            fail_at(lineno, "duplicate key '" + key + "' in [" + current + "]");
    }
    return sections;
}

// Tracks which keys a section handed out so leftovers can be rejected by name.
class SectionReader {
public:
    SectionReader(std::string name, const RawSection* raw)
        : name_(std::move(name)), raw_(raw)
    {
    }

    bool present() const { return raw_ != nullptr; }
    int line() const { return raw_ ? raw_->line : 0; }

    std::optional<RawItem> take(const std::string& key)
    {
        if (!raw_)
            return std::nullopt;
        const auto it = raw_->items.find(key);
        if (it == raw_->items.end())
            return std::nullopt;
        taken_.insert(key);
        return it->second;
    }

    RawItem require(const std::string& key)
    {
        auto item = take(key);
        if (!item)
            throw config_error("config section [" + name_ + "] is missing key '" + key + "'");
        return *item;
    }

    void finish()
    {
        if (!raw_)
            return;
        for (const auto& [key, item] : raw_->items)
            if (!taken_.count(key))
                fail_at(item.line, "unknown key '" + key + "' in [" + name_ + "]");
    }

private:
    std::string name_;
    const RawSection* raw_;
    std::set<std::string> taken_;
};

double parse_double(const RawItem& item, const char* what)
{
    std::istringstream ss(item.value);
    double v;
    ss >> v;
    // values arrive pre-trimmed, so any character left behind is garbage
    if (ss.fail() || ss.peek() != std::istringstream::traits_type::eof())
        fail_at(item.line, std::string("expected a real number for ") + what);
    return v;
}

int parse_int(const RawItem& item, const char* what)
{
    std::istringstream ss(item.value);
    int v;
    ss >> v;
    if (ss.fail() || ss.peek() != std::istringstream::traits_type::eof())
        fail_at(item.line, std::string("expected an integer for ") + what);
    return v;
}

c64 parse_complex(const RawItem& item, const char* what)
{
    std::istringstream ss(item.value);
    c64 v;
    ss >> v;
    if (ss.fail() || ss.peek() != std::istringstream::traits_type::eof())
        fail_at(item.line,
                std::string("expected a complex number, 'x' or '(re,im)', for ") + what);
    return v;
}

bool parse_bool(const RawItem& item, const char* what)
{
    if (item.value == "true" || item.value == "1")
        return true;
    if (item.value == "false" || item.value == "0")
        return false;
    fail_at(item.line, std::string("expected true or false for ") + what);
}

Beta parse_beta(const RawItem& item)
{
    const std::string& v = item.value;
    if (v == "-1/2" || v == "-0.5")
        return Beta::minus_half;
    if (v == "0")
        return Beta::zero;
    if (v == "1/2" || v == "+1/2" || v == "0.5" || v == "+0.5")
        return Beta::plus_half;
    const auto parsed = beta_from_value(parse_double(item, "beta"));
    if (!parsed)
        fail_at(item.line, "beta must be -1/2, 0, or +1/2");
    return *parsed;
}

Frame parse_frame(const RawItem& item)
{
    if (item.value == "interaction")
        return Frame::interaction;
    if (item.value == "full")
        return Frame::full_phase;
    fail_at(item.line, "frame must be 'interaction' or 'full'");
}

ObservableSelection parse_selection(const RawItem& item)
{
    if (item.value == "all")
        return ObservableSelection::all();
    ObservableSelection sel;
    sel.populations = sel.entropy = sel.variances = sel.moments = false;
    if (item.value == "none")
        return sel;
    std::string_view rest = item.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string name = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (name == "populations")
            sel.populations = true;
        else if (name == "entropy")
            sel.entropy = true;
        else if (name == "variances")
            sel.variances = true;
        else if (name == "moments")
            sel.moments = true;
        else
            fail_at(item.line, "unknown observable group '" + name + "'");
    }
    return sel;
}

std::vector<c64> parse_amplitude_list(const RawItem& item)
{
    std::istringstream ss(item.value);
    std::vector<c64> amps;
    c64 v;
    while (ss >> v)
        amps.push_back(v);
    if (!ss.eof())
        fail_at(item.line, "malformed amplitude list");
    if (amps.empty())
        fail_at(item.line, "amplitude list is empty");
    return amps;
}

FieldSpec read_field_section(const char* name, const RawSection* raw)
{
    if (!raw)
        throw config_error(std::string("missing required section [") + name + "]");
    SectionReader sec(name, raw);
    const RawItem kind = sec.require("kind");
    FieldSpec spec;
    if (kind.value == "coherent") {
        spec = FieldSpec::coherent_state(parse_complex(sec.require("alpha"), "alpha"));
    } else if (kind.value == "binomial") {
        spec = FieldSpec::binomial_state(parse_double(sec.require("eta"), "eta"),
                                         parse_int(sec.require("max_photons"), "max_photons"));
    } else if (kind.value == "explicit") {
        spec = FieldSpec::explicit_state(parse_amplitude_list(sec.require("amplitudes")));
    } else {
        fail_at(kind.line, "field kind must be coherent, binomial, or explicit");
    }
    sec.finish();
    return spec;
}

const RawSection* find_section(const std::map<std::string, RawSection>& sections,
                               const char* name)
{
    const auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
}

} // namespace

ScenarioConfig parse_config(std::istream& in)
{
    const auto sections = read_sections(in);
    ScenarioConfig c;

    SectionReader model("model", find_section(sections, "model"));
    if (const auto v = model.take("delta_L"))
        c.model.delta_L = parse_double(*v, "delta_L");
    if (const auto v = model.take("delta_R"))
        c.model.delta_R = parse_double(*v, "delta_R");
    if (const auto v = model.take("chi_L"))
        c.model.chi_L = parse_double(*v, "chi_L");
    if (const auto v = model.take("chi_R"))
        c.model.chi_R = parse_double(*v, "chi_R");
    if (const auto v = model.take("chi_C"))
        c.model.chi_C = parse_double(*v, "chi_C");
    if (const auto v = model.take("lambda_L"))
        c.model.lambda_L = parse_double(*v, "lambda_L");
    if (const auto v = model.take("lambda_R"))
        c.model.lambda_R = parse_double(*v, "lambda_R");
    if (const auto v = model.take("beta"))
        c.model.beta = parse_beta(*v);
    if (const auto v = model.take("omega_rabi"))
        c.model.omega_rabi = parse_complex(*v, "omega_rabi");
    {
        const auto wl = model.take("omega_L");
        const auto wr = model.take("omega_R");
        const auto w2 = model.take("omega_2");
        const int given = int(bool(wl)) + int(bool(wr)) + int(bool(w2));
        if (given == 3)
            c.model.absolute_freqs = AbsoluteFreqs{parse_double(*wl, "omega_L"),
                                                   parse_double(*wr, "omega_R"),
                                                   parse_double(*w2, "omega_2")};
        else if (given != 0)
            throw config_error(
                "omega_L, omega_R, omega_2 must be given together or not at all");
    }
    model.finish();

    const RawSection* atom_raw = find_section(sections, "atom");
    if (!atom_raw)
        throw config_error("missing required section [atom]");
    SectionReader atom("atom", atom_raw);
    if (const auto v = atom.take("a"))
        c.atom.a = parse_complex(*v, "a");
    if (const auto v = atom.take("b"))
        c.atom.b = parse_complex(*v, "b");
    if (const auto v = atom.take("c"))
        c.atom.c = parse_complex(*v, "c");
    atom.finish();

    c.left = read_field_section("left", find_section(sections, "left"));
    c.right = read_field_section("right", find_section(sections, "right"));

    SectionReader run("run", find_section(sections, "run"));
    if (const auto v = run.take("tmax"))
        c.tmax = parse_double(*v, "tmax");
    if (const auto v = run.take("steps"))
        c.steps = parse_int(*v, "steps");
    if (const auto v = run.take("frame"))
        c.frame = parse_frame(*v);
    if (const auto v = run.take("tail_eps"))
        c.tail_eps = parse_double(*v, "tail_eps");
    if (const auto v = run.take("oracle_check"))
        c.oracle_check = parse_bool(*v, "oracle_check");
    if (const auto v = run.take("oracle_nmax"))
        c.oracle_nmax = parse_int(*v, "oracle_nmax");
    if (const auto v = run.take("observables"))
        c.select = parse_selection(*v);
    if (const auto v = run.take("out"))
        c.out_path = v->value;
    run.finish();

    return c;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& c)
{
    std::string s;
    const auto kv = [&s](const char* key, const std::string& value) {
        s += key;
        s += " = ";
        s += value;
        s += '\n';
    };

    s += "[model]\n";
    kv("delta_L", format_number(c.model.delta_L));
    kv("delta_R", format_number(c.model.delta_R));
    kv("chi_L", format_number(c.model.chi_L));
    kv("chi_R", format_number(c.model.chi_R));
    kv("chi_C", format_number(c.model.chi_C));
    kv("lambda_L", format_number(c.model.lambda_L));
    kv("lambda_R", format_number(c.model.lambda_R));
    kv("beta", format_number(beta_exponent(c.model.beta)));
    kv("omega_rabi", format_complex(c.model.omega_rabi));
    if (c.model.absolute_freqs) {
        kv("omega_L", format_number(c.model.absolute_freqs->omega_L));
        kv("omega_R", format_number(c.model.absolute_freqs->omega_R));
        kv("omega_2", format_number(c.model.absolute_freqs->omega_2));
    }

    s += "\n[atom]\n";
    kv("a", format_complex(c.atom.a));
    kv("b", format_complex(c.atom.b));
    kv("c", format_complex(c.atom.c));

    const auto field = [&](const char* name, const FieldSpec& f) {
        s += "\n[";
        s += name;
        s += "]\n";
        switch (f.kind) {
        case FieldSpec::Kind::coherent:
            kv("kind", "coherent");
            kv("alpha", format_complex(f.alpha));
            break;
        case FieldSpec::Kind::binomial:
            kv("kind", "binomial");
            kv("eta", format_number(f.eta));
            kv("max_photons", std::to_string(f.max_photons));
            break;
        case FieldSpec::Kind::explicit_list: {
            kv("kind", "explicit");
            std::string amps;
            for (size_t i = 0; i < f.amplitudes.size(); ++i) {
                if (i)
                    amps += ' ';
                amps += format_complex(f.amplitudes[i]);
            }
            kv("amplitudes", amps);
            break;
        }
        }
    };
    field("left", c.left);
    field("right", c.right);

    s += "\n[run]\n";
    kv("tmax", format_number(c.tmax));
    kv("steps", std::to_string(c.steps));
    kv("frame", c.frame == Frame::interaction ? "interaction" : "full");
    kv("tail_eps", format_number(c.tail_eps));
    kv("oracle_check", c.oracle_check ? "true" : "false");
    kv("oracle_nmax", std::to_string(c.oracle_nmax));
    {
        const ObservableSelection& sel = c.select;
        std::string groups;
        if (sel.populations && sel.entropy && sel.variances && sel.moments) {
            groups = "all";
        } else {
            const auto add = [&groups](bool on, const char* name) {
                if (!on)
                    return;
                if (!groups.empty())
                    groups += ',';
                groups += name;
            };
            add(sel.populations, "populations");
            add(sel.entropy, "entropy");
            add(sel.variances, "variances");
            add(sel.moments, "moments");
            if (groups.empty())
                groups = "none";
        }
        kv("observables", groups);
    }
    if (!c.out_path.empty())
        kv("out", c.out_path);
    return s;
}

// --------------------------------------------------------------- presets --

namespace {

struct PresetEntry {
    std::string id;
    ScenarioConfig config;
};

ScenarioConfig figure_config(const AtomInit& atom, const FieldSpec& field, Beta beta,
                             double chi_c, c64 omega, double delta = 0.0)
{
    ScenarioConfig c;
    c.atom = atom;
    c.left = field;
    c.right = field;
    c.model.beta = beta;
    c.model.chi_C = chi_c;
    c.model.omega_rabi = omega;
    c.model.delta_L = delta;
    c.model.delta_R = delta;
    // Mean photon numbers of 20..25 amplify boundary mass in the two-creation
    // moment words by roughly <n>+1, so the presets pin a tighter tail budget
    // than the API default to keep the moments comfortably converged.
    c.tail_eps = 1e-14;
    return c;
}

const std::vector<PresetEntry>& preset_table()
{
    static const std::vector<PresetEntry> table = [] {
        std::vector<PresetEntry> t;
        const auto add = [&t](std::string id, ScenarioConfig config) {
            t.push_back({std::move(id), std::move(config)});
        };

        const AtomInit lower{1.0, 0.0, 0.0};
        const AtomInit upper{0.0, 1.0, 0.0};
        const AtomInit lower_right{0.0, 0.0, 1.0};
        const FieldSpec coh25 = FieldSpec::coherent_state(5.0);
        const FieldSpec coh20 = FieldSpec::coherent_state(std::sqrt(20.0));
        const FieldSpec coh15 = FieldSpec::coherent_state(std::sqrt(15.0));
        const FieldSpec coh10 = FieldSpec::coherent_state(std::sqrt(10.0));
        // The squeezing scenarios displace along the p quadrature so the
        // squeezed ellipse is read by c_- = p_R + p_L; a real displacement
        // puts the identical dips in c_+ instead. Entropy and populations
        // do not depend on this phase.
        const FieldSpec coh20p = FieldSpec::coherent_state(c64(0.0, std::sqrt(20.0)));
        const FieldSpec coh15p = FieldSpec::coherent_state(c64(0.0, std::sqrt(15.0)));
        const FieldSpec coh10p = FieldSpec::coherent_state(c64(0.0, std::sqrt(10.0)));
        const FieldSpec bin = FieldSpec::binomial_state(0.5, 50);

        const std::array<std::pair<char, AtomInit>, 3> fig2_atoms = {
            {{'a', lower}, {'b', upper}, {'c', lower_right}}};
        for (const auto& [letter, atom] : fig2_atoms) {
            add(std::string("fig2") + letter + "-I",
                figure_config(atom, coh25, Beta::zero, 0.0, 0.0));
            add(std::string("fig2") + letter + "-II",
                figure_config(atom, bin, Beta::zero, 0.0, 0.0));
        }

        const std::array<double, 7> fig3_chis = {0.0, 0.001, 0.01, 0.05, 0.1, 0.5, 1.0};
        for (size_t i = 0; i < fig3_chis.size(); ++i) {
            const char letter = static_cast<char>('a' + i);
            add(std::string("fig3") + letter + "-I",
                figure_config(upper, coh25, Beta::zero, fig3_chis[i], 0.0));
            add(std::string("fig3") + letter + "-II",
                figure_config(upper, bin, Beta::zero, fig3_chis[i], 0.0));
        }

        const std::array<double, 6> fig4_chis = {0.0, 0.001, 0.01, 0.05, 0.1, 1.0};
        for (size_t i = 0; i < fig4_chis.size(); ++i)
            add(std::string("fig4") + static_cast<char>('a' + i),
                figure_config(upper, coh25, Beta::plus_half, fig4_chis[i], 0.0));

        const std::array<double, 8> fig5_chis = {0.0,  0.002, 0.01, 0.03,
                                                 0.05, 0.1,   0.5,  1.0};
        for (size_t i = 0; i < fig5_chis.size(); ++i)
            add(std::string("fig5") + static_cast<char>('a' + i),
                figure_config(upper, coh25, Beta::minus_half, fig5_chis[i], 0.0));

        const std::array<double, 6> fig6_omegas = {0.0, 10.0, 20.0, 50.0, 100.0, 200.0};
        for (size_t i = 0; i < fig6_omegas.size(); ++i) {
            add(std::string("fig6") + static_cast<char>('a' + i),
                figure_config(upper, coh20, Beta::zero, 0.0, fig6_omegas[i]));
            add(std::string("fig6") + static_cast<char>('a' + i) + "-beta-half",
                figure_config(upper, coh20, Beta::plus_half, 0.0, fig6_omegas[i]));
        }

        add("fig7", figure_config(upper, coh20, Beta::plus_half, 0.0, 50.0));
        add("fig7-omega100", figure_config(upper, coh20, Beta::plus_half, 0.0, 100.0));
        add("fig7-omega200", figure_config(upper, coh20, Beta::plus_half, 0.0, 200.0));

        add("fig8", figure_config(upper, coh10, Beta::plus_half, 0.0, 200.0));
        add("fig8-nbar15", figure_config(upper, coh15, Beta::plus_half, 0.0, 200.0));
        add("fig8-nbar20", figure_config(upper, coh20, Beta::plus_half, 0.0, 200.0));

        add("fig9", figure_config(upper, coh20, Beta::plus_half, 0.0, 200.0, 0.0));
        add("fig9-delta10", figure_config(upper, coh20, Beta::plus_half, 0.0, 200.0, 10.0));
        add("fig9-delta20", figure_config(upper, coh20, Beta::plus_half, 0.0, 200.0, 20.0));

        add("fig10", figure_config(upper, coh20, Beta::plus_half, 0.001, 200.0));
        add("fig10-chic0.01", figure_config(upper, coh20, Beta::plus_half, 0.01, 200.0));
        add("fig10-chic0.1", figure_config(upper, coh20, Beta::plus_half, 0.1, 200.0));

        add("fig11", figure_config(upper, coh10p, Beta::minus_half, 0.0, 0.0));
        add("fig11-nbar15", figure_config(upper, coh15p, Beta::minus_half, 0.0, 0.0));
        add("fig11-nbar20", figure_config(upper, coh20p, Beta::minus_half, 0.0, 0.0));

        add("fig12", figure_config(upper, coh15p, Beta::minus_half, 0.0, 0.0, 0.0));
        add("fig12-delta1", figure_config(upper, coh15p, Beta::minus_half, 0.0, 0.0, 1.0));
        add("fig12-delta5", figure_config(upper, coh15p, Beta::minus_half, 0.0, 0.0, 5.0));

        add("fig13", figure_config(upper, coh15p, Beta::minus_half, 0.00005, 0.0));
        add("fig13-chic0.0002", figure_config(upper, coh15p, Beta::minus_half, 0.0002, 0.0));
        add("fig13-chic0.001", figure_config(upper, coh15p, Beta::minus_half, 0.001, 0.0));

        return t;
    }();
    return table;
}

} // namespace

std::vector<std::string> preset_ids()
{
    std::vector<std::string> ids;
    ids.reserve(preset_table().size());
    for (const PresetEntry& entry : preset_table())
        ids.push_back(entry.id);
    return ids;
}

ScenarioConfig preset(const std::string& id)
{
    for (const PresetEntry& entry : preset_table())
        if (entry.id == id)
            return entry.config;
    throw config_error("unknown preset id '" + id + "'");
}

// ------------------------------------------------------------- execution --

namespace {

std::vector<double> build_grid(double tmax, int steps)
{
    std::vector<double> grid(static_cast<size_t>(steps));
    if (steps == 1) {
        grid[0] = 0.0;
        return grid;
    }
    for (int k = 0; k < steps; ++k)
        grid[static_cast<size_t>(k)] = tmax * k / (steps - 1);
    return grid;
}

// The configured field truncated to the cross-check cutoff and renormalized.
FieldSpec reduced_field_spec(const FieldSpec& spec, int nmax)
{
    std::vector<c64> amps = field_amplitudes(spec, nmax);
    double mass = 0.0;
    for (const c64& a : amps)
        mass += std::norm(a);
    if (!(mass > 1e-12))
        throw consistency_error(
            "oracle check: the field keeps no amplitude below the check cutoff");
    const double scale = 1.0 / std::sqrt(mass);
    for (c64& a : amps)
        a *= scale;
    return FieldSpec::explicit_state(std::move(amps), spec.tail_eps);
}

double run_oracle_check(const ScenarioConfig& config, const ValidatedModel& model,
                        const FieldSpec& left, const FieldSpec& right)
{
    // The check exercises the same engine on the same parameters at a reduced
    // cutoff; frames add exact label phases only, so it runs in the
    // interaction frame regardless of the configured one.
    const JointState initial =
        make_initial_state(config.atom, reduced_field_spec(left, config.oracle_nmax),
                           reduced_field_spec(right, config.oracle_nmax),
                           Frame::interaction);
    const double span = config.tmax > 0.0 ? std::min(config.tmax, 5.0) : 5.0;
    std::vector<double> grid(21);
    for (size_t i = 0; i < grid.size(); ++i)
        grid[i] = span * static_cast<double>(i) / 20.0;
    const double deviation =
        compare_with_oracle(initial, model, grid, OracleVariant::block_consistent);
    if (!(deviation < 1e-9))
        throw consistency_error("oracle check failed: max amplitude deviation " +
                                format_number(deviation));
    return deviation;
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& config)
{
    if (!std::isfinite(config.tmax) || config.tmax < 0.0)
        throw config_error("tmax must be finite and non-negative");
    if (config.steps < 1)
        throw config_error("steps must be at least 1");
    if (config.steps > 1 && config.tmax == 0.0)
        throw config_error("tmax must be positive when the grid has more than one point");
    if (config.oracle_nmax < 1 || config.oracle_nmax > 20)
        throw config_error("oracle_nmax must lie in [1, 20]");
    if (config.frame == Frame::full_phase && !config.model.absolute_freqs)
        throw config_error("frame = full requires omega_L, omega_R, omega_2 in [model]");

    const ValidatedModel model = validate(config.model);
    validate_atom(config.atom);
    FieldSpec left = config.left;
    left.tail_eps = config.tail_eps;
    FieldSpec right = config.right;
    right.tail_eps = config.tail_eps;
    validate_field(left);
    validate_field(right);

    ScenarioResult result;
    result.grid = build_grid(config.tmax, config.steps);
    if (config.oracle_check)
        result.oracle_deviation = run_oracle_check(config, model, left, right);

    const JointState initial = make_initial_state(config.atom, left, right, config.frame);
    result.rows = time_sweep(initial, model, result.grid, config.select);
    return result;
}

void write_csv(std::ostream& out, const std::vector<ObservableRow>& rows)
{
    std::string buf =
        "t,entropy,rho11,rho22,rho33,duan_total,sq_plus,sq_minus,mean_nL,mean_nR,norm,"
        "residual_mass\n";
    for (const ObservableRow& r : rows) {
        const double cols[] = {r.t,        r.entropy,  r.rho11,       r.rho22,
                               r.rho33,    r.duan_total, r.sq_plus,   r.sq_minus,
                               r.mean_n_left, r.mean_n_right, r.norm, r.residual_mass};
        for (size_t i = 0; i < std::size(cols); ++i) {
            if (i)
                buf += ',';
            append_number(buf, cols[i]);
        }
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
}

// -------------------------------------------------------------- selftest --

namespace {

SubspaceBlock random_block(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> photons(0, 4);
    std::uniform_int_distribution<int> beta_index(0, 2);
    ModelParams p;
    p.delta_L = u01(rng);
    p.delta_R = u01(rng);
    p.chi_L = u01(rng);
    p.chi_R = u01(rng);
    p.chi_C = u01(rng);
    p.lambda_L = 0.5 + 1.5 * u01(rng);
    p.lambda_R = 0.5 + 1.5 * u01(rng);
    p.beta = static_cast<Beta>(beta_index(rng));
    p.omega_rabi = std::polar(2.0 * u01(rng), 6.283185307179586 * u01(rng));
    const ValidatedModel model = validate(p);
    return block_coefficients(model, photons(rng), photons(rng));
}

ModelParams random_model(std::mt19937_64& rng, bool with_drive)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> beta_index(0, 2);
    ModelParams p;
    p.delta_L = u01(rng);
    p.delta_R = u01(rng);
    p.chi_L = u01(rng);
    p.chi_R = u01(rng);
    p.chi_C = u01(rng);
    p.lambda_L = 0.5 + 1.5 * u01(rng);
    p.lambda_R = 0.5 + 1.5 * u01(rng);
    p.beta = static_cast<Beta>(beta_index(rng));
    if (with_drive)
        p.omega_rabi = std::polar(0.5 + 2.5 * u01(rng), 6.283185307179586 * u01(rng));
    return p;
}

JointState random_initial_state(std::mt19937_64& rng, int nmax)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto rc = [&]() { return c64(u(rng), u(rng)); };
    const auto normalized = [](std::vector<c64> v) {
        double mass = 0.0;
        for (const c64& a : v)
            mass += std::norm(a);
        const double scale = 1.0 / std::sqrt(mass);
        for (c64& a : v)
            a *= scale;
        return v;
    };
    std::vector<c64> atom;
    do {
        atom = {rc(), rc(), rc()};
    } while (std::norm(atom[0]) + std::norm(atom[1]) + std::norm(atom[2]) < 1e-2);
    atom = normalized(std::move(atom));

    const auto field = [&]() {
        std::vector<c64> amps(static_cast<size_t>(nmax) + 1);
        double mass = 0.0;
        do {
            for (c64& a : amps)
                a = rc();
            mass = 0.0;
            for (const c64& a : amps)
                mass += std::norm(a);
        } while (mass < 1e-2);
        return FieldSpec::explicit_state(normalized(std::move(amps)));
    };
    return make_initial_state(AtomInit{atom[0], atom[1], atom[2]}, field(), field(),
                              Frame::interaction);
}

std::vector<double> scaled_grid(double lambda_scaled_max, double lambda, int points)
{
    std::vector<double> grid(static_cast<size_t>(points));
    const double tmax = lambda_scaled_max / lambda;
    for (int k = 0; k < points; ++k)
        grid[static_cast<size_t>(k)] = tmax * k / (points - 1);
    return grid;
}

} // namespace

bool self_test(const SelfTestOptions& options, std::ostream& out)
{
    bool all_ok = true;
    const auto report = [&](const char* name, bool pass, const std::string& detail) {
        out << (pass ? "PASS " : "FAIL ") << name;
        if (!detail.empty())
            out << ": " << detail;
        out << '\n';
        all_ok = all_ok && pass;
    };

    // Structural suite over random subspace blocks.
    {
        std::mt19937_64 rng(7150923u);
        const int count = options.level == SelfTestOptions::Level::full ? 10000 : 2000;
        double worst_gram = 0.0, worst_recon = 0.0, worst_eig = 0.0;
        int failures = 0;
        std::string first_failure;
        for (int i = 0; i < count; ++i) {
            const SubspaceBlock block = random_block(rng);
            SubspaceEigensystem eig = eigensystem(block);
            if (options.corrupt)
                options.corrupt(eig);
            const Eigen::Matrix3cd h = block.matrix();
            const double gram = (eig.vectors.adjoint() * eig.vectors -
                                 Eigen::Matrix3cd::Identity())
                                    .cwiseAbs()
                                    .maxCoeff();
            const double recon =
                (eig.vectors * eig.energies.cast<c64>().asDiagonal() *
                     eig.vectors.adjoint() -
                 h)
                    .cwiseAbs()
                    .maxCoeff();
            double eig_dev = 0.0;
            if (const auto closed = eigenvalues_closed(block)) {
                const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> numeric(h);
                for (int k = 0; k < 3; ++k)
                    eig_dev = std::max(eig_dev,
                                       std::abs((*closed)[static_cast<size_t>(k)] -
                                                numeric.eigenvalues()(k)));
            }
            worst_gram = std::max(worst_gram, gram);
            worst_recon = std::max(worst_recon, recon);
            worst_eig = std::max(worst_eig, eig_dev);
            if (gram > 1e-10 || recon > 1e-9 || eig_dev > 1e-9) {
                ++failures;
                if (first_failure.empty())
                    first_failure = "block (" + std::to_string(block.n_left) + "," +
                                    std::to_string(block.n_right) + ") gram " +
                                    format_number(gram) + " recon " +
                                    format_number(recon) + " eig " +
                                    format_number(eig_dev);
            }
        }
        std::string detail = std::to_string(count) + " blocks, worst gram " +
                             format_number(worst_gram) + ", reconstruction " +
                             format_number(worst_recon) + ", closed-vs-numeric " +
                             format_number(worst_eig);
        if (failures)
            detail += "; " + std::to_string(failures) + " failed, first: " + first_failure;
        report("block structure", failures == 0, detail);
    }

    // Vacuum Rabi landmark: the upper level over two empty modes oscillates
    // between the dressed triplet as cos^2(sqrt(2) t).
    {
        ScenarioConfig c;
        c.atom = AtomInit{0.0, 1.0, 0.0};
        c.left = FieldSpec::explicit_state({1.0});
        c.right = FieldSpec::explicit_state({1.0});
        c.tmax = 10.0;
        c.steps = 101;
        double worst = 0.0;
        const ScenarioResult r = run_scenario(c);
        for (size_t i = 0; i < r.rows.size(); ++i) {
            const double expected = std::pow(std::cos(std::sqrt(2.0) * r.grid[i]), 2);
            worst = std::max(worst, std::abs(r.rows[i].rho22 - expected));
        }
        report("vacuum Rabi landmark", worst < 1e-9, "max deviation " + format_number(worst));
    }

    // Sweep invariants on a generic driven, detuned, Kerr-shifted scenario.
    {
        ScenarioConfig c;
        c.atom = AtomInit{0.6, c64(0.0, 0.48), -0.64};
        c.left = FieldSpec::coherent_state(1.2);
        c.right = FieldSpec::coherent_state(c64(0.4, -0.7));
        c.model.delta_L = 0.5;
        c.model.delta_R = 0.2;
        c.model.chi_L = 0.3;
        c.model.chi_R = 0.2;
        c.model.chi_C = 0.4;
        c.model.beta = Beta::plus_half;
        c.model.omega_rabi = c64(0.7, 0.3);
        c.tmax = 10.0;
        c.steps = 101;
        const ScenarioResult r = run_scenario(c);
        double worst_norm = 0.0, worst_entropy = 0.0;
        constexpr double ln3 = 1.0986122886681098;
        for (const ObservableRow& row : r.rows) {
            worst_norm = std::max(worst_norm, std::abs(row.norm - 1.0));
            const double excess = std::max(row.entropy - ln3, -row.entropy);
            worst_entropy = std::max(worst_entropy, excess);
        }
        const bool ok = worst_norm < 1e-10 && worst_entropy < 1e-10;
        report("sweep invariants", ok,
               "norm drift " + format_number(worst_norm) + ", entropy range excess " +
                   format_number(worst_entropy));
        const ObservableRow& first = r.rows.front();
        const bool base_ok = std::abs(first.duan_total - 2.0) < 1e-9 &&
                             std::abs(first.sq_plus - 1.0) < 1e-9 &&
                             std::abs(first.sq_minus - 1.0) < 1e-9;
        report("coherent product baseline", base_ok,
               "t=0 duan " + format_number(first.duan_total) + ", squeezing " +
                   format_number(first.sq_plus) + "/" + format_number(first.sq_minus));
    }

    // Purity: both reductions of a pure joint state share their entropy.
    {
        std::mt19937_64 rng(40111u);
        const ModelParams params = random_model(rng, true);
        const ValidatedModel model = validate(params);
        const JointState initial = random_initial_state(rng, 3);
        double worst = 0.0;
        for (double t : {0.7, 2.3, 6.1}) {
            const JointState evolved = evolve_state(initial, model, t);
            worst = std::max(worst, std::abs(dem(evolved) - field_entropy(evolved)));
        }
        report("entropy purity", worst < 1e-8, "max |S_atom - S_field| " + format_number(worst));
    }

    if (options.level == SelfTestOptions::Level::full) {
        std::mt19937_64 rng(90517u);
        std::uniform_int_distribution<int> cutoff(2, 4);
        double worst = 0.0;
        int failures = 0;
        std::string first_failure;
        for (int i = 0; i < 40; ++i) {
            const bool with_drive = i >= 30;
            const ModelParams params = random_model(rng, with_drive);
            const ValidatedModel model = validate(params);
            const JointState initial = random_initial_state(rng, cutoff(rng));
            const std::vector<double> grid = scaled_grid(10.0, params.lambda_L, 50);
            const double dev =
                compare_with_oracle(initial, model, grid, OracleVariant::block_consistent);
            worst = std::max(worst, dev);
            if (!(dev < 1e-9)) {
                ++failures;
                if (first_failure.empty())
                    first_failure = "set " + std::to_string(i) + " deviation " +
                                    format_number(dev);
            }
        }
        std::string detail = "40 parameter sets, worst deviation " + format_number(worst);
        if (failures)
            detail += "; " + std::to_string(failures) + " failed, first: " + first_failure;
        report("brute-force equivalence", failures == 0, detail);
    }

    out << (all_ok ? "self-test passed\n" : "self-test FAILED\n");
    return all_ok;
}

} // namespace lcav
