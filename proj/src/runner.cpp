#include "relscott/runner.hpp"

#include "relscott/cover.hpp"
#include "relscott/error.hpp"
#include "relscott/fields.hpp"
#include "relscott/inequalities.hpp"
#include "relscott/io.hpp"
#include "relscott/linalg.hpp"
#include "relscott/phase_space.hpp"
#include "relscott/radial.hpp"
#include "relscott/scott.hpp"
#include "relscott/spectral.hpp"
#include "relscott/tf.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#ifndef RELSCOTT_VERSION
#define RELSCOTT_VERSION "0.0.0"
#endif

namespace relscott::cli {

namespace fs = std::filesystem;
using io::Json;
using std::numbers::pi;

std::string version() { return RELSCOTT_VERSION; }

// Manifest

Manifest Manifest::load(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ValidationError("cannot read manifest '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

Manifest Manifest::parse(const std::string& text)
{
    Manifest m;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, m.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    return m;
}

std::optional<std::string> Manifest::raw(const std::string& key) const
{
    if (auto v = tree_.get_optional<std::string>(key)) {
        return boost::algorithm::trim_copy(*v);
    }
    return std::nullopt;
}

bool Manifest::has(const std::string& key) const { return raw(key).has_value(); }

void Manifest::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

void Manifest::record(const std::string& key, const std::string& value) const
{
    for (auto& e : echo_) {
        if (e.first == key) {
            e.second = value;
            return;
        }
    }
    echo_.emplace_back(key, value);
}

std::string Manifest::command() const
{
    const auto c = raw("run.command");
    if (!c || c->empty()) {
        throw ValidationError("manifest: [run] command is required");
    }
    record("run.command", *c);
    return *c;
}

namespace {

double parse_number(const std::string& key, const std::string& s)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ValidationError("manifest: '" + key + "' is not a number: '" + s + "'");
    }
}

} // namespace

double Manifest::number(const std::string& key, double fallback) const
{
    const double v = has(key) ? parse_number(key, *raw(key)) : fallback;
    if (!std::isfinite(v)) {
        throw ValidationError("manifest: '" + key + "' must be finite");
    }
    record(key, io::format_number(v));
    return v;
}

int Manifest::integer(const std::string& key, int fallback) const
{
    const double v = has(key) ? parse_number(key, *raw(key)) : fallback;
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ValidationError("manifest: '" + key + "' must be an integer");
    }
    record(key, std::to_string(static_cast<int>(v)));
    return static_cast<int>(v);
}

std::uint64_t Manifest::unsigned_integer(const std::string& key, std::uint64_t fallback) const
{
    std::uint64_t v = fallback;
    if (has(key)) {
        const std::string s = *raw(key);
        try {
            std::size_t used = 0;
            v = std::stoull(s, &used);
            if (used != s.size() || s.front() == '-') {
                throw std::invalid_argument(s);
            }
        } catch (const std::exception&) {
            throw ValidationError("manifest: '" + key + "' is not a nonnegative integer: '" + s + "'");
        }
    }
    record(key, std::to_string(v));
    return v;
}

bool Manifest::flag(const std::string& key, bool fallback) const
{
    bool v = fallback;
    if (has(key)) {
        const std::string s = boost::algorithm::to_lower_copy(*raw(key));
        if (s == "true" || s == "yes" || s == "1" || s == "on") {
            v = true;
        } else if (s == "false" || s == "no" || s == "0" || s == "off") {
            v = false;
        } else {
            throw ValidationError("manifest: '" + key + "' is not a boolean: '" + s + "'");
        }
    }
    record(key, v ? "true" : "false");
    return v;
}

std::string Manifest::text(const std::string& key, const std::string& fallback) const
{
    const std::string v = has(key) ? *raw(key) : fallback;
    record(key, v);
    return v;
}

std::vector<double> Manifest::numbers(const std::string& key, const std::vector<double>& fallback) const
{
    std::vector<double> out;
    if (has(key)) {
        std::vector<std::string> parts;
        const std::string s = *raw(key);
        boost::algorithm::split(parts, s, boost::is_any_of(","));
        for (auto& p : parts) {
            boost::algorithm::trim(p);
            if (!p.empty()) {
                out.push_back(parse_number(key, p));
            }
        }
    } else {
        out = fallback;
    }
    if (out.empty()) {
        throw ValidationError("manifest: '" + key + "' must list at least one value");
    }
    std::string echo;
    for (std::size_t i = 0; i < out.size(); ++i) {
        echo += (i ? "," : "") + io::format_number(out[i]);
    }
    record(key, echo);
    return out;
}

std::vector<std::string> Manifest::words(const std::string& key, const std::vector<std::string>& fallback) const
{
    std::vector<std::string> out;
    if (has(key)) {
        std::vector<std::string> parts;
        const std::string s = *raw(key);
        boost::algorithm::split(parts, s, boost::is_any_of(","));
        for (auto& p : parts) {
            boost::algorithm::trim(p);
            if (!p.empty()) {
                out.push_back(p);
            }
        }
    } else {
        out = fallback;
    }
    if (out.empty()) {
        throw ValidationError("manifest: '" + key + "' must list at least one value");
    }
    record(key, boost::algorithm::join(out, ","));
    return out;
}

NuclearConfig nuclei_from(const Manifest& m)
{
    const double Z = m.number("nuclei.Z", 1.0);
    const double alpha = m.number("nuclei.alpha", 0.0);
    const auto charges = m.numbers("nuclei.charges", {1.0});
    std::vector<Vec3> positions;
    const std::string pos = m.text("nuclei.positions", "0 0 0");
    std::vector<std::string> items;
    boost::algorithm::split(items, pos, boost::is_any_of(";"));
    for (auto& item : items) {
        boost::algorithm::trim(item);
        if (item.empty()) {
            continue;
        }
        std::istringstream is(item);
        Vec3 p{};
        if (!(is >> p[0] >> p[1] >> p[2])) {
            throw ValidationError("manifest: nuclei.positions entry '" + item + "' needs three coordinates");
        }
        positions.push_back(p);
    }
    if (positions.size() != charges.size()) {
        throw ValidationError("manifest: nuclei.positions and nuclei.charges differ in length");
    }
    NuclearConfig cfg(charges, positions, Z, alpha, m.number("nuclei.min_separation", 0.0));
    if (cfg.max_coupling() > 2.0 / pi) {
        throw ValidationError("manifest: beta = " + io::format_number(cfg.beta()) + " exceeds h = " +
                              io::format_number(cfg.h()) +
                              "; the semiclassical parameters require beta <= h, i.e. max_k Z_k alpha <= 2/pi");
    }
    return cfg;
}

// Helpers

namespace {

// Evaluates f(0..n-1) on up to `threads` workers; results keep index order and
// the exception of the lowest failing index is rethrown.
template <typename F>
auto parallel_map(std::size_t n, int threads, F&& f)
{
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::max(1, threads));
    if (count == 1 || n < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(count, n); ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

radial::GridSpec grid_from(const Manifest& m, const std::string& section, const radial::GridSpec& def)
{
    radial::GridSpec g = def;
    const std::string kind = m.text(section + ".grid", def.kind == radial::GridKind::log ? "log" : "log_sqrt");
    if (kind == "log") {
        g.kind = radial::GridKind::log;
    } else if (kind == "log_sqrt") {
        g.kind = radial::GridKind::log_sqrt;
    } else {
        throw ValidationError("manifest: " + section + ".grid must be 'log' or 'log_sqrt'");
    }
    g.r_min = m.number(section + ".r_min", def.r_min);
    g.r_max = m.number(section + ".r_max", def.r_max);
    g.dx = m.number(section + ".dx", def.dx);
    g.scale = m.number(section + ".scale", def.scale);
    return g;
}

tf::TfSolution solve_tf(const Manifest& m)
{
    tf::TfOptions o;
    o.ds = m.number("tf.ds", o.ds);
    o.s_cap = m.number("tf.s_cap", o.s_cap);
    o.x_max = m.number("tf.x_max", o.x_max);
    o.tolerance = m.number("tf.tolerance", o.tolerance);
    return tf::solve_tf_atom(o);
}

double coupling_from(const Manifest& m, const std::string& key, const NuclearConfig& cfg)
{
    const double k = m.number(key, 0.5);
    double zmax = 0.0;
    for (double z : cfg.charges()) {
        zmax = std::max(zmax, z);
    }
    if (!(k > 0.0) || k * zmax >= 2.0 / pi) {
        throw ValidationError("manifest: " + key + " = " + io::format_number(k) +
                              " violates 0 < coupling * max_k z_k < 2/pi");
    }
    return k;
}

// Commands

void run_tf(const Manifest& m, const fs::path& out)
{
    const auto sol = solve_tf(m);
    tf::CollocationOptions co;
    co.nodes = m.integer("tf.collocation_nodes", co.nodes);
    const auto col = tf::solve_tf_collocation(co);

    io::Table energies({"Z", "energy", "energy_per_Z73", "energy_virial", "energy_functional"});
    Json per_z = Json::array();
    for (double Z : m.numbers("tf.charges", {1.0, 10.0, 100.0})) {
        if (!(Z > 0.0)) {
            throw ValidationError("manifest: tf.charges must be positive");
        }
        const double e = tf::tf_energy(sol, Z);
        energies.add_row({Z, e, e / std::pow(Z, 7.0 / 3.0), tf::tf_energy_virial(sol, Z),
                          tf::tf_energy_functional(sol, Z)});
    }
    Json j = io::to_json(sol, 1.0);
    j["collocation_slope"] = col.slope;
    j["collocation_nodes"] = co.nodes;
    j["slope_difference"] = std::abs(col.slope - sol.slope());
    io::write_text(out / "tf.json", j.dump(1) + "\n");
    energies.write(out / "tf_energy.csv");
}

void run_weyl(const Manifest& m, const fs::path& out)
{
    const auto cfg = nuclei_from(m);
    const auto sol = solve_tf(m);
    const double coupling = coupling_from(m, "weyl.coupling", cfg);
    const double h = m.number("weyl.h", 1.0);
    const double beta = m.number("weyl.beta", 0.0);
    if (!(h > 0.0) || beta < 0.0 || beta > h) {
        throw ValidationError("manifest: weyl requires h > 0 and 0 <= beta <= h");
    }
    const auto profile = parse_profile(m.text("weyl.profile", "smooth"));

    phase_space::RadialSymbolSpec spec;
    spec.h = h;
    spec.potential = [&](double r) { return coupling * sol.potential(r); };
    const auto nonrel = phase_space::weyl_integral(spec);
    spec.kind = phase_space::Kinetic::relativistic;
    spec.beta = beta;
    // the relativistic symbol grows like V⁴ near a Coulomb centre, so the
    // integral over a neighbourhood of r = 0 diverges for beta > 0
    const auto rel = phase_space::rel_symbol_integral(spec);
    const bool rel_finite = std::isfinite(rel.value) && rel.error <= 1e-6 * std::max(1.0, std::abs(rel.value));

    io::Table table({"R", "weyl", "weyl_over_sqrt_R"});
    std::vector<double> radii = m.numbers("weyl.radii", {1, 2, 4, 8, 16, 32, 64});
    std::vector<double> values;
    for (double R : radii) {
        const double v = scott::coulomb_weyl_term(R, profile);
        values.push_back(v);
        table.add_row({R, v, v / std::sqrt(R)});
    }
    table.write(out / "weyl_cutoff.csv");

    Json j = {{"coupling", coupling},
              {"h", h},
              {"beta", beta},
              {"weyl_quadrature", nonrel.value},
              {"weyl_quadrature_error", nonrel.error},
              {"weyl_closed_form", scott::weyl_coefficient(sol, coupling) / (h * h * h)},
              {"relativistic", rel_finite ? Json(rel.value) : Json(nullptr)},
              {"relativistic_error", rel_finite ? Json(rel.error) : Json(nullptr)},
              {"relativistic_divergent", !rel_finite},
              {"momentum_constant", phase_space::momentum_constant()},
              {"cutoff_profile", profile_name(profile)},
              {"cutoff_exponent", radii.size() > 1 ? log_log_slope(radii, values) : 0.0}};
    io::write_text(out / "weyl.json", j.dump(1) + "\n");
}

void run_spectrum(const Manifest& m, const fs::path& out)
{
    const std::string potential = m.text("spectrum.potential", "coulomb");
    const double coupling = m.number("spectrum.coupling", 1.0);
    const double alpha = m.number("spectrum.alpha", 0.0);
    const int l_max = m.integer("spectrum.l_max", 2);
    const int levels = m.integer("spectrum.levels", 3);
    if (alpha < 0.0 || alpha * coupling >= 2.0 / pi || l_max < 0 || levels < 1) {
        throw ValidationError("manifest: spectrum requires 0 <= alpha * coupling < 2/pi, l_max >= 0, levels >= 1");
    }
    const radial::RadialGrid grid(grid_from(m, "spectrum", radial::GridSpec{}));
    std::optional<tf::TfSolution> sol;
    if (potential == "tf") {
        sol = solve_tf(m);
    } else if (potential != "coulomb") {
        throw ValidationError("manifest: spectrum.potential must be 'coulomb' or 'tf'");
    }
    auto v = [&](double r) { return sol ? -coupling * sol->potential(r) : -coupling / r; };

    io::Table table({"l", "n", "eigenvalue", "reference", "difference"});
    for (int l = 0; l <= l_max; ++l) {
        const auto ch = radial::build_radial_channel(l, grid, v, 1.0);
        Eigen::VectorXd ev;
        if (alpha == 0.0) {
            ev = linalg::eigh_tridiagonal(0.5 * ch.kinetic_diag() + ch.potential(), 0.5 * ch.kinetic_off(), false)
                     .values;
        } else {
            ev = linalg::eigvalsh(ch.hamiltonian(alpha));
        }
        for (int k = 0; k < levels && k < ev.size(); ++k) {
            const int n = k + l + 1;
            // nonrelativistic Coulomb levels; none for the other cases
            const double ref = (!sol && alpha == 0.0) ? -coupling * coupling / (2.0 * n * n) : NAN;
            table.add_row({static_cast<double>(l), static_cast<double>(n), ev(k), ref, ev(k) - ref});
        }
    }
    table.write(out / "spectrum.csv");
}

void run_lt(const Manifest& m, const fs::path& out, int threads, std::uint64_t seed)
{
    ineq::LtEnsembleSpec spec;
    spec.grid_n = m.integer("lt.grid_n", spec.grid_n);
    spec.spacing = m.number("lt.spacing", spec.spacing);
    spec.scalar = static_cast<std::size_t>(m.integer("lt.scalar", static_cast<int>(spec.scalar)));
    spec.schrodinger = static_cast<std::size_t>(m.integer("lt.schrodinger", static_cast<int>(spec.schrodinger)));
    spec.pauli = static_cast<std::size_t>(m.integer("lt.pauli", static_cast<int>(spec.pauli)));
    const int dilations = m.integer("lt.dilations", 20);
    const double lambda = m.number("lt.lambda", 1.7);
    std::optional<double> bound;
    if (m.has("lt.bound")) {
        bound = m.number("lt.bound", 0.0);
    }
    const auto ensemble = ineq::lt_ensemble(seed, spec);
    const auto reports =
        parallel_map(ensemble.size(), threads, [&](std::size_t i) { return ineq::lt_check(ensemble[i], bound); });

    // dilation checks on instances spread over the ensemble
    std::vector<std::size_t> picks;
    for (int k = 0; k < dilations && !ensemble.empty(); ++k) {
        picks.push_back(static_cast<std::size_t>(k) * ensemble.size() / static_cast<std::size_t>(dilations));
    }
    const auto dilated = parallel_map(picks.size(), threads, [&](std::size_t k) {
        return ineq::lt_check(ineq::dilate(ensemble[picks[k]], lambda));
    });

    io::Table table({"index", "operator", "h", "beta", "lhs", "rhs_v52", "rhs_beta3_v4", "rhs_field", "constant",
                     "pass"});
    std::vector<Json> lines;
    double max_constant = 0.0;
    std::size_t violations = 0, warnings = 0;
    Json per_op = Json::object();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const std::string op = ineq::kinetic_name(ensemble[i].op);
        table.add_row({std::to_string(i), op, io::format_number(ensemble[i].h), io::format_number(ensemble[i].beta),
                       io::format_number(r.lhs), io::format_number(r.rhs_terms[0].second),
                       io::format_number(r.rhs_terms[1].second), io::format_number(r.rhs_terms[2].second),
                       io::format_number(r.empirical_constant), r.pass ? "1" : "0"});
        lines.push_back(io::to_json(r));
        max_constant = std::max(max_constant, r.empirical_constant);
        per_op[op] = std::max(per_op.value(op, 0.0), r.empirical_constant);
        violations += r.pass ? 0 : 1;
        warnings += r.warnings.empty() ? 0 : 1;
    }
    double dilation_defect = 0.0;
    io::Table dtable({"index", "lambda", "constant", "constant_dilated", "relative_difference"});
    for (std::size_t k = 0; k < picks.size(); ++k) {
        const double a = reports[picks[k]].empirical_constant, b = dilated[k].empirical_constant;
        const double rel = a == 0.0 && b == 0.0 ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b));
        dilation_defect = std::max(dilation_defect, rel);
        dtable.add_row({static_cast<double>(picks[k]), lambda, a, b, rel});
    }
    table.write(out / "lt.csv");
    dtable.write(out / "lt_dilation.csv");
    io::write_text(out / "lt_reports.jsonl", io::json_lines(lines));
    Json j = {{"seed", seed},
              {"instances", reports.size()},
              {"max_constant", max_constant},
              {"max_constant_by_operator", per_op},
              {"dilation_checks", picks.size()},
              {"dilation_max_relative_difference", dilation_defect},
              {"resolution_warnings", warnings},
              {"violations", violations}};
    if (bound) {
        j["bound"] = *bound;
    }
    io::write_text(out / "lt.json", j.dump(1) + "\n");
}

void run_crit(const Manifest& m, const fs::path& out)
{
    const auto betas = m.numbers("crit.betas", {0.01, 0.5, 0.6});
    for (double b : betas) {
        if (!(b > 0.0) || b >= 2.0 / pi) {
            throw ValidationError("manifest: crit.betas entry " + io::format_number(b) +
                                  " outside (0, 2/pi); the relativistic Coulomb operator is unstable for beta >= 2/pi");
        }
    }
    const double r = m.number("crit.r", 2.0);
    const auto dxs = m.numbers("crit.dx", {0.1, 0.05});
    const auto profile = parse_profile(m.text("crit.profile", "smooth"));
    const double depth = m.number("crit.v_depth", 2.0);
    const double width = m.number("crit.v_width", 1.0);
    const double small_r = m.number("crit.small_beta_r", 1.0);
    const double small_limit = m.number("crit.small_beta_limit", 0.05);
    ineq::CritOptions base;
    base.grid = grid_from(m, "crit", radial::GridSpec{radial::GridKind::log_sqrt, 1e-5, 20.0, 0.05, 1.0});
    auto v = [depth, width](double x) { return depth * std::exp(-x * x / (width * width)); };

    io::Table table({"variant", "beta", "dx", "lhs", "rhs", "constant"});
    std::vector<Json> lines;
    Json summary = Json::array();
    for (double b : betas) {
        std::vector<double> constants;
        for (double dx : dxs) {
            ineq::CritOptions o = base;
            o.grid.dx = dx;
            auto rep = ineq::crit_stability_check(b, r, profile, v, o);
            table.add_row({"local", io::format_number(b), io::format_number(dx), io::format_number(rep.lhs),
                           io::format_number(rep.rhs_total()), io::format_number(rep.empirical_constant)});
            lines.push_back(io::to_json(rep));
            constants.push_back(rep.empirical_constant);
            if (b < small_limit) {
                auto sb = ineq::small_beta_check(b, small_r, v, o);
                table.add_row({"small_beta", io::format_number(b), io::format_number(dx), io::format_number(sb.lhs),
                               io::format_number(sb.rhs_total()), io::format_number(sb.empirical_constant)});
                lines.push_back(io::to_json(sb));
            }
        }
        const double ratio = constants.size() > 1 && constants.front() != 0.0 ? constants.back() / constants.front()
                                                                               : 1.0;
        summary.push_back({{"beta", b}, {"eta", ineq::eta(b)}, {"constants", constants}, {"refinement_ratio", ratio}});
    }
    table.write(out / "crit.csv");
    io::write_text(out / "crit_reports.jsonl", io::json_lines(lines));
    io::write_text(out / "crit.json", Json({{"r", r}, {"profile", profile_name(profile)}, {"betas", summary}}).dump(1) +
                                          "\n");
}

// φ₁ = cos θ(x), φ₂ = sin θ(x) with θ = (π/4)(1 + tanh(x/w))
std::vector<ineq::PartitionFunction> two_bump_partition(double w)
{
    auto theta = [w](double x) { return 0.25 * pi * (1.0 + std::tanh(x / w)); };
    auto dtheta = [w](double x) {
        const double c = std::cosh(x / w);
        return 0.25 * pi / (w * c * c);
    };
    ineq::PartitionFunction a, b;
    a.value = [=](const Vec3& x) { return std::cos(theta(x[0])); };
    a.gradient = [=](const Vec3& x) { return Vec3{-std::sin(theta(x[0])) * dtheta(x[0]), 0.0, 0.0}; };
    b.value = [=](const Vec3& x) { return std::sin(theta(x[0])); };
    b.gradient = [=](const Vec3& x) { return Vec3{std::cos(theta(x[0])) * dtheta(x[0]), 0.0, 0.0}; };
    return {a, b};
}

void run_lemmas(const Manifest& m, const fs::path& out, int threads, std::uint64_t seed)
{
    const auto n = static_cast<std::size_t>(m.integer("lemmas.instances", 1000));
    const double tol = m.number("lemmas.tolerance", 1e-10);
    const auto summaries = parallel_map(3, threads, [&](std::size_t k) {
        switch (k) {
        case 0: return ineq::pull_out_ensemble(seed, n, tol);
        case 1: return ineq::bks_ensemble(seed + 1, n, tol);
        default: return ineq::scalar_ensemble(seed + 2, n, tol);
        }
    });
    std::vector<Json> docs;
    std::size_t violations = 0;
    for (const auto& s : summaries) {
        docs.push_back(io::to_json(s));
        violations += s.violations;
    }
    const std::string payload = io::json_lines(docs);

    // Hardy and Kato channels on two grids
    Json hk = Json::array();
    for (int l = 0; l <= 1; ++l) {
        for (double dx : m.numbers("lemmas.hardy_dx", {0.1, 0.05})) {
            radial::GridSpec g{radial::GridKind::log, 1e-4, 50.0, dx, 1.0};
            const auto r = ineq::hardy_kato_check(l, g);
            hk.push_back({{"l", l}, {"dx", dx}, {"kato_min", r.kato_min}, {"hardy_min", r.hardy_min},
                          {"kato_relative", r.kato_relative}, {"hardy_relative", r.hardy_relative}});
        }
    }

    // IMS identity under one halving of the spacing
    const double half_width = m.number("lemmas.ims_half_width", 2.0);
    const int ims_n = m.integer("lemmas.ims_n", 13);
    const auto parts = two_bump_partition(m.number("lemmas.ims_partition_width", 0.6));
    fields::FamilyParams fp;
    fp.amplitude = 1.0;
    fp.width = 1.2;
    Json ims = Json::array();
    for (int level = 0; level < 2; ++level) {
        const int nn = level == 0 ? ims_n : 2 * ims_n - 1;
        const auto grid = fields::centered_grid(nn, 2.0 * half_width / (nn - 1));
        const auto field = fields::make_divfree_field(fields::Family::polynomial, fp, grid);
        const auto rep = ineq::ims_check(field, 1.0, parts, 1.0, 1.0, 1e-12, level == 0);
        Json e = {{"n", nn}, {"spacing", rep.spacing}, {"identity_defect", rep.identity_defect},
                  {"partition_defect", rep.partition_defect}};
        if (level == 0) {
            e["inequality_min"] = rep.inequality_min;
        }
        ims.push_back(e);
    }

    const double ims_ratio = ims[0]["identity_defect"].get<double>() / ims[1]["identity_defect"].get<double>();
    Json j = {{"seed", seed},
              {"instances", n},
              {"tolerance", tol},
              {"violations", violations},
              {"report_hash", io::hex64(io::fnv1a(payload))},
              {"hardy_kato", hk},
              {"ims", ims},
              {"ims_refinement_ratio", ims_ratio}};
    io::write_text(out / "lemmas.jsonl", payload);
    io::write_text(out / "lemmas.json", j.dump(1) + "\n");
}

void run_scott(const Manifest& m, const fs::path& out, int threads)
{
    const auto alphas = m.numbers("scott.alphas", {0.0, 0.1, 0.3, 0.5});
    const auto radii = m.numbers("scott.radii", {128, 256, 512, 1024});
    const auto profiles = m.words("scott.profiles", {"smooth"});
    scott::TraceOptions base;
    base.dx = m.number("scott.dx", base.dx);
    base.richardson = m.flag("scott.richardson", base.richardson);
    base.scale = m.number("scott.scale", base.scale);
    for (double a : alphas) {
        if (!(a >= 0.0) || a >= 2.0 / pi) {
            throw ValidationError("manifest: scott.alphas entry outside [0, 2/pi)");
        }
    }
    struct Job {
        double alpha;
        CutoffProfile profile;
    };
    std::vector<Job> jobs;
    for (const auto& p : profiles) {
        for (double a : alphas) {
            jobs.push_back({a, parse_profile(p)});
        }
    }
    // per-job failures become markers instead of aborting the sweep
    struct Outcome {
        std::optional<scott::ScottEstimate> est;
        std::vector<scott::LocalizedTrace> traces;
        std::string failure;
    };
    const auto outcomes = parallel_map(jobs.size(), threads, [&](std::size_t k) {
        Outcome o;
        scott::TraceOptions opts = base;
        opts.profile = jobs[k].profile;
        try {
            o.est = scott::scott_function(jobs[k].alpha, radii, opts);
            o.traces = o.est->traces;
        } catch (const ConvergenceError& e) {
            o.failure = e.what();
        }
        return o;
    });
    io::Table table({"profile", "alpha", "R", "trace", "weyl", "value", "l_max", "nodes", "converged"});
    Json results = Json::array();
    bool failed = false;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto& o = outcomes[k];
        for (const auto& t : o.traces) {
            table.add_row({profile_name(jobs[k].profile), io::format_number(t.alpha), io::format_number(t.R),
                           io::format_number(t.trace), io::format_number(t.weyl), io::format_number(t.value()),
                           std::to_string(t.l_max), std::to_string(t.nodes), t.converged ? "1" : "0"});
        }
        Json e = {{"profile", profile_name(jobs[k].profile)}, {"alpha", jobs[k].alpha}};
        if (o.est) {
            e["limit"] = o.est->limit;
            e["limit_error"] = o.est->error;
            e["S2"] = o.est->s2();
            e["S2_error"] = o.est->s2_error();
            e["exponent"] = o.est->exponent;
        } else {
            e["failure"] = o.failure;
            failed = true;
        }
        results.push_back(e);
    }
    table.write(out / "scott.csv");
    io::write_text(out / "scott.json",
                   Json({{"radii", radii}, {"dx", base.dx}, {"richardson", base.richardson},
                         {"model", "L + a R^-p, Aitken on the last three radii"}, {"estimates", results}})
                           .dump(1) +
                       "\n");
    if (failed) {
        throw ConvergenceError("scott: at least one extrapolation failed; see scott.json");
    }
}

void run_asymptotics(const Manifest& m, const fs::path& out, int threads)
{
    const auto cfg = nuclei_from(m);
    const double coupling = coupling_from(m, "asymptotics.coupling", cfg);
    const auto hs = m.numbers("asymptotics.h", {0.2, 0.15, 0.1, 0.07, 0.05});
    const double beta = m.number("asymptotics.beta", 0.0);
    for (double h : hs) {
        if (!(h > 0.0)) {
            throw ValidationError("manifest: asymptotics.h entries must be positive");
        }
        if (beta > h) {
            throw ValidationError("manifest: beta = " + io::format_number(beta) + " exceeds h = " +
                                  io::format_number(h) + "; the semiclassical regime requires beta <= h");
        }
    }
    if (beta < 0.0) {
        throw ValidationError("manifest: asymptotics.beta must be nonnegative");
    }
    scott::SemiclassicalOptions o;
    o.dx = m.number("asymptotics.dx", o.dx);
    o.r_max = m.number("asymptotics.r_max", o.r_max);
    o.scale = m.number("asymptotics.scale", o.scale);
    o.richardson = m.flag("asymptotics.richardson", o.richardson);
    const auto sol = solve_tf(m);
    const auto traces =
        parallel_map(hs.size(), threads, [&](std::size_t i) { return scott::semiclassical_trace(sol, hs[i], beta, coupling, o); });
    const double c0_ref = scott::weyl_coefficient(sol, coupling);
    io::Table table({"h", "beta", "trace", "coarse", "fine", "weyl", "residual", "residual_h2", "l_max", "converged"});
    std::vector<double> values;
    for (const auto& t : traces) {
        if (!t.converged) {
            throw ConvergenceError("asymptotics: channel sum not converged at h = " + io::format_number(t.h));
        }
        const double w = c0_ref / (t.h * t.h * t.h);
        table.add_row({io::format_number(t.h), io::format_number(t.beta), io::format_number(t.trace),
                       io::format_number(t.coarse), io::format_number(t.fine), io::format_number(w),
                       io::format_number(t.trace - w), io::format_number((t.trace - w) * t.h * t.h),
                       std::to_string(t.l_max), "1"});
        values.push_back(t.trace);
    }
    table.write(out / "asymptotics.csv");
    Json fit_json = nullptr;
    if (hs.size() >= 5) {
        const auto fit = scott::scott_fit(hs, values, c0_ref);
        fit_json = {{"c0", fit.c0},
                    {"c0_error", fit.c0_error},
                    {"c2", fit.c2},
                    {"c2_error", fit.c2_error},
                    {"residual_slope", fit.residual_slope},
                    {"residual_slope_error", fit.residual_slope_error},
                    {"condition", fit.condition},
                    {"ill_conditioned", fit.ill_conditioned}};
    }
    io::write_text(out / "asymptotics.json",
                   Json({{"coupling", coupling},
                         {"beta", beta},
                         {"weyl_coefficient", c0_ref},
                         {"c0_relative_difference", fit_json.is_null() ? Json(nullptr)
                                                                      : Json(std::abs(fit_json["c0"].get<double>() /
                                                                                          c0_ref -
                                                                                      1.0))},
                         {"fit", fit_json}})
                           .dump(1) +
                       "\n");
}

void run_cover(const Manifest& m, const fs::path& out, std::uint64_t seed)
{
    const auto cfg = nuclei_from(m);
    cover::Region region;
    region.r = m.number("cover.r", 0.1);
    region.R = m.number("cover.R", 10.0);
    region.nuclei = cfg.positions();
    const cover::MultiscaleCover cov(region);
    const auto audit = cover::coverage_audit(cov, static_cast<std::size_t>(m.integer("cover.samples", 2000)), seed);
    const auto sol = solve_tf(m);
    const auto env = cover::size_envelope(sol, cfg, region, static_cast<std::size_t>(m.integer("cover.envelope_centers", 200)),
                                          static_cast<std::size_t>(m.integer("cover.points_per_ball", 8)), seed + 1);
    const auto profile = parse_profile(m.text("cover.profile", "smooth"));
    const auto points = cover::sample_region(region, static_cast<std::size_t>(m.integer("cover.partition_points", 100)),
                                             seed + 2);
    const auto length = cover::multiscale_length(region.r, region.nuclei);
    Json partition = Json::array();
    for (double s : m.numbers("cover.subdivisions", {4, 8})) {
        const auto rep = cover::partition_check(profile, length, points, static_cast<int>(s));
        partition.push_back({{"subdivisions", rep.subdivisions}, {"max_deviation", rep.max_deviation},
                             {"mean_deviation", rep.mean_deviation}});
    }
    Json j = {{"r", region.r},
              {"R", region.R},
              {"samples", audit.samples},
              {"covered", audit.pass()},
              {"min_multiplicity", audit.min_multiplicity},
              {"max_multiplicity", audit.max_multiplicity},
              {"mean_multiplicity", audit.mean_multiplicity},
              {"envelope_constant", env.constant},
              {"envelope_samples", env.samples},
              {"partition", partition}};
    if (audit.uncovered) {
        j["uncovered_witness"] = *audit.uncovered;
    }
    if (m.flag("cover.count", false)) {
        j["elements"] = cov.count();
    }
    io::write_text(out / "cover.json", j.dump(1) + "\n");
    if (audit.uncovered) {
        throw ConvergenceError("cover: sampled point not covered by any ball");
    }
}

void write_log(const Manifest& m, const fs::path& out, const std::string& status)
{
    std::string log = "relscott " + version() + "\n";
    for (const auto& [k, v] : m.echo()) {
        log += k + " = " + v + "\n";
    }
    log += "status = " + status + "\n";
    io::write_text(out / "run.log", log);
}

} // namespace

void execute(const Manifest& m, const fs::path& out, int threads)
{
    const std::string cmd = m.command();
    const std::uint64_t seed = m.unsigned_integer("run.seed", 42);
    fs::create_directories(out);
    if (cmd == "tf") {
        run_tf(m, out);
    } else if (cmd == "weyl") {
        run_weyl(m, out);
    } else if (cmd == "spectrum") {
        run_spectrum(m, out);
    } else if (cmd == "lt") {
        run_lt(m, out, threads, seed);
    } else if (cmd == "crit") {
        run_crit(m, out);
    } else if (cmd == "lemmas") {
        run_lemmas(m, out, threads, seed);
    } else if (cmd == "scott") {
        run_scott(m, out, threads);
    } else if (cmd == "asymptotics") {
        run_asymptotics(m, out, threads);
    } else if (cmd == "cover") {
        run_cover(m, out, seed);
    } else {
        throw ValidationError("manifest: unknown command '" + cmd +
                              "' (expected tf, weyl, spectrum, lt, crit, lemmas, scott, asymptotics or cover)");
    }
}

int run(const RunOptions& opts)
{
    Manifest m;
    auto fail = [&](const char* kind, const std::string& msg, int code) {
        try {
            io::write_text(opts.out / "error.json",
                           Json({{"status", kind}, {"message", msg}, {"exit_code", code}}).dump(1) + "\n");
            write_log(m, opts.out, kind);
        } catch (const std::exception&) {
        }
        return code;
    };
    try {
        m = Manifest::load(opts.manifest);
        if (opts.seed) {
            m.set("run.seed", std::to_string(*opts.seed));
        }
        if (opts.threads < 1) {
            throw ValidationError("--threads must be at least 1");
        }
        execute(m, opts.out, opts.threads);
        write_log(m, opts.out, "ok");
        return exit_ok;
    } catch (const ValidationError& e) {
        return fail("validation_error", e.what(), exit_validation);
    } catch (const ConvergenceError& e) {
        return fail("convergence_failure", e.what(), exit_convergence);
    } catch (const std::exception& e) {
        return fail("error", e.what(), 1);
    }
}

} // namespace relscott::cli
