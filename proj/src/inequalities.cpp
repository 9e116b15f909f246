#include "relscott/inequalities.hpp"

#include "relscott/error.hpp"
#include "relscott/linalg.hpp"
#include "relscott/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace relscott::ineq {

namespace {

using std::numbers::pi;

double positive_moment(const Eigen::VectorXd& v, double power, double cell)
{
    double s = 0.0;
    for (double x : v) {
        if (x > 0.0) {
            s += std::pow(x, power);
        }
    }
    return s * cell;
}

void finish(InequalityReport& rep)
{
    const double rhs = rep.rhs_total();
    const double lhs = std::abs(std::min(rep.lhs, 0.0));
    rep.empirical_constant = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    rep.pass = std::isfinite(rep.empirical_constant) &&
               (!rep.bound || rep.empirical_constant <= *rep.bound);
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            g(i, j) = normal(rng);
        }
    }
    return g * g.transpose();
}

Eigen::VectorXd radial_samples(const radial::RadialGrid& grid, const std::function<double(double)>& f)
{
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        v(i) = f(grid.r()(i));
    }
    return v;
}

// ∫ f(|x|)_+^p d³x by Gauss-Kronrod in r = u² over (0, r_max)
double radial_moment(const std::function<double(double)>& f, double p, double r_max)
{
    auto g = [&](double u) {
        if (u <= 0.0) {
            return 0.0;
        }
        const double r = u * u;
        const double v = f(r);
        return v > 0.0 ? 4.0 * pi * std::pow(v, p) * r * r * 2.0 * u : 0.0;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(r_max), 15, 1e-12);
}

} // namespace

double InequalityReport::rhs_total() const
{
    double s = 0.0;
    for (const auto& t : rhs_terms) {
        s += t.second;
    }
    return s;
}

double InequalityReport::param(const std::string& key) const
{
    for (const auto& p : params) {
        if (p.first == key) {
            return p.second;
        }
    }
    throw ValidationError("inequality report: no parameter '" + key + "'");
}

KineticOperator parse_kinetic(const std::string& name)
{
    if (name == "scalar") return KineticOperator::scalar;
    if (name == "schrodinger") return KineticOperator::schrodinger;
    if (name == "pauli") return KineticOperator::pauli;
    throw ValidationError("unknown kinetic operator '" + name + "'");
}

std::string kinetic_name(KineticOperator k)
{
    switch (k) {
    case KineticOperator::scalar: return "scalar";
    case KineticOperator::schrodinger: return "schrodinger";
    case KineticOperator::pauli: return "pauli";
    }
    return "scalar";
}

InequalityReport lt_check(const LtInstance& inst, std::optional<double> bound)
{
    if (!(inst.beta > 0.0) || !(inst.h > 0.0)) {
        throw ValidationError("lt_check: require beta > 0 and h > 0");
    }
    if (!inst.potential) {
        throw ValidationError("lt_check: potential accessor missing");
    }
    const auto& grid = inst.field.grid();
    spectral::GridOperator op = [&] {
        switch (inst.op) {
        case KineticOperator::pauli:
            return spectral::build_pauli_grid(inst.field, inst.h);
        case KineticOperator::schrodinger:
            return spectral::build_schrodinger_grid(inst.field, inst.h);
        case KineticOperator::scalar:
            break;
        }
        const fields::VectorField zero(grid, {std::vector<double>(grid.points(), 0.0),
                                              std::vector<double>(grid.points(), 0.0),
                                              std::vector<double>(grid.points(), 0.0)});
        return spectral::build_schrodinger_grid(zero, inst.h);
    }();
    const Eigen::VectorXd v = op.sample(inst.potential);
    const Eigen::VectorXd vdiag = op.expand(v);

    double lhs = 0.0;
    if (inst.op == KineticOperator::scalar) {
        Eigen::MatrixXd t = op.dense().real();
        Eigen::MatrixXd hm = spectral::rel_transform(t, inst.beta);
        hm.diagonal() -= vdiag;
        lhs = spectral::negative_sum(hm);
    } else {
        Eigen::MatrixXcd hm = spectral::rel_transform(op.dense(), inst.beta);
        hm.diagonal() -= vdiag.cast<linalg::Complex>();
        lhs = spectral::negative_sum(hm);
    }

    const double cell = grid.cell_volume();
    const double v52 = positive_moment(v, 2.5, cell);
    const double v4 = positive_moment(v, 4.0, cell);
    const double b2 = inst.op == KineticOperator::scalar ? 0.0 : inst.field.curl_energy();
    const double h = inst.h;

    InequalityReport rep;
    rep.id = "lieb_thirring";
    rep.params = {{"beta", inst.beta}, {"h", h}, {"spacing", grid.spacing}, {"n", grid.n},
                  {"operator", static_cast<double>(inst.op)}, {"field_energy", b2}};
    rep.lhs = lhs;
    rep.rhs_terms = {{"v52", v52 / (h * h * h)},
                     {"beta3_v4", inst.beta * inst.beta * inst.beta * v4 / (h * h * h)},
                     {"field_v4", std::pow(b2 / (h * h), 0.75) * std::pow(v4, 0.25)}};
    rep.bound = bound;
    rep.seed = inst.seed;
    rep.params.insert(rep.params.end(), inst.descriptor.begin(), inst.descriptor.end());
    if (inst.op != KineticOperator::scalar) {
        const double bmax = inst.field.max_abs_curl();
        if (bmax > 0.0) {
            const double mag_len = std::sqrt(h / bmax);
            rep.params.emplace_back("magnetic_length", mag_len);
            if (mag_len < grid.spacing) {
                rep.warnings.push_back("magnetic length " + std::to_string(mag_len) +
                                       " is below the grid spacing " + std::to_string(grid.spacing));
            }
        }
    }
    finish(rep);
    return rep;
}

std::vector<LtInstance> lt_ensemble(std::uint64_t seed, const LtEnsembleSpec& spec)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    const fields::Grid3 grid = fields::centered_grid(spec.grid_n, spec.spacing);
    // largest support radius that keeps the two-node margin of the field builder
    const double reach = (0.5 * (spec.grid_n - 1) - 2.0) * spec.spacing;
    const fields::VectorField zero(grid, {std::vector<double>(grid.points(), 0.0),
                                          std::vector<double>(grid.points(), 0.0),
                                          std::vector<double>(grid.points(), 0.0)});

    std::vector<LtInstance> out;
    const std::size_t total = spec.scalar + spec.schrodinger + spec.pauli;
    for (std::size_t k = 0; k < total; ++k) {
        LtInstance inst;
        inst.seed = k;
        inst.op = k < spec.scalar                       ? KineticOperator::scalar
                  : k < spec.scalar + spec.schrodinger ? KineticOperator::schrodinger
                                                         : KineticOperator::pauli;
        inst.h = uniform(0.4, 1.2);
        inst.beta = uniform(0.05, 1.0);

        const double depth = std::exp(uniform(std::log(1.0), std::log(60.0)));
        const double width = uniform(0.3, 0.5) * reach;
        const Vec3 c{uniform(-0.2, 0.2) * reach, uniform(-0.2, 0.2) * reach, uniform(-0.2, 0.2) * reach};
        const bool dipole = u01(rng) < 0.3;
        const double depth2 = dipole ? uniform(0.2, 1.0) * depth : 0.0;
        inst.potential = [depth, width, c, depth2](const Vec3& x) {
            const double w2 = width * width;
            const double a = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]) +
                             (x[2] - c[2]) * (x[2] - c[2]);
            const double b = (x[0] + c[0]) * (x[0] + c[0]) + (x[1] + c[1]) * (x[1] + c[1]) +
                             (x[2] + c[2]) * (x[2] + c[2]);
            return depth * std::exp(-a / w2) - depth2 * std::exp(-b / w2);
        };
        inst.descriptor = {{"depth", depth}, {"well_width", width}, {"negative_depth", depth2}};

        if (inst.op == KineticOperator::scalar) {
            inst.field = zero;
        } else {
            fields::FamilyParams fp;
            const bool uniform_family = u01(rng) < 0.5;
            fp.width = uniform(0.7, 1.0) * reach;
            fp.amplitude = uniform_family ? uniform(0.3, 3.0) : uniform(0.2, 2.0);
            const double z = uniform(-1.0, 1.0), phi = uniform(0.0, 2.0 * pi), s = std::sqrt(1.0 - z * z);
            fp.direction = {s * std::cos(phi), s * std::sin(phi), z};
            const auto family = uniform_family ? fields::Family::uniform : fields::Family::polynomial;
            inst.field = fields::make_divfree_field(family, fp, grid);
            inst.descriptor.insert(inst.descriptor.end(), {{"family", static_cast<double>(family)},
                                                           {"field_amplitude", fp.amplitude},
                                                           {"field_width", fp.width}});
        }
        out.push_back(std::move(inst));
    }
    return out;
}

LtInstance dilate(const LtInstance& inst, double lambda)
{
    if (!(lambda > 0.0)) {
        throw ValidationError("dilate: lambda must be positive");
    }
    LtInstance out = inst;
    fields::Grid3 g = inst.field.grid();
    g.spacing *= lambda;
    for (double& o : g.origin) {
        o *= lambda;
    }
    std::array<std::vector<double>, 3> a;
    for (int c = 0; c < 3; ++c) {
        a[c] = inst.field.component(c);
        for (double& x : a[c]) {
            x /= lambda;
        }
    }
    out.field = fields::VectorField(g, std::move(a));
    const auto base = inst.potential;
    out.potential = [base, lambda](const Vec3& x) {
        return base(Vec3{x[0] / lambda, x[1] / lambda, x[2] / lambda}) / (lambda * lambda);
    };
    out.beta = inst.beta * lambda;
    return out;
}

double eta(double beta)
{
    const double t = pi * beta / 2.0;
    return 0.1 * (1.0 - t * t);
}

InequalityReport crit_stability_check(double beta, double r, CutoffProfile profile,
                                      const std::function<double(double)>& potential,
                                      const CritOptions& opts)
{
    if (!(beta > 0.0) || beta >= 2.0 / pi) {
        throw ValidationError("crit_stability_check: beta must lie in (0, 2/pi); the relativistic "
                              "Coulomb operator is unstable for beta >= 2/pi");
    }
    if (!(r > 0.0)) {
        throw ValidationError("crit_stability_check: r must be positive");
    }
    radial::GridSpec gs = opts.grid;
    gs.r_max = std::max(gs.r_max, r * 1.0001);
    const radial::RadialGrid grid(gs);
    const Eigen::VectorXd w = radial_samples(grid, [&](double x) { return cutoff_value(profile, x / r); });
    const Eigen::VectorXd pot =
        radial_samples(grid, [&](double x) { return -1.0 / x - (potential ? potential(x) : 0.0); });
    const auto tr = spectral::radial_trace(grid, pot, beta, 1.0, w, 2, opts.l_limit);
    if (!tr.converged) {
        throw ConvergenceError("crit_stability_check: channel sum not converged by l = " +
                               std::to_string(tr.l_max));
    }
    const double e = eta(beta);
    const std::function<double(double)> vp =
        potential ? potential : std::function<double(double)>([](double) { return 0.0; });
    const double v52 = radial_moment(vp, 2.5, gs.r_max);
    const double v4 = radial_moment(vp, 4.0, gs.r_max);

    InequalityReport rep;
    rep.id = "coulomb_stability";
    rep.params = {{"beta", beta}, {"r", r}, {"eta", e}, {"dx", gs.dx}, {"l_max", tr.l_max}};
    rep.lhs = tr.total;
    rep.rhs_terms = {{"eta_r3", std::pow(e, -3.0) * r * r * r},
                     {"eta_v52", std::pow(e, -1.5) * v52},
                     {"eta_beta3_v4", std::pow(e, -3.0) * beta * beta * beta * v4}};
    finish(rep);
    return rep;
}

InequalityReport small_beta_check(double beta, double r, const std::function<double(double)>& potential,
                                  const CritOptions& opts)
{
    if (!(beta > 0.0) || beta >= 2.0 / pi) {
        throw ValidationError("small_beta_check: beta must lie in (0, 2/pi)");
    }
    const radial::RadialGrid grid(opts.grid);
    const Eigen::VectorXd pot = radial_samples(grid, [&](double x) {
        return -(x <= r ? 1.0 / x : 0.0) - (potential ? potential(x) : 0.0);
    });
    const auto tr = spectral::radial_trace(grid, pot, beta, 1.0, std::nullopt, 2, opts.l_limit);
    if (!tr.converged) {
        throw ConvergenceError("small_beta_check: channel sum not converged by l = " +
                               std::to_string(tr.l_max));
    }
    const std::function<double(double)> vp =
        potential ? potential : std::function<double(double)>([](double) { return 0.0; });
    InequalityReport rep;
    rep.id = "coulomb_stability_small_beta";
    rep.params = {{"beta", beta}, {"r", r}, {"dx", opts.grid.dx}, {"l_max", tr.l_max}};
    rep.lhs = tr.total;
    rep.rhs_terms = {{"one", 1.0},
                     {"v52", radial_moment(vp, 2.5, opts.grid.r_max)},
                     {"v4", radial_moment(vp, 4.0, opts.grid.r_max)}};
    finish(rep);
    return rep;
}

InequalityReport pull_out_check(const std::vector<Eigen::VectorXd>& g, const std::vector<Eigen::MatrixXd>& a,
                                double tol)
{
    if (g.empty() || g.size() != a.size()) {
        throw ValidationError("pull_out_check: need one matrix per partition element");
    }
    const Eigen::Index n = g[0].size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (const auto& gi : g) {
        if (gi.size() != n) {
            throw ValidationError("pull_out_check: partition elements differ in size");
        }
        sum += gi.cwiseProduct(gi);
    }
    const double defect = (sum.array() - 1.0).abs().maxCoeff();
    if (defect > 1e-12) {
        throw ValidationError("pull_out_check: partition defect " + std::to_string(defect) +
                              " exceeds 1e-12");
    }
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd pulled = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        inner += g[i].asDiagonal() * a[i] * g[i].asDiagonal();
        pulled += g[i].asDiagonal() * linalg::sqrtm_psd(a[i]) * g[i].asDiagonal();
    }
    linalg::symmetrize(inner);
    Eigen::MatrixXd diff = linalg::sqrtm_psd(inner) - pulled;
    linalg::symmetrize(diff);
    InequalityReport rep;
    rep.id = "pull_out";
    rep.params = {{"dim", static_cast<double>(n)}, {"blocks", static_cast<double>(g.size())}};
    rep.lhs = linalg::eigvalsh(diff)(0);
    rep.empirical_constant = rep.lhs;
    rep.pass = rep.lhs >= -tol;
    return rep;
}

InequalityReport bks_check(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double tol)
{
    if (p.rows() != q.rows() || p.rows() != p.cols() || q.rows() != q.cols()) {
        throw ValidationError("bks_check: P and Q must be square of equal size");
    }
    Eigen::MatrixXd d = p - q;
    linalg::symmetrize(d);
    Eigen::MatrixXd d2 = p * p - q * q;
    linalg::symmetrize(d2);
    const double lhs = spectral::negative_sum(d);
    double rhs = 0.0;
    for (double e : linalg::eigvalsh(d2)) {
        if (e < 0.0) {
            rhs += std::sqrt(-e);
        }
    }
    InequalityReport rep;
    rep.id = "bks";
    rep.params = {{"dim", static_cast<double>(p.rows())}};
    rep.lhs = lhs;
    rep.rhs_terms = {{"half_moment", rhs}};
    rep.empirical_constant = lhs + rhs; // margin
    rep.pass = lhs + rhs >= -tol;
    return rep;
}

double c0() { return (std::sqrt(11.0) - 1.0) / 10.0; }

InequalityReport scalar_kinetic_bounds(double t, double m, double tol)
{
    if (t < 0.0 || m < 0.0) {
        throw ValidationError("scalar_kinetic_bounds: require T >= 0 and m >= 0");
    }
    // √(T+m²) − m written without cancellation
    const double value = t / (std::sqrt(t + m * m) + m);
    const bool low = t < 10.0 * m * m;
    const double bound = low ? c0() * t / m : 2.0 / 3.0 * std::sqrt(t);
    InequalityReport rep;
    rep.id = low ? "kinetic_low" : "kinetic_high";
    rep.params = {{"T", t}, {"m", m}};
    rep.lhs = value - bound;
    rep.rhs_terms = {{"bound", bound}};
    rep.empirical_constant = rep.lhs;
    rep.pass = rep.lhs >= -tol * std::max(1.0, bound);
    return rep;
}

namespace {

void record(EnsembleSummary& s, InequalityReport rep, std::uint64_t instance)
{
    ++s.instances;
    s.worst_margin = s.instances == 1 ? rep.lhs : std::min(s.worst_margin, rep.lhs);
    if (rep.id == "bks") {
        s.worst_margin = std::min(s.worst_margin, rep.empirical_constant);
    }
    if (!rep.pass) {
        ++s.violations;
        rep.seed = instance;
        if (s.failures.size() < 10) {
            s.failures.push_back(std::move(rep));
        }
    }
}

} // namespace

EnsembleSummary pull_out_ensemble(std::uint64_t seed, std::size_t count, double tol)
{
    EnsembleSummary s;
    s.id = "pull_out";
    s.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(1, 12), blocks(2, 4);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (std::size_t k = 0; k < count; ++k) {
        const int n = dim(rng), b = blocks(rng);
        std::vector<Eigen::VectorXd> g(b, Eigen::VectorXd(n));
        for (auto& gi : g) {
            for (int i = 0; i < n; ++i) {
                gi(i) = unit(rng);
            }
        }
        Eigen::VectorXd norm2 = Eigen::VectorXd::Zero(n);
        for (const auto& gi : g) {
            norm2 += gi.cwiseProduct(gi);
        }
        for (auto& gi : g) {
            gi = gi.cwiseQuotient(norm2.cwiseSqrt());
        }
        std::vector<Eigen::MatrixXd> a;
        for (int i = 0; i < b; ++i) {
            a.push_back(random_psd(rng, n));
        }
        record(s, pull_out_check(g, a, tol), k);
    }
    return s;
}

EnsembleSummary bks_ensemble(std::uint64_t seed, std::size_t count, double tol)
{
    EnsembleSummary s;
    s.id = "bks";
    s.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(1, 16);
    for (std::size_t k = 0; k < count; ++k) {
        const int n = dim(rng);
        const Eigen::MatrixXd p = random_psd(rng, n);
        const Eigen::MatrixXd q = random_psd(rng, n);
        record(s, bks_check(p, q, tol), k);
    }
    return s;
}

EnsembleSummary scalar_ensemble(std::uint64_t seed, std::size_t count, double tol)
{
    EnsembleSummary s;
    s.id = "kinetic_bounds";
    s.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> tdist(0.0, 100.0), mdist(0.0, 10.0);
    for (std::size_t k = 0; k < count; ++k) {
        double t = tdist(rng), m = mdist(rng);
        if (t == 0.0) {
            t = 1e-12;
        }
        if (m == 0.0) {
            m = 1e-12;
        }
        record(s, scalar_kinetic_bounds(t, m, tol), k);
    }
    return s;
}

HardyKatoResult hardy_kato_check(int l, const radial::GridSpec& spec, double shift)
{
    const radial::RadialGrid grid(spec);
    Eigen::VectorXd d, e;
    grid.laplacian(l, d, e);
    const Eigen::Index n = grid.size();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    k.diagonal() = d;
    k.diagonal(1) = e;
    k.diagonal(-1) = e;
    const auto es = linalg::eigh_tridiagonal(d, e, true);
    const Eigen::MatrixXd absp =
        linalg::apply_function(es, [](double t) { return std::sqrt(std::max(t, 0.0)); });
    const Eigen::VectorXd& r = grid.r();

    HardyKatoResult out;
    out.l = l;
    out.dx = grid.dx();
    Eigen::MatrixXd kato = absp;
    kato.diagonal() -= (2.0 / pi) * r.cwiseInverse();
    kato.diagonal().array() += shift;
    linalg::symmetrize(kato);
    out.kato_min = linalg::eigvalsh(kato)(0);

    Eigen::VectorXd hd = d;
    for (Eigen::Index i = 0; i < n; ++i) {
        hd(i) += shift - 1.0 / (16.0 * r(i) * r(i));
    }
    out.hardy_min = linalg::eigh_tridiagonal(hd, e, false).values(0);

    const Eigen::VectorXd sr = r.cwiseSqrt();
    Eigen::MatrixXd kr = sr.asDiagonal() * absp * sr.asDiagonal();
    linalg::symmetrize(kr);
    out.kato_relative = linalg::eigvalsh(kr)(0) - 2.0 / pi;

    Eigen::VectorXd rd(n), re(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) {
        rd(i) = r(i) * d(i) * r(i);
        if (i + 1 < n) {
            re(i) = r(i) * e(i) * r(i + 1);
        }
    }
    out.hardy_relative = linalg::eigh_tridiagonal(rd, re, false).values(0) - 1.0 / 16.0;
    return out;
}

ImsReport ims_check(const fields::VectorField& field, double h, const std::vector<PartitionFunction>& parts,
                    double c_shift, double c_ims, double partition_tol, bool with_inequality)
{
    if (parts.empty()) {
        throw ValidationError("ims_check: empty partition");
    }
    const auto op = spectral::build_schrodinger_grid(field, h);
    const Eigen::Index n = op.dimension();
    std::vector<Eigen::VectorXd> phi;
    Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(n), grad2 = Eigen::VectorXd::Zero(n);
    for (const auto& p : parts) {
        phi.push_back(op.sample(p.value));
        sumsq += phi.back().cwiseProduct(phi.back());
        grad2 += op.sample([&](const Vec3& x) {
            const Vec3 g = p.gradient(x);
            return g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        });
    }
    ImsReport rep;
    rep.spacing = field.grid().spacing;
    rep.partition_defect = (sumsq.array() - 1.0).abs().maxCoeff();
    if (rep.partition_defect > partition_tol) {
        throw ValidationError("ims_check: partition defect " + std::to_string(rep.partition_defect) +
                              " exceeds tolerance");
    }
    using Sp = Eigen::SparseMatrix<linalg::Complex>;
    const Sp& hm = op.matrix();
    // D = Σφ_iHφ_i − H − h²G, sparse with the pattern of H
    Sp d = -hm;
    for (const auto& p : phi) {
        const Eigen::VectorXcd pc = p.cast<linalg::Complex>();
        Sp loc = pc.asDiagonal() * hm * pc.asDiagonal();
        d += loc;
    }
    {
        Sp g(n, n);
        std::vector<Eigen::Triplet<linalg::Complex>> t;
        for (Eigen::Index i = 0; i < n; ++i) {
            t.emplace_back(i, i, h * h * grad2(i));
        }
        g.setFromTriplets(t.begin(), t.end());
        d -= g;
    }
    // largest |λ| of (H+c)^{-1/2} D (H+c)^{-1/2} by power iteration on L⁻¹DL⁻*
    Sp shifted = hm;
    for (Eigen::Index i = 0; i < n; ++i) {
        shifted.coeffRef(i, i) += c_shift;
    }
    Eigen::SimplicialLLT<Sp, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(shifted);
    if (llt.info() != Eigen::Success) {
        throw ConvergenceError("ims_check: Cholesky factorization of H + c failed");
    }
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        // y = L⁻¹ D L⁻* x
        Eigen::VectorXcd y = llt.matrixU().solve(x);
        y = d * y;
        y = llt.matrixL().solve(y);
        const double nrm = y.norm();
        if (nrm == 0.0) {
            lambda = 0.0;
            break;
        }
        const double prev = lambda;
        lambda = nrm;
        x = y / nrm;
        if (it > 20 && std::abs(lambda - prev) < 1e-8 * lambda) {
            break;
        }
    }
    rep.identity_defect = lambda;

    if (with_inequality) {
        // H − Σφ_i(H − C h²G)φ_i = −D − h²G + C h²G Σφ_i²
        Eigen::MatrixXcd m = -Eigen::MatrixXcd(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i, i) += h * h * grad2(i) * (c_ims * sumsq(i) - 1.0);
        }
        linalg::symmetrize(m);
        rep.inequality_min = linalg::eigvalsh(m)(0);
    }
    return rep;
}

} // namespace relscott::ineq
