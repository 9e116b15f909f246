#include "relscott/scott.hpp"

#include "relscott/error.hpp"
#include "relscott/phase_space.hpp"
#include "relscott/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace relscott::scott {

namespace {

using std::numbers::pi;

struct TracePair {
    double coarse = 0.0, fine = 0.0;
    int l_max = -1, nodes = 0;
    bool converged = true;
};

// Runs `f(grid)` at dx and dx/2.
template <typename F>
TracePair on_two_grids(radial::GridSpec spec, bool richardson, F&& f)
{
    TracePair out;
    auto run = [&](double dx) {
        spec.dx = dx;
        const radial::RadialGrid grid(spec);
        const auto tr = f(grid);
        out.l_max = std::max(out.l_max, tr.l_max);
        out.converged = out.converged && tr.converged;
        out.nodes = static_cast<int>(grid.size());
        return tr.total;
    };
    const double dx = spec.dx;
    if (richardson) {
        out.coarse = run(dx);
        out.fine = run(0.5 * dx);
    } else {
        out.fine = out.coarse = run(dx);
    }
    return out;
}

double combine(const TracePair& p, bool richardson)
{
    return richardson ? (4.0 * p.fine - p.coarse) / 3.0 : p.fine;
}

} // namespace

double coulomb_weyl_term(double R, CutoffProfile profile)
{
    return 2.0 / std::pow(2.0 * pi, 3) * phase_space::cutoff_coulomb_weyl(R, 1.0, profile);
}

LocalizedTrace localized_coulomb_trace(double R, double alpha, const TraceOptions& opts)
{
    if (!(R > 0.0)) {
        throw ValidationError("localized_coulomb_trace: R must be positive");
    }
    if (!(alpha >= 0.0) || alpha >= 2.0 / pi) {
        throw ValidationError("localized_coulomb_trace: alpha must lie in [0, 2/pi)");
    }
    if (!(opts.dx > 0.0)) {
        throw ValidationError("localized_coulomb_trace: dx must be positive");
    }
    radial::GridSpec spec;
    spec.kind = radial::GridKind::log_sqrt;
    spec.r_min = opts.r_min;
    spec.r_max = R + (alpha > 0.0 ? opts.box_margin * alpha : 0.0);
    spec.scale = opts.scale;
    spec.dx = opts.dx;

    const auto pair = on_two_grids(spec, opts.richardson, [&](const radial::RadialGrid& grid) {
        const Eigen::VectorXd& r = grid.r();
        const Eigen::VectorXd pot = -r.cwiseInverse();
        const Eigen::VectorXd w =
            r.unaryExpr([&](double x) { return cutoff_value(opts.profile, x / R); });
        return spectral::radial_trace(grid, pot, alpha, 1.0, w, 2, opts.l_limit);
    });

    LocalizedTrace out;
    out.R = R;
    out.alpha = alpha;
    out.coarse = pair.coarse;
    out.fine = pair.fine;
    out.trace = combine(pair, opts.richardson);
    out.weyl = coulomb_weyl_term(R, opts.profile);
    out.l_max = pair.l_max;
    out.nodes = pair.nodes;
    out.converged = pair.converged;
    return out;
}

Extrapolation extrapolate(const std::vector<double>& radii, const std::vector<double>& values)
{
    const std::size_t n = radii.size();
    if (n < 3 || values.size() != n) {
        throw ValidationError("extrapolate: need at least three radii with one value each");
    }
    const double ratio = radii[1] / radii[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (!(radii[i] > radii[i - 1]) || std::abs(radii[i] / radii[i - 1] - ratio) > 1e-9 * ratio) {
            throw ValidationError("extrapolate: radii must form an increasing geometric sequence");
        }
    }
    // Aitken on a triple: exact for L + a R^{-p} on a geometric sequence
    auto triple = [&](std::size_t k, Extrapolation& e) {
        const double d1 = values[k + 1] - values[k];
        const double d2 = values[k + 2] - values[k + 1];
        const double q = d2 / d1;
        if (!(d1 != 0.0) || !(q > 0.0 && q < 1.0)) {
            throw ConvergenceError("extrapolate: increments are not shrinking monotonically (ratio " +
                                   std::to_string(q) + ")");
        }
        e.limit = values[k + 2] - d2 * d2 / (d2 - d1);
        e.exponent = -std::log(q) / std::log(ratio);
    };
    Extrapolation last;
    triple(n - 3, last);
    if (n >= 4) {
        Extrapolation prev;
        triple(n - 4, prev);
        last.error = std::abs(last.limit - prev.limit);
    } else {
        last.error = std::abs(values[n - 1] - values[n - 2]);
    }
    return last;
}

ScottEstimate scott_function(double alpha, const std::vector<double>& radii, const TraceOptions& opts)
{
    ScottEstimate est;
    est.alpha = alpha;
    est.radii = radii;
    std::vector<double> values;
    for (double R : radii) {
        auto tr = localized_coulomb_trace(R, alpha, opts);
        if (!tr.converged) {
            throw ConvergenceError("scott_function: channel sum not converged at R = " + std::to_string(R));
        }
        values.push_back(tr.value());
        est.traces.push_back(std::move(tr));
    }
    const auto ex = extrapolate(radii, values);
    est.limit = ex.limit;
    est.error = ex.error;
    est.exponent = ex.exponent;
    return est;
}

SemiclassicalTrace semiclassical_trace(const tf::TfSolution& sol, double h, double beta, double coupling,
                                       const SemiclassicalOptions& opts)
{
    if (!sol.converged()) {
        throw ValidationError("semiclassical_trace: TF solution is not converged");
    }
    if (!(h > 0.0) || !(beta >= 0.0) || beta > h) {
        throw ValidationError("semiclassical_trace: require h > 0 and 0 <= beta <= h");
    }
    if (!(coupling > 0.0) || coupling >= 2.0 / pi) {
        throw ValidationError("semiclassical_trace: coupling must lie in (0, 2/pi)");
    }
    radial::GridSpec spec;
    spec.kind = radial::GridKind::log_sqrt;
    spec.r_min = opts.r_min;
    spec.r_max = opts.r_max;
    spec.scale = opts.scale;
    spec.dx = opts.dx;
    const auto pair = on_two_grids(spec, opts.richardson, [&](const radial::RadialGrid& grid) {
        const Eigen::VectorXd pot =
            grid.r().unaryExpr([&](double r) { return -coupling * sol.potential(r); });
        return spectral::radial_trace(grid, pot, beta, h, std::nullopt, 2, opts.l_limit);
    });
    SemiclassicalTrace out;
    out.h = h;
    out.beta = beta;
    out.coupling = coupling;
    out.coarse = pair.coarse;
    out.fine = pair.fine;
    out.trace = combine(pair, opts.richardson);
    out.l_max = pair.l_max;
    out.converged = pair.converged;
    return out;
}

double weyl_coefficient(const tf::TfSolution& sol, double coupling)
{
    return std::pow(coupling, 2.5) * sol.weyl_energy(1.0);
}

namespace {

struct LinearFit {
    Eigen::Vector2d coef;
    Eigen::Vector2d stderr_;
    double condition = 0.0;
};

LinearFit least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y)
{
    LinearFit out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.coef = svd.solve(y);
    const auto& sv = svd.singularValues();
    out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    const Eigen::Index dof = a.rows() - a.cols();
    const double s2 = dof > 0 ? (y - a * out.coef).squaredNorm() / static_cast<double>(dof) : 0.0;
    const Eigen::MatrixXd cov = s2 * (a.transpose() * a).inverse();
    out.stderr_ = cov.diagonal().cwiseSqrt();
    return out;
}

} // namespace

FitReport scott_fit(const std::vector<double>& h, const std::vector<double>& values, double c0_ref)
{
    const std::size_t n = h.size();
    if (n < 5 || values.size() != n) {
        throw ValidationError("scott_fit: need at least five (h, value) pairs");
    }
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    if (!(*lo > 0.0) || *hi / *lo < 4.0) {
        throw ValidationError("scott_fit: h values must be positive and span a factor of at least 4");
    }
    // columns scaled by h_max³ and h_max² to keep the normal equations tame
    const double hs = *hi;
    auto design = [&](const std::vector<std::size_t>& rows) {
        Eigen::MatrixXd a(rows.size(), 2);
        Eigen::VectorXd y(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double t = hs / h[rows[k]];
            a(k, 0) = t * t * t;
            a(k, 1) = t * t;
            y(k) = values[rows[k]];
        }
        return std::make_pair(a, y);
    };
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        all[i] = i;
    }
    const auto [a, y] = design(all);
    const auto fit = least_squares(a, y);
    const double s0 = hs * hs * hs, s2 = hs * hs;

    FitReport rep;
    rep.c0 = fit.coef(0) * s0;
    rep.c2 = fit.coef(1) * s2;
    rep.condition = fit.condition;
    rep.ill_conditioned = !(fit.condition < 1e8);

    double spread0 = 0.0, spread2 = 0.0;
    for (std::size_t drop = 0; drop < n; ++drop) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != drop) {
                rows.push_back(i);
            }
        }
        const auto [as, ys] = design(rows);
        const auto sub = least_squares(as, ys);
        spread0 = std::max(spread0, std::abs(sub.coef(0) * s0 - rep.c0));
        spread2 = std::max(spread2, std::abs(sub.coef(1) * s2 - rep.c2));
    }
    rep.c0_error = std::hypot(fit.stderr_(0) * s0, spread0);
    rep.c2_error = std::hypot(fit.stderr_(1) * s2, spread2);

    const double ref = std::isfinite(c0_ref) ? c0_ref : rep.c0;
    Eigen::MatrixXd la(n, 2);
    Eigen::VectorXd ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = values[i] - ref / (h[i] * h[i] * h[i]);
        if (!(resid != 0.0)) {
            throw ConvergenceError("scott_fit: residual vanishes, slope undefined");
        }
        la(i, 0) = std::log(h[i]);
        la(i, 1) = 1.0;
        ly(i) = std::log(std::abs(resid));
    }
    const auto slope = least_squares(la, ly);
    rep.residual_slope = slope.coef(0);
    rep.residual_slope_error = slope.stderr_(0);
    return rep;
}

} // namespace relscott::scott
