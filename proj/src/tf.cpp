#include "relscott/tf.hpp"

#include "relscott/error.hpp"
#include "relscott/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace relscott::tf {

namespace {

using std::numbers::pi;

enum class Outcome { crossed_zero, turned_up, reached_cap };

struct Trajectory {
    std::vector<long double> phi;
    std::vector<long double> z;
    Outcome outcome = Outcome::reached_cap;
};

// RK4 in s for φ_s = 2 s z, z_s = 2 φ_+^{3/2}. Extended precision keeps the
// trajectory on the separatrix for longer.
Trajectory shoot(long double slope, long double ds, std::size_t steps, bool record)
{
    auto rhs = [](long double s, long double phi, long double z, long double& dphi, long double& dz) {
        dphi = 2.0L * s * z;
        const long double p = phi > 0.0L ? phi : 0.0L;
        dz = 2.0L * p * std::sqrt(p);
    };
    Trajectory t;
    long double phi = 1.0L, z = slope;
    if (record) {
        t.phi.reserve(steps + 1);
        t.z.reserve(steps + 1);
        t.phi.push_back(phi);
        t.z.push_back(z);
    }
    for (std::size_t i = 0; i < steps; ++i) {
        const long double s = static_cast<long double>(i) * ds;
        long double k1p, k1z, k2p, k2z, k3p, k3z, k4p, k4z;
        rhs(s, phi, z, k1p, k1z);
        rhs(s + 0.5L * ds, phi + 0.5L * ds * k1p, z + 0.5L * ds * k1z, k2p, k2z);
        rhs(s + 0.5L * ds, phi + 0.5L * ds * k2p, z + 0.5L * ds * k2z, k3p, k3z);
        rhs(s + ds, phi + ds * k3p, z + ds * k3z, k4p, k4z);
        phi += ds / 6.0L * (k1p + 2.0L * k2p + 2.0L * k3p + k4p);
        z += ds / 6.0L * (k1z + 2.0L * k2z + 2.0L * k3z + k4z);
        if (record) {
            t.phi.push_back(phi);
            t.z.push_back(z);
        }
        if (phi < 0.0L) {
            t.outcome = Outcome::crossed_zero;
            return t;
        }
        if (z > 0.0L) {
            t.outcome = Outcome::turned_up;
            return t;
        }
    }
    return t;
}

std::string bracket_text(double lo, double hi)
{
    std::ostringstream os;
    os.precision(17);
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

// Sommerfeld approximant, used as far field and as the Newton starting guess.
double sommerfeld(double x, double a)
{
    const double lam = tail_exponent();
    if (x <= 0.0) {
        return 1.0;
    }
    return 144.0 / (x * x * x) * std::pow(1.0 + std::pow(a / x, lam), -3.0 / lam);
}

} // namespace

double screening_length() { return 0.5 * std::pow(3.0 * pi / 4.0, 2.0 / 3.0); }

double density_prefactor() { return 2.0 * std::sqrt(2.0) / (3.0 * pi * pi); }

double tail_exponent() { return 0.5 * (std::sqrt(73.0) - 7.0); }

TfSolution solve_tf_atom(const TfOptions& opts)
{
    if (!(opts.ds > 0.0) || !(opts.s_cap > opts.ds) || !(opts.tolerance > 0.0)) {
        throw ValidationError("solve_tf_atom: invalid grid specification");
    }
    const auto steps = static_cast<std::size_t>(std::ceil(opts.s_cap / opts.ds));
    const long double ds = opts.ds;

    long double lo = opts.slope_lo, hi = opts.slope_hi;
    if (shoot(lo, ds, steps, false).outcome != Outcome::crossed_zero ||
        shoot(hi, ds, steps, false).outcome != Outcome::turned_up) {
        throw ConvergenceError("solve_tf_atom: initial slopes do not bracket the solution " +
                               bracket_text(static_cast<double>(lo), static_cast<double>(hi)));
    }
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const Outcome o = shoot(mid, ds, steps, false).outcome;
        if (o == Outcome::crossed_zero) {
            lo = mid;
        } else if (o == Outcome::turned_up) {
            hi = mid;
        } else {
            lo = hi = mid;
            break;
        }
    }
    const double width = static_cast<double>(hi - lo);
    if (width > opts.tolerance * std::abs(static_cast<double>(hi))) {
        throw ConvergenceError("solve_tf_atom: bisection stalled with bracket " +
                               bracket_text(static_cast<double>(lo), static_cast<double>(hi)));
    }

    const Trajectory tlo = shoot(lo, ds, steps, true);
    const Trajectory thi = shoot(hi, ds, steps, true);
    const std::size_t n = std::min(tlo.phi.size(), thi.phi.size());

    // last node where the two bracketing trajectories still agree
    std::size_t m = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const long double avg = 0.5L * (tlo.phi[i] + thi.phi[i]);
        if (avg <= 0.0L || std::abs(tlo.phi[i] - thi.phi[i]) > opts.match_rel * avg) {
            break;
        }
        m = i;
    }
    if (m % 2 == 1) {
        --m; // even interval count for Simpson
    }
    if (m < 10 || static_cast<double>(m) * opts.ds < 2.0) {
        throw ConvergenceError("solve_tf_atom: shooting range too short to match the far field, "
                               "bracket " +
                               bracket_text(static_cast<double>(lo), static_cast<double>(hi)));
    }

    TfSolution sol;
    sol.ds_ = opts.ds;
    sol.s_.resize(m + 1);
    sol.phi_.resize(m + 1);
    sol.z_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        sol.s_[i] = static_cast<double>(i) * opts.ds;
        sol.phi_[i] = static_cast<double>(0.5L * (tlo.phi[i] + thi.phi[i]));
        sol.z_[i] = static_cast<double>(0.5L * (tlo.z[i] + thi.z[i]));
    }
    sol.s_match_ = sol.s_[m];
    sol.slope_ = static_cast<double>(0.5L * (lo + hi));
    sol.bracket_lo_ = static_cast<double>(lo);
    sol.bracket_hi_ = static_cast<double>(hi);
    sol.tolerance_ = opts.tolerance;

    const double xm = sol.s_match_ * sol.s_match_;
    const double q = sol.phi_[m] * xm * xm * xm / 144.0;
    if (!(q > 0.0 && q < 1.0)) {
        throw ConvergenceError("solve_tf_atom: far-field matching failed at x = " + std::to_string(xm));
    }
    const double lam = tail_exponent();
    sol.tail_a_ = xm * std::pow(std::pow(q, -lam / 3.0) - 1.0, 1.0 / lam);

    if (sol.tail_phi(opts.x_max) >= opts.tolerance) {
        throw ValidationError("solve_tf_atom: grid too short, phi(x_max = " + std::to_string(opts.x_max) +
                              ") = " + std::to_string(sol.tail_phi(opts.x_max)) +
                              " exceeds the tolerance");
    }

    for (std::size_t i = 0; i <= m; ++i) {
        sol.x_nodes_.push_back(sol.s_[i] * sol.s_[i]);
        sol.phi_nodes_.push_back(sol.phi_[i]);
    }
    const int n_tail = 200;
    const double ratio = std::log(opts.x_max / xm) / n_tail;
    for (int k = 1; k <= n_tail; ++k) {
        const double x = xm * std::exp(ratio * k);
        sol.x_nodes_.push_back(x);
        sol.phi_nodes_.push_back(sol.tail_phi(x));
    }
    sol.converged_ = true;
    return sol;
}

double TfSolution::tail_phi(double x) const { return sommerfeld(x, tail_a_); }

double TfSolution::tail_dphi(double x) const
{
    const double lam = tail_exponent();
    const double u = std::pow(tail_a_ / x, lam);
    // d/dx of 144 x^{-3} (1+u)^{-3/λ} with du/dx = −λu/x
    return tail_phi(x) * (-3.0 / x + 3.0 * u / ((1.0 + u) * x));
}

double TfSolution::phi_s(double s) const
{
    if (s < 0.0) {
        throw ValidationError("TfSolution: negative argument");
    }
    if (s >= s_match_) {
        return tail_phi(s * s);
    }
    const auto i = static_cast<std::size_t>(s / ds_);
    const double t = (s - s_[i]) / ds_;
    const double d0 = 2.0 * s_[i] * z_[i] * ds_;
    const double d1 = 2.0 * s_[i + 1] * z_[i + 1] * ds_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * phi_[i] + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * phi_[i + 1] +
           (t3 - t2) * d1;
}

double TfSolution::phi(double x) const
{
    if (x < 0.0) {
        throw ValidationError("TfSolution: negative argument");
    }
    return phi_s(std::sqrt(x));
}

double TfSolution::dphi(double x) const
{
    if (x < 0.0) {
        throw ValidationError("TfSolution: negative argument");
    }
    const double s = std::sqrt(x);
    if (s >= s_match_) {
        return tail_dphi(x);
    }
    const auto i = static_cast<std::size_t>(s / ds_);
    const double t = (s - s_[i]) / ds_;
    auto src = [](double p) { return 2.0 * p * std::sqrt(std::max(p, 0.0)); };
    const double d0 = src(phi_[i]) * ds_;
    const double d1 = src(phi_[i + 1]) * ds_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * z_[i] + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * z_[i + 1] +
           (t3 - t2) * d1;
}

double TfSolution::residual(double x, double dx) const
{
    if (!(x > dx)) {
        throw ValidationError("TfSolution::residual: x must exceed the difference step");
    }
    const double second = (dphi(x + dx) - dphi(x - dx)) / (2.0 * dx);
    const double p = std::max(phi(x), 0.0);
    return second - p * std::sqrt(p) / std::sqrt(x);
}

double TfSolution::potential(double r, double Z) const
{
    if (!(r > 0.0)) {
        throw ValidationError("tf potential: evaluation at r = 0 is undefined");
    }
    const double b = screening_length() * std::cbrt(1.0 / Z);
    return Z * phi(r / b) / r;
}

double TfSolution::density(double r, double Z) const
{
    const double v = std::max(potential(r, Z), 0.0);
    return density_prefactor() * v * std::sqrt(v);
}

template <typename F>
double TfSolution::integrate_s(F&& g) const
{
    const std::size_t m = s_.size() - 1;
    double inner = g(phi_[0], s_[0]) + g(phi_[m], s_[m]);
    for (std::size_t i = 1; i < m; ++i) {
        inner += (i % 2 == 1 ? 4.0 : 2.0) * g(phi_[i], s_[i]);
    }
    inner *= ds_ / 3.0;
    auto tail = [&](double s) { return g(tail_phi(s * s), s); };
    const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        tail, s_match_, std::numeric_limits<double>::infinity(), 15, 1e-14);
    return inner + outer;
}

double TfSolution::potential_moment_5_2(double Z) const
{
    // ∫V^{5/2} d³x = 4π b^{1/2} · 2∫φ^{5/2} ds for Z = 1, scaling as Z^{7/3}
    const double i52 = integrate_s([](double p, double) {
        const double q = std::max(p, 0.0);
        return q * q * std::sqrt(q);
    });
    return 4.0 * pi * std::sqrt(screening_length()) * 2.0 * i52 * std::pow(Z, 7.0 / 3.0);
}

double TfSolution::weyl_energy(double Z) const
{
    return -0.4 * density_prefactor() * potential_moment_5_2(Z);
}

double TfSolution::coulomb_self_energy(double Z) const
{
    // enclosed electron charge q = 1 − φ + xφ' (Gauss law), D = ½∫q²/r² dr = (1/b)∫q²/s³ ds
    const double b = screening_length();
    const std::size_t m = s_.size() - 1;
    auto q_of = [&](double s) {
        const double x = s * s;
        return 1.0 - phi_s(s) + x * dphi(x);
    };
    double inner = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        const double s = s_[i];
        const double q = 1.0 - phi_[i] + s * s * z_[i];
        const double w = (i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        inner += w * q * q / (s * s * s);
    }
    inner *= ds_ / 3.0;
    auto tail = [&](double s) {
        const double q = q_of(s);
        return q * q / (s * s * s);
    };
    const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        tail, s_match_, std::numeric_limits<double>::infinity(), 15, 1e-14);
    return (inner + outer) / b * std::pow(Z, 7.0 / 3.0);
}

CollocationResult solve_tf_collocation(const CollocationOptions& opts)
{
    if (opts.nodes < 16 || !(opts.scale > 0.0)) {
        throw ValidationError("solve_tf_collocation: invalid grid specification");
    }
    const double L = opts.scale;

    // Returns (slope, iterations, s, φ) for n intervals.
    auto solve = [&](int n, CollocationResult& out) {
        const double dt = 1.0 / n;
        auto s_of = [&](double t) { return L * t / (1.0 - t); };
        auto sp_of = [&](double t) { return L / ((1.0 - t) * (1.0 - t)); };
        // flux weight (dt/ds)/s at half nodes
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) {
            const double t = (i + 0.5) * dt;
            w(i) = 1.0 / (sp_of(t) * s_of(t));
        }
        const int m = n - 1; // interior unknowns 1..n-1
        Eigen::VectorXd s(n + 1), sp(n + 1), phi(n + 1);
        for (int i = 0; i < n; ++i) {
            const double t = i * dt;
            s(i) = s_of(t);
            sp(i) = sp_of(t);
            phi(i) = sommerfeld(s(i) * s(i), 0.0); // placeholder, replaced below
        }
        s(n) = std::numeric_limits<double>::infinity();
        sp(n) = std::numeric_limits<double>::infinity();
        // Sommerfeld global approximant: (1 + (x³/144)^{λ/3})^{-3/λ}
        const double lam = tail_exponent();
        for (int i = 0; i < n; ++i) {
            const double x = s(i) * s(i);
            phi(i) = std::pow(1.0 + std::pow(x * x * x / 144.0, lam / 3.0), -3.0 / lam);
        }
        phi(0) = 1.0;
        phi(n) = 0.0;

        int it = 0;
        for (; it < opts.max_iter; ++it) {
            Eigen::VectorXd res(m), diag(m), lower(m - 1), upper(m - 1);
            for (int k = 0; k < m; ++k) {
                const int i = k + 1;
                const double p = std::max(phi(i), 0.0);
                const double flux = (w(i) * (phi(i + 1) - phi(i)) - w(i - 1) * (phi(i) - phi(i - 1))) /
                                    (dt * dt);
                res(k) = flux - 4.0 * p * std::sqrt(p) * sp(i);
                diag(k) = -(w(i) + w(i - 1)) / (dt * dt) - 6.0 * std::sqrt(p) * sp(i);
                if (k > 0) {
                    lower(k - 1) = w(i - 1) / (dt * dt);
                }
                if (k < m - 1) {
                    upper(k) = w(i) / (dt * dt);
                }
            }
            const Eigen::VectorXd delta = linalg::solve_tridiagonal(lower, diag, upper, -res);
            double step = 0.0;
            for (int k = 0; k < m; ++k) {
                phi(k + 1) = std::max(phi(k + 1) + delta(k), 0.0);
                step = std::max(step, std::abs(delta(k)));
            }
            if (step < opts.tolerance) {
                ++it;
                break;
            }
        }
        if (it >= opts.max_iter) {
            throw ConvergenceError("solve_tf_collocation: Newton did not converge in " +
                                   std::to_string(opts.max_iter) + " iterations");
        }
        // φ'(0) = z(0) = −2∫φ^{3/2} ds, Simpson in t (integrand vanishes at t = 1)
        double integral = 0.0;
        for (int i = 0; i < n; ++i) {
            const double p = std::max(phi(i), 0.0);
            const double f = p * std::sqrt(p) * sp(i);
            integral += (i == 0 ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0)) * f;
        }
        integral *= dt / 3.0;
        out.s = s.head(n);
        out.phi = phi.head(n);
        out.newton_iterations = it;
        return -2.0 * integral;
    };

    int n = opts.nodes;
    if (n % 2 == 1) {
        ++n;
    }
    CollocationResult coarse, fine;
    const double b1 = solve(n, coarse);
    const double b2 = solve(2 * n, fine);
    fine.slope_coarse = b1;
    fine.slope = (4.0 * b2 - b1) / 3.0;
    return fine;
}

double tf_potential(const TfSolution& sol, double Z, double r) { return sol.potential(r, Z); }

double tf_energy_virial(const TfSolution& sol, double Z)
{
    return 3.0 / 7.0 * sol.slope() / screening_length() * std::pow(Z, 7.0 / 3.0);
}

double tf_energy(const TfSolution& sol, double Z)
{
    if (!sol.converged()) {
        throw ValidationError("tf_energy: solution is not converged");
    }
    return sol.weyl_energy(Z) - sol.coulomb_self_energy(Z);
}

double tf_energy_functional(const TfSolution& sol, double Z)
{
    if (!sol.converged()) {
        throw ValidationError("tf_energy_functional: solution is not converged");
    }
    // dense radial samples in r = b s² (uniform in s), skipping r = 0
    const double b = screening_length() * std::cbrt(1.0 / Z);
    const double s_max = std::sqrt(sol.x_nodes().back());
    const int n = 400000;
    std::vector<double> r(n), rho(n);
    for (int i = 0; i < n; ++i) {
        const double s = s_max * std::pow((i + 1.0) / n, 2.0);
        r[i] = b * s * s;
        rho[i] = sol.density(r[i], Z);
    }
    const double c = density_prefactor();
    auto radial = [&](auto&& f) {
        // ∫_0^∞ f(r) 4πr² dr over r = b s², tail beyond the sampled range ignored
        auto g = [&](double s) {
            if (s <= 0.0) {
                return 0.0;
            }
            const double rr = b * s * s;
            return f(rr) * 4.0 * pi * rr * rr * 2.0 * b * s;
        };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, s_max, 25, 1e-13);
    };
    const double kinetic = 0.6 * c * radial([&](double rr) {
        const double v = std::max(sol.potential(rr, Z), 0.0);
        return v * v * std::sqrt(v);
    });
    const double attraction = radial([&](double rr) { return Z / rr * sol.density(rr, Z); });
    const double repulsion = coulomb_energy(r, rho);
    return kinetic - attraction + repulsion;
}

double coulomb_energy(const std::vector<double>& r, const std::vector<double>& f,
                      const std::vector<double>& g)
{
    if (r.size() != f.size() || r.size() != g.size()) {
        throw ValidationError("coulomb_energy: node and sample counts differ");
    }
    const std::size_t n = r.size();
    if (n < 2) {
        return 0.0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(r[i] > r[i - 1])) {
            throw ValidationError("coulomb_energy: radial nodes must be strictly increasing");
        }
    }
    if (r[0] < 0.0) {
        throw ValidationError("coulomb_energy: negative radius");
    }
    auto enclosed = [&](const std::vector<double>& rho) {
        std::vector<double> q(n, 0.0);
        // charge inside r_0 assuming constant density there
        q[0] = 4.0 * pi / 3.0 * r[0] * r[0] * r[0] * rho[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double a = 4.0 * pi * r[i - 1] * r[i - 1] * rho[i - 1];
            const double c = 4.0 * pi * r[i] * r[i] * rho[i];
            q[i] = q[i - 1] + 0.5 * (a + c) * (r[i] - r[i - 1]);
        }
        return q;
    };
    const auto qf = enclosed(f);
    const auto qg = enclosed(g);
    double d = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = r[i - 1] > 0.0 ? qf[i - 1] * qg[i - 1] / (r[i - 1] * r[i - 1]) : 0.0;
        const double c = qf[i] * qg[i] / (r[i] * r[i]);
        d += 0.5 * (a + c) * (r[i] - r[i - 1]);
    }
    if (r[0] > 0.0) {
        // inside r_0 the constant-density ball contributes ½∫q²/r² = q(r_0)²/(10 r_0)
        d += qf[0] * qg[0] / (5.0 * r[0]);
    }
    // exterior of the last node
    d += qf[n - 1] * qg[n - 1] / r[n - 1];
    return 0.5 * d;
}

double coulomb_energy(const std::vector<double>& r, const std::vector<double>& rho)
{
    if (std::any_of(rho.begin(), rho.end(), [](double v) { return v < 0.0; })) {
        throw ValidationError("coulomb_energy: density must be nonnegative");
    }
    return coulomb_energy(r, rho, rho);
}

double config_potential(const TfSolution& sol, const NuclearConfig& config, const Vec3& x)
{
    double v = 0.0;
    for (std::size_t k = 0; k < config.size(); ++k) {
        const double d = distance(x, config.positions()[k]);
        v += sol.potential(d, config.charges()[k]);
    }
    return v;
}

EnvelopeReport envelope_check(const TfSolution& sol, const NuclearConfig& config,
                              const std::vector<Vec3>& points, double r0)
{
    EnvelopeReport rep;
    for (const auto& x : points) {
        const double d = config.nearest_distance(x);
        if (!(d > 0.0)) {
            continue;
        }
        const double v = config_potential(sol, config, x);
        const double env = std::min(1.0 / d, std::pow(d, -4.0));
        const double ratio = std::abs(v) / env;
        if (ratio > rep.c_envelope) {
            rep.c_envelope = ratio;
            rep.worst_distance = d;
        }
        if (d > 1.0) {
            ++rep.far_active;
        }
        for (std::size_t k = 0; k < config.size(); ++k) {
            const double dk = distance(x, config.positions()[k]);
            if (dk <= 0.5 * r0) {
                rep.c_near = std::max(rep.c_near, std::abs(v - config.charges()[k] / dk));
                ++rep.near_samples;
            }
        }
        ++rep.samples;
    }
    return rep;
}

} // namespace relscott::tf
