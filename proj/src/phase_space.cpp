#include "relscott/phase_space.hpp"

#include "relscott/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace relscott::phase_space {

namespace {

using std::numbers::pi;
using boost::math::quadrature::gauss_kronrod;

double prefactor(double h) { return 2.0 / std::pow(2.0 * pi * h, 3.0); }

// Becke cell function with three smoothing iterations.
double becke_weight(const std::vector<Vec3>& centers, std::size_t owner, const Vec3& x)
{
    if (centers.size() == 1) {
        return 1.0;
    }
    auto cell = [&](std::size_t i) {
        double p = 1.0;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (j == i) {
                continue;
            }
            double mu = (distance(x, centers[i]) - distance(x, centers[j])) /
                        distance(centers[i], centers[j]);
            for (int k = 0; k < 3; ++k) {
                mu = 1.5 * mu - 0.5 * mu * mu * mu;
            }
            p *= 0.5 * (1.0 - mu);
        }
        return p;
    };
    double total = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        total += cell(i);
    }
    return total > 0.0 ? cell(owner) / total : 0.0;
}

WeylResult spatial(const SymbolSpec& spec, const SpatialQuadrature& quad)
{
    if (!spec.potential) {
        throw ValidationError("weyl_integral: potential accessor missing");
    }
    if (!(spec.h > 0.0) || spec.beta < 0.0) {
        throw ValidationError("weyl_integral: require h > 0 and beta >= 0");
    }
    if (quad.centers.empty()) {
        throw ValidationError("weyl_integral: at least one quadrature center is required");
    }
    const int nph = quad.angular_azimuthal;
    const bool rel = spec.kind == Kinetic::relativistic && spec.beta > 0.0;
    WeylResult out;
    for (std::size_t c = 0; c < quad.centers.size(); ++c) {
        const Vec3& o = quad.centers[c];
        // cos θ by 32-point Gauss-Legendre, azimuth by the trapezoid rule
        auto polar = [&](double mu) {
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            double sum = 0.0;
            for (int j = 0; j < nph; ++j) {
                const double ph = 2.0 * pi * j / nph;
                const Vec3 dir{st * std::cos(ph), st * std::sin(ph), mu};
                // r = u², so r² dr = 2u⁵ du and the Coulomb singularity is regular
                auto radial = [&](double u) {
                    if (u <= 0.0) {
                        return 0.0;
                    }
                    const double r = u * u;
                    const Vec3 x{o[0] + r * dir[0], o[1] + r * dir[1], o[2] + r * dir[2]};
                    double w = becke_weight(quad.centers, c, x);
                    if (w != 0.0 && spec.weight) {
                        w *= spec.weight(x);
                    }
                    if (w == 0.0) {
                        return 0.0;
                    }
                    const double v = spec.potential(x);
                    const double m = rel ? momentum_integral_rel(v, spec.beta) : momentum_integral(v);
                    return w * m * 2.0 * u * u * u * u * u;
                };
                double err = 0.0;
                const double val = gauss_kronrod<double, 31>::integrate(
                    radial, 0.0, std::numeric_limits<double>::infinity(), 12, quad.tolerance, &err);
                if (!std::isfinite(val)) {
                    throw ConvergenceError("weyl_integral: divergent radial integral around center " +
                                           std::to_string(c) + " along direction (" +
                                           std::to_string(dir[0]) + ", " + std::to_string(dir[1]) +
                                           ", " + std::to_string(dir[2]) + ")");
                }
                sum += val;
                out.error += std::abs(err) * 2.0 * pi / nph;
            }
            return sum * 2.0 * pi / nph;
        };
        out.value += boost::math::quadrature::gauss<double, 32>::integrate(polar, -1.0, 1.0);
    }
    const double pf = prefactor(spec.h);
    out.value *= pf;
    out.error *= pf;
    return out;
}

WeylResult radial(const RadialSymbolSpec& spec, double tolerance, bool rel)
{
    if (!spec.potential) {
        throw ValidationError("weyl_integral: potential accessor missing");
    }
    if (!(spec.h > 0.0) || spec.beta < 0.0) {
        throw ValidationError("weyl_integral: require h > 0 and beta >= 0");
    }
    auto f = [&](double u) {
        if (u <= 0.0) {
            return 0.0;
        }
        const double r = u * u;
        const double w = spec.weight ? spec.weight(r) : 1.0;
        if (w == 0.0) {
            return 0.0;
        }
        const double v = spec.potential(r);
        const double m = rel ? momentum_integral_rel(v, spec.beta) : momentum_integral(v);
        return 4.0 * pi * w * m * 2.0 * u * u * u * u * u;
    };
    const double upper =
        spec.r_max > 0.0 ? std::sqrt(spec.r_max) : std::numeric_limits<double>::infinity();
    WeylResult out;
    out.value = gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 20, tolerance, &out.error);
    if (!std::isfinite(out.value)) {
        throw ConvergenceError("weyl_integral: divergent radial integral on (0, " +
                               std::to_string(spec.r_max > 0.0 ? spec.r_max : INFINITY) + ")");
    }
    const double pf = prefactor(spec.h);
    out.value *= pf;
    out.error *= pf;
    return out;
}

} // namespace

double kinetic_symbol(double p, double beta)
{
    const double p2 = p * p;
    return p2 / (std::sqrt(1.0 + beta * beta * p2) + 1.0);
}

double momentum_constant() { return 16.0 * std::sqrt(2.0) * pi / 15.0; }

double momentum_integral(double v)
{
    if (v <= 0.0) {
        return 0.0;
    }
    return -momentum_constant() * v * v * std::sqrt(v);
}

double momentum_integral_rel(double v, double beta)
{
    if (beta < 0.0) {
        throw ValidationError("momentum_integral_rel: beta must be nonnegative");
    }
    if (beta == 0.0) {
        return momentum_integral(v);
    }
    if (v <= 0.0) {
        return 0.0;
    }
    const double pf = std::sqrt(2.0 * v + beta * beta * v * v);
    auto f = [&](double p) { return (kinetic_symbol(p, beta) - v) * p * p; };
    return 4.0 * pi * gauss_kronrod<double, 61>::integrate(f, 0.0, pf, 10, 1e-14);
}

WeylResult weyl_integral(const SymbolSpec& spec, const SpatialQuadrature& quad)
{
    if (spec.kind != Kinetic::nonrelativistic) {
        throw ValidationError("weyl_integral: relativistic symbols go through rel_symbol_integral");
    }
    return spatial(spec, quad);
}

WeylResult weyl_integral(const RadialSymbolSpec& spec, double tolerance)
{
    if (spec.kind != Kinetic::nonrelativistic) {
        throw ValidationError("weyl_integral: relativistic symbols go through rel_symbol_integral");
    }
    return radial(spec, tolerance, false);
}

WeylResult rel_symbol_integral(const SymbolSpec& spec, const SpatialQuadrature& quad)
{
    SymbolSpec s = spec;
    if (s.beta == 0.0) {
        s.kind = Kinetic::nonrelativistic;
        return spatial(s, quad);
    }
    s.kind = Kinetic::relativistic;
    return spatial(s, quad);
}

WeylResult rel_symbol_integral(const RadialSymbolSpec& spec, double tolerance)
{
    return radial(spec, tolerance, spec.beta > 0.0);
}

double cutoff_profile_moment(CutoffProfile profile)
{
    // s = u², ∫_0^1 φ(s)² s^{-1/2} ds = 2∫_0^1 φ(u²)² du; φ ≡ 1 for u ≤ 1/√2
    const double knee = std::sqrt(0.5);
    auto f = [&](double u) {
        const double p = cutoff_value(profile, u * u);
        return 2.0 * p * p;
    };
    return 2.0 * knee + gauss_kronrod<double, 61>::integrate(f, knee, 1.0, 15, 1e-14);
}

double cutoff_coulomb_weyl(double R, double kappa_c, CutoffProfile profile)
{
    if (!(R > 0.0) || !(kappa_c > 0.0)) {
        throw ValidationError("cutoff_coulomb_weyl: require R > 0 and kappa_c > 0");
    }
    // radial integral over r = u², split at the profile knee r = R/2
    auto f = [&](double u) {
        if (u <= 0.0) {
            return 0.0;
        }
        const double r = u * u;
        const double p = cutoff_value(profile, r / R);
        return 4.0 * pi * p * p * momentum_integral(kappa_c / r) * 2.0 * u * u * u * u * u;
    };
    const double knee = std::sqrt(0.5 * R);
    return gauss_kronrod<double, 61>::integrate(f, 0.0, knee, 15, 1e-13) +
           gauss_kronrod<double, 61>::integrate(f, knee, std::sqrt(R), 15, 1e-13);
}

} // namespace relscott::phase_space
