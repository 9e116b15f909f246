#pragma once

#include "relscott/config.hpp"
#include "relscott/profile.hpp"

#include <functional>
#include <vector>

namespace relscott::phase_space {

enum class Kinetic { nonrelativistic, relativistic };

/// Kinetic symbol √(β⁻²p²+β⁻⁴) − β⁻², written as p²/(√(1+β²p²)+1) so that
/// β = 0 gives ½p².
double kinetic_symbol(double p, double beta);

/// 16√2π/15: −∫[½p² − V]_− d³p = (16√2π/15) V^{5/2}.
double momentum_constant();

/// ∫[½p² − V]_− d³p in closed form (zero for V ≤ 0).
double momentum_integral(double v);

/// ∫[e_β(p) − V]_− d³p by Gauss-Kronrod over |p| up to the turning point
/// p_F = √(2V + β²V²). β = 0 routes to the closed form.
double momentum_integral_rel(double v, double beta);

struct SymbolSpec {
    Kinetic kind = Kinetic::nonrelativistic;
    double beta = 0.0;
    double h = 1.0;
    std::function<double(const Vec3&)> potential;
    std::function<double(const Vec3&)> weight; // θ², empty means 1
};

/// Radially symmetric variant: V(r), θ²(r), both on r > 0.
struct RadialSymbolSpec {
    Kinetic kind = Kinetic::nonrelativistic;
    double beta = 0.0;
    double h = 1.0;
    std::function<double(double)> potential;
    std::function<double(double)> weight;
    double r_max = 0.0; // 0 means integrate to infinity
};

struct WeylResult {
    double value = 0.0;
    double error = 0.0;
};

struct SpatialQuadrature {
    std::vector<Vec3> centers;  // singular points (nuclei); at least one
    int angular_azimuthal = 48; // trapezoid nodes in the azimuth
    double tolerance = 1e-8;
};

/// (2/(2πh)³) ∬ θ² [½p² − V]_− dx dp. The spatial integral uses a fuzzy
/// (Becke) partition of space into cells around each center, with a radial
/// Gauss-Kronrod × angular product rule in each cell (32-point Gauss-Legendre
/// in cos θ, trapezoid in the azimuth).
WeylResult weyl_integral(const SymbolSpec& spec, const SpatialQuadrature& quad);
WeylResult weyl_integral(const RadialSymbolSpec& spec, double tolerance = 1e-10);

/// Same with the relativistic symbol (β = 0 routes to weyl_integral).
WeylResult rel_symbol_integral(const SymbolSpec& spec, const SpatialQuadrature& quad);
WeylResult rel_symbol_integral(const RadialSymbolSpec& spec, double tolerance = 1e-10);

/// ∬ φ(|x|/R)² [½p² − κ_c/|x|]_− dx dp (no 2/(2π)³ prefactor), by radial
/// quadrature over 0 < |x| < R.
double cutoff_coulomb_weyl(double R, double kappa_c, CutoffProfile profile = CutoffProfile::smooth);

/// Profile integral ∫_0^1 φ(s)² s^{-1/2} ds.
double cutoff_profile_moment(CutoffProfile profile);

} // namespace relscott::phase_space
