#pragma once

#include "relscott/profile.hpp"
#include "relscott/radial.hpp"
#include "relscott/tf.hpp"

#include <limits>
#include <vector>

namespace relscott::scott {

struct TraceOptions {
    CutoffProfile profile = CutoffProfile::smooth;
    double dx = 0.1;          // coarse step; the fine step is dx/2
    bool richardson = true;   // combine (4·fine − coarse)/3
    double r_min = 1e-5;
    double scale = 1.0;       // crossover length of the log_sqrt grid
    double box_margin = 8.0;  // relativistic box radius is R + box_margin·α
    int l_limit = 400;
};

struct LocalizedTrace {
    double R = 0.0;
    double alpha = 0.0;
    double trace = 0.0;   // extrapolated in dx when richardson is on
    double coarse = 0.0;
    double fine = 0.0;
    double weyl = 0.0;    // −(2/(2π)³)·C_φ·R^{1/2}
    int l_max = -1;
    int nodes = 0;        // fine grid size
    bool converged = false;

    double value() const { return trace - weyl; }
};

/// Leading semiclassical value of tr[φ_R(½p² − 1/|x|)φ_R]_−.
double coulomb_weyl_term(double R, CutoffProfile profile);

/// tr[φ_R(√(α⁻²p²+α⁻⁴) − α⁻² − 1/|x|)φ_R]_− by radial channels, spin 2;
/// α = 0 is the ½p² limit. Rejects α ∉ [0, 2/π) and R ≤ 0.
LocalizedTrace localized_coulomb_trace(double R, double alpha, const TraceOptions& opts = {});

struct ScottEstimate {
    double alpha = 0.0;
    std::vector<double> radii;
    std::vector<LocalizedTrace> traces;
    double limit = 0.0;     // extrapolated value of trace − Weyl, i.e. 2S₂(α)
    double error = 0.0;
    double exponent = 0.0;  // p of the model L + a R^{-p}
    double s2() const { return 0.5 * limit; }
    double s2_error() const { return 0.5 * error; }
};

/// Extrapolates trace − Weyl over a geometric R sequence (at least three
/// radii) with the model L + a·R^{-p} fitted to the last three points. The
/// error is the shift of the limit between the last two triples, or the last
/// increment when only one triple exists. Throws ConvergenceError when a
/// trace is unconverged or the last increments are not shrinking
/// monotonically.
ScottEstimate scott_function(double alpha, const std::vector<double>& radii, const TraceOptions& opts = {});

struct Extrapolation {
    double limit = 0.0;
    double exponent = 0.0;
    double error = 0.0;
};

/// The same extrapolation on given values at a geometric R sequence.
Extrapolation extrapolate(const std::vector<double>& radii, const std::vector<double>& values);

struct SemiclassicalOptions {
    double dx = 0.1;
    bool richardson = true;
    double r_min = 1e-5;
    double r_max = 40.0;
    double scale = 0.05;
    int l_limit = 2000;
};

struct SemiclassicalTrace {
    double h = 0.0;
    double beta = 0.0;
    double coupling = 1.0;
    double trace = 0.0;
    double coarse = 0.0;
    double fine = 0.0;
    int l_max = -1;
    bool converged = false;
};

/// tr[rel(h²p², β) − κ̃V^TF]_− for the atomic TF potential (Z = 1 units),
/// spin 2, by radial channels. Requires β ≤ h and κ̃ < 2/π.
SemiclassicalTrace semiclassical_trace(const tf::TfSolution& sol, double h, double beta, double coupling,
                                       const SemiclassicalOptions& opts = {});

/// Closed-form coefficient of h⁻³ in the nonrelativistic Weyl term of κ̃V^TF.
double weyl_coefficient(const tf::TfSolution& sol, double coupling);

struct FitReport {
    double c0 = 0.0;
    double c2 = 0.0;
    double c0_error = 0.0;
    double c2_error = 0.0;
    double residual_slope = 0.0;       // log-log slope of |value − c0_ref·h⁻³|
    double residual_slope_error = 0.0;
    double condition = 0.0;            // 2-norm condition number of the design matrix
    bool ill_conditioned = false;
};

/// Least squares value(h) = c0 h⁻³ + c2 h⁻². The residual slope is taken
/// against `c0_ref` (the fitted c0 when it is not finite). Coefficient errors
/// combine the least-squares standard errors with the spread of refits that
/// drop one point. Requires ≥ 5 points whose h range spans a factor ≥ 4.
FitReport scott_fit(const std::vector<double>& h, const std::vector<double>& values,
                    double c0_ref = std::numeric_limits<double>::quiet_NaN());

} // namespace relscott::scott
