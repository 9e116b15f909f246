#include "relscott/profile.hpp"

#include "relscott/error.hpp"

#include <cmath>
#include <numbers>

namespace relscott {

double smooth_step(double t)
{
    if (t <= 0.0) {
        return 1.0;
    }
    if (t >= 1.0) {
        return 0.0;
    }
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

double smooth_step_derivative(double t)
{
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    const double u = 1.0 - t;
    return -a * b * (1.0 / (u * u) + 1.0 / (t * t)) / ((a + b) * (a + b));
}

double cutoff_value(CutoffProfile p, double s)
{
    s = std::abs(s);
    if (s <= 0.5) {
        return 1.0;
    }
    if (s >= 1.0) {
        return 0.0;
    }
    switch (p) {
    case CutoffProfile::smooth:
        return smooth_step(2.0 * s - 1.0);
    case CutoffProfile::cosine: {
        const double c = std::cos(std::numbers::pi * (s - 0.5));
        return c * c;
    }
    }
    return 0.0;
}

CutoffProfile parse_profile(const std::string& name)
{
    if (name == "smooth") {
        return CutoffProfile::smooth;
    }
    if (name == "cosine") {
        return CutoffProfile::cosine;
    }
    throw ValidationError("unknown cutoff profile '" + name + "' (expected smooth or cosine)");
}

std::string profile_name(CutoffProfile p) { return p == CutoffProfile::smooth ? "smooth" : "cosine"; }

} // namespace relscott
