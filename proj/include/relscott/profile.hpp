#pragma once

#include <string>

namespace relscott {

/// C^∞ step: 1 for t ≤ 0, 0 for t ≥ 1, built from g(t) = exp(−1/t).
double smooth_step(double t);
double smooth_step_derivative(double t);

/// Radial cutoff profiles φ(s), s = |x|/R: identically 1 on [0, ½], 0 for s ≥ 1.
enum class CutoffProfile { smooth, cosine };

double cutoff_value(CutoffProfile p, double s);
CutoffProfile parse_profile(const std::string& name);
std::string profile_name(CutoffProfile p);

} // namespace relscott
