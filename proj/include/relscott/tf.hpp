#pragma once

#include "relscott/config.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace relscott::tf {

/// Screening length for Z = 1: r = b x with b = ½(3π/4)^{2/3}.
double screening_length();
/// Density prefactor: ρ = c [V]_+^{3/2} with c = 2^{3/2}/(3π²) (spin 2, kinetic ½p²).
double density_prefactor();
/// Decay exponent of the leading correction to the 144/x³ far field.
double tail_exponent();

struct TfOptions {
    double ds = 5e-4;          // RK4 step in s = √x
    double s_cap = 20.0;       // shooting trajectories are not followed beyond s_cap
    double x_max = 2.0e4;      // extent of the returned grid
    double tolerance = 1e-10;  // bisection tolerance on φ'(0) and far-field requirement φ(x_max)
    double slope_lo = -1.7;    // initial bracket for φ'(0)
    double slope_hi = -1.5;
    double match_rel = 1e-9;   // bracketing trajectories must agree to this before the tail takes over
};

struct CollocationOptions {
    int nodes = 4000;          // intervals of the compactified variable t ∈ [0,1]
    double scale = 2.0;        // s = scale·t/(1−t)
    double tolerance = 1e-13;  // Newton update max-norm
    int max_iter = 50;
};

/// Universal neutral-atom screening function, φ'' = φ^{3/2}/√x, φ(0)=1, φ(∞)=0.
///
/// Integrated in s = √x where the system φ_s = 2sz, z_s = 2φ^{3/2} is regular at
/// the origin. Inside the shooting range φ is represented by cubic Hermite
/// interpolation in s; beyond it by the matched far-field form
/// 144/x³·(1+(a/x)^λ)^{-3/λ}.
class TfSolution {
public:
    /// Nodes of the returned grid in TF length units (x), with φ samples.
    const std::vector<double>& x_nodes() const { return x_nodes_; }
    const std::vector<double>& phi_nodes() const { return phi_nodes_; }

    double slope() const { return slope_; }
    double x_match() const { return s_match_ * s_match_; }
    double tail_scale() const { return tail_a_; }
    /// Bracket of the initial slope that remained after bisection.
    double slope_lo() const { return bracket_lo_; }
    double slope_hi() const { return bracket_hi_; }
    double tolerance() const { return tolerance_; }
    bool converged() const { return converged_; }

    /// φ(x) and dφ/dx for x ≥ 0.
    double phi(double x) const;
    double dphi(double x) const;
    /// φ as a function of s = √x, with dφ/ds.
    double phi_s(double s) const;

    /// Residual of the TF equation at x, (φ'' − φ^{3/2}/√x) evaluated by a
    /// central difference of the interpolated φ'.
    double residual(double x, double dx = 1e-4) const;

    /// V^TF for total charge Z at distance r (Z = 1 in normalized units).
    double potential(double r, double Z = 1.0) const;
    /// ρ^TF = c V^{3/2}.
    double density(double r, double Z = 1.0) const;

    /// ∫ V^{5/2} d³x for total charge Z.
    double potential_moment_5_2(double Z = 1.0) const;
    /// Weyl(V) = −(2/5)c ∫V^{5/2}.
    double weyl_energy(double Z = 1.0) const;
    /// D(ρ^TF) via the enclosed-charge formula.
    double coulomb_self_energy(double Z = 1.0) const;

    friend TfSolution solve_tf_atom(const TfOptions&);

private:
    std::vector<double> s_;
    std::vector<double> phi_;
    std::vector<double> z_;
    std::vector<double> x_nodes_;
    std::vector<double> phi_nodes_;
    double ds_ = 0.0;
    double s_match_ = 0.0;
    double tail_a_ = 0.0;
    double slope_ = 0.0;
    double bracket_lo_ = 0.0;
    double bracket_hi_ = 0.0;
    double tolerance_ = 0.0;
    bool converged_ = false;

    double tail_phi(double x) const;
    double tail_dphi(double x) const;
    // ∫_0^∞ g(φ(s), s) ds split into the Hermite range and the tail
    template <typename F>
    double integrate_s(F&& g) const;
};

/// Shooting solve with bisection on φ'(0). Throws ConvergenceError with the
/// final bracket if the bracket does not shrink to `tolerance`, and
/// ValidationError if φ(x_max) exceeds `tolerance`.
TfSolution solve_tf_atom(const TfOptions& opts = {});

struct CollocationResult {
    double slope;              // −2∫φ^{3/2} ds, Richardson-combined over N and 2N
    double slope_coarse;       // at N intervals only
    int newton_iterations;
    Eigen::VectorXd s;         // nodes (last one is +∞, excluded)
    Eigen::VectorXd phi;
};

/// Independent finite-difference solve of the same boundary value problem on
/// the compactified variable s = L t/(1−t), Newton with a tridiagonal Jacobian.
CollocationResult solve_tf_collocation(const CollocationOptions& opts = {});

/// V^TF_Z(r) = Z^{4/3} V^TF_1(Z^{1/3} r). Rejects r = 0.
double tf_potential(const TfSolution& sol, double Z, double r);

/// E^TF(Z) = Weyl(V^TF) − D(ρ^TF) by quadrature. Rejects unconverged input.
double tf_energy(const TfSolution& sol, double Z);

/// Closed form Z^{7/3}·(3/7)φ'(0)/b.
double tf_energy_virial(const TfSolution& sol, double Z);

/// Energy functional K − A + D evaluated on the solved density, K = (3/5)∫ρV.
double tf_energy_functional(const TfSolution& sol, double Z);

/// D(ρ) = ½∫∫ρ(x)ρ(y)/|x−y| for a radial density sampled on increasing nodes
/// r_i, using the enclosed charge q(r) and D = ½∫ q²/r² dr (trapezoid).
/// Throws ValidationError on negative density or unsorted nodes.
double coulomb_energy(const std::vector<double>& r, const std::vector<double>& rho);

/// Symmetric bilinear extension D(f,g) = ½∫ q_f q_g / r² dr.
double coulomb_energy(const std::vector<double>& r, const std::vector<double>& f,
                      const std::vector<double>& g);

/// Potential used for molecular configurations: superposition of atomic
/// potentials with the normalized charges z_k. Exact for a single nucleus.
double config_potential(const TfSolution& sol, const NuclearConfig& config, const Vec3& x);

struct EnvelopeReport {
    std::size_t samples = 0;
    double c_envelope = 0.0;   // max V / min(d^{-1}, d^{-4})
    double c_near = 0.0;       // max |V − z_k/|x−r_k|| over |x−r_k| ≤ r₀/2
    double worst_distance = 0.0;
    std::size_t near_samples = 0;
    std::size_t far_active = 0; // samples with d > 1, where d^{-4} is the active branch
};

/// Smallest constants for which the sampled potential satisfies
/// V ≤ C min(d^{-1}, d^{-4}) and |V − z_k/|x−r_k|| ≤ C* near each nucleus.
EnvelopeReport envelope_check(const TfSolution& sol, const NuclearConfig& config,
                              const std::vector<Vec3>& points, double r0);

} // namespace relscott::tf
