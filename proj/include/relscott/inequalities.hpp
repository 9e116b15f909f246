#pragma once

#include "relscott/fields.hpp"
#include "relscott/profile.hpp"
#include "relscott/radial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relscott::ineq {

struct InequalityReport {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> params;
    double lhs = 0.0;
    std::vector<std::pair<std::string, double>> rhs_terms;
    double empirical_constant = 0.0;
    std::optional<double> bound; // regression bound on the empirical constant, if any
    bool pass = true;
    std::vector<std::string> warnings;

    double rhs_total() const;
    double param(const std::string& key) const;
};

// Magnetic Lieb-Thirring

enum class KineticOperator { scalar, schrodinger, pauli };

KineticOperator parse_kinetic(const std::string& name);
std::string kinetic_name(KineticOperator k);

struct LtInstance {
    KineticOperator op = KineticOperator::scalar;
    fields::VectorField field;                    // ignored for `scalar`
    std::function<double(const Vec3&)> potential; // V; only V_+ enters the bound
    double beta = 0.5;
    double h = 1.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> descriptor; // generator parameters, echoed in reports
};

/// LHS = tr[√(β⁻²T_h + β⁻⁴) − β⁻² − V]_− on the interior lattice of the field
/// grid. RHS terms h⁻³∫V_+^{5/2}, h⁻³β³∫V_+⁴, (h⁻²∫B²)^{3/4}(∫V_+⁴)^{1/4}
/// (lattice sums). The empirical constant is |LHS| / ΣRHS (0 when both vanish).
/// Warns when the magnetic length √(h/max|B|) is below the grid spacing.
InequalityReport lt_check(const LtInstance& inst, std::optional<double> bound = std::nullopt);

struct LtEnsembleSpec {
    int grid_n = 12;
    double spacing = 0.35;
    std::size_t scalar = 80;
    std::size_t schrodinger = 60;
    std::size_t pauli = 60;
};

/// Seeded random instances: Gaussian wells (some with a negative part) for V,
/// polynomial or uniform-field families for A, h ∈ [0.4, 1.2], β ∈ [0.05, 1].
std::vector<LtInstance> lt_ensemble(std::uint64_t seed, const LtEnsembleSpec& spec = {});

/// The same instance after the dilation x → λx: spacing and origin times λ,
/// A → A/λ, V → λ⁻²V(·/λ), β → λβ. Both sides scale by λ⁻².
LtInstance dilate(const LtInstance& inst, double lambda);

// Coulomb stability

struct CritOptions {
    radial::GridSpec grid;      // r_max is raised to cover the cutoff support when needed
    int l_limit = 400;          // hard stop for the channel loop
};

/// η = (1 − (πβ/2)²)/10.
double eta(double beta);

/// For β ∈ (0, 2/π), A = 0 and radial V:
///   LHS = tr[φ_r(√(β⁻²p²+β⁻⁴) − β⁻² − 1/|x| − V)φ_r]_− (spin 2, radial channels)
///   RHS = η⁻³r³ + η⁻³ᐟ²∫V_+^{5/2} + η⁻³β³∫V_+⁴.
/// Rejects β ≥ 2/π (and β ≤ 0).
InequalityReport crit_stability_check(double beta, double r, CutoffProfile profile,
                                      const std::function<double(double)>& potential,
                                      const CritOptions& opts = {});

/// Small-β branch: LHS = tr[√(β⁻²p²+β⁻⁴) − β⁻² − 1_{|x|≤r}/|x| − V]_− in a box
/// of radius opts.grid.r_max, RHS = 1 + ∫V_+^{5/2} + ∫V_+⁴.
InequalityReport small_beta_check(double beta, double r, const std::function<double(double)>& potential,
                                  const CritOptions& opts = {});

// Matrix and scalar inequalities

/// min eig(√(Σ g_i A_i g_i) − Σ g_i √A_i g_i); pass when ≥ −tol. The g_i are
/// diagonals (as vectors) with Σ g_i² = 1; a defect above 1e-12 is rejected.
InequalityReport pull_out_check(const std::vector<Eigen::VectorXd>& g,
                                const std::vector<Eigen::MatrixXd>& a, double tol = 1e-10);

/// tr(P−Q)_− + tr([−(P²−Q²)_−])^{1/2} ≥ −tol.
InequalityReport bks_check(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double tol = 1e-10);

/// c₀ = (√11 − 1)/10.
double c0();

/// √(T+m²) − m against c₀T/m (T < 10m²) or (2/3)√T (T ≥ 10m²). The report's
/// lhs is the margin (√(T+m²) − m) − bound.
InequalityReport scalar_kinetic_bounds(double t, double m, double tol = 1e-10);

struct EnsembleSummary {
    std::string id;
    std::uint64_t seed = 0;
    std::size_t instances = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0; // most negative margin seen
    std::vector<InequalityReport> failures;
};

EnsembleSummary pull_out_ensemble(std::uint64_t seed, std::size_t count, double tol = 1e-10);
EnsembleSummary bks_ensemble(std::uint64_t seed, std::size_t count, double tol = 1e-10);
EnsembleSummary scalar_ensemble(std::uint64_t seed, std::size_t count, double tol = 1e-10);

// Hardy / Kato

struct HardyKatoResult {
    int l = 0;
    double dx = 0.0;
    double kato_min = 0.0;       // min eig(|p| − (2/π)/r)
    double hardy_min = 0.0;      // min eig(p² − (4r)⁻²)
    double kato_relative = 0.0;  // min eig(r^{1/2}|p|r^{1/2}) − 2/π
    double hardy_relative = 0.0; // min eig(r p² r) − 1/16
};

/// Channel-ℓ discretizations of the Kato and Hardy operators (A = 0). `shift`
/// is added to both operators.
HardyKatoResult hardy_kato_check(int l, const radial::GridSpec& grid, double shift = 0.0);

// IMS localization

struct ImsReport {
    double partition_defect = 0.0;  // max |Σφ_i² − 1| on the lattice
    double identity_defect = 0.0;   // ‖(H+c)^{-1/2}(Σφ_iHφ_i − H − h²Σ|∇φ_i|²)(H+c)^{-1/2}‖
    double inequality_min = 0.0;    // min eig(H − Σφ_i(H − C h²G)φ_i)
    double spacing = 0.0;
};

/// Lattice Schrödinger operator H = (−ih∇+A)² on `field`'s grid, partition
/// functions φ_i given by value and gradient. Rejects a partition defect above
/// `partition_tol`. `c_shift` is the c in the energy norm; `c_ims` the C of the
/// inequality form (G = Σ|∇φ_i|² sampled analytically).
struct PartitionFunction {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
};

ImsReport ims_check(const fields::VectorField& field, double h, const std::vector<PartitionFunction>& parts,
                    double c_shift = 1.0, double c_ims = 1.0, double partition_tol = 1e-12,
                    bool with_inequality = true);

} // namespace relscott::ineq
