#pragma once

#include "relscott/fields.hpp"
#include "relscott/linalg.hpp"
#include "relscott/radial.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <vector>

namespace relscott::spectral {

using linalg::Complex;

/// Scalar relativistic kinetic function t/(√(1+β²t)+1) = √(β⁻²t+β⁻⁴)−β⁻²,
/// equal to t/2 at β = 0.
double rel_function(double t, double beta);

/// √(β⁻²K+β⁻⁴) − β⁻² via the eigen-decomposition of K (K/2 at β = 0).
/// Throws ValidationError when K has an eigenvalue below −tol·max(1, ‖K‖).
Eigen::MatrixXd rel_transform(const Eigen::MatrixXd& k, double beta, double tol = 1e-10);
Eigen::MatrixXcd rel_transform(const Eigen::MatrixXcd& k, double beta, double tol = 1e-10);

/// Same for a symmetric tridiagonal K given by its diagonal and off-diagonal.
Eigen::MatrixXd rel_transform_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                          double beta);

/// tr[H]_− or, with a weight, tr[φHφ]_− for the diagonal multiplication φ.
double negative_sum(const Eigen::MatrixXd& h, const std::optional<Eigen::VectorXd>& weight = std::nullopt);
double negative_sum(const Eigen::MatrixXcd& h, const std::optional<Eigen::VectorXd>& weight = std::nullopt);
double negative_sum(const Eigen::VectorXd& eigenvalues);

struct ChannelSum {
    double total = 0.0;
    double tail_estimate = 0.0; // geometric extrapolation from the last two weighted channels
    double tail_ratio = 0.0;    // |w_L / w_{L−1}|
    bool tail_decaying = true;
    int l_max = -1;
};

/// Σ_ℓ q(2ℓ+1)·values[ℓ] with a geometric tail estimate. A non-decaying tail
/// (ratio ≥ 1 with a nonzero last channel) is flagged, not thrown.
ChannelSum channel_sum(const std::vector<double>& values, int spin_factor);

/// tr[φ(rel_transform(K, β) + diag W)φ]_− for one radial channel; the nonrel
/// case (β = 0) stays tridiagonal.
double channel_negative_sum(const radial::ChannelOperator& ch, double beta,
                            const std::optional<Eigen::VectorXd>& weight = std::nullopt);

struct RadialTrace {
    double total = 0.0;
    std::vector<double> per_channel; // unweighted by degeneracy
    int l_max = -1;                  // last channel evaluated
    bool converged = false;          // a channel with empty negative spectrum was reached
    ChannelSum sum;
};

/// Σ_ℓ q(2ℓ+1) tr[φ(rel(K_ℓ) + W)φ]_−, stopping at the first channel whose
/// negative part is empty (channel values are nondecreasing in ℓ, so the
/// remaining ones vanish too) or after `l_limit` channels.
RadialTrace radial_trace(const radial::RadialGrid& grid, const Eigen::VectorXd& potential, double beta,
                         double h, const std::optional<Eigen::VectorXd>& weight, int spin_factor = 2,
                         int l_limit = 400);

/// Lattice operator on the interior nodes of a field grid (Dirichlet on the
/// outer layer). Sites are ordered like the grid, spin fastest.
class GridOperator {
public:
    GridOperator(fields::Grid3 grid, int components, Eigen::SparseMatrix<Complex> matrix);

    const fields::Grid3& grid() const { return grid_; }
    int components() const { return components_; }
    int interior() const { return grid_.n - 2; }
    Eigen::Index sites() const;
    Eigen::Index dimension() const { return matrix_.rows(); }
    const Eigen::SparseMatrix<Complex>& matrix() const { return matrix_; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

    /// Grid index of an interior site.
    std::size_t grid_index(Eigen::Index site) const;
    /// Samples f at the interior sites (one value per site, not per component).
    Eigen::VectorXd sample(const std::function<double(const Vec3&)>& f) const;
    /// Expands per-site values to the full (site, component) diagonal.
    Eigen::VectorXd expand(const Eigen::VectorXd& per_site) const;

private:
    fields::Grid3 grid_;
    int components_;
    Eigen::SparseMatrix<Complex> matrix_;
};

/// (−ih∇+A)² with Peierls link phases exp(i/h·Δ·½(A_s + A_t)·e).
GridOperator build_schrodinger_grid(const fields::VectorField& a, double h);

/// 2-spinor Pauli operator (−ih∇+A)² ⊗ 1 + h σ·B with B the centred-difference
/// curl sampled at the sites.
GridOperator build_pauli_grid(const fields::VectorField& a, double h);

/// Real −h²Δ on the interior nodes of `grid`.
Eigen::SparseMatrix<double> grid_laplacian(const fields::Grid3& grid, double h);

} // namespace relscott::spectral
