#pragma once

#include <Eigen/Dense>

#include <functional>

namespace relscott::radial {

/// Node placement. `log`: r = e^x. `log_sqrt`: r = 4a·softplus(x/2)², which is
/// logarithmic for r ≪ a and has √r spacing for r ≫ a, so a box of radius R
/// costs O(log(1/r_min) + √R) nodes.
enum class GridKind { log, log_sqrt };

struct GridSpec {
    GridKind kind = GridKind::log_sqrt;
    double r_min = 1e-5;
    double r_max = 60.0;
    double dx = 0.05;   // spacing of the uniform computational variable
    double scale = 1.0; // crossover length a of the log_sqrt map
};

/// Interior nodes of a mapped uniform grid x_0 < x_1 < … with r(x_0) = r_min
/// and r(x_{n+1}) = r_max as Dirichlet ends. After the Liouville substitution
/// y = √r′·u the operator −d²/dr² becomes the symmetric tridiagonal
/// G⁻¹(L + diag Q)G⁻¹ with G = diag(r′), L the second-difference matrix and
/// Q = ¾(r″/r′)² − ½r‴/r′.
class RadialGrid {
public:
    explicit RadialGrid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    Eigen::Index size() const { return r_.size(); }
    double dx() const { return dx_; }
    const Eigen::VectorXd& r() const { return r_; }
    /// dr/dx at the nodes; also the quadrature weight for ∫ f dr ≈ Σ f r′ dx.
    const Eigen::VectorXd& jacobian() const { return r1_; }
    const Eigen::VectorXd& q_term() const { return q_; }

    /// Tridiagonal −d²/dr² + ℓ(ℓ+1)/r² on this grid.
    void laplacian(int l, Eigen::VectorXd& diag, Eigen::VectorXd& off) const;

private:
    GridSpec spec_;
    double dx_ = 0.0;
    Eigen::VectorXd r_, r1_, q_;
};

/// Partial-wave block h²(−d²/dr² + ℓ(ℓ+1)/r²) plus a diagonal potential.
class ChannelOperator {
public:
    ChannelOperator(int l, const RadialGrid& grid, Eigen::VectorXd potential, double h,
                    int spin_factor = 2);

    int l() const { return l_; }
    double h() const { return h_; }
    int degeneracy() const { return 2 * l_ + 1; }
    int spin_factor() const { return spin_; }
    const RadialGrid& grid() const { return *grid_; }

    /// Kinetic tridiagonal h²(−d²/dr² + ℓ(ℓ+1)/r²).
    const Eigen::VectorXd& kinetic_diag() const { return kd_; }
    const Eigen::VectorXd& kinetic_off() const { return ko_; }
    const Eigen::VectorXd& potential() const { return v_; }

    Eigen::MatrixXd kinetic_dense() const;

    /// rel_transform(K, β) + diag(potential); β = 0 gives K/2 + potential.
    Eigen::MatrixXd hamiltonian(double beta) const;

private:
    int l_;
    const RadialGrid* grid_;
    Eigen::VectorXd kd_, ko_, v_;
    double h_;
    int spin_;
};

/// Samples `potential` on the grid nodes. Rejects non-finite values (a grid
/// reaching r = 0 with a singular potential) and invalid ℓ, h.
ChannelOperator build_radial_channel(int l, const RadialGrid& grid,
                                     const std::function<double(double)>& potential, double h,
                                     int spin_factor = 2);

} // namespace relscott::radial
