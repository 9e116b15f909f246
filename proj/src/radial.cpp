#include "relscott/radial.hpp"

#include "relscott/error.hpp"
#include "relscott/spectral.hpp"

#include <cmath>
#include <string>

namespace relscott::radial {

namespace {

double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// inverse of r = 4a·softplus(x/2)²
double log_sqrt_coordinate(double r, double a) { return 2.0 * std::log(std::expm1(std::sqrt(r / (4.0 * a)))); }

} // namespace

RadialGrid::RadialGrid(const GridSpec& spec) : spec_(spec)
{
    if (!(spec.r_min > 0.0)) {
        throw ValidationError("radial grid: r_min must be positive (the grid may not touch r = 0)");
    }
    if (!(spec.r_max > spec.r_min) || !(spec.dx > 0.0) || !(spec.scale > 0.0)) {
        throw ValidationError("radial grid: require r_max > r_min, dx > 0, scale > 0");
    }
    double x0, x1;
    if (spec.kind == GridKind::log) {
        x0 = std::log(spec.r_min);
        x1 = std::log(spec.r_max);
    } else {
        x0 = log_sqrt_coordinate(spec.r_min, spec.scale);
        x1 = log_sqrt_coordinate(spec.r_max, spec.scale);
    }
    const auto n = static_cast<Eigen::Index>(std::ceil((x1 - x0) / spec.dx));
    if (n < 3) {
        throw ValidationError("radial grid: fewer than two interior nodes");
    }
    dx_ = (x1 - x0) / static_cast<double>(n);
    r_.resize(n - 1);
    r1_.resize(n - 1);
    q_.resize(n - 1);
    const double a = spec.scale;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
        const double x = x0 + dx_ * static_cast<double>(i + 1);
        if (spec.kind == GridKind::log) {
            r_(i) = std::exp(x);
            r1_(i) = r_(i);
            q_(i) = 0.25;
        } else {
            const double s = softplus(0.5 * x);
            const double sg = sigmoid(0.5 * x);
            const double dsg = 0.5 * sg * (1.0 - sg);
            const double r1 = 4.0 * a * s * sg;
            const double r2 = 2.0 * a * sg * (sg + s * (1.0 - sg));
            const double r3 =
                2.0 * a * (2.0 * sg * dsg + 0.5 * sg * sg * (1.0 - sg) + s * (dsg * (1.0 - sg) - sg * dsg));
            r_(i) = 4.0 * a * s * s;
            r1_(i) = r1;
            q_(i) = 0.75 * (r2 / r1) * (r2 / r1) - 0.5 * r3 / r1;
        }
    }
}

void RadialGrid::laplacian(int l, Eigen::VectorXd& diag, Eigen::VectorXd& off) const
{
    const Eigen::Index n = size();
    const double inv = 1.0 / (dx_ * dx_);
    const double ll = static_cast<double>(l) * (l + 1);
    diag.resize(n);
    off.resize(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        diag(i) = (2.0 * inv + q_(i)) / (r1_(i) * r1_(i)) + ll / (r_(i) * r_(i));
        if (i + 1 < n) {
            off(i) = -inv / (r1_(i) * r1_(i + 1));
        }
    }
}

ChannelOperator::ChannelOperator(int l, const RadialGrid& grid, Eigen::VectorXd potential, double h,
                                 int spin_factor)
    : l_(l), grid_(&grid), v_(std::move(potential)), h_(h), spin_(spin_factor)
{
    if (l < 0) {
        throw ValidationError("radial channel: angular momentum must be nonnegative");
    }
    if (!(h > 0.0)) {
        throw ValidationError("radial channel: h must be positive");
    }
    if (spin_factor != 1 && spin_factor != 2) {
        throw ValidationError("radial channel: spin factor must be 1 or 2");
    }
    if (v_.size() != grid.size()) {
        throw ValidationError("radial channel: potential length differs from grid size");
    }
    grid.laplacian(l, kd_, ko_);
    kd_ *= h * h;
    ko_ *= h * h;
}

Eigen::MatrixXd ChannelOperator::kinetic_dense() const
{
    const Eigen::Index n = kd_.size();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    k.diagonal() = kd_;
    k.diagonal(1) = ko_;
    k.diagonal(-1) = ko_;
    return k;
}

Eigen::MatrixXd ChannelOperator::hamiltonian(double beta) const
{
    Eigen::MatrixXd hm;
    if (beta == 0.0) {
        hm = 0.5 * kinetic_dense();
    } else {
        hm = spectral::rel_transform_tridiagonal(kd_, ko_, beta);
    }
    hm.diagonal() += v_;
    return hm;
}

ChannelOperator build_radial_channel(int l, const RadialGrid& grid,
                                     const std::function<double(double)>& potential, double h,
                                     int spin_factor)
{
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        v(i) = potential(grid.r()(i));
        if (!std::isfinite(v(i))) {
            throw ValidationError("radial channel: potential is not finite at r = " +
                                  std::to_string(grid.r()(i)));
        }
    }
    return ChannelOperator(l, grid, std::move(v), h, spin_factor);
}

} // namespace relscott::radial
