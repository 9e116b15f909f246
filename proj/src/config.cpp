#include "relscott/config.hpp"

#include "relscott/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace relscott {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double distance(const Vec3& a, const Vec3& b)
{
    return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

NuclearConfig::NuclearConfig(std::vector<double> charges, std::vector<Vec3> positions,
                             double total_charge, double alpha, double min_separation)
    : charges_(std::move(charges)),
      positions_(std::move(positions)),
      total_charge_(total_charge),
      alpha_(alpha),
      min_separation_(min_separation)
{
    if (charges_.empty()) {
        throw ValidationError("nuclear config: no nuclei");
    }
    if (charges_.size() != positions_.size()) {
        throw ValidationError("nuclear config: charges and positions differ in length");
    }
    if (std::any_of(charges_.begin(), charges_.end(), [](double z) { return !(z > 0.0); })) {
        throw ValidationError("nuclear config: every normalized charge z_k must be positive");
    }
    const double sum = std::accumulate(charges_.begin(), charges_.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("nuclear config: normalized charges must sum to 1 (got " +
                              std::to_string(sum) + ")");
    }
    if (!(total_charge_ > 0.0)) {
        throw ValidationError("nuclear config: total charge Z must be positive");
    }
    if (alpha_ < 0.0) {
        throw ValidationError("nuclear config: alpha must be nonnegative");
    }
    for (std::size_t k = 0; k < positions_.size(); ++k) {
        for (std::size_t l = k + 1; l < positions_.size(); ++l) {
            const double d = distance(positions_[k], positions_[l]);
            if (!(d > min_separation_) || d == 0.0) {
                throw ValidationError("nuclear config: nuclei " + std::to_string(k) + " and " +
                                      std::to_string(l) + " are closer than the minimal separation");
            }
        }
    }
}

NuclearConfig NuclearConfig::atom(double total_charge, double alpha)
{
    return NuclearConfig({1.0}, {Vec3{0.0, 0.0, 0.0}}, total_charge, alpha);
}

double NuclearConfig::kappa() const
{
    const double zmax = *std::max_element(charges_.begin(), charges_.end());
    return 2.0 / (std::numbers::pi * zmax);
}

double NuclearConfig::h() const { return std::sqrt(kappa()) * std::cbrt(1.0 / total_charge_); }

double NuclearConfig::beta() const
{
    return std::pow(total_charge_, 2.0 / 3.0) * alpha_ / std::sqrt(kappa());
}

double NuclearConfig::max_coupling() const
{
    const double zmax = *std::max_element(charges_.begin(), charges_.end());
    return zmax * total_charge_ * alpha_;
}

double NuclearConfig::nearest_distance(const Vec3& x) const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : positions_) {
        best = std::min(best, distance(x, p));
    }
    return best;
}

} // namespace relscott
