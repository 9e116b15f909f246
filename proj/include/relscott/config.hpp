#pragma once

#include <array>
#include <vector>

namespace relscott {

using Vec3 = std::array<double, 3>;

double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

/// Nuclear geometry in Thomas-Fermi units together with the semiclassical
/// parameters derived from the total charge and the fine-structure constant.
///
/// Charges are the normalized z_k = Z_k / Z (they sum to one), positions are
/// the scaled r_k = Z^{1/3} R_k.
class NuclearConfig {
public:
    /// Throws ValidationError when a charge is non-positive, the charges do not
    /// sum to one, or two nuclei are closer than `min_separation`.
    NuclearConfig(std::vector<double> charges, std::vector<Vec3> positions, double total_charge,
                  double alpha, double min_separation = 0.0);

    /// Single nucleus at the origin.
    static NuclearConfig atom(double total_charge, double alpha);

    const std::vector<double>& charges() const { return charges_; }
    const std::vector<Vec3>& positions() const { return positions_; }
    std::size_t size() const { return charges_.size(); }
    double total_charge() const { return total_charge_; }
    double alpha() const { return alpha_; }
    double min_separation() const { return min_separation_; }

    /// κ = min_k 2/(π z_k)
    double kappa() const;
    /// h = κ^{1/2} Z^{-1/3}
    double h() const;
    /// β = Z^{2/3} α κ^{-1/2}
    double beta() const;

    /// max_k Z_k α
    double max_coupling() const;

    /// Distance to the nearest nucleus.
    double nearest_distance(const Vec3& x) const;

private:
    std::vector<double> charges_;
    std::vector<Vec3> positions_;
    double total_charge_;
    double alpha_;
    double min_separation_;
};

} // namespace relscott
