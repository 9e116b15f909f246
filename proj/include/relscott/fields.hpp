#pragma once

#include "relscott/config.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace relscott::fields {

/// Cubic node lattice origin + spacing·(i, j, k), 0 ≤ i, j, k < n.
struct Grid3 {
    int n = 0;
    double spacing = 0.0;
    Vec3 origin{0.0, 0.0, 0.0};

    std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
    Vec3 node(int i, int j, int k) const
    {
        return {origin[0] + spacing * i, origin[1] + spacing * j, origin[2] + spacing * k};
    }
    double cell_volume() const { return spacing * spacing * spacing; }
    bool operator==(const Grid3& o) const
    {
        return n == o.n && spacing == o.spacing && origin == o.origin;
    }
};

/// Grid of n nodes per axis centred on the origin.
Grid3 centered_grid(int n, double spacing);

/// A is the curl of a compactly supported potential F = amplitude·profile·direction.
///   gaussian:   profile exp(−|x−c|²/(2w²)), support taken as |x−c| ≤ 8w
///   polynomial: profile (1 − |x−c|²/w²)_+⁴
///   uniform:    F = χ(|x−c|/w)·(−b0/4)((x−c)_x² + (x−c)_y²) e_z, which is a constant field
///               b0 e_z on |x−c| ≤ w/2, smoothly switched off by |x−c| = w
///   zero:       A ≡ 0
enum class Family { zero, gaussian, polynomial, uniform };

Family parse_family(const std::string& name);
std::string family_name(Family f);

struct FamilyParams {
    double amplitude = 1.0; // also b0 for the uniform family
    double width = 1.0;
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 direction{0.0, 0.0, 1.0};
};

/// discrete_curl: A = centred-difference curl of sampled F, so its discrete
/// divergence vanishes identically. analytic: A = curl F sampled pointwise.
enum class Construction { discrete_curl, analytic };

class VectorField {
public:
    VectorField() = default;
    VectorField(Grid3 grid, std::array<std::vector<double>, 3> a);

    const Grid3& grid() const { return grid_; }
    const std::vector<double>& component(int c) const { return a_[c]; }
    Vec3 at(std::size_t idx) const { return {a_[0][idx], a_[1][idx], a_[2][idx]}; }

    /// Centred-difference derivative ∂_d of component c; zero outside the grid.
    double derivative(int c, int d, int i, int j, int k) const;

    /// B = ∇×A at the nodes (centred differences).
    std::array<std::vector<double>, 3> curl() const;
    /// Discrete divergence at the nodes.
    std::vector<double> divergence() const;

    /// Σ|∇×A|² ΔV, Σ|∇⊗A|² ΔV, Σ|A|⁶ ΔV.
    double curl_energy() const;
    double gradient_energy() const;
    double l6_integral() const;
    double max_abs_curl() const;

    VectorField scaled(double factor) const;
    /// A + c for a constant vector c.
    VectorField shifted(const Vec3& c) const;
    /// A + ∇χ with ∇ the centred difference of the sampled χ.
    VectorField plus_gradient(const std::vector<double>& chi) const;

    /// Binary record: magic "RSVF", u32 version, i32 n, f64 spacing, f64×3 origin,
    /// 4-byte component order "xyz\0", then the x, y, z components as
    /// little-endian f64 in row-major (i slowest) order.
    void write_binary(std::ostream& os) const;
    static VectorField read_binary(std::istream& is);

private:
    Grid3 grid_;
    std::array<std::vector<double>, 3> a_;
};

/// Throws ValidationError when the family's support does not fit inside the
/// grid with a two-node margin.
VectorField make_divfree_field(Family family, const FamilyParams& params, const Grid3& grid,
                               Construction construction = Construction::discrete_curl);

struct AdmissibilityReport {
    double max_divergence = 0.0;
    double sobolev_ratio = 0.0;     // (∫|A|⁶)^{1/3} / ∫|∇⊗A|², 0 for A ≡ 0
    double equality_defect = 0.0;   // |∫|∇⊗A|² − ∫|∇×A|²|
    double gradient_energy = 0.0;
    double curl_energy = 0.0;
};

AdmissibilityReport check_admissible(const VectorField& a);

struct FieldEnergy {
    double raw = 0.0;    // ∫|∇×A|²
    double scaled = 0.0; // raw / (8πα²)
};

/// Rejects α ≤ 0.
FieldEnergy field_energy(const VectorField& a, double alpha);

} // namespace relscott::fields
