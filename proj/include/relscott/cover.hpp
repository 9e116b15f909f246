#pragma once

#include "relscott/config.hpp"
#include "relscott/profile.hpp"
#include "relscott/tf.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace relscott::cover {

/// Local length scale ℓ and its gradient.
struct LengthScale {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    double lipschitz = 0.0; // bound on |∇ℓ|
};

/// ℓ(u) = (1/100)√(r² + d(u)²) with d the distance to the nearest nucleus.
LengthScale multiscale_length(double r, std::vector<Vec3> nuclei);
/// ℓ ≡ c.
LengthScale constant_length(double c);

/// f = min(ℓ^{-1/2}, ℓ^{-2}).
double size_scale(double ell);

struct Region {
    double r = 0.1;   // inner exclusion radius is r/3 around each nucleus
    double R = 10.0;  // outer radius is 2R around the origin
    std::vector<Vec3> nuclei{Vec3{0.0, 0.0, 0.0}};

    bool contains(const Vec3& u) const;
    double nearest(const Vec3& u) const;
};

struct CoverElement {
    Vec3 center{};
    double radius = 0.0; // ℓ(center)
    double size = 0.0;   // f(center)
};

/// Balls B(u, ℓ(u)) at the centers of an implicit octree over the cube
/// [−2R, 2R]³: a cube is split while its half-diagonal exceeds ℓ at its center
/// and it meets the region. The leaves are never stored; they are enumerated
/// or queried by traversal.
class MultiscaleCover {
public:
    /// Rejects r ≤ 0, R ≤ 0, no nuclei, and r/2 ≥ R.
    explicit MultiscaleCover(Region region);
    const Region& region() const { return region_; }
    double length(const Vec3& u) const;

    std::uint64_t count() const;
    void for_each(const std::function<void(const CoverElement&)>& f) const;
    /// Number of balls containing x.
    int multiplicity(const Vec3& x) const;

private:
    Region region_;
    std::vector<Vec3> nuclei_;
    bool meets_region(const Vec3& c, double half) const;
    template <typename Visit>
    void walk(const Vec3& c, double half, Visit&& visit) const;
};

struct CoverageReport {
    std::size_t samples = 0;
    int min_multiplicity = 0;
    int max_multiplicity = 0;
    double mean_multiplicity = 0.0;
    std::optional<Vec3> uncovered; // witness when some sample lies in no ball
    bool pass() const { return !uncovered; }
};

/// Rejection sampling of the region, seeded.
CoverageReport coverage_audit(const MultiscaleCover& cover, std::size_t samples, std::uint64_t seed);

struct SizeEnvelopeReport {
    std::size_t samples = 0;
    double constant = 0.0; // max V(x)/f(u)² over |x − u| ≤ ℓ(u)
    Vec3 worst_center{};
};

/// Measures the constant of V ≤ C f(u)² on the balls of sampled centers u in
/// the region.
SizeEnvelopeReport size_envelope(const tf::TfSolution& sol, const NuclearConfig& config, const Region& region,
                                 std::size_t centers, std::size_t points_per_ball, std::uint64_t seed);

/// θ(y) = c·p(|y|) with ∫θ² = 1 for the cutoff profile p.
double bump_normalization(CutoffProfile profile);

struct PartitionReport {
    std::size_t points = 0;
    int subdivisions = 0;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    Vec3 worst{};
};

/// ∫θ((x−u)/ℓ(u))²·ℓ(u)⁻³(1 + y·∇ℓ(u)) du at each x, with y = (x−u)/ℓ(u),
/// by a composite 8-point Gauss product rule on `subdivisions`³ sub-cubes of
/// the box |u − x|_∞ ≤ ℓ(x)/(1 − Lip ℓ). The exact value is 1.
PartitionReport partition_check(CutoffProfile profile, const LengthScale& length, const std::vector<Vec3>& points,
                                int subdivisions);

/// Uniform samples of the region, seeded.
std::vector<Vec3> sample_region(const Region& region, std::size_t count, std::uint64_t seed);

} // namespace relscott::cover
