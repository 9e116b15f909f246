#include "relscott/cover.hpp"

#include "relscott/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace relscott::cover {

namespace {

using std::numbers::pi;

constexpr double length_factor = 0.01;

double nearest_distance(const std::vector<Vec3>& nuclei, const Vec3& u)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& n : nuclei) {
        d = std::min(d, distance(u, n));
    }
    return d;
}

// distance from x to the cube centred at c
double cube_distance(const Vec3& x, const Vec3& c, double half)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double t = std::max(std::abs(x[i] - c[i]) - half, 0.0);
        s += t * t;
    }
    return std::sqrt(s);
}

double farthest_corner(const Vec3& x, const Vec3& c, double half)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double t = std::abs(x[i] - c[i]) + half;
        s += t * t;
    }
    return std::sqrt(s);
}

} // namespace

LengthScale multiscale_length(double r, std::vector<Vec3> nuclei)
{
    if (!(r > 0.0) || nuclei.empty()) {
        throw ValidationError("multiscale_length: require r > 0 and at least one nucleus");
    }
    LengthScale ls;
    ls.lipschitz = length_factor;
    ls.value = [r, nuclei](const Vec3& u) {
        const double d = nearest_distance(nuclei, u);
        return length_factor * std::sqrt(r * r + d * d);
    };
    ls.gradient = [r, nuclei](const Vec3& u) {
        std::size_t k = 0;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nuclei.size(); ++i) {
            const double di = distance(u, nuclei[i]);
            if (di < d) {
                d = di;
                k = i;
            }
        }
        const double s = length_factor / std::sqrt(r * r + d * d);
        return Vec3{s * (u[0] - nuclei[k][0]), s * (u[1] - nuclei[k][1]), s * (u[2] - nuclei[k][2])};
    };
    return ls;
}

LengthScale constant_length(double c)
{
    if (!(c > 0.0)) {
        throw ValidationError("constant_length: length must be positive");
    }
    LengthScale ls;
    ls.value = [c](const Vec3&) { return c; };
    ls.gradient = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
    return ls;
}

double size_scale(double ell)
{
    if (!(ell > 0.0)) {
        throw ValidationError("size_scale: length must be positive");
    }
    return std::min(1.0 / std::sqrt(ell), 1.0 / (ell * ell));
}

bool Region::contains(const Vec3& u) const
{
    return norm(u) <= 2.0 * R && nearest(u) >= r / 3.0;
}

double Region::nearest(const Vec3& u) const { return nearest_distance(nuclei, u); }

MultiscaleCover::MultiscaleCover(Region region) : region_(std::move(region))
{
    if (!(region_.r > 0.0) || !(region_.R > 0.0) || region_.nuclei.empty()) {
        throw ValidationError("cover: require r > 0, R > 0 and at least one nucleus");
    }
    if (!(0.5 * region_.r < region_.R)) {
        throw ValidationError("cover: require r/2 < R");
    }
    nuclei_ = region_.nuclei;
}

double MultiscaleCover::length(const Vec3& u) const
{
    const double d = nearest_distance(nuclei_, u);
    return length_factor * std::sqrt(region_.r * region_.r + d * d);
}

bool MultiscaleCover::meets_region(const Vec3& c, double half) const
{
    if (cube_distance(Vec3{0.0, 0.0, 0.0}, c, half) > 2.0 * region_.R) {
        return false;
    }
    // the cube lies inside one exclusion ball
    for (const auto& n : nuclei_) {
        if (farthest_corner(n, c, half) < region_.r / 3.0) {
            return false;
        }
    }
    return true;
}

template <typename Visit>
void MultiscaleCover::walk(const Vec3& c, double half, Visit&& visit) const
{
    if (!meets_region(c, half) || !visit.enter(c, half)) {
        return;
    }
    const double ell = length(c);
    if (half * std::sqrt(3.0) <= ell) {
        visit.leaf(CoverElement{c, ell, size_scale(ell)});
        return;
    }
    const double q = 0.5 * half;
    for (int i = 0; i < 8; ++i) {
        const Vec3 child{c[0] + ((i & 1) ? q : -q), c[1] + ((i & 2) ? q : -q), c[2] + ((i & 4) ? q : -q)};
        walk(child, q, visit);
    }
}

namespace {

template <typename F>
struct LeafVisitor {
    F f;
    bool enter(const Vec3&, double) const { return true; }
    void leaf(const CoverElement& e) { f(e); }
};

} // namespace

std::uint64_t MultiscaleCover::count() const
{
    std::uint64_t n = 0;
    auto inc = [&n](const CoverElement&) { ++n; };
    LeafVisitor<decltype(inc)> v{inc};
    walk(Vec3{0.0, 0.0, 0.0}, 2.0 * region_.R, v);
    return n;
}

void MultiscaleCover::for_each(const std::function<void(const CoverElement&)>& f) const
{
    LeafVisitor<const std::function<void(const CoverElement&)>&> v{f};
    walk(Vec3{0.0, 0.0, 0.0}, 2.0 * region_.R, v);
}

int MultiscaleCover::multiplicity(const Vec3& x) const
{
    struct Query {
        const MultiscaleCover* self;
        Vec3 x;
        int hits = 0;
        // leaf radii inside a cube are at most ℓ(c) + Lip·(half-diagonal)
        bool enter(const Vec3& c, double half) const
        {
            const double reach = self->length(c) + length_factor * std::sqrt(3.0) * half;
            return cube_distance(x, c, half) <= reach;
        }
        void leaf(const CoverElement& e)
        {
            if (distance(x, e.center) <= e.radius) {
                ++hits;
            }
        }
    } q{this, x};
    walk(Vec3{0.0, 0.0, 0.0}, 2.0 * region_.R, q);
    return q.hits;
}

std::vector<Vec3> sample_region(const Region& region, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), u01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, region.nuclei.size() - 1);
    std::vector<Vec3> out;
    out.reserve(count);
    while (out.size() < count) {
        Vec3 p;
        if (out.size() % 2 == 0) {
            // uniform in the cube [−2R, 2R]³
            p = {2.0 * region.R * unit(rng), 2.0 * region.R * unit(rng), 2.0 * region.R * unit(rng)};
        } else {
            // log-uniform distance around a nucleus, uniform direction
            const auto& n = region.nuclei[pick(rng)];
            const double lo = std::log(region.r / 3.0), hi = std::log(4.0 * region.R);
            const double d = std::exp(lo + (hi - lo) * u01(rng));
            const double z = unit(rng), phi = 2.0 * pi * u01(rng), s = std::sqrt(1.0 - z * z);
            p = {n[0] + d * s * std::cos(phi), n[1] + d * s * std::sin(phi), n[2] + d * z};
        }
        if (region.contains(p)) {
            out.push_back(p);
        }
    }
    return out;
}

CoverageReport coverage_audit(const MultiscaleCover& cover, std::size_t samples, std::uint64_t seed)
{
    CoverageReport rep;
    rep.samples = samples;
    rep.min_multiplicity = std::numeric_limits<int>::max();
    double sum = 0.0;
    for (const auto& x : sample_region(cover.region(), samples, seed)) {
        const int m = cover.multiplicity(x);
        rep.min_multiplicity = std::min(rep.min_multiplicity, m);
        rep.max_multiplicity = std::max(rep.max_multiplicity, m);
        sum += m;
        if (m == 0 && !rep.uncovered) {
            rep.uncovered = x;
        }
    }
    if (samples == 0) {
        rep.min_multiplicity = 0;
    }
    rep.mean_multiplicity = samples ? sum / static_cast<double>(samples) : 0.0;
    return rep;
}

SizeEnvelopeReport size_envelope(const tf::TfSolution& sol, const NuclearConfig& config, const Region& region,
                                 std::size_t centers, std::size_t points_per_ball, std::uint64_t seed)
{
    const auto length = multiscale_length(region.r, region.nuclei);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SizeEnvelopeReport rep;
    for (const auto& u : sample_region(region, centers, seed)) {
        const double ell = length.value(u);
        const double f = size_scale(ell);
        for (std::size_t k = 0; k <= points_per_ball; ++k) {
            Vec3 x = u;
            if (k > 0) {
                Vec3 y;
                do {
                    y = {unit(rng), unit(rng), unit(rng)};
                } while (norm(y) > 1.0);
                x = {u[0] + ell * y[0], u[1] + ell * y[1], u[2] + ell * y[2]};
            }
            if (config.nearest_distance(x) == 0.0) {
                continue;
            }
            const double c = tf::config_potential(sol, config, x) / (f * f);
            ++rep.samples;
            if (c > rep.constant) {
                rep.constant = c;
                rep.worst_center = u;
            }
        }
    }
    return rep;
}

double bump_normalization(CutoffProfile profile)
{
    auto g = [profile](double s) {
        const double p = cutoff_value(profile, s);
        return 4.0 * pi * s * s * p * p;
    };
    using boost::math::quadrature::gauss_kronrod;
    const double v = gauss_kronrod<double, 61>::integrate(g, 0.0, 0.5, 15, 1e-14) +
                     gauss_kronrod<double, 61>::integrate(g, 0.5, 1.0, 15, 1e-14);
    return 1.0 / std::sqrt(v);
}

PartitionReport partition_check(CutoffProfile profile, const LengthScale& length, const std::vector<Vec3>& points,
                                int subdivisions)
{
    if (subdivisions < 1) {
        throw ValidationError("partition_check: subdivisions must be positive");
    }
    if (!(length.lipschitz < 1.0)) {
        throw ValidationError("partition_check: length scale must have Lipschitz constant below 1");
    }
    // 8-point Gauss-Legendre rule on [−1, 1]
    using rule = boost::math::quadrature::gauss<double, 8>;
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
        nodes.push_back(rule::abscissa()[i]);
        weights.push_back(rule::weights()[i]);
        nodes.push_back(-rule::abscissa()[i]);
        weights.push_back(rule::weights()[i]);
    }
    const double norm2 = std::pow(bump_normalization(profile), 2);

    PartitionReport rep;
    rep.points = points.size();
    rep.subdivisions = subdivisions;
    double sum = 0.0;
    for (const auto& x : points) {
        const double half = length.value(x) / (1.0 - length.lipschitz);
        const double cell = 2.0 * half / subdivisions;
        const double jac = std::pow(0.5 * cell, 3);
        double total = 0.0;
        for (int a = 0; a < subdivisions; ++a) {
            for (int b = 0; b < subdivisions; ++b) {
                for (int c = 0; c < subdivisions; ++c) {
                    const Vec3 lo{x[0] - half + a * cell, x[1] - half + b * cell, x[2] - half + c * cell};
                    for (std::size_t i = 0; i < nodes.size(); ++i) {
                        for (std::size_t j = 0; j < nodes.size(); ++j) {
                            for (std::size_t k = 0; k < nodes.size(); ++k) {
                                const Vec3 u{lo[0] + 0.5 * cell * (nodes[i] + 1.0),
                                             lo[1] + 0.5 * cell * (nodes[j] + 1.0),
                                             lo[2] + 0.5 * cell * (nodes[k] + 1.0)};
                                const double ell = length.value(u);
                                const Vec3 y{(x[0] - u[0]) / ell, (x[1] - u[1]) / ell, (x[2] - u[2]) / ell};
                                const double p = cutoff_value(profile, norm(y));
                                if (p == 0.0) {
                                    continue;
                                }
                                const Vec3 g = length.gradient(u);
                                const double stretch = 1.0 + y[0] * g[0] + y[1] * g[1] + y[2] * g[2];
                                total += weights[i] * weights[j] * weights[k] * norm2 * p * p * stretch /
                                         (ell * ell * ell);
                            }
                        }
                    }
                }
            }
        }
        const double dev = std::abs(total * jac - 1.0);
        sum += dev;
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst = x;
        }
    }
    rep.mean_deviation = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
    return rep;
}

} // namespace relscott::cover
