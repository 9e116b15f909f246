#include "relscott/fields.hpp"

#include "relscott/error.hpp"
#include "relscott/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace relscott::fields {

namespace {

// Value and gradient of the scalar g with F = g·d.
struct Profile {
    double value;
    Vec3 grad;
};

Profile evaluate(Family family, const FamilyParams& p, const Vec3& x)
{
    const Vec3 y{x[0] - p.center[0], x[1] - p.center[1], x[2] - p.center[2]};
    const double rho2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    const double w = p.width;
    switch (family) {
    case Family::zero:
        return {0.0, {0.0, 0.0, 0.0}};
    case Family::gaussian: {
        const double g = p.amplitude * std::exp(-rho2 / (2.0 * w * w));
        const double c = -g / (w * w);
        return {g, {c * y[0], c * y[1], c * y[2]}};
    }
    case Family::polynomial: {
        const double t = 1.0 - rho2 / (w * w);
        if (t <= 0.0) {
            return {0.0, {0.0, 0.0, 0.0}};
        }
        const double g = p.amplitude * t * t * t * t;
        const double c = p.amplitude * 4.0 * t * t * t * (-2.0 / (w * w));
        return {g, {c * y[0], c * y[1], c * y[2]}};
    }
    case Family::uniform: {
        const double rho = std::sqrt(rho2);
        const double t = rho / w;
        const double chi = smooth_step(2.0 * t - 1.0);
        if (chi == 0.0) {
            return {0.0, {0.0, 0.0, 0.0}};
        }
        const double q = -0.25 * p.amplitude * (y[0] * y[0] + y[1] * y[1]);
        Vec3 grad{chi * (-0.5 * p.amplitude * y[0]), chi * (-0.5 * p.amplitude * y[1]), 0.0};
        if (rho > 0.0) {
            const double dchi = smooth_step_derivative(2.0 * t - 1.0) * 2.0 / w;
            for (int c = 0; c < 3; ++c) {
                grad[c] += dchi * y[c] / rho * q;
            }
        }
        return {chi * q, grad};
    }
    }
    return {0.0, {0.0, 0.0, 0.0}};
}

double support_radius(Family family, const FamilyParams& p)
{
    switch (family) {
    case Family::zero:
        return 0.0;
    case Family::gaussian:
        return 8.0 * p.width;
    case Family::polynomial:
    case Family::uniform:
        return p.width;
    }
    return 0.0;
}

Vec3 direction_of(Family family, const FamilyParams& p)
{
    if (family == Family::uniform) {
        return {0.0, 0.0, 1.0};
    }
    const double nd = norm(p.direction);
    if (!(nd > 0.0)) {
        throw ValidationError("field family: direction must be nonzero");
    }
    return {p.direction[0] / nd, p.direction[1] / nd, p.direction[2] / nd};
}

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <typename T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) {
        throw ValidationError("vector field: truncated binary record");
    }
    return v;
}

} // namespace

Grid3 centered_grid(int n, double spacing)
{
    const double half = 0.5 * spacing * (n - 1);
    return Grid3{n, spacing, {-half, -half, -half}};
}

Family parse_family(const std::string& name)
{
    if (name == "zero") return Family::zero;
    if (name == "gaussian") return Family::gaussian;
    if (name == "polynomial") return Family::polynomial;
    if (name == "uniform") return Family::uniform;
    throw ValidationError("unknown field family '" + name + "'");
}

std::string family_name(Family f)
{
    switch (f) {
    case Family::zero: return "zero";
    case Family::gaussian: return "gaussian";
    case Family::polynomial: return "polynomial";
    case Family::uniform: return "uniform";
    }
    return "zero";
}

VectorField::VectorField(Grid3 grid, std::array<std::vector<double>, 3> a)
    : grid_(grid), a_(std::move(a))
{
    if (grid_.n < 3 || !(grid_.spacing > 0.0)) {
        throw ValidationError("vector field: grid needs n >= 3 and positive spacing");
    }
    for (const auto& c : a_) {
        if (c.size() != grid_.points()) {
            throw ValidationError("vector field: component length differs from grid size");
        }
    }
}

double VectorField::derivative(int c, int d, int i, int j, int k) const
{
    const int n = grid_.n;
    int ip[3] = {i, j, k}, im[3] = {i, j, k};
    ip[d] += 1;
    im[d] -= 1;
    auto sample = [&](const int* idx) {
        for (int e = 0; e < 3; ++e) {
            if (idx[e] < 0 || idx[e] >= n) {
                return 0.0;
            }
        }
        return a_[c][grid_.index(idx[0], idx[1], idx[2])];
    };
    return (sample(ip) - sample(im)) / (2.0 * grid_.spacing);
}

std::array<std::vector<double>, 3> VectorField::curl() const
{
    const int n = grid_.n;
    std::array<std::vector<double>, 3> b;
    for (auto& c : b) {
        c.assign(grid_.points(), 0.0);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const std::size_t idx = grid_.index(i, j, k);
                b[0][idx] = derivative(2, 1, i, j, k) - derivative(1, 2, i, j, k);
                b[1][idx] = derivative(0, 2, i, j, k) - derivative(2, 0, i, j, k);
                b[2][idx] = derivative(1, 0, i, j, k) - derivative(0, 1, i, j, k);
            }
        }
    }
    return b;
}

std::vector<double> VectorField::divergence() const
{
    const int n = grid_.n;
    std::vector<double> out(grid_.points(), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                out[grid_.index(i, j, k)] =
                    derivative(0, 0, i, j, k) + derivative(1, 1, i, j, k) + derivative(2, 2, i, j, k);
            }
        }
    }
    return out;
}

double VectorField::curl_energy() const
{
    const auto b = curl();
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.points(); ++i) {
        s += b[0][i] * b[0][i] + b[1][i] * b[1][i] + b[2][i] * b[2][i];
    }
    return s * grid_.cell_volume();
}

double VectorField::gradient_energy() const
{
    const int n = grid_.n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int c = 0; c < 3; ++c) {
                    for (int d = 0; d < 3; ++d) {
                        const double v = derivative(c, d, i, j, k);
                        s += v * v;
                    }
                }
            }
        }
    }
    return s * grid_.cell_volume();
}

double VectorField::l6_integral() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.points(); ++i) {
        const double a2 = a_[0][i] * a_[0][i] + a_[1][i] * a_[1][i] + a_[2][i] * a_[2][i];
        s += a2 * a2 * a2;
    }
    return s * grid_.cell_volume();
}

double VectorField::max_abs_curl() const
{
    const auto b = curl();
    double m = 0.0;
    for (std::size_t i = 0; i < grid_.points(); ++i) {
        m = std::max(m, std::sqrt(b[0][i] * b[0][i] + b[1][i] * b[1][i] + b[2][i] * b[2][i]));
    }
    return m;
}

VectorField VectorField::scaled(double factor) const
{
    auto a = a_;
    for (auto& c : a) {
        for (auto& v : c) {
            v *= factor;
        }
    }
    return VectorField(grid_, std::move(a));
}

VectorField VectorField::shifted(const Vec3& c) const
{
    auto a = a_;
    for (int d = 0; d < 3; ++d) {
        for (auto& v : a[d]) {
            v += c[d];
        }
    }
    return VectorField(grid_, std::move(a));
}

VectorField VectorField::plus_gradient(const std::vector<double>& chi) const
{
    if (chi.size() != grid_.points()) {
        throw ValidationError("vector field: gauge function length differs from grid size");
    }
    const VectorField g(grid_, {chi, chi, chi});
    auto a = a_;
    const int n = grid_.n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const std::size_t idx = grid_.index(i, j, k);
                for (int d = 0; d < 3; ++d) {
                    a[d][idx] += g.derivative(d, d, i, j, k);
                }
            }
        }
    }
    return VectorField(grid_, std::move(a));
}

void VectorField::write_binary(std::ostream& os) const
{
    os.write("RSVF", 4);
    put<std::uint32_t>(os, 1);
    put<std::int32_t>(os, grid_.n);
    put<double>(os, grid_.spacing);
    for (double o : grid_.origin) {
        put<double>(os, o);
    }
    os.write("xyz\0", 4);
    for (const auto& c : a_) {
        os.write(reinterpret_cast<const char*>(c.data()),
                 static_cast<std::streamsize>(c.size() * sizeof(double)));
    }
}

VectorField VectorField::read_binary(std::istream& is)
{
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RSVF", 4) != 0) {
        throw ValidationError("vector field: bad magic");
    }
    const auto version = get<std::uint32_t>(is);
    if (version != 1) {
        throw ValidationError("vector field: unsupported version " + std::to_string(version));
    }
    Grid3 g;
    g.n = get<std::int32_t>(is);
    g.spacing = get<double>(is);
    for (double& o : g.origin) {
        o = get<double>(is);
    }
    char order[4];
    is.read(order, 4);
    if (!is || std::memcmp(order, "xyz", 3) != 0) {
        throw ValidationError("vector field: unsupported component order");
    }
    if (g.n < 3 || g.n > 4096) {
        throw ValidationError("vector field: implausible grid size");
    }
    std::array<std::vector<double>, 3> a;
    for (auto& c : a) {
        c.resize(g.points());
        is.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
        if (!is) {
            throw ValidationError("vector field: truncated payload");
        }
    }
    return VectorField(g, std::move(a));
}

VectorField make_divfree_field(Family family, const FamilyParams& params, const Grid3& grid,
                               Construction construction)
{
    if (grid.n < 5 || !(grid.spacing > 0.0)) {
        throw ValidationError("make_divfree_field: grid needs n >= 5 and positive spacing");
    }
    if (family != Family::zero && !(params.width > 0.0)) {
        throw ValidationError("make_divfree_field: width must be positive");
    }
    const double support = support_radius(family, params);
    for (int d = 0; d < 3 && family != Family::zero; ++d) {
        const double lo = grid.origin[d] + 2.0 * grid.spacing;
        const double hi = grid.origin[d] + (grid.n - 3) * grid.spacing;
        if (params.center[d] - support < lo || params.center[d] + support > hi) {
            throw ValidationError("make_divfree_field: support of the " + family_name(family) +
                                  " family exceeds the grid along axis " + std::to_string(d));
        }
    }
    const Vec3 dir = direction_of(family, params);
    const int n = grid.n;
    std::array<std::vector<double>, 3> a;
    for (auto& c : a) {
        c.assign(grid.points(), 0.0);
    }
    if (family == Family::zero) {
        return VectorField(grid, std::move(a));
    }
    if (construction == Construction::analytic) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const auto pr = evaluate(family, params, grid.node(i, j, k));
                    const Vec3 v = cross(pr.grad, dir);
                    const std::size_t idx = grid.index(i, j, k);
                    for (int c = 0; c < 3; ++c) {
                        a[c][idx] = v[c];
                    }
                }
            }
        }
        return VectorField(grid, std::move(a));
    }
    // sample F = g·d, then take the centred-difference curl
    std::array<std::vector<double>, 3> f;
    for (auto& c : f) {
        c.assign(grid.points(), 0.0);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double g = evaluate(family, params, grid.node(i, j, k)).value;
                const std::size_t idx = grid.index(i, j, k);
                for (int c = 0; c < 3; ++c) {
                    f[c][idx] = g * dir[c];
                }
            }
        }
    }
    const VectorField pot(grid, std::move(f));
    const auto curl = pot.curl();
    return VectorField(grid, curl);
}

AdmissibilityReport check_admissible(const VectorField& a)
{
    AdmissibilityReport rep;
    const auto div = a.divergence();
    for (double v : div) {
        rep.max_divergence = std::max(rep.max_divergence, std::abs(v));
    }
    rep.gradient_energy = a.gradient_energy();
    rep.curl_energy = a.curl_energy();
    rep.equality_defect = std::abs(rep.gradient_energy - rep.curl_energy);
    rep.sobolev_ratio = rep.gradient_energy > 0.0 ? std::cbrt(a.l6_integral()) / rep.gradient_energy : 0.0;
    return rep;
}

FieldEnergy field_energy(const VectorField& a, double alpha)
{
    if (!(alpha > 0.0)) {
        throw ValidationError("field_energy: alpha must be positive for the scaled energy");
    }
    FieldEnergy e;
    e.raw = a.curl_energy();
    e.scaled = e.raw / (8.0 * std::numbers::pi * alpha * alpha);
    return e;
}

} // namespace relscott::fields
