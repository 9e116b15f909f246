#include <doctest.h>

#include "relscott/error.hpp"
#include "relscott/phase_space.hpp"
#include "relscott/profile.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace relscott;
using boost::math::quadrature::gauss_kronrod;
using std::numbers::pi;

TEST_CASE("momentum constant agrees with direct quadrature")
{
    // −∫[½p² − 1]_− d³p over the ball |p| ≤ √2
    auto f = [](double p) { return -4.0 * pi * p * p * (0.5 * p * p - 1.0); };
    const double direct = gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(2.0), 5, 1e-15);
    CHECK(std::abs(direct - phase_space::momentum_constant()) < 1e-10);
    CHECK(std::abs(phase_space::momentum_constant() - 16.0 * std::sqrt(2.0) * pi / 15.0) < 1e-14);
    CHECK(phase_space::momentum_integral(2.0) ==
          doctest::Approx(-phase_space::momentum_constant() * std::pow(2.0, 2.5)).epsilon(1e-14));
    CHECK(phase_space::momentum_integral(-1.0) == 0.0);
}

TEST_CASE("kinetic symbol limits")
{
    CHECK(phase_space::kinetic_symbol(3.0, 0.0) == doctest::Approx(4.5));
    // large momentum grows like |p|/β
    CHECK(phase_space::kinetic_symbol(1e6, 0.5) == doctest::Approx(2e6).epsilon(1e-5));
    // the relativistic symbol is below the nonrelativistic one
    for (double p : {0.1, 1.0, 10.0}) {
        CHECK(phase_space::kinetic_symbol(p, 0.3) <= phase_space::kinetic_symbol(p, 0.0));
    }
}

TEST_CASE("relativistic momentum integral tends to the nonrelativistic one")
{
    const double v = 1.7;
    const double nr = phase_space::momentum_integral(v);
    CHECK(phase_space::momentum_integral_rel(v, 1e-4) == doctest::Approx(nr).epsilon(1e-6));
    CHECK(phase_space::momentum_integral_rel(v, 0.5) < nr);
    CHECK_THROWS_AS(phase_space::momentum_integral_rel(v, -0.1), ValidationError);
}

TEST_CASE("spatial and radial Weyl integrals agree for a radial potential")
{
    phase_space::RadialSymbolSpec radial;
    radial.potential = [](double r) { return 2.0 * std::exp(-r * r); };
    const auto rv = phase_space::weyl_integral(radial);

    phase_space::SymbolSpec spec;
    spec.potential = [](const Vec3& x) { return 2.0 * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
    phase_space::SpatialQuadrature quad;
    quad.centers = {Vec3{0, 0, 0}};
    const auto sv = phase_space::weyl_integral(spec, quad);
    CHECK(sv.value == doctest::Approx(rv.value).epsilon(1e-7));

    // closed form: −(16√2π/15)·2^{5/2}·(2/(2π)³)·∫e^{−5r²/2}d³x
    const double gauss = std::pow(2.0 * pi / 5.0, 1.5);
    const double exact = -phase_space::momentum_constant() * std::pow(2.0, 2.5) * 2.0 / std::pow(2.0 * pi, 3) * gauss;
    CHECK(rv.value == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("two distant wells give twice the single-well Weyl integral")
{
    phase_space::SymbolSpec spec;
    auto well = [](const Vec3& x, double c) {
        const double d2 = (x[0] - c) * (x[0] - c) + x[1] * x[1] + x[2] * x[2];
        return std::exp(-d2);
    };
    spec.potential = [&](const Vec3& x) { return well(x, -6.0) + well(x, 6.0); };
    phase_space::SpatialQuadrature quad;
    quad.centers = {Vec3{-6, 0, 0}, Vec3{6, 0, 0}};
    const auto two = phase_space::weyl_integral(spec, quad);

    phase_space::RadialSymbolSpec one;
    one.potential = [](double r) { return std::exp(-r * r); };
    CHECK(two.value == doctest::Approx(2.0 * phase_space::weyl_integral(one).value).epsilon(1e-6));
}

TEST_CASE("cutoff Coulomb Weyl term follows the square-root law in closed form")
{
    for (auto profile : {CutoffProfile::smooth, CutoffProfile::cosine}) {
        const double moment = phase_space::cutoff_profile_moment(profile);
        for (double r : {1.0, 8.0, 64.0}) {
            const double expected = -4.0 * pi * phase_space::momentum_constant() * std::sqrt(r) * moment;
            CHECK(phase_space::cutoff_coulomb_weyl(r, 1.0, profile) == doctest::Approx(expected).epsilon(1e-9));
        }
        // κ^{5/2} scaling
        CHECK(phase_space::cutoff_coulomb_weyl(4.0, 2.0, profile) ==
              doctest::Approx(std::pow(2.0, 2.5) * phase_space::cutoff_coulomb_weyl(4.0, 1.0, profile)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(phase_space::cutoff_coulomb_weyl(0.0, 1.0), ValidationError);
}

TEST_CASE("cutoff profiles")
{
    for (auto profile : {CutoffProfile::smooth, CutoffProfile::cosine}) {
        CHECK(cutoff_value(profile, 0.0) == 1.0);
        CHECK(cutoff_value(profile, 0.5) == 1.0);
        CHECK(cutoff_value(profile, 1.0) == 0.0);
        CHECK(cutoff_value(profile, 0.75) > 0.0);
        CHECK(cutoff_value(profile, 0.75) < 1.0);
        CHECK(parse_profile(profile_name(profile)) == profile);
    }
    CHECK_THROWS_AS(parse_profile("box"), ValidationError);
}
