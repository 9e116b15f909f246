#include <doctest.h>

#include "relscott/cover.hpp"
#include "relscott/error.hpp"
#include "relscott/phase_space.hpp"
#include "relscott/scott.hpp"
#include "relscott/tf.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace relscott;
using std::numbers::pi;

TEST_CASE("Coulomb Weyl term scales like the square root of the radius")
{
    const double a = scott::coulomb_weyl_term(4.0, CutoffProfile::smooth);
    const double b = scott::coulomb_weyl_term(16.0, CutoffProfile::smooth);
    CHECK(a < 0.0);
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("extrapolation recovers a synthetic power-law limit")
{
    const std::vector<double> radii{16, 32, 64, 128};
    std::vector<double> values;
    for (double r : radii) {
        values.push_back(0.5 + 3.0 * std::pow(r, -0.7));
    }
    const auto ex = scott::extrapolate(radii, values);
    CHECK(ex.limit == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(ex.exponent == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(ex.error < 1e-10);

    CHECK_THROWS_AS(scott::extrapolate({16, 32, 50}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(scott::extrapolate({16, 32}, {1, 2}), ValidationError);
    // growing increments cannot be extrapolated
    CHECK_THROWS_AS(scott::extrapolate({1, 2, 4}, {0.0, 1.0, 3.0}), ConvergenceError);
}

TEST_CASE("localized Coulomb traces")
{
    const auto nr = scott::localized_coulomb_trace(16.0, 0.0);
    const auto rel = scott::localized_coulomb_trace(16.0, 0.3);
    CHECK(nr.converged);
    CHECK(rel.converged);
    CHECK(nr.trace < 0.0);
    // the relativistic kinetic energy is smaller, so the trace is lower
    CHECK(rel.trace <= nr.trace);
    // Richardson combination of the two step sizes
    CHECK(nr.trace == doctest::Approx((4.0 * nr.fine - nr.coarse) / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(scott::localized_coulomb_trace(16.0, 0.64), ValidationError);
    CHECK_THROWS_AS(scott::localized_coulomb_trace(-1.0, 0.0), ValidationError);
}

TEST_CASE("two-term fit recovers synthetic coefficients")
{
    const std::vector<double> h{0.2, 0.15, 0.1, 0.07, 0.05};
    std::vector<double> v;
    for (double x : h) {
        v.push_back(-0.09 / (x * x * x) + 0.125 / (x * x));
    }
    const auto fit = scott::scott_fit(h, v, -0.09);
    CHECK(fit.c0 == doctest::Approx(-0.09).epsilon(1e-10));
    CHECK(fit.c2 == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(fit.residual_slope == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK_FALSE(fit.ill_conditioned);
    CHECK_THROWS_AS(scott::scott_fit({0.2, 0.1, 0.05, 0.04}, {1, 2, 3, 4}), ValidationError);
    CHECK_THROWS_AS(scott::scott_fit({0.2, 0.19, 0.18, 0.17, 0.16}, {1, 2, 3, 4, 5}), ValidationError);
}

TEST_CASE("semiclassical trace")
{
    const auto sol = tf::solve_tf_atom();
    CHECK_THROWS_AS(scott::semiclassical_trace(sol, 0.1, 0.2, 0.5), ValidationError);
    CHECK_THROWS_AS(scott::semiclassical_trace(sol, 0.2, 0.0, 0.7), ValidationError);
    const auto t = scott::semiclassical_trace(sol, 0.2, 0.0, 0.5);
    CHECK(t.converged);
    const double weyl = scott::weyl_coefficient(sol, 0.5) / (0.2 * 0.2 * 0.2);
    CHECK(t.trace == doctest::Approx(weyl).epsilon(0.3));
    CHECK(t.trace > weyl);
    // Weyl coefficient against the radial Weyl quadrature
    phase_space::RadialSymbolSpec spec;
    spec.potential = [&](double r) { return 0.5 * sol.potential(r); };
    CHECK(scott::weyl_coefficient(sol, 0.5) == doctest::Approx(phase_space::weyl_integral(spec).value).epsilon(1e-8));
}

TEST_CASE("bump normalization against independent quadrature")
{
    for (auto profile : {CutoffProfile::smooth, CutoffProfile::cosine}) {
        const double c = cover::bump_normalization(profile);
        auto f = [&](double s) {
            const double p = cutoff_value(profile, s);
            return 4.0 * pi * s * s * p * p;
        };
        const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
        CHECK(c * c * mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("multiscale cover covers the region with bounded overlap")
{
    cover::Region region;
    region.r = 0.5;
    region.R = 2.0;
    const cover::MultiscaleCover cov(region);
    CHECK(cov.count() > 0);
    const auto audit = cover::coverage_audit(cov, 400, 1);
    CHECK(audit.pass());
    CHECK(audit.min_multiplicity >= 1);
    CHECK(audit.max_multiplicity < 100);

    cover::Region bad;
    bad.r = 0.0;
    CHECK_THROWS_AS(cover::MultiscaleCover{bad}, ValidationError);
}

TEST_CASE("length scale and size scale")
{
    const auto ell = cover::multiscale_length(0.1, {Vec3{0, 0, 0}});
    CHECK(ell.value(Vec3{0, 0, 0}) == doctest::Approx(0.001));
    CHECK(ell.value(Vec3{3, 4, 0}) == doctest::Approx(0.01 * std::sqrt(0.01 + 25.0)));
    CHECK(ell.lipschitz <= 0.01 + 1e-15);
    CHECK(cover::size_scale(4.0) == doctest::Approx(1.0 / 16.0));
    CHECK(cover::size_scale(0.25) == doctest::Approx(2.0));
}

TEST_CASE("partition normalization converges under quadrature refinement")
{
    cover::Region region;
    const auto points = cover::sample_region(region, 20, 9);
    const auto constant = cover::partition_check(CutoffProfile::smooth, cover::constant_length(0.3), points, 8);
    CHECK(constant.max_deviation < 1e-6);

    const auto ell = cover::multiscale_length(region.r, region.nuclei);
    const auto coarse = cover::partition_check(CutoffProfile::smooth, ell, points, 4);
    const auto fine = cover::partition_check(CutoffProfile::smooth, ell, points, 8);
    CHECK(fine.max_deviation < 1e-6);
    CHECK(coarse.max_deviation / fine.max_deviation >= 4.0);
}

TEST_CASE("size envelope constant is finite")
{
    const auto sol = tf::solve_tf_atom();
    cover::Region region;
    region.R = 4.0;
    const auto env = cover::size_envelope(sol, NuclearConfig::atom(1.0, 0.0), region, 40, 4, 2);
    CHECK(env.samples > 0);
    CHECK(std::isfinite(env.constant));
    CHECK(env.constant > 0.0);
}
