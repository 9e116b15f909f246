#include <doctest.h>

#include "relscott/config.hpp"
#include "relscott/error.hpp"
#include "relscott/tf.hpp"

#include <cmath>
#include <numbers>

using namespace relscott;

namespace {

const tf::TfSolution& solution()
{
    static const tf::TfSolution sol = tf::solve_tf_atom();
    return sol;
}

} // namespace

TEST_CASE("screening function initial slope matches the reference value")
{
    // reference slope of the neutral-atom screening function
    CHECK(solution().slope() == doctest::Approx(-1.588071022611375).epsilon(1e-9));
    CHECK(solution().converged());
}

TEST_CASE("collocation and shooting agree on the initial slope")
{
    const auto col = tf::solve_tf_collocation();
    CHECK(std::abs(col.slope - solution().slope()) < 1e-6);
}

TEST_CASE("screening function boundary behaviour")
{
    const auto& sol = solution();
    CHECK(sol.phi(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 1.0;
    for (double x : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const double p = sol.phi(x);
        CHECK(p > 0.0);
        CHECK(p < prev);
        prev = p;
    }
    // far field 144/x³ up to a slowly decaying relative correction
    CHECK(sol.phi(1e6) * 1e18 / 144.0 == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(sol.phi(1e4) * 1e12 / 144.0 < sol.phi(1e6) * 1e18 / 144.0);
    CHECK(std::abs(sol.residual(1.0)) < 1e-5);
}

TEST_CASE("energy scales with Z^{7/3} and agrees across evaluations")
{
    const auto& sol = solution();
    const double e1 = tf::tf_energy(sol, 1.0);
    for (double z : {10.0, 100.0}) {
        CHECK(std::abs(tf::tf_energy(sol, z) / std::pow(z, 7.0 / 3.0) - e1) < 1e-10 * std::abs(e1));
    }
    CHECK(e1 == doctest::Approx(-0.7687451242).epsilon(1e-9));
    CHECK(tf::tf_energy_virial(sol, 1.0) == doctest::Approx(e1).epsilon(1e-9));
    CHECK(tf::tf_energy_functional(sol, 1.0) == doctest::Approx(e1).epsilon(1e-8));
}

TEST_CASE("potential scaling and rejection at the nucleus")
{
    const auto& sol = solution();
    const double z = 7.0, r = 0.3;
    CHECK(tf::tf_potential(sol, z, r) ==
          doctest::Approx(std::pow(z, 4.0 / 3.0) * tf::tf_potential(sol, 1.0, std::cbrt(z) * r)).epsilon(1e-12));
    CHECK_THROWS_AS(tf::tf_potential(sol, 1.0, 0.0), ValidationError);
    // near the nucleus the potential is Coulombic
    CHECK(sol.potential(1e-6) * 1e-6 == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Coulomb energy of a uniformly charged ball")
{
    // unit charge on the unit ball: D = 3/5
    std::vector<double> r, rho;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
        const double x = 2.0 * i / n;
        r.push_back(x);
        rho.push_back(x <= 1.0 ? 3.0 / (4.0 * std::numbers::pi) : 0.0);
    }
    CHECK(tf::coulomb_energy(r, rho) == doctest::Approx(0.6).epsilon(1e-3));
    rho[5] = -1.0;
    CHECK_THROWS_AS(tf::coulomb_energy(r, rho), ValidationError);
}

TEST_CASE("nuclear configuration validation")
{
    CHECK_THROWS_AS(NuclearConfig({0.5, 0.4}, {Vec3{0, 0, 0}, Vec3{1, 0, 0}}, 10.0, 0.01), ValidationError);
    CHECK_THROWS_AS(NuclearConfig({1.2, -0.2}, {Vec3{0, 0, 0}, Vec3{1, 0, 0}}, 10.0, 0.01), ValidationError);
    CHECK_THROWS_AS(NuclearConfig({0.5, 0.5}, {Vec3{0, 0, 0}, Vec3{0.1, 0, 0}}, 10.0, 0.01, 0.5), ValidationError);
    const auto atom = NuclearConfig::atom(8.0, 0.01);
    CHECK(atom.kappa() == doctest::Approx(2.0 / std::numbers::pi));
    CHECK(atom.h() == doctest::Approx(std::sqrt(atom.kappa()) / 2.0));
    CHECK(atom.max_coupling() == doctest::Approx(0.08));
}

TEST_CASE("molecular potential is the superposition of atomic ones")
{
    const auto& sol = solution();
    const NuclearConfig cfg({0.5, 0.5}, {Vec3{-1, 0, 0}, Vec3{1, 0, 0}}, 1.0, 0.0);
    const Vec3 x{0.2, 0.3, -0.1};
    const double expected = tf::tf_potential(sol, 0.5, distance(x, Vec3{-1, 0, 0})) +
                            tf::tf_potential(sol, 0.5, distance(x, Vec3{1, 0, 0}));
    CHECK(tf::config_potential(sol, cfg, x) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(tf::config_potential(sol, NuclearConfig::atom(1.0, 0.0), x) ==
          doctest::Approx(sol.potential(norm(x))).epsilon(1e-12));
}
