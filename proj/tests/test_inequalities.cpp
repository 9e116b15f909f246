#include <doctest.h>

#include "relscott/error.hpp"
#include "relscott/fields.hpp"
#include "relscott/inequalities.hpp"

#include <cmath>
#include <numbers>

using namespace relscott;
using std::numbers::pi;

TEST_CASE("pull-out estimate edge cases")
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(5, 5);
    a = a * a.transpose();
    const auto one = ineq::pull_out_check({Eigen::VectorXd::Ones(5)}, {a});
    CHECK(std::abs(one.lhs) < 1e-10);
    CHECK(one.pass);

    // equal scalar blocks commute with the partition
    Eigen::VectorXd g1 = Eigen::VectorXd::Constant(4, 0.6), g2 = Eigen::VectorXd::Constant(4, 0.8);
    const Eigen::MatrixXd s = 2.0 * Eigen::MatrixXd::Identity(4, 4);
    CHECK(std::abs(ineq::pull_out_check({g1, g2}, {s, s}).lhs) < 1e-10);

    Eigen::VectorXd bad = Eigen::VectorXd::Constant(4, 0.7);
    CHECK_THROWS_AS(ineq::pull_out_check({bad, g2}, {s, s}), ValidationError);
}

TEST_CASE("BKS inequality on scalars")
{
    Eigen::MatrixXd p(1, 1), q(1, 1);
    p << 1.0;
    q << 2.0;
    const auto rep = ineq::bks_check(p, q);
    CHECK(rep.lhs == doctest::Approx(-1.0));
    CHECK(rep.rhs_total() == doctest::Approx(std::sqrt(3.0)));
    CHECK(rep.pass);
    CHECK(ineq::bks_check(p, p).lhs == doctest::Approx(0.0));
}

TEST_CASE("scalar kinetic bounds")
{
    CHECK(ineq::c0() == doctest::Approx((std::sqrt(11.0) - 1.0) / 10.0));
    for (double m : {0.1, 1.0, 7.0}) {
        for (double t : {0.0, 0.01, 1.0, 9.9 * m * m, 10.0 * m * m, 1e4}) {
            const auto rep = ineq::scalar_kinetic_bounds(t, m);
            CHECK(rep.pass);
            CHECK(rep.lhs >= -1e-12);
        }
    }
}

TEST_CASE("lemma ensembles are violation free and reproducible")
{
    const auto a = ineq::pull_out_ensemble(5, 200);
    const auto b = ineq::bks_ensemble(5, 200);
    const auto c = ineq::scalar_ensemble(5, 200);
    CHECK(a.violations == 0);
    CHECK(b.violations == 0);
    CHECK(c.violations == 0);
    const auto a2 = ineq::pull_out_ensemble(5, 200);
    CHECK(a2.worst_margin == a.worst_margin);
}

TEST_CASE("Lieb-Thirring check without potential is trivially satisfied")
{
    ineq::LtInstance inst;
    inst.field = fields::make_divfree_field(fields::Family::zero, {}, fields::centered_grid(8, 0.35));
    inst.potential = [](const Vec3&) { return 0.0; };
    const auto rep = ineq::lt_check(inst);
    CHECK(rep.lhs == doctest::Approx(0.0));
    CHECK(rep.empirical_constant == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("Lieb-Thirring constant is invariant under dilation")
{
    ineq::LtEnsembleSpec spec;
    spec.grid_n = 9;
    spec.scalar = 1;
    spec.schrodinger = 1;
    spec.pauli = 1;
    const auto ensemble = ineq::lt_ensemble(11, spec);
    REQUIRE(ensemble.size() == 3);
    for (const auto& inst : ensemble) {
        const auto r0 = ineq::lt_check(inst);
        const auto r1 = ineq::lt_check(ineq::dilate(inst, 1.7));
        CHECK(std::isfinite(r0.empirical_constant));
        CHECK(std::abs(r0.empirical_constant - r1.empirical_constant) <=
              1e-6 * std::max(1e-300, r0.empirical_constant));
        // both sides scale by λ⁻²
        CHECK(r1.lhs == doctest::Approx(r0.lhs / (1.7 * 1.7)).epsilon(1e-8));
    }
}

TEST_CASE("regression bound turns a large constant into a failure")
{
    ineq::LtEnsembleSpec spec;
    spec.grid_n = 9;
    spec.scalar = 1;
    spec.schrodinger = 0;
    spec.pauli = 0;
    const auto inst = ineq::lt_ensemble(3, spec).front();
    const auto free = ineq::lt_check(inst);
    if (free.empirical_constant > 0.0) {
        CHECK_FALSE(ineq::lt_check(inst, 0.5 * free.empirical_constant).pass);
        CHECK(ineq::lt_check(inst, 2.0 * free.empirical_constant).pass);
    }
}

TEST_CASE("Coulomb stability parameter validation")
{
    CHECK(ineq::eta(0.0) == doctest::Approx(0.1));
    CHECK(ineq::eta(0.5) == doctest::Approx((1.0 - std::pow(pi / 4.0, 2)) / 10.0));
    auto v0 = [](double) { return 0.0; };
    CHECK_THROWS_AS(ineq::crit_stability_check(2.0 / pi, 1.0, CutoffProfile::smooth, v0), ValidationError);
    CHECK_THROWS_AS(ineq::crit_stability_check(0.7, 1.0, CutoffProfile::smooth, v0), ValidationError);
    CHECK_THROWS_AS(ineq::crit_stability_check(0.0, 1.0, CutoffProfile::smooth, v0), ValidationError);
}

TEST_CASE("localized Coulomb trace is finite and bounded by the stability form")
{
    auto v0 = [](double) { return 0.0; };
    const auto rep = ineq::crit_stability_check(0.5, 1.0, CutoffProfile::smooth, v0);
    CHECK(std::isfinite(rep.lhs));
    CHECK(rep.lhs <= 0.0);
    CHECK(-rep.lhs <= rep.rhs_total());
}

TEST_CASE("localized Coulomb trace decreases as the coupling approaches the threshold")
{
    auto well = [](double r) { return 2.0 * std::exp(-r * r); };
    double prev = 0.0;
    for (double beta : {0.1, 0.3, 0.5, 0.6, 0.63}) {
        const auto rep = ineq::crit_stability_check(beta, 2.0, CutoffProfile::smooth, well);
        CHECK(rep.lhs <= prev + 1e-9);
        prev = rep.lhs;
    }
}

TEST_CASE("small-coupling branch is bounded independently of the coupling")
{
    auto well = [](double r) { return 2.0 * std::exp(-r * r); };
    std::vector<double> lhs;
    for (double beta : {0.01, 0.02, 0.04}) {
        const auto rep = ineq::small_beta_check(beta, 1.0, well);
        CHECK(rep.pass);
        lhs.push_back(rep.lhs);
    }
    for (double v : lhs) {
        CHECK(v == doctest::Approx(lhs.front()).epsilon(0.05));
    }
}

TEST_CASE("Hardy and Kato inequalities hold on refined grids")
{
    for (int l : {0, 1}) {
        const radial::GridSpec g{radial::GridKind::log, 1e-4, 50.0, 0.05, 1.0};
        const auto r = ineq::hardy_kato_check(l, g);
        CHECK(r.kato_min > -1e-3);
        CHECK(r.hardy_min > -1e-3);
        CHECK(r.hardy_relative > -1e-3);
        CHECK(r.kato_relative > -1e-3);
    }
}

TEST_CASE("IMS localization defect is second order in the spacing")
{
    auto theta = [](double x) { return 0.25 * pi * (1.0 + std::tanh(x / 0.6)); };
    auto dtheta = [](double x) { return 0.25 * pi / (0.6 * std::pow(std::cosh(x / 0.6), 2)); };
    ineq::PartitionFunction a{[=](const Vec3& x) { return std::cos(theta(x[0])); },
                              [=](const Vec3& x) { return Vec3{-std::sin(theta(x[0])) * dtheta(x[0]), 0, 0}; }};
    ineq::PartitionFunction b{[=](const Vec3& x) { return std::sin(theta(x[0])); },
                              [=](const Vec3& x) { return Vec3{std::cos(theta(x[0])) * dtheta(x[0]), 0, 0}; }};
    fields::FamilyParams fp;
    fp.width = 1.0;
    std::vector<double> defects;
    for (int n : {9, 17}) {
        const auto grid = fields::centered_grid(n, 4.0 / (n - 1));
        const auto field = fields::make_divfree_field(fields::Family::polynomial, fp, grid);
        const auto rep = ineq::ims_check(field, 1.0, {a, b}, 1.0, 1.0, 1e-12, false);
        CHECK(rep.partition_defect < 1e-12);
        defects.push_back(rep.identity_defect);
    }
    CHECK(defects[0] / defects[1] > 3.0);

    ineq::PartitionFunction half{[](const Vec3&) { return 0.5; }, [](const Vec3&) { return Vec3{}; }};
    const auto grid = fields::centered_grid(7, 0.5);
    CHECK_THROWS_AS(ineq::ims_check(fields::make_divfree_field(fields::Family::zero, {}, grid), 1.0, {half}),
                    ValidationError);
}
