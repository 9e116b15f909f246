#include <doctest.h>

#include "relscott/error.hpp"
#include "relscott/fields.hpp"
#include "relscott/linalg.hpp"
#include "relscott/profile.hpp"
#include "relscott/radial.hpp"
#include "relscott/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace relscott;
using std::numbers::pi;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = g(rng);
        }
    }
    return 0.5 * (a + a.transpose());
}

} // namespace

TEST_CASE("dense eigensolver agrees with an independent solver")
{
    const auto a = random_symmetric(300, 7);
    const auto es = linalg::eigh(a);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    CHECK((es.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a * es.vectors - es.vectors * es.values.asDiagonal()).norm() < 1e-8);

    Eigen::MatrixXcd c = a.cast<linalg::Complex>();
    c(3, 1) += linalg::Complex(0.0, 0.5);
    c(1, 3) -= linalg::Complex(0.0, 0.5);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> cref(c);
    CHECK((linalg::eigvalsh(c) - cref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("tridiagonal eigensolver and solver")
{
    const int n = 50;
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(n, 1.0, 3.0), e = Eigen::VectorXd::Constant(n - 1, -0.7);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    dense.diagonal() = d;
    for (int i = 0; i + 1 < n; ++i) {
        dense(i, i + 1) = dense(i + 1, i) = e(i);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense);
    CHECK((linalg::eigh_tridiagonal(d, e).values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
    const auto x = linalg::solve_tridiagonal(e, d, e, rhs);
    CHECK((dense * x - rhs).norm() < 1e-12);
}

TEST_CASE("matrix square root")
{
    const auto g = random_symmetric(40, 3);
    const Eigen::MatrixXd a = g * g;
    const auto s = linalg::sqrtm_psd(a);
    CHECK((s * s - a).norm() < 1e-9 * a.norm());
    CHECK(linalg::eigvalsh(s).minCoeff() > -1e-10);
    Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(linalg::sqrtm_psd(neg), ValidationError);
}

TEST_CASE("relativistic transform of a diagonal matrix")
{
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(3, 3);
    k.diagonal() << 0.0, 2.0, 50.0;
    const double beta = 0.4;
    const auto t = spectral::rel_transform(k, beta);
    for (int i = 0; i < 3; ++i) {
        const double v = k(i, i);
        CHECK(t(i, i) == doctest::Approx(std::sqrt(v / (beta * beta) + std::pow(beta, -4)) - 1.0 / (beta * beta)));
    }
    CHECK(spectral::rel_function(6.0, 0.0) == doctest::Approx(3.0));
    CHECK(spectral::rel_transform(k, 0.0)(1, 1) == doctest::Approx(1.0));
    Eigen::MatrixXd bad = -k;
    CHECK_THROWS_AS(spectral::rel_transform(bad, beta), ValidationError);
}

TEST_CASE("negative sums")
{
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 3);
    h.diagonal() << -1.0, 2.0, -3.0;
    CHECK(spectral::negative_sum(h) == doctest::Approx(-4.0));
    Eigen::VectorXd w(3);
    w << 0.5, 1.0, 0.0;
    CHECK(spectral::negative_sum(h, w) == doctest::Approx(-0.25));
}

TEST_CASE("hydrogen levels on the default radial grid")
{
    const radial::RadialGrid grid(radial::GridSpec{});
    for (int l = 0; l <= 2; ++l) {
        const auto ch = radial::build_radial_channel(l, grid, [](double r) { return -1.0 / r; }, 1.0);
        const auto ev = linalg::eigvalsh(ch.hamiltonian(0.0));
        for (int k = 0; k < 3; ++k) {
            const int n = k + l + 1;
            CHECK(std::abs(ev(k) + 0.5 / (n * n)) < 1e-3);
        }
    }
}

TEST_CASE("relativistic Coulomb levels lie below and approach the nonrelativistic ones")
{
    const radial::RadialGrid grid(radial::GridSpec{});
    const auto ch = radial::build_radial_channel(0, grid, [](double r) { return -1.0 / r; }, 1.0);
    const double nr = linalg::eigvalsh(ch.hamiltonian(0.0))(0);
    double prev = nr;
    for (double beta : {0.05, 0.2, 0.4, 0.6}) {
        const double e = linalg::eigvalsh(ch.hamiltonian(beta))(0);
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
    CHECK(linalg::eigvalsh(ch.hamiltonian(0.01))(0) == doctest::Approx(nr).epsilon(1e-3));
    CHECK_THROWS_AS(radial::build_radial_channel(-1, grid, [](double r) { return -1.0 / r; }, 1.0), ValidationError);
}

TEST_CASE("channel sum of a localized Coulomb trace stops at an empty channel")
{
    radial::GridSpec spec;
    spec.r_max = 8.0;
    const radial::RadialGrid grid(spec);
    Eigen::VectorXd pot(grid.size()), weight(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        pot(i) = -1.0 / grid.r()(i);
        weight(i) = cutoff_value(CutoffProfile::smooth, grid.r()(i) / 8.0);
    }
    const auto tr = spectral::radial_trace(grid, pot, 0.0, 1.0, weight);
    CHECK(tr.converged);
    CHECK(tr.total < 0.0);
    CHECK(tr.per_channel.back() == 0.0);
}

TEST_CASE("free lattice Laplacian matches its closed-form spectrum")
{
    const int n = 8;
    const double a = 0.3, h = 0.8;
    const auto grid = fields::centered_grid(n, a);
    const auto op = spectral::build_schrodinger_grid(
        fields::make_divfree_field(fields::Family::zero, {}, grid), h);
    const auto ev = linalg::eigvalsh(op.dense());
    const int m = n - 2;
    std::vector<double> expected;
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            for (int k = 1; k <= m; ++k) {
                double s = 0.0;
                for (int q : {i, j, k}) {
                    s += 2.0 * (1.0 - std::cos(q * pi / (m + 1)));
                }
                expected.push_back(h * h / (a * a) * s);
            }
        }
    }
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < ev.size(); ++i) {
        CHECK(ev(i) == doctest::Approx(expected[i]).epsilon(1e-10));
    }
    const auto lap = spectral::grid_laplacian(grid, h);
    CHECK((Eigen::MatrixXd(lap).cast<linalg::Complex>() - op.dense()).norm() < 1e-12);
}

TEST_CASE("Pauli operator without field is two copies of the Schrodinger operator")
{
    const auto grid = fields::centered_grid(7, 0.35);
    const auto zero = fields::make_divfree_field(fields::Family::zero, {}, grid);
    const auto s = linalg::eigvalsh(spectral::build_schrodinger_grid(zero, 1.0).dense());
    const auto p = linalg::eigvalsh(spectral::build_pauli_grid(zero, 1.0).dense());
    REQUIRE(p.size() == 2 * s.size());
    for (int i = 0; i < s.size(); ++i) {
        CHECK(p(2 * i) == doctest::Approx(s(i)).epsilon(1e-10));
        CHECK(p(2 * i + 1) == doctest::Approx(s(i)).epsilon(1e-10));
    }
}

TEST_CASE("Pauli operator in a uniform field is nearly nonnegative")
{
    const auto grid = fields::centered_grid(12, 0.3);
    fields::FamilyParams fp;
    fp.amplitude = 1.0;
    fp.width = 1.0;
    const auto a = fields::make_divfree_field(fields::Family::uniform, fp, grid);
    const auto p = linalg::eigvalsh(spectral::build_pauli_grid(a, 1.0).dense());
    // the continuum operator (σ·(−ih∇+A))² is nonnegative
    CHECK(p(0) > -0.05);
}
