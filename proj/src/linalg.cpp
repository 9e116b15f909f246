#include "relscott/linalg.hpp"

#include "relscott/error.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

namespace relscott::linalg {

namespace {

void check_square(Eigen::Index rows, Eigen::Index cols)
{
    if (rows != cols) {
        throw ValidationError("eigh: matrix is not square");
    }
}

[[noreturn]] void eig_failure(const char* routine, lapack_int info, Eigen::Index n)
{
    throw ConvergenceError(std::string(routine) + " failed with info=" + std::to_string(info) +
                           " (dimension " + std::to_string(n) + ")");
}

} // namespace

EigenSystem<double> eigh(const Eigen::MatrixXd& a, bool with_vectors)
{
    check_square(a.rows(), a.cols());
    const auto n = static_cast<lapack_int>(a.rows());
    EigenSystem<double> out;
    out.values.resize(n);
    if (n == 0) {
        return out;
    }
    Eigen::MatrixXd work = a;
    lapack_int found = 0;
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    if (with_vectors) {
        out.vectors.resize(n, n);
    }
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'A', 'L', n, work.data(), n,
                                           0.0, 0.0, 0, 0, 0.0, &found, out.values.data(),
                                           with_vectors ? out.vectors.data() : nullptr, n, support.data());
    if (info != 0 || found != n) {
        eig_failure("dsyevr", info, n);
    }
    return out;
}

EigenSystem<Complex> eigh(const Eigen::MatrixXcd& a, bool with_vectors)
{
    check_square(a.rows(), a.cols());
    const auto n = static_cast<lapack_int>(a.rows());
    EigenSystem<Complex> out;
    out.values.resize(n);
    if (n == 0) {
        return out;
    }
    Eigen::MatrixXcd work = a;
    lapack_int found = 0;
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    if (with_vectors) {
        out.vectors.resize(n, n);
    }
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'A', 'L', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0, 0.0, 0, 0, 0.0, &found,
        out.values.data(),
        with_vectors ? reinterpret_cast<lapack_complex_double*>(out.vectors.data()) : nullptr, n,
        support.data());
    if (info != 0 || found != n) {
        eig_failure("zheevr", info, n);
    }
    return out;
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a) { return eigh(a, false).values; }

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& a) { return eigh(a, false).values; }

EigenSystem<double> eigh_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                     bool with_vectors)
{
    const auto n = static_cast<lapack_int>(diag.size());
    if (off.size() + 1 != diag.size() && !(n == 0 && off.size() == 0)) {
        throw ValidationError("eigh_tridiagonal: off-diagonal must have n-1 entries");
    }
    EigenSystem<double> out;
    if (n == 0) {
        out.values = diag;
        return out;
    }
    if (!with_vectors) {
        return {tridiagonal_eigenvalues_below(diag, off, std::numeric_limits<double>::infinity()), {}};
    }
    // MRRR keeps eigenvectors accurate on strongly graded matrices, where
    // divide and conquer loses them
    Eigen::VectorXd d = diag;
    Eigen::VectorXd e(n);
    e.head(n - 1) = off;
    e(n - 1) = 0.0;
    out.values.resize(n);
    if (with_vectors) {
        out.vectors.resize(n, n);
    }
    lapack_int m = 0;
    lapack_logical tryrac = 1;
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    double dummy = 0.0;
    const lapack_int info = LAPACKE_dstemr(
        LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, &m,
        out.values.data(), with_vectors ? out.vectors.data() : &dummy, with_vectors ? n : 1, n,
        isuppz.data(), &tryrac);
    if (info != 0 || m != n) {
        eig_failure("dstemr", info, n);
    }
    return out;
}

Eigen::VectorXd tridiagonal_eigenvalues_below(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double upper)
{
    const auto n = static_cast<lapack_int>(diag.size());
    if (off.size() + 1 != diag.size() && !(n == 0 && off.size() == 0)) {
        throw ValidationError("tridiagonal_eigenvalues_below: off-diagonal must have n-1 entries");
    }
    if (n == 0) {
        return {};
    }
    // bisection with the smallest absolute tolerance keeps small eigenvalues
    // accurate when the weighting drives diagonal entries towards zero
    Eigen::VectorXd d = diag, e = off, w(n);
    std::vector<lapack_int> block(static_cast<std::size_t>(n)), split(static_cast<std::size_t>(n));
    lapack_int m = 0, nsplit = 0;
    const bool all = std::isinf(upper) && upper > 0.0;
    const double lower = -std::numeric_limits<double>::max();
    const lapack_int info = LAPACKE_dstebz(all ? 'A' : 'V', 'E', n, lower, upper, 0, 0, 2.0 * LAPACKE_dlamch('S'),
                                           d.data(), e.data(), &m, &nsplit, w.data(), block.data(), split.data());
    if (info != 0) {
        eig_failure("dstebz", info, n);
    }
    return w.head(m);
}

Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& rhs)
{
    const lapack_int n = static_cast<lapack_int>(diag.size());
    Eigen::VectorXd dl = lower, d = diag, du = upper, b = rhs;
    const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(),
                                          b.data(), n);
    if (info != 0) {
        throw ConvergenceError("dgtsv: singular pivot at row " + std::to_string(info) +
                               " (n = " + std::to_string(n) + ")");
    }
    return b;
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a, double tol)
{
    auto es = eigh(a, true);
    if (es.values.size() > 0 && es.values(0) < -tol) {
        throw ValidationError("sqrtm_psd: matrix has eigenvalue " + std::to_string(es.values(0)) +
                              " below -tolerance");
    }
    return apply_function<double>(es, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

bool backend_consistent()
{
    // deterministic symmetric matrix large enough to reach blocked kernels
    const int n = 256;
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            a(i, j) = std::sin(0.37 * (i + 1) * (j + 1)) + (i == j ? 2.0 : 0.0);
        }
    }
    symmetrize(a);
    const auto es = eigh(a, true);
    const Eigen::MatrixXd resid = a * es.vectors - es.vectors * es.values.asDiagonal();
    const Eigen::MatrixXd gram = es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(n, n);
    return resid.cwiseAbs().maxCoeff() < 1e-8 && gram.cwiseAbs().maxCoeff() < 1e-8;
}

void ensure_backend(char** argv)
{
    if (backend_consistent()) {
        return;
    }
    const char* marker = "RELSCOTT_BACKEND_RESTART";
    if (std::getenv(marker) == nullptr && __builtin_cpu_supports("avx2")) {
        setenv(marker, "1", 1);
        setenv("OPENBLAS_CORETYPE", "Haswell", 1);
        execv("/proc/self/exe", argv);
    }
    throw ConvergenceError("linear algebra backend check failed: dense eigenvectors are inaccurate; "
                           "try OPENBLAS_CORETYPE=Haswell or a different BLAS");
}

} // namespace relscott::linalg
