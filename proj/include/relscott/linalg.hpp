#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace relscott::linalg {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Eigen-decomposition of a self-adjoint matrix, eigenvalues ascending.
template <typename Scalar>
struct EigenSystem {
    Eigen::VectorXd values;
    Matrix<Scalar> vectors; // columns; empty when only values were requested
};

// Dense self-adjoint eigensolvers backed by LAPACK (MRRR).
// Only the lower triangle of the input is referenced.
EigenSystem<double> eigh(const Eigen::MatrixXd& a, bool with_vectors = true);
EigenSystem<Complex> eigh(const Eigen::MatrixXcd& a, bool with_vectors = true);

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a);
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& a);

/// Symmetric tridiagonal eigensolver: `diag` has n entries, `off` has n-1.
EigenSystem<double> eigh_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                     bool with_vectors = true);

/// Ascending eigenvalues below `upper` of a symmetric tridiagonal matrix, by
/// bisection (relatively accurate on graded matrices).
Eigen::VectorXd tridiagonal_eigenvalues_below(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double upper);

/// Solve a tridiagonal system in place of `rhs`: `lower`/`upper` have n-1
/// entries. Throws ConvergenceError on a singular pivot.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& rhs);

/// f(A) = V f(Λ) V* for a precomputed eigen-system.
template <typename Scalar>
Matrix<Scalar> apply_function(const EigenSystem<Scalar>& es, const std::function<double(double)>& f)
{
    Eigen::VectorXd fv = es.values.unaryExpr(f);
    Matrix<Scalar> scaled = es.vectors * fv.asDiagonal();
    return scaled * es.vectors.adjoint();
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// [-tol, 0) are clamped to zero; anything below -tol is rejected.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a, double tol = 1e-10);

/// True when a dense eigen-decomposition through the linked LAPACK/BLAS has a
/// small residual. Some OpenBLAS builds select faulty AVX-512 dgemm kernels.
bool backend_consistent();

/// Call at the top of main. When the backend check fails and the program has
/// not been restarted yet, re-executes it with OPENBLAS_CORETYPE=Haswell (if
/// the CPU has AVX2). Throws ConvergenceError when no usable backend remains.
void ensure_backend(char** argv);

/// Symmetrize in place: a <- (a + a*) / 2.
template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& a)
{
    a = (0.5 * (a + a.adjoint())).eval();
}

} // namespace relscott::linalg
