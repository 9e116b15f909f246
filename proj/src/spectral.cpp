#include "relscott/spectral.hpp"

#include "relscott/error.hpp"

#include <cmath>
#include <string>

namespace relscott::spectral {

namespace {

template <typename Mat>
Mat rel_transform_impl(const Mat& k, double beta, double tol)
{
    if (beta < 0.0) {
        throw ValidationError("rel_transform: beta must be nonnegative");
    }
    if (k.rows() == 0) {
        return k;
    }
    Mat sym = k;
    linalg::symmetrize(sym);
    const auto es = linalg::eigh(sym, true);
    const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    if (es.values(0) < -tol * scale) {
        throw ValidationError("rel_transform: operator has eigenvalue " + std::to_string(es.values(0)) +
                              " below -tolerance");
    }
    return linalg::apply_function(es, [beta](double t) { return rel_function(std::max(t, 0.0), beta); });
}

template <typename Mat>
double negative_sum_impl(const Mat& h, const std::optional<Eigen::VectorXd>& weight)
{
    if (h.rows() != h.cols()) {
        throw ValidationError("negative_sum: matrix is not square");
    }
    if (!weight) {
        Mat sym = h;
        linalg::symmetrize(sym);
        return negative_sum(linalg::eigvalsh(sym));
    }
    const Eigen::VectorXd& w = *weight;
    if (w.size() != h.rows()) {
        throw ValidationError("negative_sum: weight length differs from matrix dimension");
    }
    // restrict to the support of φ; the complement contributes zero eigenvalues
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) != 0.0) {
            idx.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    Mat sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            sub(a, b) = w(idx[a]) * h(idx[a], idx[b]) * w(idx[b]);
        }
    }
    linalg::symmetrize(sub);
    return negative_sum(linalg::eigvalsh(sub));
}

} // namespace

double rel_function(double t, double beta) { return t / (std::sqrt(1.0 + beta * beta * t) + 1.0); }

Eigen::MatrixXd rel_transform(const Eigen::MatrixXd& k, double beta, double tol)
{
    return rel_transform_impl(k, beta, tol);
}

Eigen::MatrixXcd rel_transform(const Eigen::MatrixXcd& k, double beta, double tol)
{
    return rel_transform_impl(k, beta, tol);
}

Eigen::MatrixXd rel_transform_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                          double beta)
{
    const auto es = linalg::eigh_tridiagonal(diag, off, true);
    return linalg::apply_function(es, [beta](double t) { return rel_function(std::max(t, 0.0), beta); });
}

double negative_sum(const Eigen::VectorXd& eigenvalues)
{
    double s = 0.0;
    for (double e : eigenvalues) {
        if (e < 0.0) {
            s += e;
        }
    }
    return s;
}

double negative_sum(const Eigen::MatrixXd& h, const std::optional<Eigen::VectorXd>& weight)
{
    return negative_sum_impl(h, weight);
}

double negative_sum(const Eigen::MatrixXcd& h, const std::optional<Eigen::VectorXd>& weight)
{
    return negative_sum_impl(h, weight);
}

ChannelSum channel_sum(const std::vector<double>& values, int spin_factor)
{
    if (spin_factor != 1 && spin_factor != 2) {
        throw ValidationError("channel_sum: spin factor must be 1 or 2");
    }
    ChannelSum out;
    out.l_max = static_cast<int>(values.size()) - 1;
    std::vector<double> weighted(values.size());
    for (std::size_t l = 0; l < values.size(); ++l) {
        weighted[l] = spin_factor * (2.0 * l + 1.0) * values[l];
        out.total += weighted[l];
    }
    if (values.size() >= 2) {
        const double last = weighted.back();
        const double prev = weighted[weighted.size() - 2];
        if (last != 0.0) {
            out.tail_ratio = prev != 0.0 ? std::abs(last / prev) : INFINITY;
            if (out.tail_ratio >= 1.0) {
                out.tail_decaying = false;
                out.tail_estimate = INFINITY;
            } else {
                out.tail_estimate = last * out.tail_ratio / (1.0 - out.tail_ratio);
            }
        }
    }
    return out;
}

double channel_negative_sum(const radial::ChannelOperator& ch, double beta,
                            const std::optional<Eigen::VectorXd>& weight)
{
    const Eigen::Index n = ch.kinetic_diag().size();
    if (weight && weight->size() != n) {
        throw ValidationError("channel_negative_sum: weight length differs from grid size");
    }
    // support of the weight (all nodes without one)
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!weight || (*weight)(i) != 0.0) {
            idx.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m == 0) {
        return 0.0;
    }
    auto w = [&](Eigen::Index i) { return weight ? (*weight)(i) : 1.0; };
    if (beta == 0.0) {
        Eigen::VectorXd d(m), e(std::max<Eigen::Index>(m - 1, 0));
        for (Eigen::Index a = 0; a < m; ++a) {
            const Eigen::Index i = idx[a];
            d(a) = w(i) * w(i) * (0.5 * ch.kinetic_diag()(i) + ch.potential()(i));
            if (a + 1 < m) {
                const Eigen::Index j = idx[a + 1];
                e(a) = (j == i + 1) ? w(i) * w(j) * 0.5 * ch.kinetic_off()(i) : 0.0;
            }
        }
        return negative_sum(linalg::tridiagonal_eigenvalues_below(d, e, 0.0));
    }
    const Eigen::MatrixXd f = rel_transform_tridiagonal(ch.kinetic_diag(), ch.kinetic_off(), beta);
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index b = 0; b < m; ++b) {
        for (Eigen::Index a = 0; a < m; ++a) {
            sub(a, b) = w(idx[a]) * f(idx[a], idx[b]) * w(idx[b]);
        }
        sub(b, b) += w(idx[b]) * w(idx[b]) * ch.potential()(idx[b]);
    }
    linalg::symmetrize(sub);
    return negative_sum(linalg::eigvalsh(sub));
}

RadialTrace radial_trace(const radial::RadialGrid& grid, const Eigen::VectorXd& potential, double beta,
                         double h, const std::optional<Eigen::VectorXd>& weight, int spin_factor,
                         int l_limit)
{
    RadialTrace out;
    for (int l = 0; l <= l_limit; ++l) {
        const radial::ChannelOperator ch(l, grid, potential, h, spin_factor);
        const double v = channel_negative_sum(ch, beta, weight);
        out.per_channel.push_back(v);
        out.l_max = l;
        if (v == 0.0) {
            out.converged = true;
            break;
        }
    }
    out.sum = channel_sum(out.per_channel, spin_factor);
    out.total = out.sum.total;
    return out;
}

GridOperator::GridOperator(fields::Grid3 grid, int components, Eigen::SparseMatrix<Complex> matrix)
    : grid_(grid), components_(components), matrix_(std::move(matrix))
{
    if (matrix_.rows() != sites() * components_ || matrix_.cols() != matrix_.rows()) {
        throw ValidationError("grid operator: matrix dimension does not match the lattice");
    }
}

Eigen::Index GridOperator::sites() const
{
    const Eigen::Index m = interior();
    return m * m * m;
}

std::size_t GridOperator::grid_index(Eigen::Index site) const
{
    const int m = interior();
    const int k = static_cast<int>(site % m);
    const int j = static_cast<int>((site / m) % m);
    const int i = static_cast<int>(site / (static_cast<Eigen::Index>(m) * m));
    return grid_.index(i + 1, j + 1, k + 1);
}

Eigen::VectorXd GridOperator::sample(const std::function<double(const Vec3&)>& f) const
{
    const int m = interior();
    Eigen::VectorXd v(sites());
    for (Eigen::Index s = 0; s < sites(); ++s) {
        const int k = static_cast<int>(s % m);
        const int j = static_cast<int>((s / m) % m);
        const int i = static_cast<int>(s / (static_cast<Eigen::Index>(m) * m));
        v(s) = f(grid_.node(i + 1, j + 1, k + 1));
    }
    return v;
}

Eigen::VectorXd GridOperator::expand(const Eigen::VectorXd& per_site) const
{
    if (per_site.size() != sites()) {
        throw ValidationError("grid operator: per-site vector has the wrong length");
    }
    Eigen::VectorXd out(dimension());
    for (Eigen::Index s = 0; s < sites(); ++s) {
        for (int c = 0; c < components_; ++c) {
            out(s * components_ + c) = per_site(s);
        }
    }
    return out;
}

namespace {

std::vector<Eigen::Triplet<Complex>> magnetic_hopping(const fields::VectorField& a, double h, int comps)
{
    const auto& g = a.grid();
    const int m = g.n - 2;
    const double inv = h * h / (g.spacing * g.spacing);
    std::vector<Eigen::Triplet<Complex>> trip;
    auto site = [m](int i, int j, int k) { return (static_cast<Eigen::Index>(i) * m + j) * m + k; };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const Eigen::Index s = site(i, j, k);
                const std::size_t gs = g.index(i + 1, j + 1, k + 1);
                for (int c = 0; c < comps; ++c) {
                    trip.emplace_back(s * comps + c, s * comps + c, Complex(6.0 * inv, 0.0));
                }
                const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
                for (int d = 0; d < 3; ++d) {
                    const int ti = nb[d][0], tj = nb[d][1], tk = nb[d][2];
                    if (ti >= m || tj >= m || tk >= m) {
                        continue;
                    }
                    const Eigen::Index t = site(ti, tj, tk);
                    const std::size_t gt = g.index(ti + 1, tj + 1, tk + 1);
                    const double theta = 0.5 * (a.component(d)[gs] + a.component(d)[gt]) * g.spacing / h;
                    const Complex link = -inv * std::polar(1.0, theta);
                    for (int c = 0; c < comps; ++c) {
                        trip.emplace_back(s * comps + c, t * comps + c, link);
                        trip.emplace_back(t * comps + c, s * comps + c, std::conj(link));
                    }
                }
            }
        }
    }
    return trip;
}

} // namespace

GridOperator build_schrodinger_grid(const fields::VectorField& a, double h)
{
    if (!(h > 0.0)) {
        throw ValidationError("build_schrodinger_grid: h must be positive");
    }
    const auto& g = a.grid();
    const Eigen::Index dim = static_cast<Eigen::Index>(g.n - 2) * (g.n - 2) * (g.n - 2);
    Eigen::SparseMatrix<Complex> mat(dim, dim);
    const auto trip = magnetic_hopping(a, h, 1);
    mat.setFromTriplets(trip.begin(), trip.end());
    return GridOperator(g, 1, std::move(mat));
}

GridOperator build_pauli_grid(const fields::VectorField& a, double h)
{
    if (!(h > 0.0)) {
        throw ValidationError("build_pauli_grid: h must be positive");
    }
    const auto& g = a.grid();
    const int m = g.n - 2;
    const Eigen::Index sites = static_cast<Eigen::Index>(m) * m * m;
    auto trip = magnetic_hopping(a, h, 2);
    const auto b = a.curl();
    for (Eigen::Index s = 0; s < sites; ++s) {
        const int k = static_cast<int>(s % m);
        const int j = static_cast<int>((s / m) % m);
        const int i = static_cast<int>(s / (static_cast<Eigen::Index>(m) * m));
        const std::size_t gi = g.index(i + 1, j + 1, k + 1);
        const double bx = h * b[0][gi], by = h * b[1][gi], bz = h * b[2][gi];
        // h σ·B = h [[Bz, Bx − iBy], [Bx + iBy, −Bz]]
        trip.emplace_back(2 * s, 2 * s, Complex(bz, 0.0));
        trip.emplace_back(2 * s + 1, 2 * s + 1, Complex(-bz, 0.0));
        trip.emplace_back(2 * s, 2 * s + 1, Complex(bx, -by));
        trip.emplace_back(2 * s + 1, 2 * s, Complex(bx, by));
    }
    Eigen::SparseMatrix<Complex> mat(2 * sites, 2 * sites);
    mat.setFromTriplets(trip.begin(), trip.end());
    return GridOperator(g, 2, std::move(mat));
}

Eigen::SparseMatrix<double> grid_laplacian(const fields::Grid3& grid, double h)
{
    if (grid.n < 3 || !(grid.spacing > 0.0) || !(h > 0.0)) {
        throw ValidationError("grid_laplacian: invalid grid or h");
    }
    const int m = grid.n - 2;
    const double inv = h * h / (grid.spacing * grid.spacing);
    auto site = [m](int i, int j, int k) { return (static_cast<Eigen::Index>(i) * m + j) * m + k; };
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const Eigen::Index s = site(i, j, k);
                trip.emplace_back(s, s, 6.0 * inv);
                if (i + 1 < m) {
                    trip.emplace_back(s, site(i + 1, j, k), -inv);
                    trip.emplace_back(site(i + 1, j, k), s, -inv);
                }
                if (j + 1 < m) {
                    trip.emplace_back(s, site(i, j + 1, k), -inv);
                    trip.emplace_back(site(i, j + 1, k), s, -inv);
                }
                if (k + 1 < m) {
                    trip.emplace_back(s, site(i, j, k + 1), -inv);
                    trip.emplace_back(site(i, j, k + 1), s, -inv);
                }
            }
        }
    }
    const Eigen::Index dim = site(m - 1, m - 1, m - 1) + 1;
    Eigen::SparseMatrix<double> mat(dim, dim);
    mat.setFromTriplets(trip.begin(), trip.end());
    return mat;
}

} // namespace relscott::spectral
