#include "nmep/core.hpp"

#include <algorithm>
#include <cmath>

namespace nmep {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a) +
                                " and " + std::to_string(b) + " do not match");
}

} // namespace

Matrix::Matrix(std::size_t dim, std::initializer_list<cplx> entries) : dim_(dim), e_(entries) {
    if (e_.size() != dim * dim)
        throw DimensionMismatch("Matrix: got " + std::to_string(e_.size()) +
                                " entries for dim " + std::to_string(dim));
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

cplx Matrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const cplx& x : e_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::hermiticity_defect() const {
    double d = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    require_same_dim(dim_, o.dim_, "Matrix::operator+=");
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    require_same_dim(dim_, o.dim_, "Matrix::operator-=");
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (cplx& x : e_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same_dim(a.dim_, b.dim_, "Matrix::operator*");
    const std::size_t n = a.dim_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

double norm(const Vec& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx dot(const Vec& a, const Vec& b) {
    require_same_dim(a.size(), b.size(), "dot");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

Vec normalize(const Vec& v) {
    const double n = norm(v);
    if (n <= 1e-300) throw ZeroVector("normalize: vector norm is zero");
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

Vec canonical_phase(const Vec& v) {
    std::size_t k = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) { k = i; break; }
    }
    if (k == v.size()) throw ZeroVector("canonical_phase: no component above 1e-12");
    const double mag = std::abs(v[k]);
    const cplx phase = std::conj(v[k]) / mag;
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * phase;
    out[k] = mag; // exactly real
    return out;
}

Vec apply(const Matrix& op, const Vec& v) {
    require_same_dim(op.dim(), v.size(), "apply");
    const std::size_t n = v.size();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += op(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Matrix projector(const Vec& v) {
    Matrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

namespace {

// Fix the free phase of an eigenvector column: larger-magnitude component
// becomes positive real.
void fix_column_phase(Matrix& u, std::size_t col) {
    std::size_t k = std::abs(u(0, col)) >= std::abs(u(1, col)) ? 0 : 1;
    const double mag = std::abs(u(k, col));
    if (mag == 0.0) return;
    const cplx phase = std::conj(u(k, col)) / mag;
    for (std::size_t i = 0; i < 2; ++i) u(i, col) *= phase;
    u(k, col) = mag;
}

} // namespace

Eig2 hermitian_eig2(const Matrix& m) {
    if (m.dim() != 2) throw DimensionMismatch("hermitian_eig2: need a 2x2 matrix");
    if (!m.is_hermitian(1e-10)) throw NotHermitian("hermitian_eig2: matrix is not Hermitian");

    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const cplx b = m(0, 1);
    const double half_diff = 0.5 * (a - d);
    const double r = std::hypot(half_diff, std::abs(b));
    const double mean = 0.5 * (a + d);

    Eig2 out;
    out.values = {mean + r, mean - r};
    out.vectors = Matrix(2);

    if (r == 0.0 || std::abs(b) == 0.0) {
        // Already diagonal; keep eigenvalues descending.
        if (a >= d) {
            out.values = {a, d};
            out.vectors = Matrix::identity(2);
        } else {
            out.values = {d, a};
            out.vectors(0, 1) = 1.0;
            out.vectors(1, 0) = 1.0;
        }
        return out;
    }

    // Column for the larger eigenvalue: (b, lambda1 - a), the other one is
    // its orthogonal complement.
    const cplx v0 = b;
    const cplx v1 = out.values[0] - a;
    const double n = std::sqrt(std::norm(v0) + std::norm(v1));
    out.vectors(0, 0) = v0 / n;
    out.vectors(1, 0) = v1 / n;
    out.vectors(0, 1) = -std::conj(out.vectors(1, 0));
    out.vectors(1, 1) = std::conj(out.vectors(0, 0));
    fix_column_phase(out.vectors, 0);
    fix_column_phase(out.vectors, 1);
    return out;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
    if (!m.is_hermitian(1e-10)) throw NotHermitian("hermitian_eigenvalues: matrix is not Hermitian");
    const std::size_t n = m.dim();
    Matrix a = m;
    // Symmetrize so the sweeps start from an exactly Hermitian matrix.
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx x = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = x;
            a(j, i) = std::conj(x);
        }
    }

    // Cyclic complex Jacobi; plenty for the dim <= 4 matrices used here.
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(a(i, j)));
        if (off < 1e-14 * std::max(1.0, a.max_abs())) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Phase out a(p,q), then a real 2x2 rotation.
                const cplx phase = apq / std::abs(apq);
                const double g = std::abs(apq);
                const double theta = 0.5 * std::atan2(2.0 * g, app - aqq);
                const double c = std::cos(theta);
                const cplx s = std::sin(theta) * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp + s * akq;
                    a(k, q) = -std::conj(s) * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(s) * aqk;
                    a(q, k) = -s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

double min_eigenvalue(const Matrix& rho) {
    if (rho.dim() == 2) return hermitian_eig2(rho).values[1];
    return hermitian_eigenvalues(rho).front();
}

Matrix sigma_x() { return Matrix(2, {0.0, 1.0, 1.0, 0.0}); }
Matrix sigma_y() { return Matrix(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}); }
Matrix sigma_z() { return Matrix(2, {1.0, 0.0, 0.0, -1.0}); }
Matrix sigma_minus() { return Matrix(2, {0.0, 1.0, 0.0, 0.0}); }
Matrix sigma_plus() { return Matrix(2, {0.0, 0.0, 1.0, 0.0}); }

} // namespace nmep
