#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "nmep/errors.hpp"

namespace nmep {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

/// Dense square complex matrix, row-major. Used for Hamiltonians, jump
/// operators and density matrices alike; the models here are dim 2-3.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), e_(dim * dim) {}
    Matrix(std::size_t dim, std::initializer_list<cplx> entries);

    static Matrix zero(std::size_t dim) { return Matrix(dim); }
    static Matrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }

    cplx& operator()(std::size_t i, std::size_t j) { return e_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return e_[i * dim_ + j]; }

    const std::vector<cplx>& data() const { return e_; }

    Matrix adjoint() const;
    cplx trace() const;
    double max_abs() const;
    /// Entrywise max of |m - m^dagger|.
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(cplx s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> e_;
};

/// Density matrices are plain Hermitian matrices here; positivity is not
/// an invariant (signed ensembles can encode non-positive Hermitian states).
using DensityMatrix = Matrix;

double norm(const Vec& v);
/// Inner product, conjugate-linear in the first argument.
cplx dot(const Vec& a, const Vec& b);
Vec normalize(const Vec& v);
/// Removes the global phase by making the first component with magnitude
/// above 1e-12 a positive real number.
Vec canonical_phase(const Vec& v);
Vec apply(const Matrix& op, const Vec& v);
/// |v><v|
Matrix projector(const Vec& v);

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
/// values are descending; vectors holds the eigenvectors as columns, each
/// with its larger-magnitude component made positive real.
struct Eig2 {
    std::array<double, 2> values;
    Matrix vectors;
};
Eig2 hermitian_eig2(const Matrix& m);

/// All eigenvalues of a Hermitian matrix (ascending), cyclic Jacobi sweeps.
std::vector<double> hermitian_eigenvalues(const Matrix& m);
double min_eigenvalue(const Matrix& rho);

Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
/// Lowering operator: |1> -> |0>, annihilates |0>.
Matrix sigma_minus();
Matrix sigma_plus();

} // namespace nmep
