#pragma once

// Small dense complex matrices (2x2 .. 8x8) with just enough linear algebra
// for density-matrix bookkeeping: products, tensor products, partial traces,
// Hermitian eigenvalues and entropies. Entropies are in bits.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace phasekey::qmath {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
// Eigenvalues in [-kNegativeTol, 0] count as exact zeros in entropies; anything
// more negative is not a physical state.
inline constexpr double kNegativeTol = 1e-8;
inline constexpr std::size_t kMaxDim = 8;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  // Row-major nested initializer, e.g. CMatrix{{1, 0}, {0, 1}}.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diag(const std::vector<Complex>& entries);
  static CMatrix diag(std::initializer_list<double> entries);
  // |v><v| for an arbitrary (not necessarily normalized) vector.
  static CMatrix projector(const std::vector<Complex>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  Complex trace() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Largest entrywise |a - b|; matrices must have equal shape.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

// A·B·A†
CMatrix sandwich(const CMatrix& a, const CMatrix& b);

// (A⊗B)[(i·m+k),(j·n+l)] = A[i,j]·B[k,l]
CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Subsystem { A, B };

// Partial trace of an operator on C^2 ⊗ C^2 in the basis {|00>,|01>,|10>,|11>},
// returning the reduced operator on the kept subsystem.
CMatrix partial_trace(const CMatrix& rho_ab, Subsystem keep);

// Real eigenvalues of a Hermitian matrix, ascending. Closed form for 2x2,
// cyclic Jacobi (on the real 2n x 2n embedding) otherwise. Throws
// InvalidArgument on non-square, oversized or non-Hermitian input.
std::vector<double> eig_hermitian(const CMatrix& m);

// -Σ λ log2 λ of a unit-trace positive semidefinite matrix.
double von_neumann_entropy(const CMatrix& rho);

// Shannon entropy of a probability vector, in bits. Zero entries are skipped.
double shannon_entropy(const std::vector<double>& p);

double binary_entropy(double p);

}  // namespace phasekey::qmath
