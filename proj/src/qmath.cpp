#include "phasekey/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasekey/error.hpp"

namespace phasekey::qmath {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
        << b.cols();
    throw InvalidArgument(msg.str());
  }
}

// Cyclic Jacobi on a real symmetric matrix stored row-major. Returns the
// diagonal after convergence (unsorted).
std::vector<double> jacobi_symmetric(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

  double scale = 0.0;
  for (double v : a) scale += v * v;
  scale = std::max(1.0, std::sqrt(scale));
  constexpr double kOffTol = 1e-14;
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
    if (std::sqrt(off) < kOffTol * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = at(i, i);
  return diag;
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw InvalidArgument("CMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diag(const std::vector<Complex>& entries) {
  CMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

CMatrix CMatrix::diag(std::initializer_list<double> entries) {
  return diag(std::vector<Complex>(entries.begin(), entries.end()));
}

CMatrix CMatrix::projector(const std::vector<Complex>& v) {
  CMatrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

CMatrix CMatrix::transpose() const {
  CMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

CMatrix CMatrix::conj() const {
  CMatrix m = *this;
  for (auto& z : m.data_) z = std::conj(z);
  return m;
}

Complex CMatrix::trace() const {
  if (!square()) throw InvalidArgument("trace: matrix not square");
  Complex t{0.0, 0.0};
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("operator*: inner dimensions differ");
  CMatrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (!m.square()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
  return true;
}

CMatrix sandwich(const CMatrix& a, const CMatrix& b) { return a * b * a.adjoint(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  CMatrix out(a.rows() * m, a.cols() * n);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < n; ++l) out(i * m + k, j * n + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix partial_trace(const CMatrix& rho_ab, Subsystem keep) {
  if (rho_ab.rows() != 4 || rho_ab.cols() != 4)
    throw InvalidArgument("partial_trace: expected a 4x4 operator on C^2 (x) C^2");
  CMatrix out(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        if (keep == Subsystem::A)
          out(i, j) += rho_ab(2 * i + k, 2 * j + k);
        else
          out(i, j) += rho_ab(2 * k + i, 2 * k + j);
      }
  return out;
}

std::vector<double> eig_hermitian(const CMatrix& m) {
  if (!m.square()) throw InvalidArgument("eig_hermitian: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0 || n > kMaxDim) throw InvalidArgument("eig_hermitian: dimension outside 1..8");
  double scale = 1.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(m(r, c)));
  if (!is_hermitian(m, kHermitianTol * scale))
    throw InvalidArgument("eig_hermitian: matrix is not Hermitian");

  if (n == 1) return {m(0, 0).real()};
  if (n == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    return {mean - radius, mean + radius};
  }

  // H = X + iY  ->  [[X, -Y], [Y, X]] is real symmetric with every eigenvalue
  // of H appearing twice.
  const std::size_t n2 = 2 * n;
  std::vector<double> real(n2 * n2);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      // Symmetrize to wash out sub-tolerance asymmetry.
      const Complex h = 0.5 * (m(r, c) + std::conj(m(c, r)));
      real[r * n2 + c] = h.real();
      real[(r + n) * n2 + (c + n)] = h.real();
      real[r * n2 + (c + n)] = -h.imag();
      real[(r + n) * n2 + c] = h.imag();
    }
  std::vector<double> doubled = jacobi_symmetric(std::move(real), n2);
  std::sort(doubled.begin(), doubled.end());
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return eig;
}

double von_neumann_entropy(const CMatrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream msg;
    msg << "von_neumann_entropy: trace " << tr.real() << " is not 1";
    throw InvalidArgument(msg.str());
  }
  double s = 0.0;
  for (double lambda : eig_hermitian(rho)) {
    if (lambda < -kNegativeTol)
      throw InvalidArgument("von_neumann_entropy: negative eigenvalue, state is not physical");
    if (lambda <= 0.0) continue;
    s -= lambda * std::log2(lambda);
  }
  return std::max(0.0, s);
}

double shannon_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace phasekey::qmath
