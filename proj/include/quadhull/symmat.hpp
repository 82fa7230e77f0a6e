#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace quadhull {

// ---------- small dense vector helpers ----------

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline std::vector<double> scaled(const std::vector<double>& x, double alpha) {
  std::vector<double> r(x);
  for (double& v : r) v *= alpha;
  return r;
}

// Dense symmetric matrix. Full row-major storage, kept exactly symmetric:
// every mutation writes both (i,j) and (j,i).
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(int dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("SymMatrix: negative dimension");
    a_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  }

  static SymMatrix identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.a_[m.at(i, i)] = 1.0;
    return m;
  }

  static SymMatrix diagonal(const std::vector<double>& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m.a_[m.at(i, i)] = d[i];
    return m;
  }

  // v v^T
  static SymMatrix outer(const std::vector<double>& v) {
    SymMatrix m(static_cast<int>(v.size()));
    for (int i = 0; i < m.dim_; ++i)
      for (int j = 0; j < m.dim_; ++j) m.a_[m.at(i, j)] = v[i] * v[j];
    return m;
  }

  // (M + M^T)/2 from arbitrary square row data.  If asymmetry is non-null it
  // receives max_ij |M_ij - M_ji|.
  static SymMatrix symmetrized(const std::vector<std::vector<double>>& rows,
                               double* asymmetry = nullptr) {
    const int n = static_cast<int>(rows.size());
    for (const auto& r : rows)
      if (static_cast<int>(r.size()) != n)
        throw std::invalid_argument("SymMatrix::symmetrized: ragged rows");
    SymMatrix m(n);
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m.a_[m.at(i, j)] = 0.5 * (rows[i][j] + rows[j][i]);
        asym = std::max(asym, std::abs(rows[i][j] - rows[j][i]));
      }
    if (asymmetry) *asymmetry = asym;
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return a_[at(i, j)]; }

  void set(int i, int j, double v) {
    a_[at(i, j)] = v;
    a_[at(j, i)] = v;
  }

  void add(int i, int j, double v) {
    a_[at(i, j)] += v;
    if (i != j) a_[at(j, i)] += v;
  }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }

  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }

  SymMatrix& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  // Frobenius inner product <A,B> = sum_ij A_ij B_ij
  double inner(const SymMatrix& o) const {
    check_same(o);
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * o.a_[i];
    return s;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a_[at(i, i)];
    return s;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("SymMatrix::apply: size mismatch");
    std::vector<double> y(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s += a_[at(i, j)] * x[j];
      y[i] = s;
    }
    return y;
  }

  // x^T M x
  double quad_form(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("SymMatrix::quad_form: size mismatch");
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim_; ++j) row += a_[at(i, j)] * x[j];
      s += x[i] * row;
    }
    return s;
  }

  // Leading principal block of size k.
  SymMatrix leading_block(int k) const {
    if (k < 0 || k > dim_) throw std::invalid_argument("leading_block: bad size");
    SymMatrix m(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) m.a_[m.at(i, j)] = a_[at(i, j)];
    return m;
  }

  // Embed into a larger zero matrix as the leading block.
  SymMatrix embedded(int big_dim) const {
    if (big_dim < dim_) throw std::invalid_argument("embedded: target too small");
    SymMatrix m(big_dim);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m.a_[m.at(i, j)] = a_[at(i, j)];
    return m;
  }

  const std::vector<double>& raw() const { return a_; }

 private:
  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>(i) * dim_ + j;
  }
  void check_same(const SymMatrix& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch");
  }

  int dim_ = 0;
  std::vector<double> a_;
};

}  // namespace quadhull
