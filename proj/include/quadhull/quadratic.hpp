#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadhull/symmat.hpp"

namespace quadhull {

// One quadratic polynomial  f(x) = constant + linear.x + x^T quad x,
// with quad stored exactly symmetric. Immutable after construction.
struct QuadraticFunction {
  double constant = 0.0;
  std::vector<double> linear;
  SymMatrix quad;

  QuadraticFunction() = default;

  QuadraticFunction(double a, std::vector<double> b, SymMatrix f)
      : constant(a), linear(std::move(b)), quad(std::move(f)) {
    if (static_cast<int>(linear.size()) != quad.dim())
      throw std::invalid_argument("QuadraticFunction: linear/quad dimension mismatch");
  }

  // Raw rows are symmetrized; x^T M x only sees the symmetric part.
  QuadraticFunction(double a, std::vector<double> b,
                    const std::vector<std::vector<double>>& f_rows)
      : QuadraticFunction(a, std::move(b), SymMatrix::symmetrized(f_rows)) {}

  static QuadraticFunction constant_fn(int n, double a) {
    return QuadraticFunction(a, std::vector<double>(n, 0.0), SymMatrix(n));
  }

  static QuadraticFunction form(SymMatrix f) {
    const int n = f.dim();
    return QuadraticFunction(0.0, std::vector<double>(n, 0.0), std::move(f));
  }

  int dim() const { return quad.dim(); }

  double evaluate(const std::vector<double>& x) const {
    if (x.size() != linear.size())
      throw std::invalid_argument("QuadraticFunction::evaluate: dimension mismatch");
    return constant + dot(linear, x) + quad.quad_form(x);
  }

  std::vector<double> gradient(const std::vector<double>& x) const {
    auto g = quad.apply(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = linear[i] + 2.0 * g[i];
    return g;
  }
};

inline QuadraticFunction operator+(const QuadraticFunction& f, const QuadraticFunction& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("quadratic +: dimension mismatch");
  QuadraticFunction r = f;
  r.constant += g.constant;
  axpy(1.0, g.linear, r.linear);
  r.quad += g.quad;
  return r;
}

inline QuadraticFunction operator*(double s, const QuadraticFunction& f) {
  QuadraticFunction r = f;
  r.constant *= s;
  for (double& v : r.linear) v *= s;
  r.quad *= s;
  return r;
}

inline QuadraticFunction linear_combination(const std::vector<QuadraticFunction>& fs,
                                            const std::vector<double>& coeffs) {
  if (fs.size() != coeffs.size())
    throw std::invalid_argument("linear_combination: size mismatch");
  if (fs.empty()) throw std::invalid_argument("linear_combination: empty");
  QuadraticFunction r = coeffs[0] * fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) r = r + coeffs[i] * fs[i];
  return r;
}

// Canonical (n+1)x(n+1) lift of a quadratic:
// [1 x]^T G [1 x] = f(x), block layout [[constant, linear^T/2], [linear/2, quad]].
struct GramForm {
  SymMatrix matrix;
};

inline GramForm gram(const QuadraticFunction& f) {
  const int n = f.dim();
  SymMatrix g(n + 1);
  g.set(0, 0, f.constant);
  for (int i = 0; i < n; ++i) g.set(0, i + 1, 0.5 * f.linear[i]);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g.set(i + 1, j + 1, f.quad(i, j));
  return GramForm{std::move(g)};
}

inline QuadraticFunction from_gram(const GramForm& g) {
  const int n = g.matrix.dim() - 1;
  if (n < 0) throw std::invalid_argument("from_gram: empty matrix");
  QuadraticFunction f;
  f.constant = g.matrix(0, 0);
  f.linear.resize(n);
  for (int i = 0; i < n; ++i) f.linear[i] = 2.0 * g.matrix(0, i + 1);
  f.quad = SymMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) f.quad.set(i, j, g.matrix(i + 1, j + 1));
  return f;
}

// x0^2 f(x/x0): the pure quadratic form in (x0, x1, ..., xn) whose matrix is
// exactly the Gram lift of f. Evaluating at (1, x) recovers f(x).
inline QuadraticFunction homogenize(const QuadraticFunction& f) {
  return QuadraticFunction::form(gram(f).matrix);
}

// Homogeneous modulo constants: no linear part (a nonzero constant is fine).
inline bool is_homogeneous_modulo_constant(const QuadraticFunction& f, double tol = 1e-12) {
  if (tol < 0.0) throw std::invalid_argument("is_homogeneous_modulo_constant: tol < 0");
  return norm_inf(f.linear) <= tol;
}

enum class ConstraintKind { Inequality, Equality };

// Inequality: membership in S(q) = {q(x) >= 0}; Equality: E(q) = {q(x) = 0}.
struct QuadraticConstraint {
  QuadraticFunction q;
  ConstraintKind kind = ConstraintKind::Inequality;

  bool satisfied(const std::vector<double>& x, double tol) const {
    const double v = q.evaluate(x);
    return kind == ConstraintKind::Equality ? std::abs(v) <= tol : v >= -tol;
  }
};

enum class SpecVariant { SingleConstraint, TwoHomogeneous, Rational };

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One of the three parameterized-set descriptions: a quadratic map over a
// single-constraint set, a quadratic-form map over two homogeneous (modulo
// constants) constraints, or a rational map with common denominator over a
// single-constraint set.
struct ProblemSpec {
  SpecVariant variant = SpecVariant::SingleConstraint;
  int n = 0;
  std::vector<QuadraticFunction> functions;
  std::vector<QuadraticConstraint> constraints;
  std::optional<QuadraticFunction> denominator;

  static ProblemSpec single_constraint(int n, std::vector<QuadraticFunction> fs,
                                       QuadraticConstraint c) {
    ProblemSpec s;
    s.variant = SpecVariant::SingleConstraint;
    s.n = n;
    s.functions = std::move(fs);
    s.constraints = {std::move(c)};
    s.validate();
    return s;
  }

  static ProblemSpec two_homogeneous(int n, std::vector<QuadraticFunction> fs,
                                     QuadraticConstraint c1, QuadraticConstraint c2) {
    ProblemSpec s;
    s.variant = SpecVariant::TwoHomogeneous;
    s.n = n;
    s.functions = std::move(fs);
    s.constraints = {std::move(c1), std::move(c2)};
    s.validate();
    return s;
  }

  static ProblemSpec rational(int n, std::vector<QuadraticFunction> fs,
                              QuadraticFunction denom, QuadraticConstraint c) {
    ProblemSpec s;
    s.variant = SpecVariant::Rational;
    s.n = n;
    s.functions = std::move(fs);
    s.denominator = std::move(denom);
    s.constraints = {std::move(c)};
    s.validate();
    return s;
  }

  void validate(double hom_tol = 1e-12) const {
    auto check_dim = [&](const QuadraticFunction& f, const std::string& where) {
      if (f.dim() != n)
        throw ValidationError(where + ": dimension " + std::to_string(f.dim()) +
                              " does not match n=" + std::to_string(n));
    };
    for (std::size_t i = 0; i < functions.size(); ++i)
      check_dim(functions[i], "functions[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < constraints.size(); ++i)
      check_dim(constraints[i].q, "constraints[" + std::to_string(i) + "].q");

    switch (variant) {
      case SpecVariant::SingleConstraint:
        if (constraints.size() != 1)
          throw ValidationError("single_constraint: expected exactly 1 constraint");
        break;
      case SpecVariant::TwoHomogeneous: {
        if (constraints.size() != 2)
          throw ValidationError("two_homogeneous: expected exactly 2 constraints");
        auto check_hom = [&](const QuadraticFunction& f, bool allow_constant,
                             const std::string& where) {
          for (int j = 0; j < n; ++j)
            if (std::abs(f.linear[j]) > hom_tol)
              throw ValidationError(where + ": linear coefficient b[" + std::to_string(j) +
                                    "] = " + std::to_string(f.linear[j]) +
                                    " breaks homogeneity (must be 0)");
          if (!allow_constant && std::abs(f.constant) > hom_tol)
            throw ValidationError(where + ": constant term " + std::to_string(f.constant) +
                                  " breaks homogeneity (must be 0)");
        };
        for (std::size_t i = 0; i < functions.size(); ++i)
          check_hom(functions[i], false, "functions[" + std::to_string(i) + "]");
        for (std::size_t i = 0; i < constraints.size(); ++i)
          check_hom(constraints[i].q, true, "constraints[" + std::to_string(i) + "].q");
        break;
      }
      case SpecVariant::Rational:
        if (!denominator) throw ValidationError("rational: denominator is required");
        if (constraints.size() != 1)
          throw ValidationError("rational: expected exactly 1 constraint");
        check_dim(*denominator, "denominator");
        break;
    }
  }

  int output_dim() const { return static_cast<int>(functions.size()); }

  // Image of a parameter point under the map (rational specs divide by f0).
  std::vector<double> image(const std::vector<double>& x) const {
    std::vector<double> y(functions.size());
    for (std::size_t i = 0; i < functions.size(); ++i) y[i] = functions[i].evaluate(x);
    if (variant == SpecVariant::Rational) {
      const double d = denominator->evaluate(x);
      for (double& v : y) v /= d;
    }
    return y;
  }

  bool feasible(const std::vector<double>& x, double tol) const {
    for (const auto& c : constraints)
      if (!c.satisfied(x, tol)) return false;
    return true;
  }
};

}  // namespace quadhull
