#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "quadhull/quadratic.hpp"
#include "quadhull/sdp.hpp"
#include "quadhull/symlinalg.hpp"

namespace quadhull {

enum class LiftShape {
  Moment,       // (n+1)x(n+1) moment matrix [[1, x^T],[x, X]], corner pinned to 1
  Homogeneous,  // n x n variable standing for x x^T
};

// A lifted PSD variable, affine constraints on it, and the linear output map
// into R^m. Feasible lifted points map into the represented convex set.
struct SpectrahedralShadow {
  int lift_dim = 0;
  int param_dim = 0;
  LiftShape shape = LiftShape::Moment;
  std::vector<SdpConstraint> constraints;
  std::vector<SymMatrix> output_map;  // value_i = output_map[i] . Y

  int output_dim() const { return static_cast<int>(output_map.size()); }

  std::vector<double> image_of(const SymMatrix& Y) const {
    std::vector<double> v(output_map.size());
    for (std::size_t i = 0; i < output_map.size(); ++i) v[i] = output_map[i].inner(Y);
    return v;
  }
};

inline ConstraintSense sense_of(ConstraintKind k) {
  return k == ConstraintKind::Equality ? ConstraintSense::Eq : ConstraintSense::Geq;
}

// Canonical lifted point of a parameter vector: the rank-1 moment matrix for
// Moment shapes, x x^T for Homogeneous ones.
inline SymMatrix lift_point(const SpectrahedralShadow& shadow, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != shadow.param_dim)
    throw std::invalid_argument("lift_point: dimension mismatch");
  if (shadow.shape == LiftShape::Homogeneous) return SymMatrix::outer(x);
  std::vector<double> v(x.size() + 1);
  v[0] = 1.0;
  std::copy(x.begin(), x.end(), v.begin() + 1);
  return SymMatrix::outer(v);
}

// First-order moment relaxation of a single-constraint spec (the W_in / W_eq
// picture): moment matrix psd, corner pinned to 1, one localizing row, and
// Gram-lift output functionals.
inline SpectrahedralShadow build_single(const ProblemSpec& spec) {
  if (spec.variant != SpecVariant::SingleConstraint)
    throw std::invalid_argument("build_single: spec is not single_constraint");
  spec.validate();
  const int n = spec.n;
  SpectrahedralShadow sh;
  sh.lift_dim = n + 1;
  sh.param_dim = n;
  sh.shape = LiftShape::Moment;

  SymMatrix corner(n + 1);
  corner.set(0, 0, 1.0);
  sh.constraints.push_back({corner, 1.0, ConstraintSense::Eq});
  sh.constraints.push_back(
      {gram(spec.constraints[0].q).matrix, 0.0, sense_of(spec.constraints[0].kind)});
  for (const auto& f : spec.functions) sh.output_map.push_back(gram(f).matrix);
  return sh;
}

// The H relaxations of a two-homogeneous spec: X psd, B_j . X >=/= c_j,
// outputs A_i . X, no corner pinning.
inline SpectrahedralShadow build_two_homogeneous(const ProblemSpec& spec) {
  if (spec.variant != SpecVariant::TwoHomogeneous)
    throw std::invalid_argument("build_two_homogeneous: spec is not two_homogeneous");
  spec.validate();  // names the offending coefficient on homogeneity violations
  SpectrahedralShadow sh;
  sh.lift_dim = spec.n;
  sh.param_dim = spec.n;
  sh.shape = LiftShape::Homogeneous;
  for (const auto& c : spec.constraints)
    sh.constraints.push_back({c.q.quad, -c.q.constant, sense_of(c.kind)});
  for (const auto& f : spec.functions) sh.output_map.push_back(f.quad);
  return sh;
}

// Reduce the rational case to the two-homogeneous case: one more variable x0,
// the denominator pinned to 1 as an equality, the original constraint
// homogenized, all on the quadratic forms' Gram lifts. The sign condition
// x0 > 0 drops because all forms here are quadratic.
inline ProblemSpec homogenize_spec(const ProblemSpec& spec) {
  if (spec.variant != SpecVariant::Rational)
    throw std::invalid_argument("homogenize_spec: spec is not rational");
  if (!spec.denominator) throw std::invalid_argument("homogenize_spec: missing denominator");
  spec.validate();
  std::vector<QuadraticFunction> fs;
  fs.reserve(spec.functions.size());
  for (const auto& f : spec.functions) fs.push_back(homogenize(f));
  QuadraticFunction denom_form = homogenize(*spec.denominator);
  denom_form.constant = -1.0;  // (x^h)^T F0 x^h = 1
  QuadraticConstraint c1{denom_form, ConstraintKind::Equality};
  QuadraticConstraint c2{homogenize(spec.constraints[0].q), spec.constraints[0].kind};
  return ProblemSpec::two_homogeneous(spec.n + 1, std::move(fs), std::move(c1), std::move(c2));
}

inline SpectrahedralShadow build_shadow(const ProblemSpec& spec) {
  switch (spec.variant) {
    case SpecVariant::SingleConstraint:
      return build_single(spec);
    case SpecVariant::TwoHomogeneous:
      return build_two_homogeneous(spec);
    case SpecVariant::Rational:
      return build_two_homogeneous(homogenize_spec(spec));
  }
  throw std::invalid_argument("build_shadow: unknown variant");
}

// ---------- exactness condition for the two-homogeneous case ----------

// Result of searching for sign-restricted multipliers with
// mu1 B1 + mu2 B2 negative definite. margin is the most negative achievable
// max-eigenvalue over the normalized admissible (mu1, mu2) circle arc.
struct ConditionReport {
  bool holds = false;
  std::optional<std::pair<double, double>> witness;
  double margin = 0.0;
};

namespace detail {

inline double golden_min(const std::function<double(double)>& g, double lo, double hi,
                         int iters, double* arg_out) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = g(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = g(xm);
  double best = fm, arg = xm;
  if (f1 < best) best = f1, arg = x1;
  if (f2 < best) best = f2, arg = x2;
  if (arg_out) *arg_out = arg;
  return best;
}

}  // namespace detail

// The condition is 2-parameter, so a 1-D eigenvalue minimization over the
// normalized circle arc is exact up to tolerance; equality constraints admit
// multipliers of either sign, which widens the admissible arc.
inline ConditionReport check_condition(const SymMatrix& B1, const SymMatrix& B2,
                                       ConstraintKind kind1, ConstraintKind kind2,
                                       double rel_tol = 1e-9) {
  if (B1.dim() != B2.dim()) throw std::invalid_argument("check_condition: dimension mismatch");
  const double pi = 3.14159265358979323846;
  double lo, hi;
  const bool e1 = kind1 == ConstraintKind::Equality;
  const bool e2 = kind2 == ConstraintKind::Equality;
  if (e1 && e2) {
    lo = 0.0;
    hi = 2.0 * pi;
  } else if (e1) {  // mu2 >= 0
    lo = 0.0;
    hi = pi;
  } else if (e2) {  // mu1 >= 0
    lo = -0.5 * pi;
    hi = 0.5 * pi;
  } else {
    lo = 0.0;
    hi = 0.5 * pi;
  }

  std::function<double(double)> g = [&](double th) {
    return max_eigenvalue(B1 * std::cos(th) + B2 * std::sin(th));
  };

  const int segments = 96;
  double best = std::numeric_limits<double>::infinity();
  double best_arg = lo;
  const double h = (hi - lo) / segments;
  for (int s = 0; s < segments; ++s) {
    double arg;
    const double v = detail::golden_min(g, lo + s * h, lo + (s + 1) * h, 48, &arg);
    if (v < best) {
      best = v;
      best_arg = arg;
    }
  }
  double w = h;
  for (int stage = 0; stage < 3; ++stage) {  // local refinement around the best arc point
    w /= 8.0;
    double arg;
    const double v = detail::golden_min(g, std::max(lo, best_arg - w),
                                        std::min(hi, best_arg + w), 48, &arg);
    if (v < best) {
      best = v;
      best_arg = arg;
    }
  }

  ConditionReport rep;
  rep.margin = best;
  const double tol = rel_tol * (1.0 + std::max(B1.frobenius_norm(), B2.frobenius_norm()));
  rep.holds = best < -tol;
  if (rep.holds) {
    double mu1 = std::cos(best_arg), mu2 = std::sin(best_arg);
    if (!e1 && mu1 < 0.0 && mu1 > -1e-12) mu1 = 0.0;
    if (!e2 && mu2 < 0.0 && mu2 > -1e-12) mu2 = 0.0;
    // verify the witness independently before reporting it
    if (max_eigenvalue(B1 * mu1 + B2 * mu2) < 0.0 && (e1 || mu1 >= 0.0) && (e2 || mu2 >= 0.0)) {
      rep.witness = std::make_pair(mu1, mu2);
    } else {
      rep.holds = false;
    }
  }
  return rep;
}

// The (n+#Geq)-dimensional equality embedding from the two-constraint case:
// each Geq row gets a -1 slack entry on its own diagonal slot. With two Geq
// rows this is exactly the paper's (n+2) x (n+2) construction.
inline SdpProblem embed_equality_form(const SdpProblem& p) {
  if (p.constraints.size() != 2)
    throw std::invalid_argument("embed_equality_form: expected exactly two constraints");
  int n_slack = 0;
  for (const auto& c : p.constraints)
    if (c.sense == ConstraintSense::Geq) ++n_slack;
  SdpProblem q;
  q.cone_dim = p.cone_dim + n_slack;
  q.direction = p.direction;
  q.objective = p.objective.embedded(q.cone_dim);
  int slot = p.cone_dim;
  for (const auto& c : p.constraints) {
    SymMatrix a = c.a.embedded(q.cone_dim);
    if (c.sense == ConstraintSense::Geq) {
      a.set(slot, slot, -1.0);
      ++slot;
    }
    q.constraints.push_back({std::move(a), c.rhs, ConstraintSense::Eq});
  }
  return q;
}

// Advisory nonemptiness probe: the exactness theorems assume T != {}; the
// builders do not verify it, this sampler-based check just warns.
inline bool appears_nonempty(const ProblemSpec& spec, int attempts, std::uint64_t seed);

}  // namespace quadhull
