#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "quadhull/symlinalg.hpp"
#include "quadhull/symmat.hpp"

namespace quadhull {

enum class ConstraintSense { Eq, Geq };
enum class Direction { Min, Max };

struct SdpConstraint {
  SymMatrix a;
  double rhs = 0.0;
  ConstraintSense sense = ConstraintSense::Eq;
};

// Standard-form SDP over a single PSD block:
//   min/max  objective . X   s.t.  a_k . X  =/>=  rhs_k,  X psd.
struct SdpProblem {
  int cone_dim = 0;
  SymMatrix objective;
  std::vector<SdpConstraint> constraints;
  Direction direction = Direction::Min;
};

enum class SdpStatus { Optimal, Unbounded, Infeasible, NumericalTrouble };

// y and S certify the minimization form (the objective is negated internally
// for Max problems); primal_obj/dual_obj are reported in the original sense.
// For Infeasible, y holds the Farkas certificate: sum_k y_k A_k psd-negative,
// b^T y > 0, with y_k >= 0 on Geq rows.
struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  SymMatrix X;
  std::vector<double> y;
  SymMatrix S;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  std::optional<SymMatrix> ray;  // improving ray when Unbounded (original sense)
  int iterations = 0;
  double weak_duality_violation = 0.0;  // max scaled (dual - primal) at near-feasible iterates
  std::string note;
};

struct SdpSettings {
  double tol = 1e-8;
  int max_iter = 200;
};

namespace detail {

using Flat = std::vector<double>;

inline Flat to_flat(const SymMatrix& m) { return m.raw(); }

inline SymMatrix sym_of(int n, const Flat& a) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      m.set(i, j, 0.5 * (a[static_cast<std::size_t>(i) * n + j] +
                         a[static_cast<std::size_t>(j) * n + i]));
  return m;
}

inline Flat flat_mul(int n, const Flat& a, const Flat& b) {
  Flat c(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a[static_cast<std::size_t>(i) * n + k];
      if (aik == 0.0) continue;
      const std::size_t krow = static_cast<std::size_t>(k) * n;
      const std::size_t irow = static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) c[irow + j] += aik * b[krow + j];
    }
  return c;
}

// trace(A * M) for symmetric A and a general square M.
inline double trace_prod(int n, const Flat& a, const Flat& m) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += a[static_cast<std::size_t>(i) * n + j] * m[static_cast<std::size_t>(j) * n + i];
  return s;
}

// Internal equality form: Geq rows get a -1 slack on their own diagonal slot,
// mirroring the paper's embedding of inequalities into equality standard form.
struct StdForm {
  int n = 0;         // extended cone dimension
  int orig_dim = 0;  // leading block is the user's variable
  bool flipped = false;
  SymMatrix C;
  std::vector<SymMatrix> A;
  std::vector<double> b;
};

inline StdForm to_standard(const SdpProblem& p) {
  StdForm f;
  f.orig_dim = p.cone_dim;
  f.flipped = (p.direction == Direction::Max);
  int n_slack = 0;
  for (const auto& c : p.constraints)
    if (c.sense == ConstraintSense::Geq) ++n_slack;
  f.n = p.cone_dim + n_slack;
  f.C = (f.flipped ? (p.objective * -1.0) : p.objective).embedded(f.n);
  int slot = p.cone_dim;
  for (const auto& c : p.constraints) {
    SymMatrix a = c.a.embedded(f.n);
    if (c.sense == ConstraintSense::Geq) {
      a.set(slot, slot, -1.0);
      ++slot;
    }
    f.A.push_back(std::move(a));
    f.b.push_back(c.rhs);
  }
  return f;
}

// Max step alpha with M + alpha*D staying psd, via min eig of L^-1 D L^-T.
inline double max_step(const SymMatrix& M, const SymMatrix& D) {
  const int n = M.dim();
  auto ch = cholesky(M);
  if (!ch.ok) {
    SymMatrix Mj = M;
    const double jit = 1e-12 * (1.0 + M.frobenius_norm());
    for (int i = 0; i < n; ++i) Mj.add(i, i, jit);
    ch = cholesky(Mj);
    if (!ch.ok) return 0.0;
  }
  // B = L^-1 D, W = B L^-T computed as W^T = L^-1 B^T
  Flat B(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) col[r] = D(r, c);
    for (int i = 0; i < n; ++i) {
      double s = col[i];
      for (int k = 0; k < i; ++k) s -= ch.L[static_cast<std::size_t>(i) * n + k] * col[k];
      col[i] = s / ch.L[static_cast<std::size_t>(i) * n + i];
    }
    for (int r = 0; r < n; ++r) B[static_cast<std::size_t>(r) * n + c] = col[r];
  }
  Flat Wt(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) col[r] = B[static_cast<std::size_t>(c) * n + r];
    for (int i = 0; i < n; ++i) {
      double s = col[i];
      for (int k = 0; k < i; ++k) s -= ch.L[static_cast<std::size_t>(i) * n + k] * col[k];
      col[i] = s / ch.L[static_cast<std::size_t>(i) * n + i];
    }
    for (int r = 0; r < n; ++r) Wt[static_cast<std::size_t>(r) * n + c] = col[r];
  }
  const double lam = eigendecompose(sym_of(n, Wt)).eigenvalues.front();
  if (lam >= -1e-16) return std::numeric_limits<double>::infinity();
  return -1.0 / lam;
}

struct RayCheck {
  bool ok = false;
  SymMatrix ray;
};

// Polish a diverging iterate into a certified improving ray: alternate
// projection onto {A_k . R = 0} with psd clipping, then verify.
inline RayCheck certify_ray(const StdForm& f, const SymMatrix& X_div) {
  RayCheck out;
  const int n = f.n;
  const int k = static_cast<int>(f.A.size());
  const double nx = X_div.frobenius_norm();
  if (!(nx > 0.0) || !std::isfinite(nx)) return out;
  SymMatrix R = X_div * (1.0 / nx);

  SymMatrix gram(k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) gram.set(i, j, f.A[i].inner(f.A[j]));
  for (int i = 0; i < k; ++i) gram.add(i, i, 1e-12 * (1.0 + gram(i, i)));
  const auto gch = cholesky(gram);
  if (!gch.ok) return out;

  double a_scale = 1.0;
  for (const auto& a : f.A) a_scale = std::max(a_scale, a.frobenius_norm());
  const double tgt = 1e-9 * a_scale;

  for (int round = 0; round < 80; ++round) {
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) v[i] = f.A[i].inner(R);
    const auto nu = chol_solve(gch, v);
    for (int i = 0; i < k; ++i) R -= f.A[i] * nu[i];
    R = psd_clip(R);
    const double nr = R.frobenius_norm();
    if (!(nr > 1e-12)) return out;
    R *= 1.0 / nr;
    double res = 0.0;
    for (int i = 0; i < k; ++i) res = std::max(res, std::abs(f.A[i].inner(R)));
    if (res <= tgt && min_eigenvalue(R) >= -tgt) break;
  }

  double res = 0.0;
  for (int i = 0; i < k; ++i)
    res = std::max(res, std::abs(f.A[i].inner(R)) / (1.0 + f.A[i].frobenius_norm()));
  const bool feas = res <= 1e-7 && min_eigenvalue(R) >= -1e-7;
  const bool improving = f.C.inner(R) <= -1e-7 * (1.0 + f.C.frobenius_norm());
  if (feas && improving) {
    out.ok = true;
    out.ray = std::move(R);
  }
  return out;
}

struct FarkasCheck {
  bool ok = false;
  std::vector<double> y;
};

// Farkas certificate of primal infeasibility from a diverging dual iterate:
// sum y_k A_k psd-negative and b^T y > 0 (slack slots force y_k >= 0 on Geq).
inline FarkasCheck certify_farkas(const StdForm& f, const std::vector<double>& y_div) {
  FarkasCheck out;
  const int k = static_cast<int>(f.A.size());
  const double ny = norm2(y_div);
  if (!(ny > 0.0) || !std::isfinite(ny)) return out;
  std::vector<double> y = scaled(y_div, 1.0 / ny);
  SymMatrix Z(f.n);
  for (int i = 0; i < k; ++i) Z += f.A[i] * y[i];
  double a_scale = 1.0;
  for (const auto& a : f.A) a_scale = std::max(a_scale, a.frobenius_norm());
  const double byv = dot(f.b, y);
  if (max_eigenvalue(Z) <= 1e-7 * a_scale && byv >= 1e-7 * (1.0 + norm_inf(f.b))) {
    out.ok = true;
    out.y = std::move(y);
  }
  return out;
}

struct IpmResult {
  SdpStatus status = SdpStatus::NumericalTrouble;
  SymMatrix X, S;
  std::vector<double> y;
  double pobj = 0.0, dobj = 0.0;
  std::optional<SymMatrix> ray;
  std::vector<double> farkas;
  int iterations = 0;
  double weak_viol = 0.0;
  std::string note;
};

// HKM search direction with Mehrotra predictor-corrector, dense.
inline IpmResult ipm(const StdForm& f, const SdpSettings& st) {
  IpmResult out;
  const int n = f.n;
  const int k = static_cast<int>(f.A.size());

  double tau = 1.0;
  for (int i = 0; i < k; ++i)
    tau = std::max({tau, std::abs(f.b[i]), f.A[i].frobenius_norm()});
  tau = 1.0 + std::max(tau, f.C.frobenius_norm());

  SymMatrix X = SymMatrix::identity(n) * tau;
  SymMatrix S = SymMatrix::identity(n) * tau;
  std::vector<double> y(k, 0.0);

  const double bscale = 1.0 + norm2(f.b);
  const double cscale = 1.0 + f.C.frobenius_norm();
  const double unb_try = 1e6 * tau;
  const double unb_hard = std::max(1.0, norm_inf(f.b)) / st.tol;
  int stall_count = 0;

  auto finish = [&](SdpStatus status, const std::string& note) {
    out.status = status;
    out.X = X;
    out.S = S;
    out.y = y;
    out.pobj = f.C.inner(X);
    out.dobj = dot(f.b, y);
    out.note = note;
    return out;
  };

  for (int iter = 0; iter < st.max_iter; ++iter) {
    out.iterations = iter;

    std::vector<double> rp(k);
    for (int i = 0; i < k; ++i) rp[i] = f.b[i] - f.A[i].inner(X);
    SymMatrix Rd = f.C - S;
    for (int i = 0; i < k; ++i) Rd -= f.A[i] * y[i];

    const double pobj = f.C.inner(X);
    const double dobj = dot(f.b, y);
    const double prel = norm2(rp) / bscale;
    const double drel = Rd.frobenius_norm() / cscale;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = X.inner(S) / n;

    if (prel <= 1e-6 && drel <= 1e-6)
      out.weak_viol = std::max(out.weak_viol, (dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj)));

    if (prel <= st.tol && drel <= st.tol && relgap <= st.tol)
      return finish(SdpStatus::Optimal, "");

    // Divergence watches. Certificates are verified before declaring.
    if (pobj < -unb_try && prel <= 1e-6) {
      auto rc = certify_ray(f, X);
      if (rc.ok) {
        auto r = finish(SdpStatus::Unbounded, "");
        r.ray = rc.ray;
        out = r;
        return out;
      }
      if (pobj < -unb_hard)
        return finish(SdpStatus::NumericalTrouble,
                      "objective diverged but no certified ray was found");
    }
    if (dobj > unb_try || norm_inf(y) > unb_try) {
      auto fc = certify_farkas(f, y);
      if (fc.ok) {
        auto r = finish(SdpStatus::Infeasible, "Farkas certificate in y");
        r.y = fc.y;
        r.farkas = fc.y;
        out = r;
        return out;
      }
      if (dobj > unb_hard)
        return finish(SdpStatus::NumericalTrouble,
                      "dual objective diverged but no certified Farkas vector was found");
    }

    auto chS = cholesky(S);
    if (!chS.ok) return finish(SdpStatus::NumericalTrouble, "dual slack lost definiteness");
    const SymMatrix Sinv = chol_inverse(chS);

    const Flat Xf = to_flat(X);
    const Flat Sif = to_flat(Sinv);

    // Schur complement M_jk = A_j . (X A_k S^-1); symmetric for the HKM direction.
    std::vector<Flat> T(k);
    for (int j = 0; j < k; ++j) T[j] = flat_mul(n, flat_mul(n, Xf, to_flat(f.A[j])), Sif);
    SymMatrix Msc(k);
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        const double vij = trace_prod(n, to_flat(f.A[i]), T[j]);
        const double vji = trace_prod(n, to_flat(f.A[j]), T[i]);
        Msc.set(i, j, 0.5 * (vij + vji));
      }
    auto chM = cholesky(Msc);
    if (!chM.ok) {
      for (int i = 0; i < k; ++i) Msc.add(i, i, 1e-12 * (1.0 + Msc(i, i)));
      chM = cholesky(Msc);
      if (!chM.ok) return finish(SdpStatus::NumericalTrouble, "singular Schur complement");
    }

    const Flat XRdSi = flat_mul(n, flat_mul(n, Xf, to_flat(Rd)), Sif);

    auto newton = [&](const Flat& Rc, SymMatrix& dX, std::vector<double>& dy, SymMatrix& dS) {
      const Flat RcSi = flat_mul(n, Rc, Sif);
      std::vector<double> rhs(k);
      for (int j = 0; j < k; ++j)
        rhs[j] = rp[j] - trace_prod(n, to_flat(f.A[j]), RcSi) +
                 trace_prod(n, to_flat(f.A[j]), XRdSi);
      dy = chol_solve(chM, rhs);
      dS = Rd;
      for (int j = 0; j < k; ++j) dS -= f.A[j] * dy[j];
      Flat rhsX = Rc;
      const Flat XdS = flat_mul(n, Xf, to_flat(dS));
      for (std::size_t i = 0; i < rhsX.size(); ++i) rhsX[i] -= XdS[i];
      dX = sym_of(n, flat_mul(n, rhsX, Sif));
    };

    // Predictor (affine scaling).
    const Flat XSf = flat_mul(n, Xf, to_flat(S));
    Flat Rc(XSf.size());
    for (std::size_t i = 0; i < Rc.size(); ++i) Rc[i] = -XSf[i];
    SymMatrix dXa, dSa;
    std::vector<double> dya;
    newton(Rc, dXa, dya, dSa);
    const double apa = std::min(1.0, 0.98 * max_step(X, dXa));
    const double ada = std::min(1.0, 0.98 * max_step(S, dSa));
    SymMatrix Xa = X + dXa * apa;
    SymMatrix Sa = S + dSa * ada;
    const double mu_aff = Xa.inner(Sa) / n;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 0.99);

    // Corrector.
    const Flat dXadSa = flat_mul(n, to_flat(dXa), to_flat(dSa));
    for (std::size_t i = 0; i < Rc.size(); ++i) Rc[i] = -XSf[i] - dXadSa[i];
    for (int i = 0; i < n; ++i) Rc[static_cast<std::size_t>(i) * n + i] += sigma * mu;
    SymMatrix dX, dS;
    std::vector<double> dy;
    newton(Rc, dX, dy, dS);

    const double ap = std::min(1.0, 0.98 * max_step(X, dX));
    const double ad = std::min(1.0, 0.98 * max_step(S, dS));
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall_count >= 2) return finish(SdpStatus::NumericalTrouble, "step length collapsed");
    } else {
      stall_count = 0;
    }

    X += dX * ap;
    axpy(ad, dy, y);
    S += dS * ad;
  }
  out.iterations = st.max_iter;
  return finish(SdpStatus::NumericalTrouble, "iteration cap reached before convergence");
}

}  // namespace detail

// Solve a small dense SDP. Never throws for solver outcomes: numerical
// failure is reported as SdpStatus::NumericalTrouble.
inline SdpSolution sdp_solve(const SdpProblem& p, const SdpSettings& settings = {}) {
  if (p.cone_dim < 1) throw std::invalid_argument("sdp_solve: cone_dim must be >= 1");
  if (p.constraints.empty()) throw std::invalid_argument("sdp_solve: at least one constraint");
  if (p.objective.dim() != p.cone_dim)
    throw std::invalid_argument("sdp_solve: objective dimension mismatch");
  for (const auto& c : p.constraints)
    if (c.a.dim() != p.cone_dim)
      throw std::invalid_argument("sdp_solve: constraint dimension mismatch");
  if (!(settings.tol > 0.0) || settings.tol > 1e-2)
    throw std::invalid_argument("sdp_solve: tol must lie in (0, 1e-2]");

  const auto f = detail::to_standard(p);
  auto r = detail::ipm(f, settings);

  SdpSolution sol;
  sol.status = r.status;
  sol.X = r.X.leading_block(p.cone_dim);
  sol.S = r.S.leading_block(p.cone_dim);
  sol.y = r.y;
  sol.iterations = r.iterations;
  sol.weak_duality_violation = r.weak_viol;
  sol.note = r.note;
  const double sgn = (p.direction == Direction::Max) ? -1.0 : 1.0;
  sol.primal_obj = sgn * r.pobj;
  sol.dual_obj = sgn * r.dobj;
  if (r.ray) sol.ray = r.ray->leading_block(p.cone_dim);
  return sol;
}

// Feasibility query: solves with a zero objective. Optimal means a feasible
// X was found; Infeasible carries the Farkas certificate in y.
inline SdpSolution sdp_feasibility(const SdpProblem& p, const SdpSettings& settings = {}) {
  SdpProblem q = p;
  q.objective = SymMatrix(p.cone_dim);
  q.direction = Direction::Min;
  return sdp_solve(q, settings);
}

}  // namespace quadhull
