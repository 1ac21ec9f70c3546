#include "socopf/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace socopf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Standard-form translation
//
//   minimize    (1/2) x'Px + q'x
//   subject to  A x = b
//               G x + s = h,  s in K = R+^{n_lp} x SOC(d_1) x ... x SOC(d_M)
//
// Boxes become LP rows (pinned boxes lower == upper become equality rows),
// each rotated cone block (u, v, w) maps to a standard SOC via the
// orthogonal involution ((u+v)/sqrt2, (u-v)/sqrt2, w).
// ---------------------------------------------------------------------------

struct ConeLayout {
  int n_lp = 0;
  std::vector<int> dims;  // SOC block dimensions
  std::vector<int> offs;  // offsets of SOC blocks within the m-vector
  int m = 0;
  int degree() const { return n_lp + static_cast<int>(dims.size()); }
};

struct LpRowOrigin {
  enum Kind { Ineq, Upper, Lower } kind = Ineq;
  int index = 0;  // inequality row or variable index
};

struct StandardForm {
  int n = 0, p = 0, m = 0;
  Eigen::VectorXd pdiag;  // diagonal of P
  Eigen::VectorXd q;
  double c0 = 0.0;
  Eigen::SparseMatrix<double> A, At;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G, Gt;
  Eigen::VectorXd h;
  ConeLayout layout;
  std::vector<LpRowOrigin> lp_origin;
  std::vector<int> pinned_vars;  // one extra equality row per pinned box
  int n_prog_eq = 0;
};

StandardForm translate(const ConicProgram& prog) {
  StandardForm sf;
  const int n = prog.n_vars;
  sf.n = n;
  sf.pdiag = 2.0 * prog.curvature;
  sf.q = prog.linear_cost;
  sf.c0 = prog.constant_cost;

  // equalities: program rows plus pinned boxes
  for (int i = 0; i < n; ++i)
    if (prog.lower[i] == prog.upper[i] && std::isfinite(prog.lower[i]))
      sf.pinned_vars.push_back(i);
  sf.n_prog_eq = prog.n_eq();
  sf.p = sf.n_prog_eq + static_cast<int>(sf.pinned_vars.size());
  std::vector<Eigen::Triplet<double>> atrip;
  for (int j = 0; j < prog.eq_matrix.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(prog.eq_matrix, j); it; ++it)
      atrip.emplace_back(static_cast<int>(it.row()), j, it.value());
  sf.b.resize(sf.p);
  sf.b.head(sf.n_prog_eq) = prog.eq_rhs;
  for (size_t k = 0; k < sf.pinned_vars.size(); ++k) {
    atrip.emplace_back(sf.n_prog_eq + static_cast<int>(k), sf.pinned_vars[k], 1.0);
    sf.b[sf.n_prog_eq + static_cast<int>(k)] = prog.lower[sf.pinned_vars[k]];
  }
  sf.A.resize(sf.p, n);
  sf.A.setFromTriplets(atrip.begin(), atrip.end());

  // LP rows: explicit inequalities, then finite non-pinned box sides
  std::vector<Eigen::Triplet<double>> gtrip;
  std::vector<double> hvals;
  for (int j = 0; j < prog.ineq_matrix.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(prog.ineq_matrix, j); it; ++it)
      gtrip.emplace_back(static_cast<int>(it.row()), j, it.value());
  for (int i = 0; i < prog.n_ineq(); ++i) {
    hvals.push_back(prog.ineq_rhs[i]);
    sf.lp_origin.push_back({LpRowOrigin::Ineq, i});
  }
  for (int i = 0; i < n; ++i) {
    if (prog.lower[i] == prog.upper[i]) continue;  // pinned
    if (std::isfinite(prog.upper[i])) {
      gtrip.emplace_back(static_cast<int>(hvals.size()), i, 1.0);
      hvals.push_back(prog.upper[i]);
      sf.lp_origin.push_back({LpRowOrigin::Upper, i});
    }
    if (std::isfinite(prog.lower[i])) {
      gtrip.emplace_back(static_cast<int>(hvals.size()), i, -1.0);
      hvals.push_back(-prog.lower[i]);
      sf.lp_origin.push_back({LpRowOrigin::Lower, i});
    }
  }
  sf.layout.n_lp = static_cast<int>(hvals.size());

  // SOC blocks
  const double rt2 = std::sqrt(0.5);  // 1/sqrt(2)
  for (const auto& cone : prog.cones) {
    const int dim = 2 + static_cast<int>(cone.w.size());
    const int off = static_cast<int>(hvals.size());
    sf.layout.offs.push_back(off);
    sf.layout.dims.push_back(dim);
    // s0 = (u+v)/sqrt2, s1 = (u-v)/sqrt2, s2.. = w;  s = h - Gx
    for (const auto& t : cone.u.terms) {
      gtrip.emplace_back(off, t.var, -rt2 * t.coef);
      gtrip.emplace_back(off + 1, t.var, -rt2 * t.coef);
    }
    for (const auto& t : cone.v.terms) {
      gtrip.emplace_back(off, t.var, -rt2 * t.coef);
      gtrip.emplace_back(off + 1, t.var, rt2 * t.coef);
    }
    hvals.push_back(rt2 * (cone.u.constant + cone.v.constant));
    hvals.push_back(rt2 * (cone.u.constant - cone.v.constant));
    for (size_t k = 0; k < cone.w.size(); ++k) {
      for (const auto& t : cone.w[k].terms)
        gtrip.emplace_back(off + 2 + static_cast<int>(k), t.var, -t.coef);
      hvals.push_back(cone.w[k].constant);
    }
  }
  sf.m = static_cast<int>(hvals.size());
  sf.layout.m = sf.m;
  sf.G.resize(sf.m, n);
  sf.G.setFromTriplets(gtrip.begin(), gtrip.end());
  sf.h = Eigen::Map<Eigen::VectorXd>(hvals.data(), sf.m);
  sf.At = sf.A.transpose();
  sf.Gt = sf.G.transpose();
  return sf;
}

// ---------------------------------------------------------------------------
// Cone algebra over the structured m-vector
// ---------------------------------------------------------------------------

// min t such that u + t*e is in the cone (negative when strictly interior)
double max_step(const ConeLayout& lay, const Eigen::VectorXd& u) {
  double t = -kInf;
  for (int i = 0; i < lay.n_lp; ++i) t = std::max(t, -u[i]);
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    t = std::max(t, u.segment(o + 1, d - 1).norm() - u[o]);
  }
  return t;
}

void shift_into_cone(const ConeLayout& lay, Eigen::VectorXd& u) {
  const double ts = max_step(lay, u);
  if (ts >= -1e-8 * std::max(1.0, u.norm())) {
    const double a = 1.0 + ts;
    for (int i = 0; i < lay.n_lp; ++i) u[i] += a;
    for (size_t k = 0; k < lay.dims.size(); ++k) u[lay.offs[k]] += a;
  }
}

// largest step a >= 0 with u + a*du staying in the cone; u strictly interior
double step_to_boundary(const ConeLayout& lay, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& du) {
  double alpha = kInf;
  for (int i = 0; i < lay.n_lp; ++i)
    if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    const double f0 = u[o] * u[o] - u.segment(o + 1, d - 1).squaredNorm();
    const double f1 =
        u[o] * du[o] - u.segment(o + 1, d - 1).dot(du.segment(o + 1, d - 1));
    const double f2 = du[o] * du[o] - du.segment(o + 1, d - 1).squaredNorm();
    // roots of f2 a^2 + 2 f1 a + f0 = 0 with f0 > 0
    double root = kInf;
    if (std::abs(f2) < 1e-300) {
      if (f1 < 0.0) root = -f0 / (2.0 * f1);
    } else {
      const double disc = f1 * f1 - f2 * f0;
      if (f2 < 0.0) {
        root = (-f1 - std::sqrt(std::max(disc, 0.0))) / f2;
      } else if (disc >= 0.0 && f1 < 0.0) {
        root = (-f1 - std::sqrt(disc)) / f2;
      }
    }
    if (root < 0.0) root = 0.0;
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Jordan product u o v
void jprod(const ConeLayout& lay, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
           Eigen::VectorXd& out) {
  for (int i = 0; i < lay.n_lp; ++i) out[i] = u[i] * v[i];
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    const double u0 = u[o], v0 = v[o];
    out[o] = u.segment(o, d).dot(v.segment(o, d));
    out.segment(o + 1, d - 1) =
        u0 * v.segment(o + 1, d - 1) + v0 * u.segment(o + 1, d - 1);
  }
}

// solve lambda o x = d
void jdiv(const ConeLayout& lay, const Eigen::VectorXd& lmb, const Eigen::VectorXd& d,
          Eigen::VectorXd& out) {
  for (int i = 0; i < lay.n_lp; ++i) out[i] = d[i] / lmb[i];
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], dim = lay.dims[k];
    const double l0 = lmb[o];
    const auto l1 = lmb.segment(o + 1, dim - 1);
    const double denom = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * d[o] - l1.dot(d.segment(o + 1, dim - 1))) / denom;
    out[o] = x0;
    out.segment(o + 1, dim - 1) = (d.segment(o + 1, dim - 1) - x0 * l1) / l0;
  }
}

void cone_identity(const ConeLayout& lay, Eigen::VectorXd& e) {
  e.setZero();
  for (int i = 0; i < lay.n_lp; ++i) e[i] = 1.0;
  for (size_t k = 0; k < lay.dims.size(); ++k) e[lay.offs[k]] = 1.0;
}

// Nesterov-Todd scaling W with W^{-T} s = W z = lambda
struct NTScaling {
  Eigen::VectorXd lp_d;  // W = diag(d) on the LP part
  struct Soc {
    double beta = 1.0;
    Eigen::VectorXd v;  // unit-J vector, W = beta (2 v v' - J)
  };
  std::vector<Soc> socs;
  Eigen::VectorXd lambda;
};

NTScaling compute_scaling(const ConeLayout& lay, const Eigen::VectorXd& s,
                          const Eigen::VectorXd& z) {
  NTScaling w;
  w.lp_d.resize(lay.n_lp);
  w.lambda.resize(lay.m);
  for (int i = 0; i < lay.n_lp; ++i) {
    w.lp_d[i] = std::sqrt(s[i] / z[i]);
    w.lambda[i] = std::sqrt(s[i] * z[i]);
  }
  w.socs.resize(lay.dims.size());
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    auto sb = s.segment(o, d);
    auto zb = z.segment(o, d);
    const double anorm = std::sqrt(sb[0] * sb[0] - sb.tail(d - 1).squaredNorm());
    const double bnorm = std::sqrt(zb[0] * zb[0] - zb.tail(d - 1).squaredNorm());
    Eigen::VectorXd sbar = sb / anorm, zbar = zb / bnorm;
    const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
    // NT point wbar, then its Jordan square root: H(v) = Q_wbar^{1/2}
    Eigen::VectorXd v = sbar;
    v[0] += zbar[0];
    v.tail(d - 1) -= zbar.tail(d - 1);
    v /= 2.0 * gamma;
    v[0] += 1.0;
    v /= std::sqrt(2.0 * v[0]);
    w.socs[k].beta = std::sqrt(anorm / bnorm);
    w.socs[k].v = v;
    // lambda = W z
    const double vz = v.dot(zb);
    Eigen::VectorXd lam = 2.0 * vz * v;
    lam[0] -= zb[0];
    lam.tail(d - 1) += zb.tail(d - 1);
    w.lambda.segment(o, d) = w.socs[k].beta * lam;
  }
  return w;
}

// out = W u (W symmetric)
void apply_w(const ConeLayout& lay, const NTScaling& w, const Eigen::VectorXd& u,
             Eigen::VectorXd& out) {
  for (int i = 0; i < lay.n_lp; ++i) out[i] = w.lp_d[i] * u[i];
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    const auto& v = w.socs[k].v;
    auto ub = u.segment(o, d);
    const double vu = v.dot(ub);
    Eigen::VectorXd r = 2.0 * vu * v;
    r[0] -= ub[0];
    r.tail(d - 1) += ub.tail(d - 1);
    out.segment(o, d) = w.socs[k].beta * r;
  }
}

// out = W^{-1} u
void apply_w_inv(const ConeLayout& lay, const NTScaling& w, const Eigen::VectorXd& u,
                 Eigen::VectorXd& out) {
  for (int i = 0; i < lay.n_lp; ++i) out[i] = u[i] / w.lp_d[i];
  for (size_t k = 0; k < lay.dims.size(); ++k) {
    const int o = lay.offs[k], d = lay.dims[k];
    const auto& v = w.socs[k].v;
    auto ub = u.segment(o, d);
    // W^{-1} u = (1/beta) (2 (Jv) (v'Ju) - J u)
    double vju = v[0] * ub[0] - v.tail(d - 1).dot(ub.tail(d - 1));
    Eigen::VectorXd jv = v;
    jv.tail(d - 1) = -v.tail(d - 1);
    Eigen::VectorXd r = 2.0 * vju * jv;
    r[0] -= ub[0];
    r.tail(d - 1) += ub.tail(d - 1);
    out.segment(o, d) = r / w.socs[k].beta;
  }
}

// ---------------------------------------------------------------------------
// KKT system
//   [ P + dI   A'        G'      ] [dx]   [rx]
//   [ A       -dI        0       ] [dy] = [ry]
//   [ G        0   -(W'W + dI)   ] [dz]   [rz]
// factored as LDL' (quasi-definite with static regularization), solved with
// iterative refinement against the unregularized operator.
// ---------------------------------------------------------------------------

class KktSolver {
 public:
  KktSolver(const StandardForm& sf) : sf_(sf), dim_(sf.n + sf.p + sf.m) {}

  bool factor(const NTScaling* w, double delta) {
    delta_ = delta;
    w_ = w;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sf_.A.nonZeros() + sf_.G.nonZeros() + dim_ + 16 * sf_.layout.dims.size());
    for (int i = 0; i < sf_.n; ++i) trip.emplace_back(i, i, sf_.pdiag[i] + delta);
    for (int j = 0; j < sf_.A.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.A, j); it; ++it)
        trip.emplace_back(sf_.n + static_cast<int>(it.row()), j, it.value());
    for (int i = 0; i < sf_.p; ++i) trip.emplace_back(sf_.n + i, sf_.n + i, -delta);
    const int zoff = sf_.n + sf_.p;
    for (int j = 0; j < sf_.G.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.G, j); it; ++it)
        trip.emplace_back(zoff + static_cast<int>(it.row()), j, it.value());
    // the (3,3) block keeps the full SOC block pattern in every call so the
    // symbolic factorization can be reused across iterations
    const auto& lay = sf_.layout;
    for (int i = 0; i < lay.n_lp; ++i) {
      const double d2 = w == nullptr ? 1.0 : w->lp_d[i] * w->lp_d[i];
      trip.emplace_back(zoff + i, zoff + i, -d2 - delta);
    }
    for (size_t k = 0; k < lay.dims.size(); ++k) {
      const int o = lay.offs[k], d = lay.dims[k];
      if (w == nullptr) {
        for (int i = 0; i < d; ++i)
          for (int j = 0; j <= i; ++j)
            trip.emplace_back(zoff + o + i, zoff + o + j, i == j ? -1.0 - delta : 0.0);
        continue;
      }
      const auto& v = w->socs[k].v;
      const double b2 = w->socs[k].beta * w->socs[k].beta;
      Eigen::VectorXd jv = v;
      jv.tail(d - 1) = -v.tail(d - 1);
      // W'W = beta^2 (4 (v'v) v v' - 2 (v (Jv)' + (Jv) v') + I)
      const double vv4 = 4.0 * v.squaredNorm();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
          double val = vv4 * v[i] * v[j] - 2.0 * (v[i] * jv[j] + jv[i] * v[j]);
          if (i == j) val += 1.0;
          trip.emplace_back(zoff + o + i, zoff + o + j, -b2 * val - (i == j ? delta : 0.0));
        }
    }
    Eigen::SparseMatrix<double> kkt(dim_, dim_);
    kkt.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(kkt);
      analyzed_ = true;
    }
    ldlt_.factorize(kkt);
    return ldlt_.info() == Eigen::Success;
  }

  // exact (unregularized) KKT operator for refinement
  void mul(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    auto x = in.head(sf_.n);
    auto y = in.segment(sf_.n, sf_.p);
    auto z = in.tail(sf_.m);
    out.resize(dim_);
    out.head(sf_.n) = sf_.pdiag.cwiseProduct(x) + sf_.At * y + sf_.Gt * z;
    out.segment(sf_.n, sf_.p) = sf_.A * x;
    Eigen::VectorXd wz(sf_.m), wwz(sf_.m);
    if (w_ == nullptr) {
      wwz = z;
    } else {
      apply_w(sf_.layout, *w_, z, wz);
      apply_w(sf_.layout, *w_, wz, wwz);
    }
    out.tail(sf_.m) = sf_.G * x - wwz;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, int refine_steps = 2) const {
    Eigen::VectorXd sol = ldlt_.solve(rhs);
    Eigen::VectorXd r(dim_), tmp(dim_);
    for (int it = 0; it < refine_steps; ++it) {
      mul(sol, tmp);
      r = rhs - tmp;
      if (r.lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
      sol += ldlt_.solve(r);
    }
    return sol;
  }

 private:
  const StandardForm& sf_;
  int dim_;
  double delta_ = 0.0;
  const NTScaling* w_ = nullptr;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
};

struct DualUnpack {
  Eigen::VectorXd ineq, lower, upper;
  std::vector<Eigen::VectorXd> cones;
};

DualUnpack unpack_duals(const StandardForm& sf, const ConicProgram& prog,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  DualUnpack d;
  d.ineq = Eigen::VectorXd::Zero(prog.n_ineq());
  d.lower = Eigen::VectorXd::Zero(prog.n_vars);
  d.upper = Eigen::VectorXd::Zero(prog.n_vars);
  for (int i = 0; i < sf.layout.n_lp; ++i) {
    const auto& org = sf.lp_origin[i];
    switch (org.kind) {
      case LpRowOrigin::Ineq: d.ineq[org.index] = z[i]; break;
      case LpRowOrigin::Upper: d.upper[org.index] = z[i]; break;
      case LpRowOrigin::Lower: d.lower[org.index] = z[i]; break;
    }
  }
  // a pinned box carries an equality dual; split it by sign
  for (size_t k = 0; k < sf.pinned_vars.size(); ++k) {
    const double mult = y[sf.n_prog_eq + static_cast<int>(k)];
    const int var = sf.pinned_vars[k];
    if (mult >= 0.0)
      d.upper[var] = mult;
    else
      d.lower[var] = -mult;
  }
  // rotated-cone duals: apply the same involution used for the primal map
  const double rt2 = std::sqrt(0.5);
  for (size_t k = 0; k < sf.layout.dims.size(); ++k) {
    const int o = sf.layout.offs[k], dim = sf.layout.dims[k];
    Eigen::VectorXd zc(dim);
    zc[0] = rt2 * (z[o] + z[o + 1]);
    zc[1] = rt2 * (z[o] - z[o + 1]);
    zc.tail(dim - 2) = z.segment(o + 2, dim - 2);
    d.cones.push_back(std::move(zc));
  }
  return d;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualInfeasible: return "DualInfeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NumericalError: return "NumericalError";
  }
  return "Unknown";
}

double Residuals::max_primal() const {
  return std::max(std::max(eq_max, ineq_max), std::max(box_max, cone_max));
}

SolverResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverResult res;
  auto finish = [&](SolveStatus status) -> SolverResult& {
    res.status = status;
    res.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };

  const StandardForm sf = translate(prog);
  const ConeLayout& lay = sf.layout;
  const int n = sf.n, p = sf.p, m = sf.m;

  // pure equality-constrained QP: one Newton solve
  if (m == 0) {
    KktSolver kkt(sf);
    if (!kkt.factor(nullptr, 1e-10)) return finish(SolveStatus::NumericalError);
    Eigen::VectorXd rhs(n + p);
    rhs.head(n) = -sf.q;
    rhs.tail(p) = sf.b;
    Eigen::VectorXd sol = kkt.solve(rhs);
    res.x = sol.head(n);
    res.eq_duals = sol.segment(n, p).head(sf.n_prog_eq);
    res.objective = prog.objective(res.x);
    res.dual_objective = res.objective;
    res.iterations = 1;
    return finish(SolveStatus::Optimal);
  }

  double delta = 1e-9;
  KktSolver kkt(sf);

  // initialization at W = I
  if (!kkt.factor(nullptr, delta)) return finish(SolveStatus::NumericalError);
  Eigen::VectorXd rhs(n + p + m);
  rhs.head(n) = -sf.q;
  rhs.segment(n, p) = sf.b;
  rhs.tail(m) = sf.h;
  Eigen::VectorXd sol = kkt.solve(rhs);
  Eigen::VectorXd x = sol.head(n);
  Eigen::VectorXd y = sol.segment(n, p);
  Eigen::VectorXd z = sol.tail(m);
  Eigen::VectorXd s = -z;
  shift_into_cone(lay, s);
  shift_into_cone(lay, z);

  const double resx0 = std::max(1.0, sf.q.norm());
  const double resy0 = std::max(1.0, sf.b.norm());
  const double resz0 = std::max(1.0, sf.h.norm());
  double gap = s.dot(z);
  const int deg = lay.degree();

  Eigen::VectorXd e(m);
  cone_identity(lay, e);

  Eigen::VectorXd rx(n), ry(p), rz(m);
  Eigen::VectorXd best_x = x, best_y = y, best_z = z, best_s = s;
  double best_metric = kInf;
  int small_steps = 0;

  const double feastol = opts.feas_tol;
  const double reltol = opts.gap_tol;
  const double abs_res_tol = 10.0 * feastol;

  int iter = 0;
  for (;; ++iter) {
    // residuals of the current iterate
    rx = sf.pdiag.cwiseProduct(x) + sf.q + sf.At * y + sf.Gt * z;
    ry = sf.A * x - sf.b;
    rz = sf.G * x + s - sf.h;
    const double pcost = 0.5 * sf.pdiag.cwiseProduct(x).dot(x) + sf.q.dot(x);
    const double dcost = pcost + y.dot(ry) + z.dot(rz) - gap;
    const double relgap = gap / std::max(1.0, std::abs(pcost));
    const double pres = std::max(ry.size() ? ry.norm() / resy0 : 0.0, rz.norm() / resz0);
    const double dres = rx.norm() / resx0;
    const double ry_inf = ry.size() ? ry.lpNorm<Eigen::Infinity>() : 0.0;
    const double rz_inf = rz.lpNorm<Eigen::Infinity>();

    if (opts.verbose) {
      std::printf("iter %3d  pcost % .8e  gap %.2e  pres %.2e  dres %.2e\n", iter, pcost,
                  gap, pres, dres);
    }

    const double metric = std::max({pres, dres, relgap});
    if (metric < best_metric) {
      best_metric = metric;
      best_x = x;
      best_y = y;
      best_z = z;
      best_s = s;
    }

    const bool converged = pres <= feastol && dres <= feastol && relgap <= reltol &&
                           ry_inf <= abs_res_tol && rz_inf <= abs_res_tol;
    if (converged || iter >= opts.max_iters || small_steps >= 3) {
      x = best_x;
      y = best_y;
      z = best_z;
      s = best_s;
      res.x = x;
      res.objective = prog.objective(x);
      res.eq_duals = y.head(sf.n_prog_eq);
      auto duals = unpack_duals(sf, prog, y, z);
      res.ineq_duals = std::move(duals.ineq);
      res.lower_duals = std::move(duals.lower);
      res.upper_duals = std::move(duals.upper);
      res.cone_duals = std::move(duals.cones);
      res.dual_objective = dcost + sf.c0;
      res.iterations = iter;
      res.primal_residual = pres;
      res.dual_residual = dres;
      res.duality_gap = relgap;
      if (converged) return finish(SolveStatus::Optimal);
      if (pres > 1e3 * feastol && dres <= 1e2 * feastol && relgap <= 1e-6)
        return finish(SolveStatus::PrimalInfeasible);
      if (pcost < -1e14) return finish(SolveStatus::DualInfeasible);
      if (iter >= opts.max_iters) return finish(SolveStatus::IterationLimit);
      return finish(SolveStatus::NumericalError);
    }

    // Nesterov-Todd scaling of the current (s, z)
    NTScaling w = compute_scaling(lay, s, z);
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      ok = kkt.factor(&w, delta);
      if (!ok) delta *= 100.0;
    }
    if (!ok) return finish(SolveStatus::NumericalError);

    const double mu = gap / deg;
    Eigen::VectorXd lmb_sq(m);
    jprod(lay, w.lambda, w.lambda, lmb_sq);

    Eigen::VectorXd dx(n), dy(p), dz(m), ds(m);
    Eigen::VectorXd dx_a(n), dy_a(p), dz_a(m), ds_a(m);
    double sigma = 0.0, alpha_aff = 1.0, dsdz = 0.0;

    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd dcmpl = -lmb_sq;
      if (pass == 1) {
        Eigen::VectorXd dsc(m), dzc(m), corr(m);
        apply_w_inv(lay, w, ds_a, dsc);
        apply_w(lay, w, dz_a, dzc);
        jprod(lay, dsc, dzc, corr);
        dcmpl -= corr;
        dcmpl += sigma * mu * e;
      }
      Eigen::VectorXd lmb_div(m), wld(m);
      jdiv(lay, w.lambda, dcmpl, lmb_div);
      apply_w(lay, w, lmb_div, wld);

      rhs.head(n) = -rx;
      rhs.segment(n, p) = -ry;
      rhs.tail(m) = -rz - wld;
      sol = kkt.solve(rhs);
      dx = sol.head(n);
      dy = sol.segment(n, p);
      dz = sol.tail(m);
      // ds = W (lambda o\ dcmpl - W dz)
      Eigen::VectorXd wdz(m);
      apply_w(lay, w, dz, wdz);
      apply_w(lay, w, lmb_div - wdz, ds);

      const double a_s = step_to_boundary(lay, s, ds);
      const double a_z = step_to_boundary(lay, z, dz);
      if (pass == 0) {
        alpha_aff = std::min(1.0, std::min(a_s, a_z));
        dsdz = ds.dot(dz);
        const double base =
            std::clamp(1.0 - alpha_aff + dsdz / gap * alpha_aff * alpha_aff, 0.0, 1.0);
        sigma = base * base * base;
        dx_a = dx;
        dy_a = dy;
        dz_a = dz;
        ds_a = ds;
      } else {
        const double alpha = std::min(1.0, 0.99 * std::min(a_s, a_z));
        x += alpha * dx;
        y += alpha * dy;
        s += alpha * ds;
        z += alpha * dz;
        gap = s.dot(z);
        small_steps = alpha < 1e-8 ? small_steps + 1 : 0;
      }
    }
  }
}

Residuals kkt_residuals(const ConicProgram& prog, const SolverResult& res) {
  const int n = prog.n_vars;
  if (res.x.size() != n)
    throw DimensionMismatch("primal vector length does not match the program");
  if (res.eq_duals.size() != prog.n_eq())
    throw DimensionMismatch("equality dual length does not match the program");
  if (res.ineq_duals.size() != prog.n_ineq())
    throw DimensionMismatch("inequality dual length does not match the program");
  if (res.lower_duals.size() != n || res.upper_duals.size() != n)
    throw DimensionMismatch("box dual length does not match the program");
  if (res.cone_duals.size() != prog.cones.size())
    throw DimensionMismatch("cone dual count does not match the program");

  const Eigen::VectorXd& x = res.x;
  Residuals out;

  if (prog.n_eq() > 0)
    out.eq_max = (prog.eq_matrix * x - prog.eq_rhs).lpNorm<Eigen::Infinity>();
  Eigen::VectorXd ineq_slack;
  if (prog.n_ineq() > 0) {
    ineq_slack = prog.ineq_rhs - prog.ineq_matrix * x;
    out.ineq_max = std::max(0.0, -ineq_slack.minCoeff());
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(prog.lower[i])) out.box_max = std::max(out.box_max, prog.lower[i] - x[i]);
    if (std::isfinite(prog.upper[i])) out.box_max = std::max(out.box_max, x[i] - prog.upper[i]);
  }
  out.box_max = std::max(out.box_max, 0.0);

  // stationarity: gradient of the Lagrangian at (x, duals)
  Eigen::VectorXd grad = 2.0 * prog.curvature.cwiseProduct(x) + prog.linear_cost;
  if (prog.n_eq() > 0) grad += prog.eq_matrix.transpose() * res.eq_duals;
  if (prog.n_ineq() > 0) grad += prog.ineq_matrix.transpose() * res.ineq_duals;
  grad += res.upper_duals - res.lower_duals;

  for (size_t c = 0; c < prog.cones.size(); ++c) {
    const auto& cone = prog.cones[c];
    const auto& zc = res.cone_duals[c];
    const double u = cone.u.eval(x);
    const double v = cone.v.eval(x);
    double wsq = 0.0;
    for (const auto& we : cone.w) {
      const double wv = we.eval(x);
      wsq += wv * wv;
    }
    const double slack = 2.0 * u * v - wsq;
    out.cone_max = std::max({out.cone_max, -slack, -u, -v});
    // complementarity <s_c, z_c> with s_c = (u, v, w)
    double comp = u * zc[0] + v * zc[1];
    for (size_t k = 0; k < cone.w.size(); ++k)
      comp += cone.w[k].eval(x) * zc[2 + static_cast<int>(k)];
    out.complementarity = std::max(out.complementarity, std::abs(comp));
    // gradient contribution -S_c' z_c
    for (const auto& t : cone.u.terms) grad[t.var] -= zc[0] * t.coef;
    for (const auto& t : cone.v.terms) grad[t.var] -= zc[1] * t.coef;
    for (size_t k = 0; k < cone.w.size(); ++k)
      for (const auto& t : cone.w[k].terms) grad[t.var] -= zc[2 + static_cast<int>(k)] * t.coef;
  }
  out.cone_max = std::max(out.cone_max, 0.0);
  out.stationarity = grad.lpNorm<Eigen::Infinity>();

  for (int i = 0; i < prog.n_ineq(); ++i)
    out.complementarity =
        std::max(out.complementarity, std::abs(res.ineq_duals[i] * ineq_slack[i]));
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(prog.lower[i]))
      out.complementarity =
          std::max(out.complementarity, std::abs(res.lower_duals[i] * (x[i] - prog.lower[i])));
    if (std::isfinite(prog.upper[i]))
      out.complementarity =
          std::max(out.complementarity, std::abs(res.upper_duals[i] * (prog.upper[i] - x[i])));
  }
  return out;
}

}  // namespace socopf
