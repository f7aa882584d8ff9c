#pragma once

// Independent reference solvers used only by tests. Both avoid the library's
// interior-point code path entirely: the LP oracle enumerates candidate
// vertices, the SOCP oracle runs a dense log-barrier Newton method.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "slotrec/conic.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Status { optimal, infeasible, no_vertex };

struct LpAnswer {
  Status status = Status::infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  VectorXd x;
};

/// Dense view of a ConicProgram without cone blocks: min c'x, A x = b,
/// C x <= d (upper-bound rows plus finite lower bounds as -x <= -lb).
struct DenseLp {
  VectorXd c;
  MatrixXd A;
  VectorXd b;
  MatrixXd C;
  VectorXd d;
};

inline DenseLp dense_lp_from(const slotrec::ConicProgram& cp) {
  DenseLp lp;
  int n = cp.num_vars();
  lp.c = VectorXd::Zero(n);
  for (auto [v, cf] : cp.objective()) lp.c[v] += cf;
  int p = static_cast<int>(cp.equalities().size());
  lp.A = MatrixXd::Zero(p, n);
  lp.b = VectorXd::Zero(p);
  for (int i = 0; i < p; ++i) {
    for (auto [v, cf] : cp.equalities()[static_cast<std::size_t>(i)].terms) lp.A(i, v) += cf;
    lp.b[i] = cp.equalities()[static_cast<std::size_t>(i)].rhs;
  }
  std::vector<std::pair<VectorXd, double>> rows;
  for (const auto& row : cp.upper_bound_rows()) {
    VectorXd r = VectorXd::Zero(n);
    for (auto [v, cf] : row.terms) r[v] += cf;
    rows.emplace_back(r, row.rhs);
  }
  for (int v = 0; v < n; ++v) {
    double lb = cp.lower_bounds()[static_cast<std::size_t>(v)];
    if (std::isfinite(lb)) {
      VectorXd r = VectorXd::Zero(n);
      r[v] = -1.0;
      rows.emplace_back(r, -lb);
    }
  }
  lp.C = MatrixXd::Zero(static_cast<int>(rows.size()), n);
  lp.d = VectorXd::Zero(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lp.C.row(static_cast<int>(i)) = rows[i].first;
    lp.d[static_cast<int>(i)] = rows[i].second;
  }
  return lp;
}

/// Brute-force LP solve by enumerating every basis: all equality rows plus
/// enough inequality rows to pin down a point. Exact for bounded feasible
/// regions (every nonempty bounded polyhedron has an optimal vertex); a
/// feasible unbounded or non-pointed region reports no_vertex.
inline LpAnswer lp_vertex_oracle(const DenseLp& lp, double feastol = 1e-7) {
  int n = static_cast<int>(lp.c.size());
  int p = static_cast<int>(lp.A.rows());
  int mrows = static_cast<int>(lp.C.rows());
  LpAnswer ans;
  if (p > n) return ans;
  int need = n - p;
  std::vector<int> pick(static_cast<std::size_t>(need));
  for (int i = 0; i < need; ++i) pick[static_cast<std::size_t>(i)] = i;

  bool any_feasible_vertex = false;
  double best = std::numeric_limits<double>::infinity();
  VectorXd best_x;

  auto try_basis = [&](const std::vector<int>& rows) {
    MatrixXd M(n, n);
    VectorXd rhs(n);
    M.topRows(p) = lp.A;
    rhs.head(p) = lp.b;
    for (int i = 0; i < need; ++i) {
      M.row(p + i) = lp.C.row(rows[static_cast<std::size_t>(i)]);
      rhs[p + i] = lp.d[rows[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return;
    VectorXd x = lu.solve(rhs);
    double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    if (p > 0 && (lp.A * x - lp.b).lpNorm<Eigen::Infinity>() > feastol * scale) return;
    if (mrows > 0 && ((lp.C * x - lp.d).array() > feastol * scale).any()) return;
    any_feasible_vertex = true;
    double obj = lp.c.dot(x);
    if (obj < best - 1e-12) {
      best = obj;
      best_x = x;
    }
  };

  if (need == 0) {
    try_basis({});
  } else if (mrows >= need) {
    while (true) {
      try_basis(pick);
      int i = need - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == mrows - need + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < need; ++j) {
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }

  if (!any_feasible_vertex) {
    ans.status = Status::infeasible;  // or pointless region; caller constructs bounded ones
    return ans;
  }
  ans.status = Status::optimal;
  ans.objective = best;
  ans.x = best_x;
  return ans;
}

inline LpAnswer lp_vertex_oracle(const slotrec::ConicProgram& cp, double feastol = 1e-7) {
  return lp_vertex_oracle(dense_lp_from(cp), feastol);
}

// ---------------------------------------------------------------------------
// Dense log-barrier method for the full program with cone blocks. Needs a
// strictly feasible start; accuracy is governed by the final barrier weight.

struct BarrierAnswer {
  bool converged = false;
  double objective = std::numeric_limits<double>::quiet_NaN();
  VectorXd x;
};

inline BarrierAnswer barrier_socp_oracle(const slotrec::ConicProgram& cp, const VectorXd& x0,
                                         double gap_tol = 1e-9) {
  int n = cp.num_vars();
  VectorXd c = VectorXd::Zero(n);
  for (auto [v, cf] : cp.objective()) c[v] += cf;

  int p = static_cast<int>(cp.equalities().size());
  MatrixXd A = MatrixXd::Zero(p, n);
  VectorXd b = VectorXd::Zero(p);
  for (int i = 0; i < p; ++i) {
    for (auto [v, cf] : cp.equalities()[static_cast<std::size_t>(i)].terms) A(i, v) += cf;
    b[i] = cp.equalities()[static_cast<std::size_t>(i)].rhs;
  }

  // Linear one-sided constraints r'x <= d become slack functions d - r'x.
  std::vector<std::pair<VectorXd, double>> lin;
  for (const auto& row : cp.upper_bound_rows()) {
    VectorXd r = VectorXd::Zero(n);
    for (auto [v, cf] : row.terms) r[v] += cf;
    lin.emplace_back(r, row.rhs);
  }
  for (int v = 0; v < n; ++v) {
    double lb = cp.lower_bounds()[static_cast<std::size_t>(v)];
    if (std::isfinite(lb)) {
      VectorXd r = VectorXd::Zero(n);
      r[v] = -1.0;
      lin.emplace_back(r, -lb);
    }
  }

  struct Soc {
    MatrixXd P;
    VectorXd pvec;
    VectorXd f;
    double g;
  };
  std::vector<Soc> socs;
  for (const auto& blk : cp.soc_blocks()) {
    Soc s;
    int k = static_cast<int>(blk.norm_rows.size());
    s.P = MatrixXd::Zero(k, n);
    s.pvec = VectorXd::Zero(k);
    for (int r = 0; r < k; ++r) {
      for (auto [v, cf] : blk.norm_rows[static_cast<std::size_t>(r)]) s.P(r, v) += cf;
      s.pvec[r] = blk.norm_offset[static_cast<std::size_t>(r)];
    }
    s.f = VectorXd::Zero(n);
    for (auto [v, cf] : blk.bound_terms) s.f[v] += cf;
    s.g = blk.bound_offset;
    socs.push_back(std::move(s));
  }

  double ncon = static_cast<double>(lin.size() + socs.size());
  auto barrier = [&](const VectorXd& x, double t, VectorXd* grad, MatrixXd* hess) {
    double val = t * c.dot(x);
    if (grad) *grad = t * c;
    if (hess) hess->setZero(n, n);
    for (const auto& [r, d] : lin) {
      double s = d - r.dot(x);
      if (s <= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(s);
      if (grad) *grad += r / s;
      if (hess) *hess += (r * r.transpose()) / (s * s);
    }
    for (const auto& s : socs) {
      double u = s.f.dot(x) + s.g;
      VectorXd v = s.P * x + s.pvec;
      double res = u * u - v.squaredNorm();
      if (u <= 0.0 || res <= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(res);
      VectorXd dres = 2.0 * u * s.f - 2.0 * s.P.transpose() * v;
      if (grad) *grad -= dres / res;
      if (hess) {
        MatrixXd hres = 2.0 * s.f * s.f.transpose() - 2.0 * s.P.transpose() * s.P;
        *hess += -hres / res + (dres * dres.transpose()) / (res * res);
      }
    }
    return val;
  };

  // Eliminate the equalities once: x = xf + Z u with Z an orthonormal basis
  // of null(A).  Feasibility then holds by construction, which a KKT-form
  // Newton iteration cannot guarantee once the centering weight gets large.
  MatrixXd Z;
  VectorXd xf = x0;
  if (p > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A.transpose());
    int rank = static_cast<int>(qr.rank());
    MatrixXd Q = qr.householderQ();
    Z = Q.rightCols(n - rank);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
    xf = x0 - cod.pseudoInverse() * (A * x0 - b);
    if ((A * xf - b).norm() > 1e-8 * (1.0 + b.norm())) return {};
  } else {
    Z = MatrixXd::Identity(n, n);
  }
  int m = static_cast<int>(Z.cols());
  VectorXd u = VectorXd::Zero(m);
  if (!std::isfinite(barrier(xf, 1.0, nullptr, nullptr))) return {};

  double t = 1.0;
  for (int outer = 0; outer < 64; ++outer) {
    for (int it = 0; it < 100; ++it) {
      VectorXd g;
      MatrixXd H;
      VectorXd x = xf + Z * u;
      double val = barrier(x, t, &g, &H);
      if (!std::isfinite(val)) return {};
      MatrixXd Hu = Z.transpose() * H * Z + 1e-12 * MatrixXd::Identity(m, m);
      VectorXd gu = Z.transpose() * g;
      VectorXd du = -Hu.ldlt().solve(gu);
      double decrement = -gu.dot(du);
      if (!(decrement > 0.0)) break;
      double step = 1.0;
      while (step > 1e-14 &&
             !(barrier(xf + Z * (u + step * du), t, nullptr, nullptr) <=
               val + 0.25 * step * gu.dot(du))) {
        step *= 0.5;
      }
      u += step * du;
      if (decrement < 1e-12 || step <= 1e-14) break;
    }
    if (ncon / t < gap_tol) break;
    t *= 10.0;
  }

  BarrierAnswer ans;
  ans.converged = true;
  ans.objective = c.dot(xf + Z * u);
  ans.x = xf + Z * u;
  return ans;
}

}  // namespace oracle
