#pragma once

// Primal-dual interior-point method for second-order cone programs in the
// standard form
//
//   min c'x  s.t.  A x = b,  G x + s = h,  s in K,
//
// where K is a product of a nonnegative orthant of dimension l and a list of
// second-order cones. Self-dual embedding with Nesterov-Todd scalings and a
// Mehrotra predictor-corrector, so infeasibility and unboundedness come out
// as certificates rather than divergence. The KKT system stores second-order
// cone scaling blocks in expanded form (two extra rows per cone) to keep the
// factorization sparse.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace slotrec::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec = Eigen::VectorXd;

struct StandardForm {
  int n = 0;  // variables
  int p = 0;  // equality rows
  int l = 0;  // nonnegative-orthant rows (leading rows of G)
  std::vector<int> soc_dims;
  SpMat A;  // p x n
  SpMat G;  // m x n
  Vec c, b, h;

  int m() const {
    int m = l;
    for (int q : soc_dims) m += q;
    return m;
  }
};

struct IpmOptions {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-4;
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  int max_iters = 100;
  int equil_iters = 3;
  double static_reg = 7e-8;
  int refine_steps = 3;
  double step_min = 1e-7;
  double step_damping = 0.98;
};

enum class IpmStatus {
  optimal,
  primal_infeasible,
  dual_infeasible,
  numerical_failure,
  max_iterations,
};

struct IpmResult {
  IpmStatus status = IpmStatus::numerical_failure;
  bool reduced_accuracy = false;
  Vec x, y, z, s;  // tau-normalized iterates (certificate-normalized if infeasible)
  int iterations = 0;
  double pres = std::numeric_limits<double>::quiet_NaN();
  double dres = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double pcost = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Cone arithmetic on stacked slack vectors (LP part first, then each cone).

class ConeOps {
 public:
  ConeOps(int l, std::vector<int> dims) : l_(l), dims_(std::move(dims)) {
    int off = l_;
    offs_.reserve(dims_.size());
    for (int q : dims_) {
      offs_.push_back(off);
      off += q;
    }
    m_ = off;
  }

  int l() const { return l_; }
  int m() const { return m_; }
  int num_cones() const { return static_cast<int>(dims_.size()); }
  int dim(int j) const { return dims_[static_cast<std::size_t>(j)]; }
  int off(int j) const { return offs_[static_cast<std::size_t>(j)]; }
  /// Barrier degree: one per orthant coordinate, one per cone.
  int degree() const { return l_ + num_cones(); }

  /// Identity element e of the cone product.
  Vec identity() const {
    Vec e = Vec::Zero(m_);
    e.head(l_).setOnes();
    for (int j = 0; j < num_cones(); ++j) e[off(j)] = 1.0;
    return e;
  }

  /// Jordan product u o v.
  Vec product(const Vec& u, const Vec& v) const {
    Vec r(m_);
    r.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
    for (int j = 0; j < num_cones(); ++j) {
      int o = off(j), q = dim(j);
      auto u1 = u.segment(o + 1, q - 1);
      auto v1 = v.segment(o + 1, q - 1);
      r[o] = u.segment(o, q).dot(v.segment(o, q));
      r.segment(o + 1, q - 1) = u[o] * v1 + v[o] * u1;
    }
    return r;
  }

  /// Jordan division: solve u o r = d for r. Returns false if u is singular.
  bool divide(const Vec& u, const Vec& d, Vec& r) const {
    r.resize(m_);
    for (int i = 0; i < l_; ++i) {
      if (u[i] == 0.0) return false;
      r[i] = d[i] / u[i];
    }
    for (int j = 0; j < num_cones(); ++j) {
      int o = off(j), q = dim(j);
      auto u1 = u.segment(o + 1, q - 1);
      auto d1 = d.segment(o + 1, q - 1);
      double det = u[o] * u[o] - u1.squaredNorm();
      if (det == 0.0 || u[o] == 0.0) return false;
      double r0 = (u[o] * d[o] - u1.dot(d1)) / det;
      r[o] = r0;
      r.segment(o + 1, q - 1) = (d1 - r0 * u1) / u[o];
    }
    return true;
  }

  /// Largest t such that u + alpha*d stays in the cone for all alpha in [0,t].
  /// u must be strictly interior.
  double step_bound(const Vec& u, const Vec& d) const {
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l_; ++i) {
      if (d[i] < 0.0) bound = std::min(bound, -u[i] / d[i]);
    }
    for (int j = 0; j < num_cones(); ++j) {
      int o = off(j), q = dim(j);
      auto u1 = u.segment(o + 1, q - 1);
      auto d1 = d.segment(o + 1, q - 1);
      double a = u[o] * u[o] - u1.squaredNorm();
      double b2 = u[o] * d[o] - u1.dot(d1);
      double cq = d[o] * d[o] - d1.squaredNorm();
      if (a <= 0.0) return 0.0;
      if (d[o] < 0.0) bound = std::min(bound, -u[o] / d[o]);
      // First positive root of a + 2*b2*t + cq*t^2, if any: the step where the
      // boundary polynomial crosses zero.
      double disc = b2 * b2 - a * cq;
      if (std::abs(cq) < 1e-300) {
        if (b2 < 0.0) bound = std::min(bound, -a / (2.0 * b2));
        continue;
      }
      if (disc < 0.0) continue;
      double sq = std::sqrt(disc);
      double r1 = (-b2 - sq) / cq;
      double r2 = (-b2 + sq) / cq;
      if (r1 > r2) std::swap(r1, r2);
      if (r1 > 0.0) {
        bound = std::min(bound, r1);
      } else if (r2 > 0.0) {
        bound = std::min(bound, r2);
      }
    }
    return bound;
  }

  /// Shift u into the interior of the cone if it is not already well inside.
  Vec bring_to_cone(const Vec& u) const {
    double alpha = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < l_; ++i) alpha = std::max(alpha, -u[i]);
    for (int j = 0; j < num_cones(); ++j) {
      int o = off(j), q = dim(j);
      alpha = std::max(alpha, u.segment(o + 1, q - 1).norm() - u[o]);
    }
    if (alpha < -1e-8) return u;
    return u + (1.0 + alpha) * identity();
  }

 private:
  int l_, m_ = 0;
  std::vector<int> dims_;
  std::vector<int> offs_;
};

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling state.
//
// For the orthant, W = diag(sqrt(s/z)). For a second-order cone, W = eta*Wbar
// with Wbar = -J + (e + wbar)(e + wbar)'/(1 + wbar0), and
// Wbar^2 = Dbar + u u' - v v' is stored in the expanded low-rank form used in
// the KKT matrix (q = wbar tail).

struct SocScaling {
  double eta2 = 1.0;  // eta^2
  double a = 1.0;     // wbar0
  double w = 0.0;     // |wbar tail|^2 = a^2 - 1
  double d1 = 0.5;
  double u0 = std::sqrt(0.5);
  double u1 = 2.0 * std::sqrt(2.0);
  double v1 = std::sqrt(6.0);
  Vec q;  // wbar tail, size dim-1

  double eta() const { return std::sqrt(eta2); }
};

struct Scalings {
  Vec lp_w2;  // s_i / z_i per orthant row
  std::vector<SocScaling> soc;
  Vec lambda;  // scaled point, lambda = W z = W^{-1} s

  void init_identity(const ConeOps& cone) {
    lp_w2 = Vec::Ones(cone.l());
    soc.assign(static_cast<std::size_t>(cone.num_cones()), SocScaling{});
    for (int j = 0; j < cone.num_cones(); ++j) {
      soc[static_cast<std::size_t>(j)].q = Vec::Zero(cone.dim(j) - 1);
    }
    lambda = Vec::Zero(cone.m());
  }

  /// Recompute from a strictly interior (s, z) pair. Returns false when the
  /// pair has drifted onto or across the cone boundary.
  bool update(const ConeOps& cone, const Vec& s, const Vec& z) {
    for (int i = 0; i < cone.l(); ++i) {
      if (s[i] <= 0.0 || z[i] <= 0.0) return false;
      lp_w2[i] = s[i] / z[i];
      lambda[i] = std::sqrt(s[i] * z[i]);
    }
    for (int j = 0; j < cone.num_cones(); ++j) {
      int o = cone.off(j), q = cone.dim(j);
      auto s1 = s.segment(o + 1, q - 1);
      auto z1 = z.segment(o + 1, q - 1);
      double sres = s[o] * s[o] - s1.squaredNorm();
      double zres = z[o] * z[o] - z1.squaredNorm();
      if (sres <= 0.0 || zres <= 0.0 || s[o] <= 0.0 || z[o] <= 0.0) return false;
      double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
      SocScaling& sc = soc[static_cast<std::size_t>(j)];
      sc.eta2 = snorm / znorm;
      double sz = (s[o] * z[o] + s1.dot(z1)) / (snorm * znorm);
      double gamma = std::sqrt((1.0 + sz) / 2.0);
      sc.a = (s[o] / snorm + z[o] / znorm) / (2.0 * gamma);
      sc.q = (s1 / snorm - z1 / znorm) / (2.0 * gamma);
      sc.w = sc.q.squaredNorm();
      // Low-rank split of Wbar^2; with a^2 - w = 1 these reduce to
      // cc = 2a and dd = 2, kept in full form for numerical symmetry.
      double b = 1.0 / (1.0 + sc.a);
      double cc = 1.0 + sc.a + sc.w * b;
      double dd = 1.0 + 2.0 * b + sc.w * b * b;
      sc.d1 = std::max(0.0, 0.5 * (sc.a * sc.a + sc.w * (1.0 - (cc * cc) / (1.0 + sc.w * dd))));
      double u0sq = sc.a * sc.a + sc.w - sc.d1;
      if (u0sq <= 0.0) return false;
      sc.u0 = std::sqrt(u0sq);
      sc.u1 = cc / sc.u0;
      double v1sq = sc.u1 * sc.u1 - dd;
      if (v1sq < 0.0) return false;
      sc.v1 = std::sqrt(v1sq);
      // lambda = eta * Wbar z
      double eta = sc.eta();
      double zeta = sc.q.dot(z1);
      lambda[o] = eta * (sc.a * z[o] + zeta);
      lambda.segment(o + 1, q - 1) = eta * (z1 + (z[o] + zeta * b) * sc.q);
    }
    return true;
  }

  /// W u (W symmetric).
  Vec apply(const ConeOps& cone, const Vec& u) const {
    Vec r(cone.m());
    for (int i = 0; i < cone.l(); ++i) r[i] = std::sqrt(lp_w2[i]) * u[i];
    for (int j = 0; j < cone.num_cones(); ++j) {
      int o = cone.off(j), q = cone.dim(j);
      const SocScaling& sc = soc[static_cast<std::size_t>(j)];
      auto u1 = u.segment(o + 1, q - 1);
      double eta = sc.eta();
      double zeta = sc.q.dot(u1);
      r[o] = eta * (sc.a * u[o] + zeta);
      r.segment(o + 1, q - 1) = eta * (u1 + (u[o] + zeta / (1.0 + sc.a)) * sc.q);
    }
    return r;
  }

  /// W^{ -1 } u.
  Vec apply_inv(const ConeOps& cone, const Vec& u) const {
    Vec r(cone.m());
    for (int i = 0; i < cone.l(); ++i) r[i] = u[i] / std::sqrt(lp_w2[i]);
    for (int j = 0; j < cone.num_cones(); ++j) {
      int o = cone.off(j), q = cone.dim(j);
      const SocScaling& sc = soc[static_cast<std::size_t>(j)];
      auto u1 = u.segment(o + 1, q - 1);
      double eta = sc.eta();
      double zeta = sc.q.dot(u1);
      r[o] = (sc.a * u[o] - zeta) / eta;
      r.segment(o + 1, q - 1) = (u1 + (-u[o] + zeta / (1.0 + sc.a)) * sc.q) / eta;
    }
    return r;
  }
};

// ---------------------------------------------------------------------------
// Ruiz equilibration. Rows belonging to one second-order cone share a single
// scale factor, otherwise the scaled rows would no longer describe a cone.

struct Equilibration {
  Vec col;    // n
  Vec row_a;  // p
  Vec row_g;  // m

  static Equilibration compute(StandardForm& sf, const ConeOps& cone, int iters) {
    Equilibration eq;
    eq.col = Vec::Ones(sf.n);
    eq.row_a = Vec::Ones(sf.p);
    eq.row_g = Vec::Ones(sf.m());
    for (int it = 0; it < iters; ++it) {
      Vec cmax = Vec::Zero(sf.n), ramax = Vec::Zero(sf.p), rgmax = Vec::Zero(sf.m());
      for (int k = 0; k < sf.A.outerSize(); ++k) {
        for (SpMat::InnerIterator v(sf.A, k); v; ++v) {
          double a = std::abs(v.value());
          cmax[v.col()] = std::max(cmax[v.col()], a);
          ramax[v.row()] = std::max(ramax[v.row()], a);
        }
      }
      for (int k = 0; k < sf.G.outerSize(); ++k) {
        for (SpMat::InnerIterator v(sf.G, k); v; ++v) {
          double a = std::abs(v.value());
          cmax[v.col()] = std::max(cmax[v.col()], a);
          rgmax[v.row()] = std::max(rgmax[v.row()], a);
        }
      }
      // Collapse each cone block to its largest row scale.
      for (int j = 0; j < cone.num_cones(); ++j) {
        int o = cone.off(j), q = cone.dim(j);
        double mx = rgmax.segment(o, q).maxCoeff();
        rgmax.segment(o, q).setConstant(mx);
      }
      auto root = [](double v) { return v > 0.0 ? std::sqrt(v) : 1.0; };
      for (int i = 0; i < sf.n; ++i) cmax[i] = root(cmax[i]);
      for (int i = 0; i < sf.p; ++i) ramax[i] = root(ramax[i]);
      for (int i = 0; i < sf.m(); ++i) rgmax[i] = root(rgmax[i]);
      for (int k = 0; k < sf.A.outerSize(); ++k) {
        for (SpMat::InnerIterator v(sf.A, k); v; ++v) {
          v.valueRef() /= ramax[v.row()] * cmax[v.col()];
        }
      }
      for (int k = 0; k < sf.G.outerSize(); ++k) {
        for (SpMat::InnerIterator v(sf.G, k); v; ++v) {
          v.valueRef() /= rgmax[v.row()] * cmax[v.col()];
        }
      }
      eq.col = eq.col.cwiseProduct(cmax);
      eq.row_a = eq.row_a.cwiseProduct(ramax);
      eq.row_g = eq.row_g.cwiseProduct(rgmax);
    }
    sf.c = sf.c.cwiseQuotient(eq.col);
    sf.b = sf.b.cwiseQuotient(eq.row_a);
    sf.h = sf.h.cwiseQuotient(eq.row_g);
    return eq;
  }

  void unscale(Vec& x, Vec& y, Vec& z, Vec& s) const {
    x = x.cwiseQuotient(col);
    y = y.cwiseQuotient(row_a);
    z = z.cwiseQuotient(row_g);
    s = s.cwiseProduct(row_g);
  }
};

// ---------------------------------------------------------------------------

class IpmSolver {
 public:
  IpmSolver(StandardForm sf, IpmOptions opt)
      : sf_(std::move(sf)), opt_(opt), cone_(sf_.l, sf_.soc_dims) {
    sf_.A.makeCompressed();
    sf_.G.makeCompressed();
    equil_ = Equilibration::compute(sf_, cone_, opt_.equil_iters);
    build_offsets();
  }

  IpmResult solve() {
    IpmResult res;
    scal_.init_identity(cone_);
    if (!factorize(opt_.static_reg)) {
      res.status = IpmStatus::numerical_failure;
      return res;
    }

    // Initial point: least-squares primal and dual starts pushed into the cone.
    {
      Vec r1 = assemble_rhs(Vec::Zero(sf_.n), sf_.b, sf_.h);
      Vec sol1 = kkt_solve(r1);
      Vec r2 = assemble_rhs(-sf_.c, Vec::Zero(sf_.p), Vec::Zero(cone_.m()));
      Vec sol2 = kkt_solve(r2);
      x_ = extract_x(sol1);
      s_ = cone_.bring_to_cone(-extract_z(sol1));
      y_ = extract_y(sol2);
      z_ = cone_.bring_to_cone(extract_z(sol2));
      tau_ = 1.0;
      kap_ = 1.0;
      if (!x_.allFinite() || !s_.allFinite() || !y_.allFinite() || !z_.allFinite()) {
        res.status = IpmStatus::numerical_failure;
        return res;
      }
    }

    double best_score = std::numeric_limits<double>::infinity();
    Snapshot best;
    const int D1 = cone_.degree() + 1;

    for (int iter = 0; iter <= opt_.max_iters; ++iter) {
      Residuals rr = residuals();
      res.iterations = iter;
      res.pres = rr.pres;
      res.dres = rr.dres;
      res.gap = rr.gap;
      res.pcost = rr.pcost;

      double score = std::max(rr.pres, rr.dres) + std::max(0.0, rr.gap) / std::max(1.0, std::abs(rr.pcost));
      if (score < best_score && tau_ > 1e-10) {
        best_score = score;
        best = snapshot(rr);
      }

      if (check_exit(rr, res, false)) return finish(res);
      if (iter == opt_.max_iters) {
        return fallback(res, best, IpmStatus::max_iterations);
      }

      if (!scal_.update(cone_, s_, z_)) {
        return fallback(res, best, IpmStatus::numerical_failure);
      }
      if (!factorize(opt_.static_reg)) {
        return fallback(res, best, IpmStatus::numerical_failure);
      }

      double mu = (s_.dot(z_) + tau_ * kap_) / D1;

      // Static direction, reused for the tau elimination in both solves.
      Vec sol_static = kkt_solve(assemble_rhs(-sf_.c, sf_.b, sf_.h));
      Vec u1x = extract_x(sol_static), u1y = extract_y(sol_static), u1z = extract_z(sol_static);
      double cbh1 = sf_.c.dot(u1x) + sf_.b.dot(u1y) + sf_.h.dot(u1z);

      // Affine (predictor) direction.
      Vec ds1_aff = -scal_.lambda;
      Step aff = direction(rr, 1.0, ds1_aff, -tau_ * kap_, u1x, u1y, u1z, cbh1);
      if (!aff.ok) return fallback(res, best, IpmStatus::numerical_failure);

      double alpha_aff = std::min(1.0, step_to_boundary(aff));
      double sigma = std::pow(1.0 - alpha_aff, 3);
      sigma = std::clamp(sigma, 1e-8, 0.9995);

      // Mehrotra corrector in the scaled space.
      Vec corr = cone_.product(aff.w_dz, aff.winv_ds);
      Vec d_s = -cone_.product(scal_.lambda, scal_.lambda) - corr + sigma * mu * cone_.identity();
      Vec ds1;
      if (!cone_.divide(scal_.lambda, d_s, ds1)) {
        return fallback(res, best, IpmStatus::numerical_failure);
      }
      double d_kap = -tau_ * kap_ - aff.dtau * aff.dkap + sigma * mu;

      Step comb = direction(rr, 1.0 - sigma, ds1, d_kap, u1x, u1y, u1z, cbh1);
      if (!comb.ok) return fallback(res, best, IpmStatus::numerical_failure);

      double alpha = std::min(1.0, opt_.step_damping * step_to_boundary(comb));
      if (alpha < opt_.step_min) {
        return fallback(res, best, IpmStatus::numerical_failure);
      }

      x_ += alpha * comb.dx;
      y_ += alpha * comb.dy;
      z_ += alpha * comb.dz;
      s_ += alpha * comb.ds;
      tau_ += alpha * comb.dtau;
      kap_ += alpha * comb.dkap;
      if (tau_ <= 0.0 || kap_ <= 0.0 || !x_.allFinite()) {
        return fallback(res, best, IpmStatus::numerical_failure);
      }
    }
    return fallback(res, best, IpmStatus::max_iterations);
  }

 private:
  struct Residuals {
    double pres, dres, gap, relgap, pcost, dcost;
    double pinfres, dinfres;
    double by, hz, cx;
    Vec rx, ry, rz;  // unscaled-by-tau homogeneous residuals
    double rt;
  };

  struct Snapshot {
    bool valid = false;
    Vec x, y, z, s;
    double tau = 1.0, kap = 1.0;
    Residuals rr;
  };

  struct Step {
    bool ok = false;
    Vec dx, dy, dz, ds;
    double dtau = 0.0, dkap = 0.0;
    Vec w_dz, winv_ds;  // scaled directions for line search and corrector
  };

  // --- residuals & termination ---------------------------------------------

  Residuals residuals() const {
    Residuals r;
    r.rx = sf_.A.transpose() * y_ + sf_.G.transpose() * z_ + sf_.c * tau_;
    r.ry = sf_.A * x_ - sf_.b * tau_;
    r.rz = sf_.G * x_ + s_ - sf_.h * tau_;
    r.cx = sf_.c.dot(x_);
    r.by = sf_.p > 0 ? sf_.b.dot(y_) : 0.0;
    r.hz = sf_.h.dot(z_);
    r.rt = kap_ + r.cx + r.by + r.hz;

    double nx = x_.norm(), ny = y_.norm(), nz = z_.norm(), ns = s_.norm();
    double resx0 = std::max(1.0, sf_.c.norm());
    double resy0 = std::max(1.0, sf_.b.norm());
    double resz0 = std::max(1.0, sf_.h.norm());

    r.pcost = r.cx / tau_;
    r.dcost = -(r.by + r.hz) / tau_;
    r.gap = s_.dot(z_) / (tau_ * tau_);
    if (r.pcost < 0.0) {
      r.relgap = r.gap / (-r.pcost);
    } else if (r.dcost > 0.0) {
      r.relgap = r.gap / r.dcost;
    } else {
      r.relgap = std::numeric_limits<double>::quiet_NaN();
    }
    double nry = sf_.p > 0 ? r.ry.norm() / std::max(resy0 + nx, 1.0) : 0.0;
    double nrz = r.rz.norm() / std::max(resz0 + nx + ns, 1.0);
    r.pres = std::max(nry, nrz) / tau_;
    r.dres = r.rx.norm() / std::max(resx0 + ny + nz, 1.0) / tau_;

    double hresx = (sf_.A.transpose() * y_ + sf_.G.transpose() * z_).norm();
    r.pinfres = (r.by + r.hz < 0.0) ? hresx / resx0 / (-r.by - r.hz)
                                    : std::numeric_limits<double>::quiet_NaN();
    double hresy = sf_.p > 0 ? (sf_.A * x_).norm() : 0.0;
    double hresz = (sf_.G * x_ + s_).norm();
    r.dinfres = (r.cx < 0.0) ? std::max(hresy / resy0, hresz / resz0) / (-r.cx)
                             : std::numeric_limits<double>::quiet_NaN();
    return r;
  }

  bool check_exit(const Residuals& r, IpmResult& res, bool inacc) const {
    double ft = inacc ? opt_.feastol_inacc : opt_.feastol;
    double at = inacc ? opt_.abstol_inacc : opt_.abstol;
    double rt = inacc ? opt_.reltol_inacc : opt_.reltol;
    if (r.pres < ft && r.dres < ft &&
        (r.gap < at || (std::isfinite(r.relgap) && r.relgap < rt))) {
      res.status = IpmStatus::optimal;
      res.reduced_accuracy = inacc;
      return true;
    }
    if (std::isfinite(r.pinfres) && r.pinfres < ft && tau_ < kap_) {
      res.status = IpmStatus::primal_infeasible;
      res.reduced_accuracy = inacc;
      return true;
    }
    if (std::isfinite(r.dinfres) && r.dinfres < ft && tau_ < kap_) {
      res.status = IpmStatus::dual_infeasible;
      res.reduced_accuracy = inacc;
      return true;
    }
    return false;
  }

  IpmResult finish(IpmResult& res) {
    Vec x = x_, y = y_, z = z_, s = s_;
    equil_.unscale(x, y, z, s);
    double scale = tau_;
    if (res.status == IpmStatus::primal_infeasible) {
      double by = sf_.p > 0 ? sf_.b.dot(y_) : 0.0;
      scale = -(by + sf_.h.dot(z_));
    } else if (res.status == IpmStatus::dual_infeasible) {
      scale = -sf_.c.dot(x_);
    }
    if (scale <= 0.0 || !std::isfinite(scale)) scale = 1.0;
    res.x = x / scale;
    res.y = y / scale;
    res.z = z / scale;
    res.s = s / scale;
    return res;
  }

  /// Restore the best iterate seen and report it at reduced accuracy if it
  /// qualifies, otherwise surrender with the given status.
  IpmResult fallback(IpmResult& res, const Snapshot& best, IpmStatus why) {
    if (best.valid) {
      x_ = best.x;
      y_ = best.y;
      z_ = best.z;
      s_ = best.s;
      tau_ = best.tau;
      kap_ = best.kap;
      res.pres = best.rr.pres;
      res.dres = best.rr.dres;
      res.gap = best.rr.gap;
      res.pcost = best.rr.pcost;
      if (check_exit(best.rr, res, true)) return finish(res);
    }
    res.status = why == IpmStatus::max_iterations ? IpmStatus::max_iterations
                                                  : IpmStatus::numerical_failure;
    return finish(res);
  }

  Snapshot snapshot(const Residuals& rr) const {
    Snapshot s;
    s.valid = true;
    s.x = x_;
    s.y = y_;
    s.z = z_;
    s.s = s_;
    s.tau = tau_;
    s.kap = kap_;
    s.rr = rr;
    return s;
  }

  // --- search directions ----------------------------------------------------

  /// Solve for one direction given residual weight w1, the scaled
  /// complementarity right-hand side ds1 = lambda \ d_s, and d_kap.
  Step direction(const Residuals& rr, double w1, const Vec& ds1, double d_kap,
                 const Vec& u1x, const Vec& u1y, const Vec& u1z, double cbh1) {
    Step st;
    Vec w_ds1 = scal_.apply(cone_, ds1);
    Vec rhs = assemble_rhs(-w1 * rr.rx, -w1 * rr.ry, -w1 * rr.rz - w_ds1);
    Vec sol = kkt_solve(rhs);
    Vec u2x = extract_x(sol), u2y = extract_y(sol), u2z = extract_z(sol);
    double cbh2 = sf_.c.dot(u2x) + sf_.b.dot(u2y) + sf_.h.dot(u2z);

    double denom = cbh1 - kap_ / tau_;
    if (denom == 0.0 || !std::isfinite(denom)) return st;
    st.dtau = (-w1 * rr.rt - d_kap / tau_ - cbh2) / denom;
    st.dx = u2x + st.dtau * u1x;
    st.dy = u2y + st.dtau * u1y;
    st.dz = u2z + st.dtau * u1z;
    st.w_dz = scal_.apply(cone_, st.dz);
    st.winv_ds = ds1 - st.w_dz;
    st.ds = scal_.apply(cone_, st.winv_ds);
    st.dkap = (d_kap - kap_ * st.dtau) / tau_;
    st.ok = st.dx.allFinite() && st.ds.allFinite() && std::isfinite(st.dtau) &&
            std::isfinite(st.dkap);
    return st;
  }

  double step_to_boundary(const Step& st) const {
    double a = cone_.step_bound(scal_.lambda, st.winv_ds);
    a = std::min(a, cone_.step_bound(scal_.lambda, st.w_dz));
    if (st.dtau < 0.0) a = std::min(a, -tau_ / st.dtau);
    if (st.dkap < 0.0) a = std::min(a, -kap_ / st.dkap);
    return a;
  }

  // --- KKT assembly, factorization, solves ---------------------------------

  void build_offsets() {
    z_row_.resize(static_cast<std::size_t>(cone_.m()));
    int pos = sf_.n + sf_.p;
    for (int i = 0; i < cone_.l(); ++i) z_row_[static_cast<std::size_t>(i)] = pos++;
    soc_row_.resize(static_cast<std::size_t>(cone_.num_cones()));
    for (int j = 0; j < cone_.num_cones(); ++j) {
      for (int r = 0; r < cone_.dim(j); ++r) {
        z_row_[static_cast<std::size_t>(cone_.off(j) + r)] = pos++;
      }
      soc_row_[static_cast<std::size_t>(j)] = pos;  // v row, u row follows
      pos += 2;
    }
    kdim_ = pos;
  }

  void push_symmetric(std::vector<Triplet>& ts, int i, int j, double v) const {
    ts.emplace_back(i, j, v);
    if (i != j) ts.emplace_back(j, i, v);
  }

  void build_kkt(double reg, SpMat& K_reg, SpMat& K_exact) const {
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(4 * (sf_.A.nonZeros() + sf_.G.nonZeros()) + 4 * kdim_));
    for (int k = 0; k < sf_.A.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf_.A, k); v; ++v) {
        push_symmetric(ts, static_cast<int>(v.col()), sf_.n + static_cast<int>(v.row()), v.value());
      }
    }
    for (int k = 0; k < sf_.G.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf_.G, k); v; ++v) {
        push_symmetric(ts, static_cast<int>(v.col()), z_row_[static_cast<std::size_t>(v.row())],
                       v.value());
      }
    }
    for (int i = 0; i < cone_.l(); ++i) {
      ts.emplace_back(z_row_[static_cast<std::size_t>(i)], z_row_[static_cast<std::size_t>(i)],
                      -scal_.lp_w2[i]);
    }
    for (int j = 0; j < cone_.num_cones(); ++j) {
      const SocScaling& sc = scal_.soc[static_cast<std::size_t>(j)];
      int q = cone_.dim(j);
      int r0 = z_row_[static_cast<std::size_t>(cone_.off(j))];
      int rv = soc_row_[static_cast<std::size_t>(j)];
      int ru = rv + 1;
      ts.emplace_back(r0, r0, -sc.eta2 * sc.d1);
      for (int r = 1; r < q; ++r) {
        int ri = z_row_[static_cast<std::size_t>(cone_.off(j) + r)];
        ts.emplace_back(ri, ri, -sc.eta2);
        push_symmetric(ts, ri, rv, -sc.eta2 * sc.v1 * sc.q[r - 1]);
        push_symmetric(ts, ri, ru, -sc.eta2 * sc.u1 * sc.q[r - 1]);
      }
      push_symmetric(ts, r0, ru, -sc.eta2 * sc.u0);
      ts.emplace_back(rv, rv, -sc.eta2);
      ts.emplace_back(ru, ru, sc.eta2);
    }
    K_exact.resize(kdim_, kdim_);
    K_exact.setFromTriplets(ts.begin(), ts.end());
    // Signed static regularization on every diagonal entry.
    for (int i = 0; i < sf_.n; ++i) ts.emplace_back(i, i, reg);
    for (int i = 0; i < sf_.p; ++i) ts.emplace_back(sf_.n + i, sf_.n + i, -reg);
    for (int r = sf_.n + sf_.p; r < kdim_; ++r) ts.emplace_back(r, r, -reg);
    for (int j = 0; j < cone_.num_cones(); ++j) {
      int ru = soc_row_[static_cast<std::size_t>(j)] + 1;
      ts.emplace_back(ru, ru, 2.0 * reg);  // net +reg on the positive u row
    }
    K_reg.resize(kdim_, kdim_);
    K_reg.setFromTriplets(ts.begin(), ts.end());
  }

  bool factorize(double reg) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      build_kkt(reg, K_reg_, K_exact_);
      if (!analyzed_) {
        ldlt_.analyzePattern(K_reg_);
        analyzed_ = true;
      }
      ldlt_.factorize(K_reg_);
      if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().allFinite() &&
          (ldlt_.vectorD().array() != 0.0).all()) {
        return true;
      }
      reg *= 100.0;
    }
    return false;
  }

  Vec assemble_rhs(const Vec& rx, const Vec& ry, const Vec& rz) const {
    Vec r = Vec::Zero(kdim_);
    r.head(sf_.n) = rx;
    r.segment(sf_.n, sf_.p) = ry;
    for (int i = 0; i < cone_.m(); ++i) r[z_row_[static_cast<std::size_t>(i)]] = rz[i];
    return r;
  }

  Vec kkt_solve(const Vec& rhs) const {
    Vec x = ldlt_.solve(rhs);
    Vec best = x;
    double best_err = (rhs - K_exact_ * x).lpNorm<Eigen::Infinity>();
    const double tol = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < opt_.refine_steps && best_err > tol; ++it) {
      x += ldlt_.solve(rhs - K_exact_ * x);
      double err = (rhs - K_exact_ * x).lpNorm<Eigen::Infinity>();
      if (err >= best_err) break;
      best = x;
      best_err = err;
    }
    return best;
  }

  Vec extract_x(const Vec& sol) const { return sol.head(sf_.n); }
  Vec extract_y(const Vec& sol) const { return sol.segment(sf_.n, sf_.p); }
  Vec extract_z(const Vec& sol) const {
    Vec z(cone_.m());
    for (int i = 0; i < cone_.m(); ++i) z[i] = sol[z_row_[static_cast<std::size_t>(i)]];
    return z;
  }

  StandardForm sf_;
  IpmOptions opt_;
  ConeOps cone_;
  Equilibration equil_;
  Scalings scal_;

  Vec x_, y_, z_, s_;
  double tau_ = 1.0, kap_ = 1.0;

  std::vector<int> z_row_;
  std::vector<int> soc_row_;
  int kdim_ = 0;
  SpMat K_reg_, K_exact_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
};

inline IpmResult ipm_solve(StandardForm sf, const IpmOptions& opt = {}) {
  IpmSolver solver(std::move(sf), opt);
  return solver.solve();
}

}  // namespace slotrec::detail
