#pragma once

// Small modeling layer over the interior-point engine in detail/ipm.hpp.
// Problems are stated as sparse linear objective/rows plus second-order cone
// blocks of the form |P x + p| <= f'x + g, and compiled to the solver's
// standard form on solve().

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slotrec/csv.hpp"
#include "slotrec/detail/ipm.hpp"

namespace slotrec {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct SolveStats {
  int iterations = 0;
  double runtime_seconds = 0.0;
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool reduced_accuracy = false;
  // Worst violations of the original constraints by the returned point.
  double feas_eq = 0.0;
  double feas_ineq = 0.0;
  double feas_soc = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::numerical_failure;
  std::vector<double> x;          // primal point when optimal, else empty
  std::vector<double> eq_duals;   // multipliers for equality rows
  std::vector<double> cone_duals; // multipliers for ineq rows, bounds, cones (stacked)
  double objective = std::numeric_limits<double>::quiet_NaN();
  SolveStats stats;
};

struct SolverOptions {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iters = 100;
  double static_reg = 7e-8;
  // Violations beyond this (scaled) bound downgrade "optimal" to a failure.
  double accept_feas = 1e-5;
};

using SparseRow = std::vector<std::pair<int, double>>;

/// min c'x subject to linear equalities, linear upper bounds, second-order
/// cone blocks and per-variable lower bounds.
class ConicProgram {
 public:
  struct Row {
    SparseRow terms;
    double rhs = 0.0;
  };

  struct SocBlock {
    std::vector<SparseRow> norm_rows;  // P
    std::vector<double> norm_offset;   // p
    SparseRow bound_terms;             // f
    double bound_offset = 0.0;         // g
  };

  explicit ConicProgram(int num_vars)
      : num_vars_(num_vars),
        lower_(static_cast<std::size_t>(num_vars), -std::numeric_limits<double>::infinity()) {
    if (num_vars < 1) throw InputError("ConicProgram: need at least one variable");
  }

  int num_vars() const { return num_vars_; }

  void set_objective_term(int var, double coef) {
    check_var(var);
    obj_.emplace_back(var, coef);
  }

  void set_lower_bound(int var, double lb) {
    check_var(var);
    lower_[static_cast<std::size_t>(var)] = lb;
  }

  void add_equality(SparseRow terms, double rhs) {
    check_row(terms);
    eq_.push_back({std::move(terms), rhs});
  }

  /// terms' x <= rhs
  void add_upper_bound_row(SparseRow terms, double rhs) {
    check_row(terms);
    ineq_.push_back({std::move(terms), rhs});
  }

  /// |P x + p| <= f'x + g. A block without norm rows degenerates to the
  /// linear inequality f'x + g >= 0.
  void add_soc(SocBlock block) {
    if (block.norm_rows.size() != block.norm_offset.size()) {
      throw InputError("ConicProgram: norm rows and offsets disagree in length");
    }
    check_row(block.bound_terms);
    for (const auto& r : block.norm_rows) check_row(r);
    if (block.norm_rows.empty()) {
      SparseRow neg;
      neg.reserve(block.bound_terms.size());
      for (auto [v, cf] : block.bound_terms) neg.emplace_back(v, -cf);
      ineq_.push_back({std::move(neg), block.bound_offset});
      return;
    }
    socs_.push_back(std::move(block));
  }

  const std::vector<Row>& equalities() const { return eq_; }
  const std::vector<Row>& upper_bound_rows() const { return ineq_; }
  const std::vector<SocBlock>& soc_blocks() const { return socs_; }
  const std::vector<std::pair<int, double>>& objective() const { return obj_; }
  const std::vector<double>& lower_bounds() const { return lower_; }

  SolveResult solve(const SolverOptions& opt = {}) const;

  void dump(const std::string& path) const;
  static ConicProgram load(const std::string& path);

 private:
  void check_var(int var) const {
    if (var < 0 || var >= num_vars_) throw InputError("ConicProgram: variable index out of range");
  }
  void check_row(const SparseRow& terms) const {
    for (auto [v, cf] : terms) {
      check_var(v);
      if (!std::isfinite(cf)) throw InputError("ConicProgram: non-finite coefficient");
    }
  }

  int num_vars_;
  std::vector<std::pair<int, double>> obj_;
  std::vector<Row> eq_;
  std::vector<Row> ineq_;
  std::vector<SocBlock> socs_;
  std::vector<double> lower_;
};

namespace detail {

struct CompiledForm {
  StandardForm sf;
  int n_ineq = 0;
  std::vector<int> bound_vars;  // var index per bound row, in row order
};

inline CompiledForm compile(const ConicProgram& cp) {
  CompiledForm out;
  StandardForm& sf = out.sf;
  sf.n = cp.num_vars();
  sf.p = static_cast<int>(cp.equalities().size());
  out.n_ineq = static_cast<int>(cp.upper_bound_rows().size());

  for (int v = 0; v < sf.n; ++v) {
    if (std::isfinite(cp.lower_bounds()[static_cast<std::size_t>(v)])) out.bound_vars.push_back(v);
  }
  sf.l = out.n_ineq + static_cast<int>(out.bound_vars.size());

  int soc_total = 0;
  for (const auto& blk : cp.soc_blocks()) {
    int q = static_cast<int>(blk.norm_rows.size()) + 1;
    sf.soc_dims.push_back(q);
    soc_total += q;
  }
  bool padded = sf.l + soc_total == 0;
  if (padded) sf.l = 1;  // keep the cone nonempty; 0'x <= 1 never binds
  int m = sf.l + soc_total;

  sf.c = Vec::Zero(sf.n);
  for (auto [v, cf] : cp.objective()) sf.c[v] += cf;

  std::vector<Triplet> ta;
  sf.b = Vec::Zero(sf.p);
  for (int i = 0; i < sf.p; ++i) {
    const auto& row = cp.equalities()[static_cast<std::size_t>(i)];
    for (auto [v, cf] : row.terms) ta.emplace_back(i, v, cf);
    sf.b[i] = row.rhs;
  }
  sf.A.resize(sf.p, sf.n);
  sf.A.setFromTriplets(ta.begin(), ta.end());

  std::vector<Triplet> tg;
  sf.h = Vec::Zero(m);
  int r = 0;
  for (const auto& row : cp.upper_bound_rows()) {
    for (auto [v, cf] : row.terms) tg.emplace_back(r, v, cf);
    sf.h[r] = row.rhs;
    ++r;
  }
  for (int v : out.bound_vars) {
    tg.emplace_back(r, v, -1.0);
    sf.h[r] = -cp.lower_bounds()[static_cast<std::size_t>(v)];
    ++r;
  }
  if (padded) sf.h[r++] = 1.0;
  for (const auto& blk : cp.soc_blocks()) {
    // s0 = g + f'x, s_k = p_k + (P x)_k, so G rows carry -f and -P.
    for (auto [v, cf] : blk.bound_terms) tg.emplace_back(r, v, -cf);
    sf.h[r] = blk.bound_offset;
    ++r;
    for (std::size_t k = 0; k < blk.norm_rows.size(); ++k) {
      for (auto [v, cf] : blk.norm_rows[k]) tg.emplace_back(r, v, -cf);
      sf.h[r] = blk.norm_offset[k];
      ++r;
    }
  }
  sf.G.resize(m, sf.n);
  sf.G.setFromTriplets(tg.begin(), tg.end());
  return out;
}

inline double eval_row(const SparseRow& terms, const std::vector<double>& x) {
  double v = 0.0;
  for (auto [i, cf] : terms) v += cf * x[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace detail

inline SolveResult ConicProgram::solve(const SolverOptions& opt) const {
  auto t0 = std::chrono::steady_clock::now();
  detail::CompiledForm cf = detail::compile(*this);

  detail::IpmOptions iopt;
  iopt.feastol = opt.feastol;
  iopt.abstol = opt.abstol;
  iopt.reltol = opt.reltol;
  iopt.max_iters = opt.max_iters;
  iopt.static_reg = opt.static_reg;
  detail::IpmResult ir = detail::ipm_solve(cf.sf, iopt);

  SolveResult res;
  res.stats.iterations = ir.iterations;
  res.stats.primal_residual = ir.pres;
  res.stats.dual_residual = ir.dres;
  res.stats.gap = ir.gap;
  res.stats.reduced_accuracy = ir.reduced_accuracy;

  switch (ir.status) {
    case detail::IpmStatus::optimal: res.status = SolveStatus::optimal; break;
    case detail::IpmStatus::primal_infeasible: res.status = SolveStatus::infeasible; break;
    case detail::IpmStatus::dual_infeasible: res.status = SolveStatus::unbounded; break;
    default: res.status = SolveStatus::numerical_failure; break;
  }

  if (res.status == SolveStatus::optimal) {
    res.x.assign(ir.x.data(), ir.x.data() + ir.x.size());
    res.eq_duals.assign(ir.y.data(), ir.y.data() + ir.y.size());
    res.cone_duals.assign(ir.z.data(), ir.z.data() + ir.z.size());
    double obj = 0.0;
    for (auto [v, c] : obj_) obj += c * res.x[static_cast<std::size_t>(v)];
    res.objective = obj;

    // Feasibility re-check against the original data, independent of the
    // solver's internal (equilibrated) residuals.
    double mag = 1.0;
    for (double v : res.x) mag = std::max(mag, std::abs(v));
    for (const auto& row : eq_) {
      double lhs = detail::eval_row(row.terms, res.x);
      res.stats.feas_eq = std::max(res.stats.feas_eq,
                                   std::abs(lhs - row.rhs) / std::max(1.0, std::abs(row.rhs)));
    }
    for (const auto& row : ineq_) {
      double lhs = detail::eval_row(row.terms, res.x);
      res.stats.feas_ineq = std::max(res.stats.feas_ineq,
                                     (lhs - row.rhs) / std::max(1.0, std::abs(row.rhs)));
    }
    for (int v = 0; v < num_vars_; ++v) {
      double lb = lower_[static_cast<std::size_t>(v)];
      if (std::isfinite(lb)) {
        res.stats.feas_ineq =
            std::max(res.stats.feas_ineq, (lb - res.x[static_cast<std::size_t>(v)]) / std::max(1.0, std::abs(lb)));
      }
    }
    for (const auto& blk : socs_) {
      double rhs = detail::eval_row(blk.bound_terms, res.x) + blk.bound_offset;
      double nrm = 0.0;
      for (std::size_t k = 0; k < blk.norm_rows.size(); ++k) {
        double e = detail::eval_row(blk.norm_rows[k], res.x) + blk.norm_offset[k];
        nrm += e * e;
      }
      nrm = std::sqrt(nrm);
      res.stats.feas_soc =
          std::max(res.stats.feas_soc, (nrm - rhs) / std::max(1.0, std::abs(rhs)));
    }
    double worst = std::max({res.stats.feas_eq, res.stats.feas_ineq, res.stats.feas_soc});
    if (worst > opt.accept_feas * mag) {
      res.status = SolveStatus::numerical_failure;
      res.x.clear();
      res.objective = std::numeric_limits<double>::quiet_NaN();
    }
  }

  res.stats.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Plain-text round-trip format, mostly for bug reports and solver debugging.

inline void ConicProgram::dump(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out.precision(17);
  out << "conic v1\n";
  out << "vars " << num_vars_ << "\n";
  for (auto [v, c] : obj_) out << "obj " << v << ' ' << c << "\n";
  for (int v = 0; v < num_vars_; ++v) {
    if (std::isfinite(lower_[static_cast<std::size_t>(v)])) {
      out << "lb " << v << ' ' << lower_[static_cast<std::size_t>(v)] << "\n";
    }
  }
  auto put_row = [&out](const SparseRow& terms) {
    out << ' ' << terms.size();
    for (auto [v, c] : terms) out << ' ' << v << ' ' << c;
  };
  for (const auto& row : eq_) {
    out << "eq " << row.rhs;
    put_row(row.terms);
    out << "\n";
  }
  for (const auto& row : ineq_) {
    out << "ineq " << row.rhs;
    put_row(row.terms);
    out << "\n";
  }
  for (const auto& blk : socs_) {
    out << "soc " << blk.norm_rows.size() << ' ' << blk.bound_offset;
    put_row(blk.bound_terms);
    out << "\n";
    for (std::size_t k = 0; k < blk.norm_rows.size(); ++k) {
      out << "socrow " << blk.norm_offset[k];
      put_row(blk.norm_rows[k]);
      out << "\n";
    }
  }
}

inline ConicProgram ConicProgram::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read file: " + path);
  std::string header;
  std::getline(in, header);
  if (header != "conic v1") throw InputError(path + ": not a conic program dump");
  std::string word;
  if (!(in >> word) || word != "vars") throw InputError(path + ": missing vars line");
  int n = 0;
  in >> n;
  ConicProgram cp(n);
  auto get_row = [&in, &path]() {
    std::size_t k = 0;
    if (!(in >> k)) throw InputError(path + ": truncated row");
    SparseRow terms;
    terms.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      int v = 0;
      double c = 0.0;
      if (!(in >> v >> c)) throw InputError(path + ": truncated row");
      terms.emplace_back(v, c);
    }
    return terms;
  };
  SocBlock pending;
  std::size_t pending_rows = 0;
  bool in_soc = false;
  auto flush_soc = [&]() {
    if (in_soc) {
      if (pending.norm_rows.size() != pending_rows) {
        throw InputError(path + ": soc block has missing rows");
      }
      cp.add_soc(std::move(pending));
      pending = SocBlock{};
      in_soc = false;
    }
  };
  while (in >> word) {
    if (word == "obj") {
      flush_soc();
      int v;
      double c;
      in >> v >> c;
      cp.set_objective_term(v, c);
    } else if (word == "lb") {
      flush_soc();
      int v;
      double c;
      in >> v >> c;
      cp.set_lower_bound(v, c);
    } else if (word == "eq" || word == "ineq") {
      flush_soc();
      double rhs;
      in >> rhs;
      auto terms = get_row();
      if (word == "eq") {
        cp.add_equality(std::move(terms), rhs);
      } else {
        cp.add_upper_bound_row(std::move(terms), rhs);
      }
    } else if (word == "soc") {
      flush_soc();
      in >> pending_rows >> pending.bound_offset;
      pending.bound_terms = get_row();
      in_soc = true;
    } else if (word == "socrow") {
      if (!in_soc) throw InputError(path + ": socrow outside a soc block");
      double off;
      in >> off;
      pending.norm_offset.push_back(off);
      pending.norm_rows.push_back(get_row());
    } else {
      throw InputError(path + ": unknown record '" + word + "'");
    }
  }
  flush_soc();
  return cp;
}

}  // namespace slotrec
