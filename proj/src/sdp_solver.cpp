/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/sdp_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "cbb/error.hpp"

namespace cbb {

std::string to_string(SdpStatus status)
{
  switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iterations: return "max_iterations";
    case SdpStatus::numerical_trouble: return "numerical_trouble";
  }
  return "unknown";
}

Eigen::MatrixXd block_matrix(const MomentBlock& block, std::span<const double> y)
{
  Eigen::MatrixXd m(block.size, block.size);
  for (std::size_t r = 0; r < block.size; ++r)
    for (std::size_t c = 0; c < block.size; ++c) m(r, c) = y[block.at(r, c)];
  return m;
}

FeasibilityReport feasibility_check(const RelaxationProblem& problem, std::span<const double> y)
{
  if (y.size() != problem.num_variables()) throw ContractViolation("moment vector has wrong length");
  FeasibilityReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& block : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block_matrix(block, y),
                                                       Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    report.block_min_eigenvalues.push_back(lo);
    report.min_eigenvalue = std::min(report.min_eigenvalue, lo);
  }
  for (const auto& cut : problem.cuts)
    report.max_cut_violation = std::max(report.max_cut_violation, cut_violation(cut, y));
  report.objective = problem.objective_value(y);
  return report;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct Position {
  int r;
  int c;
};

struct Block {
  int size = 0;
  std::vector<Position> upper;  // strictly upper positions
  std::vector<int> var;         // free variable at each upper position
  std::vector<int> local;       // local variable id at each upper position
  std::vector<int> vars;        // local id -> free variable
  std::vector<int> slots;       // lower-triangular local pairs (i >= j) -> Schur value index
};

struct Cut {
  std::vector<std::pair<int, double>> a;  // free variable, coefficient
  double lower = 0.0;
  std::vector<int> slots;
};

// The problem rewritten over free variables x = y[1..]:
//   X_l = I + sum_k F_{l,k} x_k,   X_c = a_c^T x - lower_c.
struct Lmi {
  int m = 0;
  std::vector<Block> blocks;
  std::vector<Cut> cuts;
  Eigen::VectorXd c;
  double c0 = 0.0;
  int total_dim = 0;
};

Lmi build_lmi(const RelaxationProblem& problem)
{
  const std::size_t nv = problem.num_variables();
  if (nv == 0 || !problem.monomials[0].is_constant())
    throw ContractViolation("problem has no pinned constant variable");
  Lmi lmi;
  lmi.m = static_cast<int>(nv) - 1;
  std::vector<bool> in_block(nv, false);

  for (const auto& mb : problem.blocks) {
    if (mb.index.size() != mb.size * mb.size) throw ContractViolation("block index map has wrong size");
    Block b;
    b.size = static_cast<int>(mb.size);
    std::vector<int> local_of(nv, -1);
    for (std::size_t r = 0; r < mb.size; ++r) {
      if (mb.at(r, r) != kConstantVariable)
        throw ContractViolation("moment block diagonal must be the constant monomial");
      for (std::size_t c = r + 1; c < mb.size; ++c) {
        const auto v = mb.at(r, c);
        if (v != mb.at(c, r)) throw ContractViolation("moment block index map is not symmetric");
        if (v >= nv) throw ContractViolation("moment block references unknown variable");
        if (v == kConstantVariable)
          throw ContractViolation("off-diagonal constant entry in moment block");
        if (local_of[v] < 0) {
          local_of[v] = static_cast<int>(b.vars.size());
          b.vars.push_back(static_cast<int>(v) - 1);
        }
        b.upper.push_back({static_cast<int>(r), static_cast<int>(c)});
        b.var.push_back(static_cast<int>(v) - 1);
        b.local.push_back(local_of[v]);
        in_block[v] = true;
      }
    }
    lmi.total_dim += b.size;
    lmi.blocks.push_back(std::move(b));
  }
  for (std::size_t v = 1; v < nv; ++v)
    if (!in_block[v]) throw ContractViolation("variable " + std::to_string(v) + " appears in no block");

  for (const auto& pc : problem.cuts) {
    Cut cut;
    cut.lower = pc.lower;
    std::vector<double> coef;
    for (const auto& [v, a] : pc.coefficients) {
      if (v >= nv) throw ContractViolation("cut references unknown variable");
      if (v == kConstantVariable) {
        cut.lower -= a;
        continue;
      }
      auto it = std::find_if(cut.a.begin(), cut.a.end(),
                             [&](const auto& e) { return e.first == static_cast<int>(v) - 1; });
      if (it == cut.a.end())
        cut.a.emplace_back(static_cast<int>(v) - 1, a);
      else
        it->second += a;
    }
    if (!(cut.lower < 0.0))
      throw ContractViolation("cut is not strictly satisfied by the zero moment vector");
    lmi.total_dim += 1;
    lmi.cuts.push_back(std::move(cut));
  }

  lmi.c = Eigen::VectorXd::Zero(lmi.m);
  lmi.c0 = problem.constant;
  for (const auto& t : problem.objective) {
    if (t.variable >= nv) throw ContractViolation("objective references unknown variable");
    if (t.variable == kConstantVariable)
      lmi.c0 += t.coefficient;
    else
      lmi.c[static_cast<int>(t.variable) - 1] += t.coefficient;
  }
  return lmi;
}

// Lower-triangular Schur complement pattern with precomputed value slots.
SparseMatrix schur_pattern(Lmi& lmi)
{
  std::vector<Eigen::Triplet<double, int>> trip;
  auto add_pairs = [&](const std::vector<int>& vars) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        trip.emplace_back(std::max(vars[i], vars[j]), std::min(vars[i], vars[j]), 0.0);
  };
  for (const auto& b : lmi.blocks) add_pairs(b.vars);
  for (const auto& cut : lmi.cuts) {
    std::vector<int> vars;
    for (const auto& e : cut.a) vars.push_back(e.first);
    add_pairs(vars);
  }
  for (int k = 0; k < lmi.m; ++k) trip.emplace_back(k, k, 0.0);

  SparseMatrix B(lmi.m, lmi.m);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();

  auto slot = [&B](int row, int col) {
    if (row < col) std::swap(row, col);
    const int* begin = B.innerIndexPtr() + B.outerIndexPtr()[col];
    const int* end = B.innerIndexPtr() + B.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    return static_cast<int>(it - B.innerIndexPtr());
  };
  auto fill_slots = [&](const std::vector<int>& vars, std::vector<int>& slots) {
    slots.clear();
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) slots.push_back(slot(vars[i], vars[j]));
  };
  for (auto& b : lmi.blocks) fill_slots(b.vars, b.slots);
  for (auto& cut : lmi.cuts) {
    std::vector<int> vars;
    for (const auto& e : cut.a) vars.push_back(e.first);
    fill_slots(vars, cut.slots);
  }
  return B;
}

struct Iterate {
  Eigen::VectorXd x;
  std::vector<Eigen::MatrixXd> Y;
  Eigen::VectorXd yc;  // cut duals
};

struct Direction {
  Eigen::VectorXd dx;
  std::vector<Eigen::MatrixXd> dX;
  Eigen::VectorXd dxc;
  std::vector<Eigen::MatrixXd> dY;
  Eigen::VectorXd dyc;
};

class InteriorPoint {
 public:
  InteriorPoint(Lmi& lmi, const SdpTolerances& tol) : lmi_(lmi), tol_(tol) {}

  std::vector<Eigen::MatrixXd> primal_blocks(const Eigen::VectorXd& x) const
  {
    std::vector<Eigen::MatrixXd> X;
    X.reserve(lmi_.blocks.size());
    for (const auto& b : lmi_.blocks) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Identity(b.size, b.size);
      for (std::size_t k = 0; k < b.upper.size(); ++k) {
        const auto [r, c] = b.upper[k];
        M(r, c) = M(c, r) = x[b.var[k]];
      }
      X.push_back(std::move(M));
    }
    return X;
  }

  // F(dx) without the constant part.
  std::vector<Eigen::MatrixXd> forward(const Eigen::VectorXd& dx) const
  {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(lmi_.blocks.size());
    for (const auto& b : lmi_.blocks) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b.size, b.size);
      for (std::size_t k = 0; k < b.upper.size(); ++k) {
        const auto [r, c] = b.upper[k];
        M(r, c) = M(c, r) = dx[b.var[k]];
      }
      out.push_back(std::move(M));
    }
    return out;
  }

  Eigen::VectorXd cut_forward(const Eigen::VectorXd& dx, bool with_constant) const
  {
    Eigen::VectorXd v(lmi_.cuts.size());
    for (std::size_t k = 0; k < lmi_.cuts.size(); ++k) {
      double s = with_constant ? -lmi_.cuts[k].lower : 0.0;
      for (const auto& [var, a] : lmi_.cuts[k].a) s += a * dx[var];
      v[k] = s;
    }
    return v;
  }

  // <F_k, M> for every free variable k (block matrices need not be symmetric).
  Eigen::VectorXd adjoint(const std::vector<Eigen::MatrixXd>& M, const Eigen::VectorXd* mc) const
  {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(lmi_.m);
    for (std::size_t l = 0; l < lmi_.blocks.size(); ++l) {
      const auto& b = lmi_.blocks[l];
      for (std::size_t k = 0; k < b.upper.size(); ++k) {
        const auto [r, c] = b.upper[k];
        out[b.var[k]] += M[l](r, c) + M[l](c, r);
      }
    }
    if (mc)
      for (std::size_t k = 0; k < lmi_.cuts.size(); ++k)
        for (const auto& [var, a] : lmi_.cuts[k].a) out[var] += a * (*mc)[k];
    return out;
  }

  // Largest alpha with M + alpha dM >= 0, given the Cholesky factor of M.
  static double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& dM)
  {
    if (dM.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd W = llt.matrixL().solve(dM);
    W = llt.matrixL().solve(W.transpose()).transpose();
    W = 0.5 * (W + W.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
    return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
  }

  static double max_step_scalar(const Eigen::VectorXd& v, const Eigen::VectorXd& dv)
  {
    double a = std::numeric_limits<double>::infinity();
    for (int k = 0; k < v.size(); ++k)
      if (dv[k] < 0) a = std::min(a, -v[k] / dv[k]);
    return a;
  }

  SDPSolution run()
  {
    const int m = lmi_.m;
    const std::size_t nb = lmi_.blocks.size();
    const std::size_t nc = lmi_.cuts.size();
    const double c_norm = lmi_.c.size() ? lmi_.c.lpNorm<Eigen::Infinity>() : 0.0;
    const double omega = c_norm > 0.0 ? 10.0 * c_norm : 1.0;

    Iterate it;
    it.x = Eigen::VectorXd::Zero(m);
    for (const auto& b : lmi_.blocks) it.Y.push_back(omega * Eigen::MatrixXd::Identity(b.size, b.size));
    it.yc = Eigen::VectorXd::Constant(nc, omega);

    SparseMatrix B;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    if (m > 0) {
      B = schur_pattern(lmi_);
      ldlt.analyzePattern(B);
    }

    SDPSolution sol;
    double best_bound = -std::numeric_limits<double>::infinity();
    SdpResiduals best_res;
    sol.status = SdpStatus::max_iterations;
    int stalled = 0;

    for (std::size_t iter = 0;; ++iter) {
      const auto X = primal_blocks(it.x);
      const Eigen::VectorXd xc = cut_forward(it.x, true);

      std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_x(nb), llt_y(nb);
      std::vector<Eigen::MatrixXd> G(nb);
      bool y_pd = true;
      for (std::size_t l = 0; l < nb; ++l) {
        llt_x[l].compute(X[l]);
        llt_y[l].compute(it.Y[l]);
        if (llt_x[l].info() != Eigen::Success) {
          sol.status = SdpStatus::numerical_trouble;
          break;
        }
        if (llt_y[l].info() != Eigen::Success) y_pd = false;
        G[l] = llt_x[l].solve(Eigen::MatrixXd::Identity(X[l].rows(), X[l].cols()));
      }
      if (sol.status == SdpStatus::numerical_trouble) break;
      for (std::size_t k = 0; k < nc; ++k)
        if (!(xc[k] > 0) || !(it.yc[k] > 0)) y_pd = false;

      double xy = 0.0, trace_y = 0.0;
      for (std::size_t l = 0; l < nb; ++l) {
        xy += (X[l].cwiseProduct(it.Y[l])).sum();
        trace_y += it.Y[l].trace();
      }
      for (std::size_t k = 0; k < nc; ++k) {
        xy += xc[k] * it.yc[k];
        trace_y += -lmi_.cuts[k].lower * it.yc[k];
      }
      const double mu = lmi_.total_dim ? xy / lmi_.total_dim : 0.0;

      const Eigen::VectorXd d = lmi_.c - adjoint(it.Y, &it.yc);
      const double pobj = lmi_.c0 + lmi_.c.dot(it.x);
      const double dobj = lmi_.c0 - trace_y;
      const double d_inf = m ? d.lpNorm<Eigen::Infinity>() : 0.0;
      const double d_one = m ? d.lpNorm<1>() : 0.0;
      const double scale = std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));
      const double rel_gap = (pobj - dobj) / scale;
      const double rel_dinf = d_inf / (1.0 + c_norm);

      if (y_pd && dobj - d_one > best_bound) {
        best_bound = dobj - d_one;
        best_res.dual_infeasibility = d_inf;
        best_res.dual_correction = d_one;
        best_res.relative_gap = rel_gap;
      }

      sol.iterations = iter;
      sol.primal_objective = pobj;
      if (tol_.verbose)
        std::fprintf(stderr, "sdp %3zu  pobj %.12e  dobj %.12e  gap %.2e  dinf %.2e  mu %.2e\n",
                     iter, pobj, dobj, rel_gap, rel_dinf, mu);

      if (rel_gap <= tol_.relative_gap && rel_dinf <= tol_.feasibility) {
        sol.status = SdpStatus::optimal;
        break;
      }
      if (m == 0 && nc == 0) {
        sol.status = SdpStatus::optimal;
        break;
      }
      if (iter >= tol_.max_iterations) {
        sol.status = SdpStatus::max_iterations;
        break;
      }

      // Schur complement B_ij = <F_i, G F_j Y>
      std::fill(B.valuePtr(), B.valuePtr() + B.nonZeros(), 0.0);
      double* val = B.valuePtr();
      for (std::size_t l = 0; l < nb; ++l) {
        const auto& b = lmi_.blocks[l];
        const auto& g = G[l];
        const auto& y = it.Y[l];
        const std::size_t nloc = b.vars.size();
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nloc, nloc);
        const std::size_t u = b.upper.size();
        for (std::size_t p = 0; p < u; ++p) {
          const int pr = b.upper[p].r, pc = b.upper[p].c;
          const int li = b.local[p];
          for (std::size_t q = p; q < u; ++q) {
            const int a = b.upper[q].r, bb = b.upper[q].c;
            const double t = g(pr, a) * y(bb, pc) + g(pr, bb) * y(a, pc) + g(pc, a) * y(bb, pr) +
                             g(pc, bb) * y(a, pr);
            const int lj = b.local[q];
            if (p == q) {
              local(li, li) += t;
            } else {
              local(li, lj) += t;
              local(lj, li) += t;
            }
          }
        }
        std::size_t s = 0;
        for (std::size_t i = 0; i < nloc; ++i)
          for (std::size_t j = 0; j <= i; ++j) val[b.slots[s++]] += local(i, j);
      }
      for (std::size_t k = 0; k < nc; ++k) {
        const auto& cut = lmi_.cuts[k];
        const double w = it.yc[k] / xc[k];
        std::size_t s = 0;
        for (std::size_t i = 0; i < cut.a.size(); ++i)
          for (std::size_t j = 0; j <= i; ++j) val[cut.slots[s++]] += cut.a[i].second * cut.a[j].second * w;
      }

      if (!factorize(ldlt, B)) {
        sol.status = SdpStatus::numerical_trouble;
        break;
      }

      const Eigen::VectorXd fg = adjoint(G, nullptr) +
                                 [&] {
                                   Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
                                   for (std::size_t k = 0; k < nc; ++k)
                                     for (const auto& [var, a] : lmi_.cuts[k].a) v[var] += a / xc[k];
                                   return v;
                                 }();

      // predictor
      Direction pred;
      pred.dx = ldlt.solve(Eigen::VectorXd(-lmi_.c));
      complete(pred, 0.0, X, xc, G, it, nullptr);
      const double ap_aff = std::min(1.0, primal_step(llt_x, pred, xc));
      const double ad_aff = std::min(1.0, dual_step(llt_y, pred, it));
      double xy_aff = 0.0;
      for (std::size_t l = 0; l < nb; ++l)
        xy_aff += ((X[l] + ap_aff * pred.dX[l]).cwiseProduct(it.Y[l] + ad_aff * pred.dY[l])).sum();
      for (std::size_t k = 0; k < nc; ++k)
        xy_aff += (xc[k] + ap_aff * pred.dxc[k]) * (it.yc[k] + ad_aff * pred.dyc[k]);
      const double mu_aff = xy_aff / lmi_.total_dim;
      const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      const double mu_t = sigma * mu;

      // corrector
      std::vector<Eigen::MatrixXd> second(nb);
      for (std::size_t l = 0; l < nb; ++l) second[l] = G[l] * pred.dX[l] * pred.dY[l];
      Eigen::VectorXd second_c(nc);
      for (std::size_t k = 0; k < nc; ++k) second_c[k] = pred.dxc[k] * pred.dyc[k] / xc[k];
      Eigen::VectorXd rhs = mu_t * fg - lmi_.c - adjoint(second, &second_c);
      Direction corr;
      corr.dx = ldlt.solve(rhs);
      complete(corr, mu_t, X, xc, G, it, &pred);

      const double gamma = 0.9;
      const double ap = std::min(1.0, gamma * primal_step(llt_x, corr, xc));
      const double ad = std::min(1.0, gamma * dual_step(llt_y, corr, it));
      if (ap < 1e-12 && ad < 1e-12) {
        if (++stalled >= 3) {
          sol.status = SdpStatus::numerical_trouble;
          break;
        }
      } else {
        stalled = 0;
      }

      it.x += ap * corr.dx;
      for (std::size_t l = 0; l < nb; ++l) {
        it.Y[l] += ad * corr.dY[l];
        it.Y[l] = 0.5 * (it.Y[l] + it.Y[l].transpose()).eval();
      }
      it.yc += ad * corr.dyc;
    }

    sol.y.assign(m + 1, 0.0);
    sol.y[0] = 1.0;
    for (int k = 0; k < m; ++k) sol.y[k + 1] = it.x[k];
    sol.block_matrices = primal_blocks(it.x);
    sol.primal_objective = lmi_.c0 + lmi_.c.dot(it.x);
    sol.dual_bound = std::isfinite(best_bound) ? std::min(best_bound, sol.primal_objective)
                                               : -std::numeric_limits<double>::infinity();
    sol.residuals = best_res;
    sol.residuals.primal_infeasibility = 0.0;
    return sol;
  }

 private:
  // LDLT of the Schur complement.  Near the optimum B can lose rank (for
  // instance when a block's dual tends to zero); a growing diagonal shift
  // keeps the direction computable.  Errors in dx only show up as dual
  // residual, which the safe bound accounts for.
  static bool factorize(Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>& ldlt,
                        const SparseMatrix& B)
  {
    double max_diag = 0.0;
    for (int k = 0; k < B.outerSize(); ++k) max_diag = std::max(max_diag, std::abs(B.coeff(k, k)));
    for (double rel : {0.0, 1e-14, 1e-12, 1e-10, 1e-8}) {
      ldlt.setShift(rel * max_diag);
      ldlt.factorize(B);
      if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) return true;
    }
    return false;
  }

  // Fills dX, dxc, dY, dyc from dx for complementarity target mu; `pred` adds
  // the Mehrotra second-order term.
  void complete(Direction& dir, double mu, const std::vector<Eigen::MatrixXd>& X,
                const Eigen::VectorXd& xc, const std::vector<Eigen::MatrixXd>& G,
                const Iterate& it, const Direction* pred) const
  {
    const std::size_t nb = lmi_.blocks.size();
    const std::size_t nc = lmi_.cuts.size();
    dir.dX = forward(dir.dx);
    dir.dxc = cut_forward(dir.dx, false);
    dir.dY.resize(nb);
    for (std::size_t l = 0; l < nb; ++l) {
      Eigen::MatrixXd dY = mu * G[l] - it.Y[l] - G[l] * dir.dX[l] * it.Y[l];
      if (pred) dY -= G[l] * pred->dX[l] * pred->dY[l];
      dir.dY[l] = 0.5 * (dY + dY.transpose());
    }
    dir.dyc.resize(nc);
    for (std::size_t k = 0; k < nc; ++k) {
      double v = mu / xc[k] - it.yc[k] - dir.dxc[k] * it.yc[k] / xc[k];
      if (pred) v -= pred->dxc[k] * pred->dyc[k] / xc[k];
      dir.dyc[k] = v;
    }
    (void)X;
  }

  double primal_step(const std::vector<Eigen::LLT<Eigen::MatrixXd>>& llt_x, const Direction& dir,
                     const Eigen::VectorXd& xc) const
  {
    double a = max_step_scalar(xc, dir.dxc);
    for (std::size_t l = 0; l < llt_x.size(); ++l) a = std::min(a, max_step(llt_x[l], dir.dX[l]));
    return a;
  }

  double dual_step(const std::vector<Eigen::LLT<Eigen::MatrixXd>>& llt_y, const Direction& dir,
                   const Iterate& it) const
  {
    double a = max_step_scalar(it.yc, dir.dyc);
    for (std::size_t l = 0; l < llt_y.size(); ++l) a = std::min(a, max_step(llt_y[l], dir.dY[l]));
    return a;
  }

  Lmi& lmi_;
  SdpTolerances tol_;
};

}  // namespace

SDPSolution solve(const RelaxationProblem& problem, const SdpTolerances& tolerances)
{
  Lmi lmi = build_lmi(problem);
  InteriorPoint ipm(lmi, tolerances);
  SDPSolution sol = ipm.run();
  const double slack = 1e-7 * (1.0 + std::abs(sol.primal_objective));
  if (sol.dual_bound > sol.primal_objective + slack)
    throw std::logic_error("sdp: weak duality violated");
  return sol;
}

}  // namespace cbb
