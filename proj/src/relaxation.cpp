/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/relaxation.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "cbb/error.hpp"

namespace cbb {

Monomial::Monomial(std::initializer_list<SpinIndex> idx) : Monomial(std::vector<SpinIndex>(idx)) {}

Monomial::Monomial(std::vector<SpinIndex> idx) : indices(std::move(idx))
{
  std::sort(indices.begin(), indices.end());
  // s_i^2 = 1: equal pairs cancel
  std::vector<SpinIndex> reduced;
  for (std::size_t k = 0; k < indices.size();) {
    std::size_t run = 1;
    while (k + run < indices.size() && indices[k + run] == indices[k]) ++run;
    if (run % 2 == 1) reduced.push_back(indices[k]);
    k += run;
  }
  indices = std::move(reduced);
}

Monomial canonical_product(const Monomial& a, const Monomial& b)
{
  Monomial out;
  out.indices.reserve(a.indices.size() + b.indices.size());
  std::set_symmetric_difference(a.indices.begin(), a.indices.end(), b.indices.begin(),
                                b.indices.end(), std::back_inserter(out.indices));
  return out;
}

MomentBasis build_basis(const std::vector<Vertex>& clique, int level)
{
  if (level != 1 && level != 2) throw ContractViolation("moment basis level must be 1 or 2");
  MomentBasis basis;
  basis.clique = clique;
  std::sort(basis.clique.begin(), basis.clique.end());
  if (std::adjacent_find(basis.clique.begin(), basis.clique.end()) != basis.clique.end())
    throw ContractViolation("clique has repeated vertices");
  basis.level = level;
  basis.monomials.emplace_back();
  for (Vertex v : basis.clique) basis.monomials.push_back(Monomial{v});
  if (level == 2)
    for (std::size_t a = 0; a < basis.clique.size(); ++a)
      for (std::size_t b = a + 1; b < basis.clique.size(); ++b)
        basis.monomials.push_back(Monomial{basis.clique[a], basis.clique[b]});
  return basis;
}

std::size_t RelaxationProblem::variable(const Monomial& m) const
{
  auto it = variables.find(m);
  return it == variables.end() ? kNoVariable : it->second;
}

std::size_t RelaxationProblem::pair_variable(SpinIndex i, SpinIndex j) const
{
  return variable(Monomial{i, j});
}

std::size_t RelaxationProblem::max_block_size() const
{
  std::size_t best = 0;
  for (const auto& b : blocks) best = std::max(best, b.size);
  return best;
}

double RelaxationProblem::objective_value(std::span<const double> y) const
{
  if (y.size() != num_variables()) throw ContractViolation("moment vector has wrong length");
  double v = constant;
  for (const auto& t : objective) v += t.coefficient * y[t.variable];
  return v;
}

RelaxationProblem assemble(const SpinModel& model, const CliqueDecomposition& decomp,
                           std::size_t n_t)
{
  RelaxationProblem p;
  p.num_spins = model.num_spins();
  auto intern = [&p](Monomial m) {
    auto [it, inserted] = p.variables.try_emplace(m, p.monomials.size());
    if (inserted) p.monomials.push_back(std::move(m));
    return it->second;
  };
  intern(Monomial{});

  for (const auto& clique : decomp.cliques) {
    for (Vertex v : clique)
      if (v >= p.num_spins) throw ContractViolation("clique vertex out of range");
    MomentBlock block;
    block.basis = build_basis(clique, clique.size() < n_t ? 2 : 1);
    block.size = block.basis.monomials.size();
    block.index.resize(block.size * block.size);
    for (std::size_t r = 0; r < block.size; ++r)
      for (std::size_t c = r; c < block.size; ++c) {
        const auto var =
          intern(canonical_product(block.basis.monomials[r], block.basis.monomials[c]));
        block.index[r * block.size + c] = var;
        block.index[c * block.size + r] = var;
      }
    p.blocks.push_back(std::move(block));
  }

  p.singleton.assign(p.num_spins, kNoVariable);
  for (SpinIndex i = 0; i < p.num_spins; ++i) {
    p.singleton[i] = p.variable(Monomial{i});
    if (p.singleton[i] == kNoVariable)
      throw ContractViolation("spin " + std::to_string(i) + " is not covered by any clique");
  }

  // H = offset - sum J_ij s_i s_j + sum h_i s_i
  p.constant = model.offset();
  for (const auto& c : model.couplings()) {
    const auto var = p.pair_variable(c.i, c.j);
    if (var == kNoVariable)
      throw std::logic_error("relaxation: coupling (" + std::to_string(c.i) + ", " +
                             std::to_string(c.j) + ") is not inside any clique");
    p.objective.push_back({var, -c.J});
  }
  for (const auto& f : model.fields()) p.objective.push_back({p.singleton[f.i], f.h});
  return p;
}

RelaxationProblem with_cuts(RelaxationProblem problem, const std::vector<LinearCut>& cuts)
{
  for (const auto& cut : cuts) {
    for (const auto& [var, coef] : cut.coefficients)
      if (var >= problem.num_variables()) throw ContractViolation("cut references unknown variable");
    problem.cuts.push_back(cut);
  }
  return problem;
}

double cut_violation(const LinearCut& cut, std::span<const double> y)
{
  double v = 0.0;
  for (const auto& [var, coef] : cut.coefficients) v += coef * y[var];
  return cut.lower - v;
}

std::vector<LinearCut> find_violated_triangles(const RelaxationProblem& problem,
                                               std::span<const double> y, std::size_t max_new,
                                               double tolerance, bool level1_only)
{
  if (y.size() != problem.num_variables()) throw ContractViolation("moment vector has wrong length");
  static constexpr int kSigns[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};

  std::set<std::tuple<SpinIndex, SpinIndex, SpinIndex, int>> existing;
  for (const auto& c : problem.cuts)
    existing.emplace(c.triple[0], c.triple[1], c.triple[2], c.pattern);

  std::set<std::array<SpinIndex, 3>> scanned;
  std::vector<std::pair<double, LinearCut>> found;
  for (const auto& block : problem.blocks) {
    if (level1_only && block.basis.level != 1) continue;
    const auto& cl = block.basis.clique;
    for (std::size_t a = 0; a < cl.size(); ++a)
      for (std::size_t b = a + 1; b < cl.size(); ++b)
        for (std::size_t c = b + 1; c < cl.size(); ++c) {
          const std::array<SpinIndex, 3> t{cl[a], cl[b], cl[c]};
          if (!scanned.insert(t).second) continue;
          const std::size_t v[3] = {problem.pair_variable(t[0], t[1]),
                                    problem.pair_variable(t[0], t[2]),
                                    problem.pair_variable(t[1], t[2])};
          if (v[0] == kNoVariable || v[1] == kNoVariable || v[2] == kNoVariable) continue;
          for (int s = 0; s < 4; ++s) {
            const double value =
              kSigns[s][0] * y[v[0]] + kSigns[s][1] * y[v[1]] + kSigns[s][2] * y[v[2]];
            const double violation = -1.0 - value;
            if (violation <= tolerance || existing.count({t[0], t[1], t[2], s})) continue;
            LinearCut cut;
            cut.lower = -1.0;
            cut.triple = t;
            cut.pattern = s;
            for (int k = 0; k < 3; ++k) cut.coefficients.emplace_back(v[k], kSigns[s][k]);
            found.emplace_back(violation, std::move(cut));
          }
        }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& x, const auto& z) { return x.first > z.first; });
  std::vector<LinearCut> out;
  for (std::size_t k = 0; k < found.size() && k < max_new; ++k) out.push_back(found[k].second);
  return out;
}

std::vector<double> configuration_moments(const RelaxationProblem& problem,
                                          std::span<const std::int8_t> config)
{
  if (config.size() != problem.num_spins) throw ContractViolation("configuration has wrong length");
  std::vector<double> y(problem.num_variables());
  for (std::size_t k = 0; k < y.size(); ++k) {
    int prod = 1;
    for (SpinIndex i : problem.monomials[k].indices) prod *= config[i];
    y[k] = prod;
  }
  return y;
}

std::string describe(const RelaxationProblem& problem)
{
  std::ostringstream os;
  os << "variables " << problem.num_variables() << '\n';
  for (std::size_t k = 0; k < problem.num_variables(); ++k) {
    os << k;
    for (SpinIndex i : problem.monomials[k].indices) os << ' ' << i;
    os << '\n';
  }
  os << "blocks " << problem.blocks.size() << '\n';
  for (const auto& b : problem.blocks) {
    os << "block " << b.size << " level " << b.basis.level << '\n';
    for (std::size_t r = 0; r < b.size; ++r) {
      for (std::size_t c = 0; c < b.size; ++c) os << (c ? " " : "") << b.at(r, c);
      os << '\n';
    }
  }
  os << "objective " << problem.objective.size() << ' ' << format_number(problem.constant) << '\n';
  for (const auto& t : problem.objective) os << t.variable << ' ' << format_number(t.coefficient) << '\n';
  os << "cuts " << problem.cuts.size() << '\n';
  for (const auto& c : problem.cuts) {
    os << format_number(c.lower);
    for (const auto& [v, coef] : c.coefficients) os << ' ' << v << ':' << format_number(coef);
    os << '\n';
  }
  return os.str();
}

}  // namespace cbb
