/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/chordal.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "cbb/error.hpp"

namespace cbb {

DependencyGraph::DependencyGraph(std::size_t n, const std::vector<Edge>& edges) : adjacency_(n)
{
  for (const auto& [u, v] : edges) add_edge(u, v);
}

std::size_t DependencyGraph::num_edges() const noexcept
{
  std::size_t twice = 0;
  for (const auto& adj : adjacency_) twice += adj.size();
  return twice / 2;
}

bool DependencyGraph::adjacent(Vertex u, Vertex v) const
{
  const auto& adj = adjacency_.at(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

bool DependencyGraph::add_edge(Vertex u, Vertex v)
{
  if (u >= adjacency_.size() || v >= adjacency_.size())
    throw ContractViolation("edge endpoint out of range");
  if (u == v) throw ContractViolation("self-loops are not allowed");
  auto& au = adjacency_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adjacency_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  return true;
}

std::vector<Edge> DependencyGraph::edges() const
{
  std::vector<Edge> out;
  for (Vertex u = 0; u < adjacency_.size(); ++u)
    for (Vertex v : adjacency_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

DependencyGraph dependency_graph(const SpinModel& model)
{
  DependencyGraph g(model.num_spins());
  for (const auto& c : model.couplings()) g.add_edge(c.i, c.j);
  return g;
}

namespace {

std::vector<std::size_t> positions(const std::vector<Vertex>& ordering)
{
  std::vector<std::size_t> pos(ordering.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < ordering.size(); ++k) {
    if (ordering[k] >= ordering.size() || pos[ordering[k]] != std::numeric_limits<std::size_t>::max())
      return {};
    pos[ordering[k]] = k;
  }
  return pos;
}

// Later neighbors of every vertex, sorted by position in the ordering.
std::vector<std::vector<Vertex>> higher_neighbors(const DependencyGraph& g,
                                                  const std::vector<std::size_t>& pos)
{
  std::vector<std::vector<Vertex>> higher(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    for (Vertex u : g.neighbors(v))
      if (pos[u] > pos[v]) higher[v].push_back(u);
    std::sort(higher[v].begin(), higher[v].end(),
              [&](Vertex a, Vertex b) { return pos[a] < pos[b]; });
  }
  return higher;
}

// Returns the first (v, w) with w a later neighbor of v not adjacent to v's
// earliest later neighbor, or nullopt-like {n, n} when the ordering is a PEO.
std::pair<Vertex, Vertex> peo_violation(const DependencyGraph& g,
                                        const std::vector<std::size_t>& pos)
{
  const std::size_t n = g.num_vertices();
  const auto higher = higher_neighbors(g, pos);
  for (Vertex v = 0; v < n; ++v) {
    if (higher[v].size() < 2) continue;
    const Vertex parent = higher[v].front();
    for (std::size_t k = 1; k < higher[v].size(); ++k)
      if (!g.adjacent(parent, higher[v][k])) return {v, higher[v][k]};
  }
  return {n, n};
}

// Shortest u-w path avoiding v and every other neighbor of v.
std::vector<Vertex> avoiding_path(const DependencyGraph& g, Vertex v, Vertex u, Vertex w)
{
  const std::size_t n = g.num_vertices();
  std::vector<bool> blocked(n, false);
  blocked[v] = true;
  for (Vertex x : g.neighbors(v))
    if (x != u && x != w) blocked[x] = true;

  std::vector<Vertex> prev(n, n);
  std::deque<Vertex> queue{u};
  prev[u] = u;
  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    if (x == w) break;
    for (Vertex y : g.neighbors(x)) {
      if (blocked[y] || prev[y] != n) continue;
      prev[y] = x;
      queue.push_back(y);
    }
  }
  if (prev[w] == n) return {};
  std::vector<Vertex> path;
  for (Vertex x = w; x != u; x = prev[x]) path.push_back(x);
  path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Vertex> cycle_through(const DependencyGraph& g, Vertex v, Vertex u, Vertex w)
{
  auto path = avoiding_path(g, v, u, w);
  if (path.empty()) return {};
  path.insert(path.begin(), v);
  return path;
}

std::vector<Vertex> find_chordless_cycle(const DependencyGraph& g, Vertex hint_v, Vertex hint_u,
                                         Vertex hint_w)
{
  if (auto c = cycle_through(g, hint_v, hint_u, hint_w); !c.empty()) return c;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const auto& adj = g.neighbors(v);
    for (std::size_t a = 0; a < adj.size(); ++a)
      for (std::size_t b = a + 1; b < adj.size(); ++b)
        if (!g.adjacent(adj[a], adj[b]))
          if (auto c = cycle_through(g, v, adj[a], adj[b]); !c.empty()) return c;
  }
  return {};
}

// Lexicographic BFS visit order; ties go to the smallest vertex index.
std::vector<Vertex> lex_bfs(const DependencyGraph& g)
{
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<std::size_t>> label(n);
  std::vector<bool> visited(n, false);
  std::vector<Vertex> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    Vertex best = n;
    for (Vertex v = 0; v < n; ++v) {
      if (visited[v]) continue;
      if (best == n || std::lexicographical_compare(label[best].begin(), label[best].end(),
                                                    label[v].begin(), label[v].end()))
        best = v;
    }
    visited[best] = true;
    order.push_back(best);
    for (Vertex u : g.neighbors(best))
      if (!visited[u]) label[u].push_back(n - step);
  }
  return order;
}

}  // namespace

bool is_perfect_elimination_ordering(const DependencyGraph& g, const std::vector<Vertex>& ordering)
{
  if (ordering.size() != g.num_vertices()) return false;
  const auto pos = positions(ordering);
  if (pos.size() != ordering.size()) return false;
  return peo_violation(g, pos).first == g.num_vertices();
}

ChordalityResult is_chordal(const DependencyGraph& g)
{
  ChordalityResult result;
  auto order = lex_bfs(g);
  std::reverse(order.begin(), order.end());
  const auto pos = positions(order);
  const auto [v, w] = peo_violation(g, pos);
  if (v == g.num_vertices()) {
    result.chordal = true;
    result.ordering = std::move(order);
    return result;
  }
  const auto higher = higher_neighbors(g, pos);
  result.witness = find_chordless_cycle(g, v, higher[v].front(), w);
  return result;
}

std::vector<std::vector<Vertex>> maximal_cliques(const DependencyGraph& g,
                                                 const std::vector<Vertex>& ordering)
{
  if (!is_perfect_elimination_ordering(g, ordering))
    throw ContractViolation("maximal_cliques: ordering is not a perfect elimination ordering");
  const auto pos = positions(ordering);
  const auto higher = higher_neighbors(g, pos);
  const std::size_t n = g.num_vertices();

  // K_v = {v} + higher(v) is contained in another candidate iff some u has v
  // as its earliest later neighbor and |higher(u)| = |higher(v)| + 1.
  std::vector<bool> maximal(n, true);
  for (Vertex u = 0; u < n; ++u) {
    if (higher[u].empty()) continue;
    const Vertex parent = higher[u].front();
    if (higher[u].size() == higher[parent].size() + 1) maximal[parent] = false;
  }

  std::vector<std::vector<Vertex>> cliques;
  for (Vertex v : ordering) {
    if (!maximal[v]) continue;
    std::vector<Vertex> clique = higher[v];
    clique.push_back(v);
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
  }
  return cliques;
}

CliqueDecomposition chordal_extension(const DependencyGraph& g)
{
  const std::size_t n = g.num_vertices();
  std::vector<std::set<Vertex>> adj(n);
  for (Vertex v = 0; v < n; ++v) adj[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());

  CliqueDecomposition d;
  DependencyGraph extended = g;
  std::vector<bool> eliminated(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    Vertex best = n;
    for (Vertex v = 0; v < n; ++v)
      if (!eliminated[v] && (best == n || adj[v].size() < adj[best].size())) best = v;

    const std::vector<Vertex> nbrs(adj[best].begin(), adj[best].end());
    for (std::size_t a = 0; a < nbrs.size(); ++a)
      for (std::size_t b = a + 1; b < nbrs.size(); ++b)
        if (adj[nbrs[a]].insert(nbrs[b]).second) {
          adj[nbrs[b]].insert(nbrs[a]);
          d.fill_edges.emplace_back(nbrs[a], nbrs[b]);
          extended.add_edge(nbrs[a], nbrs[b]);
        }
    for (Vertex u : nbrs) adj[u].erase(best);
    adj[best].clear();
    eliminated[best] = true;
    d.ordering.push_back(best);
  }
  std::sort(d.fill_edges.begin(), d.fill_edges.end());

  d.cliques = maximal_cliques(extended, d.ordering);
  d.vertex_to_cliques.assign(n, {});
  for (std::size_t c = 0; c < d.cliques.size(); ++c)
    for (Vertex v : d.cliques[c]) d.vertex_to_cliques[v].push_back(c);
  return d;
}

DependencyGraph extended_graph(const DependencyGraph& g, const CliqueDecomposition& d)
{
  DependencyGraph ext = g;
  for (const auto& [u, v] : d.fill_edges) ext.add_edge(u, v);
  return ext;
}

CliqueDecomposition dense_decomposition(const DependencyGraph& g)
{
  const std::size_t n = g.num_vertices();
  CliqueDecomposition d;
  for (Vertex v = 0; v < n; ++v) d.ordering.push_back(v);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (!g.adjacent(u, v)) d.fill_edges.emplace_back(u, v);
  if (n > 0) d.cliques.push_back(d.ordering);
  d.vertex_to_cliques.assign(n, std::vector<std::size_t>{0});
  return d;
}

std::size_t CliqueDecomposition::max_clique_size() const
{
  std::size_t best = 0;
  for (const auto& c : cliques) best = std::max(best, c.size());
  return best;
}

std::string describe(const CliqueDecomposition& d)
{
  std::ostringstream os;
  os << "ordering";
  for (Vertex v : d.ordering) os << ' ' << v;
  os << "\nfill " << d.fill_edges.size() << '\n';
  for (const auto& [u, v] : d.fill_edges) os << u << ' ' << v << '\n';
  os << "cliques " << d.cliques.size() << '\n';
  for (const auto& c : d.cliques) {
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace cbb
