/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cbb/model.hpp"

namespace cbb {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;  // first < second

/// Undirected simple graph with sorted adjacency lists.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  explicit DependencyGraph(std::size_t n) : adjacency_(n) {}
  DependencyGraph(std::size_t n, const std::vector<Edge>& edges);

  std::size_t num_vertices() const noexcept { return adjacency_.size(); }
  std::size_t num_edges() const noexcept;
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  bool adjacent(Vertex u, Vertex v) const;

  /// Adds u-v if absent; returns true if the edge is new.
  bool add_edge(Vertex u, Vertex v);

  std::vector<Edge> edges() const;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
};

/// One vertex per spin and one edge per stored coupling.
DependencyGraph dependency_graph(const SpinModel& model);

struct ChordalityResult {
  bool chordal = false;
  /// Perfect elimination ordering when chordal.
  std::vector<Vertex> ordering;
  /// A chordless cycle of length >= 4 when not chordal, in cycle order.
  std::vector<Vertex> witness;
};

/// Lexicographic BFS followed by a PEO check.
ChordalityResult is_chordal(const DependencyGraph& g);

/// True iff `ordering` is a permutation and a perfect elimination ordering of g.
bool is_perfect_elimination_ordering(const DependencyGraph& g, const std::vector<Vertex>& ordering);

struct CliqueDecomposition {
  std::vector<Vertex> ordering;         ///< elimination order, a PEO of the extended graph
  std::vector<Edge> fill_edges;         ///< sorted
  std::vector<std::vector<Vertex>> cliques;  ///< maximal cliques, vertices ascending
  std::vector<std::vector<std::size_t>> vertex_to_cliques;

  std::size_t max_clique_size() const;
};

/// Maximal cliques of a chordal graph given a PEO: candidates {v} plus the
/// later neighbors of v, with non-maximal candidates dropped.  Cliques are
/// listed in elimination order of their lowest-ordered vertex.  Throws
/// ContractViolation if `ordering` is not a PEO of g.
std::vector<std::vector<Vertex>> maximal_cliques(const DependencyGraph& g,
                                                 const std::vector<Vertex>& ordering);

/// Minimum-degree elimination game (ties to the smallest vertex index).
/// Fill edges are the edges added while connecting the remaining neighbors
/// of each eliminated vertex.
CliqueDecomposition chordal_extension(const DependencyGraph& g);

/// The graph plus the decomposition's fill edges.
DependencyGraph extended_graph(const DependencyGraph& g, const CliqueDecomposition& d);

/// A single clique holding every vertex of g (the dense reference
/// relaxation); fill edges are all non-edges of g.
CliqueDecomposition dense_decomposition(const DependencyGraph& g);

/// Text dump: ordering, fill edges and one clique per line.
std::string describe(const CliqueDecomposition& d);

}  // namespace cbb
