#pragma once

#include <cstddef>
#include <vector>

#include "gridfreq/grid.hpp"

namespace gridfreq {

/// Undirected communication link between two 0-based nodes.
struct CommLink {
  std::size_t a = 0;
  std::size_t b = 0;

  bool joins(std::size_t x, std::size_t y) const {
    return (a == x && b == y) || (a == y && b == x);
  }
  friend bool operator==(const CommLink&, const CommLink&) = default;
};

/// Communication topology plus the subset of links that have failed.
class CommGraph {
 public:
  CommGraph(std::size_t num_nodes, std::vector<CommLink> links,
            const std::vector<CommLink>& failed = {});

  /// One link per power line, none failed.
  static CommGraph mirror(const GridSpec& grid);

  /// Copy with `failed` marked as failed (in addition to existing failures).
  CommGraph with_failures(const std::vector<CommLink>& failed) const;

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<CommLink>& links() const { return links_; }
  bool is_failed(std::size_t link) const { return failed_[link]; }
  std::vector<CommLink> failed() const;
  std::vector<CommLink> surviving() const;

  /// Per-node neighbour lists over surviving links.
  std::vector<std::vector<std::size_t>> surviving_neighbors() const;

 private:
  std::size_t num_nodes_;
  std::vector<CommLink> links_;
  std::vector<bool> failed_;
};

/// Connected components of the surviving graph, each sorted ascending and the
/// list ordered by smallest member. Isolated nodes form singletons.
std::vector<std::vector<std::size_t>> components(const CommGraph& comm);

struct BridgeSets {
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of;  // node -> index into components
  std::vector<std::size_t> e_star_lines;  // power-line indices, ascending
  std::vector<std::size_t> v_star;        // ascending node indices

  bool in_v_star(std::size_t node) const;
};

/// Minimum set E* of communication links parallel to power lines that joins all
/// components, and its endpoint set V*. Candidates are links of `comm` (failed
/// or not) that coincide with a power line; among candidates joining the same
/// pair of components the larger susceptance wins, then the lower line index.
/// Throws Unjoinable when the candidates cannot reconnect the components.
BridgeSets bridging_sets(const CommGraph& comm, const GridSpec& grid);

struct LinkScore {
  std::size_t line = 0;   // 0-based power line index
  double flow_change = 0;  // y_l = [B C^T (theta - theta0)]_l
  double score = 0;        // h |y_l| / B_l
};

/// Predicted marginal-cost gap across each power line if the parallel
/// communication link fails, sorted by descending score (ties by line index).
/// Throws Unbalanced unless sum(p + u_expected) = 0.
std::vector<LinkScore> rank_links(const GridSpec& grid, const Vec& p0,
                                  const Vec& p, const Vec& u_expected,
                                  double h = 1.0);

}  // namespace gridfreq
