#include "gridfreq/comm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> parent;
};

/// Pseudo-inverse via SVD, dropping singular values below a relative cutoff.
Mat svd_pinv(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cutoff = kZeroEigenRelTol * (s.size() ? s[0] : 0.0);
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

CommGraph::CommGraph(std::size_t num_nodes, std::vector<CommLink> links,
                     const std::vector<CommLink>& failed)
    : num_nodes_(num_nodes), links_(std::move(links)), failed_(links_.size(), false) {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (l.a >= num_nodes_ || l.b >= num_nodes_) {
      throw Error(ErrorKind::Validation,
                  "comm link " + std::to_string(i + 1) + ": node index out of range");
    }
    if (l.a == l.b) {
      throw Error(ErrorKind::Validation,
                  "comm link " + std::to_string(i + 1) + ": self loop");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (links_[k].joins(l.a, l.b)) {
        throw Error(ErrorKind::Validation,
                    "comm link " + std::to_string(i + 1) + ": duplicate link");
      }
    }
  }
  for (const auto& f : failed) {
    auto it = std::find_if(links_.begin(), links_.end(),
                           [&](const CommLink& l) { return l.joins(f.a, f.b); });
    if (it == links_.end()) {
      throw Error(ErrorKind::Validation,
                  "failed link (" + std::to_string(f.a + 1) + "," +
                      std::to_string(f.b + 1) + ") is not a communication link");
    }
    failed_[static_cast<std::size_t>(it - links_.begin())] = true;
  }
}

CommGraph CommGraph::mirror(const GridSpec& grid) {
  std::vector<CommLink> links;
  links.reserve(grid.num_lines());
  for (const auto& l : grid.lines()) links.push_back({l.from, l.to});
  return CommGraph(grid.num_nodes(), std::move(links));
}

CommGraph CommGraph::with_failures(const std::vector<CommLink>& failed) const {
  auto all = this->failed();
  all.insert(all.end(), failed.begin(), failed.end());
  return CommGraph(num_nodes_, links_, all);
}

std::vector<CommLink> CommGraph::failed() const {
  std::vector<CommLink> out;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (failed_[i]) out.push_back(links_[i]);
  }
  return out;
}

std::vector<CommLink> CommGraph::surviving() const {
  std::vector<CommLink> out;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!failed_[i]) out.push_back(links_[i]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> CommGraph::surviving_neighbors() const {
  std::vector<std::vector<std::size_t>> nbrs(num_nodes_);
  for (const auto& l : surviving()) {
    nbrs[l.a].push_back(l.b);
    nbrs[l.b].push_back(l.a);
  }
  for (auto& v : nbrs) std::sort(v.begin(), v.end());
  return nbrs;
}

std::vector<std::vector<std::size_t>> components(const CommGraph& comm) {
  DisjointSets sets(comm.num_nodes());
  for (const auto& l : comm.surviving()) sets.unite(l.a, l.b);
  // Roots are the smallest member, so iterating nodes in order yields
  // components ordered by smallest member.
  std::vector<std::vector<std::size_t>> out;
  std::vector<long> slot(comm.num_nodes(), -1);
  for (std::size_t j = 0; j < comm.num_nodes(); ++j) {
    const auto root = sets.find(j);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[root])].push_back(j);
  }
  return out;
}

bool BridgeSets::in_v_star(std::size_t node) const {
  return std::binary_search(v_star.begin(), v_star.end(), node);
}

BridgeSets bridging_sets(const CommGraph& comm, const GridSpec& grid) {
  if (comm.num_nodes() != grid.num_nodes()) {
    throw Error(ErrorKind::Validation, "comm graph and grid differ in node count");
  }
  BridgeSets out;
  out.components = components(comm);
  out.component_of.assign(grid.num_nodes(), 0);
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    for (auto j : out.components[c]) out.component_of[j] = c;
  }
  if (out.components.size() == 1) return out;

  std::vector<std::size_t> candidates;
  for (const auto& link : comm.links()) {
    const long line = grid.find_line(link.a, link.b);
    if (line < 0) continue;
    if (out.component_of[link.a] == out.component_of[link.b]) continue;
    candidates.push_back(static_cast<std::size_t>(line));
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
    const double bx = grid.lines()[x].susceptance;
    const double by = grid.lines()[y].susceptance;
    return bx != by ? bx > by : x < y;
  });

  DisjointSets quotient(out.components.size());
  std::size_t merges = 0;
  for (auto line : candidates) {
    const auto& l = grid.lines()[line];
    if (quotient.unite(out.component_of[l.from], out.component_of[l.to])) {
      out.e_star_lines.push_back(line);
      out.v_star.push_back(l.from);
      out.v_star.push_back(l.to);
      ++merges;
    }
  }
  if (merges + 1 != out.components.size()) {
    throw Error(ErrorKind::Unjoinable,
                "communication components cannot be joined through power-line-parallel links");
  }
  std::sort(out.e_star_lines.begin(), out.e_star_lines.end());
  std::sort(out.v_star.begin(), out.v_star.end());
  out.v_star.erase(std::unique(out.v_star.begin(), out.v_star.end()), out.v_star.end());
  return out;
}

std::vector<LinkScore> rank_links(const GridSpec& grid, const Vec& p0, const Vec& p,
                                  const Vec& u_expected, double h) {
  const Vec injection = p + u_expected - p0;
  const double scale = std::max({1.0, p.cwiseAbs().maxCoeff(), p0.cwiseAbs().maxCoeff()});
  if (std::abs((p + u_expected).sum()) > 1e-9 * scale ||
      std::abs(p0.sum()) > 1e-9 * scale) {
    throw Error(ErrorKind::Unbalanced, "rank_links: injections are not balanced");
  }
  const Vec sqrt_b = grid.susceptances().cwiseSqrt();
  const Mat cd = incidence_matrix(grid) * sqrt_b.asDiagonal();
  const Vec y = sqrt_b.asDiagonal() * (svd_pinv(cd) * injection);

  std::vector<LinkScore> scores;
  scores.reserve(grid.num_lines());
  for (std::size_t l = 0; l < grid.num_lines(); ++l) {
    const double b = grid.lines()[l].susceptance;
    scores.push_back({l, y[static_cast<Eigen::Index>(l)],
                      h * std::abs(y[static_cast<Eigen::Index>(l)]) / b});
  }
  std::stable_sort(scores.begin(), scores.end(), [](const LinkScore& x, const LinkScore& y) {
    return x.score > y.score;
  });
  return scores;
}

}  // namespace gridfreq
