#include "gridfreq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

void fail(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

bool is_connected(std::size_t n, const std::vector<LineSpec>& lines) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t groups = n;
  for (const auto& l : lines) {
    auto a = find(l.from), b = find(l.to);
    if (a != b) {
      parent[a] = b;
      --groups;
    }
  }
  return groups == 1;
}

Eigen::SelfAdjointEigenSolver<Mat> eigen_of(const Mat& laplacian) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFinite, "eigen-decomposition failed");
  }
  return solver;
}

}  // namespace

GridSpec::GridSpec(std::vector<NodeParams> nodes, std::vector<LineSpec> lines)
    : nodes_(std::move(nodes)), lines_(std::move(lines)) {
  const std::size_t n = nodes_.size();
  if (n < 2) fail("grid needs at least 2 nodes");
  if (lines_.size() + 1 < n) fail("grid needs at least n-1 lines");

  for (std::size_t j = 0; j < n; ++j) {
    const auto& node = nodes_[j];
    const std::string id = "node " + std::to_string(j + 1);
    if (node.kind == NodeKind::Generator && !(node.inertia > 0.0)) {
      fail(id + ": generator inertia must be > 0");
    }
    if (!(node.damping > 0.0)) fail(id + ": damping must be > 0");
    if (!(node.cost > 0.0)) fail(id + ": cost coefficient must be > 0");
    if (!std::isfinite(node.power)) fail(id + ": power must be finite");
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    const auto& line = lines_[l];
    const std::string id = "line " + std::to_string(l + 1);
    if (line.from >= n || line.to >= n) fail(id + ": node index out of range");
    if (line.from == line.to) fail(id + ": self loop");
    if (!(line.susceptance > 0.0) || !std::isfinite(line.susceptance)) {
      fail(id + ": susceptance must be > 0");
    }
    auto key = std::minmax(line.from, line.to);
    if (!seen.insert({key.first, key.second}).second) {
      fail(id + ": parallel line between the same node pair");
    }
  }

  if (!is_connected(n, lines_)) {
    throw Error(ErrorKind::NotConnected, "grid is not connected");
  }
}

Vec GridSpec::initial_power() const {
  Vec p(num_nodes());
  for (std::size_t j = 0; j < num_nodes(); ++j) p[j] = nodes_[j].power;
  return p;
}

Vec GridSpec::damping() const {
  Vec d(num_nodes());
  for (std::size_t j = 0; j < num_nodes(); ++j) d[j] = nodes_[j].damping;
  return d;
}

Vec GridSpec::cost_coefficients() const {
  Vec a(num_nodes());
  for (std::size_t j = 0; j < num_nodes(); ++j) a[j] = nodes_[j].cost;
  return a;
}

Vec GridSpec::susceptances() const {
  Vec b(num_lines());
  for (std::size_t l = 0; l < num_lines(); ++l) b[l] = lines_[l].susceptance;
  return b;
}

double GridSpec::min_susceptance() const { return susceptances().minCoeff(); }

GridSpec GridSpec::scaled(double alpha) const {
  auto lines = lines_;
  for (auto& l : lines) l.susceptance *= alpha;
  return GridSpec(nodes_, std::move(lines));
}

long GridSpec::find_line(std::size_t a, std::size_t b) const {
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    const auto& line = lines_[l];
    if ((line.from == a && line.to == b) || (line.from == b && line.to == a)) {
      return static_cast<long>(l);
    }
  }
  return -1;
}

Mat incidence_matrix(const GridSpec& grid) {
  Mat c = Mat::Zero(grid.num_nodes(), grid.num_lines());
  for (std::size_t l = 0; l < grid.num_lines(); ++l) {
    c(grid.lines()[l].from, l) = 1.0;
    c(grid.lines()[l].to, l) = -1.0;
  }
  return c;
}

Mat weighted_laplacian(const GridSpec& grid) {
  const Mat c = incidence_matrix(grid);
  return c * grid.susceptances().asDiagonal() * c.transpose();
}

Mat unweighted_laplacian(const GridSpec& grid) {
  const Mat c = incidence_matrix(grid);
  return c * c.transpose();
}

Mat laplacian_pinv(const Mat& laplacian) {
  const auto n = laplacian.rows();
  const auto solver = eigen_of(laplacian);
  const Vec& lambda = solver.eigenvalues();  // ascending
  const double scale = lambda.cwiseAbs().maxCoeff();
  const double zero_tol = kZeroEigenRelTol * scale;
  if (n < 2 || !(scale > 0.0) || std::abs(lambda[1]) < zero_tol) {
    throw Error(ErrorKind::NotConnected,
                "Laplacian has more than one zero eigenvalue");
  }
  Mat pinv = Mat::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto v = solver.eigenvectors().col(i);
    pinv.noalias() += (1.0 / lambda[i]) * v * v.transpose();
  }
  return pinv;
}

double second_smallest_eigenvalue(const Mat& laplacian) {
  return eigen_of(laplacian).eigenvalues()[1];
}

double algebraic_connectivity(const GridSpec& grid, bool weighted) {
  const Mat l = weighted ? weighted_laplacian(grid) : unweighted_laplacian(grid);
  return std::max(0.0, second_smallest_eigenvalue(l));
}

SpectralSummary spectral_summary(const GridSpec& grid) {
  SpectralSummary s;
  s.lambda2_unweighted = algebraic_connectivity(grid, false);
  s.lambda2_weighted = algebraic_connectivity(grid, true);
  s.b_min = grid.min_susceptance();
  s.pinv_max_abs = laplacian_pinv(weighted_laplacian(grid)).cwiseAbs().maxCoeff();
  return s;
}

}  // namespace gridfreq
