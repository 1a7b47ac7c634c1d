#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gridfreq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class NodeKind { Generator, Load };

/// Bus parameters. Inertia is ignored for loads.
struct NodeParams {
  NodeKind kind = NodeKind::Generator;
  double inertia = 0.0;  // M_j
  double damping = 0.0;  // droop / load-frequency coefficient D_j
  double power = 0.0;    // fixed pre-disturbance injection p0_j, + = generation
  double cost = 1.0;     // quadratic cost coefficient a_j
};

/// Oriented lossless line; node indices are 0-based.
struct LineSpec {
  std::size_t from = 0;
  std::size_t to = 0;
  double susceptance = 0.0;
};

/// Immutable power network. Construction validates connectivity, positive
/// susceptances and node parameters, and rejects self loops and parallel lines.
class GridSpec {
 public:
  GridSpec(std::vector<NodeParams> nodes, std::vector<LineSpec> lines);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_lines() const { return lines_.size(); }
  const std::vector<NodeParams>& nodes() const { return nodes_; }
  const std::vector<LineSpec>& lines() const { return lines_; }

  Vec initial_power() const;
  Vec damping() const;
  Vec cost_coefficients() const;
  Vec susceptances() const;
  double min_susceptance() const;

  /// Copy with every susceptance multiplied by `alpha`.
  GridSpec scaled(double alpha) const;

  /// Index of the line joining `a` and `b` in either orientation, or -1.
  long find_line(std::size_t a, std::size_t b) const;

 private:
  std::vector<NodeParams> nodes_;
  std::vector<LineSpec> lines_;
};

/// n x m signed incidence matrix: +1 at `from`, -1 at `to`.
Mat incidence_matrix(const GridSpec& grid);

/// C diag(B) C^T.
Mat weighted_laplacian(const GridSpec& grid);

/// C C^T.
Mat unweighted_laplacian(const GridSpec& grid);

/// Moore-Penrose pseudo-inverse of a connected-graph Laplacian, built from the
/// symmetric eigen-decomposition with the zero eigenpair dropped. Throws
/// NotConnected when more than one eigenvalue is zero.
Mat laplacian_pinv(const Mat& laplacian);

/// Second-smallest eigenvalue of a symmetric matrix.
double second_smallest_eigenvalue(const Mat& laplacian);

/// Fiedler value of C C^T (weighted = false) or C B C^T (weighted = true).
double algebraic_connectivity(const GridSpec& grid, bool weighted);

/// Constants used by the cost-gap bound.
struct SpectralSummary {
  double lambda2_unweighted = 0.0;
  double lambda2_weighted = 0.0;
  double b_min = 0.0;
  double pinv_max_abs = 0.0;  // max |(C B C^T)^+_{ij}|
};

SpectralSummary spectral_summary(const GridSpec& grid);

/// Relative threshold below which an eigenvalue is treated as zero.
inline constexpr double kZeroEigenRelTol = 1e-9;

}  // namespace gridfreq
