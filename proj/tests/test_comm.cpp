#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gridfreq/comm.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/scenario.hpp"
#include "support/error_kind.hpp"
#include "support/random_grid.hpp"

using namespace gridfreq;
using gridfreq::testing::kind_of;

namespace {

using Groups = std::vector<std::vector<std::size_t>>;

NodeParams gen() { return {NodeKind::Generator, 0.1, 1.0, 0.0, 1.0}; }

GridSpec grid_of(std::size_t n, std::vector<LineSpec> lines) {
  return GridSpec(std::vector<NodeParams>(n, gen()), std::move(lines));
}

}  // namespace

TEST_CASE("comm graph validation") {
  CHECK(kind_of([] { CommGraph(3, {{0, 3}}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { CommGraph(3, {{1, 1}}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { CommGraph(3, {{0, 1}, {1, 0}}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { CommGraph(3, {{0, 1}}, {{1, 2}}); }) == ErrorKind::Validation);

  const CommGraph g(3, {{0, 1}, {1, 2}}, {{2, 1}});
  CHECK(g.is_failed(1));
  CHECK(!g.is_failed(0));
  CHECK(g.failed() == std::vector<CommLink>{{1, 2}});
  CHECK(g.surviving() == std::vector<CommLink>{{0, 1}});
  CHECK(g.surviving_neighbors() == Groups{{1}, {0}, {}});
}

TEST_CASE("components of the surviving graph") {
  CHECK(components(CommGraph(5, {{3, 4}, {1, 0}})) == Groups{{0, 1}, {2}, {3, 4}});
  CHECK(components(CommGraph(3, {{0, 1}, {1, 2}})) == Groups{{0, 1, 2}});
  CHECK(components(CommGraph(3, {{0, 2}, {1, 2}}, {{0, 2}})) == Groups{{0}, {1, 2}});
  CHECK(components(CommGraph(2, {})) == Groups{{0}, {1}});
}

TEST_CASE("bridging sets") {
  SUBCASE("connected communication needs no bridge") {
    const GridSpec grid = grid_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto b = bridging_sets(CommGraph::mirror(grid), grid);
    CHECK(b.components.size() == 1);
    CHECK(b.e_star_lines.empty());
    CHECK(b.v_star.empty());
  }

  SUBCASE("single split is bridged by the failed link's line") {
    const GridSpec grid = grid_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto b = bridging_sets(CommGraph::mirror(grid).with_failures({{1, 2}}), grid);
    CHECK(b.e_star_lines == std::vector<std::size_t>{1});
    CHECK(b.v_star == std::vector<std::size_t>{1, 2});
    CHECK(b.in_v_star(2));
    CHECK(!b.in_v_star(0));
    CHECK(b.component_of == std::vector<std::size_t>{0, 0, 1});
  }

  SUBCASE("three islands need two bridges and four endpoints") {
    // Islands {0,1}, {2,3}, {4,5} joined by three lines; the weakest is dropped.
    const GridSpec grid = grid_of(6, {{0, 1, 1.0}, {2, 3, 1.0}, {4, 5, 1.0},
                                      {1, 2, 0.5}, {3, 4, 1.0}, {0, 5, 0.2}});
    const auto comm = CommGraph::mirror(grid).with_failures({{1, 2}, {3, 4}, {0, 5}});
    const auto b = bridging_sets(comm, grid);
    CHECK(b.components.size() == 3);
    CHECK(b.e_star_lines == std::vector<std::size_t>{3, 4});
    CHECK(b.v_star == std::vector<std::size_t>{1, 2, 3, 4});
  }

  SUBCASE("equal susceptance prefers the lower line index") {
    const GridSpec grid = grid_of(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
    const auto comm = CommGraph::mirror(grid).with_failures({{3, 0}, {1, 2}});
    CHECK(bridging_sets(comm, grid).e_star_lines == std::vector<std::size_t>{1});
  }

  SUBCASE("no parallel candidate is unjoinable") {
    const GridSpec grid = grid_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    CHECK(kind_of([&] { bridging_sets(CommGraph(3, {{0, 1}}), grid); }) ==
          ErrorKind::Unjoinable);
    // A comm-only link (0,2) joins the components without a parallel line.
    CHECK(bridging_sets(CommGraph(3, {{0, 1}, {0, 2}}), grid).e_star_lines.empty());
  }
}

TEST_CASE("link ranking on a path") {
  const GridSpec grid = grid_of(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  const Vec p0 = Vec::Zero(4);
  const Vec p = Vec::Constant(4, -0.25);
  const Vec u = Vec::Unit(4, 0);

  const auto scores = rank_links(grid, p0, p, u);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].line == 0);
  CHECK(scores[1].line == 1);
  CHECK(scores[2].line == 2);
  CHECK(scores[0].score == doctest::Approx(0.75));
  CHECK(scores[1].score == doctest::Approx(0.5));
  CHECK(scores[2].score == doctest::Approx(0.25));
  CHECK(scores[0].flow_change == doctest::Approx(0.75));

  const auto zero = rank_links(grid, p0, p0, p0);
  for (const auto& s : zero) CHECK(s.score == doctest::Approx(0.0));
  CHECK(zero[0].line == 0);

  CHECK(kind_of([&] { rank_links(grid, p0, p, Vec::Zero(4)); }) == ErrorKind::Unbalanced);
}

TEST_CASE("link scores match B C^T L+ x on random grids") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    const GridSpec grid = testing::random_grid(rng);
    const Vec p0 = grid.initial_power();
    Vec p = p0;
    p[0] -= 1.5;
    const Vec u = optimal_quadratic(grid.cost_coefficients(), -1.5).u;
    const Vec x = p + u - p0;
    const Vec y = grid.susceptances().asDiagonal() * incidence_matrix(grid).transpose() *
                  testing::pinv_by_rank_one_shift(weighted_laplacian(grid)) * x;
    const double h = 0.3;
    const auto scores = rank_links(grid, p0, p, u, h);
    REQUIRE(scores.size() == grid.num_lines());
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const auto l = static_cast<Eigen::Index>(scores[k].line);
      CHECK(scores[k].flow_change == doctest::Approx(y[l]).epsilon(1e-9).scale(1.0));
      CHECK(scores[k].score ==
            doctest::Approx(h * std::abs(y[l]) / grid.susceptances()[l]).epsilon(1e-9));
      if (k > 0) CHECK(scores[k - 1].score >= scores[k].score);
    }
    // Scores are linear in the disturbance.
    const auto doubled = rank_links(grid, p0, p0 + 2.0 * (p - p0), 2.0 * u, h);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      CHECK(doubled[k].score == doctest::Approx(2.0 * scores[k].score).epsilon(1e-9));
    }
  }
}

TEST_CASE("ten-node fixture ranks the weakest line first") {
  const auto s = load_scenario(GRIDFREQ_DATA_DIR "/paper10.scenario");
  const Vec p0 = s.grid.initial_power();
  const Vec p = injections_at(s.grid, s.perturbations, 1e9);
  const Vec u = optimal_quadratic(s.grid.cost_coefficients(), -5.0).u;
  const auto scores = rank_links(s.grid, p0, p, u);
  REQUIRE(!scores.empty());
  CHECK(s.grid.lines()[scores.front().line].susceptance == s.grid.min_susceptance());
  CHECK(scores.front().score > 2.0 * scores[1].score);

  double weak = 0.0, strong = 0.0;
  int n_weak = 0, n_strong = 0;
  for (const auto& sc : scores) {
    const double b = s.grid.lines()[sc.line].susceptance;
    if (b <= 0.2) weak += sc.score, ++n_weak;
    if (b >= 0.5) strong += sc.score, ++n_strong;
  }
  CHECK(weak / n_weak > strong / n_strong);
}
