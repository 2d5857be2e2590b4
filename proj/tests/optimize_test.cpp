#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "snc/optimize.hpp"

using namespace snc;

namespace {

PerformanceBound single_node_bound(BoundKind kind, double lambda = 0.5, double rate = 4.0) {
  HoelderRegistry reg;
  Arrival a = exponential_arrival(lambda);
  a.dep_flows = {1};
  Service s = constant_rate_service(rate);
  s.dep_services = {1};
  return node_bound(reg, a, s, kind);
}

PerformanceBound two_hoelder_bound() {
  // Three-hop ladder: the bound carries two Hoelder parameters.
  Network net;
  std::vector<VertexId> path;
  for (int i = 0; i < 3; ++i) path.push_back(net.add_vertex("s" + std::to_string(i), shifted_constant_rate_service(8)));
  net.add_flow("foi", path, {2, 2, 2}, exponential_arrival(0.5));
  net.add_flow("cross", path, {1, 1, 1}, exponential_arrival(0.25));
  return ladder_end_to_end(net, 1, 2, path);
}

ErrorCode thrown(auto&& make) {
  try {
    make();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

GridOptions grid(double g, unsigned threads = 1) {
  GridOptions o;
  o.theta_granularity = g;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("query evaluation") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  const PerformanceBound backlog = single_node_bound(BoundKind::Backlog);
  const ParamAssignment at{0.2, {}};
  CHECK(std::fabs(evaluate_query({delay, QueryKind::Forward, 5.0}, at) - 0.07293626986005601) < 1e-9);
  CHECK(std::fabs(evaluate_query({backlog, QueryKind::Forward, 20.0}, at) - 0.07293626986005601) < 1e-9);
  CHECK(std::fabs(evaluate_query({delay, QueryKind::Inverse, 1e-3}, at) - 10.361982555290813) < 1e-9);
  const double sigma = 6.909153826252568;
  CHECK(std::fabs(evaluate_query({backlog, QueryKind::Inverse, 1e-3}, at) - (sigma + std::log(1000.0) / 0.2)) < 1e-9);
  // Zero exponent leaves exp(theta sigma_b), above one.
  const double raw = evaluate_query({backlog, QueryKind::Forward, 1e-300}, at);
  CHECK(std::fabs(raw - std::exp(0.2 * sigma)) < 1e-9);
  CHECK(raw > 1.0);

  CHECK(thrown([&] { evaluate_query({delay, QueryKind::Forward, 5.0}, {0.5, {}}); }) == ErrorCode::InfeasiblePoint);
  CHECK(thrown([&] { evaluate_query({delay, QueryKind::Forward, 5.0}, {0.45, {}}); }) == ErrorCode::InfeasiblePoint);
  CHECK(thrown([&] { evaluate_query({delay, QueryKind::Inverse, 1.5}, at); }) == ErrorCode::InvalidArgument);
  CHECK(thrown([&] { evaluate_query({delay, QueryKind::Forward, -1.0}, at); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("automatic theta range") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  CHECK(std::fabs(auto_theta_max(delay, grid(0.01)) - 0.49) < 1e-12);
  HoelderRegistry reg;
  const PerformanceBound constants = node_bound(reg, constant_rate_arrival(1), constant_rate_service(2), BoundKind::Delay);
  CHECK(auto_theta_max(constants, grid(0.01)) == kUnboundedThetaMax);
}

TEST_CASE("single node minimum") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  const OptimizationResult coarse = grid_search_minimize({delay, QueryKind::Forward, 10.0}, grid(0.01));
  CHECK(coarse.value < 0.03);
  CHECK(coarse.argmin.theta > 0.01);
  CHECK(coarse.argmin.theta < 0.49);
  CHECK(coarse.evaluated_points == 49);
  CHECK(coarse.feasible_points < coarse.evaluated_points);

  // Brute force over the same grid.
  double best = INFINITY;
  for (int k = 1; k <= 49; ++k) {
    const double theta = k * 0.01;
    const double rho = oracle::exp_rho(0.5, theta);
    if (rho >= 4.0) continue;
    best = std::min(best, oracle::forward(-4, oracle::deconv_sigma(0, 0, rho, -4, theta), theta, 10.0));
  }
  CHECK(std::fabs(coarse.value - best) <= 1e-15 * best);

  const OptimizationResult fine = grid_search_minimize({delay, QueryKind::Forward, 10.0}, grid(0.005));
  CHECK(fine.value <= coarse.value);
  CHECK(std::fabs(evaluate_query({delay, QueryKind::Forward, 10.0}, fine.argmin) - fine.value) <= 1e-12 * fine.value);
}

TEST_CASE("grid refinement never increases the minimum") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  double previous = INFINITY;
  double g = 0.04;
  for (int i = 0; i < 5; ++i, g /= 2) {
    GridOptions o = grid(g);
    o.theta_max = 0.48;
    const double v = grid_search_minimize({delay, QueryKind::Forward, 10.0}, o).value;
    CHECK(v <= previous);
    previous = v;
  }

  const PerformanceBound two = two_hoelder_bound();
  GridOptions o = grid(0.02);
  o.hoelder_granularity = 0.4;
  o.p_max = 5.0;
  o.theta_max = 0.2;
  double last = INFINITY;
  for (int i = 0; i < 3; ++i) {
    const double v = grid_search_minimize({two, QueryKind::Inverse, 1e-3}, o).value;
    CHECK(v <= last);
    last = v;
    o.theta_granularity /= 2;
    o.hoelder_granularity /= 2;
  }
}

TEST_CASE("inverse and forward queries are dual") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  const PerformanceBound backlog = single_node_bound(BoundKind::Backlog);
  const PerformanceBound two = two_hoelder_bound();
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    for (const PerformanceBound* b : {&delay, &backlog}) {
      const OptimizationResult r = grid_search_minimize({*b, QueryKind::Inverse, eps}, grid(0.01));
      CHECK(std::fabs(evaluate_query({*b, QueryKind::Forward, r.value}, r.argmin) - eps) <= 1e-9);
    }
    GridOptions o = grid(0.01);
    o.hoelder_granularity = 0.25;
    o.p_max = 6.0;
    const OptimizationResult r = grid_search_minimize({two, QueryKind::Inverse, eps}, o);
    CHECK(r.argmin.hoelder_values.size() == 2);
    CHECK(std::fabs(evaluate_query({two, QueryKind::Forward, r.value}, r.argmin) - eps) <= 1e-9);
  }
}

TEST_CASE("parallel search matches the sequential one") {
  const PerformanceBound two = two_hoelder_bound();
  GridOptions o = grid(0.005);
  o.hoelder_granularity = 0.2;
  o.p_max = 8.0;
  const OptimizationResult one = grid_search_minimize({two, QueryKind::Inverse, 1e-4}, o);
  for (unsigned threads : {2u, 3u, 8u, 0u}) {
    o.threads = threads;
    const OptimizationResult many = grid_search_minimize({two, QueryKind::Inverse, 1e-4}, o);
    CHECK(many.value == one.value);
    CHECK(many.argmin.theta == one.argmin.theta);
    CHECK(many.argmin.hoelder_values == one.argmin.hoelder_values);
    CHECK(many.feasible_points == one.feasible_points);
    CHECK(many.evaluated_points == one.evaluated_points);
  }
}

TEST_CASE("ties resolve to the smallest theta") {
  // The bound evaluates to 1 at every theta.
  PerformanceBound flat{BoundKind::Backlog, SymbolicFunction::constant(-1), SymbolicFunction::constant(0), {}, {}};
  GridOptions o = grid(0.1, 4);
  o.theta_max = 1.0;
  const OptimizationResult r = grid_search_minimize({flat, QueryKind::Forward, 1e-300}, o);
  CHECK(r.argmin.theta == doctest::Approx(0.1));
}

TEST_CASE("infeasible searches") {
  HoelderRegistry reg;
  const PerformanceBound unstable =
      node_bound(reg, constant_rate_arrival(4), constant_rate_service(4), BoundKind::Delay);
  CHECK(thrown([&] { grid_search_minimize({unstable, QueryKind::Forward, 5.0}, grid(0.01)); }) ==
        ErrorCode::NoFeasiblePoint);
  const PerformanceBound overloaded = single_node_bound(BoundKind::Delay, 0.25, 4.0);
  CHECK(thrown([&] { grid_search_minimize({overloaded, QueryKind::Inverse, 0.01}, grid(0.01)); }) ==
        ErrorCode::NoFeasiblePoint);

  Service s1 = constant_rate_service(4);
  s1.dep_services = {1};
  Service s2 = constant_rate_service(4);
  s2.dep_services = {2};
  const Service merged = convolve(reg, s1, s2);
  const PerformanceBound degenerate = node_bound(reg, exponential_arrival(0.5), merged, BoundKind::Delay);
  CHECK(thrown([&] { grid_search_minimize({degenerate, QueryKind::Forward, 5.0}, grid(0.01)); }) ==
        ErrorCode::NoFeasiblePoint);

  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  GridOptions bad = grid(0.0);
  CHECK(thrown([&] { grid_search_minimize({delay, QueryKind::Forward, 5.0}, bad); }) == ErrorCode::InvalidArgument);
  GridOptions tiny = grid(0.1);
  tiny.theta_max = 0.05;
  CHECK(thrown([&] { grid_search_minimize({delay, QueryKind::Forward, 5.0}, tiny); }) == ErrorCode::NoFeasiblePoint);
  GridOptions pmax = grid(0.1);
  pmax.p_max = 1.0;
  CHECK(thrown([&] { grid_search_minimize({delay, QueryKind::Forward, 5.0}, pmax); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("one-dimensional grid size") {
  const PerformanceBound delay = single_node_bound(BoundKind::Delay);
  GridOptions o = grid(0.05);
  o.theta_max = 0.45;
  const OptimizationResult r = grid_search_minimize({delay, QueryKind::Forward, 5.0}, o);
  CHECK(r.evaluated_points == 9);
  std::size_t feasible = 0;
  for (int k = 1; k <= 9; ++k) feasible += oracle::exp_rho(0.5, k * 0.05) < 4.0;
  CHECK(r.feasible_points == feasible);
  CHECK(r.argmin.hoelder_values.empty());
}
