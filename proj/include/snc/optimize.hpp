#pragma once

#include <cstddef>
#include <optional>

#include "snc/analysis.hpp"

namespace snc {

enum class QueryKind { Forward, Inverse };

// Forward: probability that the quantity exceeds `given` (N or T).
// Inverse: smallest N or T whose bound equals the violation probability `given`.
struct BoundQuery {
  PerformanceBound bound;
  QueryKind kind;
  double given;
};

struct OptimizationResult {
  double value;
  ParamAssignment argmin;
  std::size_t evaluated_points;
  std::size_t feasible_points;
};

struct GridOptions {
  double theta_granularity = 0.01;
  // Largest theta on the grid; derived from the atom domains when empty.
  std::optional<double> theta_max;
  double hoelder_granularity = 0.1;
  double p_max = 32.0;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

// theta_max used when the bound has no finite domain limit.
inline constexpr double kUnboundedThetaMax = 10.0;

// Throws InfeasiblePoint when the bound cannot be evaluated at `a`.
double evaluate_query(const BoundQuery& query, const ParamAssignment& a);

// Upper end of the theta grid when none is given: the smallest atom domain
// limit, using the smallest Hoelder scales the grid can produce, minus one
// granularity step.
double auto_theta_max(const PerformanceBound& bound, const GridOptions& options);

// Exhaustive search over theta in {g, 2g, ..., theta_max} and, for every
// Hoelder parameter of the bound, p in {1 + g_h, 1 + 2 g_h, ..., p_max}.
// Ties resolve to the smallest theta, then the lexicographically smallest
// p vector, independent of the thread count.
OptimizationResult grid_search_minimize(const BoundQuery& query, const GridOptions& options);

}  // namespace snc
