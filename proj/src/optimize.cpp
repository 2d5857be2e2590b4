#include "snc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace snc {

namespace {

constexpr std::size_t kMaxGridPoints = 2'000'000'000;

void validate(const BoundQuery& query) {
  if (!(query.given > 0.0) || !std::isfinite(query.given)) {
    throw Error(ErrorCode::InvalidArgument, "query value must be positive");
  }
  if (query.kind == QueryKind::Inverse && !(query.given < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "violation probability must lie in (0, 1)");
  }
}

// Number of grid steps of size `step` in (0, span]. The epsilon keeps exact
// multiples on the grid despite rounding.
std::size_t steps(double span, double step) {
  if (!(span > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(span / step + 1e-9));
}

EvalOutcome try_query(const BoundQuery& query, const ParamAssignment& a) {
  EvalOutcome out;
  const EvalOutcome rho = query.bound.rho_b.try_evaluate(a);
  if (!rho.ok()) return rho;
  const EvalOutcome sigma = query.bound.sigma_b.try_evaluate(a);
  if (!sigma.ok()) return sigma;

  const double theta = a.theta;
  if (query.kind == QueryKind::Forward) {
    out.value = std::exp(theta * rho.value * query.given + theta * sigma.value);
  } else {
    if (!(rho.value < 0.0)) {
      out.error = ErrorCode::StabilityViolated;
      return out;
    }
    out.value = (sigma.value + std::log(1.0 / query.given) / theta) / -rho.value;
  }
  if (std::isnan(out.value)) out.error = ErrorCode::InfeasiblePoint;
  return out;
}

struct Grid {
  std::size_t theta_steps = 0;
  std::size_t p_steps = 0;
  std::vector<HoelderId> ids;
  double theta_granularity = 0;
  double hoelder_granularity = 0;
  std::size_t total = 0;

  // Index layout: theta most significant, then Hoelder ids in ascending id
  // order, last id fastest.
  void assign(std::size_t index, ParamAssignment& a) const {
    for (std::size_t d = ids.size(); d-- > 0;) {
      const std::size_t j = index % p_steps;
      index /= p_steps;
      a.hoelder_values[ids[d]] = 1.0 + static_cast<double>(j + 1) * hoelder_granularity;
    }
    a.theta = static_cast<double>(index + 1) * theta_granularity;
  }
};

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
  std::size_t feasible = 0;
  bool found = false;
};

Best scan(const BoundQuery& query, const Grid& grid, std::size_t begin, std::size_t end) {
  Best best;
  ParamAssignment a;
  for (HoelderId id : grid.ids) a.hoelder_values[id] = 2.0;
  for (std::size_t i = begin; i < end; ++i) {
    grid.assign(i, a);
    const EvalOutcome r = try_query(query, a);
    if (!r.ok()) continue;
    ++best.feasible;
    if (!best.found || r.value < best.value) {
      best.value = r.value;
      best.index = i;
      best.found = true;
    }
  }
  return best;
}

}  // namespace

double evaluate_query(const BoundQuery& query, const ParamAssignment& a) {
  validate(query);
  const EvalOutcome r = try_query(query, a);
  if (!r.ok()) {
    throw Error(ErrorCode::InfeasiblePoint, "bound is infeasible at theta=" + std::to_string(a.theta) +
                                                " (" + std::string(error_name(*r.error)) + ")");
  }
  return r.value;
}

double auto_theta_max(const PerformanceBound& bound, const GridOptions& options) {
  const double smallest_p = 1.0 + options.hoelder_granularity;
  const double smallest_q = conjugate(options.p_max);
  const auto scale = [&](HoelderId, HoelderRole role) {
    return role == HoelderRole::P ? smallest_p : smallest_q;
  };
  const double limit = std::min(bound.rho_b.max_theta(scale), bound.sigma_b.max_theta(scale));
  if (!std::isfinite(limit)) return kUnboundedThetaMax;
  return limit - options.theta_granularity;
}

OptimizationResult grid_search_minimize(const BoundQuery& query, const GridOptions& options) {
  validate(query);
  if (!(options.theta_granularity > 0.0) || !(options.hoelder_granularity > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "granularities must be positive");
  }
  if (!(options.p_max > 1.0)) throw Error(ErrorCode::InvalidArgument, "p_max must exceed 1");
  if (options.theta_max && !(*options.theta_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta_max must be positive");
  }

  Grid grid;
  grid.theta_granularity = options.theta_granularity;
  grid.hoelder_granularity = options.hoelder_granularity;
  const auto ids = query.bound.hoelder_ids();
  grid.ids.assign(ids.begin(), ids.end());
  const double theta_max = options.theta_max.value_or(auto_theta_max(query.bound, options));
  grid.theta_steps = steps(theta_max, options.theta_granularity);
  grid.p_steps = steps(options.p_max - 1.0, options.hoelder_granularity);

  grid.total = grid.theta_steps;
  for (std::size_t d = 0; d < grid.ids.size(); ++d) {
    if (grid.p_steps != 0 && grid.total > kMaxGridPoints / grid.p_steps) {
      throw Error(ErrorCode::InvalidArgument, "optimization grid is too large; coarsen the granularities");
    }
    grid.total *= grid.p_steps;
  }
  if (grid.total == 0) throw Error(ErrorCode::NoFeasiblePoint, "optimization grid is empty");

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(grid.total, 256))));

  std::vector<Best> partial(threads);
  const std::size_t chunk = (grid.total + threads - 1) / threads;
  if (threads == 1) {
    partial[0] = scan(query, grid, 0, grid.total);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(grid.total, t * chunk);
      const std::size_t end = std::min(grid.total, begin + chunk);
      workers.emplace_back([&, t, begin, end] { partial[t] = scan(query, grid, begin, end); });
    }
    for (auto& w : workers) w.join();
  }

  Best best;
  for (const Best& b : partial) {
    best.feasible += b.feasible;
    if (!b.found) continue;
    if (!best.found || b.value < best.value || (b.value == best.value && b.index < best.index)) {
      best.value = b.value;
      best.index = b.index;
      best.found = true;
    }
  }
  if (!best.found) {
    throw Error(ErrorCode::NoFeasiblePoint, "no feasible point among " + std::to_string(grid.total) +
                                                " grid points");
  }

  OptimizationResult result{best.value, {}, grid.total, best.feasible};
  grid.assign(best.index, result.argmin);
  return result;
}

}  // namespace snc
