#include "snc/analysis.hpp"

#include <algorithm>
#include <map>

namespace snc {

namespace {

template <class X>
void add_dependencies(PerformanceBound& bound, const X& from) {
  bound.dep_flows.insert(from.dep_flows.begin(), from.dep_flows.end());
  bound.dep_services.insert(from.dep_services.begin(), from.dep_services.end());
}

// Position of `flow` in the strict-priority order of all flows at `v`.
std::size_t rank_at(const Network& net, VertexId v, FlowId flow) {
  const Vertex& vertex = net.vertex(v);
  const Incoming& own = vertex.incoming.at(flow);
  std::size_t rank = 0;
  for (const auto& [other, entry] : vertex.incoming) {
    if (entry.priority < own.priority || (entry.priority == own.priority && other < flow)) ++rank;
  }
  return rank;
}

// Flows at `v` ranked above `flow`.
std::vector<FlowId> ranked_above(const Network& net, VertexId v, FlowId flow) {
  std::vector<FlowId> out;
  const Vertex& vertex = net.vertex(v);
  const Incoming& own = vertex.incoming.at(flow);
  for (const auto& [other, entry] : vertex.incoming) {
    if (entry.priority < own.priority || (entry.priority == own.priority && other < flow)) {
      out.push_back(other);
    }
  }
  return out;
}

// Collects how many flows must be served at each vertex before an analysis
// can read the bounds it needs. Serving at a vertex always follows priority
// order, so a count per vertex describes the demand completely.
class Demand {
 public:
  explicit Demand(const Network& net) : net_(net) {}

  void need_arrival(FlowId flow, std::size_t hop) {
    const Flow& f = net_.flow(flow);
    for (std::size_t j = 0; j < hop; ++j) need_served(flow, f.path[j]);
  }

  void need_served(FlowId flow, VertexId v) {
    if (!visited_.insert({flow, v}).second) return;
    for (FlowId other : ranked_above(net_, v, flow)) need_served(other, v);
    need_arrival(flow, *net_.flow(flow).hop_of(v));
    auto& count = counts_[v];
    count = std::max(count, rank_at(net_, v, flow) + 1);
  }

  void need_prefix_before(FlowId flow, VertexId v) {
    for (FlowId other : ranked_above(net_, v, flow)) need_served(other, v);
  }

  std::size_t count(VertexId v) const {
    const auto it = counts_.find(v);
    return it == counts_.end() ? 0 : it->second;
  }

  const std::map<VertexId, std::size_t>& counts() const { return counts_; }

 private:
  const Network& net_;
  std::set<std::pair<FlowId, VertexId>> visited_;
  std::map<VertexId, std::size_t> counts_;
};

// Applies compute_leftover() lowest-vertex-id first until every vertex has
// served the demanded number of flows.
void reduce(Network& net, const Demand& demand) {
  for (;;) {
    bool pending = false;
    bool progressed = false;
    for (const auto& [v, wanted] : demand.counts()) {
      if (net.vertex(v).served.size() >= wanted) continue;
      pending = true;
      const auto next = net.next_to_serve(v);
      if (next && net.vertex(v).incoming.at(*next).arrival) {
        net.compute_leftover(v);
        progressed = true;
        break;
      }
    }
    if (!pending) return;
    if (!progressed) {
      throw Error(ErrorCode::NotFeedforward, "network reduction stalled; is the network feedforward?");
    }
  }
}

// The service at `v` must still be the one seen by `flow`.
void require_unserved(const Network& net, const Demand& demand, VertexId v, FlowId flow) {
  if (demand.count(v) > rank_at(net, v, flow)) {
    throw Error(ErrorCode::NotFeedforward, "flow '" + net.flow(flow).name + "' would have to be served at '" +
                                               net.vertex(v).name + "' before its own analysis there");
  }
}

// Validates that `path` is a contiguous section of the flow's route; returns
// the hop index of its first vertex.
std::size_t locate_path(const Network& net, FlowId flow, const std::vector<VertexId>& path) {
  if (path.empty()) throw Error(ErrorCode::PathMismatch, "empty path");
  const Flow& f = net.flow(flow);
  for (VertexId v : path) net.vertex(v);
  const auto first = f.hop_of(path.front());
  if (!first || *first + path.size() > f.path.size() ||
      !std::equal(path.begin(), path.end(), f.path.begin() + static_cast<std::ptrdiff_t>(*first))) {
    throw Error(ErrorCode::PathMismatch, "flow '" + f.name + "' does not follow the requested path");
  }
  return *first;
}

// Reduces the network so the flow's bound at the start of `path` is known and
// every vertex on it holds the service left for this flow.
std::pair<Arrival, std::vector<Service>> reduce_for_path(Network& net, FlowId flow,
                                                         const std::vector<VertexId>& path) {
  const std::size_t first = locate_path(net, flow, path);
  Demand demand(net);
  demand.need_arrival(flow, first);
  for (VertexId v : path) demand.need_prefix_before(flow, v);
  for (VertexId v : path) require_unserved(net, demand, v, flow);
  reduce(net, demand);

  std::vector<Service> services;
  services.reserve(path.size());
  for (VertexId v : path) services.push_back(net.vertex(v).service);
  return {*net.flow(flow).arrivals[first], std::move(services)};
}

}  // namespace

std::string_view to_string(BoundKind kind) { return kind == BoundKind::Backlog ? "backlog" : "delay"; }

std::set<HoelderId> PerformanceBound::hoelder_ids() const {
  std::set<HoelderId> ids = rho_b.parameter_ids();
  const auto more = sigma_b.parameter_ids();
  ids.insert(more.begin(), more.end());
  return ids;
}

PerformanceBound node_bound(HoelderRegistry& registry, const Arrival& a, const Service& s,
                            BoundKind kind) {
  const auto [arr, srv] = hoelder_operands(registry, a, s);
  SymbolicFunction sigma_b = deconvolution_sigma(arr.sigma, srv.sigma, arr.rho, srv.rho);
  SymbolicFunction rho_b = kind == BoundKind::Backlog ? SymbolicFunction::constant(-1.0) : srv.rho;
  PerformanceBound bound{kind, std::move(rho_b), std::move(sigma_b), {}, {}};
  add_dependencies(bound, a);
  add_dependencies(bound, s);
  return bound;
}

PerformanceBound end_to_end_delay(HoelderRegistry& registry, const Arrival& a,
                                  const std::vector<Service>& services) {
  if (services.empty()) throw Error(ErrorCode::InvalidArgument, "end-to-end analysis needs a service");

  bool independent = true;
  for (std::size_t i = 0; i < services.size() && independent; ++i) {
    if (are_dependent(a, services[i])) independent = false;
    for (std::size_t j = i + 1; j < services.size() && independent; ++j) {
      if (are_dependent(services[i], services[j])) independent = false;
    }
  }

  if (!independent) {
    Service merged = services.front();
    for (std::size_t i = 1; i < services.size(); ++i) merged = convolve(registry, merged, services[i]);
    return node_bound(registry, a, merged, BoundKind::Delay);
  }

  // sigma_A + sum_i [sigma_i - (1/theta) ln(1 - e^{theta (rho_i + rho_A)})]
  SymbolicFunction sigma_b = a.sigma;
  const SymbolicFunction zero = SymbolicFunction::constant(0.0);
  for (const Service& s : services) {
    sigma_b = sum(sigma_b, deconvolution_sigma(zero, s.sigma, a.rho, s.rho));
  }
  PerformanceBound bound{BoundKind::Delay, negate(a.rho), std::move(sigma_b), {}, {}};
  add_dependencies(bound, a);
  for (const Service& s : services) add_dependencies(bound, s);
  return bound;
}

PerformanceBound simple_analysis(Network& net, const AnalysisRequest& request) {
  const Flow& flow = net.flow(request.flow);
  net.vertex(request.vertex);
  const auto hop = flow.hop_of(request.vertex);
  if (!hop) {
    throw Error(ErrorCode::FlowNotAtVertex, "flow '" + flow.name + "' does not traverse vertex '" +
                                                net.vertex(request.vertex).name + "'");
  }
  Demand demand(net);
  demand.need_arrival(request.flow, *hop);
  demand.need_prefix_before(request.flow, request.vertex);
  require_unserved(net, demand, request.vertex, request.flow);
  reduce(net, demand);

  const Arrival arrival = *net.flow(request.flow).arrivals[*hop];
  const Service service = net.vertex(request.vertex).service;
  return node_bound(net.hoelders(), arrival, service, request.kind);
}

PerformanceBound path_analysis(Network& net, FlowId flow, const std::vector<VertexId>& path) {
  auto [arrival, services] = reduce_for_path(net, flow, path);
  return end_to_end_delay(net.hoelders(), arrival, services);
}

PerformanceBound ladder_end_to_end(Network& net, FlowId foi, FlowId crossflow,
                                   const std::vector<VertexId>& path) {
  if (foi == crossflow) throw Error(ErrorCode::PathMismatch, "crossflow equals the flow of interest");
  locate_path(net, crossflow, path);
  locate_path(net, foi, path);
  for (VertexId v : path) {
    if (rank_at(net, v, crossflow) > rank_at(net, v, foi)) {
      throw Error(ErrorCode::PathMismatch, "crossflow '" + net.flow(crossflow).name +
                                               "' is not prioritized at '" + net.vertex(v).name + "'");
    }
  }
  auto [arrival, services] = reduce_for_path(net, foi, path);
  Service merged = services.front();
  for (std::size_t i = 1; i < services.size(); ++i) merged = convolve(net.hoelders(), merged, services[i]);
  return node_bound(net.hoelders(), arrival, merged, BoundKind::Delay);
}

}  // namespace snc
