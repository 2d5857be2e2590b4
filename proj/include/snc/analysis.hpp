#pragma once

#include <set>
#include <string_view>
#include <vector>

#include "snc/network.hpp"

namespace snc {

enum class BoundKind { Backlog, Delay };

std::string_view to_string(BoundKind kind);

// P(quantity > x) <= exp(theta rho_b(theta) x + theta sigma_b(theta)).
struct PerformanceBound {
  BoundKind kind;
  SymbolicFunction rho_b;
  SymbolicFunction sigma_b;
  std::set<FlowId> dep_flows;
  std::set<VertexId> dep_services;

  std::set<HoelderId> hoelder_ids() const;
};

// Single flow at a single service element. Registers a Hoelder parameter
// when `a` and `s` are dependent.
PerformanceBound node_bound(HoelderRegistry& registry, const Arrival& a, const Service& s,
                            BoundKind kind);

// End-to-end delay of `a` across `services` in order. Pairwise independent
// inputs use the end-to-end convolution bound; otherwise the services are
// merged left to right with convolve() and bounded with node_bound().
PerformanceBound end_to_end_delay(HoelderRegistry& registry, const Arrival& a,
                                  const std::vector<Service>& services);

struct AnalysisRequest {
  FlowId flow;
  VertexId vertex;
  BoundKind kind;
};

// The analyses below reduce `net` in place with compute_leftover(); pass a
// copy to keep the original network.

// Local bound for a flow at one vertex, against the service left after all
// flows ranked above it there.
PerformanceBound simple_analysis(Network& net, const AnalysisRequest& request);

// End-to-end delay of `flow` over `path`, a contiguous part of its route.
PerformanceBound path_analysis(Network& net, FlowId flow, const std::vector<VertexId>& path);

// End-to-end delay of `foi` over `path` when `crossflow` takes the same path
// at higher priority. The per-hop leftover services all depend on the
// crossflow and are merged with dependent convolutions.
PerformanceBound ladder_end_to_end(Network& net, FlowId foi, FlowId crossflow,
                                   const std::vector<VertexId>& path);

}  // namespace snc
