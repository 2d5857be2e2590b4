#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snc/models.hpp"
#include "snc/symbolic.hpp"

namespace snc {

using Priority = unsigned;

class HoelderRegistry {
 public:
  HoelderParam create();

  std::size_t size() const noexcept { return params_.size(); }
  bool empty() const noexcept { return params_.empty(); }
  bool contains(HoelderId id) const { return params_.count(id) != 0; }
  const std::map<HoelderId, HoelderParam>& params() const noexcept { return params_; }

 private:
  HoelderId next_id_ = 1;
  std::map<HoelderId, HoelderParam> params_;
};

struct Flow {
  FlowId id = 0;
  std::string name;
  std::vector<VertexId> path;
  std::vector<Priority> priorities;
  // arrivals[i] is the bound at path[i]; present for i < established_arrivals.
  std::vector<std::optional<Arrival>> arrivals;
  std::size_t established_arrivals = 0;

  // Index of `v` on the path, if the flow traverses it.
  std::optional<std::size_t> hop_of(VertexId v) const;
};

struct Incoming {
  Priority priority = 0;
  std::optional<Arrival> arrival;
};

struct Vertex {
  VertexId id = 0;
  std::string name;
  Service service;
  std::map<FlowId, Incoming> incoming;
  std::set<FlowId> served;
};

// A flow or a service element, as named in a dependency declaration.
struct ObjectRef {
  enum class Kind { Flow, Service };
  Kind kind;
  int id;

  static ObjectRef flow(FlowId id) { return {Kind::Flow, id}; }
  static ObjectRef service(VertexId id) { return {Kind::Service, id}; }
};

struct LeftoverResult {
  FlowId served;
  Arrival output;
};

class Network {
 public:
  VertexId add_vertex(std::string name, Service service);
  FlowId add_flow(std::string name, std::vector<VertexId> path, std::vector<Priority> priorities,
                  Arrival ingress);

  // Marks the named flows and services as mutually stochastically dependent.
  void declare_dependency(std::span<const ObjectRef> ids);

  // Serves the highest-priority unserved flow at `v`: the vertex keeps the
  // leftover service and the flow's bound after `v` becomes known.
  LeftoverResult compute_leftover(VertexId v);

  // Flow that compute_leftover(v) would serve next, if any remains.
  std::optional<FlowId> next_to_serve(VertexId v) const;
  // Unserved incoming flows at `v` in service order.
  std::vector<FlowId> service_order(VertexId v) const;

  const Flow& flow(FlowId id) const;
  const Vertex& vertex(VertexId id) const;
  FlowId flow_id(std::string_view name) const;
  VertexId vertex_id(std::string_view name) const;

  const std::map<FlowId, Flow>& flows() const noexcept { return flows_; }
  const std::map<VertexId, Vertex>& vertices() const noexcept { return vertices_; }
  HoelderRegistry& hoelders() noexcept { return hoelders_; }
  const HoelderRegistry& hoelders() const noexcept { return hoelders_; }

  // Throws std::logic_error if the topology bookkeeping is inconsistent.
  void check_invariants() const;

 private:
  Flow& mutable_flow(FlowId id);
  Vertex& mutable_vertex(VertexId id);

  std::map<FlowId, Flow> flows_;
  std::map<VertexId, Vertex> vertices_;
  std::map<std::string, FlowId, std::less<>> flow_names_;
  std::map<std::string, VertexId, std::less<>> vertex_names_;
  HoelderRegistry hoelders_;
  FlowId next_flow_id_ = 1;
  VertexId next_vertex_id_ = 1;
};

// True when a combination of `x` and `y` needs the Hoelder variant: they
// share a flow or a service in their dependency sets.
template <class X, class Y>
bool are_dependent(const X& x, const Y& y) {
  const auto meets = [](const std::set<int>& a, const std::set<int>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        return true;
      }
    }
    return false;
  };
  return meets(x.dep_flows, y.dep_flows) || meets(x.dep_services, y.dep_services);
}

struct BoundTerms {
  SymbolicFunction rho;
  SymbolicFunction sigma;
};

// Bounding functions of x and y ready to be combined. If they are dependent a
// fresh Hoelder parameter is registered; x is then evaluated at p*theta and y
// at q*theta.
template <class X, class Y>
std::pair<BoundTerms, BoundTerms> hoelder_operands(HoelderRegistry& registry, const X& x,
                                                   const Y& y) {
  if (!are_dependent(x, y)) return {{x.rho, x.sigma}, {y.rho, y.sigma}};
  const HoelderId h = registry.create().id;
  return {{hoelder_scale(x.rho, h, HoelderRole::P), hoelder_scale(x.sigma, h, HoelderRole::P)},
          {hoelder_scale(y.rho, h, HoelderRole::Q), hoelder_scale(y.sigma, h, HoelderRole::Q)}};
}

// Aggregate of two flows at one service element.
Arrival multiplex(HoelderRegistry& registry, const Arrival& a1, const Arrival& a2);
// Tandem of two service elements merged into one.
Service convolve(HoelderRegistry& registry, const Service& s1, const Service& s2);
// Service left for lower priorities after serving `a` under strict priority.
Service leftover(HoelderRegistry& registry, const Service& s, const Arrival& a);
// Bound on the departures of `a` from `s`.
Arrival output_bound(HoelderRegistry& registry, const Arrival& a, const Service& s);

}  // namespace snc
