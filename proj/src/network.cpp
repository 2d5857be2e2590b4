#include "snc/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace snc {

namespace {

template <class X, class Y>
void merge_dependencies(X& into, const Y& from) {
  into.dep_flows.insert(from.dep_flows.begin(), from.dep_flows.end());
  into.dep_services.insert(from.dep_services.begin(), from.dep_services.end());
}

template <class X>
void add_reference(X& target, const ObjectRef& ref) {
  if (ref.kind == ObjectRef::Kind::Flow) {
    target.dep_flows.insert(ref.id);
  } else {
    target.dep_services.insert(ref.id);
  }
}

}  // namespace

HoelderParam HoelderRegistry::create() {
  const HoelderParam param{next_id_++};
  params_.emplace(param.id, param);
  return param;
}

std::optional<std::size_t> Flow::hop_of(VertexId v) const {
  const auto it = std::find(path.begin(), path.end(), v);
  if (it == path.end()) return std::nullopt;
  return static_cast<std::size_t>(it - path.begin());
}

VertexId Network::add_vertex(std::string name, Service service) {
  if (vertex_names_.count(name) != 0) {
    throw Error(ErrorCode::DuplicateName, "vertex name '" + name + "' already in use");
  }
  const VertexId id = next_vertex_id_++;
  service.dep_services.insert(id);
  vertex_names_.emplace(name, id);
  vertices_.emplace(id, Vertex{id, std::move(name), std::move(service), {}, {}});
  return id;
}

FlowId Network::add_flow(std::string name, std::vector<VertexId> path,
                         std::vector<Priority> priorities, Arrival ingress) {
  if (flow_names_.count(name) != 0) {
    throw Error(ErrorCode::DuplicateName, "flow name '" + name + "' already in use");
  }
  if (path.empty()) throw Error(ErrorCode::LengthMismatch, "flow '" + name + "' has an empty path");
  if (priorities.size() != path.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "flow '" + name + "' lists " + std::to_string(priorities.size()) +
                    " priorities for " + std::to_string(path.size()) + " hops");
  }
  for (VertexId v : path) {
    if (vertices_.count(v) == 0) {
      throw Error(ErrorCode::UnknownVertex, "flow '" + name + "' uses unknown vertex " +
                                                std::to_string(v));
    }
  }
  std::vector<VertexId> sorted = path;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::NotFeedforward, "flow '" + name + "' visits a vertex twice");
  }

  const FlowId id = next_flow_id_++;
  ingress.dep_flows.insert(id);

  Flow flow;
  flow.id = id;
  flow.name = name;
  flow.path = std::move(path);
  flow.priorities = std::move(priorities);
  flow.arrivals.assign(flow.path.size(), std::nullopt);
  flow.arrivals[0] = ingress;
  flow.established_arrivals = 1;

  for (std::size_t hop = 0; hop < flow.path.size(); ++hop) {
    Incoming entry{flow.priorities[hop], std::nullopt};
    if (hop == 0) entry.arrival = ingress;
    vertices_.at(flow.path[hop]).incoming.emplace(id, std::move(entry));
  }
  flow_names_.emplace(std::move(name), id);
  flows_.emplace(id, std::move(flow));
  return id;
}

void Network::declare_dependency(std::span<const ObjectRef> ids) {
  for (const ObjectRef& ref : ids) {
    const bool known = ref.kind == ObjectRef::Kind::Flow ? flows_.count(ref.id) != 0
                                                         : vertices_.count(ref.id) != 0;
    if (!known) {
      throw Error(ErrorCode::UnknownId, std::string("unknown ") +
                                            (ref.kind == ObjectRef::Kind::Flow ? "flow " : "service ") +
                                            std::to_string(ref.id));
    }
  }
  for (const ObjectRef& target : ids) {
    for (const ObjectRef& other : ids) {
      if (target.kind == other.kind && target.id == other.id) continue;
      if (target.kind == ObjectRef::Kind::Service) {
        add_reference(mutable_vertex(target.id).service, other);
        continue;
      }
      Flow& flow = mutable_flow(target.id);
      for (std::size_t hop = 0; hop < flow.established_arrivals; ++hop) {
        add_reference(*flow.arrivals[hop], other);
        auto& entry = mutable_vertex(flow.path[hop]).incoming.at(flow.id);
        if (entry.arrival) add_reference(*entry.arrival, other);
      }
    }
  }
}

std::vector<FlowId> Network::service_order(VertexId v) const {
  const Vertex& vertex = this->vertex(v);
  std::vector<std::pair<Priority, FlowId>> order;
  for (const auto& [flow_id, entry] : vertex.incoming) {
    if (vertex.served.count(flow_id) == 0) order.emplace_back(entry.priority, flow_id);
  }
  // Equal priorities are served in ascending flow id.
  std::sort(order.begin(), order.end());
  std::vector<FlowId> out;
  out.reserve(order.size());
  for (const auto& [prio, flow_id] : order) out.push_back(flow_id);
  return out;
}

std::optional<FlowId> Network::next_to_serve(VertexId v) const {
  const auto order = service_order(v);
  if (order.empty()) return std::nullopt;
  return order.front();
}

LeftoverResult Network::compute_leftover(VertexId v) {
  Vertex& vertex = mutable_vertex(v);
  const auto candidate = next_to_serve(v);
  if (!candidate) {
    throw Error(ErrorCode::NoEligibleFlow, "no unserved flow at vertex '" + vertex.name + "'");
  }
  const Incoming& entry = vertex.incoming.at(*candidate);
  if (!entry.arrival) {
    throw Error(ErrorCode::NoEligibleFlow, "bound of flow '" + flow(*candidate).name +
                                               "' at vertex '" + vertex.name + "' is not known yet");
  }
  const Arrival arrival = *entry.arrival;
  const Service before = vertex.service;

  vertex.service = leftover(hoelders_, before, arrival);
  Arrival output = output_bound(hoelders_, arrival, before);
  vertex.served.insert(*candidate);

  Flow& served = mutable_flow(*candidate);
  const std::size_t hop = *served.hop_of(v);
  if (hop + 1 < served.path.size()) {
    served.arrivals[hop + 1] = output;
    served.established_arrivals = hop + 2;
    mutable_vertex(served.path[hop + 1]).incoming.at(served.id).arrival = output;
  }
  return {*candidate, std::move(output)};
}

const Flow& Network::flow(FlowId id) const {
  const auto it = flows_.find(id);
  if (it == flows_.end()) throw Error(ErrorCode::UnknownFlow, "unknown flow " + std::to_string(id));
  return it->second;
}

const Vertex& Network::vertex(VertexId id) const {
  const auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    throw Error(ErrorCode::UnknownVertex, "unknown vertex " + std::to_string(id));
  }
  return it->second;
}

Flow& Network::mutable_flow(FlowId id) { return const_cast<Flow&>(flow(id)); }

Vertex& Network::mutable_vertex(VertexId id) { return const_cast<Vertex&>(vertex(id)); }

FlowId Network::flow_id(std::string_view name) const {
  const auto it = flow_names_.find(name);
  if (it == flow_names_.end()) {
    throw Error(ErrorCode::UnknownFlow, "unknown flow '" + std::string(name) + "'");
  }
  return it->second;
}

VertexId Network::vertex_id(std::string_view name) const {
  const auto it = vertex_names_.find(name);
  if (it == vertex_names_.end()) {
    throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + std::string(name) + "'");
  }
  return it->second;
}

void Network::check_invariants() const {
  const auto fail = [](const std::string& what) { throw std::logic_error("network invariant: " + what); };
  const auto check_ids = [&](const SymbolicFunction& f) {
    for (HoelderId h : f.parameter_ids()) {
      if (!hoelders_.contains(h)) fail("unregistered Hoelder parameter " + std::to_string(h));
    }
  };

  for (const auto& [id, flow] : flows_) {
    if (flow.path.size() != flow.priorities.size() || flow.path.size() != flow.arrivals.size()) {
      fail("flow " + flow.name + " has inconsistent hop lists");
    }
    if (flow.established_arrivals < 1 || flow.established_arrivals > flow.path.size()) {
      fail("flow " + flow.name + " established count out of range");
    }
    for (std::size_t hop = 0; hop < flow.path.size(); ++hop) {
      if (flow.arrivals[hop].has_value() != (hop < flow.established_arrivals)) {
        fail("flow " + flow.name + " arrival presence disagrees with established count");
      }
      const auto v = vertices_.find(flow.path[hop]);
      if (v == vertices_.end()) fail("flow " + flow.name + " routes through a missing vertex");
      const auto entry = v->second.incoming.find(id);
      if (entry == v->second.incoming.end()) fail("vertex " + v->second.name + " misses flow " + flow.name);
      if (entry->second.priority != flow.priorities[hop]) fail("priority mismatch for " + flow.name);
      if (entry->second.arrival.has_value() != flow.arrivals[hop].has_value()) {
        fail("incoming bound of " + flow.name + " at " + v->second.name + " out of sync");
      }
      if (flow.arrivals[hop]) {
        check_ids(flow.arrivals[hop]->rho);
        check_ids(flow.arrivals[hop]->sigma);
      }
    }
  }
  for (const auto& [id, vertex] : vertices_) {
    if (vertex.service.dep_services.count(id) == 0) fail("service of " + vertex.name + " lost its own id");
    for (const auto& [flow_id, entry] : vertex.incoming) {
      const auto f = flows_.find(flow_id);
      if (f == flows_.end() || !f->second.hop_of(id)) fail("vertex " + vertex.name + " lists a foreign flow");
    }
    for (FlowId served : vertex.served) {
      if (vertex.incoming.count(served) == 0) fail("vertex " + vertex.name + " served a foreign flow");
    }
    check_ids(vertex.service.rho);
    check_ids(vertex.service.sigma);
  }
}

Arrival multiplex(HoelderRegistry& registry, const Arrival& a1, const Arrival& a2) {
  const auto [x, y] = hoelder_operands(registry, a1, a2);
  Arrival out{sum(x.rho, y.rho), sum(x.sigma, y.sigma), a1.dep_flows, a1.dep_services, std::nullopt};
  merge_dependencies(out, a2);
  return out;
}

Service convolve(HoelderRegistry& registry, const Service& s1, const Service& s2) {
  const auto [x, y] = hoelder_operands(registry, s1, s2);
  Service out{maximum(x.rho, y.rho), convolution_sigma(x.sigma, y.sigma, x.rho, y.rho),
              s1.dep_flows, s1.dep_services, std::nullopt};
  merge_dependencies(out, s2);
  return out;
}

Service leftover(HoelderRegistry& registry, const Service& s, const Arrival& a) {
  const auto [arr, srv] = hoelder_operands(registry, a, s);
  Service out{sum(arr.rho, srv.rho), sum(arr.sigma, srv.sigma), s.dep_flows, s.dep_services,
              std::nullopt};
  merge_dependencies(out, a);
  return out;
}

Arrival output_bound(HoelderRegistry& registry, const Arrival& a, const Service& s) {
  const auto [arr, srv] = hoelder_operands(registry, a, s);
  Arrival out{arr.rho, deconvolution_sigma(arr.sigma, srv.sigma, arr.rho, srv.rho), a.dep_flows,
              a.dep_services, std::nullopt};
  merge_dependencies(out, s);
  return out;
}

}  // namespace snc
