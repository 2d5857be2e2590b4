#include "snc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "snc/error.hpp"

namespace snc {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void validate(const SimConfig& cfg) {
  if (cfg.horizon <= cfg.warmup) invalid("horizon must exceed warmup");
  if (cfg.delay_cap == 0) invalid("delay cap must be positive");
  for (const SimNode& n : cfg.nodes) {
    if (!(n.rate > 0.0) || !std::isfinite(n.rate)) invalid("node '" + n.name + "' needs a positive rate");
  }
  for (const SimFlow& f : cfg.flows) {
    if (f.path.empty() || f.path.size() != f.priorities.size()) {
      invalid("flow '" + f.name + "' needs one priority per hop");
    }
    for (std::size_t v : f.path) {
      if (v >= cfg.nodes.size()) invalid("flow '" + f.name + "' visits an unknown node");
    }
    std::vector<std::size_t> sorted = f.path;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      invalid("flow '" + f.name + "' visits a node twice");
    }
    const Sampler& s = f.sampler;
    const bool ok = s.kind == Sampler::Kind::Constant ? s.a >= 0.0
                    : s.kind == Sampler::Kind::Exponential ? s.a > 0.0
                                                           : s.a > 0.0 && s.b > 0.0;
    if (!ok || !std::isfinite(s.a) || !std::isfinite(s.b)) invalid("flow '" + f.name + "' has a bad sampler");
  }
  for (const Probe& p : cfg.probes) {
    if (p.flows.empty()) invalid("probe '" + p.name + "' observes no flow");
    for (std::size_t f : p.flows) {
      if (f >= cfg.flows.size()) invalid("probe '" + p.name + "' names an unknown flow");
      const auto& path = cfg.flows[f].path;
      const auto in = std::find(path.begin(), path.end(), p.entry);
      const auto out = std::find(path.begin(), path.end(), p.exit);
      if (in == path.end() || out == path.end() || out < in) {
        invalid("probe '" + p.name + "': flow '" + cfg.flows[f].name + "' does not pass entry then exit");
      }
    }
  }
}

std::size_t hop_index(const SimFlow& f, std::size_t node) {
  return static_cast<std::size_t>(std::find(f.path.begin(), f.path.end(), node) - f.path.begin());
}

// Kahn's algorithm over the hop successor relation; ties by node index.
std::vector<std::size_t> topological_order(const SimConfig& cfg) {
  const std::size_t n = cfg.nodes.size();
  std::vector<std::vector<std::size_t>> next(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const SimFlow& f : cfg.flows) {
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      next[f.path[i]].push_back(f.path[i + 1]);
      ++indegree[f.path[i + 1]];
    }
  }
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && indegree[v] == 0) {
        pick = v;
        break;
      }
    }
    if (pick == n) invalid("flow routes form a cycle");
    done[pick] = true;
    order.push_back(pick);
    for (std::size_t w : next[pick]) --indegree[w];
  }
  return order;
}

struct ProbeState {
  std::vector<std::pair<std::size_t, std::size_t>> entry;  // (flow, hop)
  std::vector<std::pair<std::size_t, std::size_t>> exit;
  std::deque<std::pair<std::uint64_t, long double>> pending;
};

constexpr long double kTolerance = 1e-9L;

}  // namespace

Probe local_probe(const SimConfig& cfg, std::size_t flow, std::size_t node) {
  return {cfg.flows.at(flow).name + "@" + cfg.nodes.at(node).name, {flow}, node, node};
}

Probe aggregate_probe(const SimConfig& cfg, std::size_t node) {
  Probe p{"*@" + cfg.nodes.at(node).name, {}, node, node};
  for (std::size_t f = 0; f < cfg.flows.size(); ++f) {
    const auto& path = cfg.flows[f].path;
    if (std::find(path.begin(), path.end(), node) != path.end()) p.flows.push_back(f);
  }
  return p;
}

Probe path_probe(const SimConfig& cfg, std::size_t flow, std::size_t first, std::size_t last) {
  return {cfg.flows.at(flow).name + "@" + cfg.nodes.at(first).name + ".." + cfg.nodes.at(last).name,
          {flow},
          first,
          last};
}

std::uint64_t ProbeReport::backlog_exceedances(double n) const {
  return static_cast<std::uint64_t>(backlog.end() - std::upper_bound(backlog.begin(), backlog.end(), n));
}

double ProbeReport::backlog_exceedance(double n) const {
  return samples == 0 ? 0.0 : static_cast<double>(backlog_exceedances(n)) / static_cast<double>(samples);
}

std::uint64_t ProbeReport::delay_exceedances(double t) const {
  std::uint64_t count = delay_overflow;
  for (std::size_t d = 0; d < delay_histogram.size(); ++d) {
    if (static_cast<double>(d) > t) count += delay_histogram[d];
  }
  return count;
}

double ProbeReport::delay_exceedance(double t) const {
  return samples == 0 ? 0.0 : static_cast<double>(delay_exceedances(t)) / static_cast<double>(samples);
}

double ProbeReport::mean_backlog() const {
  if (backlog.empty()) return 0.0;
  return std::accumulate(backlog.begin(), backlog.end(), 0.0) / static_cast<double>(backlog.size());
}

double ProbeReport::mean_delay() const {
  long double total = 0;
  std::uint64_t count = delay_overflow;
  for (std::size_t d = 0; d < delay_histogram.size(); ++d) {
    total += static_cast<long double>(d) * static_cast<long double>(delay_histogram[d]);
    count += delay_histogram[d];
  }
  total += static_cast<long double>(delay_overflow) * static_cast<long double>(delay_histogram.size());
  return count == 0 ? 0.0 : static_cast<double>(total / static_cast<long double>(count));
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  node_order_ = topological_order(cfg_);

  classes_.resize(cfg_.nodes.size());
  for (std::size_t f = 0; f < cfg_.flows.size(); ++f) {
    for (std::size_t h = 0; h < cfg_.flows[f].path.size(); ++h) classes_[cfg_.flows[f].path[h]].push_back({f, h});
  }
  for (auto& c : classes_) {
    std::stable_sort(c.begin(), c.end(), [&](const auto& x, const auto& y) {
      const Priority px = cfg_.flows[x.first].priorities[x.second];
      const Priority py = cfg_.flows[y.first].priorities[y.second];
      return px != py ? px < py : x.first < y.first;
    });
  }

  for (std::size_t f = 0; f < cfg_.flows.size(); ++f) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                      static_cast<std::uint32_t>(f)};
    rngs_.emplace_back(seq);
    const std::size_t hops = cfg_.flows[f].path.size();
    queue_.emplace_back(hops, 0.0);
    inbound_.emplace_back(hops, 0.0);
    arrived_cum_.emplace_back(hops, 0.0L);
    departed_cum_.emplace_back(hops, 0.0L);
  }
  arrived_last_.assign(cfg_.nodes.size(), 0.0);
  departed_last_.assign(cfg_.nodes.size(), 0.0);
  totals_.assign(cfg_.nodes.size(), {});
}

double Simulator::sample(std::size_t flow) {
  const Sampler& s = cfg_.flows[flow].sampler;
  auto& rng = rngs_[flow];
  switch (s.kind) {
    case Sampler::Kind::Constant:
      return s.a;
    case Sampler::Kind::Exponential:
      return std::exponential_distribution<double>(s.a)(rng);
    case Sampler::Kind::CompoundPoisson: {
      const auto jumps = std::poisson_distribution<std::uint64_t>(s.a)(rng);
      std::exponential_distribution<double> size(s.b);
      double total = 0.0;
      for (std::uint64_t i = 0; i < jumps; ++i) total += size(rng);
      return total;
    }
  }
  return 0.0;
}

void Simulator::step() {
  auto& inbound = inbound_;
  for (std::size_t f = 0; f < cfg_.flows.size(); ++f) inbound[f][0] = sample(f);
  for (std::size_t v : node_order_) {
    double capacity = cfg_.nodes[v].rate;
    double arrived = 0.0;
    double departed = 0.0;
    for (const auto& [f, h] : classes_[v]) {
      const double in = inbound[f][h];
      arrived += in;
      arrived_cum_[f][h] += in;
      double& q = queue_[f][h];
      q += in;
      const double served = std::min(capacity, q);
      capacity -= served;
      q -= served;
      if (q < 0.0) q = 0.0;
      departed += served;
      departed_cum_[f][h] += served;
      if (h + 1 < cfg_.flows[f].path.size()) inbound[f][h + 1] = served;
    }
    arrived_last_[v] = arrived;
    departed_last_[v] = departed;
    totals_[v].arrived += arrived;
    totals_[v].departed += departed;
  }
  ++slot_;
}

double Simulator::node_backlog(std::size_t node) const {
  double total = 0.0;
  for (const auto& [f, h] : classes_[node]) total += queue_[f][h];
  return total;
}

SimReport simulate(const SimConfig& cfg) {
  Simulator sim(cfg);
  const SimConfig& c = sim.config();

  std::vector<ProbeState> states(c.probes.size());
  SimReport report{c.seed, c.horizon, c.warmup, {}, {}};
  report.probes.resize(c.probes.size());
  for (std::size_t i = 0; i < c.probes.size(); ++i) {
    const Probe& p = c.probes[i];
    for (std::size_t f : p.flows) {
      states[i].entry.push_back({f, hop_index(c.flows[f], p.entry)});
      states[i].exit.push_back({f, hop_index(c.flows[f], p.exit)});
    }
    report.probes[i].name = p.name;
    report.probes[i].delay_histogram.assign(c.delay_cap + 1, 0);
    report.probes[i].backlog.reserve(c.horizon - c.warmup);
  }

  const auto cumulative = [&](const std::vector<std::pair<std::size_t, std::size_t>>& at,
                              const std::vector<std::vector<long double>>& cum) {
    long double total = 0;
    for (const auto& [f, h] : at) total += cum[f][h];
    return total;
  };

  bool draining = true;
  while (sim.slot() < c.horizon || draining) {
    const std::uint64_t t = sim.slot();
    sim.step();
    draining = false;
    for (std::size_t i = 0; i < states.size(); ++i) {
      ProbeState& st = states[i];
      ProbeReport& pr = report.probes[i];
      const long double a = cumulative(st.entry, sim.arrived_cum_);
      const long double b = cumulative(st.exit, sim.departed_cum_);
      if (t >= c.warmup && t < c.horizon) {
        ++pr.samples;
        pr.backlog.push_back(static_cast<double>(std::max(0.0L, a - b)));
        st.pending.push_back({t, a});
      }
      while (!st.pending.empty()) {
        const auto [t0, a0] = st.pending.front();
        if (a0 <= b + kTolerance) {
          ++pr.delay_histogram[t - t0];
        } else if (t - t0 >= c.delay_cap) {
          ++pr.delay_overflow;
        } else {
          break;
        }
        st.pending.pop_front();
      }
      if (!st.pending.empty()) draining = true;
    }
  }

  for (auto& pr : report.probes) std::sort(pr.backlog.begin(), pr.backlog.end());
  for (std::size_t v = 0; v < c.nodes.size(); ++v) report.nodes.push_back(sim.node_totals(v));
  return report;
}

SimConfig sim_config_from_network(const Network& net) {
  SimConfig cfg;
  std::map<VertexId, std::size_t> node_index;
  for (const auto& [id, vertex] : net.vertices()) {
    if (!vertex.service.origin || !vertex.served.empty()) {
      invalid("vertex '" + vertex.name + "' holds a derived service");
    }
    node_index[id] = cfg.nodes.size();
    cfg.nodes.push_back({vertex.name, vertex.service.origin->rate});
  }
  for (const auto& [id, flow] : net.flows()) {
    const auto& origin = flow.arrivals.front()->origin;
    if (!origin) invalid("flow '" + flow.name + "' holds a derived arrival");
    SimFlow sf{flow.name, {}, flow.priorities, {}};
    for (VertexId v : flow.path) sf.path.push_back(node_index.at(v));
    switch (origin->model) {
      case ArrivalModel::Constant:
        sf.sampler = Sampler::constant(origin->params.at(0));
        break;
      case ArrivalModel::Exponential:
        sf.sampler = Sampler::exponential(1.0 / origin->params.at(0));
        break;
      case ArrivalModel::Poisson:
        sf.sampler = Sampler::compound_poisson(origin->params.at(0), origin->params.at(1));
        break;
      case ArrivalModel::Ebb:
      case ArrivalModel::StationaryTokenBucket:
        invalid("flow '" + flow.name + "' has an arrival model without a sampler");
    }
    cfg.flows.push_back(std::move(sf));
  }
  for (std::size_t f = 0; f < cfg.flows.size(); ++f) {
    const auto& path = cfg.flows[f].path;
    cfg.probes.push_back(path_probe(cfg, f, path.front(), path.back()));
    if (path.size() > 1) {
      for (std::size_t v : path) cfg.probes.push_back(local_probe(cfg, f, v));
    }
  }
  for (std::size_t v = 0; v < cfg.nodes.size(); ++v) {
    Probe p = aggregate_probe(cfg, v);
    if (p.flows.size() > 1) cfg.probes.push_back(std::move(p));
  }
  return cfg;
}

bool consistent_with_bound(std::uint64_t exceedances, std::uint64_t samples, double bound) {
  if (samples == 0) return true;
  const double k = static_cast<double>(exceedances);
  const double n = static_cast<double>(samples);
  if (exceedances >= 50) return k / n <= bound * (1.0 + 3.0 / std::sqrt(k));
  const double allowed = std::min(n, n * bound);
  return k <= allowed + 3.0 * std::sqrt(allowed) + 3.0;
}

}  // namespace snc
