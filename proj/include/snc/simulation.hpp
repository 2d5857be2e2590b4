#pragma once

// Discrete-time fluid queueing simulator with strict-priority nodes. Every
// slot each flow emits one batch; nodes then serve their rate in priority
// order (ties by flow index), and departures reach the next hop in the same
// slot. Used to check analytic bounds against empirical tail frequencies.

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "snc/network.hpp"

namespace snc {

struct Sampler {
  enum class Kind { Constant, Exponential, CompoundPoisson };
  Kind kind = Kind::Constant;
  // Constant: a = rate. Exponential: a = lambda. CompoundPoisson: a = mu, b = nu.
  double a = 0.0;
  double b = 0.0;

  static Sampler constant(double rate) { return {Kind::Constant, rate, 0.0}; }
  static Sampler exponential(double lambda) { return {Kind::Exponential, lambda, 0.0}; }
  static Sampler compound_poisson(double mu, double nu) { return {Kind::CompoundPoisson, mu, nu}; }
};

struct SimNode {
  std::string name;
  double rate = 0.0;
};

struct SimFlow {
  std::string name;
  std::vector<std::size_t> path;  // node indices
  std::vector<Priority> priorities;
  Sampler sampler;
};

// Observes the flows in `flows` between entering node `entry` and leaving
// node `exit`. A(t) sums their arrivals at entry, B(t) their departures at
// exit; backlog is A(t) - B(t) and virtual delay min{s >= 0 : A(t) <= B(t+s)}.
struct Probe {
  std::string name;
  std::vector<std::size_t> flows;
  std::size_t entry = 0;
  std::size_t exit = 0;
};

struct SimConfig {
  std::vector<SimNode> nodes;
  std::vector<SimFlow> flows;
  std::vector<Probe> probes;
  std::uint64_t horizon = 100'000;
  std::uint64_t warmup = 1'000;
  std::uint64_t seed = 1;
  // Delays above the cap are counted in a single overflow bucket.
  std::uint64_t delay_cap = 10'000;
};

Probe local_probe(const SimConfig& cfg, std::size_t flow, std::size_t node);
Probe aggregate_probe(const SimConfig& cfg, std::size_t node);
Probe path_probe(const SimConfig& cfg, std::size_t flow, std::size_t first, std::size_t last);

struct ProbeReport {
  std::string name;
  std::uint64_t samples = 0;
  std::vector<double> backlog;  // sorted ascending
  std::vector<std::uint64_t> delay_histogram;  // index = delay in slots, up to the cap
  std::uint64_t delay_overflow = 0;

  std::uint64_t backlog_exceedances(double n) const;
  double backlog_exceedance(double n) const;
  std::uint64_t delay_exceedances(double t) const;
  double delay_exceedance(double t) const;
  double mean_backlog() const;
  double mean_delay() const;
};

struct NodeTotals {
  long double arrived = 0;
  long double departed = 0;
};

struct SimReport {
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  std::uint64_t warmup = 0;
  std::vector<ProbeReport> probes;
  std::vector<NodeTotals> nodes;
};

// Slot-by-slot engine behind simulate(); exposed for invariant checks.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  void step();
  std::uint64_t slot() const noexcept { return slot_; }

  double node_backlog(std::size_t node) const;
  // Amount that reached / left the node in the last slot.
  double node_arrived_last(std::size_t node) const { return arrived_last_[node]; }
  double node_departed_last(std::size_t node) const { return departed_last_[node]; }
  const NodeTotals& node_totals(std::size_t node) const { return totals_[node]; }

  const SimConfig& config() const noexcept { return cfg_; }

 private:
  friend SimReport simulate(const SimConfig& cfg);

  double sample(std::size_t flow);

  SimConfig cfg_;
  std::vector<std::size_t> node_order_;
  // Per node, (flow, hop) pairs in service order.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> classes_;
  std::vector<std::mt19937_64> rngs_;
  std::vector<std::vector<double>> queue_;             // [flow][hop]
  std::vector<std::vector<double>> inbound_;           // amount reaching [flow][hop] this slot
  std::vector<std::vector<long double>> arrived_cum_;  // [flow][hop]
  std::vector<std::vector<long double>> departed_cum_;
  std::vector<double> arrived_last_;
  std::vector<double> departed_last_;
  std::vector<NodeTotals> totals_;
  std::uint64_t slot_ = 0;
};

// Throws InvalidConfig for malformed configurations.
SimReport simulate(const SimConfig& cfg);

// Simulation model of an unreduced network: node rates from CR/CRS services,
// samplers from CONSTANT, EXPONENTIAL and Poisson arrivals. Adds a path probe
// per flow, a local probe per flow and hop, and an aggregate probe per node.
// Node and flow indices follow ascending vertex and flow ids.
SimConfig sim_config_from_network(const Network& net);

// Statistical acceptance of an empirical tail against an analytic bound:
// with k >= 50 exceedances out of n samples the frequency must not exceed
// bound * (1 + 3/sqrt(k)); below that, k must stay within three standard
// deviations of the count the bound allows.
bool consistent_with_bound(std::uint64_t exceedances, std::uint64_t samples, double bound);

}  // namespace snc
