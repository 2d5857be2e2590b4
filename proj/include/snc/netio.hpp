#pragma once

// Reading and writing the plain-text network format:
//
//   # comment
//   I <vertex>, FIFO, CR, <rate>
//   EOI
//   F <flow>, <hops>, <vertex>:<priority>, ..., <ARRIVAL>, <params>...
//   EOF
//
// Arrival types: CONSTANT rate | EXPONENTIAL mean | EBB rate, decay, prefactor
// | STATIONARYTB rate, bucket[, maxTheta]. Besides CR the service type CRS
// (constant rate with one slot of service up front) is accepted unless
// parsing is strict. FIFO vertices are analyzed under strict priority.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "snc/network.hpp"

namespace snc {

struct InterfaceRecord {
  int line = 0;
  std::string name;
  std::string scheduling;
  std::string service_type;
  std::vector<double> params;
};

struct HopRecord {
  std::string vertex;
  Priority priority = 0;
};

struct FlowRecord {
  int line = 0;
  std::string name;
  std::vector<HopRecord> hops;
  std::string arrival_type;
  std::vector<double> params;
};

struct NetworkDocument {
  std::vector<InterfaceRecord> interfaces;
  std::vector<FlowRecord> flows;
};

struct ParseOptions {
  // Reject format extensions (the CRS service type).
  bool strict = false;
};

// Grammar-level parse. Errors carry the 1-based line number.
NetworkDocument parse_document(std::string_view text, const ParseOptions& options = {});
// Builds the network through the model factories.
Network build_network(const NetworkDocument& doc);

Network parse_network(std::string_view text, const ParseOptions& options = {});
Network load_network(const std::filesystem::path& path, const ParseOptions& options = {});

// Canonical text of a network that holds only its input bounds. Throws
// UnsupportedNetwork for reduced networks or declared dependencies.
std::string serialize_network(const Network& net);

// Same ids, names, routes, priorities and input models.
bool structurally_equal(const Network& a, const Network& b);

}  // namespace snc
