#pragma once

// MGF-bounded arrival and service descriptions and the factories for the
// supported traffic and server models.

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "snc/symbolic.hpp"

namespace snc {

using FlowId = int;
using VertexId = int;

enum class ArrivalModel { Constant, Exponential, Ebb, Poisson, StationaryTokenBucket };
enum class ServiceModel { ConstantRate, ShiftedConstantRate };

// The model an input bound was built from, with its parameters in network
// file order (EXPONENTIAL carries the mean, not lambda). Derived bounds have
// no origin.
struct ArrivalOrigin {
  ArrivalModel model;
  std::vector<double> params;

  bool operator==(const ArrivalOrigin&) const = default;
};

struct ServiceOrigin {
  ServiceModel model;
  double rate;

  bool operator==(const ServiceOrigin&) const = default;
};

// phi_{A(s,t)}(theta) <= exp(theta rho(theta) (t-s) + theta sigma(theta)).
struct Arrival {
  SymbolicFunction rho;
  SymbolicFunction sigma;
  std::set<FlowId> dep_flows;
  std::set<VertexId> dep_services;
  std::optional<ArrivalOrigin> origin;
};

// phi_{U(s,t)}(-theta) <= exp(theta rho(theta) (t-s) + theta sigma(theta)).
// rho is the negated rate, so rho <= 0 for rate servers.
struct Service {
  SymbolicFunction rho;
  SymbolicFunction sigma;
  std::set<FlowId> dep_flows;
  std::set<VertexId> dep_services;
  std::optional<ServiceOrigin> origin;
};

Arrival constant_rate_arrival(double rate);
// Per-slot i.i.d. exponential increments with parameter lambda (mean 1/lambda).
Arrival exponential_arrival(double lambda);
// Exponentially bounded burstiness: P(A(s,t) > rate (t-s) + x) <= prefactor e^{-decay x}.
Arrival ebb_arrival(double rate, double decay, double prefactor);
// Compound Poisson with jump intensity mu and Exp(nu) jump sizes.
Arrival poisson_arrival(double mu, double nu);
// Stationary aggregate of token-bucket shaped subflows.
Arrival stationary_tb_arrival(std::span<const double> rates, std::span<const double> buckets,
                              std::optional<double> max_theta = std::nullopt);

Service constant_rate_service(double rate);
// Constant rate server granted one extra slot of service up front.
Service shifted_constant_rate_service(double rate);

}  // namespace snc
