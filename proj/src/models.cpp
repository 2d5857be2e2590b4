#include "snc/models.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace snc {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::NonPositiveParameter,
                std::string(what) + " must be positive, got " + std::to_string(value));
  }
}

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::NegativeRate,
                std::string(what) + " must be nonnegative, got " + std::to_string(value));
  }
}

Arrival make_arrival(SymbolicFunction rho, SymbolicFunction sigma, ArrivalOrigin origin) {
  return Arrival{std::move(rho), std::move(sigma), {}, {}, std::move(origin)};
}

}  // namespace

Arrival constant_rate_arrival(double rate) {
  require_nonnegative(rate, "arrival rate");
  return make_arrival(SymbolicFunction::constant(rate), SymbolicFunction::constant(0.0),
                      {ArrivalModel::Constant, {rate}});
}

Arrival exponential_arrival(double lambda) {
  require_positive(lambda, "exponential parameter");
  return make_arrival(SymbolicFunction::exponential_arrival_rho(lambda),
                      SymbolicFunction::constant(0.0), {ArrivalModel::Exponential, {1.0 / lambda}});
}

Arrival ebb_arrival(double rate, double decay, double prefactor) {
  require_nonnegative(rate, "EBB rate");
  require_positive(decay, "EBB decay");
  require_positive(prefactor, "EBB prefactor");
  return make_arrival(SymbolicFunction::constant(rate), SymbolicFunction::ebb_sigma(prefactor, decay),
                      {ArrivalModel::Ebb, {rate, decay, prefactor}});
}

Arrival poisson_arrival(double mu, double nu) {
  require_positive(mu, "Poisson intensity");
  require_positive(nu, "jump size parameter");
  return make_arrival(SymbolicFunction::poisson_rho(mu, nu), SymbolicFunction::constant(0.0),
                      {ArrivalModel::Poisson, {mu, nu}});
}

Arrival stationary_tb_arrival(std::span<const double> rates, std::span<const double> buckets,
                              std::optional<double> max_theta) {
  if (rates.empty()) throw Error(ErrorCode::EmptyAggregate, "token bucket aggregate is empty");
  if (rates.size() != buckets.size()) {
    throw Error(ErrorCode::LengthMismatch, "token bucket rates and buckets differ in length");
  }
  for (double r : rates) require_positive(r, "token rate");
  for (double b : buckets) require_nonnegative(b, "bucket size");
  if (max_theta) require_positive(*max_theta, "maxTheta");

  const double rate_sum = std::accumulate(rates.begin(), rates.end(), 0.0);
  const double bucket_sum = std::accumulate(buckets.begin(), buckets.end(), 0.0);
  const double limit = max_theta.value_or(std::numeric_limits<double>::infinity());

  ArrivalOrigin origin{ArrivalModel::StationaryTokenBucket, {rate_sum, bucket_sum}};
  if (max_theta) origin.params.push_back(*max_theta);
  return make_arrival(SymbolicFunction::constant(rate_sum),
                      SymbolicFunction::token_bucket_sigma(bucket_sum, limit), std::move(origin));
}

Service constant_rate_service(double rate) {
  require_positive(rate, "service rate");
  return Service{SymbolicFunction::constant(-rate), SymbolicFunction::constant(0.0), {}, {},
                 ServiceOrigin{ServiceModel::ConstantRate, rate}};
}

Service shifted_constant_rate_service(double rate) {
  require_positive(rate, "service rate");
  return Service{SymbolicFunction::constant(-rate), SymbolicFunction::constant(-rate), {}, {},
                 ServiceOrigin{ServiceModel::ShiftedConstantRate, rate}};
}

}  // namespace snc
