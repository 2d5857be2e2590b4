#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "snc/symbolic.hpp"

using namespace snc;

namespace {

ParamAssignment at(double theta, std::map<HoelderId, double> p = {}) { return {theta, std::move(p)}; }

ErrorCode failure(const SymbolicFunction& f, const ParamAssignment& a) {
  const EvalOutcome r = f.try_evaluate(a);
  REQUIRE_FALSE(r.ok());
  return *r.error;
}

}  // namespace

TEST_CASE("atoms evaluate to their closed forms") {
  CHECK(SymbolicFunction::constant(5).evaluate(at(0.3)) == 5.0);

  const auto rho = SymbolicFunction::exponential_arrival_rho(0.5);
  CHECK(rho.evaluate(at(0.25)) == doctest::Approx(4 * std::log(2.0)).epsilon(1e-12));
  CHECK(rho.evaluate(at(0.25)) == doctest::Approx(2.772588722239781).epsilon(1e-12));
  CHECK(rho.evaluate(at(0.2)) == doctest::Approx(oracle::exp_rho(0.5, 0.2)).epsilon(1e-12));

  const auto ebb = SymbolicFunction::ebb_sigma(1.0, 1.0);
  CHECK(std::fabs(ebb.evaluate(at(0.5)) - 1.3862943611198906) < 1e-9);
  const auto ebb_e = SymbolicFunction::ebb_sigma(std::exp(1.0), 1.0);
  CHECK(std::fabs(ebb_e.evaluate(at(0.5)) - 2.3862943611198906) < 1e-9);
  CHECK(std::fabs(ebb_e.evaluate(at(0.3)) - oracle::ebb_sigma(std::exp(1.0), 1.0, 0.3)) < 1e-12);

  const auto poisson = SymbolicFunction::poisson_rho(1.0, 2.0);
  CHECK(std::fabs(poisson.evaluate(at(1.0)) - 1.0) < 1e-12);
  CHECK(std::fabs(poisson.evaluate(at(0.7)) - oracle::poisson_rho(1.0, 2.0, 0.7)) < 1e-12);

  const auto tb = SymbolicFunction::token_bucket_sigma(2.0, std::numeric_limits<double>::infinity());
  CHECK(std::fabs(tb.evaluate(at(1.0)) - 1.3250027473578644) < 1e-9);
  CHECK(std::fabs(tb.evaluate(at(0.5)) - 0.8675616609660544) < 1e-9);
  CHECK(std::fabs(tb.evaluate(at(0.5)) - oracle::tb_sigma(2.0, 0.5)) < 1e-12);
  // Large arguments stay finite where the naive form overflows.
  CHECK(std::isfinite(tb.evaluate(at(400.0))));
}

TEST_CASE("atom domains are enforced") {
  CHECK(failure(SymbolicFunction::exponential_arrival_rho(0.5), at(0.5)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::exponential_arrival_rho(0.5), at(0.6)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::ebb_sigma(1.0, 1.0), at(1.0)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::poisson_rho(1.0, 2.0), at(2.0)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::constant(1), at(0.0)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::constant(1), at(-1.0)) == ErrorCode::ThetaOutOfDomain);
  CHECK(failure(SymbolicFunction::token_bucket_sigma(1.0, 0.5), at(0.5)) == ErrorCode::ThetaOutOfDomain);

  try {
    SymbolicFunction::exponential_arrival_rho(0.5).evaluate(at(0.5));
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ThetaOutOfDomain);
  }
}

TEST_CASE("max_theta follows the atoms and the Hoelder scalings") {
  CHECK(SymbolicFunction::exponential_arrival_rho(2.0).max_theta(at(1.0)) == 2.0);
  CHECK(std::isinf(SymbolicFunction::constant(1).max_theta(at(1.0))));
  const auto scaled = hoelder_scale(SymbolicFunction::exponential_arrival_rho(2.0), 1, HoelderRole::P);
  CHECK(std::fabs(scaled.max_theta(at(0.1, {{1, 4.0}})) - 0.5) < 1e-15);
  const auto q = hoelder_scale(SymbolicFunction::exponential_arrival_rho(2.0), 1, HoelderRole::Q);
  CHECK(std::fabs(q.max_theta(at(0.1, {{1, 4.0}})) - 1.5) < 1e-12);
  const auto both = sum(SymbolicFunction::poisson_rho(1, 3), SymbolicFunction::ebb_sigma(1, 1.5));
  CHECK(both.max_theta(at(0.1)) == 1.5);
}

TEST_CASE("Hoelder scaling") {
  const auto c = hoelder_scale(SymbolicFunction::constant(3), 1, HoelderRole::P);
  CHECK(c.evaluate(at(0.4, {{1, 7.5}})) == 3.0);
  CHECK(c.parameter_ids() == std::set<HoelderId>{1});

  const auto rho = SymbolicFunction::exponential_arrival_rho(2.0);
  const auto p = hoelder_scale(rho, 1, HoelderRole::P);
  const auto q = hoelder_scale(rho, 1, HoelderRole::Q);
  CHECK(p.evaluate(at(0.1, {{1, 3.0}})) == doctest::Approx(oracle::exp_rho(2.0, 0.3)).epsilon(1e-12));
  CHECK(q.evaluate(at(0.1, {{1, 3.0}})) == doctest::Approx(oracle::exp_rho(2.0, 0.15)).epsilon(1e-12));

  CHECK(failure(p, at(0.1)) == ErrorCode::MissingHoelderAssignment);
  CHECK(failure(p, at(0.1, {{1, 1.0}})) == ErrorCode::InvalidHoelderValue);
  CHECK(failure(p, at(0.1, {{1, 0.5}})) == ErrorCode::InvalidHoelderValue);
  CHECK(failure(p, at(0.1, {{1, std::nan("")}})) == ErrorCode::InvalidHoelderValue);
}

TEST_CASE("parameter ids are the union over the tree") {
  CHECK(SymbolicFunction::constant(2).parameter_ids().empty());
  const auto f = SymbolicFunction::exponential_arrival_rho(1.0);
  const auto g = hoelder_scale(SymbolicFunction::constant(1), 3, HoelderRole::Q);
  const auto tree = sum(hoelder_scale(f, 1, HoelderRole::P), hoelder_scale(g, 2, HoelderRole::Q));
  CHECK(tree.parameter_ids() == std::set<HoelderId>{1, 2, 3});
  CHECK(negate(tree).parameter_ids() == tree.parameter_ids());
  CHECK(maximum(tree, f).parameter_ids() == tree.parameter_ids());
}

TEST_CASE("convolution and deconvolution sigma") {
  const auto zero = SymbolicFunction::constant(0);
  const auto conv = convolution_sigma(zero, zero, SymbolicFunction::constant(-8), SymbolicFunction::constant(-10));
  CHECK(std::fabs(conv.evaluate(at(0.5)) - oracle::conv_sigma(0, 0, -8, -10, 0.5)) < 1e-9);
  CHECK(std::fabs(conv.evaluate(at(0.5)) - 0.9173502907741638) < 1e-9);
  CHECK(std::fabs(conv.evaluate(at(1.0)) - 0.1454134578688591) < 1e-9);

  const auto equal = convolution_sigma(zero, zero, SymbolicFunction::constant(-8), SymbolicFunction::constant(-8));
  CHECK(failure(equal, at(0.5)) == ErrorCode::EqualRatesDegenerate);

  const auto deconv = deconvolution_sigma(zero, zero, SymbolicFunction::constant(2), SymbolicFunction::constant(-10));
  CHECK(std::fabs(deconv.evaluate(at(0.5)) - oracle::deconv_sigma(0, 0, 2, -10, 0.5)) < 1e-12);
  const auto unstable = deconvolution_sigma(zero, zero, SymbolicFunction::constant(2), SymbolicFunction::constant(-2));
  CHECK(failure(unstable, at(0.5)) == ErrorCode::StabilityViolated);
}

TEST_CASE("evaluation is pure") {
  const auto tree = deconvolution_sigma(SymbolicFunction::ebb_sigma(2.0, 1.5),
                                        hoelder_scale(SymbolicFunction::constant(-1), 1, HoelderRole::Q),
                                        hoelder_scale(SymbolicFunction::exponential_arrival_rho(1.0), 1,
                                                      HoelderRole::P),
                                        SymbolicFunction::constant(-6));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta(0.01, 0.3);
  std::uniform_real_distribution<double> p(1.05, 6.0);
  for (int i = 0; i < 200; ++i) {
    const ParamAssignment a = at(theta(rng), {{1, p(rng)}});
    const EvalOutcome x = tree.try_evaluate(a);
    const EvalOutcome y = tree.try_evaluate(a);
    CHECK(x.error == y.error);
    CHECK(std::memcmp(&x.value, &y.value, sizeof(double)) == 0);
  }
}

TEST_CASE("constants are scale neutral and roles are conjugate") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-50, 50);
  std::uniform_real_distribution<double> p(1.0001, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double v = c(rng);
    const double pv = p(rng);
    for (HoelderRole role : {HoelderRole::P, HoelderRole::Q}) {
      CHECK(hoelder_scale(SymbolicFunction::constant(v), 4, role).evaluate(at(0.2, {{4, pv}})) == v);
    }
    CHECK(std::fabs(1.0 / pv + 1.0 / conjugate(pv) - 1.0) < 1e-12);
  }
}

TEST_CASE("sum and maximum") {
  const auto f = SymbolicFunction::exponential_arrival_rho(0.8);
  const auto g = SymbolicFunction::ebb_sigma(3.0, 2.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta(0.01, 0.79);
  for (int i = 0; i < 200; ++i) {
    const auto a = at(theta(rng));
    const double fv = f.evaluate(a);
    const double gv = g.evaluate(a);
    CHECK(sum(f, g).evaluate(a) == fv + gv);
    CHECK(sum(f, g).evaluate(a) == sum(g, f).evaluate(a));
    CHECK(maximum(f, g).evaluate(a) == std::max(fv, gv));
    CHECK(maximum(f, g).evaluate(a) == maximum(g, f).evaluate(a));
    CHECK(negate(f).evaluate(a) == -fv);
  }
}

TEST_CASE("rendering names the structure") {
  const auto tree = sum(SymbolicFunction::constant(2), hoelder_scale(SymbolicFunction::exponential_arrival_rho(0.5), 1,
                                                                     HoelderRole::P));
  const std::string s = tree.to_string();
  CHECK(s.find('+') != std::string::npos);
  CHECK(s.find("0.5") != std::string::npos);
}
