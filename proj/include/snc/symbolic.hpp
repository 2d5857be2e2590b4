#pragma once

// Immutable expression trees for the bounding functions rho(theta) and
// sigma(theta) of MGF bounds.
//
// A SymbolicFunction is evaluated at a ParamAssignment: a value of theta plus
// a value p > 1 for every Hoelder parameter occurring in the tree. A Hoelder
// scaling node evaluates its child at p*theta (role P) or q*theta (role Q),
// where q = p / (p - 1) is the conjugate exponent.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "snc/error.hpp"

namespace snc {

using HoelderId = int;

enum class HoelderRole { P, Q };

struct HoelderParam {
  HoelderId id = 0;
};

// Conjugate exponent q of p, i.e. 1/p + 1/q = 1.
double conjugate(double p);

struct ParamAssignment {
  double theta = 0.0;
  std::map<HoelderId, double> hoelder_values;
};

// Result of a non-throwing evaluation.
struct EvalOutcome {
  double value = 0.0;
  std::optional<ErrorCode> error;

  bool ok() const noexcept { return !error.has_value(); }
};

namespace detail {
struct Node;
}
struct SymbolicAccess;

class SymbolicFunction {
 public:
  // Atoms.
  static SymbolicFunction constant(double c);
  // (1/theta) ln(lambda / (lambda - theta)); domain theta < lambda.
  static SymbolicFunction exponential_arrival_rho(double lambda);
  // (1/d) ln M - (1/theta) ln(1 - theta/d); domain theta < d.
  static SymbolicFunction ebb_sigma(double prefactor, double decay);
  // (mu/theta) (nu/(nu - theta) - 1); domain theta < nu.
  static SymbolicFunction poisson_rho(double mu, double nu);
  // (1/theta) ln cosh(theta * B); domain theta < max_theta.
  static SymbolicFunction token_bucket_sigma(double bucket_sum, double max_theta);

  double evaluate(const ParamAssignment& a) const;
  EvalOutcome try_evaluate(const ParamAssignment& a) const noexcept;

  std::set<HoelderId> parameter_ids() const;

  // Supremum of theta admitted by the atom domains, after undoing the
  // Hoelder scalings on the way to each atom.
  double max_theta(const ParamAssignment& a) const;

  // Same, with the scale factor of every Hoelder node supplied by `scale`.
  using ScaleFn = std::function<double(HoelderId, HoelderRole)>;
  double max_theta(const ScaleFn& scale) const;

  // Human-readable rendering, e.g. "(const(2) + exp_rho(0.5))".
  std::string to_string() const;

  // Identity of the underlying tree node. Trees are shared, never copied.
  bool same_tree(const SymbolicFunction& other) const noexcept {
    return node_ == other.node_;
  }

 private:
  explicit SymbolicFunction(std::shared_ptr<const detail::Node> node);

  std::shared_ptr<const detail::Node> node_;

  friend struct SymbolicAccess;
  friend SymbolicFunction sum(const SymbolicFunction&, const SymbolicFunction&);
  friend SymbolicFunction maximum(const SymbolicFunction&, const SymbolicFunction&);
  friend SymbolicFunction negate(const SymbolicFunction&);
  friend SymbolicFunction hoelder_scale(const SymbolicFunction&, HoelderId, HoelderRole);
  friend SymbolicFunction convolution_sigma(const SymbolicFunction&, const SymbolicFunction&,
                                            const SymbolicFunction&, const SymbolicFunction&);
  friend SymbolicFunction deconvolution_sigma(const SymbolicFunction&, const SymbolicFunction&,
                                              const SymbolicFunction&, const SymbolicFunction&);
};

SymbolicFunction sum(const SymbolicFunction& f, const SymbolicFunction& g);
SymbolicFunction maximum(const SymbolicFunction& f, const SymbolicFunction& g);
SymbolicFunction negate(const SymbolicFunction& f);
SymbolicFunction hoelder_scale(const SymbolicFunction& f, HoelderId h, HoelderRole role);

// sigma_1 + sigma_2 - (1/theta) ln(1 - exp(-theta |rho_1 - rho_2|)).
// Fails with EqualRatesDegenerate when rho_1 == rho_2 at the evaluation point.
SymbolicFunction convolution_sigma(const SymbolicFunction& sigma1, const SymbolicFunction& sigma2,
                                   const SymbolicFunction& rho1, const SymbolicFunction& rho2);

// sigma_A + sigma_U - (1/theta) ln(1 - exp(theta (rho_A + rho_U))).
// Fails with StabilityViolated when rho_A + rho_U >= 0 at the evaluation point.
SymbolicFunction deconvolution_sigma(const SymbolicFunction& sigma_a, const SymbolicFunction& sigma_u,
                                     const SymbolicFunction& rho_a, const SymbolicFunction& rho_u);

}  // namespace snc
