#include "snc/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <variant>
#include <vector>

namespace snc {

namespace detail {

struct Constant {
  double c;
};
struct ExponentialRho {
  double lambda;
};
struct EbbSigma {
  double prefactor;
  double decay;
};
struct PoissonRho {
  double mu;
  double nu;
};
struct TokenBucketSigma {
  double bucket_sum;
  double max_theta;
};
struct Sum {
  SymbolicFunction f, g;
};
struct Max {
  SymbolicFunction f, g;
};
struct Negate {
  SymbolicFunction f;
};
struct HoelderScale {
  SymbolicFunction f;
  HoelderId id;
  HoelderRole role;
};
struct ConvolutionSigma {
  SymbolicFunction sigma1, sigma2, rho1, rho2;
};
struct DeconvolutionSigma {
  SymbolicFunction sigma_a, sigma_u, rho_a, rho_u;
};

struct Node {
  std::variant<Constant, ExponentialRho, EbbSigma, PoissonRho, TokenBucketSigma, Sum, Max, Negate,
               HoelderScale, ConvolutionSigma, DeconvolutionSigma>
      payload;
  // Sorted, unique ids of all Hoelder parameters in this subtree.
  std::vector<HoelderId> ids;
};

}  // namespace detail

// Lets the helpers below reach the node of a SymbolicFunction.
struct SymbolicAccess {
  static const detail::Node& node(const SymbolicFunction& f) { return *f.node_; }
};

namespace {

using detail::Node;
using HoelderMap = std::map<HoelderId, double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<HoelderId> merge_ids(std::initializer_list<const std::vector<HoelderId>*> parts) {
  std::vector<HoelderId> out;
  for (const auto* part : parts) {
    std::vector<HoelderId> merged;
    std::set_union(out.begin(), out.end(), part->begin(), part->end(), std::back_inserter(merged));
    out.swap(merged);
  }
  return out;
}

// ln cosh(x) without overflow for large |x|.
double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// Scale factor of a Hoelder node for an assignment; reports lookup errors.
bool hoelder_factor(const HoelderMap& values, HoelderId id, HoelderRole role, double& factor,
                    ErrorCode& err) {
  const auto it = values.find(id);
  if (it == values.end()) {
    err = ErrorCode::MissingHoelderAssignment;
    return false;
  }
  const double p = it->second;
  if (!(p > 1.0) || !std::isfinite(p)) {
    err = ErrorCode::InvalidHoelderValue;
    return false;
  }
  factor = role == HoelderRole::P ? p : conjugate(p);
  return true;
}

// -(1/theta) ln(1 - exp(x)) for x < 0.
double neg_log_one_minus_exp(double theta, double x) {
  return -std::log(-std::expm1(x)) / theta;
}

bool eval(const Node& node, double theta, const HoelderMap& values, double& out, ErrorCode& err);

bool eval(const SymbolicFunction& f, double theta, const HoelderMap& values, double& out,
          ErrorCode& err);

bool eval(const Node& node, double theta, const HoelderMap& values, double& out, ErrorCode& err) {
  return std::visit(
      Overloaded{
          [&](const detail::Constant& n) {
            out = n.c;
            return true;
          },
          [&](const detail::ExponentialRho& n) {
            if (theta >= n.lambda) {
              err = ErrorCode::ThetaOutOfDomain;
              return false;
            }
            out = -std::log1p(-theta / n.lambda) / theta;
            return true;
          },
          [&](const detail::EbbSigma& n) {
            if (theta >= n.decay) {
              err = ErrorCode::ThetaOutOfDomain;
              return false;
            }
            out = std::log(n.prefactor) / n.decay - std::log1p(-theta / n.decay) / theta;
            return true;
          },
          [&](const detail::PoissonRho& n) {
            if (theta >= n.nu) {
              err = ErrorCode::ThetaOutOfDomain;
              return false;
            }
            // (mu/theta)(nu/(nu - theta) - 1) simplifies to mu/(nu - theta).
            out = n.mu / (n.nu - theta);
            return true;
          },
          [&](const detail::TokenBucketSigma& n) {
            if (theta >= n.max_theta) {
              err = ErrorCode::ThetaOutOfDomain;
              return false;
            }
            out = log_cosh(theta * n.bucket_sum) / theta;
            return true;
          },
          [&](const detail::Sum& n) {
            double a = 0, b = 0;
            if (!eval(n.f, theta, values, a, err) || !eval(n.g, theta, values, b, err)) return false;
            out = a + b;
            return true;
          },
          [&](const detail::Max& n) {
            double a = 0, b = 0;
            if (!eval(n.f, theta, values, a, err) || !eval(n.g, theta, values, b, err)) return false;
            out = std::max(a, b);
            return true;
          },
          [&](const detail::Negate& n) {
            double a = 0;
            if (!eval(n.f, theta, values, a, err)) return false;
            out = -a;
            return true;
          },
          [&](const detail::HoelderScale& n) {
            double factor = 1.0;
            if (!hoelder_factor(values, n.id, n.role, factor, err)) return false;
            return eval(n.f, factor * theta, values, out, err);
          },
          [&](const detail::ConvolutionSigma& n) {
            double s1 = 0, s2 = 0, r1 = 0, r2 = 0;
            if (!eval(n.sigma1, theta, values, s1, err) || !eval(n.sigma2, theta, values, s2, err) ||
                !eval(n.rho1, theta, values, r1, err) || !eval(n.rho2, theta, values, r2, err)) {
              return false;
            }
            const double gap = std::fabs(r1 - r2);
            if (!(gap > 0.0)) {
              err = ErrorCode::EqualRatesDegenerate;
              return false;
            }
            out = s1 + s2 + neg_log_one_minus_exp(theta, -theta * gap);
            return true;
          },
          [&](const detail::DeconvolutionSigma& n) {
            double sa = 0, su = 0, ra = 0, ru = 0;
            if (!eval(n.sigma_a, theta, values, sa, err) || !eval(n.sigma_u, theta, values, su, err) ||
                !eval(n.rho_a, theta, values, ra, err) || !eval(n.rho_u, theta, values, ru, err)) {
              return false;
            }
            const double slack = ra + ru;
            if (!(slack < 0.0)) {
              err = ErrorCode::StabilityViolated;
              return false;
            }
            out = sa + su + neg_log_one_minus_exp(theta, theta * slack);
            return true;
          },
      },
      node.payload);
}

double limit(const Node& node, const SymbolicFunction::ScaleFn& scale);

double limit(const SymbolicFunction& f, const SymbolicFunction::ScaleFn& scale);

double limit(const Node& node, const SymbolicFunction::ScaleFn& scale) {
  return std::visit(
      Overloaded{
          [](const detail::Constant&) { return kInf; },
          [](const detail::ExponentialRho& n) { return n.lambda; },
          [](const detail::EbbSigma& n) { return n.decay; },
          [](const detail::PoissonRho& n) { return n.nu; },
          [](const detail::TokenBucketSigma& n) { return n.max_theta; },
          [&](const detail::Sum& n) { return std::min(limit(n.f, scale), limit(n.g, scale)); },
          [&](const detail::Max& n) { return std::min(limit(n.f, scale), limit(n.g, scale)); },
          [&](const detail::Negate& n) { return limit(n.f, scale); },
          [&](const detail::HoelderScale& n) { return limit(n.f, scale) / scale(n.id, n.role); },
          [&](const detail::ConvolutionSigma& n) {
            return std::min({limit(n.sigma1, scale), limit(n.sigma2, scale), limit(n.rho1, scale),
                             limit(n.rho2, scale)});
          },
          [&](const detail::DeconvolutionSigma& n) {
            return std::min({limit(n.sigma_a, scale), limit(n.sigma_u, scale),
                             limit(n.rho_a, scale), limit(n.rho_u, scale)});
          },
      },
      node.payload);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string render(const Node& node);

bool eval(const SymbolicFunction& f, double theta, const HoelderMap& values, double& out,
          ErrorCode& err) {
  return eval(SymbolicAccess::node(f), theta, values, out, err);
}

double limit(const SymbolicFunction& f, const SymbolicFunction::ScaleFn& scale) {
  return limit(SymbolicAccess::node(f), scale);
}

std::string render(const SymbolicFunction& f) { return render(SymbolicAccess::node(f)); }

std::string render(const Node& node) {
  return std::visit(
      Overloaded{
          [](const detail::Constant& n) { return "const(" + fmt(n.c) + ")"; },
          [](const detail::ExponentialRho& n) { return "exp_rho(" + fmt(n.lambda) + ")"; },
          [](const detail::EbbSigma& n) {
            return "ebb_sigma(" + fmt(n.prefactor) + ", " + fmt(n.decay) + ")";
          },
          [](const detail::PoissonRho& n) {
            return "poisson_rho(" + fmt(n.mu) + ", " + fmt(n.nu) + ")";
          },
          [](const detail::TokenBucketSigma& n) { return "tb_sigma(" + fmt(n.bucket_sum) + ")"; },
          [](const detail::Sum& n) { return "(" + render(n.f) + " + " + render(n.g) + ")"; },
          [](const detail::Max& n) { return "max(" + render(n.f) + ", " + render(n.g) + ")"; },
          [](const detail::Negate& n) { return "-" + render(n.f); },
          [](const detail::HoelderScale& n) {
            return render(n.f) + "@" + (n.role == HoelderRole::P ? "p" : "q") +
                   std::to_string(n.id);
          },
          [](const detail::ConvolutionSigma& n) {
            return "conv_sigma(" + render(n.sigma1) + ", " + render(n.sigma2) + ", " +
                   render(n.rho1) + ", " + render(n.rho2) + ")";
          },
          [](const detail::DeconvolutionSigma& n) {
            return "deconv_sigma(" + render(n.sigma_a) + ", " + render(n.sigma_u) + ", " +
                   render(n.rho_a) + ", " + render(n.rho_u) + ")";
          },
      },
      node.payload);
}

const std::vector<HoelderId>& ids_of(const SymbolicFunction& f) {
  return SymbolicAccess::node(f).ids;
}

}  // namespace

double conjugate(double p) { return p / (p - 1.0); }

SymbolicFunction::SymbolicFunction(std::shared_ptr<const detail::Node> node)
    : node_(std::move(node)) {}

SymbolicFunction SymbolicFunction::constant(double c) {
  return SymbolicFunction(std::make_shared<const Node>(Node{detail::Constant{c}, {}}));
}

SymbolicFunction SymbolicFunction::exponential_arrival_rho(double lambda) {
  return SymbolicFunction(std::make_shared<const Node>(Node{detail::ExponentialRho{lambda}, {}}));
}

SymbolicFunction SymbolicFunction::ebb_sigma(double prefactor, double decay) {
  return SymbolicFunction(
      std::make_shared<const Node>(Node{detail::EbbSigma{prefactor, decay}, {}}));
}

SymbolicFunction SymbolicFunction::poisson_rho(double mu, double nu) {
  return SymbolicFunction(std::make_shared<const Node>(Node{detail::PoissonRho{mu, nu}, {}}));
}

SymbolicFunction SymbolicFunction::token_bucket_sigma(double bucket_sum, double max_theta) {
  return SymbolicFunction(
      std::make_shared<const Node>(Node{detail::TokenBucketSigma{bucket_sum, max_theta}, {}}));
}

SymbolicFunction sum(const SymbolicFunction& f, const SymbolicFunction& g) {
  return SymbolicFunction(std::make_shared<const Node>(
      Node{detail::Sum{f, g}, merge_ids({&ids_of(f), &ids_of(g)})}));
}

SymbolicFunction maximum(const SymbolicFunction& f, const SymbolicFunction& g) {
  return SymbolicFunction(std::make_shared<const Node>(
      Node{detail::Max{f, g}, merge_ids({&ids_of(f), &ids_of(g)})}));
}

SymbolicFunction negate(const SymbolicFunction& f) {
  return SymbolicFunction(std::make_shared<const Node>(Node{detail::Negate{f}, ids_of(f)}));
}

SymbolicFunction hoelder_scale(const SymbolicFunction& f, HoelderId h, HoelderRole role) {
  const std::vector<HoelderId> own{h};
  return SymbolicFunction(std::make_shared<const Node>(
      Node{detail::HoelderScale{f, h, role}, merge_ids({&ids_of(f), &own})}));
}

SymbolicFunction convolution_sigma(const SymbolicFunction& sigma1, const SymbolicFunction& sigma2,
                                   const SymbolicFunction& rho1, const SymbolicFunction& rho2) {
  return SymbolicFunction(std::make_shared<const Node>(
      Node{detail::ConvolutionSigma{sigma1, sigma2, rho1, rho2},
           merge_ids({&ids_of(sigma1), &ids_of(sigma2), &ids_of(rho1), &ids_of(rho2)})}));
}

SymbolicFunction deconvolution_sigma(const SymbolicFunction& sigma_a, const SymbolicFunction& sigma_u,
                                     const SymbolicFunction& rho_a, const SymbolicFunction& rho_u) {
  return SymbolicFunction(std::make_shared<const Node>(
      Node{detail::DeconvolutionSigma{sigma_a, sigma_u, rho_a, rho_u},
           merge_ids({&ids_of(sigma_a), &ids_of(sigma_u), &ids_of(rho_a), &ids_of(rho_u)})}));
}

EvalOutcome SymbolicFunction::try_evaluate(const ParamAssignment& a) const noexcept {
  EvalOutcome result;
  if (!(a.theta > 0.0) || !std::isfinite(a.theta)) {
    result.error = ErrorCode::ThetaOutOfDomain;
    return result;
  }
  ErrorCode err{};
  double value = 0.0;
  if (!eval(*node_, a.theta, a.hoelder_values, value, err)) {
    result.error = err;
    return result;
  }
  if (std::isnan(value)) {
    result.error = ErrorCode::ThetaOutOfDomain;
    return result;
  }
  result.value = value;
  return result;
}

double SymbolicFunction::evaluate(const ParamAssignment& a) const {
  const EvalOutcome r = try_evaluate(a);
  if (!r.ok()) {
    std::ostringstream msg;
    msg << error_name(*r.error) << " evaluating " << to_string() << " at theta=" << a.theta;
    throw Error(*r.error, msg.str());
  }
  return r.value;
}

std::set<HoelderId> SymbolicFunction::parameter_ids() const {
  return {node_->ids.begin(), node_->ids.end()};
}

double SymbolicFunction::max_theta(const ParamAssignment& a) const {
  return max_theta([&](HoelderId id, HoelderRole role) {
    double factor = 1.0;
    ErrorCode err{};
    if (!hoelder_factor(a.hoelder_values, id, role, factor, err)) {
      throw Error(err, std::string(error_name(err)) + " for Hoelder parameter " +
                           std::to_string(id));
    }
    return factor;
  });
}

double SymbolicFunction::max_theta(const ScaleFn& scale) const { return limit(*node_, scale); }

std::string SymbolicFunction::to_string() const { return render(*node_); }

}  // namespace snc
