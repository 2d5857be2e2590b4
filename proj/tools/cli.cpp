#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>

#include "snc/analysis.hpp"
#include "snc/netio.hpp"
#include "snc/optimize.hpp"
#include "snc/simulation.hpp"

namespace snc::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyzeArgs {
  std::string file;
  std::string flow;
  std::string vertex;
  std::string path;
  std::string crossflow;
  std::string analysis = "simple";
  std::string bound = "delay";
  std::optional<double> value;
  std::optional<double> epsilon;
  double granularity = 0.01;
  std::optional<double> theta_max;
  double hoelder_granularity = 0.1;
  double p_max = 32.0;
  std::string sweep;
  std::string format = "human";
  bool strict = false;
};

struct SimulateArgs {
  std::string file;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t warmup = 10'000;
  bool strict = false;
};

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    std::string part = s.substr(start, at == std::string::npos ? std::string::npos : at - start);
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    out.push_back(part);
    if (at == std::string::npos) return out;
    start = at + 1;
  }
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
  return v;
}

std::vector<double> sweep_points(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--sweep expects start:stop:step");
  const double start = parse_double(parts[0], "--sweep");
  const double stop = parse_double(parts[1], "--sweep");
  const double step = parse_double(parts[2], "--sweep");
  if (!(step > 0.0) || !(start <= stop)) throw UsageError("--sweep needs start <= stop and step > 0");
  std::vector<double> points;
  for (std::size_t k = 0;; ++k) {
    const double x = start + static_cast<double>(k) * step;
    if (x > stop + 1e-9 * step) break;
    points.push_back(x);
  }
  return points;
}

unsigned threads_from_env() {
  const char* env = std::getenv("SNC_THREADS");
  if (!env || !*env) return 0;
  unsigned n = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("SNC_THREADS must be a count");
  return n;
}

struct Job {
  Network pristine;
  FlowId flow;
  std::string analysis;
  BoundKind kind;
  QueryKind query;
  std::optional<VertexId> vertex;
  std::vector<VertexId> path;
  std::optional<FlowId> crossflow;
};

PerformanceBound analyze(const Job& job) {
  Network net = job.pristine;
  if (job.analysis == "simple") return simple_analysis(net, {job.flow, *job.vertex, job.kind});
  if (job.analysis == "end2end") return path_analysis(net, job.flow, job.path);
  return ladder_end_to_end(net, job.flow, *job.crossflow, job.path);
}

Job prepare(const AnalyzeArgs& args) {
  Job job{load_network(args.file, {args.strict}), 0, args.analysis, BoundKind::Delay, QueryKind::Forward, {}, {}, {}};
  job.flow = job.pristine.flow_id(args.flow);
  job.kind = args.bound.ends_with("backlog") ? BoundKind::Backlog : BoundKind::Delay;
  job.query = args.bound.starts_with("inverse") ? QueryKind::Inverse : QueryKind::Forward;

  if (args.analysis == "simple") {
    if (args.vertex.empty()) throw UsageError("--analysis simple needs --vertex");
    job.vertex = job.pristine.vertex_id(args.vertex);
  } else {
    if (job.kind == BoundKind::Backlog) throw UsageError("--analysis " + args.analysis + " bounds delays only");
    if (args.path.empty()) {
      job.path = job.pristine.flow(job.flow).path;
    } else {
      for (const auto& name : split(args.path, ',')) job.path.push_back(job.pristine.vertex_id(name));
    }
    if (args.analysis == "ladder") {
      if (args.crossflow.empty()) throw UsageError("--analysis ladder needs --crossflow");
      job.crossflow = job.pristine.flow_id(args.crossflow);
    }
  }
  return job;
}

void print_human(std::ostream& out, const AnalyzeArgs& args, const BoundQuery& q, const OptimizationResult& r) {
  const bool backlog = q.bound.kind == BoundKind::Backlog;
  std::string line;
  if (q.kind == QueryKind::Forward) {
    line = std::string(backlog ? "P(backlog > " : "P(delay > ") + fixed6(q.given) + ") <= ";
    line += r.value > 1.0 ? "1 (" + fixed6(r.value) + ")" : fixed6(r.value);
  } else {
    line = std::string(backlog ? "backlog bound " : "delay bound ") + fixed6(r.value) + " at epsilon " +
           fixed6(q.given);
  }
  line += "; flow " + args.flow + ", " + args.analysis;
  if (!args.vertex.empty() && args.analysis == "simple") line += " at " + args.vertex;
  line += "; theta " + fixed6(r.argmin.theta);
  for (const auto& [id, p] : r.argmin.hoelder_values) line += ", p" + std::to_string(id) + " " + fixed6(p);
  line += "; feasible " + std::to_string(r.feasible_points) + "/" + std::to_string(r.evaluated_points);
  out << line << '\n';
}

int analyze_command(const AnalyzeArgs& args, std::ostream& out) {
  if (args.flow.empty()) throw UsageError("--flow is required");
  const bool inverse = args.bound.starts_with("inverse");
  if (inverse && args.value) throw UsageError("inverse bounds take --epsilon, not --value");
  if (!inverse && args.epsilon) throw UsageError("forward bounds take --value, not --epsilon");

  std::vector<double> givens;
  if (!args.sweep.empty()) {
    if (args.value || args.epsilon) throw UsageError("--sweep replaces --value and --epsilon");
    givens = sweep_points(args.sweep);
  } else if (inverse) {
    if (!args.epsilon) throw UsageError("--epsilon is required for " + args.bound);
    givens.push_back(*args.epsilon);
  } else {
    if (!args.value) throw UsageError("--value is required for " + args.bound);
    givens.push_back(*args.value);
  }

  const Job job = prepare(args);
  GridOptions options;
  options.theta_granularity = args.granularity;
  options.theta_max = args.theta_max;
  options.hoelder_granularity = args.hoelder_granularity;
  options.p_max = args.p_max;
  options.threads = threads_from_env();

  const bool csv = args.format == "csv";
  bool header = false;
  for (double given : givens) {
    BoundQuery q{analyze(job), job.query, given};
    const OptimizationResult r = grid_search_minimize(q, options);
    if (!csv) {
      print_human(out, args, q, r);
      continue;
    }
    if (!header) {
      out << "value,bound,theta";
      for (const auto& [id, p] : r.argmin.hoelder_values) out << ",hoelder_" << id;
      out << '\n';
      header = true;
    }
    out << shortest(given) << ',' << shortest(r.value) << ',' << shortest(r.argmin.theta);
    for (const auto& [id, p] : r.argmin.hoelder_values) out << ',' << shortest(p);
    out << '\n';
  }
  return 0;
}

int simulate_command(const SimulateArgs& args, std::ostream& out) {
  const Network net = load_network(args.file, {args.strict});
  SimConfig cfg = sim_config_from_network(net);
  cfg.horizon = args.horizon;
  cfg.warmup = args.warmup;
  cfg.seed = args.seed;
  const SimReport report = simulate(cfg);

  static constexpr double kThresholds[] = {0, 1, 2, 5, 10, 20, 50};
  out << "probe,samples,mean_backlog,mean_delay";
  for (double t : kThresholds) out << ",P(d>" << t << ")";
  out << '\n';
  for (const ProbeReport& p : report.probes) {
    out << p.name << ',' << p.samples << ',' << fixed6(p.mean_backlog()) << ',' << fixed6(p.mean_delay());
    for (double t : kThresholds) out << ',' << fixed6(p.delay_exceedance(t));
    out << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic network calculus bounds for feedforward networks", "snc"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Optimize a backlog or delay bound");
  analyze->add_option("--file", an.file, "Network file")->required();
  analyze->add_option("--flow", an.flow, "Flow of interest");
  analyze->add_option("--vertex", an.vertex, "Vertex of interest (simple analysis)");
  analyze->add_option("--path", an.path, "Comma-separated vertices (default: the whole route)");
  analyze->add_option("--crossflow", an.crossflow, "Prioritized crossflow (ladder analysis)");
  analyze->add_option("--analysis", an.analysis, "Analysis")
      ->check(CLI::IsMember({"simple", "end2end", "ladder"}))
      ->capture_default_str();
  analyze->add_option("--bound", an.bound, "Bound")
      ->check(CLI::IsMember({"backlog", "delay", "inverse-backlog", "inverse-delay"}))
      ->capture_default_str();
  analyze->add_option("--value", an.value, "Backlog N or delay T of a forward bound");
  analyze->add_option("--epsilon", an.epsilon, "Violation probability of an inverse bound");
  analyze->add_option("--granularity", an.granularity, "Theta grid step")->capture_default_str();
  analyze->add_option("--theta-max", an.theta_max, "Largest theta (default: from the model domains)");
  analyze->add_option("--hoelder-granularity", an.hoelder_granularity, "Hoelder grid step")
      ->capture_default_str();
  analyze->add_option("--p-max", an.p_max, "Largest Hoelder exponent p")->capture_default_str();
  analyze->add_option("--sweep", an.sweep, "start:stop:step over the value or epsilon");
  analyze->add_option("--format", an.format, "Output format")
      ->check(CLI::IsMember({"human", "csv"}))
      ->capture_default_str();
  analyze->add_flag("--strict", an.strict, "Reject format extensions");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo tail estimates for a network file");
  simulate->add_option("--file", sim.file, "Network file")->required();
  simulate->add_option("--horizon", sim.horizon, "Simulated slots")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--warmup", sim.warmup, "Discarded initial slots")->capture_default_str();
  simulate->add_flag("--strict", sim.strict, "Reject format extensions");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (*analyze) return analyze_command(an, out);
    return simulate_command(sim, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const Error& e) {
    err << error_name(e.code()) << ": " << e.what() << '\n';
    return kErrorExitBase + static_cast<int>(e.code());
  }
}

}  // namespace snc::cli
