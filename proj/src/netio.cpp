#include "snc/netio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace snc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

double parse_real(std::string_view token, int line) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::BadNumber, "'" + std::string(token) + "' is not a number", line);
  }
  return value;
}

std::vector<double> parse_reals(const std::vector<std::string_view>& fields, std::size_t from, int line) {
  std::vector<double> out;
  for (std::size_t i = from; i < fields.size(); ++i) out.push_back(parse_real(fields[i], line));
  return out;
}

void require_name(std::string_view name, int line) {
  if (name.empty()) throw Error(ErrorCode::SyntaxError, "missing name", line);
  if (name.find_first_of(" \t:") != std::string_view::npos) {
    throw Error(ErrorCode::SyntaxError, "invalid name '" + std::string(name) + "'", line);
  }
}

void require_arity(std::size_t got, std::size_t min, std::size_t max, std::string_view tag, int line) {
  if (got < min || got > max) {
    throw Error(ErrorCode::ArityMismatch,
                std::string(tag) + " takes " + std::to_string(min) +
                    (max != min ? "-" + std::to_string(max) : std::string()) + " parameter(s), got " +
                    std::to_string(got),
                line);
  }
}

InterfaceRecord parse_interface(std::string_view body, int line, const ParseOptions& options) {
  const auto fields = split_fields(body);
  if (fields.size() < 3) throw Error(ErrorCode::ArityMismatch, "interface line needs name, scheduling and type", line);
  InterfaceRecord rec;
  rec.line = line;
  require_name(fields[0], line);
  rec.name = fields[0];
  rec.scheduling = fields[1];
  rec.service_type = fields[2];
  if (rec.scheduling != "FIFO") {
    throw Error(ErrorCode::UnknownTag, "unknown scheduling policy '" + rec.scheduling + "'", line);
  }
  if (rec.service_type != "CR" && (rec.service_type != "CRS" || options.strict)) {
    throw Error(ErrorCode::UnknownTag, "unknown service type '" + rec.service_type + "'", line);
  }
  require_arity(fields.size() - 3, 1, 1, rec.service_type, line);
  rec.params = parse_reals(fields, 3, line);
  return rec;
}

FlowRecord parse_flow(std::string_view body, int line) {
  const auto fields = split_fields(body);
  if (fields.size() < 3) throw Error(ErrorCode::ArityMismatch, "flow line needs name, hop count and route", line);
  FlowRecord rec;
  rec.line = line;
  require_name(fields[0], line);
  rec.name = fields[0];

  int hop_count = 0;
  {
    const auto token = fields[1];
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, hop_count);
    if (token.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::BadNumber, "hop count '" + std::string(token) + "' is not an integer", line);
    }
  }
  if (hop_count < 1) throw Error(ErrorCode::ArityMismatch, "flow needs at least one hop", line);
  const auto hops = static_cast<std::size_t>(hop_count);
  if (fields.size() < 2 + hops + 1) {
    throw Error(ErrorCode::ArityMismatch, "flow line lists fewer hops than its count of " +
                                              std::to_string(hop_count), line);
  }

  for (std::size_t i = 0; i < hops; ++i) {
    const auto token = fields[2 + i];
    const auto colon = token.rfind(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ArityMismatch, "expected <vertex>:<priority> for hop " + std::to_string(i + 1) +
                                                ", got '" + std::string(token) + "'", line);
    }
    HopRecord hop;
    const auto name = trim(token.substr(0, colon));
    require_name(name, line);
    hop.vertex = name;
    const auto prio = trim(token.substr(colon + 1));
    const auto* end = prio.data() + prio.size();
    const auto [ptr, ec] = std::from_chars(prio.data(), end, hop.priority);
    if (prio.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::PriorityNotNatural, "priority '" + std::string(prio) + "' is not a natural number", line);
    }
    rec.hops.push_back(std::move(hop));
  }

  rec.arrival_type = fields[2 + hops];
  if (rec.arrival_type.find(':') != std::string::npos) {
    throw Error(ErrorCode::ArityMismatch, "flow line lists more hops than its count of " +
                                              std::to_string(hop_count), line);
  }
  const std::size_t nparams = fields.size() - (3 + hops);
  if (rec.arrival_type == "CONSTANT" || rec.arrival_type == "EXPONENTIAL") {
    require_arity(nparams, 1, 1, rec.arrival_type, line);
  } else if (rec.arrival_type == "EBB") {
    require_arity(nparams, 3, 3, rec.arrival_type, line);
  } else if (rec.arrival_type == "STATIONARYTB") {
    require_arity(nparams, 2, 3, rec.arrival_type, line);
  } else {
    throw Error(ErrorCode::UnknownTag, "unknown arrival type '" + rec.arrival_type + "'", line);
  }
  rec.params = parse_reals(fields, 3 + hops, line);
  return rec;
}

// Runs a model factory and attaches the line number to its errors.
template <class F>
auto at_line(int line, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.line()) throw;
    throw Error(e.code(), e.what(), line);
  }
}

Arrival make_arrival(const FlowRecord& rec) {
  const auto& p = rec.params;
  if (rec.arrival_type == "CONSTANT") return constant_rate_arrival(p[0]);
  if (rec.arrival_type == "EXPONENTIAL") {
    if (!(p[0] > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "exponential mean must be positive");
    Arrival a = exponential_arrival(1.0 / p[0]);
    a.origin->params = {p[0]};
    return a;
  }
  if (rec.arrival_type == "EBB") return ebb_arrival(p[0], p[1], p[2]);
  const double rate = p[0];
  const double bucket = p[1];
  std::optional<double> max_theta;
  if (p.size() == 3) max_theta = p[2];
  return stationary_tb_arrival(std::span(&rate, 1), std::span(&bucket, 1), max_theta);
}

std::string number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view arrival_tag(ArrivalModel model) {
  switch (model) {
    case ArrivalModel::Constant: return "CONSTANT";
    case ArrivalModel::Exponential: return "EXPONENTIAL";
    case ArrivalModel::Ebb: return "EBB";
    case ArrivalModel::StationaryTokenBucket: return "STATIONARYTB";
    case ArrivalModel::Poisson: break;
  }
  return {};
}

[[noreturn]] void unsupported(const std::string& why) {
  throw Error(ErrorCode::UnsupportedNetwork, "cannot save network: " + why);
}

bool savable_name(const std::string& name) {
  return !name.empty() && name.find_first_of(" \t,:#") == std::string::npos;
}

}  // namespace

NetworkDocument parse_document(std::string_view text, const ParseOptions& options) {
  enum class Section { Interfaces, Flows, Done };
  Section section = Section::Interfaces;
  NetworkDocument doc;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const bool is_interface = line.size() > 1 && line[0] == 'I' && (line[1] == ' ' || line[1] == '\t');
    const bool is_flow = line.size() > 1 && line[0] == 'F' && (line[1] == ' ' || line[1] == '\t');
    switch (section) {
      case Section::Interfaces:
        if (line == "EOI") {
          section = Section::Flows;
        } else if (is_interface) {
          doc.interfaces.push_back(parse_interface(line.substr(2), line_no, options));
        } else {
          throw Error(ErrorCode::SyntaxError, "expected an interface line or EOI", line_no);
        }
        break;
      case Section::Flows:
        if (line == "EOF") {
          section = Section::Done;
        } else if (is_flow) {
          doc.flows.push_back(parse_flow(line.substr(2), line_no));
        } else {
          throw Error(ErrorCode::SyntaxError, "expected a flow line or EOF", line_no);
        }
        break;
      case Section::Done:
        throw Error(ErrorCode::SyntaxError, "content after EOF", line_no);
    }
  }
  if (section != Section::Done) {
    throw Error(ErrorCode::MissingTerminator,
                section == Section::Interfaces ? "missing EOI" : "missing EOF", std::max(line_no, 1));
  }
  return doc;
}

Network build_network(const NetworkDocument& doc) {
  Network net;
  for (const auto& rec : doc.interfaces) {
    at_line(rec.line, [&] {
      Service service = rec.service_type == "CRS" ? shifted_constant_rate_service(rec.params[0])
                                                  : constant_rate_service(rec.params[0]);
      return net.add_vertex(rec.name, std::move(service));
    });
  }
  for (const auto& rec : doc.flows) {
    at_line(rec.line, [&] {
      std::vector<VertexId> path;
      std::vector<Priority> priorities;
      for (const auto& hop : rec.hops) {
        path.push_back(net.vertex_id(hop.vertex));
        priorities.push_back(hop.priority);
      }
      return net.add_flow(rec.name, std::move(path), std::move(priorities), make_arrival(rec));
    });
  }
  return net;
}

Network parse_network(std::string_view text, const ParseOptions& options) {
  return build_network(parse_document(text, options));
}

Network load_network(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_network(text.str(), options);
}

std::string serialize_network(const Network& net) {
  if (!net.hoelders().empty()) unsupported("it holds Hoelder parameters");
  std::ostringstream out;
  for (const auto& [id, vertex] : net.vertices()) {
    const Service& s = vertex.service;
    if (!vertex.served.empty() || !s.origin) unsupported("vertex '" + vertex.name + "' holds a derived service");
    if (!s.dep_flows.empty() || s.dep_services != std::set<VertexId>{id}) {
      unsupported("vertex '" + vertex.name + "' has declared dependencies");
    }
    if (!savable_name(vertex.name)) unsupported("vertex name '" + vertex.name + "' cannot be written");
    out << "I " << vertex.name << ", FIFO, "
        << (s.origin->model == ServiceModel::ShiftedConstantRate ? "CRS" : "CR") << ", "
        << number(s.origin->rate) << '\n';
  }
  out << "EOI\n";
  for (const auto& [id, flow] : net.flows()) {
    if (flow.established_arrivals != 1) unsupported("flow '" + flow.name + "' holds derived bounds");
    const Arrival& a = *flow.arrivals[0];
    if (!a.origin || a.origin->model == ArrivalModel::Poisson) {
      unsupported("flow '" + flow.name + "' has no file representation");
    }
    if (a.dep_flows != std::set<FlowId>{id} || !a.dep_services.empty()) {
      unsupported("flow '" + flow.name + "' has declared dependencies");
    }
    if (!savable_name(flow.name)) unsupported("flow name '" + flow.name + "' cannot be written");
    out << "F " << flow.name << ", " << flow.path.size();
    for (std::size_t hop = 0; hop < flow.path.size(); ++hop) {
      out << ", " << net.vertex(flow.path[hop]).name << ':' << flow.priorities[hop];
    }
    out << ", " << arrival_tag(a.origin->model);
    for (double p : a.origin->params) out << ", " << number(p);
    out << '\n';
  }
  out << "EOF\n";
  return out.str();
}

bool structurally_equal(const Network& a, const Network& b) {
  if (a.vertices().size() != b.vertices().size() || a.flows().size() != b.flows().size()) return false;
  for (const auto& [id, va] : a.vertices()) {
    const auto it = b.vertices().find(id);
    if (it == b.vertices().end()) return false;
    const Vertex& vb = it->second;
    if (va.name != vb.name || va.service.origin != vb.service.origin) return false;
  }
  for (const auto& [id, fa] : a.flows()) {
    const auto it = b.flows().find(id);
    if (it == b.flows().end()) return false;
    const Flow& fb = it->second;
    if (fa.name != fb.name || fa.path != fb.path || fa.priorities != fb.priorities) return false;
    if (fa.arrivals[0]->origin != fb.arrivals[0]->origin) return false;
  }
  return true;
}

}  // namespace snc
