#include <doctest.h>

#include <cmath>
#include <string>

#include "snc/netio.hpp"

using namespace snc;

namespace {

const std::string kSample = R"(# Configuration of a simple network
# Interface configuration. Unit: Mbps
I v1, FIFO, CR, 1
I v2, FIFO, CR, 3
I v3, FIFO, CR, 4

EOI
# Traffic configuration. Unit Mbps or Mb
# One flow with the route v1->v2->v3
F F1, 3, v1:1, v2:1, v3:2, EXPONENTIAL, 2
EOF
)";

struct Rejection {
  ErrorCode code;
  int line;
};

Rejection rejection(const std::string& text) {
  try {
    parse_network(text);
  } catch (const Error& e) {
    return {e.code(), e.line().value_or(-1)};
  }
  FAIL("document was accepted:\n" << text);
  return {ErrorCode::InvalidArgument, 0};
}

}  // namespace

TEST_CASE("sample document") {
  const Network net = parse_network(kSample);
  REQUIRE(net.vertices().size() == 3);
  const double rates[] = {1, 3, 4};
  int i = 0;
  for (const auto& [id, v] : net.vertices()) {
    CHECK(v.name == "v" + std::to_string(i + 1));
    CHECK(v.service.origin->model == ServiceModel::ConstantRate);
    CHECK(v.service.origin->rate == rates[i]);
    CHECK(v.service.rho.evaluate({0.1, {}}) == -rates[i]);
    ++i;
  }
  REQUIRE(net.flows().size() == 1);
  const Flow& f = net.flow(net.flow_id("F1"));
  CHECK(f.path == std::vector<VertexId>{net.vertex_id("v1"), net.vertex_id("v2"), net.vertex_id("v3")});
  CHECK(f.priorities == std::vector<Priority>{1, 1, 2});
  CHECK(f.arrivals[0]->origin->model == ArrivalModel::Exponential);
  CHECK(f.arrivals[0]->origin->params == std::vector<double>{2.0});
  // Mean 2 is lambda 0.5.
  CHECK(f.arrivals[0]->rho.evaluate({0.25, {}}) == doctest::Approx(4 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("round trip") {
  const Network net = parse_network(kSample);
  const std::string text = serialize_network(net);
  CHECK(text ==
        "I v1, FIFO, CR, 1\nI v2, FIFO, CR, 3\nI v3, FIFO, CR, 4\nEOI\n"
        "F F1, 3, v1:1, v2:1, v3:2, EXPONENTIAL, 2\nEOF\n");
  CHECK(structurally_equal(parse_network(text), net));
  CHECK(serialize_network(parse_network(text)) == text);

  const std::string rich =
      "I a, FIFO, CRS, 8.5\nI b,FIFO,CR,0.1\nEOI\n"
      "F x, 2, a:0, b:7, CONSTANT, 1.25\n"
      "F y, 1, b:3, EBB, 1, 2, 3\n"
      "F z, 1, a:1, STATIONARYTB, 1, 2\n"
      "F w, 1, a:2, STATIONARYTB, 1, 2, 0.75\n"
      "F u, 1, b:0, EXPONENTIAL, 0.3\n"
      "EOF\n";
  const Network r = parse_network(rich);
  CHECK(r.vertex(1).service.origin->model == ServiceModel::ShiftedConstantRate);
  CHECK(r.vertex(1).service.sigma.evaluate({0.2, {}}) == -8.5);
  const Network again = parse_network(serialize_network(r));
  CHECK(structurally_equal(again, r));
  CHECK(serialize_network(again) == serialize_network(r));
  CHECK(r.flow(4).arrivals[0]->sigma.try_evaluate({0.75, {}}).error == ErrorCode::ThetaOutOfDomain);
}

TEST_CASE("structural equality sees differences") {
  const Network a = parse_network(kSample);
  std::string other = kSample;
  other.replace(other.find("v3:2"), 4, "v3:3");
  CHECK_FALSE(structurally_equal(a, parse_network(other)));
  std::string mean = kSample;
  mean.replace(mean.find("EXPONENTIAL, 2"), 14, "EXPONENTIAL, 3");
  CHECK_FALSE(structurally_equal(a, parse_network(mean)));
}

TEST_CASE("empty and whitespace-tolerant documents") {
  const Network empty = parse_network("EOI\nEOF\n");
  CHECK(empty.vertices().empty());
  CHECK(empty.flows().empty());
  CHECK(serialize_network(empty) == "EOI\nEOF\n");
  CHECK(serialize_network(Network{}) == "EOI\nEOF\n");

  const Network crlf = parse_network("I  a ,FIFO,  CR ,2   \r\n\r\nEOI\r\nF f,1,a:1,CONSTANT,1\t\r\nEOF\r\n");
  CHECK(crlf.vertex(1).name == "a");
  CHECK(crlf.flow(1).name == "f");
  CHECK(parse_network("EOI\nEOF").vertices().empty());
}

TEST_CASE("malformed documents name the offending line") {
  const Rejection cases[] = {
      rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v9:1, CONSTANT, 1\nEOF\n"),             // unknown vertex
      rejection("I v1, FIFO, CR, 1\nI v1, FIFO, CR, 2\nEOI\nEOF\n"),                    // duplicate vertex
      rejection("I v1, WFQ, CR, 1\nEOI\nEOF\n"),                                         // scheduling
      rejection("I v1, FIFO, CR, 1\nEOI\n\nF f, 1, v1:1, PARETO, 1\nEOF\n"),            // arrival type
      rejection("I v1, FIFO, CR, 1, 2\nEOI\nEOF\n"),                                     // service arity
      rejection("I v1, FIFO, CR, 1\nEOI\nF f, 2, v1:1, CONSTANT, 1\nEOF\n"),            // hop count
      rejection("I v1, FIFO, CR, fast\nEOI\nEOF\n"),                                     // number
      rejection("I v1, FIFO, CR, 1\nEOI\n# c\nF f, 1, v1:-1, CONSTANT, 1\nEOF\n"),      // priority
      rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:1, CONSTANT, 1\n"),                 // missing EOF
      rejection("I v1, FIFO, CR, 1\nF f, 1, v1:1, CONSTANT, 1\nEOI\nEOF\n"),            // flow before EOI
  };
  const Rejection expected[] = {
      {ErrorCode::UnknownVertex, 3},  {ErrorCode::DuplicateName, 2},     {ErrorCode::UnknownTag, 1},
      {ErrorCode::UnknownTag, 4},     {ErrorCode::ArityMismatch, 1},     {ErrorCode::ArityMismatch, 3},
      {ErrorCode::BadNumber, 1},      {ErrorCode::PriorityNotNatural, 4}, {ErrorCode::MissingTerminator, 3},
      {ErrorCode::SyntaxError, 2},
  };
  for (std::size_t i = 0; i < std::size(cases); ++i) {
    CAPTURE(i);
    CHECK(cases[i].code == expected[i].code);
    CHECK(cases[i].line == expected[i].line);
  }
}

TEST_CASE("further grammar violations") {
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nEOF\nI v2, FIFO, CR, 1\n").code == ErrorCode::SyntaxError);
  CHECK(rejection("I v1, FIFO, CR, 1\n").code == ErrorCode::MissingTerminator);
  CHECK(rejection("").code == ErrorCode::MissingTerminator);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1.5, v1:1, CONSTANT, 1\nEOF\n").code == ErrorCode::BadNumber);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1, CONSTANT, 1\nEOF\n").code == ErrorCode::ArityMismatch);
  CHECK(rejection("I v1, FIFO, CR, 1\nI v2, FIFO, CR, 1\nEOI\nF f, 1, v1:1, v2:1, CONSTANT, 1\nEOF\n").code ==
        ErrorCode::ArityMismatch);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:x, CONSTANT, 1\nEOF\n").code == ErrorCode::PriorityNotNatural);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:1, EBB, 1, 2\nEOF\n").code == ErrorCode::ArityMismatch);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:1, CONSTANT, 1\nF f, 1, v1:2, CONSTANT, 1\nEOF\n").line == 4);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:1, CONSTANT, -2\nEOF\n").code == ErrorCode::NegativeRate);
  CHECK(rejection("I v1, FIFO, CR, 0\nEOI\nEOF\n").code == ErrorCode::NonPositiveParameter);
  CHECK(rejection("I v1, FIFO, CR, 1\nEOI\nF f, 1, v1:1, EXPONENTIAL, 0\nEOF\n").line == 3);
  CHECK(rejection("I v1 v2, FIFO, CR, 1\nEOI\nEOF\n").code == ErrorCode::SyntaxError);
  CHECK(rejection("X v1, FIFO, CR, 1\nEOI\nEOF\n").code == ErrorCode::SyntaxError);
}

TEST_CASE("strict parsing rejects the shifted service") {
  const std::string text = "I a, FIFO, CRS, 8\nEOI\nEOF\n";
  CHECK_NOTHROW(parse_network(text));
  try {
    parse_network(text, {.strict = true});
    FAIL("strict parse accepted CRS");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownTag);
    CHECK(e.line() == 1);
  }
}

TEST_CASE("only pristine networks can be saved") {
  Network net = parse_network(kSample);
  net.compute_leftover(net.vertex_id("v1"));
  CHECK_THROWS_AS(serialize_network(net), Error);
  try {
    serialize_network(net);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedNetwork);
  }

  Network dep = parse_network("I a, FIFO, CR, 4\nEOI\nF x, 1, a:1, CONSTANT, 1\nF y, 1, a:2, CONSTANT, 1\nEOF\n");
  const std::vector<ObjectRef> refs{ObjectRef::flow(1), ObjectRef::flow(2)};
  dep.declare_dependency(refs);
  CHECK_THROWS_AS(serialize_network(dep), Error);

  Network poisson;
  const VertexId a = poisson.add_vertex("a", constant_rate_service(4));
  poisson.add_flow("p", {a}, {1}, poisson_arrival(1, 2));
  CHECK_THROWS_AS(serialize_network(poisson), Error);
}

TEST_CASE("load from disk") {
  const Network net = load_network(std::string(SNC_TEST_DATA) + "/sample.snc");
  CHECK(structurally_equal(net, parse_network(kSample)));
  CHECK_THROWS_AS(load_network(std::string(SNC_TEST_DATA) + "/missing.snc"), Error);
}
