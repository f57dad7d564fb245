// Progress-trace serialization: deterministic float formatting, CSV
// round-trips with NaN fields left empty, the always-empty wallclock column,
// parse diagnostics, and the JSON mirror.
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "catalyst/errors.hpp"
#include "catalyst/trace.hpp"

using namespace catalyst;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

RunTrace sample_trace() {
  RunTrace t;
  t.set_meta("method", "saga");
  t.set_meta("seed", "7");
  TraceRow r0;
  r0.cost = 0.0;
  r0.epoch = 0.0;
  r0.objective = 0.6931471805599453;
  r0.certificate = kNan;
  r0.envelope = kNan;
  r0.wallclock_ns = 12345;  // must never reach the serialized form
  t.add(r0);
  TraceRow r1;
  r1.cost = 50.0;
  r1.epoch = 1.0;
  r1.objective = 0.1;
  r1.certificate = 1e-3;
  r1.envelope = 0.25;
  t.add(r1);
  return t;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("format_double: 17 significant digits, nan spelled uniformly") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(kNan) == "nan");
  CHECK(format_double(-kNan) == "nan");
  // Round-trip exactness through the printed form.
  for (double v : {0.6931471805599453, 1e-300, -3.141592653589793, 1234.5678e-9}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("CSV write: metadata comments, header, empty NaN and wallclock fields") {
  std::ostringstream out;
  sample_trace().write_csv(out);
  const std::string text = out.str();
  CHECK(text.find("# method=saga\n") != std::string::npos);
  CHECK(text.find("# seed=7\n") != std::string::npos);
  CHECK(text.find("cost,epoch,objective,certificate,envelope,wallclock_ns\n") !=
        std::string::npos);
  // First data row: NaN certificate/envelope serialize as empty fields, and
  // the wallclock column is empty even though the in-memory row has a value.
  CHECK(text.find("0,0,0.69314718055994529,,,\n") != std::string::npos);
  CHECK(text.find("12345") == std::string::npos);
  CHECK(text.find("nan") == std::string::npos);
}

TEST_CASE("CSV round-trip restores metadata and rows exactly") {
  std::ostringstream out;
  sample_trace().write_csv(out);
  std::istringstream in(out.str());
  RunTrace back = RunTrace::read_csv(in);
  REQUIRE(back.rows().size() == 2);
  const std::string* method = back.find_meta("method");
  REQUIRE(method != nullptr);
  CHECK(*method == "saga");
  CHECK(back.rows()[0].objective == 0.6931471805599453);
  CHECK(std::isnan(back.rows()[0].certificate));
  CHECK(std::isnan(back.rows()[0].envelope));
  CHECK(back.rows()[0].wallclock_ns == -1);
  CHECK(back.rows()[1].cost == 50.0);
  CHECK(back.rows()[1].certificate == 1e-3);
  CHECK(back.rows()[1].envelope == 0.25);
  // Writing the parsed trace reproduces the bytes.
  std::ostringstream again;
  back.write_csv(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("CSV read rejects malformed input with line positions") {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      (void)RunTrace::read_csv(in);
    } catch (const DataFormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  // Missing or wrong header.
  CHECK(!message("bogus,header\n1,2,3,4,5,\n").empty());
  // Wrong field count.
  const std::string header = "cost,epoch,objective,certificate,envelope,wallclock_ns\n";
  CHECK(message(header + "1,2,3\n").find("line 2") != std::string::npos);
  // Unparsable number.
  CHECK(message(header + "1,2,x,,,\n").find("line 2") != std::string::npos);
  // Empty input has no header at all.
  CHECK(!message("").empty());
}

TEST_CASE("metadata preserves insertion order and supports lookup") {
  RunTrace t;
  t.set_meta("b", "2");
  t.set_meta("a", "1");
  REQUIRE(t.metadata().size() == 2);
  CHECK(t.metadata()[0].first == "b");
  CHECK(t.metadata()[1].first == "a");
  CHECK(t.find_meta("missing") == nullptr);
  // Re-setting a key overwrites in place.
  t.set_meta("b", "3");
  REQUIRE(t.metadata().size() == 2);
  CHECK(*t.find_meta("b") == "3");
}

TEST_CASE("JSON mirror: null for NaN, metadata object, row arrays") {
  std::ostringstream out;
  sample_trace().write_json(out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("metadata").at("method") == "saga");
  REQUIRE(j.at("rows").size() == 2);
  CHECK(j.at("rows")[0].at("certificate").is_null());
  CHECK(j.at("rows")[0].at("wallclock_ns").is_null());
  CHECK(j.at("rows")[1].at("certificate").get<double>() ==
        doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(j.at("rows")[1].at("objective").get<double>() == 0.1);
}

}  // TEST_SUITE
