#include <doctest.h>

#include <random>
#include <sstream>

#include "bellforge/cli/report.hpp"
#include "test_support.hpp"

using namespace bellforge;
using namespace bellforge::testing;
using bellforge::cli::Check;
using bellforge::cli::RunReport;

TEST_SUITE("report") {
  TEST_CASE("report JSON keeps the stable field order and an overall entry") {
    RunReport report;
    report.command = "verify";
    report.parameters["d"] = 3;
    report.parameters["tol"] = 1e-10;
    report.checks.push_back({"a", 0.1, 1e-10, false, "VIOLATION"});
    report.checks.push_back({"b", 0.0, 1.0, true, {}});
    report.wall_time_ms = 1.5;

    const auto j = cli::report_json(report);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"command", "parameters", "results", "wall_time_ms", "artifact_version"});
    CHECK(j["results"]["a"]["note"] == "VIOLATION");
    CHECK(j["results"]["overall"]["value"] == 1);
    CHECK(j["results"]["overall"]["pass"] == false);
    CHECK_FALSE(report.passed());
  }

  TEST_CASE("floating-point numbers are written with 17 significant digits") {
    nlohmann::ordered_json j = {{"x", 0.1}, {"n", 3}, {"s", "q\"uote"}, {"e", nlohmann::ordered_json::array()}};
    const std::string text = cli::dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"n\": 3") != std::string::npos);
    CHECK(text.find("\"q\\\"uote\"") != std::string::npos);
    const auto parsed = nlohmann::json::parse(text);
    CHECK(parsed["x"].get<double>() == 0.1);
  }

  TEST_CASE("matrix dump round-trips bit-exactly") {
    std::mt19937_64 rng(83);
    for (const Dims& dims : {Dims{2, 2}, Dims{3, 3, 3}, Dims{2, 3}}) {
      const Operator t = random_matrix(dims, rng);
      std::stringstream ss;
      write_matrix(ss, t);
      const Operator back = read_matrix(ss);
      CHECK(back.dims() == t.dims());
      CHECK(frobenius_distance(back, t) == 0.0);
    }
  }

  TEST_CASE("matrix dump layout") {
    std::stringstream ss;
    write_matrix(ss, flip<double>(2));
    std::string header, first;
    std::getline(ss, header);
    std::getline(ss, first);
    CHECK(header == "dims: 2 2");
    CHECK(first == "0 0 1 0");
  }

  TEST_CASE("malformed matrix dumps are rejected") {
    auto parse = [](const std::string& text) {
      std::istringstream in(text);
      return read_matrix(in);
    };
    CHECK_THROWS_AS(parse(""), FormatError);
    CHECK_THROWS_AS(parse("dim: 2\n"), FormatError);
    CHECK_THROWS_AS(parse("dims: 2 x\n"), FormatError);
    CHECK_THROWS_AS(parse("dims: 2\n0 0 1\n"), FormatError);
    CHECK_THROWS_AS(parse("dims: 2\n0 2 1 0\n"), FormatError);
    CHECK_THROWS_AS(parse("dims: 2\n0 0 1 0\n0 0 1 0\n"), FormatError);
    CHECK_THROWS_AS(parse("dims: 2\n0 0 nan 0\n"), FormatError);
    CHECK(parse("dims: 2\n0 0 1 0\n1 1 1 0\n").side() == 2);
  }
}
