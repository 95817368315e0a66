#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "stepfit/cli.hpp"
#include "stepfit/io.hpp"

using namespace stepfit;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& input) {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string read_error(const std::string& text, std::optional<io::Format> fmt = std::nullopt) {
  std::istringstream in(text);
  try {
    io::read_series(in, fmt);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, ValuesAndWeights) {
  std::istringstream in("y,w\n1,2\n\n3\n-4.5,0.25\n");
  auto s = io::read_csv(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].y, 1.0);
  EXPECT_EQ(s[0].w, 2.0);
  EXPECT_EQ(s[1].w, 1.0);
  EXPECT_EQ(s[2].y, -4.5);
  EXPECT_EQ(s[2].w, 0.25);
}

TEST(Csv, ErrorsNameLine) {
  EXPECT_EQ(read_error("1\nabc\n"), "line 2: field y is not a number");
  EXPECT_EQ(read_error("1\n2,0\n"), "line 2: weight must be positive at index 2");
  EXPECT_EQ(read_error("1,2,3\n"), "line 1: expected `y` or `y,w`");
  EXPECT_EQ(read_error(""), "empty input");
  EXPECT_NE(read_error("1\n2,x\n").find("line 2"), std::string::npos);
}

TEST(Json, ValuesAndWeights) {
  std::istringstream in(R"({"y": [1, 2.5], "w": [3, 0.5]})");
  auto s = io::read_series(in, std::nullopt);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].y, 2.5);
  EXPECT_EQ(s[1].w, 0.5);
  std::istringstream unit(R"({"y": [4]})");
  EXPECT_EQ(io::read_json(unit)[0].w, 1.0);
}

TEST(Json, ErrorsNameField) {
  EXPECT_NE(read_error(R"({"w": [1]})").find("y"), std::string::npos);
  EXPECT_NE(read_error(R"({"y": [1, "a"]})").find("y[1]"), std::string::npos);
  EXPECT_NE(read_error(R"({"y": [1, 2], "w": [1]})").find("w"), std::string::npos);
  EXPECT_FALSE(read_error("{not json", io::Format::json).empty());
}

TEST(Cli, FitExample) {
  auto r = run({"fit", "--steps", "2"}, "1\n3\n2\n9\n10\n");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "{\"error\":1.0,\"breakpoints\":[1,4,6],\"values\":[2.0,9.5]}\n");
}

TEST(Cli, FitWeighted) {
  auto r = run({"fit", "--steps", "1"}, "0,1\n1,3\n");
  EXPECT_EQ(r.code, kExitOk);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["error"], 0.75);
  EXPECT_EQ(doc["values"], nlohmann::json::array({0.75}));
  EXPECT_EQ(doc["breakpoints"], nlohmann::json::array({1, 3}));
}

TEST(Cli, KCenterExample) {
  auto r = run({"kcenter", "--k", "2"}, "0\n1\n2\n3\n");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "{\"centers\":[0.5,2.5],\"radius\":0.5}\n");
}

TEST(Cli, IsotonicWithCheckAndStats) {
  auto r = run({"isotonic", "-b", "2", "--check", "--stats"}, "5\n1\n");
  EXPECT_EQ(r.code, kExitOk);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["error"], 2.0);
  EXPECT_EQ(doc["check"]["match"], true);
  EXPECT_TRUE(doc.contains("stats"));
}

TEST(Cli, JsonInputByFormat) {
  auto r = run({"fit", "-b", "1", "--format", "json"}, R"({"y": [0, 1], "w": [1, 3]})");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(r.out)["error"], 0.75);
}

TEST(Cli, InvalidInputs) {
  auto bad = run({"fit", "--steps", "2"}, "1\nfoo\n");
  EXPECT_EQ(bad.code, kExitInvalid);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
  EXPECT_EQ(run({"fit", "--steps", "0"}, "1\n").code, kExitInvalid);
  EXPECT_EQ(run({"fit"}, "1\n").code, kExitInvalid);
  EXPECT_EQ(run({"frobnicate"}, "").code, kExitInvalid);
  EXPECT_EQ(run({"fit", "-b", "1", "/nonexistent/file.csv"}, "").code, kExitInvalid);
  EXPECT_EQ(run({"bench", "--bench-grid", "12"}, "").code, kExitInvalid);

  std::string big;
  for (int i = 0; i < 600; ++i) big += std::to_string(i % 7) + "\n";
  EXPECT_EQ(run({"fit", "-b", "3", "--check"}, big).code, kExitInvalid);
}

TEST(Cli, BenchLines) {
  auto r = run({"bench", "--bench-grid", "64,128x2", "--seed", "5"}, "");
  EXPECT_EQ(r.code, kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto doc = nlohmann::json::parse(line);
    EXPECT_EQ(doc["b"], 2);
    EXPECT_EQ(doc["seed"], 5);
    EXPECT_TRUE(doc["stats"].contains("segments_created"));
    ++count;
  }
  EXPECT_EQ(count, 2);
}
