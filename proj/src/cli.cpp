#include "stepfit/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stepfit/io.hpp"
#include "stepfit/oracle.hpp"
#include "stepfit/solver.hpp"

namespace stepfit {

namespace {

using Json = nlohmann::ordered_json;

Json stats_json(const SolverStats& s) {
  Json j;
  j["nodes_visited"] = s.nodes_visited;
  j["max_nodes_per_test"] = s.max_nodes_per_test;
  j["max_nodes_per_complete_test"] = s.max_nodes_per_complete_test;
  j["max_nodes_beyond_frontier"] = s.max_nodes_beyond_frontier;
  j["segments_created"] = s.segments_created;
  j["segments_pruned"] = s.segments_pruned;
  j["entries_evaluated"] = s.entries_evaluated;
  j["feasibility_tests"] = s.feasibility_tests;
  j["construction_tests"] = s.construction_tests;
  j["search_tests"] = s.search_tests;
  return j;
}

struct GridSpec {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> steps;
};

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size() || v < 1) throw ValidationError("bench grid entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ValidationError("empty bench grid list");
  return out;
}

GridSpec parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ValidationError("bench grid must look like \"n1,n2,...xb1,b2,...\"");
  try {
    return {parse_list(text.substr(0, x)), parse_list(text.substr(x + 1))};
  } catch (const std::logic_error&) {
    throw ValidationError("bench grid must look like \"n1,n2,...xb1,b2,...\"");
  }
}

/// Uniform values in [0, 1], log-uniform weights in [0.1, 10].
WeightedSeries bench_instance(std::size_t n, std::size_t b, std::uint64_t seed) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(b)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_real_distribution<double> exponent(-1.0, 1.0);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) {
    p.y = value(rng);
    p.w = std::pow(10.0, exponent(rng));
  }
  return make_series(std::move(pts));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal weighted L-infinity step-function fitting"};
  app.require_subcommand(1);

  std::size_t steps = 0;
  std::size_t centers = 0;
  bool check = false;
  bool stats = false;
  std::string input;
  std::string format;
  std::string grid = "1024,4096,16384,65536x2,8,64";
  std::uint64_t seed = 1;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input,input", input, "Input file (CSV or JSON); standard input if omitted");
    cmd->add_option("--format", format, "Input format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--check", check, "Cross-check against the brute-force oracle (n <= 512)");
    cmd->add_flag("--stats", stats, "Emit solver counters");
  };
  CLI::App* fit = app.add_subcommand("fit", "Optimal b-step approximation");
  fit->add_option("-b,--steps", steps, "Number of steps")->required()->check(CLI::PositiveNumber);
  add_input(fit);
  CLI::App* iso = app.add_subcommand("isotonic", "Optimal nondecreasing b-step approximation");
  iso->add_option("-b,--steps", steps, "Number of steps")->required()->check(CLI::PositiveNumber);
  add_input(iso);
  CLI::App* kc = app.add_subcommand("kcenter", "Weighted 1-D k-center");
  kc->add_option("-k,--k", centers, "Number of centers")->required()->check(CLI::PositiveNumber);
  add_input(kc);
  CLI::App* bench = app.add_subcommand("bench", "Timing and counter sweep on seeded random data");
  bench->add_option("--bench-grid", grid, "Grid \"n1,n2,...xb1,b2,...\"");
  bench->add_option("--seed", seed, "Generator seed");
  bench->add_flag("--stats", stats, "Accepted for symmetry; counters are always reported");

  std::vector<std::string> argv_store{"stepfit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (bench->parsed()) {
      const GridSpec spec = parse_grid(grid);
      for (std::size_t n : spec.sizes) {
        for (std::size_t b : spec.steps) {
          const WeightedSeries series = bench_instance(n, b, seed);
          const auto t0 = std::chrono::steady_clock::now();
          const FitReport report = fit_steps_report(series, b);
          const auto t1 = std::chrono::steady_clock::now();
          Json rec;
          rec["n"] = n;
          rec["b"] = b;
          rec["seed"] = seed;
          rec["seconds"] = std::chrono::duration<double>(t1 - t0).count();
          rec["error"] = report.fit.error;
          rec["steps"] = report.fit.steps();
          rec["stats"] = stats_json(report.stats);
          out << rec.dump() << "\n";
        }
      }
      return kExitOk;
    }

    std::optional<io::Format> fmt;
    if (format == "csv") fmt = io::Format::csv;
    if (format == "json") fmt = io::Format::json;
    WeightedSeries series;
    if (input.empty() || input == "-") {
      series = io::read_series(in, fmt);
    } else {
      std::ifstream file(input);
      if (!file) throw ValidationError("cannot open input file " + input);
      series = io::read_series(file, fmt);
    }
    if (check && series.size() > kDefaultOracleCap) {
      throw ValidationError("--check supports at most " + std::to_string(kDefaultOracleCap) + " points");
    }

    Json doc;
    bool mismatch = false;
    if (kc->parsed()) {
      const CenterSet cs = k_center(series.points(), centers);
      doc["centers"] = cs.centers;
      doc["radius"] = cs.radius;
      if (check) {
        const CenterSet ref = oracle_kcenter(series.points(), centers);
        mismatch = ref.radius != cs.radius;
        doc["check"] = Json{{"oracle_error", ref.radius}, {"match", !mismatch}};
      }
    } else {
      const bool isotonic = iso->parsed();
      const FitReport report = isotonic ? fit_isotonic_report(series, steps) : fit_steps_report(series, steps);
      doc["error"] = report.fit.error;
      doc["breakpoints"] = report.fit.breakpoints;
      doc["values"] = report.fit.values;
      if (stats) doc["stats"] = stats_json(report.stats);
      if (check) {
        const StepFunction ref = isotonic ? oracle_isotonic(series, steps) : oracle_fit(series, steps);
        mismatch = ref.error != report.fit.error;
        doc["check"] = Json{{"oracle_error", ref.error}, {"match", !mismatch}};
      }
    }
    out << doc.dump() << "\n";
    return mismatch ? kExitMismatch : kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace stepfit
