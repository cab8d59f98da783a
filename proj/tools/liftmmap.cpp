// Command-line front end: solve, verify, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liftmmap/bench.hpp"
#include "liftmmap/engine.hpp"
#include "liftmmap/parse.hpp"
#include "liftmmap/verify.hpp"

using namespace liftmmap;

namespace {

enum Exit { kOk = 0, kTimeout = 1, kInput = 2, kCapacity = 3, kPropertyFailed = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string atom_name(const std::string& pred, const std::vector<int>& args) {
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + std::to_string(args[i]);
  return s + ")";
}

void print_trace(const nlohmann::ordered_json& steps, std::ostream& out) {
  for (const auto& s : steps) {
    out << std::string(2 * s["depth"].get<int>(), ' ') << s["rule"].get<std::string>();
    if (!s["target"].get<std::string>().empty()) out << ' ' << s["target"].get<std::string>();
    if (!s["params"].empty()) out << ' ' << s["params"].dump();
    out << '\n';
  }
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw InputError("bad scale range '" + s + "' (expected a..b)");
  }
}

void append_csv(const std::string& path, const RunRecord& r) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (fresh) out << csv_header() << '\n';
  out << csv_row(r) << '\n';
}

struct SolveArgs {
  std::string path;
  std::string dataset;
  int scale = 1;
  std::vector<double> weights;
  std::string mode = "lifted-somr";
  bool trace = false;
  double timeout = 1800;
  int maxBinomial = -2;
  std::string out;
  std::string csv;
  std::string assignment;
};

int cmd_solve(const SolveArgs& a) {
  MLN m;
  std::string label;
  LiftedOptions opts;
  try {
    opts.mode = parse_mode(a.mode);
    if (!a.dataset.empty()) {
      if (!a.path.empty()) throw InputError("give either a file or --dataset, not both");
      m = generate_benchmark({parse_dataset(a.dataset), a.scale, a.weights});
      label = a.dataset;
    } else {
      if (a.path.empty()) throw InputError("no input: give a file or --dataset");
      m = load_mln(a.path);
      label = std::filesystem::path(a.path).stem().string();
    }
  } catch (const ParseError& e) {
    std::cerr << a.path << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  opts.timeoutSeconds = a.timeout;
  opts.maxBinomial = a.maxBinomial;

  RunResult run;
  try {
    run = run_mode(m, label, a.dataset.empty() ? 0 : a.scale, opts);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  const RunRecord& r = run.record;
  if (!a.csv.empty()) append_csv(a.csv, r);
  if (r.status == "timeout") {
    std::cerr << "timeout: " << r.error << '\n';
    return kTimeout;
  }
  if (r.status == "capacity") {
    std::cerr << "capacity exceeded: " << r.error << '\n';
    return kCapacity;
  }

  const MMAPSolution& sol = *run.solution;
  const auto doc = solution_to_json(sol);
  std::printf("mode %s\nlogValue %.17g\nwallMillis %.3f\n", mode_name(sol.mode), sol.logValue,
              sol.stats.wallMillis);
  if (a.trace) print_trace(doc["trace"], std::cout);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) {
      std::cerr << "error: cannot write '" << a.out << "'\n";
      return kInput;
    }
    out << doc.dump(2) << '\n';
  }
  if (!a.assignment.empty()) {
    std::ofstream out(a.assignment);
    if (!out) {
      std::cerr << "error: cannot write '" << a.assignment << "'\n";
      return kInput;
    }
    for (const auto& [atom, value] : reconstruct_assignment(sol, m))
      out << atom_name(atom.first, atom.second) << '=' << (value ? "true" : "false") << '\n';
  }
  return kOk;
}

int cmd_verify(const VerifyOptions& opts) {
  const VerifyReport report = run_verify(opts, &std::cerr);
  bool ok = true;
  for (const PropertyResult* p : report.all()) {
    if (p->checked == 0) {
      std::printf("SKIP %s (no instances)\n", p->name.c_str());
      continue;
    }
    std::printf("%s %s (%d checked, %d failed)\n", p->failed ? "FAIL" : "PASS", p->name.c_str(),
                p->checked, p->failed);
    if (p->failed) std::printf("     first failure: %s\n", p->firstFailure.c_str());
    ok = ok && p->failed == 0;
  }
  return ok ? kOk : kPropertyFailed;
}

struct BenchArgs {
  std::string dataset;
  std::string scales = "1..5";
  std::vector<std::string> modes{"lifted-somr", "lifted-basic", "ground"};
  std::string csv;
  double timeout = 1800;
  int maxBinomial = -2;
  std::vector<double> weights;
};

int cmd_bench(const BenchArgs& a) {
  Dataset d;
  std::vector<Mode> modes;
  std::pair<int, int> range;
  try {
    d = parse_dataset(a.dataset);
    for (const auto& s : a.modes) modes.push_back(parse_mode(s));
    range = parse_range(a.scales);
    if (range.first < 1) throw InputError("scales must be positive");
    generate_benchmark({d, 1, a.weights});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  LiftedOptions base;
  base.timeoutSeconds = a.timeout;
  base.maxBinomial = a.maxBinomial;

  std::ofstream csv;
  if (!a.csv.empty()) {
    csv.open(a.csv);
    if (!csv) {
      std::cerr << "error: cannot write '" << a.csv << "'\n";
      return kInput;
    }
    csv << csv_header() << '\n';
  }
  std::cout << csv_header() << '\n';
  const auto rows = run_bench(d, range.first, range.second, modes, base, a.weights, &std::cout);
  for (const auto& r : rows)
    if (csv) csv << csv_row(r) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted marginal MAP inference for Markov logic networks"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one theory or benchmark instance");
  s->add_option("path", solve.path, "theory file");
  s->add_option("--dataset", solve.dataset, "benchmark: student, fs or imdb");
  s->add_option("--scale", solve.scale, "domain size multiplier")->check(CLI::PositiveNumber);
  s->add_option("--weights", solve.weights, "formula weights of the benchmark")->delimiter(',');
  s->add_option("--mode", solve.mode, "lifted-somr, lifted-basic or ground")->capture_default_str();
  s->add_flag("--trace", solve.trace, "print the rule trace");
  s->add_option("--timeout", solve.timeout, "seconds")->capture_default_str();
  s->add_option("--max-binomial", solve.maxBinomial,
                "binomial applications per recursion path (-1 unlimited)");
  s->add_option("--out", solve.out, "write the solution JSON here");
  s->add_option("--csv", solve.csv, "append a result row to this CSV");
  s->add_option("--assignment", solve.assignment, "write the MAX assignment, one atom=bool per line");

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Check the lifted solver against brute force");
  v->add_option("--seeds", verify.seeds, "random instances")->capture_default_str();
  v->add_option("--max-atoms", verify.maxAtoms, "ground-atom budget per instance")
      ->capture_default_str()
      ->check(CLI::Range(1, 30));
  v->add_option("--first-seed", verify.firstSeed)->capture_default_str();
  v->add_option("--map-seeds", verify.mapSeeds, "extra all-MAX instances")->capture_default_str();
  v->add_option("--tolerance", verify.tolerance, "relative, log space")->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a benchmark over a range of scales");
  b->add_option("--dataset", bench.dataset, "student, fs or imdb")->required();
  b->add_option("--scales", bench.scales, "range a..b")->capture_default_str();
  b->add_option("--modes", bench.modes, "modes to run")->delimiter(',');
  b->add_option("--csv", bench.csv, "output CSV");
  b->add_option("--timeout", bench.timeout, "seconds per run")->capture_default_str();
  b->add_option("--max-binomial", bench.maxBinomial);
  b->add_option("--weights", bench.weights)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (*s) return cmd_solve(solve);
  if (*v) return cmd_verify(verify);
  return cmd_bench(bench);
}
