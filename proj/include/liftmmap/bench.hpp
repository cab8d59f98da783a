#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "liftmmap/engine.hpp"
#include "liftmmap/logic.hpp"

namespace liftmmap {

enum class Dataset { Student, FS, IMDB };

const char* dataset_name(Dataset d);
Dataset parse_dataset(const std::string& s);

struct BenchmarkSpec {
  Dataset dataset = Dataset::Student;
  int scale = 1;
  std::vector<double> weights;  // empty: defaults
};

// Default formula weights of each benchmark.
std::vector<double> default_weights(Dataset d);

// Benchmark theory with every base domain size multiplied by `scale`.
MLN generate_benchmark(const BenchmarkSpec& spec);

struct RunRecord {
  std::string dataset;
  int scale = 0;
  Mode mode = Mode::LiftedSomr;
  double logValue = kLogZero;
  double wallMillis = 0;
  long double groundFormulaCount = 0;
  std::string status = "ok";  // ok | timeout | capacity | skipped
  std::string error;
  std::map<std::string, long> ruleCounts;
};

struct RunResult {
  RunRecord record;
  std::optional<MMAPSolution> solution;
};

// Solves `m` in opts.mode; timeouts and capacity errors become a status
// instead of an exception.
RunResult run_mode(const MLN& m, const std::string& label, int scale, const LiftedOptions& opts);

std::string csv_header();
std::string csv_row(const RunRecord& r);

// One record per (scale, mode).  Once a mode fails at some scale, larger
// scales are not attempted and are recorded as skipped.
std::vector<RunRecord> run_bench(Dataset d, int firstScale, int lastScale,
                                 const std::vector<Mode>& modes, const LiftedOptions& base,
                                 const std::vector<double>& weights = {},
                                 std::ostream* progress = nullptr);

}  // namespace liftmmap
