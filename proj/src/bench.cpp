#include "liftmmap/bench.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "liftmmap/parse.hpp"

namespace liftmmap {

const char* dataset_name(Dataset d) {
  switch (d) {
    case Dataset::Student: return "student";
    case Dataset::FS: return "fs";
    case Dataset::IMDB: return "imdb";
  }
  return "?";
}

Dataset parse_dataset(const std::string& s) {
  if (s == "student") return Dataset::Student;
  if (s == "fs") return Dataset::FS;
  if (s == "imdb") return Dataset::IMDB;
  throw std::invalid_argument("unknown dataset '" + s + "' (student, fs, imdb)");
}

std::vector<double> default_weights(Dataset d) {
  switch (d) {
    case Dataset::Student: return {1.0};
    case Dataset::FS: return {1.5, 1.1};
    case Dataset::IMDB: return std::vector<double>(6, 1.0);
  }
  return {};
}

namespace {

struct Template {
  std::vector<std::pair<std::string, int>> domains;
  std::vector<std::string> predicates;
  std::string maxLine;
  std::string sumLine;
  std::vector<std::string> formulas;
};

Template template_of(Dataset d) {
  switch (d) {
    case Dataset::Student:
      return {{{"teacher", 2}, {"course", 3}, {"company", 4}, {"student", 6}},
              {"Teaches(teacher, course)", "Takes(student, course)", "JobOffer(student, company)"},
              "Takes, JobOffer",
              "Teaches",
              {"Teaches(t, c) ^ Takes(s, c) => JobOffer(s, m)"}};
    case Dataset::FS:
      return {{{"person", 5}},
              {"Smokes(person)", "Cancer(person)", "Friend(person, person)"},
              "Smokes, Cancer",
              "Friend",
              {"Smokes(p) => Cancer(p)", "Smokes(p1) ^ Friend(p1, p2) => Smokes(p2)"}};
    case Dataset::IMDB:
      return {{{"person", 3}, {"movie", 2}},
              {"Act(person)", "Dir(person)", "Mov(movie, person)", "WorksWith(person, person)"},
              "Act, Dir, Mov",
              "WorksWith",
              {"WorksWith(p1, p2) => Act(p1)", "WorksWith(p1, p2) => Dir(p2)",
               "Dir(p1) ^ Act(p2) ^ Mov(m, p1) ^ Mov(m, p2) => WorksWith(p2, p1)",
               "Dir(p1) ^ Act(p2) ^ Mov(m, p2) ^ WorksWith(p2, p1) => Mov(m, p1)",
               "Dir(p1) ^ Act(p2) ^ Mov(m, p1) ^ WorksWith(p2, p1) => Mov(m, p2)",
               "Dir(p1) ^ Act(p2) => WorksWith(p2, p1)"}};
  }
  throw std::invalid_argument("unknown dataset");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

MLN generate_benchmark(const BenchmarkSpec& spec) {
  if (spec.scale < 1) throw std::invalid_argument("scale must be a positive integer");
  const Template t = template_of(spec.dataset);
  const auto weights = spec.weights.empty() ? default_weights(spec.dataset) : spec.weights;
  if (weights.size() != t.formulas.size())
    throw std::invalid_argument(std::string(dataset_name(spec.dataset)) + " takes " +
                                std::to_string(t.formulas.size()) + " weights");
  std::string text;
  for (const auto& [name, size] : t.domains)
    text += "domain " + name + " " + std::to_string(size * spec.scale) + "\n";
  for (const auto& p : t.predicates) text += "predicate " + p + "\n";
  text += "max: " + t.maxLine + "\nsum: " + t.sumLine + "\n";
  for (std::size_t i = 0; i < t.formulas.size(); ++i)
    text += format_double(weights[i]) + " " + t.formulas[i] + "\n";
  return parse_mln(text);
}

RunResult run_mode(const MLN& m, const std::string& label, int scale, const LiftedOptions& opts) {
  RunResult out;
  RunRecord& r = out.record;
  r.dataset = label;
  r.scale = scale;
  r.mode = opts.mode;
  r.groundFormulaCount = count_ground_formulas(m);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    out.solution = lifted_mmap(m, opts);
    r.logValue = out.solution->logValue;
    r.ruleCounts = out.solution->stats.ruleCounts;
    r.wallMillis = out.solution->stats.wallMillis;
  } catch (const TimeoutError& e) {
    r.status = "timeout";
    r.error = e.what();
    r.wallMillis = elapsed();
  } catch (const CapacityError& e) {
    r.status = "capacity";
    r.error = e.what();
    r.wallMillis = elapsed();
  }
  return out;
}

std::string csv_header() {
  return "dataset,scale,mode,logValue,wallMillis,groundFormulaCount,status";
}

std::string csv_row(const RunRecord& r) {
  char millis[32];
  std::snprintf(millis, sizeof millis, "%.3f", r.wallMillis);
  char count[64];
  std::snprintf(count, sizeof count, "%.0Lf", r.groundFormulaCount);
  const std::string value = r.status == "ok" ? format_double(r.logValue) : "";
  return r.dataset + "," + std::to_string(r.scale) + "," + mode_name(r.mode) + "," + value + "," +
         millis + "," + count + "," + r.status;
}

std::vector<RunRecord> run_bench(Dataset d, int firstScale, int lastScale,
                                 const std::vector<Mode>& modes, const LiftedOptions& base,
                                 const std::vector<double>& weights, std::ostream* progress) {
  std::vector<RunRecord> rows;
  std::map<Mode, bool> failed;
  for (int f = firstScale; f <= lastScale; ++f) {
    const MLN m = generate_benchmark({d, f, weights});
    for (Mode mode : modes) {
      RunRecord r;
      if (failed[mode]) {
        r.dataset = dataset_name(d);
        r.scale = f;
        r.mode = mode;
        r.groundFormulaCount = count_ground_formulas(m);
        r.status = "skipped";
      } else {
        LiftedOptions opts = base;
        opts.mode = mode;
        r = run_mode(m, dataset_name(d), f, opts).record;
        failed[mode] = r.status != "ok";
      }
      if (progress) *progress << csv_row(r) << '\n';
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace liftmmap
