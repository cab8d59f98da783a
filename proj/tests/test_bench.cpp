#include <sstream>

#include "doctest.h"
#include "liftmmap/bench.hpp"
#include "liftmmap/parse.hpp"
#include "liftmmap/transforms.hpp"

using namespace liftmmap;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const std::vector<Mode> kAllModes{Mode::LiftedSomr, Mode::LiftedBasic, Mode::Ground};

}  // namespace

TEST_CASE("benchmark generators") {
  const MLN s = generate_benchmark({Dataset::Student, 3, {}});
  CHECK(s.domain_size("teacher") == 6);
  CHECK(s.domain_size("course") == 9);
  CHECK(s.domain_size("company") == 12);
  CHECK(s.domain_size("student") == 18);
  const MLN f = generate_benchmark({Dataset::FS, 2, {}});
  CHECK(f.domain_size("person") == 10);
  CHECK(f.formulas[0].weight == 1.5);
  const MLN i = generate_benchmark({Dataset::IMDB, 2, {0.5, 1, 1, 1, 1, -2}});
  CHECK(i.domain_size("person") == 6);
  CHECK(i.domain_size("movie") == 4);
  CHECK(i.formulas.size() == 6);
  CHECK(i.formulas[5].weight == -2);
  CHECK(i.find_predicate("WorksWith")->role == Role::Sum);

  CHECK_THROWS(generate_benchmark({Dataset::FS, 0, {}}));
  CHECK_THROWS(generate_benchmark({Dataset::FS, 1, {1.0}}));
  CHECK(parse_dataset("imdb") == Dataset::IMDB);
  CHECK_THROWS(parse_dataset("cora"));

  for (Dataset d : {Dataset::Student, Dataset::FS, Dataset::IMDB}) {
    const MLN m = generate_benchmark({d, 2, {}});
    CHECK(serialize_mln(parse_mln(serialize_mln(m))) == serialize_mln(m));
  }
}

TEST_CASE("ground formula counts") {
  for (long double f = 1; f <= 6; ++f) {
    const int scale = static_cast<int>(f);
    CHECK(count_ground_formulas(generate_benchmark({Dataset::Student, scale, {}})) == 144 * f * f * f * f);
    CHECK(count_ground_formulas(generate_benchmark({Dataset::FS, scale, {}})) == 5 * f + 25 * f * f);
    CHECK(count_ground_formulas(generate_benchmark({Dataset::IMDB, scale, {}})) ==
          27 * f * f + 54 * f * f * f);
  }
}

TEST_CASE("CSV rows") {
  CHECK(split(csv_header()) ==
        std::vector<std::string>{"dataset", "scale", "mode", "logValue", "wallMillis",
                                 "groundFormulaCount", "status"});
  RunRecord r;
  r.dataset = "fs";
  r.scale = 2;
  r.mode = Mode::LiftedBasic;
  r.logValue = 0.1;
  r.wallMillis = 12.34567;
  r.groundFormulaCount = 110;
  const auto cells = split(csv_row(r));
  REQUIRE(cells.size() == 7);
  CHECK(cells[2] == "lifted-basic");
  CHECK(std::stod(cells[3]) == 0.1);
  CHECK(cells[4] == "12.346");
  CHECK(cells[5] == "110");
  CHECK(cells[6] == "ok");
  r.status = "timeout";
  CHECK(split(csv_row(r))[3].empty());

  std::ostringstream progress;
  CHECK(run_bench(Dataset::FS, 3, 2, kAllModes, {}, {}, &progress).empty());
  CHECK(progress.str().empty());
}

TEST_CASE("FS and IMDB agree across modes") {
  std::ostringstream progress;
  const auto rows = run_bench(Dataset::FS, 1, 2, kAllModes, {}, {}, &progress);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) CHECK(r.status == "ok");
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    CHECK(rows[i + 1].logValue == doctest::Approx(rows[i].logValue).epsilon(1e-12));
    CHECK(rows[i + 2].logValue == doctest::Approx(rows[i].logValue).epsilon(1e-12));
  }
  CHECK(rows[3].logValue > rows[0].logValue);

  const MLN imdb = generate_benchmark({Dataset::IMDB, 1, {}});
  const double bf = brute_force_mmap(ground_mln(imdb)).best.logValue;
  for (Mode mode : kAllModes) {
    LiftedOptions o;
    o.mode = mode;
    const auto res = run_mode(imdb, "imdb", 1, o);
    REQUIRE(res.record.status == "ok");
    CHECK(res.record.logValue == doctest::Approx(bf).epsilon(1e-12));
  }
}

TEST_CASE("failures are recorded and later scales skipped") {
  const auto rows = run_bench(Dataset::Student, 1, 3, kAllModes, {});
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "capacity");
  CHECK(rows[2].status == "capacity");
  for (std::size_t i = 3; i < rows.size(); ++i) CHECK(rows[i].status == (i % 3 == 0 ? "ok" : "skipped"));
  CHECK(rows[8].groundFormulaCount == 144 * 81);

  LiftedOptions tiny;
  tiny.timeoutSeconds = 1e-9;
  const auto t = run_mode(generate_benchmark({Dataset::FS, 1, {}}), "fs", 1, tiny);
  CHECK(t.record.status == "timeout");
  CHECK_FALSE(t.solution.has_value());
  CHECK(split(csv_row(t.record))[3].empty());
}
