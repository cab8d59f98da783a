#include <cmath>
#include <functional>

#include "doctest.h"
#include "fixtures.hpp"
#include "liftmmap/engine.hpp"
#include "liftmmap/random.hpp"
#include "liftmmap/verify.hpp"
#include "oracle.hpp"

using namespace liftmmap;

namespace {

MLN student_sized(int t, int c, int m, int s) {
  return parse_mln("domain teacher " + std::to_string(t) + "\ndomain course " + std::to_string(c) +
                   "\ndomain company " + std::to_string(m) + "\ndomain student " + std::to_string(s) + R"(
predicate Teaches(teacher, course)
predicate Takes(student, course)
predicate JobOffer(student, company)
max: Takes, JobOffer
sum: Teaches
1 Teaches(t, c) ^ Takes(s, c) => JobOffer(s, m)
)");
}

LiftedOptions opts_for(Mode mode, int maxBinomial = -2) {
  LiftedOptions o;
  o.mode = mode;
  o.maxBinomial = maxBinomial;
  return o;
}

// log W of the reconstructed assignment on the original grounding.
double value_of_reconstruction(const MLN& m, const MMAPSolution& sol) {
  const GroundProblem g = ground_mln(m);
  return evaluate(g, to_ground_assignment(reconstruct_assignment(sol, m), g));
}

nlohmann::ordered_json without_timing(nlohmann::ordered_json j) {
  j["stats"].erase("wallMillis");
  return j;
}

std::size_t node_count(const TraceNode& t) {
  std::size_t n = 1;
  for (const auto& c : t.children) n += node_count(*c);
  return n;
}

}  // namespace

TEST_CASE("modes and rules have stable names") {
  for (Mode m : {Mode::LiftedSomr, Mode::LiftedBasic, Mode::Ground})
    CHECK(parse_mode(mode_name(m)) == m);
  CHECK_THROWS(parse_mode("fast"));
  CHECK(std::string(rule_name(Rule::BinomialMax)) == "BINOMIAL_MAX");
  CHECK(std::string(rule_name(Rule::PartialGround)) == "PARTIAL_GROUND");
}

TEST_CASE("single predicate closed forms") {
  const MLN p = parse_mln("domain d 4\npredicate P(d)\nmax: P\n0.8 P(x)\n");
  const auto sol = lifted_mmap(p);
  CHECK(sol.logValue == doctest::Approx(4 * 0.8));
  CHECK(sol.trace->rule == Rule::Decomposer);
  for (const auto& [atom, value] : reconstruct_assignment(sol, p)) CHECK(value);

  const MLN n = parse_mln("domain d 4\npredicate P(d)\nmax: P\n-0.8 P(x)\n");
  CHECK(lifted_mmap(n).logValue == doctest::Approx(0.0));
  for (const auto& [atom, value] : reconstruct_assignment(lifted_mmap(n), n)) CHECK_FALSE(value);

  const MLN s = parse_mln("domain d 3\npredicate P(d)\nsum: P\n0.5 P(x)\n");
  CHECK(lifted_mmap(s).logValue == doctest::Approx(3 * std::log(std::exp(0.5) + 1)));

  const MLN free = parse_mln("domain d 3\npredicate P(d)\npredicate Q(d)\nmax: P\nsum: Q\n1 P(x)\n");
  CHECK(lifted_mmap(free).logValue == doctest::Approx(3 + 3 * std::log(2.0)));
}

TEST_CASE("student stays lifted at every scale") {
  std::map<std::string, long> counts;
  for (int f = 1; f <= 6; ++f) {
    const auto sol = lifted_mmap(fixtures::student(f));
    CHECK(sol.count(Rule::PartialGround) == 0);
    CHECK(sol.count(Rule::Somr) >= 1);
    if (f == 1) counts = sol.stats.ruleCounts;
    CHECK(sol.stats.ruleCounts == counts);
    CHECK(std::isfinite(sol.logValue));
  }
  for (auto [t, c, m, s] : {std::tuple{1, 2, 2, 2}, {2, 1, 2, 3}, {2, 2, 1, 2}, {1, 1, 3, 3}}) {
    const MLN st = student_sized(t, c, m, s);
    const double truth = oracle::mmap(st);
    const auto somr = lifted_mmap(st);
    CHECK(oracle::close(somr.logValue, truth));
    CHECK(oracle::close(value_of_reconstruction(st, somr), truth));
    CHECK(oracle::close(lifted_mmap(st, opts_for(Mode::LiftedBasic, -1)).logValue, truth));
    CHECK(oracle::close(lifted_mmap(st, opts_for(Mode::Ground)).logValue, truth));
  }
}

TEST_CASE("student without SOM-R runs into the width cap") {
  CHECK_THROWS_AS(lifted_mmap(fixtures::student(), opts_for(Mode::Ground)), CapacityError);
  CHECK_THROWS_AS(lifted_mmap(fixtures::student(), opts_for(Mode::LiftedBasic)), CapacityError);
  const auto sol = lifted_mmap(fixtures::student());
  CHECK(oracle::close(value_of_reconstruction(fixtures::student(), sol), sol.logValue, 1e-9));
}

TEST_CASE("FS") {
  const MLN fs = fixtures::fs();
  const auto somr = lifted_mmap(fs);
  const auto basic = lifted_mmap(fs, opts_for(Mode::LiftedBasic));
  const auto ground = lifted_mmap(fs, opts_for(Mode::Ground));
  CHECK(somr.trace->rule == Rule::BinomialMax);
  CHECK(somr.trace->target == "Smokes");
  CHECK(somr.count(Rule::PartialGround) == 0);
  CHECK(basic.count(Rule::PartialGround) == 0);
  CHECK(basic.logValue == doctest::Approx(somr.logValue).epsilon(1e-12));
  CHECK(ground.logValue == doctest::Approx(somr.logValue).epsilon(1e-12));
  CHECK(ground.trace->rule == Rule::Ground);
  CHECK(node_count(*ground.trace) == 1);
  CHECK(value_of_reconstruction(fs, somr) == doctest::Approx(somr.logValue).epsilon(1e-12));

  const MLN small = fixtures::fs(3);
  CHECK(oracle::close(lifted_mmap(small).logValue, oracle::mmap(small)));
}

TEST_CASE("M1 optimum is extreme in Y") {
  const MLN m1 = fixtures::m1(3, 0.7, 0.4);
  const auto sol = lifted_mmap(m1);
  CHECK(sol.count(Rule::Somr) >= 1);
  const auto a = reconstruct_assignment(sol, m1);
  for (int z = 0; z < 3; ++z)
    for (int y = 1; y < 3; ++y) {
      CHECK(a.at({"Knows", {z, y}}) == a.at({"Knows", {z, 0}}));
      CHECK(a.at({"Frnds", {z, y}}) == a.at({"Frnds", {z, 0}}));
    }
  const auto basic = lifted_mmap(m1, opts_for(Mode::LiftedBasic, -1));
  CHECK(basic.logValue == doctest::Approx(sol.logValue).epsilon(1e-9));
  for (double w2 : {-0.4, 0.4}) {
    const MLN small = fixtures::m1(2, 0.7, w2);
    CHECK(oracle::close(lifted_mmap(small).logValue, oracle::mmap(small)));
  }
}

TEST_CASE("binomial choice") {
  const MLN pq = standardize_apart(
      parse_mln("domain d 2\ndomain e 3\npredicate P(d)\npredicate Q(e)\nmax: P, Q\n1 P(x) v Q(y)\n"));
  CHECK(choose_binomial(pq, {"P", "Q"}) == "Q");
  CHECK(choose_binomial(pq, {"Q", "P"}) == "Q");
  CHECK(choose_binomial(pq, {"P"}) == "P");
  CHECK_THROWS(choose_binomial(pq, {}));
}

TEST_CASE("ground class choice") {
  auto triangle = [](int a, int b, int c) {
    return standardize_apart(parse_mln("domain a " + std::to_string(a) + "\ndomain b " + std::to_string(b) +
                                       "\ndomain c " + std::to_string(c) + R"(
predicate F(a, b)
predicate G(b, c)
predicate H(c, a)
max: F, G, H
1 F(x, y) ^ G(y, z) ^ H(z, x)
)"));
  };
  const MLN uneven = triangle(3, 2, 4);
  CHECK(choose_ground_class(uneven, compute_classes(uneven), false, false).domain == "b");
  const MLN even = triangle(2, 2, 2);
  CHECK(choose_ground_class(even, compute_classes(even), false, false).id == 0);
  CHECK_THROWS(choose_ground_class(even, {}));

  // Grounding one class of M1 leaves a SOM-R class behind.
  MLN m1 = standardize_apart(fixtures::m1());
  const auto cs = compute_classes(m1);
  CHECK(lookahead_score(m1, false, false) == 4);
  CHECK(lookahead_score(m1, true, false) == 2);
  for (const auto& c : cs) CHECK(lookahead_score(shatter_ground_class(m1, c), true, false) <= 2);
}

TEST_CASE("lookahead scores") {
  CHECK(lookahead_score(parse_mln("domain d 2\npredicate P(d)\npredicate Q(d)\nmax: P\nsum: Q\n1 P(x)\n1 Q(y)\n"),
                        true, true) == 0);
  CHECK(lookahead_score(parse_mln("domain d 2\npredicate P(d)\nmax: P\n1 P(x)\n"), true, true) == 1);
  CHECK(lookahead_score(standardize_apart(fixtures::student()), true, true) == 2);
  CHECK(lookahead_score(standardize_apart(fixtures::fs()), true, true) == 3);
  CHECK(lookahead_score(standardize_apart(fixtures::fs()), true, false) == 4);
}

TEST_CASE("all-MAX theories give MAP") {
  RandomMlnOptions o;
  o.maxGroundAtoms = 14;
  o.maxProbability = 1.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const MLN m = random_mln(seed, o);
    const double truth = oracle::mmap(m);
    CHECK(oracle::close(lifted_mmap(m).logValue, truth));
    CHECK(oracle::close(lifted_mmap(m, opts_for(Mode::LiftedBasic)).logValue, truth));
  }
}

TEST_CASE("property: lifted modes equal the world enumerator") {
  RandomMlnOptions o;
  o.maxGroundAtoms = 14;
  for (std::uint64_t seed = 1; seed <= 250; ++seed) {
    const MLN m = random_mln(seed, o);
    const double truth = oracle::mmap(m);
    for (Mode mode : {Mode::LiftedSomr, Mode::LiftedBasic, Mode::Ground}) {
      const auto sol = lifted_mmap(m, opts_for(mode));
      CHECK(oracle::close(sol.logValue, truth));
      CHECK(oracle::close(value_of_reconstruction(m, sol), truth));
    }
    CHECK(oracle::close(lifted_mmap(m, opts_for(Mode::LiftedBasic, -1)).logValue, truth));
    CHECK(oracle::close(lifted_mmap(m, opts_for(Mode::LiftedSomr, 0)).logValue, truth));
  }
}

TEST_CASE("property: BINOMIAL_SUM only sees SUM predicates") {
  int seen = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto sol = lifted_mmap(random_mln(seed));
    std::function<void(const TraceNode&, bool)> visit = [&](const TraceNode& t, bool underSum) {
      if (underSum) {
        CHECK(t.rule != Rule::BinomialMax);
        CHECK(t.fixed.empty());
      }
      if (t.rule == Rule::BinomialSum) ++seen;
      for (const auto& c : t.children) visit(*c, underSum || t.rule == Rule::BinomialSum);
    };
    visit(*sol.trace, false);
  }
  CHECK(seen > 0);
}

TEST_CASE("solutions are deterministic") {
  for (const MLN& m : {fixtures::fs(), fixtures::m1(3), fixtures::student(2), random_mln(42)}) {
    for (Mode mode : {Mode::LiftedSomr, Mode::LiftedBasic}) {
      MMAPSolution a, b;
      try {
        a = lifted_mmap(m, opts_for(mode));
        b = lifted_mmap(m, opts_for(mode));
      } catch (const CapacityError&) {
        continue;
      }
      CHECK(without_timing(solution_to_json(a)).dump() == without_timing(solution_to_json(b)).dump());
      CHECK(reconstruct_assignment(a, m) == reconstruct_assignment(b, m));
    }
  }
}

TEST_CASE("trace layout") {
  const auto sol = lifted_mmap(fixtures::fs());
  const auto steps = trace_to_json(*sol.trace);
  CHECK(steps.size() == node_count(*sol.trace));
  CHECK(steps[0]["depth"] == 0);
  CHECK(steps[0]["rule"] == "BINOMIAL_MAX");
  CHECK(steps[0]["sizes"]["person"] == 5);
  CHECK(steps[1]["depth"] == 1);
  const auto j = solution_to_json(sol, false);
  CHECK(j["trace"].empty());
  CHECK(j["mode"] == "lifted-somr");
  CHECK(j["stats"]["ruleCounts"]["BINOMIAL_MAX"] == sol.count(Rule::BinomialMax));
}

TEST_CASE("limits and bad input") {
  LiftedOptions tiny;
  tiny.timeoutSeconds = 1e-9;
  CHECK_THROWS_AS(lifted_mmap(fixtures::fs(), tiny), TimeoutError);

  LiftedOptions shallow;
  shallow.maxDepth = 0;
  try {
    lifted_mmap(fixtures::fs(), shallow);
    FAIL("expected a capacity error");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("BINOMIAL_MAX(Smokes") != std::string::npos);
  }

  MLN bad;
  bad.domains = {{"d", 2}, {"e", 2}};
  bad.predicates = {{"P", {"d"}, Role::Max, {}}, {"Q", {"e"}, Role::Sum, {}}};
  bad.formulas.push_back(make_formula(1.0, Expr::nary(Op::And, {Expr::atom("P", {"x"}), Expr::atom("Q", {"x"})})));
  CHECK_THROWS_AS(lifted_mmap(bad), ValidationError);
}
