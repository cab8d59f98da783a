#include "liftmmap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace liftmmap {

bool close_log(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

MLN with_identity_origins(const MLN& input) {
  MLN m = standardize_apart(input);
  for (auto& p : m.predicates) {
    std::vector<int> sizes;
    for (const auto& d : p.argDomains) sizes.push_back(m.domain_size(d));
    p.origin = identity_origin(p.name, sizes);
  }
  return m;
}

bool is_extreme(const EquivClass& cls, const GroundProblem& g, const Assignment& q) {
  std::map<std::pair<std::string, std::vector<int>>, bool> seen;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const GroundAtom& a = g.atoms[i];
    if (a.role != Role::Max) continue;
    const auto positions = cls.positions_of(a.predicate);
    if (positions.empty()) continue;
    std::vector<int> key = a.args;
    for (int p : positions) key[p] = -1;
    auto [it, fresh] = seen.try_emplace({a.predicate, key}, q[i] != 0);
    if (!fresh && it->second != (q[i] != 0)) return false;
  }
  return true;
}

std::vector<EquivClass> som_classes(const MLN& m) {
  std::vector<EquivClass> out;
  for (const auto& c : compute_classes(m))
    if (m.domain_size(c.domain) > 1 && check_som(m, c)) out.push_back(c);
  return out;
}

MaxAssignment expand_assignment(const MLN& derived, const GroundProblem& g, const Assignment& q,
                                const MLN& original) {
  MaxAssignment out;
  for (const auto& p : original.predicates) {
    if (p.role != Role::Max) continue;
    AtomPattern all{p.name, {}};
    for (const auto& d : p.argDomains) {
      std::vector<int> c(original.domain_size(d));
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<int>(i);
      all.sets.push_back(std::move(c));
    }
    all.for_each([&](const std::vector<int>& args) { out[{p.name, args}] = false; });
  }
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (g.atoms[i].role != Role::Max) continue;
    const Predicate* p = derived.find_predicate(g.atoms[i].predicate);
    pattern_of(*p, g.atoms[i].args).for_each([&](const std::vector<int>& args) {
      out[{p->origin.base, args}] = q[i] != 0;
    });
  }
  return out;
}

void PropertyResult::record(bool ok, const std::string& detail) {
  ++checked;
  if (ok) return;
  if (failed == 0) firstFailure = detail;
  ++failed;
}

namespace {

std::string mismatch(const std::string& tag, double got, double want) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ": got %.12g, expected %.12g", got, want);
  return tag + buf;
}

void check_root_somr(const MLN& m, const GroundProblem& g, const BruteForceResult& bf,
                     const SolverOptions& so, double tol, const std::string& tag,
                     PropertyResult& out) {
  const MLN n = ground_unit_classes(m);
  for (const auto& cls : compute_classes(n)) {
    const auto c = check_som_r(n, cls);
    if (!c) continue;
    const SomrReduction red = reduce_somr(n, cls, *c);
    const GroundProblem gr = ground_mln(red.reduced);
    const BruteForceResult bfr = brute_force_mmap(gr, so);
    const double mapped = red.valueMap.apply(bfr.best.logValue);
    if (!close_log(mapped, bf.best.logValue, tol)) {
      out.record(false, mismatch(tag + " g(value of reduced theory)", mapped, bf.best.logValue));
      return;
    }
    const Assignment q =
        to_ground_assignment(expand_assignment(red.reduced, gr, bfr.best.assignment, m), g);
    const double v = evaluate(g, q, so);
    out.record(close_log(v, bf.best.logValue, tol), mismatch(tag + " expanded assignment", v, bf.best.logValue));
    return;
  }
  out.record(false, tag + ": root was SOMR but no SOM-R class found");
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opts, std::ostream* log) {
  VerifyReport report;
  RandomMlnOptions gen;
  gen.maxGroundAtoms = opts.maxAtoms;
  SolverOptions so;
  so.bruteForceAtomCap = opts.maxAtoms;
  const double tol = opts.tolerance;

  LiftedOptions somr;
  somr.mode = Mode::LiftedSomr;
  LiftedOptions basic;
  basic.mode = Mode::LiftedBasic;

  std::uint64_t seed = opts.firstSeed;
  while (report.draws < opts.maxDraws) {
    const bool wantOracle = report.somr.checked < opts.seeds;
    const bool wantSom = report.extremality.checked < opts.minSomInstances;
    const bool wantSomr = report.valueMap.checked < opts.minSomrInstances;
    if (!wantOracle && !wantSom && !wantSomr) break;
    const std::string tag = "seed " + std::to_string(seed);
    const MLN m = with_identity_origins(random_mln(seed++, gen));
    ++report.draws;
    try {
      const GroundProblem g = ground_mln(m);
      const BruteForceResult bf = brute_force_mmap(g, so);
      const double want = bf.best.logValue;

      const MMAPSolution s = lifted_mmap(m, somr);
      if (wantOracle) {
        report.somr.record(close_log(s.logValue, want, tol), mismatch(tag, s.logValue, want));
        const Assignment q = to_ground_assignment(reconstruct_assignment(s, m), g);
        const double v = evaluate(g, q, so);
        report.assignment.record(close_log(v, want, tol), mismatch(tag, v, want));
        const double b = lifted_mmap(m, basic).logValue;
        report.basic.record(close_log(b, want, tol), mismatch(tag, b, want));
        const double e = ve_mmap(g, so).logValue;
        report.ve.record(close_log(e, want, tol), mismatch(tag, e, want));
      }

      const auto som = som_classes(m);
      if (!som.empty() && (wantOracle || wantSom)) {
        bool ok = true;
        std::string which;
        for (const auto& cls : som) {
          bool found = false;
          for (auto mask : bf.optimalMasks)
            if (is_extreme(cls, g, bf.assignment_of(mask, g.atoms.size()))) {
              found = true;
              break;
            }
          if (!found) {
            ok = false;
            which = cls.domain;
          }
        }
        report.extremality.record(ok, tag + ": no extreme optimum for class over " + which);
      }

      if (s.trace->rule == Rule::Somr && (wantOracle || wantSomr))
        check_root_somr(m, g, bf, so, tol, tag, report.valueMap);
    } catch (const std::exception& e) {
      report.somr.record(false, tag + ": " + e.what());
    }
    if (log && report.draws % 100 == 0) *log << "  " << report.draws << " instances\n";
  }

  RandomMlnOptions allMax = gen;
  allMax.maxProbability = 1.0;
  for (int i = 0; i < opts.mapSeeds; ++i) {
    const std::uint64_t s = opts.firstSeed + 1000000 + static_cast<std::uint64_t>(i);
    const std::string tag = "map seed " + std::to_string(s);
    try {
      const MLN m = with_identity_origins(random_mln(s, allMax));
      const double want = brute_force_mmap(ground_mln(m), so).best.logValue;
      const double got = lifted_mmap(m, somr).logValue;
      report.map.record(close_log(got, want, tol), mismatch(tag, got, want));
    } catch (const std::exception& e) {
      report.map.record(false, tag + ": " + e.what());
    }
  }
  return report;
}

}  // namespace liftmmap
