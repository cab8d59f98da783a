#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "liftmmap/engine.hpp"
#include "liftmmap/random.hpp"

namespace liftmmap {

// |a - b| <= tol * max(1, |a|, |b|), with equal infinities accepted.
bool close_log(double a, double b, double tol);

// Prepares a theory the way lifted_mmap sees it: standardized apart with
// identity provenance.
MLN with_identity_origins(const MLN& m);

// q is extreme w.r.t. `cls` when every MAX predicate takes the same value
// on groundings that agree outside the class positions.
bool is_extreme(const EquivClass& cls, const GroundProblem& g, const Assignment& q);

// SOM classes of `m` with more than one constant.
std::vector<EquivClass> som_classes(const MLN& m);

// Carries an assignment of a derived theory's grounding back to the
// original MAX atoms through provenance; uncovered atoms are false.
MaxAssignment expand_assignment(const MLN& derived, const GroundProblem& g, const Assignment& q,
                                const MLN& original);

struct PropertyResult {
  explicit PropertyResult(std::string n) : name(std::move(n)) {}

  std::string name;
  int checked = 0;
  int failed = 0;
  std::string firstFailure;

  bool pass(int minimum = 1) const { return failed == 0 && checked >= minimum; }
  void record(bool ok, const std::string& detail);
};

struct VerifyOptions {
  int seeds = 500;
  std::uint64_t firstSeed = 1;
  int maxAtoms = 24;
  double tolerance = 1e-6;
  // Keep drawing instances until these many SOM / root-SOM-R instances
  // were seen (bounded by maxDraws).
  int minSomInstances = 0;
  int minSomrInstances = 0;
  int mapSeeds = 0;
  int maxDraws = 20000;
};

struct VerifyReport {
  PropertyResult somr{"lifted-somr equals brute force"};
  PropertyResult basic{"lifted-basic equals brute force"};
  PropertyResult ve{"variable elimination equals brute force"};
  PropertyResult assignment{"reconstructed assignment attains the value"};
  PropertyResult extremality{"an optimum is extreme for every SOM class"};
  PropertyResult valueMap{"SOM-R value map and expanded assignment"};
  PropertyResult map{"all-MAX lifted equals brute-force MAP"};
  int draws = 0;

  std::vector<const PropertyResult*> all() const {
    return {&somr, &basic, &ve, &assignment, &extremality, &valueMap, &map};
  }
};

VerifyReport run_verify(const VerifyOptions& opts, std::ostream* log = nullptr);

}  // namespace liftmmap
