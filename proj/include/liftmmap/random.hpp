#pragma once

#include <cstdint>
#include <random>

#include "liftmmap/logic.hpp"

namespace liftmmap {

struct RandomMlnOptions {
  int maxPredicates = 3;
  int maxArity = 2;
  int maxFormulas = 3;
  int maxLiterals = 3;
  int maxDomainSize = 3;
  int maxDomains = 2;
  double minWeight = -2.0;
  double maxWeight = 2.0;
  int maxGroundAtoms = 24;
  // Probability that a predicate is MAX; 1 gives a pure MAP problem.
  double maxProbability = 0.5;
};

// Small random theory in normal form.  Retries internally until the
// ground-atom budget holds; the same seed always gives the same theory.
MLN random_mln(std::uint64_t seed, const RandomMlnOptions& opts = {});

// Portable draws on top of mt19937_64 (the std distributions are not
// specified bit-for-bit across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  // Uniform in [lo, hi].
  int integer(int lo, int hi);
  double real(double lo, double hi);
  bool chance(double p);

 private:
  std::mt19937_64 gen_;
};

}  // namespace liftmmap
