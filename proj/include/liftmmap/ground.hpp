#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftmmap/logic.hpp"

namespace liftmmap {

// Log-space zero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double log_add(double a, double b);
double log_sum_exp(std::span<const double> xs);
// log C(m, k) from a cumulative log-factorial table.
double log_binomial(int m, int k);

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Deadline {
 public:
  Deadline() = default;
  static Deadline after(double seconds);
  bool unlimited() const { return !limited_; }
  bool expired() const;
  void check(const char* where) const;

 private:
  bool limited_ = false;
  std::chrono::steady_clock::time_point end_{};
};

struct GroundAtom {
  std::string predicate;
  std::vector<int> args;
  Role role = Role::Sum;

  std::string name() const;
};

// Potential table over a set of atoms.  Bit i of a table index holds the
// value of scope[i]; entries are log-potentials.
struct GroundFactor {
  std::vector<int> scope;
  std::vector<double> table;
};

struct GroundProblem {
  std::vector<GroundAtom> atoms;
  std::vector<GroundFactor> factors;
  double logConst = 0.0;

  std::vector<int> atoms_with(Role r) const;
};

// One byte per atom; entries of SUM atoms are ignored.
using Assignment = std::vector<std::uint8_t>;

struct GroundSolution {
  double logValue = kLogZero;
  Assignment assignment;
};

struct SolverOptions {
  int widthCap = 24;
  int bruteForceAtomCap = 24;
  Deadline deadline;
};

// Exact MMAP by variable elimination: all SUM atoms are summed out first,
// then MAX atoms are maximised with recorded tables for argmax decoding.
// Min-fill order within each stratum, ties by atom index.
GroundSolution ve_mmap(const GroundProblem& g, const SolverOptions& opts = {});

// Same as ve_mmap but with a caller-supplied elimination order.  `order`
// must list every atom once with all SUM atoms first.
GroundSolution ve_mmap_ordered(const GroundProblem& g, std::span<const int> order,
                               const SolverOptions& opts = {});

// log W(q): SUM atoms summed out with the MAX atoms clamped to q.
double evaluate(const GroundProblem& g, const Assignment& q, const SolverOptions& opts = {});

struct BruteForceResult {
  GroundSolution best;
  // MAX atoms in enumeration order; maxAtoms[0] is the most significant
  // bit of a mask, so ascending masks are lexicographic assignments.
  std::vector<int> maxAtoms;
  std::vector<std::uint64_t> optimalMasks;

  Assignment assignment_of(std::uint64_t mask, std::size_t atomCount) const;
};

// Exhaustive enumeration.  `best.assignment` is the lexicographically
// smallest optimum; optimalMasks lists every assignment within
// `tieTolerance` (relative, log space) of the optimum.
BruteForceResult brute_force_mmap(const GroundProblem& g, const SolverOptions& opts = {},
                                  double tieTolerance = 1e-9);

}  // namespace liftmmap
