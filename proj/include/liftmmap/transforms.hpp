#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftmmap/ground.hpp"
#include "liftmmap/logic.hpp"

namespace liftmmap {

// A rectangle of ground atoms of an original predicate: the cartesian
// product of one constant set per original argument position.
struct AtomPattern {
  std::string base;
  std::vector<std::vector<int>> sets;

  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> args(sets.size());
    std::vector<std::size_t> idx(sets.size(), 0);
    for (const auto& s : sets)
      if (s.empty()) return;
    while (true) {
      for (std::size_t i = 0; i < sets.size(); ++i) args[i] = sets[i][idx[i]];
      fn(static_cast<const std::vector<int>&>(args));
      std::size_t i = sets.size();
      while (i > 0) {
        --i;
        if (++idx[i] < sets[i].size()) break;
        idx[i] = 0;
        if (i == 0) return;
      }
      if (sets.empty()) return;
    }
  }
};

// Original atoms represented by the current ground atom `p(args)`.
AtomPattern pattern_of(const Predicate& p, const std::vector<int>& args);
// Original atoms represented by every grounding of `p`.
AtomPattern pattern_of_all(const MLN& m, const Predicate& p);

// ---- simplification -------------------------------------------------------

using AtomBinding = std::function<std::optional<bool>(const Expr& atom)>;

// Boolean constant folding; never returns a tree that contains TRUE/FALSE
// below the root.
ExprPtr simplify_expr(const ExprPtr& e);

struct SimplifyResult {
  enum class Kind { Formula, Satisfied, Vacuous };
  Kind kind = Kind::Formula;
  ExprPtr expr;                        // Kind::Formula
  std::vector<std::string> droppedVars;  // variables no longer mentioned
};

// Substitutes truth values for the atoms selected by `bindings` and folds
// constants.  Satisfied: every grounding holds (caller adds weight x
// groundings to logConst).  Vacuous: no grounding holds (formula dropped).
// Formula: the caller multiplies the weight by the domain sizes of
// droppedVars.
SimplifyResult simplify(const WeightedFormula& f, const AtomBinding& bindings);

// ---- structural rules -----------------------------------------------------

std::vector<MLN> disjoint_components(const MLN& m);

// Class X such that every formula has exactly one variable of X, every atom
// mentions one, and every predicate has a position in X.  Classes with a
// single-constant domain are skipped.
std::optional<EquivClass> find_decomposer(const MLN& m, const std::vector<EquivClass>& classes);

struct DecomposerReduction {
  MLN reduced;
  int multiplier = 1;
};

DecomposerReduction reduce_decomposer(const MLN& m, const EquivClass& cls);

bool check_som(const MLN& m, const EquivClass& cls);

enum class SomrCase { Case1, Case2 };
const char* somr_case_name(SomrCase c);

std::optional<SomrCase> check_som_r(const MLN& m, const EquivClass& cls);

// Maps the reduced objective back to the original one: CASE1 multiplies the
// log value by m, CASE2 is the identity.
struct ValueMap {
  SomrCase somrCase = SomrCase::Case2;
  int m = 1;
  double apply(double logValue) const {
    return somrCase == SomrCase::Case1 ? logValue * m : logValue;
  }
};

struct SomrReduction {
  MLN reduced;
  ValueMap valueMap;
};

SomrReduction reduce_somr(const MLN& m, const EquivClass& cls, SomrCase somrCase);

struct BinomialBranch {
  int k = 0;
  MLN mln;
  std::string trueSub;   // empty when k == 0 or for a propositional predicate
  std::string falseSub;  // empty when k == m
  // Original atoms of the conditioned predicate and their fixed values.
  std::vector<std::pair<AtomPattern, bool>> fixed;
};

// Sets exactly k groundings of `pred` to true.  `pred` is unary, or
// propositional with k in {0, 1}.
BinomialBranch binomial_split(const MLN& m, const std::string& pred, int k);

// Replaces every predicate with positions in `cls` by one propositional
// variant per constant combination and replicates formulas accordingly.
MLN shatter_ground_class(const MLN& m, const EquivClass& cls);

// Shatters every class whose domain has a single constant (names kept) and
// drops unused domains.
MLN ground_unit_classes(const MLN& m);

struct GroundOptions {
  double maxTableEntries = 5e6;
};

GroundProblem ground_mln(const MLN& m, const GroundOptions& opts = {});

// Total table entries ground_mln would allocate.
long double ground_table_entries(const MLN& m);
// Sum over formulas of their number of groundings.
long double count_ground_formulas(const MLN& m);

}  // namespace liftmmap
