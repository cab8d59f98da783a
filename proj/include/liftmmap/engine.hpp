#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "liftmmap/ground.hpp"
#include "liftmmap/logic.hpp"
#include "liftmmap/transforms.hpp"

namespace liftmmap {

enum class Mode { LiftedSomr, LiftedBasic, Ground };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

enum class Rule { Disjoint, Decomposer, Somr, BinomialMax, BinomialSum, Ground, PartialGround };

const char* rule_name(Rule r);

struct LiftedOptions {
  Mode mode = Mode::LiftedSomr;
  // Binomial applications allowed on one recursion path; -1 is unlimited.
  // Unset (-2) picks the mode default: unlimited for lifted-somr, 1 for
  // lifted-basic.
  int maxBinomial = -2;
  double timeoutSeconds = 0;  // 0: no limit
  int maxDepth = 10000;
  int widthCap = 24;
  double groundingCap = 5e6;
};

struct TraceNode {
  Rule rule = Rule::Ground;
  std::string target;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, int>> sizes;
  double logValue = kLogZero;
  std::vector<std::unique_ptr<TraceNode>> children;
  // Original MAX atoms fixed at this node (GROUND leaves, BINOMIAL_MAX).
  std::vector<std::pair<AtomPattern, bool>> fixed;
};

struct SolveStats {
  std::map<std::string, long> ruleCounts;
  long maxGroundAtoms = 0;
  long maxGroundFactors = 0;
  double wallMillis = 0;
};

struct MMAPSolution {
  Mode mode = Mode::LiftedSomr;
  double logValue = kLogZero;
  std::unique_ptr<TraceNode> trace;
  SolveStats stats;

  int count(Rule r) const;
};

MMAPSolution lifted_mmap(const MLN& m, const LiftedOptions& opts = {});

// One-step lookahead scores: 0 disjoint, 1 decomposer, 2 SOM-R, 3 binomial
// (ground-class choice only), 4 nothing.
int lookahead_score(const MLN& m, bool useSomr, bool countBinomial);

// Among unary `candidates`, the one whose k=1 split enables the
// highest-priority rule; ties to the larger domain, then list order.
std::string choose_binomial(const MLN& m, const std::vector<std::string>& candidates,
                            bool useSomr = true);

// Among `classes`, the one whose shattering enables the highest-priority
// rule; ties to the smaller domain, then class id.
EquivClass choose_ground_class(const MLN& m, const std::vector<EquivClass>& classes,
                               bool useSomr = true, bool binomialAllowed = true);

using MaxAssignment = std::map<std::pair<std::string, std::vector<int>>, bool>;

// Values of every ground MAX atom of `m` recovered from the trace; atoms no
// node fixes are false.
MaxAssignment reconstruct_assignment(const MMAPSolution& sol, const MLN& m);

// Lays a MaxAssignment out over the atoms of a grounding of the same MLN.
Assignment to_ground_assignment(const MaxAssignment& a, const GroundProblem& g);

// Flat pre-order list of {depth, rule, target, params, sizes, logValue}.
nlohmann::ordered_json trace_to_json(const TraceNode& root);
nlohmann::ordered_json solution_to_json(const MMAPSolution& sol, bool withTrace = true);

}  // namespace liftmmap
