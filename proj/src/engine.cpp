#include "liftmmap/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <tuple>

namespace liftmmap {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::LiftedSomr: return "lifted-somr";
    case Mode::LiftedBasic: return "lifted-basic";
    case Mode::Ground: return "ground";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "lifted-somr") return Mode::LiftedSomr;
  if (s == "lifted-basic") return Mode::LiftedBasic;
  if (s == "ground") return Mode::Ground;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Disjoint: return "DISJOINT";
    case Rule::Decomposer: return "DECOMPOSER";
    case Rule::Somr: return "SOMR";
    case Rule::BinomialMax: return "BINOMIAL_MAX";
    case Rule::BinomialSum: return "BINOMIAL_SUM";
    case Rule::Ground: return "GROUND";
    case Rule::PartialGround: return "PARTIAL_GROUND";
  }
  return "?";
}

int MMAPSolution::count(Rule r) const {
  int n = 0;
  std::function<void(const TraceNode&)> visit = [&](const TraceNode& t) {
    n += t.rule == r;
    for (const auto& c : t.children) visit(*c);
  };
  if (trace) visit(*trace);
  return n;
}

namespace {

bool fully_ground(const MLN& m) {
  return std::all_of(m.predicates.begin(), m.predicates.end(),
                     [](const Predicate& p) { return p.arity() == 0; });
}

int candidate_size(const MLN& m, const Predicate& p) {
  return p.arity() == 0 ? 1 : m.domain_size(p.argDomains[0]);
}

int formula_components(const std::vector<MLN>& comps) {
  return static_cast<int>(std::count_if(comps.begin(), comps.end(),
                                        [](const MLN& c) { return !c.formulas.empty(); }));
}

struct PathState {
  int binomials = 0;
  bool grounded = false;
};

class Solver {
 public:
  Solver(const LiftedOptions& opts, SolveStats& stats) : opts_(opts), stats_(stats) {
    useSomr_ = opts.mode == Mode::LiftedSomr;
    maxBinomial_ = opts.maxBinomial;
    if (maxBinomial_ == -2) maxBinomial_ = opts.mode == Mode::LiftedBasic ? 1 : -1;
    if (opts.timeoutSeconds > 0) deadline_ = Deadline::after(opts.timeoutSeconds);
  }

  std::unique_ptr<TraceNode> solve(const MLN& input, PathState st, int depth) {
    deadline_.check("lifted recursion");
    if (depth > opts_.maxDepth) fail("recursion depth cap exceeded");
    const MLN m = ground_unit_classes(input);

    if (m.formulas.empty()) return closed_form(m);

    auto comps = disjoint_components(m);
    if (comps.size() > 1) {
      auto node = make(Rule::Disjoint, m, "");
      node->params["components"] = comps.size();
      double value = 0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        Step s(path_, "DISJOINT[" + std::to_string(i) + "]");
        node->children.push_back(solve(comps[i], st, depth + 1));
        value += node->children.back()->logValue;
      }
      node->logValue = value;
      return node;
    }

    const auto classes = compute_classes(m);
    if (auto cls = find_decomposer(m, classes)) {
      auto red = reduce_decomposer(m, *cls);
      auto node = make(Rule::Decomposer, m, cls->domain);
      node->params["class"] = cls->id;
      node->params["m"] = red.multiplier;
      Step s(path_, "DECOMPOSER(" + cls->domain + ")");
      node->children.push_back(solve(red.reduced, st, depth + 1));
      node->logValue = red.multiplier * node->children.back()->logValue;
      return node;
    }

    if (useSomr_) {
      for (const auto& cls : classes) {
        auto c = check_som_r(m, cls);
        if (!c) continue;
        auto red = reduce_somr(m, cls, *c);
        auto node = make(Rule::Somr, m, cls.domain);
        node->params["class"] = cls.id;
        node->params["case"] = somr_case_name(*c);
        node->params["m"] = red.valueMap.m;
        Step s(path_, "SOMR(" + cls.domain + ")");
        node->children.push_back(solve(red.reduced, st, depth + 1));
        node->logValue = red.valueMap.apply(node->children.back()->logValue);
        return node;
      }
    }

    bool hasMax = false;
    std::vector<std::string> unaryMax, propMax, unarySum;
    for (const auto& p : m.predicates) {
      hasMax = hasMax || p.role == Role::Max;
      if (p.role == Role::Max && p.arity() == 1) unaryMax.push_back(p.name);
      if (p.role == Role::Max && p.arity() == 0) propMax.push_back(p.name);
      if (p.role == Role::Sum && p.arity() == 1) unarySum.push_back(p.name);
    }
    const bool ground = fully_ground(m);
    if (binomial_allowed(st)) {
      if (!unaryMax.empty())
        return binomial_max(m, choose_binomial(m, unaryMax, useSomr_), st, depth);
      if (!propMax.empty() && !ground)
        return binomial_max(m, choose_binomial(m, propMax, useSomr_), st, depth);
      if (!hasMax && !unarySum.empty())
        return binomial_sum(m, choose_binomial(m, unarySum, useSomr_), st, depth);
    }

    if (ground) return ground_leaf(m);

    std::vector<EquivClass> open;
    for (const auto& c : classes)
      if (m.domain_size(c.domain) > 1) open.push_back(c);
    PathState next = st;
    next.grounded = true;
    const EquivClass cls = choose_ground_class(m, open, useSomr_, binomial_allowed(next));
    auto node = make(Rule::PartialGround, m, cls.domain);
    node->params["class"] = cls.id;
    node->params["m"] = m.domain_size(cls.domain);
    Step s(path_, "PARTIAL_GROUND(" + cls.domain + ")");
    node->children.push_back(solve(shatter_ground_class(m, cls), next, depth + 1));
    node->logValue = node->children.back()->logValue;
    return node;
  }

  std::unique_ptr<TraceNode> ground_leaf(const MLN& m) {
    GroundProblem g;
    GroundSolution sol;
    try {
      g = ground_mln(m, {opts_.groundingCap});
      SolverOptions so;
      so.widthCap = opts_.widthCap;
      so.deadline = deadline_;
      sol = ve_mmap(g, so);
    } catch (const CapacityError& e) {
      fail(e.what());
    }
    auto node = make(Rule::Ground, m, "");
    const auto maxAtoms = g.atoms_with(Role::Max);
    node->params["atoms"] = g.atoms.size();
    node->params["maxAtoms"] = maxAtoms.size();
    node->params["factors"] = g.factors.size();
    for (int i : maxAtoms) {
      const Predicate* p = m.find_predicate(g.atoms[i].predicate);
      node->fixed.emplace_back(pattern_of(*p, g.atoms[i].args), sol.assignment[i] != 0);
    }
    stats_.maxGroundAtoms = std::max<long>(stats_.maxGroundAtoms, static_cast<long>(g.atoms.size()));
    stats_.maxGroundFactors =
        std::max<long>(stats_.maxGroundFactors, static_cast<long>(g.factors.size()));
    node->logValue = sol.logValue;
    return node;
  }

 private:
  // Records the recursion path for error messages.
  struct Step {
    Step(std::vector<std::string>& path, std::string s) : path_(path) { path_.push_back(std::move(s)); }
    ~Step() { path_.pop_back(); }
    std::vector<std::string>& path_;
  };

  [[noreturn]] void fail(const std::string& what) const {
    std::string where;
    for (const auto& s : path_) where += (where.empty() ? "" : " > ") + s;
    throw CapacityError((where.empty() ? "" : "at " + where + ": ") + what);
  }

  bool binomial_allowed(const PathState& st) const {
    if (opts_.mode == Mode::LiftedBasic && st.grounded) return false;
    return maxBinomial_ < 0 || st.binomials < maxBinomial_;
  }

  std::unique_ptr<TraceNode> make(Rule r, const MLN& m, std::string target) {
    auto node = std::make_unique<TraceNode>();
    node->rule = r;
    node->target = std::move(target);
    for (const auto& d : m.domains) node->sizes.emplace_back(d.name, d.size);
    ++stats_.ruleCounts[rule_name(r)];
    return node;
  }

  std::unique_ptr<TraceNode> closed_form(const MLN& m) {
    auto node = make(Rule::Ground, m, "");
    long double sumAtoms = 0;
    long double atoms = 0;
    for (const auto& p : m.predicates) {
      atoms += m.groundings(p);
      if (p.role == Role::Sum) sumAtoms += m.groundings(p);
    }
    node->params["atoms"] = static_cast<double>(atoms);
    node->params["closedForm"] = true;
    node->logValue = m.logConst + static_cast<double>(sumAtoms) * std::log(2.0);
    return node;
  }

  std::unique_ptr<TraceNode> binomial_max(const MLN& m, const std::string& pred, PathState st,
                                          int depth) {
    const int size = candidate_size(m, *m.find_predicate(pred));
    ++st.binomials;
    auto node = make(Rule::BinomialMax, m, pred);
    std::unique_ptr<TraceNode> best;
    BinomialBranch bestBranch;
    for (int k = 0; k <= size; ++k) {
      auto br = binomial_split(m, pred, k);
      Step s(path_, "BINOMIAL_MAX(" + pred + ",k=" + std::to_string(k) + ")");
      auto child = solve(br.mln, st, depth + 1);
      if (!best || child->logValue > best->logValue) {
        best = std::move(child);
        bestBranch = std::move(br);
      }
    }
    node->params["m"] = size;
    node->params["k"] = bestBranch.k;
    node->fixed = std::move(bestBranch.fixed);
    node->logValue = best->logValue;
    node->children.push_back(std::move(best));
    return node;
  }

  std::unique_ptr<TraceNode> binomial_sum(const MLN& m, const std::string& pred, PathState st,
                                          int depth) {
    const int size = candidate_size(m, *m.find_predicate(pred));
    ++st.binomials;
    auto node = make(Rule::BinomialSum, m, pred);
    node->params["m"] = size;
    std::vector<double> terms;
    for (int k = 0; k <= size; ++k) {
      auto br = binomial_split(m, pred, k);
      Step s(path_, "BINOMIAL_SUM(" + pred + ",k=" + std::to_string(k) + ")");
      node->children.push_back(solve(br.mln, st, depth + 1));
      terms.push_back(log_binomial(size, k) + node->children.back()->logValue);
    }
    node->logValue = log_sum_exp(terms);
    return node;
  }

  const LiftedOptions& opts_;
  SolveStats& stats_;
  bool useSomr_ = true;
  int maxBinomial_ = -1;
  Deadline deadline_;
  std::vector<std::string> path_;
};

}  // namespace

int lookahead_score(const MLN& m, bool useSomr, bool countBinomial) {
  const MLN n = ground_unit_classes(m);
  if (formula_components(disjoint_components(n)) >= 2) return 0;
  const auto classes = compute_classes(n);
  if (find_decomposer(n, classes)) return 1;
  if (useSomr)
    for (const auto& c : classes)
      if (check_som_r(n, c)) return 2;
  if (countBinomial) {
    bool hasMax = false;
    bool unaryMax = false;
    bool unarySum = false;
    for (const auto& p : n.predicates) {
      hasMax = hasMax || p.role == Role::Max;
      unaryMax = unaryMax || (p.role == Role::Max && p.arity() == 1);
      unarySum = unarySum || (p.role == Role::Sum && p.arity() == 1);
    }
    if (unaryMax || (!hasMax && unarySum)) return 3;
  }
  return 4;
}

std::string choose_binomial(const MLN& m, const std::vector<std::string>& candidates,
                            bool useSomr) {
  if (candidates.empty()) throw std::invalid_argument("choose_binomial: no candidates");
  std::string best;
  std::tuple<int, int> bestKey{0, 0};
  for (const auto& name : candidates) {
    const int size = candidate_size(m, *m.find_predicate(name));
    const int score = lookahead_score(binomial_split(m, name, std::min(1, size)).mln, useSomr, false);
    const std::tuple<int, int> key{score, -size};
    if (best.empty() || key < bestKey) {
      best = name;
      bestKey = key;
    }
  }
  return best;
}

EquivClass choose_ground_class(const MLN& m, const std::vector<EquivClass>& classes, bool useSomr,
                               bool binomialAllowed) {
  if (classes.empty()) throw std::invalid_argument("choose_ground_class: no classes");
  const EquivClass* best = nullptr;
  std::tuple<int, int, int> bestKey{0, 0, 0};
  for (const auto& c : classes) {
    const int size = m.domain_size(c.domain);
    const int score = lookahead_score(shatter_ground_class(m, c), useSomr, binomialAllowed);
    const std::tuple<int, int, int> key{score, size, c.id};
    if (!best || key < bestKey) {
      best = &c;
      bestKey = key;
    }
  }
  return *best;
}

MMAPSolution lifted_mmap(const MLN& input, const LiftedOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  check_well_formed(input);
  if (auto v = validate_normal_form(input)) throw ValidationError(v->message);

  MLN m = standardize_apart(input);
  for (auto& p : m.predicates) {
    std::vector<int> sizes;
    for (const auto& d : p.argDomains) sizes.push_back(m.domain_size(d));
    p.origin = identity_origin(p.name, sizes);
  }

  MMAPSolution sol;
  sol.mode = opts.mode;
  Solver solver(opts, sol.stats);
  if (opts.mode == Mode::Ground)
    sol.trace = solver.ground_leaf(m);
  else
    sol.trace = solver.solve(m, {}, 0);
  sol.logValue = sol.trace->logValue;
  sol.stats.wallMillis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

MaxAssignment reconstruct_assignment(const MMAPSolution& sol, const MLN& m) {
  if (!sol.trace) throw ValidationError("solution has no trace");
  MaxAssignment out;
  for (const auto& p : m.predicates) {
    if (p.role != Role::Max) continue;
    std::vector<std::vector<int>> sets;
    for (const auto& d : p.argDomains) {
      std::vector<int> all(m.domain_size(d));
      for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
      sets.push_back(std::move(all));
    }
    AtomPattern{p.name, sets}.for_each([&](const std::vector<int>& args) { out[{p.name, args}] = false; });
  }
  std::function<void(const TraceNode&)> visit = [&](const TraceNode& t) {
    for (const auto& [pattern, value] : t.fixed) {
      pattern.for_each([&](const std::vector<int>& args) {
        auto it = out.find({pattern.base, args});
        if (it == out.end())
          throw ValidationError("trace fixes atom of '" + pattern.base + "' not in the MLN");
        it->second = value;
      });
    }
    for (const auto& c : t.children) visit(*c);
  };
  visit(*sol.trace);
  return out;
}

Assignment to_ground_assignment(const MaxAssignment& a, const GroundProblem& g) {
  Assignment out(g.atoms.size(), 0);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (g.atoms[i].role != Role::Max) continue;
    auto it = a.find({g.atoms[i].predicate, g.atoms[i].args});
    if (it == a.end()) throw ValidationError("no value for atom " + g.atoms[i].name());
    out[i] = it->second;
  }
  return out;
}

nlohmann::ordered_json trace_to_json(const TraceNode& root) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  std::function<void(const TraceNode&, int)> visit = [&](const TraceNode& t, int depth) {
    nlohmann::ordered_json s;
    s["depth"] = depth;
    s["rule"] = rule_name(t.rule);
    s["target"] = t.target;
    s["params"] = t.params;
    nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
    for (const auto& [name, size] : t.sizes) sizes[name] = size;
    s["sizes"] = sizes;
    s["logValue"] = t.logValue;
    steps.push_back(std::move(s));
    for (const auto& c : t.children) visit(*c, depth + 1);
  };
  visit(root, 0);
  return steps;
}

nlohmann::ordered_json solution_to_json(const MMAPSolution& sol, bool withTrace) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(sol.mode);
  j["logValue"] = sol.logValue;
  j["trace"] = withTrace && sol.trace ? trace_to_json(*sol.trace) : nlohmann::ordered_json::array();
  nlohmann::ordered_json stats;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [rule, n] : sol.stats.ruleCounts) counts[rule] = n;
  stats["ruleCounts"] = counts;
  stats["maxGroundAtoms"] = sol.stats.maxGroundAtoms;
  stats["maxGroundFactors"] = sol.stats.maxGroundFactors;
  stats["wallMillis"] = sol.stats.wallMillis;
  j["stats"] = stats;
  return j;
}

}  // namespace liftmmap
