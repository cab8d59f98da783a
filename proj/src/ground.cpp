#include "liftmmap/ground.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace liftmmap {

double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> xs) {
  double mx = kLogZero;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

double log_binomial(int m, int k) {
  if (m < 0 || k < 0 || k > m) throw std::invalid_argument("log_binomial: need 0 <= k <= m");
  static std::mutex mu;
  static std::vector<double> logFact{0.0};
  std::lock_guard lock(mu);
  while (static_cast<int>(logFact.size()) <= m) {
    const auto n = logFact.size();
    logFact.push_back(logFact.back() + std::log(static_cast<double>(n)));
  }
  return logFact[m] - logFact[k] - logFact[m - k];
}

Deadline Deadline::after(double seconds) {
  Deadline d;
  if (seconds > 0 && std::isfinite(seconds)) {
    d.limited_ = true;
    d.end_ = std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(seconds));
  }
  return d;
}

bool Deadline::expired() const {
  return limited_ && std::chrono::steady_clock::now() >= end_;
}

void Deadline::check(const char* where) const {
  if (expired()) throw TimeoutError(std::string("time budget exhausted in ") + where);
}

std::string GroundAtom::name() const {
  std::string s = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(args[i]);
  }
  return s + ")";
}

std::vector<int> GroundProblem::atoms_with(Role r) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].role == r) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

struct Table {
  std::vector<int> scope;  // sorted
  std::vector<double> v;
};

struct MaxRecord {
  int var;
  std::vector<int> scope;
  std::vector<double> joint;
};

// Index into a table over `sub` of the entry of a table over `super`
// (sub ⊆ super, both sorted).
std::vector<int> embed(const std::vector<int>& sub, const std::vector<int>& super) {
  std::vector<int> pos(sub.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    while (super[j] != sub[i]) ++j;
    pos[i] = static_cast<int>(j);
  }
  return pos;
}

class Eliminator {
 public:
  Eliminator(std::vector<Table> tables, std::size_t atomCount, const SolverOptions& opts)
      : opts_(opts), adj_(atomCount) {
    for (auto& t : tables) add(std::move(t));
  }

  // Greedy min-fill over `candidates`, ties by atom index.
  void eliminate_stratum(std::vector<int> candidates, bool maximise) {
    std::set<int> left(candidates.begin(), candidates.end());
    while (!left.empty()) {
      opts_.deadline.check("variable elimination");
      int bestVar = -1;
      long bestFill = -1;
      for (int v : left) {
        const long fill = fill_in(v, bestFill);
        if (bestVar < 0 || fill < bestFill) {
          bestVar = v;
          bestFill = fill;
          if (fill == 0) break;
        }
      }
      left.erase(bestVar);
      eliminate(bestVar, maximise);
    }
  }

  void eliminate_sequence(std::span<const int> order, std::span<const std::uint8_t> maximise) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      opts_.deadline.check("variable elimination");
      eliminate(order[i], maximise[i] != 0);
    }
  }

  double constant() const { return constant_; }
  const std::vector<MaxRecord>& records() const { return records_; }

 private:
  void add(Table t) {
    if (t.scope.empty()) {
      constant_ += t.v[0];
      return;
    }
    for (int a : t.scope)
      for (int b : t.scope)
        if (a != b) adj_[a].insert(b);
    const std::size_t id = tables_.size();
    for (int a : t.scope) touching_[a].insert(id);
    tables_.push_back(std::move(t));
    live_.push_back(true);
  }

  // Stops counting once `bound` is reached (bound < 0: no bound).
  long fill_in(int v, long bound) const {
    long fill = 0;
    const auto& nb = adj_[v];
    for (auto i = nb.begin(); i != nb.end(); ++i)
      for (auto j = std::next(i); j != nb.end(); ++j)
        if (!adj_[*i].count(*j) && ++fill == bound) return fill;
    return fill;
  }

  void eliminate(int v, bool maximise) {
    std::vector<std::size_t> ids;
    if (auto it = touching_.find(v); it != touching_.end())
      for (std::size_t id : it->second)
        if (live_[id]) ids.push_back(id);

    if (ids.empty()) {
      // Unconstrained atom: a free binary choice.
      if (maximise)
        records_.push_back({v, {v}, {0.0, 0.0}});
      else
        constant_ += std::log(2.0);
      finish(v);
      return;
    }

    std::vector<int> scope;
    for (std::size_t id : ids)
      scope.insert(scope.end(), tables_[id].scope.begin(), tables_[id].scope.end());
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    if (static_cast<int>(scope.size()) > opts_.widthCap)
      throw CapacityError("induced width " + std::to_string(scope.size()) +
                          " exceeds the cap of " + std::to_string(opts_.widthCap) +
                          "; use the lifted solver or a smaller instance");

    const std::size_t n = scope.size();
    std::vector<double> joint(std::size_t{1} << n, 0.0);
    for (std::size_t id : ids) {
      const Table& t = tables_[id];
      const auto pos = embed(t.scope, scope);
      for (std::size_t e = 0; e < joint.size(); ++e) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < pos.size(); ++k) idx |= ((e >> pos[k]) & 1u) << k;
        joint[e] += t.v[idx];
      }
      live_[id] = false;
      std::vector<double>().swap(tables_[id].v);
    }

    const int pv = static_cast<int>(std::lower_bound(scope.begin(), scope.end(), v) - scope.begin());
    Table out;
    out.scope = scope;
    out.scope.erase(out.scope.begin() + pv);
    out.v.resize(std::size_t{1} << (n - 1));
    const std::size_t low = (std::size_t{1} << pv) - 1;
    for (std::size_t r = 0; r < out.v.size(); ++r) {
      const std::size_t e0 = ((r & ~low) << 1) | (r & low);
      const std::size_t e1 = e0 | (std::size_t{1} << pv);
      out.v[r] = maximise ? std::max(joint[e0], joint[e1]) : log_add(joint[e0], joint[e1]);
    }
    if (maximise) records_.push_back({v, std::move(scope), std::move(joint)});
    finish(v);
    add(std::move(out));
  }

  void finish(int v) {
    for (int u : adj_[v]) adj_[u].erase(v);
    adj_[v].clear();
    touching_.erase(v);
  }

  const SolverOptions& opts_;
  std::vector<std::set<int>> adj_;
  std::map<int, std::set<std::size_t>> touching_;
  std::vector<Table> tables_;
  std::vector<bool> live_;
  std::vector<MaxRecord> records_;
  double constant_ = 0.0;
};

std::vector<Table> tables_of(const GroundProblem& g) {
  std::vector<Table> out;
  out.reserve(g.factors.size());
  for (const auto& f : g.factors) {
    // Canonicalise to a sorted scope.
    std::vector<int> order(f.scope.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return f.scope[a] < f.scope[b]; });
    Table t;
    for (int i : order) t.scope.push_back(f.scope[i]);
    if (std::adjacent_find(t.scope.begin(), t.scope.end()) != t.scope.end())
      throw std::invalid_argument("factor scope lists an atom twice");
    t.v.resize(f.table.size());
    for (std::size_t e = 0; e < t.v.size(); ++e) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < order.size(); ++k) idx |= ((e >> k) & 1u) << order[k];
      t.v[e] = f.table[idx];
    }
    out.push_back(std::move(t));
  }
  return out;
}

void decode(const std::vector<MaxRecord>& records, Assignment& q) {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    std::size_t e = 0;
    int pv = 0;
    for (std::size_t k = 0; k < it->scope.size(); ++k) {
      if (it->scope[k] == it->var)
        pv = static_cast<int>(k);
      else if (q[it->scope[k]])
        e |= std::size_t{1} << k;
    }
    const double off = it->joint[e];
    const double on = it->joint[e | (std::size_t{1} << pv)];
    q[it->var] = on > off ? 1 : 0;
  }
}

GroundSolution run_ve(const GroundProblem& g, const SolverOptions& opts,
                      const std::vector<int>* order) {
  Eliminator el(tables_of(g), g.atoms.size(), opts);
  if (order) {
    std::vector<std::uint8_t> maxFlags;
    bool seenMax = false;
    for (int a : *order) {
      const bool isMax = g.atoms.at(a).role == Role::Max;
      if (!isMax && seenMax) throw std::invalid_argument("SUM atom ordered after a MAX atom");
      seenMax = seenMax || isMax;
      maxFlags.push_back(isMax);
    }
    el.eliminate_sequence(*order, maxFlags);
  } else {
    el.eliminate_stratum(g.atoms_with(Role::Sum), false);
    el.eliminate_stratum(g.atoms_with(Role::Max), true);
  }
  GroundSolution sol;
  sol.logValue = el.constant() + g.logConst;
  sol.assignment.assign(g.atoms.size(), 0);
  decode(el.records(), sol.assignment);
  return sol;
}

}  // namespace

GroundSolution ve_mmap(const GroundProblem& g, const SolverOptions& opts) {
  return run_ve(g, opts, nullptr);
}

GroundSolution ve_mmap_ordered(const GroundProblem& g, std::span<const int> order,
                               const SolverOptions& opts) {
  std::vector<int> o(order.begin(), order.end());
  std::vector<int> sorted = o;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i) || sorted.size() != g.atoms.size())
      throw std::invalid_argument("elimination order must list every atom once");
  return run_ve(g, opts, &o);
}

double evaluate(const GroundProblem& g, const Assignment& q, const SolverOptions& opts) {
  if (q.size() != g.atoms.size()) throw std::invalid_argument("assignment size mismatch");
  GroundProblem cond;
  cond.atoms = g.atoms;
  cond.logConst = g.logConst;
  for (const auto& f : g.factors) {
    GroundFactor r;
    std::size_t fixedBits = 0;
    std::vector<int> freePos;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      if (g.atoms[f.scope[k]].role == Role::Max) {
        if (q[f.scope[k]]) fixedBits |= std::size_t{1} << k;
      } else {
        freePos.push_back(static_cast<int>(k));
        r.scope.push_back(f.scope[k]);
      }
    }
    r.table.resize(std::size_t{1} << freePos.size());
    for (std::size_t e = 0; e < r.table.size(); ++e) {
      std::size_t idx = fixedBits;
      for (std::size_t k = 0; k < freePos.size(); ++k) idx |= ((e >> k) & 1u) << freePos[k];
      r.table[e] = f.table[idx];
    }
    cond.factors.push_back(std::move(r));
  }
  Eliminator el(tables_of(cond), cond.atoms.size(), opts);
  el.eliminate_stratum(g.atoms_with(Role::Sum), false);
  return el.constant() + g.logConst;
}

Assignment BruteForceResult::assignment_of(std::uint64_t mask, std::size_t atomCount) const {
  Assignment q(atomCount, 0);
  const std::size_t n = maxAtoms.size();
  for (std::size_t i = 0; i < n; ++i) q[maxAtoms[i]] = (mask >> (n - 1 - i)) & 1u;
  return q;
}

BruteForceResult brute_force_mmap(const GroundProblem& g, const SolverOptions& opts,
                                  double tieTolerance) {
  const std::size_t n = g.atoms.size();
  if (static_cast<int>(n) > opts.bruteForceAtomCap)
    throw CapacityError("brute force limited to " + std::to_string(opts.bruteForceAtomCap) +
                        " ground atoms, instance has " + std::to_string(n));
  BruteForceResult res;
  res.maxAtoms = g.atoms_with(Role::Max);
  const std::vector<int> sumAtoms = g.atoms_with(Role::Sum);
  const std::size_t nq = res.maxAtoms.size();
  const std::size_t ns = sumAtoms.size();

  std::vector<std::vector<std::size_t>> touching(n);
  for (std::size_t f = 0; f < g.factors.size(); ++f)
    for (int a : g.factors[f].scope) touching[a].push_back(f);

  std::vector<std::uint8_t> val(n, 0);
  auto factor_value = [&](std::size_t f) {
    const auto& fac = g.factors[f];
    std::size_t idx = 0;
    for (std::size_t k = 0; k < fac.scope.size(); ++k) idx |= std::size_t{val[fac.scope[k]]} << k;
    return fac.table[idx];
  };

  double best = kLogZero;
  std::vector<std::pair<std::uint64_t, double>> near;
  const std::uint64_t qCount = std::uint64_t{1} << nq;
  for (std::uint64_t mask = 0; mask < qCount; ++mask) {
    if ((mask & 0xff) == 0) opts.deadline.check("brute force");
    for (std::size_t i = 0; i < nq; ++i) val[res.maxAtoms[i]] = (mask >> (nq - 1 - i)) & 1u;
    for (int a : sumAtoms) val[a] = 0;
    double total = 0.0;
    for (std::size_t f = 0; f < g.factors.size(); ++f) total += factor_value(f);

    // Gray-code walk over the SUM atoms with a streaming log-sum-exp.
    double mx = total;
    double acc = 0.0;
    const std::uint64_t sCount = std::uint64_t{1} << ns;
    for (std::uint64_t s = 0; s < sCount; ++s) {
      if (total > mx) {
        acc = acc * std::exp(mx - total) + 1.0;
        mx = total;
      } else {
        acc += std::exp(total - mx);
      }
      if (s + 1 == sCount) break;
      const int flip = sumAtoms[static_cast<std::size_t>(std::countr_zero(s + 1))];
      for (std::size_t f : touching[flip]) total -= factor_value(f);
      val[flip] ^= 1u;
      for (std::size_t f : touching[flip]) total += factor_value(f);
    }
    const double w = mx + std::log(acc) + g.logConst;

    if (w > best) {
      best = w;
      const double cut = best - tieTolerance * std::max(1.0, std::abs(best));
      std::erase_if(near, [&](const auto& p) { return p.second < cut; });
    }
    if (w >= best - tieTolerance * std::max(1.0, std::abs(best))) near.emplace_back(mask, w);
  }
  const double tol = tieTolerance * std::max(1.0, std::abs(best));
  for (const auto& [mask, w] : near)
    if (w >= best - tol) res.optimalMasks.push_back(mask);
  // Masks ascend, so the first optimum is the canonical one.
  res.best.logValue = best;
  res.best.assignment = res.assignment_of(res.optimalMasks.front(), n);
  return res;
}

}  // namespace liftmmap
