#include "liftmmap/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace liftmmap {

// ---- provenance -------------------------------------------------------------

AtomPattern pattern_of(const Predicate& p, const std::vector<int>& args) {
  AtomPattern out;
  out.base = p.origin.base;
  for (std::size_t o = 0; o < p.origin.slot.size(); ++o) {
    const int s = p.origin.slot[o];
    out.sets.push_back(s < 0 ? p.origin.constants(o, 0) : p.origin.constants(o, args.at(s)));
  }
  return out;
}

AtomPattern pattern_of_all(const MLN& m, const Predicate& p) {
  AtomPattern out;
  out.base = p.origin.base;
  for (std::size_t o = 0; o < p.origin.slot.size(); ++o) {
    const int s = p.origin.slot[o];
    if (s < 0) {
      out.sets.push_back(p.origin.constants(o, 0));
      continue;
    }
    std::vector<int> all;
    const int size = m.domain_size(p.argDomains.at(s));
    for (int c = 0; c < size; ++c) {
      const auto cs = p.origin.constants(o, c);
      all.insert(all.end(), cs.begin(), cs.end());
    }
    std::sort(all.begin(), all.end());
    out.sets.push_back(std::move(all));
  }
  return out;
}

// ---- simplification -----------------------------------------------------------

namespace {

bool is_const(const ExprPtr& e, bool value) {
  return e->op == (value ? Op::True : Op::False);
}

ExprPtr negate(const ExprPtr& e) {
  if (e->op == Op::True) return Expr::constant(false);
  if (e->op == Op::False) return Expr::constant(true);
  if (e->op == Op::Not) return e->children[0];
  return Expr::unary(Op::Not, e);
}

ExprPtr fold_junction(Op op, const std::vector<ExprPtr>& kids) {
  // And: FALSE absorbs, TRUE is neutral.  Or: the dual.
  const bool absorbing = op == Op::Or;
  std::vector<ExprPtr> keep;
  for (const auto& k : kids) {
    ExprPtr s = simplify_expr(k);
    if (is_const(s, absorbing)) return Expr::constant(absorbing);
    if (is_const(s, !absorbing)) continue;
    if (s->op == op)
      keep.insert(keep.end(), s->children.begin(), s->children.end());
    else
      keep.push_back(std::move(s));
  }
  if (keep.empty()) return Expr::constant(!absorbing);
  if (keep.size() == 1) return keep[0];
  return Expr::nary(op, std::move(keep));
}

}  // namespace

ExprPtr simplify_expr(const ExprPtr& e) {
  switch (e->op) {
    case Op::Atom:
    case Op::True:
    case Op::False:
      return e;
    case Op::Not:
      return negate(simplify_expr(e->children[0]));
    case Op::And:
    case Op::Or:
      return fold_junction(e->op, e->children);
    case Op::Implies: {
      ExprPtr a = simplify_expr(e->children[0]);
      ExprPtr b = simplify_expr(e->children[1]);
      if (is_const(a, false) || is_const(b, true)) return Expr::constant(true);
      if (is_const(a, true)) return b;
      if (is_const(b, false)) return negate(a);
      if (a == e->children[0] && b == e->children[1]) return e;
      return Expr::nary(Op::Implies, {a, b});
    }
    case Op::Equiv: {
      ExprPtr a = simplify_expr(e->children[0]);
      ExprPtr b = simplify_expr(e->children[1]);
      if (a->op == Op::True) return b;
      if (a->op == Op::False) return negate(b);
      if (b->op == Op::True) return a;
      if (b->op == Op::False) return negate(a);
      if (a == e->children[0] && b == e->children[1]) return e;
      return Expr::nary(Op::Equiv, {a, b});
    }
  }
  return e;
}

namespace {

ExprPtr substitute(const ExprPtr& e, const std::function<ExprPtr(const Expr&)>& atomFn) {
  if (e->op == Op::Atom) return atomFn(*e);
  if (e->children.empty()) return e;
  std::vector<ExprPtr> kids;
  kids.reserve(e->children.size());
  bool changed = false;
  for (const auto& c : e->children) {
    kids.push_back(substitute(c, atomFn));
    changed = changed || kids.back() != c;
  }
  return changed ? Expr::nary(e->op, std::move(kids)) : e;
}

SimplifyResult classify(const std::vector<std::string>& oldVars, const ExprPtr& reduced) {
  SimplifyResult r;
  if (reduced->op == Op::True) {
    r.kind = SimplifyResult::Kind::Satisfied;
    r.droppedVars = oldVars;
    return r;
  }
  if (reduced->op == Op::False) {
    r.kind = SimplifyResult::Kind::Vacuous;
    r.droppedVars = oldVars;
    return r;
  }
  r.expr = reduced;
  const auto now = expr_vars(*reduced);
  for (const auto& v : oldVars)
    if (std::find(now.begin(), now.end(), v) == now.end()) r.droppedVars.push_back(v);
  return r;
}

}  // namespace

SimplifyResult simplify(const WeightedFormula& f, const AtomBinding& bindings) {
  ExprPtr sub = substitute(f.expr, [&](const Expr& a) -> ExprPtr {
    if (auto v = bindings(a)) return Expr::constant(*v);
    return Expr::atom(a.predicate, a.args);
  });
  return classify(f.vars, simplify_expr(sub));
}

// ---- class partitioning -------------------------------------------------------

namespace {

// One block of a partition of a class domain.
struct Part {
  std::string suffix;
  std::string domain;  // domain of the retained position; unused when dropped
  int size = 1;
  bool drop = false;
  std::vector<std::vector<int>> members;  // new constant -> old constants
};

using FixedTruth =
    std::function<std::optional<bool>(const std::string& pred, const std::vector<int>& parts)>;

std::string fresh_name(const std::string& stem, const std::set<std::string>& taken) {
  if (!taken.count(stem)) return stem;
  for (int i = 1;; ++i) {
    std::string s = stem + "_" + std::to_string(i);
    if (!taken.count(s)) return s;
  }
}

std::string fresh_domain(const MLN& m, const std::string& stem, std::set<std::string>& taken) {
  if (taken.empty())
    for (const auto& d : m.domains) taken.insert(d.name);
  std::string s = fresh_name(stem, taken);
  taken.insert(s);
  return s;
}

// Enumerates tuples in [0, base)^len, first entry most significant.
template <class Fn>
void for_each_tuple(std::size_t len, std::size_t base, Fn&& fn) {
  std::vector<int> t(len, 0);
  if (base == 0 && len > 0) return;
  while (true) {
    fn(static_cast<const std::vector<int>&>(t));
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (++t[i] < static_cast<int>(base)) break;
      t[i] = 0;
      if (i == 0) return;
    }
    if (len == 0) return;
  }
}

MLN drop_unused_domains(MLN m) {
  std::set<std::string> used;
  for (const auto& p : m.predicates) used.insert(p.argDomains.begin(), p.argDomains.end());
  std::erase_if(m.domains, [&](const DomainDecl& d) { return !used.count(d.name); });
  return m;
}

Origin refine_origin(const Origin& o, const std::vector<int>& classPos,
                     const std::vector<int>& tuple, const std::vector<Part>& parts) {
  Origin out;
  out.base = o.base;
  for (std::size_t op = 0; op < o.slot.size(); ++op) {
    const int s = o.slot[op];
    if (s < 0) {
      out.slot.push_back(-1);
      out.table.push_back(o.table[op]);
      continue;
    }
    int shift = 0;
    int j = -1;
    for (std::size_t q = 0; q < classPos.size(); ++q) {
      if (classPos[q] == s) j = static_cast<int>(q);
      if (classPos[q] < s && parts[tuple[q]].drop) ++shift;
    }
    if (j < 0) {
      out.slot.push_back(s - shift);
      out.table.push_back(o.table[op]);
      continue;
    }
    const Part& part = parts[tuple[j]];
    std::vector<std::vector<int>> table;
    for (const auto& olds : part.members) {
      std::vector<int> merged;
      for (int c : olds) {
        const auto cs = o.constants(op, c);
        merged.insert(merged.end(), cs.begin(), cs.end());
      }
      std::sort(merged.begin(), merged.end());
      table.push_back(std::move(merged));
    }
    out.slot.push_back(part.drop ? -1 : s - shift);
    out.table.push_back(std::make_shared<const std::vector<std::vector<int>>>(std::move(table)));
  }
  return out;
}

double var_size(const MLN& m, std::size_t f, const std::string& v,
                const std::map<std::string, int>& classVarPart, const std::vector<Part>& parts) {
  auto it = classVarPart.find(v);
  if (it != classVarPart.end()) return parts[it->second].size;
  return m.domain_size(m.var_domain(f, v));
}

// Splits the domain of `cls` into `parts`.  Predicates touching the class
// get one variant per part combination at their class positions; formulas
// get one replica per part assignment of their class variables.  Atoms for
// which `fixed` returns a value are replaced by that truth value.
MLN partition_class(const MLN& m, const EquivClass& cls, const std::vector<Part>& parts,
                    const FixedTruth& fixed) {
  MLN out;
  out.domains = m.domains;
  for (const auto& p : parts)
    if (!p.drop) out.domains.push_back({p.domain, p.size});
  out.logConst = m.logConst;

  std::set<std::string> taken;
  for (const auto& p : m.predicates) taken.insert(p.name);

  std::map<std::pair<std::string, std::vector<int>>, std::string> variantName;
  for (const auto& p : m.predicates) {
    const auto classPos = cls.positions_of(p.name);
    if (classPos.empty()) {
      out.predicates.push_back(p);
      continue;
    }
    for_each_tuple(classPos.size(), parts.size(), [&](const std::vector<int>& t) {
      if (fixed && fixed(p.name, t)) return;
      Predicate v;
      if (parts.size() == 1) {
        v.name = p.name;
      } else {
        std::string stem = p.name;
        for (int i : t) stem += "_" + parts[i].suffix;
        v.name = fresh_name(stem, taken);
        taken.insert(v.name);
      }
      v.role = p.role;
      for (std::size_t i = 0; i < p.arity(); ++i) {
        const auto it = std::find(classPos.begin(), classPos.end(), static_cast<int>(i));
        if (it == classPos.end()) {
          v.argDomains.push_back(p.argDomains[i]);
          continue;
        }
        const Part& part = parts[t[it - classPos.begin()]];
        if (!part.drop) v.argDomains.push_back(part.domain);
      }
      v.origin = refine_origin(p.origin, classPos, t, parts);
      variantName[{p.name, t}] = v.name;
      out.predicates.push_back(std::move(v));
    });
  }

  for (std::size_t f = 0; f < m.formulas.size(); ++f) {
    const auto& formula = m.formulas[f];
    const auto classVars = cls.vars_in(f);
    if (classVars.empty()) {
      out.formulas.push_back(formula);
      continue;
    }
    for_each_tuple(classVars.size(), parts.size(), [&](const std::vector<int>& t) {
      std::map<std::string, int> varPart;
      for (std::size_t i = 0; i < classVars.size(); ++i) varPart[classVars[i]] = t[i];
      ExprPtr sub = substitute(formula.expr, [&](const Expr& a) -> ExprPtr {
        const auto classPos = cls.positions_of(a.predicate);
        if (classPos.empty()) return Expr::atom(a.predicate, a.args);
        std::vector<int> pt;
        for (int i : classPos) pt.push_back(varPart.at(a.args[i]));
        if (fixed)
          if (auto v = fixed(a.predicate, pt)) return Expr::constant(*v);
        std::vector<std::string> args;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          const auto it = std::find(classPos.begin(), classPos.end(), static_cast<int>(i));
          if (it == classPos.end() || !parts[pt[it - classPos.begin()]].drop)
            args.push_back(a.args[i]);
        }
        return Expr::atom(variantName.at({a.predicate, pt}), std::move(args));
      });
      const SimplifyResult r = classify(formula.vars, simplify_expr(sub));
      double scale = 1.0;
      for (const auto& v : r.droppedVars) scale *= var_size(m, f, v, varPart, parts);
      switch (r.kind) {
        case SimplifyResult::Kind::Satisfied:
          out.logConst += formula.weight * scale;
          break;
        case SimplifyResult::Kind::Vacuous:
          break;
        case SimplifyResult::Kind::Formula:
          out.formulas.push_back(make_formula(formula.weight * scale, r.expr));
          break;
      }
    });
  }
  return drop_unused_domains(standardize_apart(out));
}

Part merged_part(const MLN& m, const EquivClass& cls, std::set<std::string>& taken) {
  const int size = m.domain_size(cls.domain);
  Part p;
  p.domain = fresh_domain(m, cls.domain + "_1", taken);
  p.size = 1;
  p.members.resize(1);
  for (int c = 0; c < size; ++c) p.members[0].push_back(c);
  return p;
}

}  // namespace

// ---- structural rules ---------------------------------------------------------

std::vector<MLN> disjoint_components(const MLN& m) {
  const std::size_t np = m.predicates.size();
  const std::size_t nf = m.formulas.size();
  std::vector<std::size_t> parent(np + nf);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (std::size_t f = 0; f < nf; ++f) {
    std::function<void(const Expr&)> visit = [&](const Expr& e) {
      if (e.op == Op::Atom) {
        unite(np + f, static_cast<std::size_t>(m.predicate_index(e.predicate)));
        return;
      }
      for (const auto& c : e.children) visit(*c);
    };
    visit(*m.formulas[f].expr);
  }

  // Components ordered by their first formula, then formula-free predicates.
  std::vector<std::size_t> roots;
  std::map<std::size_t, std::size_t> index;
  auto component_of = [&](std::size_t node) {
    const std::size_t r = find(node);
    auto [it, fresh] = index.emplace(r, roots.size());
    if (fresh) roots.push_back(r);
    return it->second;
  };
  std::vector<MLN> out;
  auto slot = [&](std::size_t c) -> MLN& {
    while (out.size() <= c) out.emplace_back();
    return out[c];
  };
  for (std::size_t f = 0; f < nf; ++f) slot(component_of(np + f)).formulas.push_back(m.formulas[f]);
  for (std::size_t p = 0; p < np; ++p) slot(component_of(p)).predicates.push_back(m.predicates[p]);
  if (out.empty()) out.emplace_back();
  for (auto& c : out) {
    c.domains = m.domains;
    c = drop_unused_domains(std::move(c));
  }
  out.front().logConst = m.logConst;
  return out;
}

std::optional<EquivClass> find_decomposer(const MLN& m, const std::vector<EquivClass>& classes) {
  for (const auto& cls : classes) {
    if (m.domain_size(cls.domain) < 2) continue;
    bool ok = !m.formulas.empty();
    for (std::size_t f = 0; ok && f < m.formulas.size(); ++f) {
      if (cls.vars_in(f).size() != 1) ok = false;
      std::function<void(const Expr&)> visit = [&](const Expr& e) {
        if (!ok) return;
        if (e.op == Op::Atom) {
          if (cls.positions_of(e.predicate).empty()) ok = false;
          return;
        }
        for (const auto& c : e.children) visit(*c);
      };
      visit(*m.formulas[f].expr);
    }
    for (const auto& p : m.predicates)
      if (ok && cls.positions_of(p.name).empty()) ok = false;
    if (ok) return cls;
  }
  return std::nullopt;
}

DecomposerReduction reduce_decomposer(const MLN& m, const EquivClass& cls) {
  std::set<std::string> taken;
  const int size = m.domain_size(cls.domain);
  DecomposerReduction r;
  r.reduced = partition_class(m, cls, {merged_part(m, cls, taken)}, nullptr);
  r.reduced.logConst = m.logConst / size;
  r.multiplier = size;
  return r;
}

bool check_som(const MLN& m, const EquivClass& cls) {
  for (std::size_t f = 0; f < m.formulas.size(); ++f)
    if (cls.vars_in(f).size() > 1) return false;
  for (const auto& pos : cls.positions)
    if (m.find_predicate(pos.predicate)->role == Role::Max) return true;
  return false;
}

const char* somr_case_name(SomrCase c) { return c == SomrCase::Case1 ? "CASE1" : "CASE2"; }

std::optional<SomrCase> check_som_r(const MLN& m, const EquivClass& cls) {
  if (!check_som(m, cls)) return std::nullopt;
  bool all = true;
  bool none = true;
  for (const auto& p : m.predicates) {
    if (p.role != Role::Sum) continue;
    const bool has = !cls.positions_of(p.name).empty();
    all = all && has;
    none = none && !has;
  }
  // With no SUM predicates both cases hold; the identity map is exact.
  if (none) return SomrCase::Case2;
  if (all) return SomrCase::Case1;
  return std::nullopt;
}

SomrReduction reduce_somr(const MLN& m, const EquivClass& cls, SomrCase somrCase) {
  const int size = m.domain_size(cls.domain);
  std::vector<bool> hasClassVar(m.formulas.size());
  for (std::size_t f = 0; f < m.formulas.size(); ++f) hasClassVar[f] = !cls.vars_in(f).empty();

  MLN scaled = m;
  for (std::size_t f = 0; f < scaled.formulas.size(); ++f) {
    if (somrCase == SomrCase::Case1 && !hasClassVar[f]) scaled.formulas[f].weight /= size;
    if (somrCase == SomrCase::Case2 && hasClassVar[f]) scaled.formulas[f].weight *= size;
  }
  if (somrCase == SomrCase::Case1) scaled.logConst /= size;

  std::set<std::string> taken;
  SomrReduction r;
  r.reduced = partition_class(scaled, cls, {merged_part(m, cls, taken)}, nullptr);
  r.valueMap = {somrCase, size};
  return r;
}

BinomialBranch binomial_split(const MLN& m, const std::string& pred, int k) {
  const Predicate* p = m.find_predicate(pred);
  if (!p) throw ValidationError("unknown predicate '" + pred + "'");
  BinomialBranch b;
  b.k = k;

  if (p->arity() == 0) {
    if (k < 0 || k > 1) throw std::out_of_range("k out of range for a propositional predicate");
    const bool value = k == 1;
    b.fixed.emplace_back(pattern_of(*p, {}), value);
    MLN out;
    out.domains = m.domains;
    out.logConst = m.logConst;
    for (const auto& q : m.predicates)
      if (q.name != pred) out.predicates.push_back(q);
    for (std::size_t f = 0; f < m.formulas.size(); ++f) {
      const auto& formula = m.formulas[f];
      const auto r = simplify(formula, [&](const Expr& a) -> std::optional<bool> {
        if (a.predicate == pred) return value;
        return std::nullopt;
      });
      double scale = 1.0;
      for (const auto& v : r.droppedVars) scale *= m.domain_size(m.var_domain(f, v));
      if (r.kind == SimplifyResult::Kind::Satisfied) out.logConst += formula.weight * scale;
      if (r.kind == SimplifyResult::Kind::Formula)
        out.formulas.push_back(make_formula(formula.weight * scale, r.expr));
    }
    b.mln = drop_unused_domains(standardize_apart(out));
    return b;
  }

  if (p->arity() != 1) throw ValidationError("binomial rule needs a unary predicate");
  const auto classes = compute_classes(m);
  const EquivClass* cls = nullptr;
  for (const auto& c : classes)
    if (c.has_position(pred, 0)) cls = &c;
  const int size = m.domain_size(p->argDomains[0]);
  if (k < 0 || k > size) throw std::out_of_range("k out of range in binomial split");

  std::set<std::string> taken;
  std::vector<Part> parts;
  int truePart = -1;
  if (k > 0) {
    Part t;
    t.suffix = "T";
    t.domain = fresh_domain(m, p->argDomains[0] + "_T", taken);
    t.size = k;
    for (int c = 0; c < k; ++c) t.members.push_back({c});
    truePart = static_cast<int>(parts.size());
    b.trueSub = t.domain;
    parts.push_back(std::move(t));
  }
  if (k < size) {
    Part f;
    f.suffix = "F";
    f.domain = fresh_domain(m, p->argDomains[0] + "_F", taken);
    f.size = size - k;
    for (int c = k; c < size; ++c) f.members.push_back({c});
    b.falseSub = f.domain;
    parts.push_back(std::move(f));
  }

  for (std::size_t i = 0; i < parts.size(); ++i) {
    AtomPattern pat = pattern_of_all(m, *p);
    const int s = p->origin.slot.empty() ? -1 : 0;
    for (std::size_t o = 0; o < p->origin.slot.size(); ++o) {
      if (p->origin.slot[o] != s) continue;
      std::vector<int> sel;
      for (const auto& olds : parts[i].members)
        for (int c : olds) {
          const auto cs = p->origin.constants(o, c);
          sel.insert(sel.end(), cs.begin(), cs.end());
        }
      std::sort(sel.begin(), sel.end());
      pat.sets[o] = std::move(sel);
    }
    b.fixed.emplace_back(std::move(pat), static_cast<int>(i) == truePart);
  }

  if (!cls) {
    // The predicate occurs in no formula: just drop it.
    MLN out = m;
    std::erase_if(out.predicates, [&](const Predicate& q) { return q.name == pred; });
    b.mln = drop_unused_domains(std::move(out));
    return b;
  }
  b.mln = partition_class(m, *cls, parts,
                          [&](const std::string& name, const std::vector<int>& t) -> std::optional<bool> {
                            if (name != pred) return std::nullopt;
                            return t[0] == truePart;
                          });
  return b;
}

MLN shatter_ground_class(const MLN& m, const EquivClass& cls) {
  const int size = m.domain_size(cls.domain);
  std::vector<Part> parts(size);
  for (int c = 0; c < size; ++c) {
    parts[c].suffix = std::to_string(c);
    parts[c].drop = true;
    parts[c].members = {{c}};
  }
  return partition_class(m, cls, parts, nullptr);
}

MLN ground_unit_classes(const MLN& m) {
  MLN cur = m;
  while (true) {
    const auto classes = compute_classes(cur);
    const EquivClass* unit = nullptr;
    for (const auto& c : classes)
      if (cur.domain_size(c.domain) == 1) {
        unit = &c;
        break;
      }
    if (!unit) break;
    cur = shatter_ground_class(cur, *unit);
  }
  return drop_unused_domains(std::move(cur));
}

// ---- grounding ----------------------------------------------------------------

namespace {

struct CompiledFormula {
  std::vector<const Expr*> atoms;        // distinct atom nodes
  std::vector<int> atomPred;             // predicate index per atom slot
  std::vector<std::vector<int>> atomVar; // var index per argument
  std::unordered_map<const Expr*, int> slotOf;
  std::vector<int> varSize;
};

bool eval(const Expr& e, const CompiledFormula& cf, const std::vector<std::uint8_t>& slotVal) {
  switch (e.op) {
    case Op::Atom: return slotVal[cf.slotOf.at(&e)] != 0;
    case Op::True: return true;
    case Op::False: return false;
    case Op::Not: return !eval(*e.children[0], cf, slotVal);
    case Op::And:
      for (const auto& c : e.children)
        if (!eval(*c, cf, slotVal)) return false;
      return true;
    case Op::Or:
      for (const auto& c : e.children)
        if (eval(*c, cf, slotVal)) return true;
      return false;
    case Op::Implies:
      return !eval(*e.children[0], cf, slotVal) || eval(*e.children[1], cf, slotVal);
    case Op::Equiv:
      return eval(*e.children[0], cf, slotVal) == eval(*e.children[1], cf, slotVal);
  }
  return false;
}

CompiledFormula compile(const MLN& m, std::size_t f) {
  CompiledFormula cf;
  const auto& formula = m.formulas[f];
  std::map<std::string, int> varIdx;
  for (std::size_t i = 0; i < formula.vars.size(); ++i) {
    varIdx[formula.vars[i]] = static_cast<int>(i);
    cf.varSize.push_back(m.domain_size(m.var_domain(f, formula.vars[i])));
  }
  std::function<void(const Expr&)> visit = [&](const Expr& e) {
    if (e.op == Op::Atom) {
      cf.slotOf[&e] = static_cast<int>(cf.atoms.size());
      cf.atoms.push_back(&e);
      cf.atomPred.push_back(m.predicate_index(e.predicate));
      std::vector<int> vs;
      for (const auto& a : e.args) vs.push_back(varIdx.at(a));
      cf.atomVar.push_back(std::move(vs));
      return;
    }
    for (const auto& c : e.children) visit(*c);
  };
  visit(*formula.expr);
  return cf;
}

}  // namespace

long double ground_table_entries(const MLN& m) {
  long double total = 0;
  for (std::size_t f = 0; f < m.formulas.size(); ++f) {
    const auto cf = compile(m, f);
    long double n = 1;
    for (int s : cf.varSize) n *= s;
    total += n * std::pow(2.0L, static_cast<long double>(cf.atoms.size()));
  }
  return total;
}

long double count_ground_formulas(const MLN& m) {
  long double total = 0;
  for (const auto& f : m.formulas) total += m.groundings(f);
  return total;
}

GroundProblem ground_mln(const MLN& m, const GroundOptions& opts) {
  const long double entries = ground_table_entries(m);
  if (entries > opts.maxTableEntries)
    throw CapacityError("grounding needs " + std::to_string(static_cast<double>(entries)) +
                        " factor-table entries, above the cap of " +
                        std::to_string(opts.maxTableEntries) + "; use a lifted mode");

  GroundProblem g;
  g.logConst = m.logConst;
  std::vector<std::size_t> offset;
  std::vector<std::vector<int>> sizes;
  for (const auto& p : m.predicates) {
    offset.push_back(g.atoms.size());
    std::vector<int> sz;
    for (const auto& d : p.argDomains) sz.push_back(m.domain_size(d));
    long double count = m.groundings(p);
    if (g.atoms.size() + count > opts.maxTableEntries)
      throw CapacityError("too many ground atoms; use a lifted mode");
    std::vector<int> args(sz.size(), 0);
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      g.atoms.push_back({p.name, args, p.role});
      for (std::size_t j = sz.size(); j-- > 0;) {
        if (++args[j] < sz[j]) break;
        args[j] = 0;
      }
    }
    sizes.push_back(std::move(sz));
  }
  auto atom_id = [&](int pred, const std::vector<int>& args) {
    std::size_t id = 0;
    for (std::size_t j = 0; j < args.size(); ++j) id = id * sizes[pred][j] + args[j];
    return static_cast<int>(offset[pred] + id);
  };

  for (std::size_t f = 0; f < m.formulas.size(); ++f) {
    const auto cf = compile(m, f);
    const double w = m.formulas[f].weight;
    const std::size_t nv = cf.varSize.size();
    // Tables depend only on which atom slots coincide; cache by that pattern.
    std::map<std::vector<int>, std::vector<double>> cache;
    std::vector<int> val(nv, 0);
    bool more = std::find(cf.varSize.begin(), cf.varSize.end(), 0) == cf.varSize.end();
    while (more) {
      std::vector<int> slotToScope;
      std::vector<int> scope;
      for (std::size_t s = 0; s < cf.atoms.size(); ++s) {
        std::vector<int> args;
        for (int v : cf.atomVar[s]) args.push_back(val[v]);
        const int id = atom_id(cf.atomPred[s], args);
        auto it = std::find(scope.begin(), scope.end(), id);
        if (it == scope.end()) {
          slotToScope.push_back(static_cast<int>(scope.size()));
          scope.push_back(id);
        } else {
          slotToScope.push_back(static_cast<int>(it - scope.begin()));
        }
      }
      auto [cit, fresh] = cache.try_emplace(slotToScope);
      if (fresh) {
        std::vector<double>& table = cit->second;
        table.resize(std::size_t{1} << scope.size());
        std::vector<std::uint8_t> slotVal(cf.atoms.size());
        for (std::size_t e = 0; e < table.size(); ++e) {
          for (std::size_t s = 0; s < cf.atoms.size(); ++s) slotVal[s] = (e >> slotToScope[s]) & 1u;
          table[e] = eval(*m.formulas[f].expr, cf, slotVal) ? w : 0.0;
        }
      }
      g.factors.push_back({std::move(scope), cit->second});

      more = false;
      for (std::size_t j = nv; j-- > 0;) {
        if (++val[j] < cf.varSize[j]) {
          more = true;
          break;
        }
        val[j] = 0;
      }
    }
  }
  return g;
}

}  // namespace liftmmap
