#include "liftmmap/logic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace liftmmap {

const char* role_name(Role r) { return r == Role::Max ? "MAX" : "SUM"; }

ExprPtr Expr::atom(std::string pred, std::vector<std::string> args) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Atom;
  e->predicate = std::move(pred);
  e->args = std::move(args);
  return e;
}

ExprPtr Expr::constant(bool value) {
  auto e = std::make_shared<Expr>();
  e->op = value ? Op::True : Op::False;
  return e;
}

ExprPtr Expr::unary(Op op, ExprPtr child) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->children.push_back(std::move(child));
  return e;
}

ExprPtr Expr::nary(Op op, std::vector<ExprPtr> children) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->children = std::move(children);
  return e;
}

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Equiv: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return 5;
    default: return 6;
  }
}

void print(const Expr& e, std::string& out, int parent) {
  const int prec = precedence(e.op);
  const bool paren = prec <= parent && prec < 5;
  if (paren) out += '(';
  switch (e.op) {
    case Op::Atom:
      out += e.predicate;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += e.args[i];
      }
      out += ')';
      break;
    case Op::True: out += "TRUE"; break;
    case Op::False: out += "FALSE"; break;
    case Op::Not:
      out += '!';
      print(*e.children[0], out, prec);
      break;
    default: {
      const char* sep = e.op == Op::And ? " ^ "
                        : e.op == Op::Or ? " v "
                        : e.op == Op::Implies ? " => " : " <=> ";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += sep;
        print(*e.children[i], out, prec);
      }
    }
  }
  if (paren) out += ')';
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Op::Atom) {
    for (const auto& a : e.args)
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return;
  }
  for (const auto& c : e.children) collect_vars(*c, out);
}

const Expr* first_atom_with(const Expr& e, const std::string& var, int& pos) {
  if (e.op == Op::Atom) {
    for (std::size_t i = 0; i < e.args.size(); ++i)
      if (e.args[i] == var) {
        pos = static_cast<int>(i);
        return &e;
      }
    return nullptr;
  }
  for (const auto& c : e.children)
    if (const Expr* hit = first_atom_with(*c, var, pos)) return hit;
  return nullptr;
}

void for_each_atom(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (e.op == Op::Atom) {
    fn(e);
    return;
  }
  for (const auto& c : e.children) for_each_atom(*c, fn);
}

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& names) {
  if (e->op == Op::Atom) {
    std::vector<std::string> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) args.push_back(names.at(a));
    return Expr::atom(e->predicate, std::move(args));
  }
  if (e->children.empty()) return e;
  std::vector<ExprPtr> kids;
  kids.reserve(e->children.size());
  for (const auto& c : e->children) kids.push_back(rename(c, names));
  return Expr::nary(e->op, std::move(kids));
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out, 0);
  return out;
}

std::vector<std::string> expr_vars(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

WeightedFormula make_formula(double weight, ExprPtr expr) {
  WeightedFormula f;
  f.weight = weight;
  f.vars = expr_vars(*expr);
  f.expr = std::move(expr);
  return f;
}

const DomainDecl* MLN::find_domain(const std::string& name) const {
  for (const auto& d : domains)
    if (d.name == name) return &d;
  return nullptr;
}

const Predicate* MLN::find_predicate(const std::string& name) const {
  for (const auto& p : predicates)
    if (p.name == name) return &p;
  return nullptr;
}

int MLN::predicate_index(const std::string& name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i].name == name) return static_cast<int>(i);
  return -1;
}

int MLN::domain_size(const std::string& name) const {
  const DomainDecl* d = find_domain(name);
  if (!d) throw ValidationError("undeclared domain '" + name + "'");
  return d->size;
}

const std::string& MLN::var_domain(std::size_t f, const std::string& var) const {
  int pos = 0;
  const Expr* a = first_atom_with(*formulas.at(f).expr, var, pos);
  if (!a) throw ValidationError("variable '" + var + "' does not occur in formula");
  const Predicate* p = find_predicate(a->predicate);
  if (!p) throw ValidationError("undeclared predicate '" + a->predicate + "'");
  return p->argDomains.at(pos);
}

long double MLN::groundings(const Predicate& p) const {
  long double n = 1;
  for (const auto& d : p.argDomains) n *= domain_size(d);
  return n;
}

long double MLN::groundings(const WeightedFormula& f) const {
  const auto idx = static_cast<std::size_t>(&f - formulas.data());
  long double n = 1;
  for (const auto& v : f.vars) n *= domain_size(var_domain(idx, v));
  return n;
}

Origin identity_origin(const std::string& name, const std::vector<int>& sizes) {
  Origin o;
  o.base = name;
  for (std::size_t i = 0; i < sizes.size(); ++i) o.slot.push_back(static_cast<int>(i));
  o.table.resize(sizes.size());
  return o;
}

bool EquivClass::has_position(const std::string& pred, int idx) const {
  return std::binary_search(positions.begin(), positions.end(), Position{pred, idx});
}

std::vector<int> EquivClass::positions_of(const std::string& pred) const {
  std::vector<int> out;
  for (const auto& p : positions)
    if (p.predicate == pred) out.push_back(p.index);
  return out;
}

std::vector<std::string> EquivClass::vars_in(std::size_t f) const {
  std::vector<std::string> out;
  for (const auto& mv : memberVars)
    if (mv.formula == f) out.push_back(mv.var);
  return out;
}

void check_well_formed(const MLN& m) {
  std::set<std::string> seen;
  for (const auto& d : m.domains) {
    if (d.size < 1) throw ValidationError("domain '" + d.name + "' must have size >= 1");
    if (!seen.insert(d.name).second) throw ValidationError("duplicate domain '" + d.name + "'");
  }
  seen.clear();
  for (const auto& p : m.predicates) {
    if (!seen.insert(p.name).second) throw ValidationError("duplicate predicate '" + p.name + "'");
    for (const auto& d : p.argDomains)
      if (!m.find_domain(d))
        throw ValidationError("predicate '" + p.name + "' uses undeclared domain '" + d + "'");
  }
  for (const auto& f : m.formulas) {
    for_each_atom(*f.expr, [&](const Expr& a) {
      const Predicate* p = m.find_predicate(a.predicate);
      if (!p) throw ValidationError("undeclared predicate '" + a.predicate + "'");
      if (p->arity() != a.args.size())
        throw ValidationError("arity mismatch for '" + a.predicate + "': expected " +
                              std::to_string(p->arity()) + ", got " +
                              std::to_string(a.args.size()));
    });
  }
}

std::optional<NormalFormViolation> validate_normal_form(const MLN& m) {
  for (std::size_t f = 0; f < m.formulas.size(); ++f) {
    std::map<std::string, std::pair<Position, std::string>> bound;
    std::optional<NormalFormViolation> bad;
    for_each_atom(*m.formulas[f].expr, [&](const Expr& a) {
      if (bad) return;
      const Predicate* p = m.find_predicate(a.predicate);
      if (!p) return;
      for (std::size_t i = 0; i < a.args.size() && i < p->arity(); ++i) {
        Position here{a.predicate, static_cast<int>(i)};
        auto [it, fresh] = bound.emplace(a.args[i], std::make_pair(here, p->argDomains[i]));
        if (!fresh && it->second.second != p->argDomains[i]) {
          bad = NormalFormViolation{f, it->second.first, here, it->second.second,
                                    p->argDomains[i],
                                    "variable '" + a.args[i] + "' spans domains '" +
                                        it->second.second + "' and '" + p->argDomains[i] + "'"};
          return;
        }
      }
    });
    if (bad) return bad;
  }
  // Positions are typed by their predicate, so linking through classes can
  // only join positions whose domains already agree pairwise per formula.
  return std::nullopt;
}

MLN standardize_apart(const MLN& m) {
  MLN out = m;
  int counter = 0;
  for (auto& f : out.formulas) {
    std::map<std::string, std::string> names;
    for (const auto& v : f.vars) names[v] = "x" + std::to_string(counter++);
    f.expr = rename(f.expr, names);
    for (auto& v : f.vars) v = names.at(v);
  }
  return out;
}

std::vector<EquivClass> compute_classes(const MLN& m) {
  // Nodes: every predicate position, then every (formula, var) pair.
  std::map<Position, std::size_t> posId;
  std::vector<Position> positions;
  for (const auto& p : m.predicates)
    for (std::size_t i = 0; i < p.arity(); ++i) {
      posId[{p.name, static_cast<int>(i)}] = positions.size();
      positions.push_back({p.name, static_cast<int>(i)});
    }
  std::map<FormulaVar, std::size_t> varId;
  std::vector<FormulaVar> vars;
  // Order of first appearance drives class numbering.
  std::vector<std::size_t> appearance;
  for (std::size_t f = 0; f < m.formulas.size(); ++f)
    for_each_atom(*m.formulas[f].expr, [&](const Expr& a) {
      for (const auto& v : a.args) {
        FormulaVar fv{f, v};
        if (!varId.count(fv)) {
          varId[fv] = positions.size() + vars.size();
          vars.push_back(fv);
        }
      }
    });

  UnionFind uf(positions.size() + vars.size());
  for (std::size_t f = 0; f < m.formulas.size(); ++f)
    for_each_atom(*m.formulas[f].expr, [&](const Expr& a) {
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        auto pit = posId.find({a.predicate, static_cast<int>(i)});
        if (pit == posId.end()) continue;
        const std::size_t vid = varId.at({f, a.args[i]});
        uf.unite(vid, pit->second);
        appearance.push_back(vid);
      }
    });

  std::map<std::size_t, int> rootToClass;
  std::vector<EquivClass> classes;
  for (std::size_t vid : appearance) {
    const std::size_t root = uf.find(vid);
    if (!rootToClass.count(root)) {
      rootToClass[root] = static_cast<int>(classes.size());
      EquivClass c;
      c.id = static_cast<int>(classes.size());
      classes.push_back(std::move(c));
    }
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    auto it = rootToClass.find(uf.find(i));
    if (it == rootToClass.end()) continue;  // position never touched by a variable
    auto& c = classes[it->second];
    c.positions.push_back(positions[i]);
    if (c.domain.empty()) c.domain = m.find_predicate(positions[i].predicate)->argDomains[positions[i].index];
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto it = rootToClass.find(uf.find(positions.size() + j));
    if (it != rootToClass.end()) classes[it->second].memberVars.push_back(vars[j]);
  }
  for (auto& c : classes) {
    std::sort(c.positions.begin(), c.positions.end());
    std::sort(c.memberVars.begin(), c.memberVars.end());
  }
  return classes;
}

}  // namespace liftmmap
