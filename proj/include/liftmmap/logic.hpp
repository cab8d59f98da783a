#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liftmmap {

enum class Role { Max, Sum };

const char* role_name(Role r);

struct DomainDecl {
  std::string name;
  int size = 1;
};

// Where the groundings of a (possibly derived) predicate live in the
// original theory.  For every position of the original predicate we keep
// the current position it maps to (or -1 once that position has been
// grounded away) and a table from current constant to the set of original
// constants it stands for.  A current constant stands for more than one
// original constant after a domain reduction (decomposer, SOM-R).  Tables are
// immutable and shared between copies of a theory; a null table is the
// identity.
using ConstantTable = std::shared_ptr<const std::vector<std::vector<int>>>;

struct Origin {
  std::string base;
  std::vector<int> slot;
  std::vector<ConstantTable> table;

  // Original constants behind current constant `c` of original position `o`.
  std::vector<int> constants(std::size_t o, int c) const {
    return table[o] ? table[o]->at(c) : std::vector<int>{c};
  }
};

struct Predicate {
  std::string name;
  std::vector<std::string> argDomains;
  Role role = Role::Sum;
  Origin origin;

  std::size_t arity() const { return argDomains.size(); }
};

enum class Op { Atom, Not, And, Or, Implies, Equiv, True, False };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::True;
  std::string predicate;          // Op::Atom
  std::vector<std::string> args;  // Op::Atom, variables only
  std::vector<ExprPtr> children;

  static ExprPtr atom(std::string pred, std::vector<std::string> args);
  static ExprPtr constant(bool value);
  static ExprPtr unary(Op op, ExprPtr child);
  static ExprPtr nary(Op op, std::vector<ExprPtr> children);
};

std::string to_string(const Expr& e);

// Free variables in order of first occurrence.
std::vector<std::string> expr_vars(const Expr& e);

struct WeightedFormula {
  double weight = 0.0;
  ExprPtr expr;
  std::vector<std::string> vars;
};

WeightedFormula make_formula(double weight, ExprPtr expr);

struct MLN {
  std::vector<DomainDecl> domains;
  std::vector<Predicate> predicates;
  std::vector<WeightedFormula> formulas;
  double logConst = 0.0;

  const DomainDecl* find_domain(const std::string& name) const;
  const Predicate* find_predicate(const std::string& name) const;
  int predicate_index(const std::string& name) const;
  int domain_size(const std::string& name) const;

  // Domain of `var` inside formula `f`, looked up through its first atom.
  const std::string& var_domain(std::size_t f, const std::string& var) const;

  // Number of ground atoms of predicate `p`.
  long double groundings(const Predicate& p) const;
  // Number of groundings of formula `f`.
  long double groundings(const WeightedFormula& f) const;
};

// Identity provenance for a freshly declared predicate.
Origin identity_origin(const std::string& name, const std::vector<int>& sizes);

struct Position {
  std::string predicate;
  int index = 0;
  auto operator<=>(const Position&) const = default;
};

struct FormulaVar {
  std::size_t formula = 0;
  std::string var;
  auto operator<=>(const FormulaVar&) const = default;
};

struct EquivClass {
  int id = 0;
  std::vector<Position> positions;
  std::vector<FormulaVar> memberVars;
  std::string domain;

  bool has_position(const std::string& pred, int idx) const;
  // Positions of `pred` belonging to this class, ascending.
  std::vector<int> positions_of(const std::string& pred) const;
  // Class variables occurring in formula `f`, sorted by name.
  std::vector<std::string> vars_in(std::size_t f) const;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NormalFormViolation {
  std::size_t formula = 0;
  Position first;
  Position second;
  std::string firstDomain;
  std::string secondDomain;
  std::string message;
};

// Checks constant-freeness and that positions linked by a shared variable
// have the same domain.  Returns the first violation found.
std::optional<NormalFormViolation> validate_normal_form(const MLN& m);

// Renames variables to x0, x1, ... in order of formula and first occurrence.
MLN standardize_apart(const MLN& m);

// Union-find closure of predicate positions linked through formula
// variables.  Classes are numbered by first appearance.
std::vector<EquivClass> compute_classes(const MLN& m);

// Throws ValidationError on dangling references, arity mismatch or an
// inconsistent role partition.
void check_well_formed(const MLN& m);

}  // namespace liftmmap
