#include "liftmmap/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace liftmmap {

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_lower_ident(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

// Cursor over a single line.
class LineReader {
 public:
  LineReader(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  // Peeks at an identifier without consuming it.
  std::string peek_identifier() {
    skip_ws();
    std::size_t p = pos_;
    if (p >= text_.size() || !ident_start(text_[p])) return {};
    while (p < text_.size() && ident_char(text_[p])) ++p;
    return std::string(text_.substr(pos_, p - pos_));
  }
  double number() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    const std::string tok(text_.substr(pos_, end - pos_));
    double v = 0;
    std::size_t used = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("expected a weight");
    }
    if (used != tok.size() || !std::isfinite(v)) fail("invalid weight '" + tok + "'");
    pos_ = end;
    return v;
  }
  long integer() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    long v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, v);
    if (ec != std::errc() || end == pos_) fail("expected a positive integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, static_cast<int>(pos_) + 1, what);
  }
  [[noreturn]] void fail_at(int column, const std::string& what) const {
    throw ParseError(line_, column, what);
  }
  int column() const { return static_cast<int>(pos_) + 1; }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

struct PendingPredicate {
  std::string name;
  std::vector<std::string> domains;
  int line;
};

class FormulaParser {
 public:
  FormulaParser(LineReader& r, const std::map<std::string, std::size_t>& arity)
      : r_(r), arity_(arity) {}

  ExprPtr parse() {
    ExprPtr e = equiv();
    if (!r_.at_end()) r_.fail("unexpected trailing input");
    return e;
  }

 private:
  ExprPtr equiv() {
    ExprPtr lhs = implies();
    while (r_.accept("<=>")) lhs = Expr::nary(Op::Equiv, {lhs, implies()});
    return lhs;
  }
  ExprPtr implies() {
    ExprPtr lhs = disj();
    if (r_.accept("=>")) return Expr::nary(Op::Implies, {lhs, implies()});
    return lhs;
  }
  ExprPtr disj() {
    std::vector<ExprPtr> parts{conj()};
    while (r_.peek_identifier() == "v") {
      r_.identifier();
      parts.push_back(conj());
    }
    return parts.size() == 1 ? parts[0] : Expr::nary(Op::Or, std::move(parts));
  }
  ExprPtr conj() {
    std::vector<ExprPtr> parts{neg()};
    while (r_.accept("^")) parts.push_back(neg());
    return parts.size() == 1 ? parts[0] : Expr::nary(Op::And, std::move(parts));
  }
  ExprPtr neg() {
    if (r_.accept("!")) return Expr::unary(Op::Not, neg());
    if (r_.accept("(")) {
      ExprPtr e = equiv();
      r_.expect(")");
      return e;
    }
    return atom();
  }
  ExprPtr atom() {
    const int col = r_.column();
    std::string name = r_.identifier();
    if (is_lower_ident(name)) r_.fail("expected predicate, found variable '" + name + "'");
    auto it = arity_.find(name);
    if (it == arity_.end()) r_.fail("undeclared predicate '" + name + "'");
    r_.expect("(");
    std::vector<std::string> args;
    if (!r_.accept(")")) {
      do {
        const int argCol = r_.column();
        if (std::isdigit(static_cast<unsigned char>(r_.peek())))
          r_.fail("constant in formula; only variables are allowed");
        std::string a = r_.identifier();
        if (!is_lower_ident(a))
          r_.fail("constant '" + a + "' in formula; only variables are allowed");
        for (const auto& prev : args)
          if (prev == a) r_.fail_at(argCol, "variable '" + a + "' repeated inside one atom");
        args.push_back(std::move(a));
      } while (r_.accept(","));
      r_.expect(")");
    }
    if (args.size() != it->second)
      r_.fail_at(col, "arity mismatch for '" + name + "': expected " +
                          std::to_string(it->second) + ", got " + std::to_string(args.size()));
    return Expr::atom(std::move(name), std::move(args));
  }

  LineReader& r_;
  const std::map<std::string, std::size_t>& arity_;
};

std::string strip_comment(std::string_view line) {
  const auto c = line.find("//");
  return std::string(c == std::string_view::npos ? line : line.substr(0, c));
}

}  // namespace

MLN parse_mln(std::string_view text) {
  MLN m;
  std::map<std::string, std::size_t> arity;
  std::map<std::string, int> domainLine;
  std::map<std::string, Role> roles;
  std::vector<PendingPredicate> preds;
  std::vector<std::pair<int, std::string>> formulaLines;

  int lineNo = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineNo;
    std::string line = strip_comment(text.substr(start, end - start));
    start = end + 1;
    LineReader r(line, lineNo);
    if (r.at_end()) continue;

    const std::string head = r.peek_identifier();
    if (head == "domain") {
      r.identifier();
      std::string name = r.identifier();
      const long size = r.integer();
      if (size < 1) r.fail("domain size must be >= 1");
      if (!r.at_end()) r.fail("unexpected trailing input");
      if (domainLine.count(name)) r.fail("duplicate domain '" + name + "'");
      domainLine[name] = lineNo;
      m.domains.push_back({name, static_cast<int>(size)});
    } else if (head == "predicate") {
      r.identifier();
      PendingPredicate p;
      p.line = lineNo;
      p.name = r.identifier();
      if (is_lower_ident(p.name)) r.fail("predicate names must start uppercase");
      r.expect("(");
      if (!r.accept(")")) {
        do {
          std::string d = r.identifier();
          if (!domainLine.count(d)) r.fail("undeclared domain '" + d + "'");
          p.domains.push_back(std::move(d));
        } while (r.accept(","));
        r.expect(")");
      }
      if (!r.at_end()) r.fail("unexpected trailing input");
      if (arity.count(p.name)) r.fail("duplicate predicate '" + p.name + "'");
      arity[p.name] = p.domains.size();
      preds.push_back(std::move(p));
    } else if (head == "max" || head == "sum") {
      r.identifier();
      r.expect(":");
      const Role role = head == "max" ? Role::Max : Role::Sum;
      if (!r.at_end()) {
        do {
          std::string name = r.identifier();
          if (!arity.count(name)) r.fail("undeclared predicate '" + name + "'");
          if (roles.count(name)) r.fail("predicate '" + name + "' assigned a role twice");
          roles[name] = role;
        } while (r.accept(","));
      }
      if (!r.at_end()) r.fail("unexpected trailing input");
    } else {
      formulaLines.emplace_back(lineNo, line);
    }
  }

  for (const auto& p : preds) {
    auto it = roles.find(p.name);
    if (it == roles.end())
      throw ParseError(p.line, 1, "predicate '" + p.name + "' has no max/sum role");
    Predicate pred;
    pred.name = p.name;
    pred.argDomains = p.domains;
    pred.role = it->second;
    std::vector<int> sizes;
    for (const auto& d : p.domains) sizes.push_back(m.domain_size(d));
    pred.origin = identity_origin(p.name, sizes);
    m.predicates.push_back(std::move(pred));
  }

  for (const auto& [ln, text] : formulaLines) {
    LineReader r(text, ln);
    const double w = r.number();
    FormulaParser fp(r, arity);
    m.formulas.push_back(make_formula(w, fp.parse()));
  }

  if (auto bad = validate_normal_form(m))
    throw ParseError(formulaLines.at(bad->formula).first, 1, bad->message);
  return m;
}

MLN parse_mln(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mln(ss.str());
}

MLN load_mln(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_mln(in);
}

std::string serialize_mln(const MLN& m) {
  std::ostringstream out;
  for (const auto& d : m.domains) out << "domain " << d.name << ' ' << d.size << '\n';
  for (const auto& p : m.predicates) {
    out << "predicate " << p.name << '(';
    for (std::size_t i = 0; i < p.argDomains.size(); ++i) out << (i ? ", " : "") << p.argDomains[i];
    out << ")\n";
  }
  for (Role role : {Role::Max, Role::Sum}) {
    std::vector<std::string> names;
    for (const auto& p : m.predicates)
      if (p.role == role) names.push_back(p.name);
    if (names.empty()) continue;
    out << (role == Role::Max ? "max:" : "sum:");
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : " ") << names[i];
    out << '\n';
  }
  if (m.logConst != 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", m.logConst);
    out << "// logConst " << buf << '\n';
  }
  for (const auto& f : m.formulas) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", f.weight);
    out << buf << ' ' << to_string(*f.expr) << '\n';
  }
  return out.str();
}

namespace {
const char* op_name(Op op) {
  switch (op) {
    case Op::Atom: return "atom";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "implies";
    case Op::Equiv: return "equiv";
    case Op::True: return "true";
    case Op::False: return "false";
  }
  return "?";
}

Op op_from_name(const std::string& s) {
  static const std::map<std::string, Op> table{
      {"atom", Op::Atom}, {"not", Op::Not},         {"and", Op::And},     {"or", Op::Or},
      {"implies", Op::Implies}, {"equiv", Op::Equiv}, {"true", Op::True}, {"false", Op::False}};
  auto it = table.find(s);
  if (it == table.end()) throw ValidationError("unknown connective '" + s + "'");
  return it->second;
}
}  // namespace

nlohmann::json to_json(const Expr& e) {
  nlohmann::json j;
  j["op"] = op_name(e.op);
  if (e.op == Op::Atom) {
    j["predicate"] = e.predicate;
    j["args"] = e.args;
  } else if (!e.children.empty()) {
    j["children"] = nlohmann::json::array();
    for (const auto& c : e.children) j["children"].push_back(to_json(*c));
  }
  return j;
}

ExprPtr expr_from_json(const nlohmann::json& j) {
  const Op op = op_from_name(j.at("op").get<std::string>());
  if (op == Op::Atom)
    return Expr::atom(j.at("predicate").get<std::string>(),
                      j.at("args").get<std::vector<std::string>>());
  if (op == Op::True || op == Op::False) return Expr::constant(op == Op::True);
  std::vector<ExprPtr> kids;
  for (const auto& c : j.at("children")) kids.push_back(expr_from_json(c));
  return Expr::nary(op, std::move(kids));
}

nlohmann::json to_json(const MLN& m) {
  nlohmann::json j;
  j["domains"] = nlohmann::json::array();
  for (const auto& d : m.domains) j["domains"].push_back({{"name", d.name}, {"size", d.size}});
  j["predicates"] = nlohmann::json::array();
  for (const auto& p : m.predicates)
    j["predicates"].push_back(
        {{"name", p.name}, {"argDomains", p.argDomains}, {"role", role_name(p.role)}});
  j["formulas"] = nlohmann::json::array();
  for (const auto& f : m.formulas)
    j["formulas"].push_back({{"weight", f.weight}, {"expr", to_json(*f.expr)}, {"vars", f.vars}});
  j["logConst"] = m.logConst;
  return j;
}

MLN mln_from_json(const nlohmann::json& j) {
  MLN m;
  for (const auto& d : j.at("domains"))
    m.domains.push_back({d.at("name").get<std::string>(), d.at("size").get<int>()});
  for (const auto& pj : j.at("predicates")) {
    Predicate p;
    p.name = pj.at("name").get<std::string>();
    p.argDomains = pj.at("argDomains").get<std::vector<std::string>>();
    const auto role = pj.at("role").get<std::string>();
    if (role != "MAX" && role != "SUM") throw ValidationError("bad role '" + role + "'");
    p.role = role == "MAX" ? Role::Max : Role::Sum;
    m.predicates.push_back(std::move(p));
  }
  check_well_formed(MLN{m.domains, m.predicates, {}, 0.0});
  for (auto& p : m.predicates) {
    std::vector<int> sizes;
    for (const auto& d : p.argDomains) sizes.push_back(m.domain_size(d));
    p.origin = identity_origin(p.name, sizes);
  }
  for (const auto& fj : j.at("formulas"))
    m.formulas.push_back(make_formula(fj.at("weight").get<double>(), expr_from_json(fj.at("expr"))));
  m.logConst = j.value("logConst", 0.0);
  check_well_formed(m);
  if (auto bad = validate_normal_form(m)) throw ValidationError(bad->message);
  return m;
}

}  // namespace liftmmap
