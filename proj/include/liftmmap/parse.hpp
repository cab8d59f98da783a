#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "liftmmap/logic.hpp"

namespace liftmmap {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Reads the line-oriented MLN text format:
//
//   domain person 5
//   predicate Smokes(person)
//   predicate Rain()
//   max: Smokes
//   sum: Rain
//   1.5 Smokes(x) => Rain()
//
// Connectives are ! ^ v => <=> with the usual precedence (! binds tightest,
// <=> loosest, => associates to the right).  Arguments must be lowercase
// variables; constants are rejected.
MLN parse_mln(std::string_view text);
MLN parse_mln(std::istream& in);
MLN load_mln(const std::string& path);

// Inverse of parse_mln.  parse_mln(serialize_mln(m)) reproduces m up to
// provenance data.
std::string serialize_mln(const MLN& m);

nlohmann::json to_json(const Expr& e);
ExprPtr expr_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MLN& m);
MLN mln_from_json(const nlohmann::json& j);

}  // namespace liftmmap
