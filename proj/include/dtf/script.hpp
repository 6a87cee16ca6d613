#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dtf/darboux.hpp"
#include "dtf/schrodinger.hpp"

namespace dtf {

/// Expression tree of the operator language.
struct Expr {
  enum class Kind { Number, Name, Dx, Dy, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  std::string text;  // digits, identifier or callee
  std::vector<std::shared_ptr<const Expr>> args;
  int line = 0;
  int col = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

struct Statement {
  enum class Kind { Declare, Let, Kernel };
  Kind kind = Kind::Let;
  std::string name;
  ExprPtr value;  // let value, kernel element, dx image of a declaration
  ExprPtr dy;     // dy image of a declaration
  int line = 0;
};

struct Script {
  std::vector<Statement> statements;
};

/// Throws SyntaxError with "line:col" in the message.
Script parse_script(const std::string& text);
ExprPtr parse_expression(const std::string& text);

/// Canonical text; parse_script(print_script(s)) prints back identically.
std::string print_script(const Script& script);
std::string print_expression(const Expr& e);

/// Morphism candidate that has not been verified yet.
struct PairValue {
  SchrodingerOp source;
  SchrodingerOp target;
  DiffOp m;
  DiffOp n;
};

struct KeywordValue {
  std::string word;  // right | left
};

using Value = std::variant<FieldElem, DiffOp, SchrodingerOp, DarbouxMorphism, PairValue, KeywordValue>;

const char* value_kind(const Value& v);

/// Runs statements against the active tower and keeps named bindings and
/// certified kernel hints.
class Environment {
 public:
  void run(const Script& script);
  Value evaluate(const Expr& e) const;
  Value evaluate(const std::string& expression) const { return evaluate(*parse_expression(expression)); }

  const Value& lookup(const std::string& name) const;
  bool has(const std::string& name) const { return bindings_.count(name) > 0; }
  // Most recently bound name holding a value of the given kind, if any.
  std::string last_of_kind(const std::string& kind) const;

  const KernelRegistry& kernels() const { return kernels_; }

  FieldElem as_field(const Value& v, const std::string& what) const;
  DiffOp as_diffop(const Value& v, const std::string& what) const;
  SchrodingerOp as_schrodinger(const Value& v, const std::string& what) const;
  DarbouxMorphism as_morphism(const Value& v, const std::string& what) const;

 private:
  Value call(const Expr& e) const;

  std::map<std::string, Value> bindings_;
  std::vector<std::string> order_;
  KernelRegistry kernels_;
};

}  // namespace dtf
