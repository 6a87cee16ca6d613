#include "dtf/script.hpp"

#include <cctype>
#include <optional>

#include "dtf/error.hpp"

namespace dtf {

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
  enum class Kind { Number, Ident, Punct, End };
  Kind kind;
  std::string text;
  int line;
  int col;
};

std::string where(int line, int col) { return std::to_string(line) + ":" + std::to_string(col); }

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
    } else if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::Number, src.substr(i, j - i), line, col});
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, src.substr(i, j - i), line, col});
      advance(j - i);
    } else if (std::string("+-*/^(),;:=").find(ch) != std::string::npos) {
      out.push_back({Token::Kind::Punct, std::string(1, ch), line, col});
      advance(1);
    } else {
      throw Error(ErrorCode::SyntaxError, where(line, col) + ": unexpected character '" + std::string(1, ch) + "'");
    }
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(const std::string& src) : tokens_(tokenize(src)) {}

  Script script() {
    Script s;
    while (peek().kind != Token::Kind::End) s.statements.push_back(statement());
    return s;
  }

  ExprPtr lone_expression() {
    ExprPtr e = expr();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool at_punct(const char* p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }
  bool at_word(const char* w) const { return peek().kind == Token::Kind::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError, where(peek().line, peek().col) + ": " + msg);
  }

  Token take() { return tokens_[pos_++]; }

  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(std::string("expected '") + p + "'");
    ++pos_;
  }

  void expect_word(const char* w) {
    if (!at_word(w)) fail(std::string("expected '") + w + "'");
    ++pos_;
  }

  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail("expected a name");
    return take().text;
  }

  Statement statement() {
    Statement s;
    s.line = peek().line;
    if (at_word("declare")) {
      ++pos_;
      s.kind = Statement::Kind::Declare;
      s.name = ident();
      expect_punct(":");
      expect_word("dx");
      expect_punct("=");
      s.value = expr();
      expect_punct(",");
      expect_word("dy");
      expect_punct("=");
      s.dy = expr();
    } else if (at_word("let")) {
      ++pos_;
      s.kind = Statement::Kind::Let;
      s.name = ident();
      expect_punct("=");
      s.value = expr();
    } else if (at_word("kernel")) {
      ++pos_;
      s.kind = Statement::Kind::Kernel;
      s.name = ident();
      expect_punct(":");
      s.value = expr();
    } else {
      fail("expected 'declare', 'let' or 'kernel'");
    }
    expect_punct(";");
    return s;
  }

  static ExprPtr node(Expr::Kind kind, const Token& at, std::string text, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->text = std::move(text);
    e->args = std::move(args);
    e->line = at.line;
    e->col = at.col;
    return e;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (at_punct("+") || at_punct("-")) {
      const Token op = take();
      ExprPtr rhs = term();
      lhs = node(op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, op, "", {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (at_punct("*") || at_punct("/")) {
      const Token op = take();
      ExprPtr rhs = unary();
      lhs = node(op.text == "*" ? Expr::Kind::Mul : Expr::Kind::Div, op, "", {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_punct("-")) {
      const Token op = take();
      return node(Expr::Kind::Neg, op, "", {unary()});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    while (at_punct("^")) {
      const Token op = take();
      ExprPtr exponent;
      if (at_punct("-")) {
        const Token minus = take();
        if (peek().kind != Token::Kind::Number) fail("expected an integer exponent");
        const Token digits = take();
        exponent = node(Expr::Kind::Neg, minus, "", {node(Expr::Kind::Number, digits, digits.text, {})});
      } else {
        if (peek().kind != Token::Kind::Number) fail("expected an integer exponent");
        const Token digits = take();
        exponent = node(Expr::Kind::Number, digits, digits.text, {});
      }
      base = node(Expr::Kind::Pow, op, "", {base, exponent});
    }
    return base;
  }

  ExprPtr primary() {
    const Token t = peek();
    if (t.kind == Token::Kind::Number) {
      ++pos_;
      return node(Expr::Kind::Number, t, t.text, {});
    }
    if (t.kind == Token::Kind::Ident) {
      ++pos_;
      if (t.text == "Dx") return node(Expr::Kind::Dx, t, t.text, {});
      if (t.text == "Dy") return node(Expr::Kind::Dy, t, t.text, {});
      if (at_punct("(")) {
        ++pos_;
        std::vector<ExprPtr> args;
        if (!at_punct(")")) {
          args.push_back(expr());
          while (at_punct(",")) {
            ++pos_;
            args.push_back(expr());
          }
        }
        expect_punct(")");
        return node(Expr::Kind::Call, t, t.text, std::move(args));
      }
      return node(Expr::Kind::Name, t, t.text, {});
    }
    if (at_punct("(")) {
      ++pos_;
      ExprPtr inner = expr();
      expect_punct(")");
      return inner;
    }
    fail(t.kind == Token::Kind::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string wrap(const Expr& e, int min_prec) {
  const std::string s = print_expression(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

Script parse_script(const std::string& text) { return Parser(text).script(); }

ExprPtr parse_expression(const std::string& text) { return Parser(text).lone_expression(); }

std::string print_expression(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Name:
    case Expr::Kind::Dx:
    case Expr::Kind::Dy:
      return e.text;
    case Expr::Kind::Neg:
      return "-" + wrap(*e.args[0], 3);
    case Expr::Kind::Add:
      return wrap(*e.args[0], 1) + " + " + wrap(*e.args[1], 2);
    case Expr::Kind::Sub:
      return wrap(*e.args[0], 1) + " - " + wrap(*e.args[1], 2);
    case Expr::Kind::Mul:
      return wrap(*e.args[0], 2) + "*" + wrap(*e.args[1], 3);
    case Expr::Kind::Div:
      return wrap(*e.args[0], 2) + "/" + wrap(*e.args[1], 3);
    case Expr::Kind::Pow:
      return wrap(*e.args[0], 5) + "^" + print_expression(*e.args[1]);
    case Expr::Kind::Call: {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + print_expression(*e.args[i]);
      return out + ")";
    }
  }
  return "";
}

std::string print_script(const Script& script) {
  std::string out;
  for (const auto& s : script.statements) {
    switch (s.kind) {
      case Statement::Kind::Declare:
        out += "declare " + s.name + " : dx = " + print_expression(*s.value) + ", dy = " + print_expression(*s.dy) + ";\n";
        break;
      case Statement::Kind::Let:
        out += "let " + s.name + " = " + print_expression(*s.value) + ";\n";
        break;
      case Statement::Kind::Kernel:
        out += "kernel " + s.name + " : " + print_expression(*s.value) + ";\n";
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

const char* value_kind(const Value& v) {
  switch (v.index()) {
    case 0: return "function";
    case 1: return "operator";
    case 2: return "schrodinger";
    case 3: return "morphism";
    case 4: return "pair";
    case 5: return "keyword";
  }
  return "?";
}

namespace {

[[noreturn]] void type_error(const Expr& e, const std::string& msg) {
  throw Error(ErrorCode::TypeError, where(e.line, e.col) + ": " + msg);
}

bool is_field(const Value& v) { return std::holds_alternative<FieldElem>(v); }

}  // namespace

FieldElem Environment::as_field(const Value& v, const std::string& what) const {
  if (const auto* f = std::get_if<FieldElem>(&v)) return *f;
  throw Error(ErrorCode::TypeError, what + ": expected a function, got " + value_kind(v));
}

DiffOp Environment::as_diffop(const Value& v, const std::string& what) const {
  if (const auto* f = std::get_if<FieldElem>(&v)) return DiffOp(*f);
  if (const auto* p = std::get_if<DiffOp>(&v)) return *p;
  if (const auto* l = std::get_if<SchrodingerOp>(&v)) return l->as_diffop();
  throw Error(ErrorCode::TypeError, what + ": expected an operator, got " + value_kind(v));
}

SchrodingerOp Environment::as_schrodinger(const Value& v, const std::string& what) const {
  if (const auto* l = std::get_if<SchrodingerOp>(&v)) return *l;
  if (const auto* p = std::get_if<DiffOp>(&v)) {
    try {
      return SchrodingerOp::from_diffop(*p);
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::TypeError, what + ": expected a Schrodinger operator, got " + value_kind(v));
}

DarbouxMorphism Environment::as_morphism(const Value& v, const std::string& what) const {
  if (const auto* m = std::get_if<DarbouxMorphism>(&v)) return *m;
  if (const auto* p = std::get_if<PairValue>(&v)) return DarbouxMorphism(p->source, p->target, p->m, p->n);
  throw Error(ErrorCode::TypeError, what + ": expected a morphism, got " + value_kind(v));
}

const Value& Environment::lookup(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) throw Error(ErrorCode::UnboundName, "unbound name '" + name + "'");
  return it->second;
}

std::string Environment::last_of_kind(const std::string& kind) const {
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    if (kind == value_kind(bindings_.at(*it))) return *it;
  }
  return {};
}

void Environment::run(const Script& script) {
  Tower& tower = active_tower();
  for (const auto& s : script.statements) {
    switch (s.kind) {
      case Statement::Kind::Declare: {
        const std::size_t index = tower.reserve(s.name);
        FieldElem dx, dy;
        try {
          dx = as_field(evaluate(*s.value), "dx image of " + s.name);
          dy = as_field(evaluate(*s.dy), "dy image of " + s.name);
        } catch (...) {
          tower.define(index, FieldElem(0L), FieldElem(0L));
          throw;
        }
        tower.define(index, dx, dy);
        break;
      }
      case Statement::Kind::Let: {
        Value v = evaluate(*s.value);
        if (bindings_.count(s.name) == 0) {
          order_.push_back(s.name);
        } else {
          std::erase(order_, s.name);
          order_.push_back(s.name);
        }
        bindings_.insert_or_assign(s.name, std::move(v));
        break;
      }
      case Statement::Kind::Kernel: {
        const SchrodingerOp l = as_schrodinger(lookup(s.name), "kernel statement");
        kernels_.add(l, as_field(evaluate(*s.value), "kernel element"));
        break;
      }
    }
  }
}

Value Environment::evaluate(const Expr& e) const {
  switch (e.kind) {
    case Expr::Kind::Number:
      return FieldElem(Poly(mpz_class(e.text)));
    case Expr::Kind::Name: {
      if (auto it = bindings_.find(e.text); it != bindings_.end()) return it->second;
      if (e.text == "x") return FieldElem::x();
      if (e.text == "y") return FieldElem::y();
      if (e.text == "right" || e.text == "left") return KeywordValue{e.text};
      if (auto index = active_tower().find(e.text)) return FieldElem::symbol(*index);
      throw Error(ErrorCode::UnboundName, where(e.line, e.col) + ": unbound name '" + e.text + "'");
    }
    case Expr::Kind::Dx:
      return DiffOp::dx();
    case Expr::Kind::Dy:
      return DiffOp::dy();
    case Expr::Kind::Neg: {
      Value v = evaluate(*e.args[0]);
      if (is_field(v)) return -std::get<FieldElem>(v);
      return -as_diffop(v, "negation");
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul: {
      Value l = evaluate(*e.args[0]), r = evaluate(*e.args[1]);
      if (is_field(l) && is_field(r)) {
        const FieldElem& a = std::get<FieldElem>(l);
        const FieldElem& b = std::get<FieldElem>(r);
        if (e.kind == Expr::Kind::Add) return a + b;
        if (e.kind == Expr::Kind::Sub) return a - b;
        return a * b;
      }
      const DiffOp a = as_diffop(l, where(e.line, e.col)), b = as_diffop(r, where(e.line, e.col));
      if (e.kind == Expr::Kind::Add) return a + b;
      if (e.kind == Expr::Kind::Sub) return a - b;
      return compose(a, b);
    }
    case Expr::Kind::Div: {
      Value l = evaluate(*e.args[0]), r = evaluate(*e.args[1]);
      if (!is_field(l) || !is_field(r)) type_error(e, "'/' divides functions only");
      return std::get<FieldElem>(l) / std::get<FieldElem>(r);
    }
    case Expr::Kind::Pow: {
      Value base = evaluate(*e.args[0]);
      const FieldElem ex = as_field(evaluate(*e.args[1]), "exponent");
      if (!ex.is_constant() || !ex.is_polynomial()) type_error(e, "exponent must be an integer");
      const mpz_class z = ex.is_zero() ? mpz_class(0) : ex.num().lead().coef;
      if (z > 64 || z < -64) type_error(e, "exponent out of range");
      const long n = z.get_si();
      if (is_field(base)) return std::get<FieldElem>(base).pow(static_cast<int>(n));
      if (n < 0) type_error(e, "negative power of an operator");
      return power(as_diffop(base, "power"), static_cast<unsigned>(n));
    }
    case Expr::Kind::Call:
      return call(e);
  }
  type_error(e, "unknown expression");
}

namespace {

void arity(const Expr& e, std::size_t n) {
  if (e.args.size() != n) {
    type_error(e, e.text + " expects " + std::to_string(n) + " arguments, got " + std::to_string(e.args.size()));
  }
}

Var variable_arg(const Value& v, const Expr& e) {
  if (const auto* f = std::get_if<FieldElem>(&v)) {
    if (*f == FieldElem::x()) return Var::X;
    if (*f == FieldElem::y()) return Var::Y;
  }
  type_error(e, "expected x or y");
}

unsigned count_arg(const Value& v, const Expr& e) {
  if (const auto* f = std::get_if<FieldElem>(&v)) {
    if (f->is_zero()) return 0;
    if (f->is_constant() && f->is_polynomial() && f->num().lead().coef > 0 && f->num().lead().coef < 64) {
      return static_cast<unsigned>(f->num().lead().coef.get_ui());
    }
  }
  type_error(e, "expected a small nonnegative integer");
}

}  // namespace

Value Environment::call(const Expr& e) const {
  const std::string& f = e.text;
  std::vector<Value> args;
  for (const auto& a : e.args) args.push_back(evaluate(*a));
  const std::string ctx = where(e.line, e.col) + " " + f;
  if (f == "schrodinger") {
    arity(e, 3);
    return SchrodingerOp(as_field(args[0], ctx), as_field(args[1], ctx), as_field(args[2], ctx));
  }
  if (f == "laplace") {
    arity(e, 2);
    const auto* kw = std::get_if<KeywordValue>(&args[1]);
    if (kw == nullptr) type_error(e, "laplace expects right or left");
    const SchrodingerOp l = as_schrodinger(args[0], ctx);
    LaplaceMove mv = laplace_transform(l, kw->word == "right" ? Direction::Right : Direction::Left);
    return DarbouxMorphism(l, mv.target, mv.m, mv.n);
  }
  if (f == "wronskian_dt") {
    arity(e, 3);
    const SchrodingerOp l = as_schrodinger(args[0], ctx);
    const unsigned m = count_arg(args[1], e), n = count_arg(args[2], e);
    std::vector<FieldElem> hints = kernels_.elements(l);
    if (hints.size() < m + n) {
      throw Error(ErrorCode::NotCertified, ctx + ": needs " + std::to_string(m + n) + " certified kernel elements, have " +
                                               std::to_string(hints.size()));
    }
    hints.resize(m + n);
    return make_wronskian_dt(l, hints, m, n);
  }
  if (f == "first_order_wronskian") {
    arity(e, 3);
    return make_first_order_wronskian(as_schrodinger(args[0], ctx), as_field(args[1], ctx), variable_arg(args[2], e))
        .morphism;
  }
  if (f == "morphism") {
    arity(e, 4);
    return PairValue{as_schrodinger(args[0], ctx), as_schrodinger(args[1], ctx), as_diffop(args[2], ctx),
                     as_diffop(args[3], ctx)};
  }
  if (f == "compose") {
    arity(e, 2);
    return compose_morphisms(as_morphism(args[0], ctx), as_morphism(args[1], ctx));
  }
  if (f == "identity") {
    arity(e, 1);
    return DarbouxMorphism::identity(as_schrodinger(args[0], ctx));
  }
  if (f == "source" || f == "target") {
    arity(e, 1);
    const DarbouxMorphism m = as_morphism(args[0], ctx);
    return f == "source" ? m.source() : m.target();
  }
  if (f == "mop" || f == "nop") {
    arity(e, 1);
    const DarbouxMorphism m = as_morphism(args[0], ctx);
    return f == "mop" ? m.m() : m.n();
  }
  if (f == "apply") {
    arity(e, 2);
    return apply(as_diffop(args[0], ctx), as_field(args[1], ctx));
  }
  if (f == "diff") {
    arity(e, 2);
    return derive(as_field(args[0], ctx), variable_arg(args[1], e));
  }
  if (f == "gauge") {
    arity(e, 2);
    const FieldElem g = as_field(args[1], ctx);
    if (std::holds_alternative<SchrodingerOp>(args[0])) {
      return dtf::gauge(std::get<SchrodingerOp>(args[0]), derive(g, Var::X), derive(g, Var::Y));
    }
    return dtf::gauge(as_diffop(args[0], ctx), g);
  }
  if (f == "scale") {
    arity(e, 2);
    return scaling_morphism(as_schrodinger(args[0], ctx), as_field(args[1], ctx));
  }
  throw Error(ErrorCode::UnboundName, where(e.line, e.col) + ": unknown function '" + f + "'");
}

}  // namespace dtf
