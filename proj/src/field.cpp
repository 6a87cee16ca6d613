#include "dtf/field.hpp"

#include <sstream>

#include "dtf/error.hpp"
#include "dtf/linalg.hpp"

namespace dtf {

// ---------------------------------------------------------------------------
// FieldElem

namespace {

Poly poly_one() { return Poly(1); }

}  // namespace

FieldElem::FieldElem() : FieldElem(0L) {}

FieldElem::FieldElem(long c) : rep_(std::make_shared<const Rep>(Rep{Poly(c), poly_one()})) {}

FieldElem::FieldElem(const mpq_class& c) {
  mpq_class q = c;
  q.canonicalize();
  rep_ = std::make_shared<const Rep>(Rep{Poly(q.get_num()), Poly(q.get_den())});
}

FieldElem::FieldElem(Poly num) : rep_(std::make_shared<const Rep>(Rep{std::move(num), poly_one()})) {}

FieldElem::FieldElem(Poly num, Poly den) {
  if (den.is_zero()) throw Error(ErrorCode::DivisionByZero, "zero denominator");
  *this = make_reduced(std::move(num), std::move(den));
}

FieldElem FieldElem::make_reduced(Poly num, Poly den) {
  if (num.is_zero()) return FieldElem(0L);
  if (!den.is_one()) {
    const Poly g = gcd(num, den);
    if (!g.is_one()) {
      num = *num.divide_exact(g);
      den = *den.divide_exact(g);
    }
    if (den.lead().coef < 0) {
      num = -num;
      den = -den;
    }
  }
  return FieldElem(std::make_shared<const Rep>(Rep{std::move(num), std::move(den)}));
}

FieldElem FieldElem::x() { return FieldElem(Poly::variable(0)); }
FieldElem FieldElem::y() { return FieldElem(Poly::variable(1)); }
FieldElem FieldElem::symbol(std::size_t index) { return FieldElem(Poly::variable(index)); }

FieldElem FieldElem::operator-() const { return FieldElem(std::make_shared<const Rep>(Rep{-num(), den()})); }

FieldElem FieldElem::inverse() const {
  if (is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
  Poly n = den(), d = num();
  if (d.lead().coef < 0) {
    n = -n;
    d = -d;
  }
  return FieldElem(std::make_shared<const Rep>(Rep{std::move(n), std::move(d)}));
}

FieldElem FieldElem::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  // Powers of a reduced fraction stay reduced.
  return FieldElem(std::make_shared<const Rep>(Rep{num().pow(unsigned(n)), den().pow(unsigned(n))}));
}

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den().is_one() && b.den().is_one()) return FieldElem(a.num() + b.num());
  if (a.den() == b.den()) return FieldElem::make_reduced(a.num() + b.num(), a.den());
  if (a.den().is_one()) {
    // gcd(a*d + c, d) == gcd(c, d) == 1 already.
    return FieldElem(std::make_shared<const FieldElem::Rep>(FieldElem::Rep{a.num() * b.den() + b.num(), b.den()}));
  }
  if (b.den().is_one()) {
    return FieldElem(std::make_shared<const FieldElem::Rep>(FieldElem::Rep{b.num() * a.den() + a.num(), a.den()}));
  }
  const Poly g = gcd(a.den(), b.den());
  const Poly ad = *a.den().divide_exact(g), bd = *b.den().divide_exact(g);
  Poly n = a.num() * bd + b.num() * ad;
  Poly d = ad * b.den();
  if (n.is_zero()) return FieldElem(0L);
  const Poly g2 = gcd(n, g);
  if (!g2.is_one()) {
    n = *n.divide_exact(g2);
    d = *d.divide_exact(g2);
  }
  if (d.lead().coef < 0) {
    n = -n;
    d = -d;
  }
  return FieldElem(std::make_shared<const FieldElem::Rep>(FieldElem::Rep{std::move(n), std::move(d)}));
}

FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  if (a.is_zero() || b.is_zero()) return FieldElem(0L);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.den().is_one() && b.den().is_one()) return FieldElem(a.num() * b.num());
  const Poly g1 = gcd(a.num(), b.den());
  const Poly g2 = gcd(b.num(), a.den());
  Poly n = (g1.is_one() ? a.num() : *a.num().divide_exact(g1)) * (g2.is_one() ? b.num() : *b.num().divide_exact(g2));
  Poly d = (g2.is_one() ? a.den() : *a.den().divide_exact(g2)) * (g1.is_one() ? b.den() : *b.den().divide_exact(g1));
  if (d.lead().coef < 0) {
    n = -n;
    d = -d;
  }
  return FieldElem(std::make_shared<const FieldElem::Rep>(FieldElem::Rep{std::move(n), std::move(d)}));
}

FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }

bool operator==(const FieldElem& a, const FieldElem& b) {
  return a.rep_ == b.rep_ || (a.num() == b.num() && a.den() == b.den());
}

std::string FieldElem::to_string() const {
  const auto name = [](std::size_t i) { return variable_name(i); };
  if (den().is_one()) return num().to_string(name);
  std::string n = num().to_string(name);
  if (num().size() > 1) n = "(" + n + ")";
  std::string d = den().to_string(name);
  const bool bare = den().size() == 1 && (den().is_constant() || den().lead().coef == 1) &&
                    d.find('*') == std::string::npos;
  if (!bare) d = "(" + d + ")";
  return n + "/" + d;
}

// ---------------------------------------------------------------------------
// Tower

namespace {

Tower& default_tower() {
  static Tower tower;
  return tower;
}

thread_local Tower* scoped_tower = nullptr;

}  // namespace

Tower& active_tower() { return scoped_tower != nullptr ? *scoped_tower : default_tower(); }

TowerScope::TowerScope(Tower& tower) : previous_(scoped_tower) { scoped_tower = &tower; }
TowerScope::~TowerScope() { scoped_tower = previous_; }

std::size_t Tower::reserve(const std::string& name) {
  std::lock_guard lock(mutex_);
  if (name.empty() || name == "x" || name == "y" || name == "Dx" || name == "Dy" || find(name)) {
    throw Error(ErrorCode::InvalidDeclaration, "symbol name unavailable: '" + name + "'");
  }
  if (symbols_.size() + kFirstSymbol >= kMaxVars) {
    throw Error(ErrorCode::CapacityExceeded, "extension tower is full");
  }
  symbols_.push_back(ExtensionSymbol{name, std::nullopt, std::nullopt, {}});
  return kFirstSymbol + symbols_.size() - 1;
}

void Tower::define(std::size_t index, const FieldElem& dx, const FieldElem& dy) {
  std::lock_guard lock(mutex_);
  TowerScope scope(*this);
  auto& sym = symbols_.at(index - kFirstSymbol);
  sym.dx_image = dx;
  sym.dy_image = dy;
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (v >= kFirstSymbol + symbols_.size() && (dx.depends_on(v) || dy.depends_on(v))) {
      symbols_.erase(symbols_.begin() + static_cast<std::ptrdiff_t>(index - kFirstSymbol));
      throw Error(ErrorCode::InvalidDeclaration, "derivative image refers to an undeclared symbol");
    }
  }
  if (!(derive(dx, Var::Y) == derive(dy, Var::X))) {
    const std::string residual = (derive(dx, Var::Y) - derive(dy, Var::X)).to_string();
    const std::string name = sym.name;
    symbols_.erase(symbols_.begin() + static_cast<std::ptrdiff_t>(index - kFirstSymbol));
    throw Error(ErrorCode::InvalidDeclaration, "derivations of '" + name + "' do not commute", residual);
  }
}

std::size_t Tower::declare(const std::string& name, const FieldElem& dx, const FieldElem& dy) {
  std::lock_guard lock(mutex_);
  const std::size_t index = reserve(name);
  define(index, dx, dy);
  return index;
}

std::size_t Tower::declare_lazy(const std::string& name, std::function<FieldElem(Var)> images) {
  std::lock_guard lock(mutex_);
  const std::size_t index = reserve(name);
  symbols_.back().lazy = std::move(images);
  return index;
}

std::optional<std::size_t> Tower::find(const std::string& name) const {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].name == name) return kFirstSymbol + i;
  }
  return std::nullopt;
}

std::string Tower::fresh_name(const std::string& stem) const {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 1;; ++i) {
    std::string candidate = stem + std::to_string(i);
    if (!find(candidate)) return candidate;
  }
}

std::string Tower::name(std::size_t index) const {
  std::lock_guard lock(mutex_);
  if (index < kFirstSymbol || index - kFirstSymbol >= symbols_.size()) return "s" + std::to_string(index);
  return symbols_[index - kFirstSymbol].name;
}

std::size_t Tower::size() const {
  std::lock_guard lock(mutex_);
  return symbols_.size();
}

FieldElem Tower::derivative_image(std::size_t index, Var v) const {
  std::lock_guard lock(mutex_);
  if (index < kFirstSymbol || index - kFirstSymbol >= symbols_.size()) {
    throw Error(ErrorCode::InvalidDeclaration, "unknown extension symbol index " + std::to_string(index));
  }
  auto& sym = const_cast<ExtensionSymbol&>(symbols_[index - kFirstSymbol]);
  auto& slot = v == Var::X ? sym.dx_image : sym.dy_image;
  if (!slot) {
    if (!sym.lazy) throw Error(ErrorCode::InvalidDeclaration, "symbol '" + sym.name + "' has no derivative images");
    TowerScope scope(const_cast<Tower&>(*this));
    // Re-fetch through the deque after the generator may have appended symbols.
    FieldElem image = sym.lazy(v);
    auto& fresh = const_cast<ExtensionSymbol&>(symbols_[index - kFirstSymbol]);
    (v == Var::X ? fresh.dx_image : fresh.dy_image) = image;
    if (fresh.dx_image && fresh.dy_image && !(derive(*fresh.dx_image, Var::Y) == derive(*fresh.dy_image, Var::X))) {
      throw Error(ErrorCode::InvalidDeclaration, "lazy symbol '" + fresh.name + "' violates commuting derivations");
    }
    return image;
  }
  return *slot;
}

std::string variable_name(std::size_t index) {
  if (index == 0) return "x";
  if (index == 1) return "y";
  return active_tower().name(index);
}

// ---------------------------------------------------------------------------
// Derivations

namespace {

// Total derivative of a polynomial, accounting for extension symbols.
FieldElem derive_poly(const Poly& p, Var v) {
  FieldElem out(p.derivative(var_index(v)));
  const VarMask mask = p.var_mask();
  for (std::size_t s = Tower::kFirstSymbol; s < kMaxVars; ++s) {
    if (!(mask & (VarMask(1) << s))) continue;
    const FieldElem image = active_tower().derivative_image(s, v);
    if (image.is_zero()) continue;
    out += FieldElem(p.derivative(s)) * image;
  }
  return out;
}

}  // namespace

FieldElem derive(const FieldElem& e, Var v) {
  if (e.is_constant()) return FieldElem(0L);
  const FieldElem dn = derive_poly(e.num(), v);
  if (e.den().is_one()) return dn;
  const FieldElem dd = derive_poly(e.den(), v);
  if (dd.is_zero()) return dn * FieldElem(Poly(1), e.den());
  // (n/d)' = (n' - (n/d) d') / d
  return (dn - e * dd) * FieldElem(Poly(1), e.den());
}

FieldElem derive(const FieldElem& e, Var v, unsigned times) {
  FieldElem out = e;
  for (unsigned i = 0; i < times && !out.is_zero(); ++i) out = derive(out, v);
  return out;
}

// ---------------------------------------------------------------------------
// Antiderivatives

namespace {

bool symbols_are_x_constant(const FieldElem& e) {
  const VarMask mask = e.var_mask();
  for (std::size_t s = Tower::kFirstSymbol; s < kMaxVars; ++s) {
    if ((mask & (VarMask(1) << s)) && !active_tower().derivative_image(s, Var::X).is_zero()) return false;
  }
  return true;
}

// Coefficients of p in x as x-free field elements, index = power of x.
std::vector<FieldElem> x_coefficients(const Poly& p, std::size_t length) {
  std::vector<FieldElem> out(length, FieldElem(0L));
  for (auto& [d, c] : p.coefficients_in(0)) {
    if (d >= out.size()) out.resize(d + 1, FieldElem(0L));
    out[d] = FieldElem(c);
  }
  return out;
}

}  // namespace

std::optional<FieldElem> antiderivative_x(const FieldElem& e) {
  if (e.is_zero()) return FieldElem(0L);
  if (derive(e, Var::X).is_zero()) return e * FieldElem::x();
  if (!symbols_are_x_constant(e)) return std::nullopt;

  const Poly& n = e.num();
  const Poly& d = e.den();
  if (!d.depends_on(0)) {
    // Each term gains x^(k+1)/(k+1); collect by the common denominator.
    FieldElem result(0L);
    for (auto& [k, c] : n.coefficients_in(0)) {
      result += FieldElem(c.shifted(0, k + 1), Poly(long(k + 1)));
    }
    return result / FieldElem(d);
  }

  // Ansatz F = P / E with E = gcd(d, d_x) and P polynomial in x over x-free K.
  const Poly dx = d.derivative(0);
  const Poly E = gcd(d, dx);
  const Poly Ex = E.derivative(0);
  const int bound = std::max<int>(0, int(n.degree(0)) - int(d.degree(0)) + int(E.degree(0)) + 1);
  if (bound > 24) return std::nullopt;

  // sum_i p_i * (i x^(i-1) E - x^i E_x) * d == n * E^2
  const Poly rhs = n * E * E;
  std::vector<std::vector<FieldElem>> columns;
  std::size_t rows = rhs.degree(0) + 1;
  for (int i = 0; i <= bound; ++i) {
    Poly basis = -(Ex.shifted(0, unsigned(i)));
    if (i > 0) basis += E.shifted(0, unsigned(i - 1)).scaled(i);
    basis = basis * d;
    rows = std::max<std::size_t>(rows, basis.degree(0) + 1);
    columns.push_back(x_coefficients(basis, 0));
  }
  std::vector<FieldElem> rhs_coeffs = x_coefficients(rhs, rows);
  Matrix system(rows, std::size_t(bound + 1));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < columns[c].size(); ++r) system(r, c) = columns[c][r];
  }
  const LinearSolution sol = solve_linear(system, rhs_coeffs);
  if (!sol.consistent) return std::nullopt;
  FieldElem p(0L);
  for (int i = 0; i <= bound; ++i) p += sol.particular[std::size_t(i)] * FieldElem(Poly::variable(0, unsigned(i)));
  FieldElem candidate = p / FieldElem(E);
  if (!(derive(candidate, Var::X) == e)) return std::nullopt;
  return candidate;
}

}  // namespace dtf
