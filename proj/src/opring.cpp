#include "dtf/opring.hpp"

#include <algorithm>
#include <vector>

#include "dtf/error.hpp"
#include "dtf/schrodinger.hpp"

namespace dtf {

DiffOp::DiffOp(const FieldElem& f) {
  if (!f.is_zero()) terms_.emplace(Monomial{0, 0}, f);
}

DiffOp DiffOp::dx(unsigned power) { return monomial(Monomial{power, 0}, FieldElem(1L)); }
DiffOp DiffOp::dy(unsigned power) { return monomial(Monomial{0, power}, FieldElem(1L)); }

DiffOp DiffOp::monomial(Monomial m, const FieldElem& coef) {
  DiffOp p;
  p.set(m, coef);
  return p;
}

DiffOp DiffOp::first_order(Var v, const FieldElem& c) {
  DiffOp p = v == Var::X ? dx() : dy();
  p.set(Monomial{0, 0}, c);
  return p;
}

FieldElem DiffOp::coeff(Monomial m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? FieldElem(0L) : it->second;
}

void DiffOp::set(Monomial m, const FieldElem& coef) {
  if (coef.is_zero()) {
    terms_.erase(m);
  } else {
    terms_.insert_or_assign(m, coef);
  }
}

unsigned DiffOp::order() const {
  unsigned o = 0;
  for (const auto& [m, c] : terms_) o = std::max(o, m.order());
  return o;
}

unsigned DiffOp::order_in(Var v) const {
  unsigned o = 0;
  for (const auto& [m, c] : terms_) o = std::max(o, v == Var::X ? m.dx : m.dy);
  return o;
}

bool DiffOp::has_mixed() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.mixed(); });
}

bool DiffOp::is_ordinary_in(Var v) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [v](const auto& t) { return (v == Var::X ? t.first.dy : t.first.dx) == 0; });
}

DiffOp DiffOp::principal_symbol() const {
  const unsigned o = order();
  DiffOp p;
  for (const auto& [m, c] : terms_) {
    if (m.order() == o) p.terms_.emplace(m, c);
  }
  return p;
}

DiffOp DiffOp::operator-() const {
  DiffOp p = *this;
  for (auto& [m, c] : p.terms_) c = -c;
  return p;
}

DiffOp& DiffOp::operator+=(const DiffOp& rhs) {
  for (const auto& [m, c] : rhs.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& rhs) { return *this += -rhs; }

DiffOp operator*(const FieldElem& f, const DiffOp& p) {
  if (f.is_zero()) return {};
  DiffOp out;
  for (const auto& [m, c] : p.terms_) out.terms_.emplace(m, f * c);
  return out;
}

std::string DiffOp::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    std::string mono;
    if (m.dx > 0) mono += m.dx == 1 ? "Dx" : "Dx^" + std::to_string(m.dx);
    if (m.dy > 0) mono += std::string(mono.empty() ? "" : "*") + (m.dy == 1 ? "Dy" : "Dy^" + std::to_string(m.dy));
    bool negative = false;
    std::string cs;
    const FieldElem& coef = c;
    const bool single = coef.num().size() == 1;
    if (single && coef.num().lead().coef < 0) {
      negative = true;
      cs = (-coef).to_string();
    } else {
      cs = coef.to_string();
    }
    if (!single) cs = "(" + cs + ")";
    std::string term;
    if (mono.empty()) {
      term = cs;
    } else if (cs == "1") {
      term = mono;
    } else {
      term = cs + "*" + mono;
    }
    if (first) {
      out += negative ? "-" + term : term;
    } else {
      out += negative ? " - " + term : " + " + term;
    }
    first = false;
  }
  return out;
}

namespace {

// Memoized mixed partial derivatives of one coefficient.
class DerivativeTable {
 public:
  explicit DerivativeTable(const FieldElem& f) { table_.emplace(Monomial{0, 0}, f); }

  const FieldElem& get(Monomial m) {
    if (auto it = table_.find(m); it != table_.end()) return it->second;
    FieldElem d = m.dx > 0 ? derive(get(Monomial{m.dx - 1, m.dy}), Var::X) : derive(get(Monomial{m.dx, m.dy - 1}), Var::Y);
    return table_.emplace(m, std::move(d)).first->second;
  }

 private:
  std::map<Monomial, FieldElem> table_;
};

mpz_class binomial(unsigned n, unsigned k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace

DiffOp compose(const DiffOp& p, const DiffOp& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::map<Monomial, FieldElem> acc;
  for (const auto& [mq, cq] : q.terms()) {
    DerivativeTable table(cq);
    for (const auto& [mp, cp] : p.terms()) {
      // Dx^i Dy^j cq = sum_{s,t} C(i,s) C(j,t) (Dx^(i-s) Dy^(j-t) cq) Dx^s Dy^t
      for (unsigned s = 0; s <= mp.dx; ++s) {
        for (unsigned t = 0; t <= mp.dy; ++t) {
          const FieldElem& d = table.get(Monomial{mp.dx - s, mp.dy - t});
          if (d.is_zero()) continue;
          const mpz_class weight = binomial(mp.dx, s) * binomial(mp.dy, t);
          FieldElem term = cp * d;
          if (weight != 1) term *= FieldElem(mpq_class(weight));
          const Monomial out{s + mq.dx, t + mq.dy};
          auto it = acc.find(out);
          if (it == acc.end()) {
            acc.emplace(out, std::move(term));
          } else {
            it->second += term;
          }
        }
      }
    }
  }
  DiffOp r;
  for (auto& [m, c] : acc) r.set(m, c);
  return r;
}

DiffOp power(const DiffOp& p, unsigned n) {
  DiffOp r(1L);
  for (unsigned i = 0; i < n; ++i) r = compose(r, p);
  return r;
}

FieldElem apply(const DiffOp& p, const FieldElem& f) {
  DerivativeTable table(f);
  FieldElem out(0L);
  for (const auto& [m, c] : p.terms()) out += c * table.get(m);
  return out;
}

Division right_divide_first_order(const DiffOp& p, const DiffOp& divisor) {
  const Var v = divisor.is_ordinary_in(Var::X) && divisor.order_in(Var::X) == 1 ? Var::X : Var::Y;
  const Monomial lead = v == Var::X ? Monomial{1, 0} : Monomial{0, 1};
  if (divisor.order() != 1 || !divisor.is_ordinary_in(v) || !divisor.coeff(lead).is_one()) {
    throw Error(ErrorCode::MixedOperandError, "divisor must be monic first-order in one variable: " + divisor.to_string());
  }
  if (!p.is_ordinary_in(v)) {
    throw Error(ErrorCode::MixedOperandError, std::string("dividend must be ordinary in D") + var_name(v));
  }
  Division out;
  DiffOp rest = p;
  for (unsigned n = rest.order_in(v); n >= 1; --n) {
    const Monomial top = v == Var::X ? Monomial{n, 0} : Monomial{0, n};
    const FieldElem c = rest.coeff(top);
    if (c.is_zero()) continue;
    const Monomial q = v == Var::X ? Monomial{n - 1, 0} : Monomial{0, n - 1};
    const DiffOp step = DiffOp::monomial(q, c);
    out.quotient += step;
    rest -= compose(step, divisor);
  }
  out.remainder = rest.coeff(Monomial{0, 0});
  return out;
}

DiffOp gauge_by_gradient(const DiffOp& p, const FieldElem& fx, const FieldElem& fy) {
  if (fx.is_zero() && fy.is_zero()) return p;
  std::vector<DiffOp> px{DiffOp(1L)}, py{DiffOp(1L)};
  const DiffOp sx = DiffOp::first_order(Var::X, fx), sy = DiffOp::first_order(Var::Y, fy);
  DiffOp out;
  for (const auto& [m, c] : p.terms()) {
    while (px.size() <= m.dx) px.push_back(compose(px.back(), sx));
    while (py.size() <= m.dy) py.push_back(compose(py.back(), sy));
    out += c * compose(px[m.dx], py[m.dy]);
  }
  return out;
}

DiffOp gauge(const DiffOp& p, const FieldElem& f) {
  return gauge_by_gradient(p, derive(f, Var::X), derive(f, Var::Y));
}

BiDegree bidegree_of_normal_form(const DiffOp& nf) {
  if (nf.is_zero()) throw Error(ErrorCode::ZeroOperator, "bi-degree of the zero operator");
  if (nf.has_mixed()) throw Error(ErrorCode::MixedOperandError, "bi-degree needs a mixed-free operator");
  return BiDegree{nf.order_in(Var::X), nf.order_in(Var::Y)};
}

Projection project(const DiffOp& m, const SchrodingerOp& l) {
  const DiffOp lop = l.as_diffop();
  Projection out;
  out.nf = m;
  for (;;) {
    // Largest mixed monomial by (total order, dx).
    const Monomial* pick = nullptr;
    for (const auto& [mono, c] : out.nf.terms()) {
      if (!mono.mixed()) continue;
      if (pick == nullptr || mono.order() > pick->order() || (mono.order() == pick->order() && mono.dx > pick->dx)) {
        pick = &mono;
      }
    }
    if (pick == nullptr) break;
    const Monomial target = *pick;
    const DiffOp step = DiffOp::monomial(Monomial{target.dx - 1, target.dy - 1}, out.nf.coeff(target));
    out.a += step;
    out.nf -= compose(step, lop);
  }
  return out;
}

BiDegree bidegree(const DiffOp& m, const SchrodingerOp& l) { return bidegree_of_normal_form(project(m, l).nf); }

}  // namespace dtf
