#include "dtf/poly.hpp"

#include <algorithm>
#include <sstream>

#include "dtf/error.hpp"

namespace dtf {

int compare_exponents(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

namespace {

bool exp_greater(const Term& a, const Term& b) { return compare_exponents(a.exp, b.exp) > 0; }

Exponents add_exponents(const Exponents& a, const Exponents& b) {
  Exponents out{};
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    const unsigned s = unsigned(a[i]) + unsigned(b[i]);
    if (s > 0xFFFFu) throw Error(ErrorCode::CapacityExceeded, "polynomial degree overflow");
    out[i] = static_cast<std::uint16_t>(s);
  }
  return out;
}

bool exponents_divide(const Exponents& d, const Exponents& n) {
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (d[i] > n[i]) return false;
  }
  return true;
}

Exponents sub_exponents(const Exponents& a, const Exponents& b) {
  Exponents out{};
  for (std::size_t i = 0; i < kMaxVars; ++i) out[i] = static_cast<std::uint16_t>(a[i] - b[i]);
  return out;
}

// Merges two sorted term lists, scaling the second by sign.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int cmp;
    if (i == a.size()) cmp = -1;
    else if (j == b.size()) cmp = 1;
    else cmp = compare_exponents(a[i].exp, b[j].exp);
    if (cmp > 0) {
      out.push_back(a[i++]);
    } else if (cmp < 0) {
      out.push_back(b[j]);
      if (subtract) out.back().coef = -out.back().coef;
      ++j;
    } else {
      mpz_class c = a[i].coef;
      if (subtract) {
        c -= b[j].coef;
      } else {
        c += b[j].coef;
      }
      if (c != 0) out.push_back(Term{a[i].exp, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Poly::Poly(long c) {
  if (c != 0) terms_.push_back(Term{Exponents{}, mpz_class(c)});
}

Poly::Poly(const mpz_class& c) {
  if (c != 0) terms_.push_back(Term{Exponents{}, c});
}

Poly Poly::variable(std::size_t index, unsigned power) {
  if (index >= kMaxVars) throw Error(ErrorCode::CapacityExceeded, "too many variables");
  Exponents e{};
  e[index] = static_cast<std::uint16_t>(power);
  return monomial(e, 1);
}

Poly Poly::monomial(const Exponents& exp, mpz_class coef) {
  Poly p;
  if (coef != 0) p.terms_.push_back(Term{exp, std::move(coef)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), exp_greater);
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && compare_exponents(p.terms_.back().exp, t.exp) == 0) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exp == Exponents{});
}

bool Poly::is_one() const {
  return terms_.size() == 1 && terms_[0].exp == Exponents{} && terms_[0].coef == 1;
}

unsigned Poly::degree(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.exp[var]);
  return d;
}

unsigned Poly::total_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) {
    unsigned s = 0;
    for (auto e : t.exp) s += e;
    d = std::max(d, s);
  }
  return d;
}

VarMask Poly::var_mask() const {
  VarMask m = 0;
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (t.exp[i] != 0) m |= VarMask(1) << i;
    }
  }
  return m;
}

bool Poly::depends_on(std::size_t var) const {
  return std::any_of(terms_.begin(), terms_.end(), [var](const Term& t) { return t.exp[var] != 0; });
}

mpz_class Poly::content() const {
  mpz_class g = 0;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

mpz_class Poly::max_norm() const {
  mpz_class m = 0;
  for (const auto& t : terms_) {
    if (abs(t.coef) > m) m = abs(t.coef);
  }
  return m;
}

Poly Poly::primitive_part() const {
  if (is_zero()) return *this;
  mpz_class c = content();
  if (lead().coef < 0) c = -c;
  return c == 1 ? *this : divide_scalar_exact(c);
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly& Poly::operator+=(const Poly& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  terms_ = merge(terms_, rhs.terms_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& rhs) {
  if (rhs.is_zero()) return *this;
  terms_ = merge(terms_, rhs.terms_, true);
  return *this;
}

Poly operator*(const Poly& lhs, const Poly& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  if (lhs.is_constant()) return rhs.scaled(lhs.lead().coef);
  if (rhs.is_constant()) return lhs.scaled(rhs.lead().coef);
  if (lhs.size() == 1 || rhs.size() == 1) {
    // Multiplying by a monomial preserves the term order.
    const Poly& mono = lhs.size() == 1 ? lhs : rhs;
    const Poly& other = lhs.size() == 1 ? rhs : lhs;
    Poly out;
    out.terms_.reserve(other.size());
    for (const auto& t : other.terms_) {
      out.terms_.push_back(Term{add_exponents(t.exp, mono.lead().exp), t.coef * mono.lead().coef});
    }
    return out;
  }
  // Heap of one cursor per term of the shorter factor; products leave the
  // heap in descending order, so like terms arrive together.
  const std::vector<Term>& s = lhs.size() <= rhs.size() ? lhs.terms_ : rhs.terms_;
  const std::vector<Term>& l = lhs.size() <= rhs.size() ? rhs.terms_ : lhs.terms_;
  struct Cursor {
    Exponents exp;
    std::size_t i;
    std::size_t j;
  };
  auto below = [](const Cursor& a, const Cursor& b) { return compare_exponents(a.exp, b.exp) < 0; };
  std::vector<Cursor> heap;
  heap.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) heap.push_back(Cursor{add_exponents(s[i].exp, l[0].exp), i, 0});
  std::make_heap(heap.begin(), heap.end(), below);
  Poly out;
  mpz_class acc;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), below);
    Cursor c = heap.back();
    heap.pop_back();
    const Exponents exp = c.exp;
    acc = 0;
    for (;;) {
      mpz_addmul(acc.get_mpz_t(), s[c.i].coef.get_mpz_t(), l[c.j].coef.get_mpz_t());
      if (++c.j < l.size()) {
        c.exp = add_exponents(s[c.i].exp, l[c.j].exp);
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end(), below);
      }
      if (heap.empty() || compare_exponents(heap.front().exp, exp) != 0) break;
      std::pop_heap(heap.begin(), heap.end(), below);
      c = heap.back();
      heap.pop_back();
    }
    if (acc != 0) out.terms_.push_back(Term{exp, acc});
  }
  return out;
}

bool operator==(const Poly& lhs, const Poly& rhs) {
  if (lhs.terms_.size() != rhs.terms_.size()) return false;
  for (std::size_t i = 0; i < lhs.terms_.size(); ++i) {
    if (lhs.terms_[i].exp != rhs.terms_[i].exp || lhs.terms_[i].coef != rhs.terms_[i].coef) return false;
  }
  return true;
}

Poly Poly::scaled(const mpz_class& factor) const {
  if (factor == 0) return {};
  Poly p = *this;
  for (auto& t : p.terms_) t.coef *= factor;
  return p;
}

Poly Poly::pow(unsigned n) const {
  Poly result(1);
  Poly base = *this;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

Poly Poly::divide_scalar_exact(const mpz_class& divisor) const {
  Poly p = *this;
  for (auto& t : p.terms_) mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), divisor.get_mpz_t());
  return p;
}

std::optional<Poly> Poly::divide_exact(const Poly& divisor) const {
  if (divisor.is_zero()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
  if (is_zero()) return Poly{};
  if (divisor.is_constant()) {
    const mpz_class& d = divisor.lead().coef;
    for (const auto& t : terms_) {
      if (!mpz_divisible_p(t.coef.get_mpz_t(), d.get_mpz_t())) return std::nullopt;
    }
    return divide_scalar_exact(d);
  }
  // Degree bounds reject most non-divisible inputs before any arithmetic.
  Exponents qmax{};
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    const unsigned dn = degree(v), dd = divisor.degree(v);
    if (dd > dn) return std::nullopt;
    qmax[v] = static_cast<std::uint16_t>(dn - dd);
  }
  const Term& dl = divisor.lead();
  std::vector<Term> quotient;
  // Remainder keyed in decreasing exponent order; the front is its leading term.
  std::map<Exponents, mpz_class, std::greater<>> rem;
  for (const auto& t : terms_) rem.emplace(t.exp, t.coef);
  while (!rem.empty()) {
    const auto lead = rem.begin();
    if (!exponents_divide(dl.exp, lead->first)) return std::nullopt;
    if (!mpz_divisible_p(lead->second.get_mpz_t(), dl.coef.get_mpz_t())) return std::nullopt;
    Term q{sub_exponents(lead->first, dl.exp), 0};
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      if (q.exp[v] > qmax[v]) return std::nullopt;
    }
    mpz_divexact(q.coef.get_mpz_t(), lead->second.get_mpz_t(), dl.coef.get_mpz_t());
    rem.erase(lead);
    mpz_class prod;
    for (std::size_t i = 1; i < divisor.terms_.size(); ++i) {
      const Term& t = divisor.terms_[i];
      prod = t.coef * q.coef;
      auto [it, inserted] = rem.try_emplace(add_exponents(t.exp, q.exp));
      if (inserted) {
        it->second = -prod;
      } else {
        it->second -= prod;
        if (it->second == 0) rem.erase(it);
      }
    }
    quotient.push_back(std::move(q));
  }
  Poly out;
  out.terms_ = std::move(quotient);  // generated in decreasing order
  return out;
}

Poly Poly::derivative(std::size_t var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.exp[var] == 0) continue;
    Term d{t.exp, t.coef * t.exp[var]};
    --d.exp[var];
    out.push_back(std::move(d));
  }
  // Lowering one exponent by one can reorder terms only among equal prefixes; re-sort.
  return from_terms(std::move(out));
}

Poly Poly::evaluate(std::size_t var, const mpz_class& value) const {
  if (!depends_on(var)) return *this;
  std::vector<mpz_class> powers{1};
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const unsigned e = t.exp[var];
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    Term n{t.exp, t.coef * powers[e]};
    n.exp[var] = 0;
    out.push_back(std::move(n));
  }
  return from_terms(std::move(out));
}

Poly Poly::shifted(std::size_t var, unsigned power) const {
  if (power == 0) return *this;
  Exponents e{};
  e[var] = static_cast<std::uint16_t>(power);
  return *this * monomial(e, 1);
}

std::map<unsigned, Poly> Poly::coefficients_in(std::size_t var) const {
  std::map<unsigned, std::vector<Term>> buckets;
  for (const auto& t : terms_) {
    Term c = t;
    c.exp[var] = 0;
    buckets[t.exp[var]].push_back(std::move(c));
  }
  std::map<unsigned, Poly> out;
  for (auto& [d, ts] : buckets) {
    Poly p;
    p.terms_ = std::move(ts);  // relative order is preserved after zeroing one slot
    out.emplace(d, std::move(p));
  }
  return out;
}

Exponents Poly::monomial_content() const {
  if (terms_.empty()) return {};
  Exponents m = terms_.front().exp;
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < kMaxVars; ++i) m[i] = std::min(m[i], t.exp[i]);
  }
  return m;
}

Poly Poly::divide_monomial(const Exponents& exp) const {
  Poly p = *this;
  for (auto& t : p.terms_) t.exp = sub_exponents(t.exp, exp);
  return p;
}

std::string Poly::to_string(const std::function<std::string(std::size_t)>& name) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    mpz_class c = t.coef;
    if (first) {
      if (c < 0) {
        os << "-";
        c = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    bool has_var = false;
    std::ostringstream mono;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (t.exp[i] == 0) continue;
      if (has_var) mono << "*";
      mono << name(i);
      if (t.exp[i] > 1) mono << "^" << t.exp[i];
      has_var = true;
    }
    if (!has_var) {
      os << c.get_str();
    } else if (c == 1) {
      os << mono.str();
    } else {
      os << c.get_str() << "*" << mono.str();
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// GCD

namespace {

Poly normalize_sign(Poly p) {
  if (!p.is_zero() && p.lead().coef < 0) return -p;
  return p;
}

std::size_t lowest_var(VarMask m) {
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (m & (VarMask(1) << i)) return i;
  }
  return kMaxVars;
}

Poly primitive_gcd(const Poly& a, const Poly& b);

// gcd of the coefficients of p viewed as a polynomial in var.
Poly content_in(const Poly& p, std::size_t var) {
  Poly g;
  for (const auto& [d, c] : p.coefficients_in(var)) {
    g = gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

Poly lead_coefficient_in(const Poly& p, std::size_t var) {
  auto cs = p.coefficients_in(var);
  return cs.rbegin()->second;
}

// Pseudo-remainder of a by b in var, up to a nonzero factor.
Poly pseudo_remainder(Poly a, const Poly& b, std::size_t var) {
  const unsigned db = b.degree(var);
  const Poly lb = lead_coefficient_in(b, var);
  while (!a.is_zero() && a.depends_on(var) && a.degree(var) >= db) {
    const unsigned da = a.degree(var);
    const Poly la = lead_coefficient_in(a, var);
    a = a * lb - (la * b).shifted(var, da - db);
  }
  return a;
}

// Primitive polynomial remainder sequence; slow but always succeeds.
Poly prs_gcd(const Poly& a0, const Poly& b0, std::size_t var) {
  const Poly ca = content_in(a0, var), cb = content_in(b0, var);
  const Poly c = gcd(ca, cb);
  Poly a = *a0.divide_exact(ca), b = *b0.divide_exact(cb);
  if (a.degree(var) < b.degree(var)) std::swap(a, b);
  while (!b.is_zero()) {
    if (!b.depends_on(var)) return c;
    Poly r = pseudo_remainder(a, b, var);
    a = std::move(b);
    if (r.is_zero()) break;
    b = *r.divide_exact(content_in(r, var));
  }
  return normalize_sign(c * a.primitive_part());
}

mpz_class isqrt(const mpz_class& v) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

// Recovers a polynomial in var from its image at var = x using symmetric
// base-x digits of each integer coefficient.
Poly interpolate(Poly h, const mpz_class& x, std::size_t var) {
  std::vector<Term> out;
  const mpz_class half = x / 2;
  unsigned i = 0;
  while (!h.is_zero()) {
    std::vector<Term> digit;
    for (const auto& t : h.terms()) {
      mpz_class r;
      mpz_fdiv_r(r.get_mpz_t(), t.coef.get_mpz_t(), x.get_mpz_t());
      if (r > half) r -= x;
      if (r != 0) digit.push_back(Term{t.exp, r});
    }
    Poly g = Poly::from_terms(digit);
    for (const auto& t : g.terms()) {
      Term n = t;
      n.exp[var] = static_cast<std::uint16_t>(i);
      out.push_back(std::move(n));
    }
    h = (h - g).divide_scalar_exact(x);
    ++i;
  }
  return Poly::from_terms(std::move(out));
}

// Heuristic gcd (evaluation at a large integer, recursion, base-x lifting).
std::optional<Poly> heuristic_gcd(const Poly& f, const Poly& g, std::size_t var) {
  const mpz_class fn = f.max_norm(), gn = g.max_norm();
  const mpz_class b = 2 * std::min(fn, gn) + 29;
  mpz_class x = std::max<mpz_class>(std::min<mpz_class>(b, 99 * isqrt(b)),
                                    2 * std::min<mpz_class>(fn / abs(f.lead().coef), gn / abs(g.lead().coef)) + 2);
  for (int attempt = 0; attempt < 6; ++attempt) {
    const Poly ff = f.evaluate(var, x), gg = g.evaluate(var, x);
    if (!ff.is_zero() && !gg.is_zero()) {
      const Poly h_image = gcd(ff, gg);
      Poly h = interpolate(h_image, x, var).primitive_part();
      if (!h.is_zero()) {
        if (f.divide_exact(h) && g.divide_exact(h)) return h;
      }
      if (auto cff_image = ff.divide_exact(h_image)) {
        Poly cff = interpolate(*cff_image, x, var);
        if (!cff.is_zero()) {
          if (auto h2 = f.divide_exact(cff)) {
            if (!h2->is_zero() && g.divide_exact(*h2)) return h2->primitive_part();
          }
        }
      }
      if (auto cfg_image = gg.divide_exact(h_image)) {
        Poly cfg = interpolate(*cfg_image, x, var);
        if (!cfg.is_zero()) {
          if (auto h3 = g.divide_exact(cfg)) {
            if (!h3->is_zero() && f.divide_exact(*h3)) return h3->primitive_part();
          }
        }
      }
    }
    x = 73794 * x * isqrt(isqrt(x)) / 27011;
  }
  return std::nullopt;
}

// Both arguments nonzero with unit integer content.
Poly primitive_gcd(const Poly& a, const Poly& b) {
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a == b) return normalize_sign(a);

  // Monomial factors split off exactly.
  const Exponents ma = a.monomial_content(), mb = b.monomial_content();
  Exponents mg{};
  for (std::size_t i = 0; i < kMaxVars; ++i) mg[i] = std::min(ma[i], mb[i]);
  const Poly mono = Poly::monomial(mg, 1);
  const Poly ar = a.divide_monomial(ma), br = b.divide_monomial(mb);
  if (ar.size() == 1 || br.size() == 1) return mono;

  const VarMask va = ar.var_mask(), vb = br.var_mask();
  if (va != vb) {
    // A variable present in only one argument cannot occur in the gcd.
    const VarMask only = va ^ vb;
    const std::size_t v = lowest_var(only);
    const Poly& with = (va & (VarMask(1) << v)) ? ar : br;
    const Poly& without = (va & (VarMask(1) << v)) ? br : ar;
    Poly g = without;
    for (const auto& [d, c] : with.coefficients_in(v)) {
      g = gcd(g, c);
      if (g.is_constant()) return mono;
    }
    return normalize_sign(mono * g);
  }

  const std::size_t var = lowest_var(va);
  if (auto h = heuristic_gcd(ar, br, var)) return normalize_sign(mono * *h);
  return normalize_sign(mono * prs_gcd(ar, br, var));
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return normalize_sign(b);
  if (b.is_zero()) return normalize_sign(a);
  mpz_class ca = a.content(), cb = b.content(), c;
  mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  if (a.is_constant() || b.is_constant()) return Poly(c);
  const Poly pa = ca == 1 ? a : a.divide_scalar_exact(ca);
  const Poly pb = cb == 1 ? b : b.divide_scalar_exact(cb);
  return primitive_gcd(pa, pb).scaled(c);
}

}  // namespace dtf
