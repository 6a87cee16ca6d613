#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>

#include "dtf/field.hpp"

namespace dtf {

class SchrodingerOp;

/// Exponent pair of the monomial Dx^dx Dy^dy.
struct Monomial {
  unsigned dx = 0;
  unsigned dy = 0;

  unsigned order() const { return dx + dy; }
  bool mixed() const { return dx > 0 && dy > 0; }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Element of K[Dx, Dy], stored as a sparse map from monomials to nonzero
/// left coefficients: sum c_ij * Dx^i * Dy^j.
class DiffOp {
 public:
  using Terms = std::map<Monomial, FieldElem>;

  DiffOp() = default;
  DiffOp(const FieldElem& f);  // NOLINT(google-explicit-constructor): multiplication operator
  DiffOp(long c) : DiffOp(FieldElem(c)) {}  // NOLINT(google-explicit-constructor)

  static DiffOp dx(unsigned power = 1);
  static DiffOp dy(unsigned power = 1);
  static DiffOp monomial(Monomial m, const FieldElem& coef);
  // D_v + c
  static DiffOp first_order(Var v, const FieldElem& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  FieldElem coeff(Monomial m) const;
  void set(Monomial m, const FieldElem& coef);

  unsigned order() const;
  unsigned order_in(Var v) const;
  bool has_mixed() const;
  // True if only powers of D_v occur (constants included).
  bool is_ordinary_in(Var v) const;
  DiffOp principal_symbol() const;

  DiffOp operator-() const;
  DiffOp& operator+=(const DiffOp& rhs);
  DiffOp& operator-=(const DiffOp& rhs);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  // Left multiplication by a function: f * P.
  friend DiffOp operator*(const FieldElem& f, const DiffOp& p);
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }

  std::string to_string() const;

 private:
  Terms terms_;
};

/// Ring product P * Q using D f = f D + f'.
DiffOp compose(const DiffOp& p, const DiffOp& q);
DiffOp power(const DiffOp& p, unsigned n);

/// P(f).
FieldElem apply(const DiffOp& p, const FieldElem& f);

struct Division {
  DiffOp quotient;
  FieldElem remainder;
};

/// P = quotient * (D_v + d0) + remainder for P ordinary in D_v.
Division right_divide_first_order(const DiffOp& p, const DiffOp& divisor);

/// Conjugation e^{-f} P e^{f} given the gradient (f_x, f_y).
DiffOp gauge_by_gradient(const DiffOp& p, const FieldElem& fx, const FieldElem& fy);
DiffOp gauge(const DiffOp& p, const FieldElem& f);

struct BiDegree {
  unsigned d1 = 0;
  unsigned d2 = 0;
  unsigned total() const { return d1 + d2; }
  friend bool operator==(const BiDegree&, const BiDegree&) = default;
};

/// Bi-degree of a mixed-free operator; throws ZeroOperator on 0.
BiDegree bidegree_of_normal_form(const DiffOp& nf);

struct Projection {
  DiffOp nf;  // no monomial with both dx >= 1 and dy >= 1
  DiffOp a;   // m == nf + a * L
};

/// Normal form of M modulo the left ideal generated by L.
///
/// The largest mixed monomial c Dx^i Dy^j (by total order, then dx) is
/// cancelled by subtracting c Dx^(i-1) Dy^(j-1) L; every such step lowers
/// the mixed support, so the rewrite terminates in the unique normal form.
Projection project(const DiffOp& m, const SchrodingerOp& l);

/// deg_L(M) = bi-degree of project(M, L).nf.
BiDegree bidegree(const DiffOp& m, const SchrodingerOp& l);

}  // namespace dtf
