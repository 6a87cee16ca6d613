#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtf/field.hpp"
#include "dtf/opring.hpp"
#include "dtf/schrodinger.hpp"

namespace dtf {

struct Verification {
  bool ok = false;
  DiffOp residual;  // N L - L1 M
};

Verification verify_intertwining(const SchrodingerOp& l, const DiffOp& m, const DiffOp& n, const SchrodingerOp& l1);

/// A verified pair (M, N) with N L == L1 M. Construction throws NotVerified
/// (with the residual) when the relation fails.
class DarbouxMorphism {
 public:
  DarbouxMorphism(SchrodingerOp source, SchrodingerOp target, DiffOp m, DiffOp n);

  static DarbouxMorphism identity(const SchrodingerOp& l);

  const SchrodingerOp& source() const { return source_; }
  const SchrodingerOp& target() const { return target_; }
  const DiffOp& m() const { return m_; }
  const DiffOp& n() const { return n_; }

  // pi_L(M) and the A with M == standard + A L.
  const Projection& projection() const { return projection_; }
  const DiffOp& standard() const { return projection_.nf; }
  BiDegree bidegree() const;
  unsigned order() const { return bidegree().total(); }

 private:
  SchrodingerOp source_;
  SchrodingerOp target_;
  DiffOp m_;
  DiffOp n_;
  Projection projection_;
};

/// Same source and target and pi_L(M1 - M2) == 0. Throws
/// SourceTargetMismatch when the endpoints differ.
bool equivalent(const DarbouxMorphism& m1, const DarbouxMorphism& m2);

/// first: L -> L1, second: L1 -> L2; result (M2 M1, N2 N1): L -> L2.
DarbouxMorphism compose_morphisms(const DarbouxMorphism& first, const DarbouxMorphism& second);

/// The equivalent pair (pi_L(M), N - L1 A).
DarbouxMorphism standard_representative(const DarbouxMorphism& d);

/// (mu, mu): L -> mu L mu^{-1}.
DarbouxMorphism scaling_morphism(const SchrodingerOp& l, const FieldElem& mu);

struct FirstOrderSolution {
  DiffOp n;
  SchrodingerOp target;
  // Index of the constant symbol introduced for a free unknown.
  std::optional<std::size_t> parameter;
};

/// All N = D_v + n and L1 with N L == L1 M for M = D_v + m. A one-parameter
/// family is returned with a fresh constant symbol standing for the free
/// unknown. Throws NoSolution with the obstruction as certificate.
std::vector<FirstOrderSolution> solve_first_order(const SchrodingerOp& l, const DiffOp& m);

struct WronskianSpec {
  unsigned t = 0;
  unsigned s = 0;
  std::vector<FieldElem> functions;  // the t + s fixed rows
};

/// det of rows (f, f_1, ..., f_{t+s}) against columns
/// g, g_x, ..., D_x^t g, g_y, ..., D_y^s g.
FieldElem wronskian(const WronskianSpec& spec, const FieldElem& f);

/// The operator f -> W_{t,s}(f, functions) as an element of K[Dx, Dy].
DiffOp wronskian_operator(const WronskianSpec& spec);

enum class WronskianCase { I, IIA, IIB };

const char* case_name(WronskianCase c);

struct FirstOrderWronskian {
  DarbouxMorphism morphism;
  WronskianCase kind;
};

/// M = D_v - psi_v / psi with its matching N and target.
FirstOrderWronskian make_first_order_wronskian(const SchrodingerOp& l, const FieldElem& psi, Var v);

/// Transformation with M proportional to
/// (-1)^(m+n) W_{m,n}(f, psi_1..psi_{m+n}) / W_{m-1,n}(psi_1..psi_{m+n}).
DarbouxMorphism make_wronskian_dt(const SchrodingerOp& l, const std::vector<FieldElem>& psis, unsigned m, unsigned n);

/// The normalized operator of make_wronskian_dt, without N or target.
DiffOp wronskian_dt_operator(const std::vector<FieldElem>& psis, unsigned m, unsigned n);

}  // namespace dtf
