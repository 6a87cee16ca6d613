#include "dtf/darboux.hpp"

#include <set>

#include "dtf/error.hpp"
#include "dtf/linalg.hpp"

namespace dtf {

Verification verify_intertwining(const SchrodingerOp& l, const DiffOp& m, const DiffOp& n, const SchrodingerOp& l1) {
  Verification v;
  v.residual = compose(n, l.as_diffop()) - compose(l1.as_diffop(), m);
  v.ok = v.residual.is_zero();
  return v;
}

DarbouxMorphism::DarbouxMorphism(SchrodingerOp source, SchrodingerOp target, DiffOp m, DiffOp n)
    : source_(std::move(source)), target_(std::move(target)), m_(std::move(m)), n_(std::move(n)) {
  if (m_.is_zero()) throw Error(ErrorCode::ZeroOperator, "M of a Darboux transformation must be nonzero");
  const Verification v = verify_intertwining(source_, m_, n_, target_);
  if (!v.ok) throw Error(ErrorCode::NotVerified, "N L != L1 M", v.residual.to_string());
  projection_ = project(m_, source_);
}

DarbouxMorphism DarbouxMorphism::identity(const SchrodingerOp& l) { return DarbouxMorphism(l, l, DiffOp(1L), DiffOp(1L)); }

BiDegree DarbouxMorphism::bidegree() const { return bidegree_of_normal_form(projection_.nf); }

namespace {

void require_same_endpoints(const DarbouxMorphism& m1, const DarbouxMorphism& m2) {
  if (!(m1.source() == m2.source()) || !(m1.target() == m2.target())) {
    throw Error(ErrorCode::SourceTargetMismatch, "morphisms have different source or target");
  }
}

}  // namespace

bool equivalent(const DarbouxMorphism& m1, const DarbouxMorphism& m2) {
  require_same_endpoints(m1, m2);
  const Projection p = project(m1.m() - m2.m(), m1.source());
  if (!p.nf.is_zero()) return false;
  // M1 - M2 == A L forces N1 - N2 == L1 A.
  return (m1.n() - m2.n()) == compose(m1.target().as_diffop(), p.a);
}

DarbouxMorphism compose_morphisms(const DarbouxMorphism& first, const DarbouxMorphism& second) {
  if (!(first.target() == second.source())) {
    throw Error(ErrorCode::SourceTargetMismatch, "target of the first morphism is not the source of the second");
  }
  return DarbouxMorphism(first.source(), second.target(), compose(second.m(), first.m()), compose(second.n(), first.n()));
}

DarbouxMorphism scaling_morphism(const SchrodingerOp& l, const FieldElem& mu) {
  const DiffOp conj = compose(compose(DiffOp(mu), l.as_diffop()), DiffOp(mu.inverse()));
  return DarbouxMorphism(l, SchrodingerOp::from_diffop(conj), DiffOp(mu), DiffOp(mu));
}

namespace {

Var first_order_variable(const DiffOp& m) {
  if (m.order() == 1 && !m.has_mixed()) {
    if (m.is_ordinary_in(Var::X) && m.coeff(Monomial{1, 0}).is_one()) return Var::X;
    if (m.is_ordinary_in(Var::Y) && m.coeff(Monomial{0, 1}).is_one()) return Var::Y;
  }
  throw Error(ErrorCode::MixedOperandError, "expected D_x + m or D_y + m, got " + m.to_string());
}

// Unknowns (a1, b1, c1, n) enter N L - L1 M linearly; each monomial gives one
// equation. A fixed n drops the last unknown.
struct FirstOrderSystem {
  Matrix a{0, 0};
  std::vector<FieldElem> rhs;
};

FirstOrderSystem build_system(const SchrodingerOp& l, const DiffOp& m, Var v, const std::optional<FieldElem>& fixed_n) {
  const DiffOp lop = l.as_diffop();
  const DiffOp dv = v == Var::X ? DiffOp::dx() : DiffOp::dy();
  DiffOp constant = compose(dv, lop) - compose(DiffOp::monomial(Monomial{1, 1}, FieldElem(1L)), m);
  std::vector<DiffOp> columns{-compose(DiffOp::dx(), m), -compose(DiffOp::dy(), m), -m};
  if (fixed_n) {
    constant += (*fixed_n) * lop;
  } else {
    columns.push_back(lop);
  }
  std::set<Monomial> support;
  for (const auto& [mono, c] : constant.terms()) support.insert(mono);
  for (const auto& col : columns) {
    for (const auto& [mono, c] : col.terms()) support.insert(mono);
  }
  FirstOrderSystem sys;
  sys.a = Matrix(support.size(), columns.size());
  std::size_t r = 0;
  for (const Monomial& mono : support) {
    for (std::size_t j = 0; j < columns.size(); ++j) sys.a(r, j) = columns[j].coeff(mono);
    sys.rhs.push_back(-constant.coeff(mono));
    ++r;
  }
  return sys;
}

FirstOrderSolution read_solution(const std::vector<FieldElem>& u, Var v, const std::optional<FieldElem>& fixed_n) {
  const FieldElem n = fixed_n ? *fixed_n : u[3];
  return FirstOrderSolution{DiffOp::first_order(v, n), SchrodingerOp(u[0], u[1], u[2]), std::nullopt};
}

}  // namespace

std::vector<FirstOrderSolution> solve_first_order(const SchrodingerOp& l, const DiffOp& m) {
  const Var v = first_order_variable(m);
  FirstOrderSystem sys = build_system(l, m, v, std::nullopt);
  LinearSolution sol = solve_linear(sys.a, sys.rhs);
  if (!sol.consistent) {
    throw Error(ErrorCode::NoSolution, "no first-order N and L1 intertwine with M = " + m.to_string(),
                sol.obstruction.to_string());
  }
  if (sol.free_columns.empty()) return {read_solution(sol.particular, v, std::nullopt)};

  // Pin every free unknown to a fresh constant symbol and solve again.
  Tower& tower = active_tower();
  std::optional<std::size_t> first_parameter;
  const std::size_t rows = sys.a.rows();
  Matrix pinned(rows + sol.free_columns.size(), sys.a.cols());
  std::vector<FieldElem> rhs = sys.rhs;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < sys.a.cols(); ++c) pinned(r, c) = sys.a(r, c);
  }
  for (std::size_t i = 0; i < sol.free_columns.size(); ++i) {
    const std::size_t symbol = tower.declare(tower.fresh_name("n"), FieldElem(0L), FieldElem(0L));
    if (!first_parameter) first_parameter = symbol;
    pinned(rows + i, sol.free_columns[i]) = FieldElem(1L);
    rhs.push_back(FieldElem::symbol(symbol));
  }
  sol = solve_linear(pinned, rhs);
  FirstOrderSolution out = read_solution(sol.particular, v, std::nullopt);
  out.parameter = first_parameter;
  return {out};
}

FieldElem wronskian(const WronskianSpec& spec, const FieldElem& f) {
  const std::size_t size = spec.t + spec.s + 1;
  if (spec.functions.size() + 1 != size) {
    throw Error(ErrorCode::TypeError, "a (t,s)-Wronskian needs t+s fixed functions");
  }
  Matrix w(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const FieldElem& g = r == 0 ? f : spec.functions[r - 1];
    w(r, 0) = g;
    FieldElem d = g;
    for (unsigned i = 1; i <= spec.t; ++i) w(r, i) = d = derive(d, Var::X);
    d = g;
    for (unsigned j = 1; j <= spec.s; ++j) w(r, spec.t + j) = d = derive(d, Var::Y);
  }
  return determinant(std::move(w));
}

DiffOp wronskian_operator(const WronskianSpec& spec) {
  const std::size_t size = spec.t + spec.s + 1;
  if (spec.functions.size() + 1 != size) {
    throw Error(ErrorCode::TypeError, "a (t,s)-Wronskian needs t+s fixed functions");
  }
  // Rows of the fixed functions; the symbolic first row is expanded.
  Matrix rows(size, size);
  for (std::size_t r = 1; r < size; ++r) {
    const FieldElem& g = spec.functions[r - 1];
    rows(r, 0) = g;
    FieldElem d = g;
    for (unsigned i = 1; i <= spec.t; ++i) rows(r, i) = d = derive(d, Var::X);
    d = g;
    for (unsigned j = 1; j <= spec.s; ++j) rows(r, spec.t + j) = d = derive(d, Var::Y);
  }
  DiffOp out;
  for (std::size_t col = 0; col < size; ++col) {
    FieldElem minor = determinant(rows.without(0, col));
    if (col % 2 == 1) minor = -minor;
    const Monomial mono = col <= spec.t ? Monomial{static_cast<unsigned>(col), 0}
                                        : Monomial{0, static_cast<unsigned>(col - spec.t)};
    out += DiffOp::monomial(mono, minor);
  }
  return out;
}

namespace {

// W_{m-1,n}(psis), or W_{0,n-1}(psis) when m == 0.
FieldElem wronskian_dt_denominator(const std::vector<FieldElem>& psis, unsigned m, unsigned n) {
  if (psis.empty()) return FieldElem(1L);
  WronskianSpec spec{m == 0 ? 0 : m - 1, m == 0 ? n - 1 : n, {psis.begin() + 1, psis.end()}};
  return wronskian(spec, psis.front());
}

}  // namespace

DiffOp wronskian_dt_operator(const std::vector<FieldElem>& psis, unsigned m, unsigned n) {
  if (psis.size() != m + n) throw Error(ErrorCode::TypeError, "need exactly m + n kernel elements");
  const FieldElem den = wronskian_dt_denominator(psis, m, n);
  if (den.is_zero()) throw Error(ErrorCode::DegenerateWronskian, "denominator Wronskian vanishes", "0");
  FieldElem scale = den.inverse();
  if ((m + n) % 2 == 1) scale = -scale;
  return scale * wronskian_operator(WronskianSpec{m, n, psis});
}

const char* case_name(WronskianCase c) {
  switch (c) {
    case WronskianCase::I: return "I";
    case WronskianCase::IIA: return "II.A";
    case WronskianCase::IIB: return "II.B";
  }
  return "?";
}

FirstOrderWronskian make_first_order_wronskian(const SchrodingerOp& l, const FieldElem& psi, Var v) {
  certify_kernel(l, psi);
  const FieldElem psi_v = derive(psi, v);
  const DiffOp m = DiffOp::first_order(v, -(psi_v / psi));
  // Coefficient of the opposite Laplace generator: b for v = x, a for v = y.
  const FieldElem& beta = v == Var::X ? l.b() : l.a();
  WronskianCase kind = WronskianCase::I;
  FieldElem n;
  if (psi_v.is_zero() && !l.c().is_zero()) {
    kind = WronskianCase::IIA;
    n = -(derive(l.c(), v) / l.c());
  } else {
    if (psi_v.is_zero()) kind = WronskianCase::IIB;
    // phi = (D_v + beta)(psi); with beta == 0 this is psi_v.
    const FieldElem phi = psi_v + beta * psi;
    n = phi.is_zero() ? beta : -(derive(phi, v) / phi);
  }
  FirstOrderSystem sys = build_system(l, m, v, n);
  const LinearSolution sol = solve_linear(sys.a, sys.rhs);
  if (!sol.consistent || !sol.free_columns.empty()) {
    throw Error(ErrorCode::NotVerified, "no target operator for the Wronskian step", sol.obstruction.to_string());
  }
  FirstOrderSolution s = read_solution(sol.particular, v, n);
  return FirstOrderWronskian{DarbouxMorphism(l, s.target, m, s.n), kind};
}

DarbouxMorphism standard_representative(const DarbouxMorphism& d) {
  const Projection& p = d.projection();
  return DarbouxMorphism(d.source(), d.target(), p.nf, d.n() - compose(d.target().as_diffop(), p.a));
}

DarbouxMorphism make_wronskian_dt(const SchrodingerOp& l, const std::vector<FieldElem>& psis, unsigned m, unsigned n) {
  if (psis.size() != m + n) throw Error(ErrorCode::TypeError, "need exactly m + n kernel elements");
  for (const auto& psi : psis) {
    try {
      certify_kernel(l, psi);
    } catch (const Error& e) {
      throw Error(ErrorCode::NotCertified, "kernel element not certified: " + psi.to_string(), e.certificate());
    }
  }
  const DiffOp target_m = wronskian_dt_operator(psis, m, n);
  if (psis.empty()) return DarbouxMorphism::identity(l);

  // Flag construction: peel one kernel element per step, pushing the rest
  // through each step's M.
  std::vector<FieldElem> rest = psis;
  DarbouxMorphism acc = DarbouxMorphism::identity(l);
  for (unsigned step = 0; step < m + n; ++step) {
    const Var v = step < m ? Var::X : Var::Y;
    const FieldElem head = rest.front();
    if (head.is_zero()) throw Error(ErrorCode::DegenerateWronskian, "kernel elements are dependent", "0");
    const DarbouxMorphism first = make_first_order_wronskian(acc.target(), head, v).morphism;
    std::vector<FieldElem> next;
    for (std::size_t i = 1; i < rest.size(); ++i) next.push_back(apply(first.m(), rest[i]));
    rest = std::move(next);
    acc = compose_morphisms(acc, first);
  }

  // pi_L(M_flag) == lambda * M_target for a function lambda.
  const DiffOp& nf = acc.standard();
  const Monomial lead = m > 0 ? Monomial{m, 0} : Monomial{0, n};
  const FieldElem lambda = nf.coeff(lead) / target_m.coeff(lead);
  if (lambda.is_zero() || !(nf == lambda * target_m)) {
    throw Error(ErrorCode::NotVerified, "iterated construction disagrees with the Wronskian formula",
                (nf - lambda * target_m).to_string());
  }
  return standard_representative(compose_morphisms(acc, scaling_morphism(acc.target(), lambda.inverse())));
}

}  // namespace dtf
