#include <doctest.h>

#include <functional>

#include "dtf/darboux.hpp"
#include "dtf/error.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dtf;
using namespace dtf::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::TypeError;
}

// Rows (g, g_x, ..., D_x^t g, g_y, ..., D_y^s g) for the Leibniz oracle.
std::vector<FieldElem> wronskian_row(const FieldElem& g, unsigned t, unsigned s) {
  std::vector<FieldElem> row{g};
  FieldElem d = g;
  for (unsigned i = 0; i < t; ++i) row.push_back(d = derive(d, Var::X));
  d = g;
  for (unsigned j = 0; j < s; ++j) row.push_back(d = derive(d, Var::Y));
  return row;
}

FieldElem wronskian_oracle(unsigned t, unsigned s, const std::vector<FieldElem>& functions) {
  std::vector<std::vector<FieldElem>> m;
  for (const auto& g : functions) m.push_back(wronskian_row(g, t, s));
  return leibniz_determinant(m);
}

// b == 0, a random, c solved from L(psi) == 0.
SchrodingerOp plant_b_zero(Rng& rng, const FieldElem& psi) {
  const FieldElem a = random_poly(rng, 1, 2);
  const FieldElem c = -(derive(derive(psi, Var::X), Var::Y) + a * derive(psi, Var::X)) / psi;
  return SchrodingerOp(a, FieldElem(0L), c);
}

}  // namespace

TEST_CASE("verify_intertwining") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const SchrodingerOp l = random_schrodinger(rng, 1);
    const Verification id = verify_intertwining(l, DiffOp(1L), DiffOp(1L), l);
    CHECK(id.ok);
    CHECK(id.residual.is_zero());
    const LaplaceMove move = laplace_transform(l, Direction::Right);
    CHECK(verify_intertwining(l, move.m, move.n, move.target).ok);
    const Verification bad = verify_intertwining(l, move.m, move.n + DiffOp(1L), move.target);
    CHECK_FALSE(bad.ok);
    CHECK(bad.residual == l.as_diffop());
  }
  const SchrodingerOp l = random_schrodinger(rng, 1);
  CHECK(code_of([&] { DarbouxMorphism(l, l, DiffOp(), DiffOp()); }) == ErrorCode::ZeroOperator);
  CHECK(code_of([&] { DarbouxMorphism(l, l, DiffOp(1L), DiffOp(2L)); }) == ErrorCode::NotVerified);
}

TEST_CASE("equivalence of representatives") {
  Rng rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    const SchrodingerOp l = random_schrodinger(rng, 1);
    const LaplaceMove move = laplace_transform(l, trial % 2 ? Direction::Right : Direction::Left);
    const DarbouxMorphism d(l, move.target, move.m, move.n);
    const DiffOp a = random_diffop(rng, 1, 1, 3);
    const DarbouxMorphism shifted(l, move.target, move.m + compose(a, l.as_diffop()),
                                  move.n + compose(move.target.as_diffop(), a));
    CHECK(equivalent(d, shifted));
    CHECK(equivalent(d, d));
    CHECK(equivalent(shifted, standard_representative(shifted)));
    CHECK(standard_representative(shifted).m() == d.m());
  }
  const SchrodingerOp l = random_schrodinger(rng, 1);
  const LaplaceMove move = laplace_transform(l, Direction::Right);
  CHECK(code_of([&] { equivalent(DarbouxMorphism::identity(l), DarbouxMorphism(l, move.target, move.m, move.n)); }) ==
        ErrorCode::SourceTargetMismatch);
  // (M, N) vs (M + 1, N + 1) on an endomorphism of L
  const DarbouxMorphism id = DarbouxMorphism::identity(l);
  const DarbouxMorphism twice(l, l, DiffOp(2L), DiffOp(2L));
  CHECK_FALSE(equivalent(id, twice));
}

TEST_CASE("composition and representative independence") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const SchrodingerOp l = random_schrodinger(rng, 1);
    const LaplaceMove m1 = laplace_transform(l, Direction::Right);
    const DarbouxMorphism first(l, m1.target, m1.m, m1.n);
    CHECK(equivalent(compose_morphisms(first, DarbouxMorphism::identity(m1.target)), first));
    CHECK(equivalent(compose_morphisms(DarbouxMorphism::identity(l), first), first));
    if (m1.target.k().is_zero()) continue;
    const LaplaceMove m2 = laplace_transform(m1.target, Direction::Right);
    const DarbouxMorphism second(m1.target, m2.target, m2.m, m2.n);
    const DarbouxMorphism both = compose_morphisms(first, second);
    CHECK(both.m() == compose(m2.m, m1.m));
    const DiffOp a = random_diffop(rng, 1, 1, 2);
    const DarbouxMorphism first_alt(l, m1.target, m1.m + compose(a, l.as_diffop()),
                                    m1.n + compose(m1.target.as_diffop(), a));
    CHECK(equivalent(compose_morphisms(first_alt, second), both));
    CHECK(code_of([&] { compose_morphisms(second, first); }) == ErrorCode::SourceTargetMismatch);
  }
}

TEST_CASE("scaling morphisms") {
  Rng rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const SchrodingerOp l = random_schrodinger(rng, 1);
    const FieldElem mu = random_nonzero_poly(rng, 1, 2);
    const DarbouxMorphism s = scaling_morphism(l, mu);
    CHECK(s.m() == DiffOp(mu));
    CHECK(s.target().h() == l.h());
    CHECK(s.target().k() == l.k());
    CHECK(s.bidegree() == BiDegree{0, 0});
  }
}

TEST_CASE("solve_first_order") {
  Tower tower;
  TowerScope scope(tower);
  Rng rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    const SchrodingerOp l = random_schrodinger(rng, 1);
    const auto laplace = solve_first_order(l, DiffOp::first_order(Var::X, l.b()));
    REQUIRE(laplace.size() == 1);
    CHECK(laplace[0].target == laplace_transform(l, Direction::Right).target);
    CHECK_FALSE(laplace[0].parameter.has_value());
  }
  for (int trial = 0; trial < 15; ++trial) {
    const FieldElem psi = random_psi(rng);
    const SchrodingerOp l = plant_b_zero(rng, psi);
    const FieldElem px = derive(psi, Var::X);
    const auto sol = solve_first_order(l, DiffOp::first_order(Var::X, -px / psi));
    REQUIRE(sol.size() == 1);
    CHECK(sol[0].n == DiffOp::first_order(Var::X, -derive(px, Var::X) / px));
  }
  // L = Dx Dy, M = Dx: N = Dx + n over a free constant n
  const auto family = solve_first_order(SchrodingerOp(), DiffOp::dx());
  REQUIRE(family.size() == 1);
  REQUIRE(family[0].parameter.has_value());
  const FieldElem n = FieldElem::symbol(*family[0].parameter);
  CHECK(derive(n, Var::X).is_zero());
  CHECK(derive(n, Var::Y).is_zero());
  CHECK(family[0].n == DiffOp::first_order(Var::X, n));
  CHECK(family[0].target == SchrodingerOp(FieldElem(0L), n, FieldElem(0L)));
  CHECK(verify_intertwining(SchrodingerOp(), DiffOp::dx(), family[0].n, family[0].target).ok);
  // the n = 0 member
  CHECK(verify_intertwining(SchrodingerOp(), DiffOp::dx(), DiffOp::dx(), SchrodingerOp()).ok);

  // M_phi with phi outside ker L has no partner
  for (int trial = 0; trial < 10; ++trial) {
    const Planted p = random_planted(rng, 1);
    const FieldElem phi = p.psis[0] + X();
    const DiffOp m = DiffOp::first_order(Var::X, -derive(phi, Var::X) / phi);
    CHECK(code_of([&] { solve_first_order(p.l, m); }) == ErrorCode::NoSolution);
  }
  CHECK(code_of([&] { solve_first_order(SchrodingerOp(), DiffOp::dx(2)); }) == ErrorCode::MixedOperandError);
}

TEST_CASE("(t,s)-Wronskians against the Leibniz determinant") {
  Rng rng(56);
  const FieldElem x = X(), y = Y();
  const FieldElem f = x * x + y, psi = x * y + 1;
  CHECK(wronskian(WronskianSpec{1, 0, {psi}}, f) == f * derive(psi, Var::X) - psi * derive(f, Var::X));
  CHECK(wronskian(WronskianSpec{0, 0, {}}, f) == f);
  CHECK(wronskian(WronskianSpec{1, 1, {psi, psi}}, f).is_zero());
  for (int trial = 0; trial < 40; ++trial) {
    const unsigned t = static_cast<unsigned>(uniform(rng, 0, 2)), s = static_cast<unsigned>(uniform(rng, 0, 2));
    std::vector<FieldElem> fs;
    for (unsigned i = 0; i < t + s; ++i) fs.push_back(random_rational(rng));
    const FieldElem g = random_rational(rng);
    std::vector<FieldElem> all{g};
    all.insert(all.end(), fs.begin(), fs.end());
    const FieldElem expected = wronskian_oracle(t, s, all);
    CHECK(wronskian(WronskianSpec{t, s, fs}, g) == expected);
    CHECK(apply(wronskian_operator(WronskianSpec{t, s, fs}), g) == expected);
  }
  CHECK(code_of([] { wronskian(WronskianSpec{1, 1, {}}, FieldElem(1L)); }) == ErrorCode::TypeError);
}

TEST_CASE("first-order Wronskian transformations") {
  Rng rng(57);
  const FieldElem x = X(), y = Y();
  for (int trial = 0; trial < 30; ++trial) {
    const Planted p = random_planted(rng, 1);
    const FieldElem psi = p.psis[0];
    for (Var v : {Var::X, Var::Y}) {
      const FirstOrderWronskian w = make_first_order_wronskian(p.l, psi, v);
      CHECK(w.kind == WronskianCase::I);
      CHECK(w.morphism.m() == DiffOp::first_order(v, -derive(psi, v) / psi));
      CHECK(verify_intertwining(p.l, w.morphism.m(), w.morphism.n(), w.morphism.target()).ok);
      CHECK(apply(w.morphism.m(), psi).is_zero());
    }
  }
  // psi = y + 1 with c = x: b = -x (y + 1), psi_x == 0
  const SchrodingerOp iia(y, -(x * (y + 1)), x);
  REQUIRE(apply(iia.as_diffop(), y + 1).is_zero());
  const FirstOrderWronskian a = make_first_order_wronskian(iia, y + 1, Var::X);
  CHECK(a.kind == WronskianCase::IIA);
  CHECK(a.morphism.n() == DiffOp::first_order(Var::X, -(FieldElem(1L) / x)));
  CHECK(a.morphism.m() == DiffOp::dx());

  const SchrodingerOp iib(x, FieldElem(0L), FieldElem(0L));
  const FirstOrderWronskian b = make_first_order_wronskian(iib, y, Var::X);
  CHECK(b.kind == WronskianCase::IIB);
  CHECK(b.morphism.m() == DiffOp::dx());
  CHECK(verify_intertwining(iib, b.morphism.m(), b.morphism.n(), b.morphism.target()).ok);
  CHECK(code_of([&] { make_first_order_wronskian(iib, x * y, Var::X); }) == ErrorCode::NotInKernel);
}

TEST_CASE("Wronskian transformations of higher order") {
  Rng rng(58);
  for (int trial = 0; trial < 6; ++trial) {
    const Planted one = random_planted(rng, 1);
    const FieldElem psi = one.psis[0];
    const DarbouxMorphism mx = make_wronskian_dt(one.l, one.psis, 1, 0);
    CHECK(mx.m() == DiffOp::first_order(Var::X, -derive(psi, Var::X) / psi));
    const DarbouxMorphism my = make_wronskian_dt(one.l, one.psis, 0, 1);
    CHECK(my.m() == DiffOp::first_order(Var::Y, -derive(psi, Var::Y) / psi));

    const Planted two = random_planted(rng, 2);
    for (auto [m, n] : {std::pair{2u, 0u}, std::pair{1u, 1u}, std::pair{0u, 2u}}) {
      const DarbouxMorphism d = make_wronskian_dt(two.l, two.psis, m, n);
      // M == (-1)^(m+n) W_{m,n}(f, psis) / W_{m-1,n}(psis), checked on a test function
      const FieldElem f = random_rational(rng);
      std::vector<FieldElem> num_rows{f};
      num_rows.insert(num_rows.end(), two.psis.begin(), two.psis.end());
      const FieldElem num = wronskian_oracle(m, n, num_rows);
      const FieldElem den = m > 0 ? wronskian_oracle(m - 1, n, two.psis) : wronskian_oracle(0, n - 1, two.psis);
      CHECK(apply(d.m(), f) == num / den);
      CHECK(d.m().coeff(m > 0 ? Monomial{m, 0} : Monomial{0, n}) == FieldElem(n % 2 ? -1L : 1L));
      CHECK(d.bidegree() == BiDegree{m, n});
      for (const auto& psi2 : two.psis) CHECK(apply(d.m(), psi2).is_zero());
      CHECK(verify_intertwining(d.source(), d.m(), d.n(), d.target()).ok);
    }
  }
  const Planted p = random_planted(rng, 1);
  CHECK(code_of([&] { make_wronskian_dt(p.l, p.psis, 1, 1); }) == ErrorCode::TypeError);
  CHECK(code_of([&] { make_wronskian_dt(p.l, {p.psis[0], p.psis[0]}, 2, 0); }) == ErrorCode::DegenerateWronskian);
  CHECK(code_of([&] { make_wronskian_dt(p.l, {X() * Y() * Y()}, 1, 0); }) == ErrorCode::NotCertified);
}

TEST_CASE("morphisms map kernels to kernels") {
  Rng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const Planted p = random_planted(rng, 3);
    const DarbouxMorphism w = make_first_order_wronskian(p.l, p.psis[0], trial % 2 ? Var::X : Var::Y).morphism;
    for (const auto& psi : p.psis) CHECK(apply(w.target().as_diffop(), apply(w.m(), psi)).is_zero());
    const LaplaceMove move = laplace_transform(p.l, Direction::Right);
    for (const auto& psi : p.psis) CHECK(apply(move.target.as_diffop(), apply(move.m, psi)).is_zero());
    const DarbouxMorphism two = compose_morphisms(w, make_first_order_wronskian(w.target(), apply(w.m(), p.psis[1]), Var::X).morphism);
    CHECK(two.order() == 2);
    for (const auto& psi : p.psis) CHECK(apply(two.target().as_diffop(), apply(two.m(), psi)).is_zero());
  }
}
