#include "dtf/schrodinger.hpp"

#include <functional>
#include <memory>

#include "dtf/darboux.hpp"
#include "dtf/error.hpp"

namespace dtf {

SchrodingerOp::SchrodingerOp(FieldElem a, FieldElem b, FieldElem c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  const FieldElem ab = a_ * b_;
  k_ = derive(b_, Var::Y) + ab - c_;
  h_ = derive(a_, Var::X) + ab - c_;
}

SchrodingerOp SchrodingerOp::from_diffop(const DiffOp& p) {
  for (const auto& [m, c] : p.terms()) {
    const bool allowed = (m.dx <= 1 && m.dy <= 1);
    if (!allowed || (m.mixed() && !c.is_one())) {
      throw Error(ErrorCode::MixedOperandError, "not of the form Dx*Dy + a*Dx + b*Dy + c: " + p.to_string());
    }
  }
  if (!p.coeff(Monomial{1, 1}).is_one()) {
    throw Error(ErrorCode::MixedOperandError, "not of the form Dx*Dy + a*Dx + b*Dy + c: " + p.to_string());
  }
  return SchrodingerOp(p.coeff(Monomial{1, 0}), p.coeff(Monomial{0, 1}), p.coeff(Monomial{0, 0}));
}

DiffOp SchrodingerOp::as_diffop() const {
  DiffOp p = DiffOp::monomial(Monomial{1, 1}, FieldElem(1L));
  p.set(Monomial{1, 0}, a_);
  p.set(Monomial{0, 1}, b_);
  p.set(Monomial{0, 0}, c_);
  return p;
}

std::string SchrodingerOp::to_string() const {
  return "schrodinger(" + a_.to_string() + ", " + b_.to_string() + ", " + c_.to_string() + ")";
}

Invariants laplace_invariants(const SchrodingerOp& l) { return Invariants{l.h(), l.k()}; }

IncompleteFactorizations incomplete_factorizations(const SchrodingerOp& l) {
  const DiffOp my = DiffOp::first_order(Var::X, l.b());
  const DiffOp mx = DiffOp::first_order(Var::Y, l.a());
  IncompleteFactorizations out{{mx, my, l.k()}, {my, mx, l.h()}};
  const DiffOp lop = l.as_diffop();
  for (const auto* f : {&out.by_k, &out.by_h}) {
    const DiffOp residual = compose(f->outer, f->inner) - DiffOp(f->invariant) - lop;
    if (!residual.is_zero()) {
      throw Error(ErrorCode::NotVerified, "incomplete factorization identity failed", residual.to_string());
    }
  }
  return out;
}

const char* direction_name(Direction d) { return d == Direction::Right ? "right" : "left"; }

LaplaceMove laplace_transform(const SchrodingerOp& l, Direction direction) {
  const bool right = direction == Direction::Right;
  const FieldElem& invariant = right ? l.k() : l.h();
  if (invariant.is_zero()) {
    throw Error(ErrorCode::VanishingInvariant,
                std::string(right ? "k" : "h") + " vanishes; no " + direction_name(direction) + " Laplace move");
  }
  const DiffOp m = right ? DiffOp::first_order(Var::X, l.b()) : DiffOp::first_order(Var::Y, l.a());
  const auto solutions = solve_first_order(l, m);
  if (solutions.size() != 1 || solutions.front().parameter) {
    throw Error(ErrorCode::NoSolution, "Laplace move is not unique");
  }
  return LaplaceMove{solutions.front().target, m, solutions.front().n};
}

LaplaceChain laplace_chain(const SchrodingerOp& l, int steps) {
  LaplaceChain chain;
  chain.ops.push_back(l);
  const Direction direction = steps >= 0 ? Direction::Right : Direction::Left;
  const int count = steps >= 0 ? steps : -steps;
  for (int i = 0; i < count; ++i) {
    const SchrodingerOp& cur = chain.ops.back();
    const FieldElem& needed = direction == Direction::Right ? cur.k() : cur.h();
    if (needed.is_zero()) {
      chain.termination = ChainTermination::Factorizable;
      break;
    }
    SchrodingerOp next = laplace_transform(cur, direction).target;
    const bool ok = direction == Direction::Right ? next.h() == cur.k() : next.k() == cur.h();
    chain.relations_hold = chain.relations_hold && ok;
    chain.ops.push_back(std::move(next));
  }
  return chain;
}

SchrodingerOp gauge(const SchrodingerOp& l, const FieldElem& fx, const FieldElem& fy) {
  return SchrodingerOp::from_diffop(gauge_by_gradient(l.as_diffop(), fx, fy));
}

namespace {

// Symbol standing for D_y^order f where f_x == -b.
std::size_t declare_gauge_potential(const FieldElem& b, unsigned order) {
  Tower& tower = active_tower();
  const std::string name = tower.fresh_name(order == 0 ? "F" : "G");
  return tower.declare_lazy(name, [b, order](Var v) {
    if (v == Var::X) return -derive(b, Var::Y, order);
    return FieldElem::symbol(declare_gauge_potential(b, order + 1));
  });
}

}  // namespace

GaugeNormalization gauge_normalize_b(const SchrodingerOp& l) {
  if (l.b().is_zero()) return GaugeNormalization{l, FieldElem(0L), FieldElem(0L)};
  FieldElem f;
  if (auto rational = antiderivative_x(-l.b())) {
    f = *rational;
  } else {
    f = FieldElem::symbol(declare_gauge_potential(l.b(), 0));
  }
  const FieldElem fy = derive(f, Var::Y);
  return GaugeNormalization{gauge(l, -l.b(), fy), f, fy};
}

FieldElem certify_kernel(const SchrodingerOp& l, const FieldElem& psi) {
  if (psi.is_zero()) throw Error(ErrorCode::NotInKernel, "the zero function is not a kernel hint", "0");
  const FieldElem residual = apply(l.as_diffop(), psi);
  if (!residual.is_zero()) {
    throw Error(ErrorCode::NotInKernel, "L(psi) != 0 for psi = " + psi.to_string(), residual.to_string());
  }
  return psi;
}

void KernelRegistry::add(const SchrodingerOp& l, const FieldElem& psi) {
  certify_kernel(l, psi);
  for (auto& [op, elems] : entries_) {
    if (op == l) {
      for (const auto& e : elems) {
        if (e == psi) return;
      }
      elems.push_back(psi);
      return;
    }
  }
  entries_.push_back({l, {psi}});
}

std::vector<FieldElem> KernelRegistry::elements(const SchrodingerOp& l) const {
  for (const auto& [op, elems] : entries_) {
    if (op == l) return elems;
  }
  return {};
}

}  // namespace dtf
