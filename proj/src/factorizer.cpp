#include "dtf/factorizer.hpp"

#include "dtf/error.hpp"

namespace dtf {

const char* step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::LaplaceRight: return "LaplaceRight";
    case StepKind::LaplaceLeft: return "LaplaceLeft";
    case StepKind::InverseLaplace: return "InverseLaplace";
    case StepKind::WronskianX: return "WronskianX";
    case StepKind::WronskianY: return "WronskianY";
    case StepKind::Gauge: return "Gauge";
  }
  return "?";
}

DarbouxMorphism FactorizationChain::composed() const {
  DarbouxMorphism acc = DarbouxMorphism::identity(source);
  for (const auto& step : steps) acc = compose_morphisms(acc, step.morphism);
  return acc;
}

namespace {

DarbouxMorphism laplace_morphism(const SchrodingerOp& l, Direction d) {
  LaplaceMove move = laplace_transform(l, d);
  return DarbouxMorphism(l, move.target, move.m, move.n);
}

// Splits a mixed-free operator into its pure Dx part, pure Dy part and
// zero-order term.
struct Parts {
  DiffOp px, py, p0;
};

Parts split_parts(const DiffOp& p) {
  Parts out;
  for (const auto& [mono, c] : p.terms()) {
    DiffOp t = DiffOp::monomial(mono, c);
    if (mono.dx > 0) {
      out.px += t;
    } else if (mono.dy > 0) {
      out.py += t;
    } else {
      out.p0 += t;
    }
  }
  return out;
}

// (P^x + p0 + r)(Dx + b) + A k with P^y = A (Dy + a) + r, and the mirror
// image for var == Y.
DiffOp precompose_formula(const DiffOp& p, const SchrodingerOp& l, Var var) {
  const Parts parts = split_parts(p);
  const bool x = var == Var::X;
  const DiffOp& eliminated = x ? parts.py : parts.px;
  const DiffOp& kept = x ? parts.px : parts.py;
  const DiffOp other_generator = x ? DiffOp::first_order(Var::Y, l.a()) : DiffOp::first_order(Var::X, l.b());
  const DiffOp generator = x ? DiffOp::first_order(Var::X, l.b()) : DiffOp::first_order(Var::Y, l.a());
  Division div;
  if (!eliminated.is_zero()) div = right_divide_first_order(eliminated, other_generator);
  const FieldElem& invariant = x ? l.k() : l.h();
  return compose(kept + parts.p0 + DiffOp(div.remainder), generator) + compose(div.quotient, DiffOp(invariant));
}

Var ordinary_variable(const DiffOp& m) {
  if (m.is_ordinary_in(Var::X)) return Var::X;
  if (m.is_ordinary_in(Var::Y)) return Var::Y;
  throw Error(ErrorCode::MixedOperandError, "M is not ordinary: " + m.to_string());
}

std::vector<FieldElem> push_forward(const std::vector<FieldElem>& hints, const DiffOp& m) {
  std::vector<FieldElem> out;
  for (const auto& psi : hints) {
    FieldElem image = apply(m, psi);
    if (!image.is_zero()) out.push_back(std::move(image));
  }
  return out;
}

}  // namespace

PrecomposeResult laplace_precompose(const DarbouxMorphism& m, Var var) {
  const SchrodingerOp& l = m.source();
  const bool x = var == Var::X;
  // Q: L -> L~, then R: L~ -> L' with L' == g L g^{-1}.
  const DarbouxMorphism q = laplace_morphism(l, x ? Direction::Left : Direction::Right);
  const DarbouxMorphism r = laplace_morphism(q.target(), x ? Direction::Right : Direction::Left);
  const DiffOp g_op = project(compose(r.m(), q.m()), l).nf;
  if (g_op.order() != 0 || g_op.is_zero()) {
    throw Error(ErrorCode::NotVerified, "Laplace round trip does not project to a function", g_op.to_string());
  }
  const FieldElem g = g_op.coeff(Monomial{0, 0});
  const DarbouxMorphism back = scaling_morphism(r.target(), g.inverse());
  if (!(back.target() == l)) {
    throw Error(ErrorCode::NotVerified, "Laplace round trip does not return to L up to gauge", back.target().to_string());
  }
  const DarbouxMorphism into_l = compose_morphisms(r, back);
  DarbouxMorphism reduced = standard_representative(compose_morphisms(into_l, m));

  // Second route: the closed form for pi(M g^{-1} M_R) modulo L~.
  const DiffOp formula = precompose_formula(compose(m.standard(), DiffOp(g.inverse())), q.target(), var);
  if (!(formula == reduced.m())) {
    throw Error(ErrorCode::NotVerified, "Laplace precomposition disagrees with its closed form",
                (formula - reduced.m()).to_string());
  }
  return PrecomposeResult{q, std::move(reduced)};
}

Reduction reduce_to_ordinary(const DarbouxMorphism& m, const FactorOptions& options) {
  DarbouxMorphism cur = standard_representative(m);
  const BiDegree bd = cur.bidegree();
  if (bd.d2 == 0) return Reduction{{}, cur, Var::X};
  if (bd.d1 == 0) return Reduction{{}, cur, Var::Y};

  // Eliminating Dy needs d2 left moves (h != 0), eliminating Dx needs d1
  // right moves (k != 0).
  auto reach = [&](int steps) -> unsigned {
    const int limit = steps > 0 ? std::min<int>(steps, options.max_probe_depth)
                                : -std::min<int>(-steps, options.max_probe_depth);
    return static_cast<unsigned>(laplace_chain(cur.source(), limit).ops.size() - 1);
  };
  const unsigned left_reach = reach(-static_cast<int>(bd.d2));
  const unsigned right_reach = reach(static_cast<int>(bd.d1));
  const bool eliminate_y = left_reach >= bd.d2;
  const bool eliminate_x = right_reach >= bd.d1;
  if (!eliminate_y && !eliminate_x) {
    throw Error(ErrorCode::ChainTooShort,
                "Laplace chain too short: needs " + std::to_string(bd.d2) + " left or " + std::to_string(bd.d1) +
                    " right moves",
                "left=" + std::to_string(left_reach) + " right=" + std::to_string(right_reach));
  }
  const Var var = eliminate_y && (!eliminate_x || bd.d2 <= bd.d1) ? Var::X : Var::Y;
  const unsigned count = var == Var::X ? bd.d2 : bd.d1;

  Reduction out{{}, cur, var};
  for (unsigned i = 0; i < count; ++i) {
    const BiDegree before = out.reduced.bidegree();
    PrecomposeResult step = laplace_precompose(out.reduced, var);
    const BiDegree after = step.reduced.bidegree();
    const BiDegree expected = var == Var::X ? BiDegree{before.d1 + 1, before.d2 - 1} : BiDegree{before.d1 - 1, before.d2 + 1};
    if (!(after == expected)) {
      throw Error(ErrorCode::NotVerified, "unexpected bi-degree after Laplace precomposition",
                  "(" + std::to_string(after.d1) + "," + std::to_string(after.d2) + ")");
    }
    out.prefix.push_back(FactorStep{StepKind::InverseLaplace, std::move(step.undo), std::nullopt});
    out.reduced = std::move(step.reduced);
  }
  return out;
}

Split split_wronskian(const DarbouxMorphism& m, const FieldElem& psi) {
  const Var var = ordinary_variable(m.m());
  if (psi.is_zero() || !apply(m.m(), psi).is_zero() || !apply(m.source().as_diffop(), psi).is_zero()) {
    throw Error(ErrorCode::WitnessInvalid, "psi is not a common kernel element of L and M", psi.to_string());
  }
  FirstOrderWronskian w = make_first_order_wronskian(m.source(), psi, var);
  const Division dm = right_divide_first_order(m.m(), w.morphism.m());
  if (!dm.remainder.is_zero()) {
    throw Error(ErrorCode::WitnessInvalid, "M is not divisible by M_psi", dm.remainder.to_string());
  }
  const Division dn = right_divide_first_order(m.n(), w.morphism.n());
  if (!dn.remainder.is_zero()) {
    throw Error(ErrorCode::WitnessInvalid, "N is not divisible by N_psi", dn.remainder.to_string());
  }
  DarbouxMorphism rest(w.morphism.target(), m.target(), dm.quotient, dn.quotient);
  const StepKind kind = var == Var::X ? StepKind::WronskianX : StepKind::WronskianY;
  return Split{FactorStep{kind, std::move(w.morphism), psi}, std::move(rest)};
}

Split split_laplace(const DarbouxMorphism& m) {
  const Var var = ordinary_variable(m.m());
  const Direction d = var == Var::X ? Direction::Right : Direction::Left;
  DarbouxMorphism first = laplace_morphism(m.source(), d);
  const Division dm = right_divide_first_order(m.m(), first.m());
  if (!dm.remainder.is_zero()) {
    throw Error(ErrorCode::NonzeroRemainder, "M is not divisible by the Laplace generator", dm.remainder.to_string());
  }
  const Division dn = right_divide_first_order(m.n(), first.n());
  if (!dn.remainder.is_zero()) {
    throw Error(ErrorCode::NonzeroRemainder, "N is not divisible by the Laplace N", dn.remainder.to_string());
  }
  DarbouxMorphism rest(first.target(), m.target(), dm.quotient, dn.quotient);
  const StepKind kind = var == Var::X ? StepKind::LaplaceRight : StepKind::LaplaceLeft;
  return Split{FactorStep{kind, std::move(first), std::nullopt}, std::move(rest)};
}

namespace {

FactorStep classify_last(DarbouxMorphism last, Var var, const std::vector<FieldElem>& hints) {
  const SchrodingerOp& l = last.source();
  const DiffOp& m = last.m();
  const FieldElem lead = m.coeff(var == Var::X ? Monomial{1, 0} : Monomial{0, 1});
  const DiffOp monic = lead.inverse() * m;
  const DiffOp laplace = var == Var::X ? DiffOp::first_order(Var::X, l.b()) : DiffOp::first_order(Var::Y, l.a());
  if (monic == laplace) {
    return FactorStep{var == Var::X ? StepKind::LaplaceRight : StepKind::LaplaceLeft, std::move(last), std::nullopt};
  }
  std::optional<FieldElem> witness;
  for (const auto& psi : hints) {
    if (apply(m, psi).is_zero()) {
      witness = psi;
      break;
    }
  }
  return FactorStep{var == Var::X ? StepKind::WronskianX : StepKind::WronskianY, std::move(last), witness};
}

}  // namespace

FactorizationChain factorize(const DarbouxMorphism& m, const std::vector<FieldElem>& hints, const FactorOptions& options) {
  for (const auto& psi : hints) {
    if (psi.is_zero() || !apply(m.source().as_diffop(), psi).is_zero()) {
      throw Error(ErrorCode::NotCertified, "hint is not in ker L: " + psi.to_string());
    }
  }
  FactorizationChain chain{m.source(), m.target(), {}, 0, false, {}};
  if (m.order() == 0) {
    chain.steps.push_back(FactorStep{StepKind::Gauge, standard_representative(m), std::nullopt});
    chain.composed_equivalent = equivalent(chain.composed(), m);
    return chain;
  }

  Reduction red = reduce_to_ordinary(m, options);
  std::vector<FieldElem> live = hints;
  for (const auto& step : red.prefix) live = push_forward(live, step.morphism.m());
  chain.prefix_length = red.prefix.size();
  chain.steps = std::move(red.prefix);
  const Var var = red.variable;

  DarbouxMorphism cur = std::move(red.reduced);
  unsigned guard = cur.order();
  while (cur.order() > 1) {
    const FieldElem& invariant = var == Var::X ? cur.source().k() : cur.source().h();
    if (invariant.is_zero()) {
      throw Error(ErrorCode::FactorizableOperator,
                  std::string(var == Var::X ? "k" : "h") + " vanishes at " + cur.source().to_string());
    }
    std::optional<Split> split;
    for (const auto& psi : live) {
      if (!apply(cur.m(), psi).is_zero()) continue;
      try {
        split = split_wronskian(cur, psi);
        break;
      } catch (const Error& e) {
        chain.diagnostics.push_back(std::string("Wronskian split rejected: ") + e.what());
      }
    }
    if (!split) {
      try {
        split = split_laplace(cur);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonzeroRemainder) throw;
        throw Error(ErrorCode::StuckNoSplit,
                    "no certified common kernel element and the Laplace division leaves a remainder at order " +
                        std::to_string(cur.order()),
                    e.certificate());
      }
    }
    live = push_forward(live, split->first.morphism.m());
    chain.steps.push_back(std::move(split->first));
    cur = std::move(split->rest);
    if (cur.order() + 1 != guard) throw Error(ErrorCode::NotVerified, "split did not lower the order by one");
    guard = cur.order();
  }
  chain.steps.push_back(classify_last(std::move(cur), var, live));
  chain.composed_equivalent = equivalent(chain.composed(), m);
  if (!chain.composed_equivalent) chain.diagnostics.push_back("composed chain is not equivalent to the input");
  return chain;
}

bool classify_invertible(const FactorizationChain& chain) {
  for (const auto& step : chain.steps) {
    if (step.kind == StepKind::WronskianX || step.kind == StepKind::WronskianY) return false;
  }
  return true;
}

}  // namespace dtf
