#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtf/darboux.hpp"

namespace dtf {

enum class StepKind { LaplaceRight, LaplaceLeft, InverseLaplace, WronskianX, WronskianY, Gauge };

const char* step_kind_name(StepKind kind);

struct FactorStep {
  StepKind kind;
  DarbouxMorphism morphism;
  std::optional<FieldElem> witness;  // psi of a Wronskian step
};

struct FactorizationChain {
  SchrodingerOp source;
  SchrodingerOp target;
  std::vector<FactorStep> steps;
  std::size_t prefix_length = 0;  // leading inverse-Laplace steps
  bool composed_equivalent = false;
  std::vector<std::string> diagnostics;

  // Composition of all steps, identity for an empty chain.
  DarbouxMorphism composed() const;
};

struct FactorOptions {
  unsigned max_probe_depth = 16;
};

struct Reduction {
  std::vector<FactorStep> prefix;
  DarbouxMorphism reduced;  // standard representative, M ordinary in Dx or Dy
  Var variable = Var::X;    // the variable M is ordinary in
};

/// One precomposition with a Laplace move into L: the move (L -> L~) that
/// is undone, and the morphism m~ : L~ -> L1 with m equivalent to m~ Q.
/// Eliminates one order in Dy when var == X, in Dx when var == Y.
struct PrecomposeResult {
  DarbouxMorphism undo;     // Q
  DarbouxMorphism reduced;  // m~, standard representative
};

PrecomposeResult laplace_precompose(const DarbouxMorphism& m, Var var);

/// Precomposes Laplace moves until M is ordinary in one variable.
Reduction reduce_to_ordinary(const DarbouxMorphism& m, const FactorOptions& options = {});

struct Split {
  FactorStep first;
  DarbouxMorphism rest;
};

/// Splits off the Wronskian step generated by psi in ker L and ker M.
Split split_wronskian(const DarbouxMorphism& m, const FieldElem& psi);

/// Splits off the Laplace move D_x + b (D_y + a when M is ordinary in Dy).
Split split_laplace(const DarbouxMorphism& m);

/// Factors m into first-order steps. hints are certified elements of ker L
/// for the source L of m.
FactorizationChain factorize(const DarbouxMorphism& m, const std::vector<FieldElem>& hints = {},
                             const FactorOptions& options = {});

bool classify_invertible(const FactorizationChain& chain);

}  // namespace dtf
