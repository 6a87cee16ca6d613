#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtf/field.hpp"
#include "dtf/opring.hpp"

namespace dtf {

/// L = Dx Dy + a Dx + b Dy + c with its Laplace invariants
/// k = b_y + ab - c and h = a_x + ab - c.
class SchrodingerOp {
 public:
  SchrodingerOp() : SchrodingerOp(FieldElem(0L), FieldElem(0L), FieldElem(0L)) {}
  SchrodingerOp(FieldElem a, FieldElem b, FieldElem c);

  // Reads a, b, c off an operator of the shape Dx Dy + a Dx + b Dy + c;
  // throws MixedOperandError otherwise.
  static SchrodingerOp from_diffop(const DiffOp& p);

  const FieldElem& a() const { return a_; }
  const FieldElem& b() const { return b_; }
  const FieldElem& c() const { return c_; }
  const FieldElem& h() const { return h_; }
  const FieldElem& k() const { return k_; }

  DiffOp as_diffop() const;

  friend bool operator==(const SchrodingerOp& l, const SchrodingerOp& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.c_ == r.c_;
  }

  std::string to_string() const;

 private:
  FieldElem a_, b_, c_, h_, k_;
};

struct Invariants {
  FieldElem h;
  FieldElem k;
};

Invariants laplace_invariants(const SchrodingerOp& l);

/// L == compose(outer, inner) - invariant.
struct IncompleteFactorization {
  DiffOp outer;
  DiffOp inner;
  FieldElem invariant;
};

struct IncompleteFactorizations {
  IncompleteFactorization by_k;  // (Dy + a)(Dx + b) - k
  IncompleteFactorization by_h;  // (Dx + b)(Dy + a) - h
};

IncompleteFactorizations incomplete_factorizations(const SchrodingerOp& l);

/// Right moves are generated by Dx + b (need k != 0), left moves by
/// Dy + a (need h != 0).
enum class Direction { Right, Left };

const char* direction_name(Direction d);

struct LaplaceMove {
  SchrodingerOp target;
  DiffOp m;
  DiffOp n;
};

LaplaceMove laplace_transform(const SchrodingerOp& l, Direction direction);

enum class ChainTermination { Complete, Factorizable };

struct LaplaceChain {
  std::vector<SchrodingerOp> ops;  // ops[0] is the input
  ChainTermination termination = ChainTermination::Complete;
  // After a right move h' == k, after a left move k' == h.
  bool relations_hold = true;
};

/// Positive steps move right, negative steps move left.
LaplaceChain laplace_chain(const SchrodingerOp& l, int steps);

/// e^{-f} L e^{f} from the gradient of f.
SchrodingerOp gauge(const SchrodingerOp& l, const FieldElem& fx, const FieldElem& fy);

struct GaugeNormalization {
  SchrodingerOp op;  // b == 0
  FieldElem f;
  FieldElem fy;
};

/// Finds f with f_x == -b, extending the tower with lazy symbols when -b
/// has no rational x-antiderivative.
GaugeNormalization gauge_normalize_b(const SchrodingerOp& l);

/// Returns psi when L(psi) == 0; throws NotInKernel with the residual.
FieldElem certify_kernel(const SchrodingerOp& l, const FieldElem& psi);

/// Certified kernel elements, keyed by operator.
class KernelRegistry {
 public:
  void add(const SchrodingerOp& l, const FieldElem& psi);
  std::vector<FieldElem> elements(const SchrodingerOp& l) const;

 private:
  std::vector<std::pair<SchrodingerOp, std::vector<FieldElem>>> entries_;
};

}  // namespace dtf
