#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dtf/poly.hpp"

namespace dtf {

enum class Var { X, Y };

inline std::size_t var_index(Var v) { return v == Var::X ? 0 : 1; }
inline Var other(Var v) { return v == Var::X ? Var::Y : Var::X; }
inline const char* var_name(Var v) { return v == Var::X ? "x" : "y"; }

/// Element of the coefficient field K: a canonical fraction of integer
/// polynomials in x, y and the declared extension symbols.
///
/// Canonical form: gcd(num, den) == 1, the integer contents of num and den
/// are coprime and den has a positive leading coefficient. Structural
/// equality therefore decides equality in K.
class FieldElem {
 public:
  FieldElem();
  FieldElem(long c);  // NOLINT(google-explicit-constructor)
  explicit FieldElem(const mpq_class& c);
  explicit FieldElem(Poly num);
  FieldElem(Poly num, Poly den);  // canonicalizes; throws DivisionByZero on den == 0

  static FieldElem x();
  static FieldElem y();
  static FieldElem symbol(std::size_t index);

  const Poly& num() const { return rep_->num; }
  const Poly& den() const { return rep_->den; }

  bool is_zero() const { return num().is_zero(); }
  bool is_one() const { return num().is_one() && den().is_one(); }
  bool is_constant() const { return num().is_constant() && den().is_constant(); }
  bool is_polynomial() const { return den().is_one(); }
  bool depends_on(std::size_t var) const { return num().depends_on(var) || den().depends_on(var); }
  VarMask var_mask() const { return num().var_mask() | den().var_mask(); }

  FieldElem operator-() const;
  FieldElem inverse() const;
  FieldElem pow(int n) const;

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b);
  FieldElem& operator+=(const FieldElem& b) { return *this = *this + b; }
  FieldElem& operator-=(const FieldElem& b) { return *this = *this - b; }
  FieldElem& operator*=(const FieldElem& b) { return *this = *this * b; }

  friend bool operator==(const FieldElem& a, const FieldElem& b);

  std::string to_string() const;

 private:
  struct Rep {
    Poly num;
    Poly den;
  };
  explicit FieldElem(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static FieldElem make_reduced(Poly num, Poly den);

  std::shared_ptr<const Rep> rep_;
};

/// Declared function symbol with table-driven derivatives. A lazy symbol
/// produces its images on first request.
struct ExtensionSymbol {
  std::string name;
  std::optional<FieldElem> dx_image;
  std::optional<FieldElem> dy_image;
  std::function<FieldElem(Var)> lazy;
};

/// Append-only list of extension symbols (single writer, many readers).
///
/// Symbols are algebraically independent over the earlier tower by
/// assertion; that is what makes structural zero-testing sound.
class Tower {
 public:
  static constexpr std::size_t kFirstSymbol = 2;

  Tower() = default;
  Tower(const Tower&) = delete;
  Tower& operator=(const Tower&) = delete;

  // Rejects the declaration unless d/dy(dx) == d/dx(dy) holds.
  std::size_t declare(const std::string& name, const FieldElem& dx, const FieldElem& dy);

  // Declares a symbol whose derivative images are produced on demand.
  std::size_t declare_lazy(const std::string& name, std::function<FieldElem(Var)> images);

  // Reserves the slot and name first so that images may refer to the symbol.
  std::size_t reserve(const std::string& name);
  void define(std::size_t index, const FieldElem& dx, const FieldElem& dy);

  std::optional<std::size_t> find(const std::string& name) const;
  std::string fresh_name(const std::string& stem) const;
  std::string name(std::size_t index) const;
  std::size_t size() const;

  FieldElem derivative_image(std::size_t index, Var v) const;

 private:
  mutable std::recursive_mutex mutex_;
  std::deque<ExtensionSymbol> symbols_;
};

/// The tower consulted by derive(); a process-wide default unless a
/// TowerScope is active on the calling thread.
Tower& active_tower();

class TowerScope {
 public:
  explicit TowerScope(Tower& tower);
  ~TowerScope();
  TowerScope(const TowerScope&) = delete;
  TowerScope& operator=(const TowerScope&) = delete;

 private:
  Tower* previous_;
};

std::string variable_name(std::size_t index);

FieldElem derive(const FieldElem& e, Var v);
FieldElem derive(const FieldElem& e, Var v, unsigned times);

/// Antiderivative in x for polynomial-in-x numerators and for rational
/// functions whose x-antiderivative is rational; nullopt otherwise.
std::optional<FieldElem> antiderivative_x(const FieldElem& e);

}  // namespace dtf
