#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dtf {

// Variable 0 is x, 1 is y; the rest are extension symbols.
inline constexpr std::size_t kMaxVars = 16;

using Exponents = std::array<std::uint16_t, kMaxVars>;
using VarMask = std::uint32_t;

struct Term {
  Exponents exp{};
  mpz_class coef;
};

/// Sparse multivariate polynomial over the integers.
///
/// Terms are kept strictly decreasing in lexicographic order of the exponent
/// vectors (variable 0 most significant) with nonzero coefficients, so two
/// polynomials are equal iff their term vectors are equal.
class Poly {
 public:
  Poly() = default;
  Poly(long c);  // NOLINT(google-explicit-constructor)
  explicit Poly(const mpz_class& c);

  static Poly variable(std::size_t index, unsigned power = 1);
  static Poly monomial(const Exponents& exp, mpz_class coef);
  static Poly from_terms(std::vector<Term> terms);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& lead() const { return terms_.front(); }

  unsigned degree(std::size_t var) const;
  unsigned total_degree() const;
  VarMask var_mask() const;
  bool depends_on(std::size_t var) const;

  mpz_class content() const;
  mpz_class max_norm() const;
  Poly primitive_part() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& rhs);
  Poly& operator-=(const Poly& rhs);
  friend Poly operator+(Poly lhs, const Poly& rhs) { return lhs += rhs; }
  friend Poly operator-(Poly lhs, const Poly& rhs) { return lhs -= rhs; }
  friend Poly operator*(const Poly& lhs, const Poly& rhs);
  friend bool operator==(const Poly& lhs, const Poly& rhs);

  Poly scaled(const mpz_class& factor) const;
  Poly pow(unsigned n) const;

  // Divides every coefficient; the caller guarantees divisibility.
  Poly divide_scalar_exact(const mpz_class& divisor) const;

  // Exact quotient if divisor divides *this in Z[vars], otherwise nullopt.
  std::optional<Poly> divide_exact(const Poly& divisor) const;

  Poly derivative(std::size_t var) const;
  Poly evaluate(std::size_t var, const mpz_class& value) const;
  Poly shifted(std::size_t var, unsigned power) const;

  // Coefficients with respect to one variable, keyed by its exponent.
  std::map<unsigned, Poly> coefficients_in(std::size_t var) const;

  // Exponents of the monomial gcd of all terms.
  Exponents monomial_content() const;
  Poly divide_monomial(const Exponents& exp) const;

  std::string to_string(const std::function<std::string(std::size_t)>& name) const;

 private:
  std::vector<Term> terms_;
};

int compare_exponents(const Exponents& a, const Exponents& b);

/// Greatest common divisor in Z[vars], normalized to a positive leading
/// coefficient; gcd(0, 0) == 0.
Poly gcd(const Poly& a, const Poly& b);

}  // namespace dtf
