#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "birchmax/errors.hpp"

namespace birchmax {

using BigInt = boost::multiprecision::cpp_int;

// Exponent vector of one monomial; length == n_vars, entries sum to the degree.
using ExponentVec = std::vector<int>;

enum class StructureFlag { Diagonal, Quadratic, General };

// A homogeneous polynomial with integer coefficients in n variables.
//
// Canonical representation: merged monomials keyed by exponent vector, zero
// coefficients dropped. Invariants (checked at construction): every exponent
// vector sums to the same degree d >= 2, all coefficients nonzero.
class Form {
 public:
  using MonomialMap = std::map<ExponentVec, BigInt>;

  // Parses the expression mini-language: variables x1..xn, integer literals,
  // + - * ^ and parentheses. n_vars_override pads the arity beyond the largest
  // variable index actually used (0 = infer from the expression).
  //
  // Throws SyntaxError, NotHomogeneous, DegreeTooLow.
  static Form parse(const std::string& text, int n_vars_override = 0);

  static Form from_monomials(int n_vars, MonomialMap monomials);

  // Canonical text rendering; parse(render()) reproduces the form.
  std::string render() const;

  int n_vars() const { return n_vars_; }
  int degree() const { return degree_; }
  const MonomialMap& monomials() const { return monomials_; }

  StructureFlag structure() const;
  bool is_diagonal() const;                 // every monomial is c * x_i^d
  bool is_quadratic() const { return degree_ == 2; }

  // Exact evaluation and gradient. Throws DimensionMismatch on arity errors.
  BigInt evaluate(const std::vector<BigInt>& x) const;
  BigInt evaluate(const std::vector<long long>& x) const;
  std::vector<BigInt> gradient(const std::vector<BigInt>& x) const;
  std::vector<BigInt> gradient(const std::vector<long long>& x) const;

  // For diagonal forms: coefficient of x_i^d (0 when the variable is absent).
  std::vector<BigInt> diagonal_coefficients() const;

  bool operator==(const Form& other) const = default;

 private:
  Form() = default;
  int n_vars_ = 0;
  int degree_ = 0;
  MonomialMap monomials_;
};

// Compiled evaluator over machine integers, for enumeration loops. Safe to
// use only when max_abs_value(bound) certifies the worst case fits int64.
class Int64FormEvaluator {
 public:
  explicit Int64FormEvaluator(const Form& form);

  // Worst-case |p(x)| over the box |x_i| <= bound, exact.
  BigInt max_abs_value(long long bound) const;
  bool fits_int64(long long bound) const;

  long long evaluate(const std::int32_t* x) const;
  long long evaluate(const std::vector<long long>& x) const;

  int n_vars() const { return n_; }

 private:
  struct Mono {
    long long coeff;
    std::vector<int> exps;  // sparse: (var, power) pairs flattened
  };
  int n_;
  int degree_;
  std::vector<Mono> monos_;
};

// Residue evaluator: p(s) mod q with all arithmetic in [0, q). Used by the
// complete-sum and solution-count kernels.
class ModFormEvaluator {
 public:
  ModFormEvaluator(const Form& form, long long q);

  long long modulus() const { return q_; }
  // s entries need not be reduced; negative inputs are handled.
  long long evaluate(const std::vector<long long>& s) const;

 private:
  struct Mono {
    long long coeff;  // reduced mod q
    std::vector<std::pair<int, int>> powers;
  };
  long long q_;
  std::vector<Mono> monos_;
};

enum class RankMethod { DiagonalRule, QuadraticRank, Unsupported };
enum class Regularity { Yes, No, Undetermined };

struct PrimeVerdict {
  long long p = 0;
  bool witness_found = false;
  int hensel_level = -1;                // valuation v of the certifying partial
  std::vector<long long> witness;      // residues mod p^(2v+1)
};

struct RealWitness {
  enum class Kind { ExactZero, SignChange } kind = Kind::ExactZero;
  std::vector<long long> point;        // the zero, or the sign-change edge base
  int edge_axis = -1;                  // axis of the sign-change edge, if any
};

struct RankReport {
  std::optional<int> birch_rank;       // empty <=> unsupported
  RankMethod method = RankMethod::Unsupported;
  Regularity regular = Regularity::Undetermined;
  std::optional<RealWitness> real_witness;
  std::vector<PrimeVerdict> evidence;
};

// Codimension of the singular locus. Supported classes: diagonal forms
// (count of variables present) and quadratic forms (rank of the Hessian over
// the rationals). Anything else reports unsupported.
RankReport birch_rank(const Form& form);

// Full regularity check: rank threshold, a real nonsingular zero located by
// exact integer search (exact zero or sign change with nonzero gradient) in
// [-search_box, search_box]^n, and a liftable zero mod every prime up to
// prime_budget.
RankReport check_regularity(const Form& form, long long prime_budget, long long search_box);

std::vector<long long> primes_up_to(long long bound);

}  // namespace birchmax
