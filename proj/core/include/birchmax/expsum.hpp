#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "birchmax/forms.hpp"

namespace birchmax::expsum {

// A residue a/q with 0 <= a < q; q = 1 forces a = 0.
struct ResidueFraction {
  long long num = 0;
  long long den = 1;
  bool unit = true;  // gcd(num, den) == 1, with the convention 0/1 a unit

  static ResidueFraction make(long long a, long long q);
  // lowest-terms copy (den divides the original den)
  ResidueFraction reduced() const;
  bool operator==(const ResidueFraction&) const = default;
};

// Data of one complete normalized exponential sum: the value-side fraction
// a/q, one coordinate fraction per variable, and the joint period.
struct ExpSumSpec {
  ResidueFraction value_frac;                 // a/q
  std::vector<ResidueFraction> coord_fracs;   // a_i/q_i
  long long period = 1;                       // lcm(q, q_1, ..., q_n)

  static ExpSumSpec make(long long a, long long q, const std::vector<long long>& avec,
                         const std::vector<long long>& qvec);
  // equal-modulus convenience: all coordinate denominators = q
  static ExpSumSpec uniform(long long a, long long q, const std::vector<long long>& avec);
};

struct SumBudget {
  std::uint64_t max_terms = 100000000;  // reference path refuses beyond this
};

// Reference evaluation, single modulus: the normalized n-fold sum over
// residues mod q, phases built from exact integer residues. |result| <= 1.
std::complex<double> complete_sum(const Form& form, long long a, long long q,
                                  const std::vector<long long>& avec,
                                  const SumBudget& budget = {});

// Reference evaluation over the joint period.
std::complex<double> complete_sum(const Form& form, const ExpSumSpec& spec,
                                  const SumBudget& budget = {});

// Fast evaluation: prime-power factorization of the period plus, for diagonal
// forms, factorization into one-dimensional sums. Agrees with the reference
// path within 1e-9.
std::complex<double> complete_sum_fast(const Form& form, const ExpSumSpec& spec,
                                       const SumBudget& budget = {});

// Picks fast vs reference by cost.
std::complex<double> complete_sum_auto(const Form& form, const ExpSumSpec& spec,
                                       const SumBudget& budget = {});

// Max |LHS - RHS| of the divisor-unit regrouping identity at modulus q, over
// `trials` seeded test functions g on the fraction grid. Both sides are
// assembled by independent enumerations.
double verify_divisor_identity(const Form& form, long long q, int trials, std::uint64_t seed,
                               const SumBudget& budget = {});

struct PrimeDecayFit {
  std::vector<long long> primes;
  std::vector<double> sup_values;  // sup over unit numerators (and sampled coords)
  double slope = 0;
  double intercept = 0;
};

// Regression of log sup|sum| against log q over the given primes; coordinate
// numerators are all-zero, plus a seeded sample when sample_coords > 0.
PrimeDecayFit prime_decay_fit(const Form& form, const std::vector<long long>& primes,
                              int sample_coords, std::uint64_t seed,
                              const SumBudget& budget = {});

struct VanishingSweep {
  std::uint64_t cases = 0;
  double max_abs = 0;
  // identifying data for the worst case
  long long worst_q = 0;
  std::vector<long long> worst_qvec;
};

// Exhaustive sweep of the structural-vanishing cases (some coordinate
// denominator not dividing the value denominator, all numerators units) with
// joint period <= lcm_max. Exponential in arity; intended for small n.
VanishingSweep vanishing_sweep_exhaustive(const Form& form, long long lcm_max,
                                          const SumBudget& budget = {});

// Seeded sample of the same case family, for larger arity.
VanishingSweep vanishing_sweep_sampled(const Form& form, long long lcm_max, int cases,
                                       std::uint64_t seed, const SumBudget& budget = {});

long long gcd_ll(long long a, long long b);
long long lcm_ll(long long a, long long b);  // throws BudgetExceeded on overflow

}  // namespace birchmax::expsum
