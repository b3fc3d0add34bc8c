#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "birchmax/forms.hpp"

namespace birchmax::padic {

enum class CountMethod { Direct, Characters, Crt };

struct ModularCount {
  long long q = 1;
  BigInt count = 1;
  double normalized = 1.0;  // q^(1-n) * count
  CountMethod method = CountMethod::Direct;
};

struct CountBudget {
  std::uint64_t max_points = 1000000000;
};

// Exact count of residue solutions p(s) = 0 mod q. Diagonal forms go through
// per-coordinate value histograms folded by cyclic convolution; general forms
// are brute-forced within budget.
ModularCount count_solutions_direct(const Form& form, long long q,
                                    const CountBudget& budget = {});

// Same count via the additive-character identity: the count equals
// q^(n-1) * sum over a in Z_q of the normalized complete sum at (a, 0).
// Rounds to the nearest integer; refuses when the pre-rounding residual is
// 0.25 or larger.
ModularCount count_solutions_characters(const Form& form, long long q,
                                        const CountBudget& budget = {});

// Product of prime-power counts.
ModularCount count_solutions_crt(const Form& form, long long q,
                                 const CountBudget& budget = {});

struct CountSweep {
  long long q_max = 0;
  double max_ratio = 0;
  long long argmax_q = 0;
  std::vector<ModularCount> rows;
};

// max over q <= q_max of q^(1-n) * count, all counts via the CRT route.
CountSweep normalized_count_sweep(const Form& form, long long q_max,
                                  const CountBudget& budget = {});

struct HenselWitness {
  std::vector<long long> point;  // residues mod p^(2*level+1)
  int level = 0;                 // valuation of the certifying partial derivative
  int axis = 0;
};

// Searches for a liftable zero mod p: a point s and axis i with
// v_p(p(s)) > 2 * v_p(d_i p(s)). level 0 is the classical nonsingular root
// mod p; quadratic forms at p = 2 need level 1. Deterministic scan when the
// residue box is small, seeded random search otherwise.
std::optional<HenselWitness> hensel_witness(const Form& form, long long p,
                                            std::uint64_t random_trials = 200000,
                                            std::uint64_t seed = 0x9d1cb0a5u);

// Max relative discrepancy of the prime-power pullback identity for the
// unnormalized character sums W(a, p^t), over all a in Z_{p^t}, t <= t_max.
double prime_power_reduction_discrepancy(const Form& form, long long p, int t_max);

std::vector<std::pair<long long, int>> factorize(long long q);

}  // namespace birchmax::padic
