#include "birchmax/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "birchmax/lattice.hpp"
#include "birchmax/numeric.hpp"
#include "birchmax/padic.hpp"
#include "birchmax/parallel.hpp"
#include "birchmax/rng.hpp"

namespace birchmax::expsum {

long long gcd_ll(long long a, long long b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

long long lcm_ll(long long a, long long b) {
  long long g = gcd_ll(a, b);
  long long q = a / g;
  if (q != 0 && b > (1LL << 40) / q)
    throw BudgetExceeded("joint period overflows the supported range");
  return q * b;
}

namespace {

long long mod_inverse(long long a, long long m) {
  // extended Euclid; gcd(a, m) must be 1
  long long t = 0, new_t = 1, r = m, new_r = ((a % m) + m) % m;
  while (new_r != 0) {
    long long quot = r / new_r;
    t -= quot * new_t;
    std::swap(t, new_t);
    r -= quot * new_r;
    std::swap(r, new_r);
  }
  return ((t % m) + m) % m;
}

std::uint64_t checked_pow(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

// Phase table e(k / Q), k = 0..Q-1, cached per thread.
using PhaseTable = std::vector<std::complex<double>>;
const PhaseTable& phase_table(long long period) {
  thread_local std::map<long long, PhaseTable> cache;
  auto it = cache.find(period);
  if (it != cache.end()) return it->second;
  if (cache.size() > 512) cache.clear();
  PhaseTable table(static_cast<std::size_t>(period));
  for (long long k = 0; k < period; ++k)
    table[static_cast<std::size_t>(k)] = unit_phase(static_cast<double>(k) / static_cast<double>(period));
  return cache.emplace(period, std::move(table)).first->second;
}

// The form rewritten as a polynomial in the last variable, with coefficient
// forms in the leading n-1 variables. Degree-k coefficient evaluated mod q.
struct LastVarSplit {
  int n;
  int degree;
  long long q;
  // coefficient monomials: coeff mod q and (var, power) pairs over prefix vars
  struct Mono {
    long long coeff;
    std::vector<std::pair<int, int>> powers;
    int last_power;
  };
  std::vector<Mono> monos;

  LastVarSplit(const Form& form, long long modulus) : n(form.n_vars()), degree(form.degree()), q(modulus) {
    for (const auto& [exps, c] : form.monomials()) {
      Mono m;
      BigInt red = c % q;
      if (red < 0) red += q;
      m.coeff = red.convert_to<long long>();
      m.last_power = exps[n - 1];
      for (int v = 0; v + 1 < n; ++v)
        if (exps[v] > 0) m.powers.emplace_back(v, exps[v]);
      monos.push_back(std::move(m));
    }
  }

  // degree-k coefficients of p(prefix, s_n) mod q
  void coefficients(const std::vector<long long>& prefix, std::vector<long long>& out) const {
    out.assign(static_cast<std::size_t>(degree) + 1, 0);
    for (const auto& m : monos) {
      long long t = m.coeff;
      for (const auto& [v, e] : m.powers) {
        long long r = prefix[static_cast<std::size_t>(v)] % q;
        for (int k = 0; k < e; ++k) t = (t * r) % q;
      }
      out[static_cast<std::size_t>(m.last_power)] = (out[static_cast<std::size_t>(m.last_power)] + t) % q;
    }
  }
};

// Core reference kernel over the joint period: phases
//   m(s) = (a * (p(s) mod q) * (Q/q) + sum_i a_i s_i (Q/q_i)) mod Q
// accumulated in exact integers, summation in lexicographic order.
std::complex<double> reference_sum(const Form& form, long long a, long long q,
                                   const std::vector<long long>& avec,
                                   const std::vector<long long>& qvec, long long period,
                                   const SumBudget& budget) {
  int n = form.n_vars();
  std::uint64_t terms = checked_pow(static_cast<std::uint64_t>(period), n, budget.max_terms);
  if (terms > budget.max_terms)
    throw BudgetExceeded("reference sum needs " + std::to_string(period) + "^" +
                         std::to_string(n) + " terms");

  long long Q = period;
  long long mul_a = ((a % q) * ((Q / q) % Q)) % Q;
  std::vector<long long> mul_coord(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    long long ai = ((avec[static_cast<std::size_t>(i)] % qvec[static_cast<std::size_t>(i)]) +
                    qvec[static_cast<std::size_t>(i)]) % qvec[static_cast<std::size_t>(i)];
    mul_coord[static_cast<std::size_t>(i)] = (ai * (Q / qvec[static_cast<std::size_t>(i)])) % Q;
  }

  const PhaseTable& table = phase_table(Q);
  LastVarSplit split(form, q);
  std::vector<long long> prefix(static_cast<std::size_t>(std::max(0, n - 1)), 0);
  std::vector<long long> coefs;
  KahanComplex acc;

  if (n == 1) {
    split.coefficients(prefix, coefs);
    long long lin = 0;
    for (long long s = 0; s < Q; ++s) {
      long long pval = 0;
      for (int k = split.degree; k >= 0; --k) pval = (pval * (s % q) + coefs[static_cast<std::size_t>(k)]) % q;
      long long m = (mul_a * pval + lin) % Q;
      acc.add(table[static_cast<std::size_t>(m)]);
      lin += mul_coord[0];
      if (lin >= Q) lin -= Q;
    }
  } else {
    bool done = false;
    long long lin_prefix = 0;  // sum over prefix coordinates of a_i s_i (Q/q_i), mod Q
    split.coefficients(prefix, coefs);
    while (!done) {
      long long lin = lin_prefix;
      long long step = mul_coord[static_cast<std::size_t>(n - 1)];
      for (long long s = 0; s < Q; ++s) {
        long long sq = s % q;
        long long pval = 0;
        for (int k = split.degree; k >= 0; --k) pval = (pval * sq + coefs[static_cast<std::size_t>(k)]) % q;
        long long m = (mul_a * pval + lin) % Q;
        acc.add(table[static_cast<std::size_t>(m)]);
        lin += step;
        if (lin >= Q) lin -= Q;
      }
      // odometer over the prefix, last prefix coordinate fastest
      int axis = n - 2;
      while (axis >= 0) {
        std::size_t ui = static_cast<std::size_t>(axis);
        if (prefix[ui] + 1 < Q) {
          ++prefix[ui];
          lin_prefix += mul_coord[ui];
          if (lin_prefix >= Q) lin_prefix -= Q;
          break;
        }
        // wrap: subtract the full contribution of this coordinate
        lin_prefix = (lin_prefix - (mul_coord[ui] * (Q - 1)) % Q + Q) % Q;
        prefix[ui] = 0;
        --axis;
      }
      if (axis < 0)
        done = true;
      else
        split.coefficients(prefix, coefs);
    }
  }

  double norm = 1.0;
  for (int i = 0; i < n; ++i) norm *= static_cast<double>(Q);
  return acc.value() / norm;
}

// One-dimensional factor of a diagonal form's sum:
//   Q^-1 sum_{s in Z_Q} e((mul_a * (c s^d mod q) + s * mul_coord mod Q) / Q)
std::complex<double> one_dim_factor(long long coeff_mod_q, int degree, long long q, long long mul_a,
                                    long long mul_coord, long long Q,
                                    const PhaseTable& table) {
  KahanComplex acc;
  for (long long s = 0; s < Q; ++s) {
    long long sq = s % q;
    long long pv = coeff_mod_q;
    for (int k = 0; k < degree; ++k) pv = (pv * sq) % q;
    long long m = (mul_a * pv + mul_coord * (s % Q)) % Q;
    acc.add(table[static_cast<std::size_t>(m)]);
  }
  return acc.value() / static_cast<double>(Q);
}

std::complex<double> diagonal_fast_sum(const Form& form, const ExpSumSpec& spec) {
  int n = form.n_vars();
  long long Q = spec.period;
  long long q = spec.value_frac.den;
  long long a = spec.value_frac.num;
  long long mul_a = ((a % q) * ((Q / q) % Q)) % Q;
  const PhaseTable& table = phase_table(Q);
  auto coeffs = form.diagonal_coefficients();
  std::complex<double> prod = 1.0;
  for (int i = 0; i < n; ++i) {
    BigInt red = coeffs[static_cast<std::size_t>(i)] % q;
    if (red < 0) red += q;
    long long c = red.convert_to<long long>();
    long long qi = spec.coord_fracs[static_cast<std::size_t>(i)].den;
    long long ai = spec.coord_fracs[static_cast<std::size_t>(i)].num;
    long long mul_coord = (ai * (Q / qi)) % Q;
    prod *= one_dim_factor(c, form.degree(), q, mul_a, mul_coord, Q, table);
  }
  return prod;
}

bool is_prime_power(long long q) { return padic::factorize(q).size() <= 1; }

}  // namespace

ResidueFraction ResidueFraction::make(long long a, long long q) {
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  ResidueFraction f;
  f.den = q;
  f.num = ((a % q) + q) % q;
  f.unit = gcd_ll(f.num == 0 ? q : f.num, q) == 1 || q == 1;
  if (q == 1) f.num = 0;
  return f;
}

ResidueFraction ResidueFraction::reduced() const {
  if (num == 0) return make(0, 1);
  long long g = gcd_ll(num, den);
  return make(num / g, den / g);
}

ExpSumSpec ExpSumSpec::make(long long a, long long q, const std::vector<long long>& avec,
                            const std::vector<long long>& qvec) {
  if (avec.size() != qvec.size()) throw DimensionMismatch("coordinate fraction arity mismatch");
  ExpSumSpec spec;
  spec.value_frac = ResidueFraction::make(a, q);
  spec.period = q;
  for (std::size_t i = 0; i < avec.size(); ++i) {
    spec.coord_fracs.push_back(ResidueFraction::make(avec[i], qvec[i]));
    spec.period = lcm_ll(spec.period, qvec[i]);
  }
  return spec;
}

ExpSumSpec ExpSumSpec::uniform(long long a, long long q, const std::vector<long long>& avec) {
  return make(a, q, avec, std::vector<long long>(avec.size(), q));
}

std::complex<double> complete_sum(const Form& form, long long a, long long q,
                                  const std::vector<long long>& avec, const SumBudget& budget) {
  if (static_cast<int>(avec.size()) != form.n_vars())
    throw DimensionMismatch("coordinate numerators have wrong arity");
  ExpSumSpec spec = ExpSumSpec::uniform(a, q, avec);
  return complete_sum(form, spec, budget);
}

std::complex<double> complete_sum(const Form& form, const ExpSumSpec& spec,
                                  const SumBudget& budget) {
  if (static_cast<int>(spec.coord_fracs.size()) != form.n_vars())
    throw DimensionMismatch("coordinate fractions have wrong arity");
  std::vector<long long> avec, qvec;
  for (const auto& f : spec.coord_fracs) {
    avec.push_back(f.num);
    qvec.push_back(f.den);
  }
  return reference_sum(form, spec.value_frac.num, spec.value_frac.den, avec, qvec, spec.period,
                       budget);
}

std::complex<double> complete_sum_fast(const Form& form, const ExpSumSpec& spec,
                                       const SumBudget& budget) {
  long long Q = spec.period;
  if (Q == 1) return 1.0;

  auto factors = padic::factorize(Q);
  if (factors.size() > 1) {
    // prime-power components with partial-fraction numerators
    std::complex<double> prod = 1.0;
    for (const auto& [p, e] : factors) {
      long long Qp = 1;
      for (int k = 0; k < e; ++k) Qp *= p;
      auto component = [&](const ResidueFraction& f) {
        long long dp = 1;
        long long rest = f.den;
        while (rest % p == 0) {
          dp *= p;
          rest /= p;
        }
        if (dp == 1) return ResidueFraction::make(0, 1);
        long long inv = mod_inverse(rest % dp, dp);
        return ResidueFraction::make(((f.num % dp) * inv) % dp, dp);
      };
      ResidueFraction av = component(spec.value_frac);
      std::vector<long long> avec, qvec;
      for (const auto& f : spec.coord_fracs) {
        ResidueFraction c = component(f);
        avec.push_back(c.num);
        qvec.push_back(c.den);
      }
      ExpSumSpec sub = ExpSumSpec::make(av.num, av.den, avec, qvec);
      prod *= complete_sum_fast(form, sub, budget);
      (void)Qp;
    }
    return prod;
  }

  if (form.is_diagonal()) return diagonal_fast_sum(form, spec);
  return complete_sum(form, spec, budget);
}

std::complex<double> complete_sum_auto(const Form& form, const ExpSumSpec& spec,
                                       const SumBudget& budget) {
  std::uint64_t terms =
      checked_pow(static_cast<std::uint64_t>(spec.period), form.n_vars(), 100000);
  if (terms <= 100000 && !form.is_diagonal()) return complete_sum(form, spec, budget);
  if (form.is_diagonal() || is_prime_power(spec.period) == false)
    return complete_sum_fast(form, spec, budget);
  return complete_sum(form, spec, budget);
}

// ---------------------------------------------------------------------------
// Divisor-unit regrouping identity
// ---------------------------------------------------------------------------

namespace {

std::vector<long long> divisors_of(long long q) {
  std::vector<long long> out;
  for (long long d = 1; d * d <= q; ++d) {
    if (q % d != 0) continue;
    out.push_back(d);
    if (d != q / d) out.push_back(q / d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double verify_divisor_identity(const Form& form, long long q, int trials, std::uint64_t seed,
                               const SumBudget& budget) {
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  int n = form.n_vars();
  if (trials < 1) trials = 1;

  // one seeded unit numerator
  long long a = 0;
  if (q > 1) {
    SplitMix64 rng(mix_key(seed, static_cast<std::uint64_t>(q)));
    do {
      a = 1 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(q - 1)));
    } while (gcd_ll(a, q) != 1);
  }

  // decide one evaluation route for the whole check
  std::uint64_t total = checked_pow(static_cast<std::uint64_t>(q), 2 * n, 200000000ull);
  bool use_reference = total <= 200000000ull;

  // cached one-dimensional factors for the diagonal route, indexed by the
  // numerator over the common denominator
  std::vector<std::vector<std::complex<double>>> onedim;
  bool diagonal_route = !use_reference && form.is_diagonal();
  if (diagonal_route) {
    const PhaseTable& table = phase_table(q);
    auto coeffs = form.diagonal_coefficients();
    onedim.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
      BigInt red = coeffs[static_cast<std::size_t>(i)] % q;
      if (red < 0) red += q;
      long long c = red.convert_to<long long>();
      auto& row = onedim[static_cast<std::size_t>(i)];
      row.resize(static_cast<std::size_t>(q));
      for (long long b = 0; b < q; ++b)
        row[static_cast<std::size_t>(b)] = one_dim_factor(c, form.degree(), q, a, b, q, table);
    }
  }

  // one seeded complex stream per reduced fraction tuple; trial t reads the
  // t-th draw, so both enumerations see identical test functions
  auto g_values = [&](const std::vector<ResidueFraction>& fracs,
                      std::vector<std::complex<double>>& out) {
    std::uint64_t h = seed;
    for (const auto& f : fracs) {
      ResidueFraction r = f.reduced();
      h = mix_key(h, static_cast<std::uint64_t>(r.num));
      h = mix_key(h, static_cast<std::uint64_t>(r.den));
    }
    SplitMix64 rng(h);
    for (int t = 0; t < trials; ++t)
      out[static_cast<std::size_t>(t)] = {2.0 * rng.next_double() - 1.0,
                                          2.0 * rng.next_double() - 1.0};
  };

  // left: divisor-major enumeration (denominator, unit numerator) pairs;
  // right: residue-major enumeration over numerators mod q
  struct Option {
    long long num, den;  // reduced fraction
    long long over_q;    // numerator over the common denominator
  };
  std::vector<Option> left_opts, right_opts;
  for (long long d : divisors_of(q)) {
    for (long long u = d == 1 ? 0 : 1; u < std::max<long long>(d, 1); ++u) {
      if (d > 1 && gcd_ll(u, d) != 1) continue;
      left_opts.push_back({u, d, u * (q / d)});
    }
  }
  for (long long b = 0; b < q; ++b) {
    ResidueFraction r = ResidueFraction::make(b, q).reduced();
    right_opts.push_back({r.num, r.den, b});
  }
  if (static_cast<long long>(left_opts.size()) != q)
    throw DimensionMismatch("divisor-unit enumeration does not cover the residues");

  auto accumulate = [&](const std::vector<Option>& opts, bool left_side,
                        std::vector<std::complex<double>>& out) {
    out.assign(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::vector<KahanComplex>> partial(
        static_cast<std::size_t>(q),
        std::vector<KahanComplex>(static_cast<std::size_t>(trials)));
    parallel_for(static_cast<std::size_t>(q), [&](std::size_t first) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
      idx[0] = first;
      std::vector<ResidueFraction> fracs(static_cast<std::size_t>(n));
      std::vector<long long> bvec(static_cast<std::size_t>(n));
      std::vector<std::complex<double>> gbuf(static_cast<std::size_t>(trials));
      bool done = false;
      while (!done) {
        for (int i = 0; i < n; ++i) {
          const Option& opt = opts[idx[static_cast<std::size_t>(i)]];
          fracs[static_cast<std::size_t>(i)] = ResidueFraction::make(opt.num, opt.den);
          bvec[static_cast<std::size_t>(i)] = opt.over_q;
        }
        std::complex<double> value;
        if (diagonal_route) {
          value = 1.0;
          for (int i = 0; i < n; ++i)
            value *= onedim[static_cast<std::size_t>(i)]
                           [static_cast<std::size_t>(bvec[static_cast<std::size_t>(i)])];
        } else if (left_side) {
          std::vector<long long> avs, qvs;
          for (const auto& fr : fracs) {
            avs.push_back(fr.num);
            qvs.push_back(fr.den);
          }
          ExpSumSpec spec = ExpSumSpec::make(a, q, avs, qvs);
          value = use_reference ? complete_sum(form, spec, budget)
                                : complete_sum_fast(form, spec, budget);
        } else {
          ExpSumSpec spec = ExpSumSpec::uniform(a, q, bvec);
          value = use_reference ? complete_sum(form, spec, budget)
                                : complete_sum_fast(form, spec, budget);
        }
        g_values(fracs, gbuf);
        for (int t = 0; t < trials; ++t)
          partial[first][static_cast<std::size_t>(t)].add(value * gbuf[static_cast<std::size_t>(t)]);
        // odometer over the trailing coordinates
        int axis = n - 1;
        while (axis >= 1) {
          std::size_t ui = static_cast<std::size_t>(axis);
          if (idx[ui] + 1 < opts.size()) {
            ++idx[ui];
            break;
          }
          idx[ui] = 0;
          --axis;
        }
        if (n == 1 || axis < 1) done = true;
      }
    });
    for (std::size_t first = 0; first < static_cast<std::size_t>(q); ++first)
      for (int t = 0; t < trials; ++t)
        out[static_cast<std::size_t>(t)] += partial[first][static_cast<std::size_t>(t)].value();
  };

  std::vector<std::complex<double>> lhs, rhs;
  accumulate(left_opts, true, lhs);
  accumulate(right_opts, false, rhs);

  double worst = 0;
  for (int t = 0; t < trials; ++t)
    worst = std::max(worst,
                     std::abs(lhs[static_cast<std::size_t>(t)] - rhs[static_cast<std::size_t>(t)]));
  return worst;
}

// ---------------------------------------------------------------------------
// Decay fit and vanishing sweeps
// ---------------------------------------------------------------------------

PrimeDecayFit prime_decay_fit(const Form& form, const std::vector<long long>& primes,
                              int sample_coords, std::uint64_t seed, const SumBudget& budget) {
  if (primes.size() < 2) throw DegenerateFit("need at least two primes");
  int n = form.n_vars();
  PrimeDecayFit fit;
  fit.primes = primes;
  fit.sup_values.resize(primes.size());

  parallel_for(primes.size(), [&](std::size_t pi) {
    long long p = primes[pi];
    double sup = 0;
    std::vector<std::vector<long long>> coord_samples;
    coord_samples.emplace_back(static_cast<std::size_t>(n), 0);
    SplitMix64 rng(mix_key(seed, static_cast<std::uint64_t>(p)));
    for (int sc = 0; sc < sample_coords; ++sc) {
      std::vector<long long> avec(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        avec[static_cast<std::size_t>(i)] = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(p)));
      coord_samples.push_back(std::move(avec));
    }
    for (long long a = 1; a < p; ++a) {
      for (const auto& avec : coord_samples) {
        ExpSumSpec spec = ExpSumSpec::uniform(a, p, avec);
        std::complex<double> v = complete_sum_auto(form, spec, budget);
        sup = std::max(sup, std::abs(v));
      }
    }
    if (p == 1) sup = 1.0;
    fit.sup_values[pi] = sup;
  });

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (fit.sup_values[i] <= 0) throw DegenerateFit("vanishing sup value in decay fit");
    xs.push_back(std::log(static_cast<double>(primes[i])));
    ys.push_back(std::log(fit.sup_values[i]));
  }
  fit.slope = lattice::least_squares_slope(xs, ys, &fit.intercept, nullptr);
  return fit;
}

VanishingSweep vanishing_sweep_exhaustive(const Form& form, long long lcm_max,
                                          const SumBudget& budget) {
  int n = form.n_vars();
  if (n > 3) throw BudgetExceeded("exhaustive vanishing sweep is limited to three variables");

  VanishingSweep sweep;
  std::vector<VanishingSweep> per_q(static_cast<std::size_t>(lcm_max));

  parallel_for(static_cast<std::size_t>(lcm_max), [&](std::size_t qi) {
    long long q = static_cast<long long>(qi) + 1;
    VanishingSweep local;
    std::vector<long long> qvec(static_cast<std::size_t>(n), 1);
    bool done = false;
    while (!done) {
      long long period = q;
      bool overflow = false;
      for (long long qc : qvec) {
        period = lcm_ll(period, qc);
        if (period > lcm_max) {
          overflow = true;
          break;
        }
      }
      bool some_nondivisor = false;
      for (long long qc : qvec)
        if (q % qc != 0) some_nondivisor = true;
      if (!overflow && some_nondivisor) {
        // all unit numerators
        std::vector<long long> units_a;
        for (long long a = q == 1 ? 0 : 1; a < std::max<long long>(q, 1); ++a)
          if (q == 1 || gcd_ll(a, q) == 1) units_a.push_back(a % std::max<long long>(q, 1));
        std::vector<std::vector<long long>> units_c(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          long long qc = qvec[static_cast<std::size_t>(i)];
          for (long long b = qc == 1 ? 0 : 1; b < std::max<long long>(qc, 1); ++b)
            if (qc == 1 || gcd_ll(b, qc) == 1) units_c[static_cast<std::size_t>(i)].push_back(b);
        }
        std::vector<std::size_t> uidx(static_cast<std::size_t>(n), 0);
        for (long long a : units_a) {
          std::fill(uidx.begin(), uidx.end(), 0);
          bool udone = false;
          while (!udone) {
            std::vector<long long> avec(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
              avec[static_cast<std::size_t>(i)] =
                  units_c[static_cast<std::size_t>(i)][uidx[static_cast<std::size_t>(i)]];
            ExpSumSpec spec = ExpSumSpec::make(a, q, avec, qvec);
            double v = std::abs(complete_sum(form, spec, budget));
            ++local.cases;
            if (v > local.max_abs) {
              local.max_abs = v;
              local.worst_q = q;
              local.worst_qvec = qvec;
            }
            int axis = n - 1;
            while (axis >= 0) {
              std::size_t ui = static_cast<std::size_t>(axis);
              if (uidx[ui] + 1 < units_c[ui].size()) {
                ++uidx[ui];
                break;
              }
              uidx[ui] = 0;
              --axis;
            }
            if (axis < 0) udone = true;
          }
        }
      }
      int axis = n - 1;
      while (axis >= 0) {
        std::size_t ui = static_cast<std::size_t>(axis);
        if (qvec[ui] + 1 <= lcm_max) {
          ++qvec[ui];
          break;
        }
        qvec[ui] = 1;
        --axis;
      }
      if (axis < 0) done = true;
    }
    per_q[qi] = local;
  });

  for (const auto& local : per_q) {
    sweep.cases += local.cases;
    if (local.max_abs > sweep.max_abs) {
      sweep.max_abs = local.max_abs;
      sweep.worst_q = local.worst_q;
      sweep.worst_qvec = local.worst_qvec;
    }
  }
  return sweep;
}

VanishingSweep vanishing_sweep_sampled(const Form& form, long long lcm_max, int cases,
                                       std::uint64_t seed, const SumBudget& budget) {
  int n = form.n_vars();
  VanishingSweep sweep;
  SplitMix64 rng(seed);
  int accepted = 0;
  while (accepted < cases) {
    long long target = 2 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(lcm_max - 1)));
    auto divs = divisors_of(target);
    auto pick_div = [&]() { return divs[rng.next_below(divs.size())]; };
    long long q = pick_div();
    std::vector<long long> qvec(static_cast<std::size_t>(n));
    bool some_nondivisor = false;
    for (int i = 0; i < n; ++i) {
      qvec[static_cast<std::size_t>(i)] = pick_div();
      if (q % qvec[static_cast<std::size_t>(i)] != 0) some_nondivisor = true;
    }
    if (!some_nondivisor) continue;
    long long a = 0;
    if (q > 1) {
      do {
        a = 1 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(q - 1)));
      } while (gcd_ll(a, q) != 1);
    }
    std::vector<long long> avec(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      long long qc = qvec[static_cast<std::size_t>(i)];
      if (qc == 1) continue;
      long long b;
      do {
        b = 1 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(qc - 1)));
      } while (gcd_ll(b, qc) != 1);
      avec[static_cast<std::size_t>(i)] = b;
    }
    ExpSumSpec spec = ExpSumSpec::make(a, q, avec, qvec);
    double v = std::abs(complete_sum_fast(form, spec, budget));
    ++sweep.cases;
    if (v > sweep.max_abs) {
      sweep.max_abs = v;
      sweep.worst_q = q;
      sweep.worst_qvec = qvec;
    }
    ++accepted;
  }
  return sweep;
}

}  // namespace birchmax::expsum
