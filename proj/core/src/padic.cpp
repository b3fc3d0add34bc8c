#include "birchmax/padic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "birchmax/expsum.hpp"
#include "birchmax/rng.hpp"

namespace birchmax::padic {

namespace {

std::uint64_t checked_pow_u64(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

double normalized_ratio(const BigInt& count, long long q, int n) {
  // q^(1-n) * count
  BigInt denom = 1;
  for (int i = 0; i + 1 < n; ++i) denom *= q;
  return count.convert_to<double>() / denom.convert_to<double>();
}

// value histograms of c * s^d mod q per coordinate, folded cyclically
BigInt diagonal_residue_count(const Form& form, long long q) {
  int n = form.n_vars();
  int d = form.degree();
  auto coeffs = form.diagonal_coefficients();
  std::vector<BigInt> acc(static_cast<std::size_t>(q), BigInt(0));
  acc[0] = 1;  // empty product: value 0 with multiplicity 1
  for (int i = 0; i < n; ++i) {
    BigInt red = coeffs[static_cast<std::size_t>(i)] % q;
    if (red < 0) red += q;
    long long c = red.convert_to<long long>();
    std::vector<long long> hist(static_cast<std::size_t>(q), 0);
    for (long long s = 0; s < q; ++s) {
      long long pv = c;
      for (int k = 0; k < d; ++k) pv = (pv * s) % q;
      ++hist[static_cast<std::size_t>(pv)];
    }
    std::vector<BigInt> next(static_cast<std::size_t>(q), BigInt(0));
    for (long long u = 0; u < q; ++u) {
      if (acc[static_cast<std::size_t>(u)] == 0) continue;
      for (long long v = 0; v < q; ++v) {
        if (hist[static_cast<std::size_t>(v)] == 0) continue;
        long long w = u + v;
        if (w >= q) w -= q;
        next[static_cast<std::size_t>(w)] += acc[static_cast<std::size_t>(u)] * hist[static_cast<std::size_t>(v)];
      }
    }
    acc = std::move(next);
  }
  return acc[0];
}

BigInt brute_force_residue_count(const Form& form, long long q, const CountBudget& budget) {
  int n = form.n_vars();
  std::uint64_t total = checked_pow_u64(static_cast<std::uint64_t>(q), n, budget.max_points);
  if (total > budget.max_points)
    throw BudgetExceeded("residue count needs " + std::to_string(q) + "^" + std::to_string(n) +
                         " visits");
  ModFormEvaluator eval(form, q);
  std::vector<long long> s(static_cast<std::size_t>(n), 0);
  BigInt count = 0;
  bool done = false;
  while (!done) {
    if (eval.evaluate(s) == 0) ++count;
    int axis = n - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (s[ui] + 1 < q) {
        ++s[ui];
        break;
      }
      s[ui] = 0;
      --axis;
    }
    if (axis < 0) done = true;
  }
  return count;
}

// flat int64 monomial table for witness searches
struct FlatForm {
  int n;
  struct Mono {
    long long coeff;
    std::vector<int> exps;
  };
  std::vector<Mono> monos;

  explicit FlatForm(const Form& form) : n(form.n_vars()) {
    for (const auto& [exps, c] : form.monomials()) {
      Mono m;
      BigInt cc = c;
      // witness searches work modulo small prime powers; reduce huge
      // coefficients into a safe int64 window first
      BigInt window = cc % BigInt("1000000007000000007");
      m.coeff = window.convert_to<long long>();
      m.exps.assign(exps.begin(), exps.end());
      monos.push_back(std::move(m));
    }
  }

  long long value_mod(const std::vector<long long>& s, long long m) const {
    long long sum = 0;
    for (const auto& mono : monos) {
      long long t = ((mono.coeff % m) + m) % m;
      for (int v = 0; v < n; ++v)
        for (int k = 0; k < mono.exps[static_cast<std::size_t>(v)]; ++k)
          t = (t * (s[static_cast<std::size_t>(v)] % m)) % m;
      sum = (sum + t) % m;
    }
    return sum;
  }

  long long partial_mod(const std::vector<long long>& s, int axis, long long m) const {
    long long sum = 0;
    for (const auto& mono : monos) {
      int e = mono.exps[static_cast<std::size_t>(axis)];
      if (e == 0) continue;
      long long t = ((mono.coeff % m) + m) % m;
      t = (t * (e % m)) % m;
      for (int v = 0; v < n; ++v) {
        int ee = v == axis ? mono.exps[static_cast<std::size_t>(v)] - 1 : mono.exps[static_cast<std::size_t>(v)];
        for (int k = 0; k < ee; ++k) t = (t * (s[static_cast<std::size_t>(v)] % m)) % m;
      }
      sum = (sum + t) % m;
    }
    return sum;
  }
};

}  // namespace

std::vector<std::pair<long long, int>> factorize(long long q) {
  std::vector<std::pair<long long, int>> factors;
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  for (long long p = 2; p * p <= q; ++p) {
    if (q % p != 0) continue;
    int e = 0;
    while (q % p == 0) {
      q /= p;
      ++e;
    }
    factors.emplace_back(p, e);
  }
  if (q > 1) factors.emplace_back(q, 1);
  return factors;
}

ModularCount count_solutions_direct(const Form& form, long long q, const CountBudget& budget) {
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  ModularCount out;
  out.q = q;
  out.method = CountMethod::Direct;
  if (q == 1) {
    out.count = 1;
    out.normalized = 1.0;
    return out;
  }
  if (form.is_diagonal()) {
    std::uint64_t folds = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q) *
                          static_cast<std::uint64_t>(form.n_vars());
    if (folds > budget.max_points) throw BudgetExceeded("residue histogram fold too large");
    out.count = diagonal_residue_count(form, q);
  } else {
    out.count = brute_force_residue_count(form, q, budget);
  }
  out.normalized = normalized_ratio(out.count, q, form.n_vars());
  return out;
}

ModularCount count_solutions_characters(const Form& form, long long q, const CountBudget& budget) {
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  ModularCount out;
  out.q = q;
  out.method = CountMethod::Characters;
  if (q == 1) {
    out.count = 1;
    out.normalized = 1.0;
    return out;
  }
  int n = form.n_vars();
  std::vector<long long> zero(static_cast<std::size_t>(n), 0);
  std::complex<double> sum = 0;
  expsum::SumBudget sum_budget{budget.max_points};
  for (long long a = 0; a < q; ++a)
    sum += expsum::complete_sum_auto(form, expsum::ExpSumSpec::uniform(a, q, zero), sum_budget);
  double scale = std::pow(static_cast<double>(q), n - 1);
  double value = sum.real() * scale;
  double rounded = std::nearbyint(value);
  double residual = std::abs(value - rounded);
  double total = std::pow(static_cast<double>(q), n);
  if (residual >= 0.25 || residual > 1e-6 * total)
    throw RoundingUnsafe("character count residual " + std::to_string(residual));
  out.count = BigInt(static_cast<long long>(rounded));
  out.normalized = normalized_ratio(out.count, q, n);
  return out;
}

ModularCount count_solutions_crt(const Form& form, long long q, const CountBudget& budget) {
  if (q < 1) throw DimensionMismatch("modulus must be positive");
  ModularCount out;
  out.q = q;
  out.method = CountMethod::Crt;
  out.count = 1;
  for (const auto& [p, e] : factorize(q)) {
    long long pe = 1;
    for (int k = 0; k < e; ++k) pe *= p;
    out.count *= count_solutions_direct(form, pe, budget).count;
  }
  out.normalized = normalized_ratio(out.count, q, form.n_vars());
  return out;
}

CountSweep normalized_count_sweep(const Form& form, long long q_max, const CountBudget& budget) {
  CountSweep sweep;
  sweep.q_max = q_max;
  std::map<long long, BigInt> prime_power_counts;
  for (long long q = 1; q <= q_max; ++q) {
    ModularCount row;
    row.q = q;
    row.method = CountMethod::Crt;
    row.count = 1;
    for (const auto& [p, e] : factorize(q)) {
      long long pe = 1;
      for (int k = 0; k < e; ++k) pe *= p;
      auto it = prime_power_counts.find(pe);
      if (it == prime_power_counts.end())
        it = prime_power_counts.emplace(pe, count_solutions_direct(form, pe, budget).count).first;
      row.count *= it->second;
    }
    row.normalized = normalized_ratio(row.count, q, form.n_vars());
    if (row.normalized > sweep.max_ratio) {
      sweep.max_ratio = row.normalized;
      sweep.argmax_q = q;
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

std::optional<HenselWitness> hensel_witness(const Form& form, long long p,
                                            std::uint64_t random_trials, std::uint64_t seed) {
  int n = form.n_vars();
  FlatForm flat(form);

  for (int level = 0; level <= 2; ++level) {
    long long value_mod = 1;  // p^(2*level+1)
    for (int k = 0; k < 2 * level + 1; ++k) value_mod *= p;
    long long grad_mod = 1;  // p^(level+1)
    for (int k = 0; k < level + 1; ++k) grad_mod *= p;
    long long grad_low = grad_mod / p;  // p^level

    auto qualifies = [&](const std::vector<long long>& s, int* axis_out) {
      if (flat.value_mod(s, value_mod) != 0) return false;
      for (int axis = 0; axis < n; ++axis) {
        long long g = flat.partial_mod(s, axis, grad_mod);
        // exact valuation `level`: divisible by p^level, not by p^(level+1)
        if (g % grad_low == 0 && g != 0) {
          *axis_out = axis;
          return true;
        }
      }
      return false;
    };

    std::uint64_t box = checked_pow_u64(static_cast<std::uint64_t>(value_mod), n, 2000000);
    if (box <= 2000000) {
      std::vector<long long> s(static_cast<std::size_t>(n), 0);
      bool done = false;
      while (!done) {
        int axis = -1;
        if (qualifies(s, &axis)) {
          HenselWitness w;
          w.point = s;
          w.level = level;
          w.axis = axis;
          return w;
        }
        int a = n - 1;
        while (a >= 0) {
          std::size_t ui = static_cast<std::size_t>(a);
          if (s[ui] + 1 < value_mod) {
            ++s[ui];
            break;
          }
          s[ui] = 0;
          --a;
        }
        if (a < 0) done = true;
      }
    } else {
      SplitMix64 rng(mix_key(seed, static_cast<std::uint64_t>(p) * 31 + static_cast<std::uint64_t>(level)));
      std::vector<long long> s(static_cast<std::size_t>(n));
      for (std::uint64_t t = 0; t < random_trials; ++t) {
        for (int i = 0; i < n; ++i)
          s[static_cast<std::size_t>(i)] =
              static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(value_mod)));
        int axis = -1;
        if (qualifies(s, &axis)) {
          HenselWitness w;
          w.point = s;
          w.level = level;
          w.axis = axis;
          return w;
        }
      }
    }
  }
  return std::nullopt;
}

double prime_power_reduction_discrepancy(const Form& form, long long p, int t_max) {
  int n = form.n_vars();
  std::vector<long long> zero(static_cast<std::size_t>(n), 0);
  double worst = 0;
  for (int t = 1; t <= t_max; ++t) {
    long long q = 1;
    for (int k = 0; k < t; ++k) q *= p;
    double scale = std::pow(static_cast<double>(q), n);
    for (long long a = 0; a < q; ++a) {
      int r = 0;
      long long rem = a;
      while (r < t && rem % p == 0 && rem != 0) {
        rem /= p;
        ++r;
      }
      if (a == 0) r = t;
      long long q_red = 1;
      for (int k = 0; k < t - r; ++k) q_red *= p;
      long long a_red = a == 0 ? 0 : rem % q_red;
      std::complex<double> lhs =
          expsum::complete_sum_auto(form, expsum::ExpSumSpec::uniform(a, q, zero));
      std::complex<double> rhs =
          expsum::complete_sum_auto(form, expsum::ExpSumSpec::uniform(a_red, q_red, zero));
      double rel = std::abs(lhs - rhs) * scale / (std::abs(lhs) * scale + 1.0);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace birchmax::padic
