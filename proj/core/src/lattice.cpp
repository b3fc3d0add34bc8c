#include "birchmax/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace birchmax::lattice {

namespace {

std::uint64_t checked_pow_u64(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

// value table of c * s^d for s in [-N, N]
std::vector<long long> power_row(long long coeff, int degree, long long radius) {
  std::vector<long long> row(static_cast<std::size_t>(2 * radius + 1));
  for (long long s = -radius; s <= radius; ++s) {
    long long v = coeff;
    for (int k = 0; k < degree; ++k) v *= s;
    row[static_cast<std::size_t>(s + radius)] = v;
  }
  return row;
}

struct DiagonalSplit {
  int n, m;  // m = leading block size
  std::vector<std::vector<long long>> rows;  // per-coordinate value tables

  DiagonalSplit(const Form& form, long long radius) : n(form.n_vars()), m((form.n_vars() + 1) / 2) {
    Int64FormEvaluator guard(form);
    if (!guard.fits_int64(radius))
      throw BudgetExceeded("coordinate range too large for the int64 fast path");
    auto coeffs = form.diagonal_coefficients();
    for (int i = 0; i < n; ++i)
      rows.push_back(power_row(coeffs[static_cast<std::size_t>(i)].convert_to<long long>(),
                               form.degree(), radius));
  }
};

// Enumerate tuples of `arity` coordinates in [-N, N], lex order, streaming the
// partial diagonal value. `rows` supplies per-coordinate value tables.
template <typename Fn>
void for_each_tuple(const std::vector<std::vector<long long>>& rows, int first_row, int arity,
                    long long radius, Fn&& fn) {
  std::vector<long long> x(static_cast<std::size_t>(arity), -radius);
  std::vector<long long> partial(static_cast<std::size_t>(arity) + 1, 0);
  int level = 0;
  // iterative descent: maintain partial sums per level
  while (true) {
    while (level < arity) {
      std::size_t ui = static_cast<std::size_t>(level);
      partial[ui + 1] =
          partial[ui] +
          rows[static_cast<std::size_t>(first_row + level)][static_cast<std::size_t>(x[ui] + radius)];
      ++level;
    }
    fn(x, partial[static_cast<std::size_t>(arity)]);
    // advance odometer
    int axis = arity - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (x[ui] < radius) {
        ++x[ui];
        level = axis;
        break;
      }
      x[ui] = -radius;
      --axis;
    }
    if (axis < 0) break;
  }
}

PointCloud brute_force_enumerate(const Form& form, long long radius, const EnumBudget& budget) {
  int n = form.n_vars();
  std::uint64_t visits =
      checked_pow_u64(static_cast<std::uint64_t>(2 * radius + 1), n, budget.max_visits);
  if (visits > budget.max_visits)
    throw BudgetExceeded("brute-force enumeration exceeds the visit budget");

  PointCloud cloud;
  cloud.dim = n;
  cloud.radius = radius;

  Int64FormEvaluator eval(form);
  bool fast = eval.fits_int64(radius);
  std::vector<std::int32_t> x(static_cast<std::size_t>(n), static_cast<std::int32_t>(-radius));
  std::vector<long long> xl(static_cast<std::size_t>(n));
  while (true) {
    bool zero;
    if (fast) {
      zero = eval.evaluate(x.data()) == 0;
    } else {
      for (int i = 0; i < n; ++i) xl[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
      zero = form.evaluate(xl) == 0;
    }
    if (zero) cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
    int axis = n - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (x[ui] < radius) {
        ++x[ui];
        break;
      }
      x[ui] = static_cast<std::int32_t>(-radius);
      --axis;
    }
    if (axis < 0) break;
  }
  return cloud;
}

long long brute_force_count(const Form& form, long long radius, const EnumBudget& budget) {
  int n = form.n_vars();
  std::uint64_t visits =
      checked_pow_u64(static_cast<std::uint64_t>(2 * radius + 1), n, budget.max_visits);
  if (visits > budget.max_visits)
    throw BudgetExceeded("brute-force count exceeds the visit budget");
  Int64FormEvaluator eval(form);
  bool fast = eval.fits_int64(radius);
  std::vector<std::int32_t> x(static_cast<std::size_t>(n), static_cast<std::int32_t>(-radius));
  std::vector<long long> xl(static_cast<std::size_t>(n));
  long long count = 0;
  while (true) {
    if (fast) {
      if (eval.evaluate(x.data()) == 0) ++count;
    } else {
      for (int i = 0; i < n; ++i) xl[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
      if (form.evaluate(xl) == 0) ++count;
    }
    int axis = n - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (x[ui] < radius) {
        ++x[ui];
        break;
      }
      x[ui] = static_cast<std::int32_t>(-radius);
      --axis;
    }
    if (axis < 0) break;
  }
  return count;
}

void check_mitm_budget(int n, long long radius, const EnumBudget& budget) {
  int m = (n + 1) / 2;
  std::uint64_t side = static_cast<std::uint64_t>(2 * radius + 1);
  std::uint64_t visits = checked_pow_u64(side, std::max(m, n - m), budget.max_visits);
  if (visits > budget.max_visits)
    throw BudgetExceeded("meet-in-the-middle enumeration exceeds the visit budget");
}

PointCloud mitm_enumerate(const Form& form, long long radius, const EnumBudget& budget) {
  check_mitm_budget(form.n_vars(), radius, budget);
  DiagonalSplit split(form, radius);
  int n = split.n, m = split.m;

  // trailing block: bucket tuples by partial value, each bucket lex sorted
  std::unordered_map<long long, std::vector<std::int32_t>> buckets;
  for_each_tuple(split.rows, m, n - m, radius, [&](const std::vector<long long>& x, long long v) {
    auto& bucket = buckets[v];
    for (long long c : x) bucket.push_back(static_cast<std::int32_t>(c));
  });

  PointCloud cloud;
  cloud.dim = n;
  cloud.radius = radius;
  int tail = n - m;
  // leading block in lex order; matching buckets are already lex sorted, so
  // the output is globally sorted without a final sort
  for_each_tuple(split.rows, 0, m, radius, [&](const std::vector<long long>& x, long long v) {
    auto it = buckets.find(-v);
    if (it == buckets.end()) return;
    const auto& bucket = it->second;
    for (std::size_t off = 0; off < bucket.size(); off += static_cast<std::size_t>(tail)) {
      for (long long c : x) cloud.coords.push_back(static_cast<std::int32_t>(c));
      cloud.coords.insert(cloud.coords.end(), bucket.begin() + static_cast<std::ptrdiff_t>(off),
                          bucket.begin() + static_cast<std::ptrdiff_t>(off + static_cast<std::size_t>(tail)));
    }
  });
  return cloud;
}

long long mitm_count(const Form& form, long long radius, const EnumBudget& budget) {
  check_mitm_budget(form.n_vars(), radius, budget);
  DiagonalSplit split(form, radius);
  int n = split.n, m = split.m;
  std::unordered_map<long long, long long> bucket_counts;
  for_each_tuple(split.rows, m, n - m, radius,
                 [&](const std::vector<long long>&, long long v) { ++bucket_counts[v]; });
  long long count = 0;
  for_each_tuple(split.rows, 0, m, radius, [&](const std::vector<long long>&, long long v) {
    auto it = bucket_counts.find(-v);
    if (it != bucket_counts.end()) count += it->second;
  });
  return count;
}

// Shell-incremental profile for diagonal forms: maintains cumulative value
// histograms of both blocks and folds in one boundary shell per radius.
std::vector<long long> diagonal_profile(const Form& form, long long radius_max,
                                        const EnumBudget& budget) {
  DiagonalSplit split(form, radius_max);
  int n = split.n, m = split.m;
  int tail = n - m;
  std::uint64_t side = static_cast<std::uint64_t>(2 * radius_max + 1);
  std::uint64_t shells = checked_pow_u64(side, std::max(m, tail), budget.max_visits / 4);
  if (shells > budget.max_visits / 4)
    throw BudgetExceeded("radius profile exceeds the visit budget");

  std::unordered_map<long long, long long> lead_cum, tail_cum;
  lead_cum.reserve(1 << 16);
  tail_cum.reserve(1 << 16);

  // enumerate tuples of the given block whose max-norm is exactly N
  auto for_each_shell = [&](int first_row, int arity, long long N, auto&& fn) {
    if (N == 0) {
      std::vector<long long> x(static_cast<std::size_t>(arity), 0);
      long long v = 0;
      for (int i = 0; i < arity; ++i)
        v += split.rows[static_cast<std::size_t>(first_row + i)][static_cast<std::size_t>(radius_max)];
      fn(v);
      return;
    }
    // pinned = first axis achieving |coord| = N; axes before it stay < N
    for (int pinned = 0; pinned < arity; ++pinned) {
      std::vector<long long> x(static_cast<std::size_t>(arity), 0);
      for (int sign = 0; sign < 2; ++sign) {
        long long pinned_val = sign == 0 ? -N : N;
        // odometer over the free axes
        std::vector<long long> lo(static_cast<std::size_t>(arity)), hi(static_cast<std::size_t>(arity));
        for (int i = 0; i < arity; ++i) {
          if (i == pinned) {
            lo[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] = pinned_val;
          } else if (i < pinned) {
            lo[static_cast<std::size_t>(i)] = -(N - 1);
            hi[static_cast<std::size_t>(i)] = N - 1;
          } else {
            lo[static_cast<std::size_t>(i)] = -N;
            hi[static_cast<std::size_t>(i)] = N;
          }
        }
        for (int i = 0; i < arity; ++i) x[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        while (true) {
          long long v = 0;
          for (int i = 0; i < arity; ++i)
            v += split.rows[static_cast<std::size_t>(first_row + i)]
                           [static_cast<std::size_t>(x[static_cast<std::size_t>(i)] + radius_max)];
          fn(v);
          int axis = arity - 1;
          while (axis >= 0) {
            std::size_t ui = static_cast<std::size_t>(axis);
            if (x[ui] < hi[ui]) {
              ++x[ui];
              break;
            }
            x[ui] = lo[ui];
            --axis;
          }
          if (axis < 0) break;
        }
      }
    }
  };

  std::vector<long long> profile(static_cast<std::size_t>(radius_max) + 1, 0);
  long long running = 0;
  for (long long N = 0; N <= radius_max; ++N) {
    // tail shell first, so the cross pairs (lead shell x tail shell) count once
    for_each_shell(m, tail, N, [&](long long v) { ++tail_cum[v]; });
    long long delta = 0;
    for_each_shell(0, m, N, [&](long long v) {
      auto it = tail_cum.find(-v);
      if (it != tail_cum.end()) delta += it->second;
    });
    for_each_shell(m, tail, N, [&](long long v) {
      auto it = lead_cum.find(-v);
      if (it != lead_cum.end()) delta += it->second;
    });
    for_each_shell(0, m, N, [&](long long v) { ++lead_cum[v]; });
    running += delta;
    profile[static_cast<std::size_t>(N)] = running;
  }
  return profile;
}

std::vector<long long> brute_profile(const Form& form, long long radius_max,
                                     const EnumBudget& budget) {
  int n = form.n_vars();
  std::uint64_t visits =
      checked_pow_u64(static_cast<std::uint64_t>(2 * radius_max + 1), n, budget.max_visits);
  if (visits > budget.max_visits)
    throw BudgetExceeded("radius profile exceeds the visit budget");
  Int64FormEvaluator eval(form);
  if (!eval.fits_int64(radius_max))
    throw BudgetExceeded("coordinate range too large for the int64 fast path");
  std::vector<long long> shell_zeros(static_cast<std::size_t>(radius_max) + 1, 0);
  std::vector<std::int32_t> x(static_cast<std::size_t>(n), static_cast<std::int32_t>(-radius_max));
  while (true) {
    if (eval.evaluate(x.data()) == 0) {
      std::int32_t norm = 0;
      for (std::int32_t c : x) norm = std::max(norm, c < 0 ? static_cast<std::int32_t>(-c) : c);
      ++shell_zeros[static_cast<std::size_t>(norm)];
    }
    int axis = n - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (x[ui] < radius_max) {
        ++x[ui];
        break;
      }
      x[ui] = static_cast<std::int32_t>(-radius_max);
      --axis;
    }
    if (axis < 0) break;
  }
  std::vector<long long> profile(static_cast<std::size_t>(radius_max) + 1, 0);
  long long running = 0;
  for (long long N = 0; N <= radius_max; ++N) {
    running += shell_zeros[static_cast<std::size_t>(N)];
    profile[static_cast<std::size_t>(N)] = running;
  }
  return profile;
}

}  // namespace

PointCloud enumerate_points(const Form& form, long long radius, EnumStrategy strategy,
                            const EnumBudget& budget) {
  if (radius < 0) throw DimensionMismatch("radius must be nonnegative");
  if (radius > (1LL << 30)) throw BudgetExceeded("radius exceeds coordinate range");
  if (strategy == EnumStrategy::Auto)
    strategy = form.is_diagonal() ? EnumStrategy::MeetInMiddle : EnumStrategy::BruteForce;
  if (strategy == EnumStrategy::MeetInMiddle && !form.is_diagonal())
    throw DimensionMismatch("meet-in-the-middle needs a diagonal form");
  return strategy == EnumStrategy::MeetInMiddle ? mitm_enumerate(form, radius, budget)
                                                : brute_force_enumerate(form, radius, budget);
}

long long count_points(const Form& form, long long radius, EnumStrategy strategy,
                       const EnumBudget& budget) {
  if (radius < 0) throw DimensionMismatch("radius must be nonnegative");
  if (radius > (1LL << 30)) throw BudgetExceeded("radius exceeds coordinate range");
  if (strategy == EnumStrategy::Auto)
    strategy = form.is_diagonal() ? EnumStrategy::MeetInMiddle : EnumStrategy::BruteForce;
  if (strategy == EnumStrategy::MeetInMiddle && !form.is_diagonal())
    throw DimensionMismatch("meet-in-the-middle needs a diagonal form");
  return strategy == EnumStrategy::MeetInMiddle ? mitm_count(form, radius, budget)
                                                : brute_force_count(form, radius, budget);
}

std::vector<long long> radius_profile(const Form& form, long long radius_max,
                                      const EnumBudget& budget) {
  if (radius_max < 0) throw DimensionMismatch("radius must be nonnegative");
  return form.is_diagonal() ? diagonal_profile(form, radius_max, budget)
                            : brute_profile(form, radius_max, budget);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double* intercept, double* residual) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateFit("need at least two samples");
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw DegenerateFit("all abscissae equal");
  double slope = sxy / sxx;
  double b = my - slope * mx;
  if (intercept) *intercept = b;
  if (residual) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - (slope * x[i] + b);
      rss += r * r;
    }
    *residual = std::sqrt(rss / n);
  }
  return slope;
}

GrowthFit growth_fit(const Form& form, const std::vector<long long>& radii, EnumStrategy strategy,
                     const EnumBudget& budget) {
  std::vector<long long> counts;
  for (long long r : radii) counts.push_back(count_points(form, r, strategy, budget));
  return growth_fit_from_counts(radii, counts);
}

GrowthFit growth_fit_from_counts(const std::vector<long long>& radii,
                                 const std::vector<long long>& counts) {
  if (radii.size() != counts.size() || radii.size() < 2)
    throw DegenerateFit("need at least two radii");
  GrowthFit fit;
  fit.radii = radii;
  fit.counts = counts;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 1 || counts[i] < 1) throw DegenerateFit("radii and counts must be positive");
    xs.push_back(std::log(static_cast<double>(radii[i])));
    ys.push_back(std::log(static_cast<double>(counts[i])));
  }
  fit.slope = least_squares_slope(xs, ys, nullptr, &fit.residual);
  return fit;
}

void save_cloud(const PointCloud& cloud, std::ostream& out) {
  for (std::size_t i = 0; i < cloud.count(); ++i) {
    auto p = cloud.point(i);
    for (int j = 0; j < cloud.dim; ++j) {
      if (j) out << ' ';
      out << p[static_cast<std::size_t>(j)];
    }
    out << '\n';
  }
}

PointCloud load_cloud(std::istream& in, const Form& form) {
  PointCloud cloud;
  cloud.dim = form.n_vars();
  std::string line;
  long long radius = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<long long> xl;
    long long v;
    while (row >> v) xl.push_back(v);
    if (static_cast<int>(xl.size()) != cloud.dim)
      throw IoError("point with wrong arity in cloud file");
    if (form.evaluate(xl) != 0) throw IoError("cloud file contains a non-solution point");
    for (long long c : xl) {
      cloud.coords.push_back(static_cast<std::int32_t>(c));
      radius = std::max(radius, c < 0 ? -c : c);
    }
  }
  cloud.radius = radius;
  return cloud;
}

void save_cloud_file(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  save_cloud(cloud, out);
  if (!out.good()) throw IoError("write failure on " + path);
}

}  // namespace birchmax::lattice
