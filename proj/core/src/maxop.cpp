#include "birchmax/maxop.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "birchmax/numeric.hpp"
#include "birchmax/rng.hpp"

namespace birchmax::maxop {

namespace {

struct LexLess {
  int dim;
  bool operator()(const std::int32_t* a, const std::int32_t* b) const {
    for (int i = 0; i < dim; ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

std::mutex fftw_plan_mutex;

}  // namespace

std::complex<double> GridFunction::value_at(std::span<const std::int32_t> p) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const std::int32_t* row = pts.data() + mid * static_cast<std::size_t>(dim);
    int cmp = 0;
    for (int i = 0; i < dim; ++i) {
      if (row[i] != p[static_cast<std::size_t>(i)]) {
        cmp = row[i] < p[static_cast<std::size_t>(i)] ? -1 : 1;
        break;
      }
    }
    if (cmp == 0) return vals[mid];
    if (cmp < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return 0.0;
}

GridFunction GridFunction::delta(int dim) {
  GridFunction f;
  f.dim = dim;
  f.box_lo.assign(static_cast<std::size_t>(dim), 0);
  f.box_hi.assign(static_cast<std::size_t>(dim), 0);
  f.pts.assign(static_cast<std::size_t>(dim), 0);
  f.vals.assign(1, 1.0);
  return f;
}

GridFunction GridFunction::from_entries(
    int dim, std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries) {
  for (const auto& [p, v] : entries) {
    if (static_cast<int>(p.size()) != dim) throw DimensionMismatch("grid point arity mismatch");
    (void)v;
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  GridFunction f;
  f.dim = dim;
  f.box_lo.assign(static_cast<std::size_t>(dim), 0);
  f.box_hi.assign(static_cast<std::size_t>(dim), 0);
  bool first = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i + 1 < entries.size() && entries[i].first == entries[i + 1].first) {
      entries[i + 1].second += entries[i].second;  // merge duplicates
      continue;
    }
    if (entries[i].second == 0.0) continue;
    const auto& p = entries[i].first;
    f.pts.insert(f.pts.end(), p.begin(), p.end());
    f.vals.push_back(entries[i].second);
    for (int k = 0; k < dim; ++k) {
      std::size_t uk = static_cast<std::size_t>(k);
      if (first) {
        f.box_lo[uk] = f.box_hi[uk] = p[uk];
      } else {
        f.box_lo[uk] = std::min(f.box_lo[uk], p[uk]);
        f.box_hi[uk] = std::max(f.box_hi[uk], p[uk]);
      }
    }
    first = false;
  }
  return f;
}

double lp_norm(const GridFunction& f, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (const auto& v : f.vals) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw DimensionMismatch("lp norm needs p >= 1");
  Kahan acc;
  for (const auto& v : f.vals) acc.add(std::pow(std::abs(v), p));
  return std::pow(acc.sum, 1.0 / p);
}

namespace {

GridFunction direct_convolve(const lattice::PointCloud& cloud, const GridFunction& f) {
  double r = static_cast<double>(cloud.count());
  int dim = f.dim;
  std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
  entries.reserve(cloud.count() * f.size());
  std::vector<std::int32_t> y(static_cast<std::size_t>(dim));
  for (std::size_t ci = 0; ci < cloud.count(); ++ci) {
    auto x = cloud.point(ci);
    for (std::size_t fi = 0; fi < f.size(); ++fi) {
      auto s = f.point(fi);
      for (int k = 0; k < dim; ++k)
        y[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)] + x[static_cast<std::size_t>(k)];
      entries.emplace_back(y, f.vals[fi] / r);
    }
  }
  return GridFunction::from_entries(dim, std::move(entries));
}

GridFunction fft_convolve(const lattice::PointCloud& cloud, const GridFunction& f,
                          std::size_t padded_cells) {
  int dim = f.dim;
  long long N = cloud.radius;
  std::vector<int> dims(static_cast<std::size_t>(dim));
  std::vector<std::int32_t> out_lo(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    std::size_t uk = static_cast<std::size_t>(k);
    long long span = static_cast<long long>(f.box_hi[uk]) - f.box_lo[uk] + 1 + 2 * N;
    dims[uk] = static_cast<int>(span);
    out_lo[uk] = static_cast<std::int32_t>(f.box_lo[uk] - N);
  }

  fftw_complex* a = fftw_alloc_complex(padded_cells);
  fftw_complex* b = fftw_alloc_complex(padded_cells);
  std::fill(reinterpret_cast<double*>(a), reinterpret_cast<double*>(a) + 2 * padded_cells, 0.0);
  std::fill(reinterpret_cast<double*>(b), reinterpret_cast<double*>(b) + 2 * padded_cells, 0.0);

  auto flat_index = [&](std::span<const std::int32_t> p, const std::int32_t* lo) {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) {
      std::size_t uk = static_cast<std::size_t>(k);
      idx = idx * static_cast<std::size_t>(dims[uk]) +
            static_cast<std::size_t>(p[uk] - lo[uk]);
    }
    return idx;
  };

  for (std::size_t fi = 0; fi < f.size(); ++fi) {
    std::size_t idx = flat_index(f.point(fi), f.box_lo.data());
    a[idx][0] = f.vals[fi].real();
    a[idx][1] = f.vals[fi].imag();
  }
  double r = static_cast<double>(cloud.count());
  std::vector<std::int32_t> klo(static_cast<std::size_t>(dim), static_cast<std::int32_t>(-N));
  for (std::size_t ci = 0; ci < cloud.count(); ++ci) {
    std::size_t idx = flat_index(cloud.point(ci), klo.data());
    b[idx][0] += 1.0 / r;
  }

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan pa = fftw_plan_dft(dim, dims.data(), a, a, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft(dim, dims.data(), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
  }
  for (std::size_t i = 0; i < padded_cells; ++i) {
    double re = a[i][0] * b[i][0] - a[i][1] * b[i][1];
    double im = a[i][0] * b[i][1] + a[i][1] * b[i][0];
    a[i][0] = re;
    a[i][1] = im;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan pi = fftw_plan_dft(dim, dims.data(), a, a, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(pi);
    fftw_destroy_plan(pi);
  }

  double scale = 1.0 / static_cast<double>(padded_cells);
  std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
  std::vector<std::int32_t> p(static_cast<std::size_t>(dim));
  double cutoff = 0;
  for (std::size_t i = 0; i < padded_cells; ++i)
    cutoff = std::max(cutoff, std::hypot(a[i][0], a[i][1]));
  cutoff *= scale * 1e-13;
  for (std::size_t i = 0; i < padded_cells; ++i) {
    std::complex<double> v(a[i][0] * scale, a[i][1] * scale);
    if (std::abs(v) <= cutoff) continue;
    std::size_t rem = i;
    for (int k = dim - 1; k >= 0; --k) {
      std::size_t uk = static_cast<std::size_t>(k);
      p[uk] = static_cast<std::int32_t>(rem % static_cast<std::size_t>(dims[uk])) + out_lo[uk];
      rem /= static_cast<std::size_t>(dims[uk]);
    }
    entries.emplace_back(p, v);
  }
  fftw_free(a);
  fftw_free(b);
  return GridFunction::from_entries(dim, std::move(entries));
}

}  // namespace

GridFunction apply_average(const lattice::PointCloud& cloud, const GridFunction& f,
                           ConvStrategy strategy) {
  if (cloud.count() == 0) throw EmptyCloud("empty point cloud");
  if (cloud.dim != f.dim) throw DimensionMismatch("cloud and grid arity mismatch");
  if (f.size() == 0) {
    GridFunction out;
    out.dim = f.dim;
    out.box_lo = f.box_lo;
    out.box_hi = f.box_hi;
    return out;
  }

  std::size_t padded_cells = 1;
  bool padded_ok = true;
  for (int k = 0; k < f.dim; ++k) {
    std::size_t uk = static_cast<std::size_t>(k);
    long long span = static_cast<long long>(f.box_hi[uk]) - f.box_lo[uk] + 1 + 2 * cloud.radius;
    if (!padded_ok || span <= 0 || padded_cells > (static_cast<std::size_t>(1) << 26) / static_cast<std::size_t>(span))
      padded_ok = false;
    else
      padded_cells *= static_cast<std::size_t>(span);
  }

  double direct_cost = static_cast<double>(cloud.count()) * static_cast<double>(f.size());
  if (strategy == ConvStrategy::Auto)
    strategy = (direct_cost <= 2e7 || !padded_ok) ? ConvStrategy::DirectSparse : ConvStrategy::Fft;
  if (strategy == ConvStrategy::Fft && !padded_ok)
    throw BudgetExceeded("padded convolution box too large");
  if (strategy == ConvStrategy::DirectSparse && direct_cost > 4e8)
    throw BudgetExceeded("direct convolution too large");

  return strategy == ConvStrategy::Fft ? fft_convolve(cloud, f, padded_cells)
                                       : direct_convolve(cloud, f);
}

MaxOpResult apply_maximal(const std::vector<const lattice::PointCloud*>& clouds,
                          const GridFunction& f, ConvStrategy strategy) {
  if (clouds.empty()) throw EmptyCloud("no clouds supplied");
  MaxOpResult out;
  std::map<std::vector<std::int32_t>, double> best;
  for (const lattice::PointCloud* cloud : clouds) {
    out.radii_used.push_back(cloud->radius);
    GridFunction g = apply_average(*cloud, f, strategy);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto p = g.point(i);
      std::vector<std::int32_t> key(p.begin(), p.end());
      double mag = std::abs(g.vals[i]);
      auto it = best.find(key);
      if (it == best.end())
        best.emplace(std::move(key), mag);
      else
        it->second = std::max(it->second, mag);
    }
  }
  std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
  entries.reserve(best.size());
  for (const auto& [p, v] : best) entries.emplace_back(p, std::complex<double>(v, 0.0));
  out.result = GridFunction::from_entries(f.dim, std::move(entries));
  return out;
}

double window_sup_at(const Form& form, const std::vector<long long>& radius_counts,
                     const GridFunction& f, std::span<const std::int32_t> y, long long lo,
                     long long hi) {
  if (hi >= static_cast<long long>(radius_counts.size()))
    throw DimensionMismatch("radius profile does not cover the window");
  int dim = f.dim;
  Int64FormEvaluator eval(form);
  // contributions of f entries whose offset lies on the zero set, by radius
  std::vector<std::pair<long long, std::complex<double>>> hits;
  std::vector<std::int32_t> x(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto s = f.point(i);
    long long norm = 0;
    for (int k = 0; k < dim; ++k) {
      x[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)] - s[static_cast<std::size_t>(k)];
      norm = std::max<long long>(norm, std::abs(static_cast<long long>(x[static_cast<std::size_t>(k)])));
    }
    if (norm > hi) continue;
    if (eval.evaluate(x.data()) != 0) continue;
    hits.emplace_back(norm, f.vals[i]);
  }
  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double sup = 0;
  std::complex<double> partial = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    partial += hits[i].second;
    bool last_of_radius = i + 1 == hits.size() || hits[i + 1].first != hits[i].first;
    if (!last_of_radius) continue;
    // the partial sum is constant for N in [max(radius, lo), next radius);
    // the normalizer grows with N, so the max sits at the left endpoint
    long long at = std::max(hits[i].first, lo);
    if (at > hi) break;
    double denom = static_cast<double>(radius_counts[static_cast<std::size_t>(at)]);
    if (denom > 0) sup = std::max(sup, std::abs(partial) / denom);
  }
  return sup;
}

std::vector<PartialSumRow> point_mass_partial_sums(const lattice::PointCloud& cloud,
                                                   const std::vector<long long>& radius_counts,
                                                   int k_max) {
  if ((1LL << k_max) > cloud.radius)
    throw DimensionMismatch("cloud radius does not cover the last dyadic box");
  // bucket cloud points by the smallest dyadic radius containing them
  std::vector<long long> bucket(static_cast<std::size_t>(k_max) + 1, 0);
  for (std::size_t i = 0; i < cloud.count(); ++i) {
    auto p = cloud.point(i);
    long long norm = 0;
    for (int k = 0; k < cloud.dim; ++k)
      norm = std::max<long long>(norm, std::abs(static_cast<long long>(p[static_cast<std::size_t>(k)])));
    if (norm > (1LL << k_max)) continue;
    int kmin = 0;
    while ((1LL << kmin) < norm) ++kmin;
    bucket[static_cast<std::size_t>(kmin)] += 1;
  }
  std::vector<PartialSumRow> rows;
  double l1 = 0, l15 = 0, prev_l1 = 0, prev_l15 = 0;
  for (int k = 0; k <= k_max; ++k) {
    long long r = radius_counts[static_cast<std::size_t>(1LL << k)];
    double value = 1.0 / static_cast<double>(r);
    l1 += static_cast<double>(bucket[static_cast<std::size_t>(k)]) * value;
    l15 += static_cast<double>(bucket[static_cast<std::size_t>(k)]) * std::pow(value, 1.5);
    if (k == 0) {
      prev_l1 = l1;
      prev_l15 = l15;
      continue;
    }
    PartialSumRow row;
    row.k = k;
    row.l1 = l1;
    row.l15 = l15;
    row.l1_increment = l1 - prev_l1;
    row.l15_increment = l15 - prev_l15;
    prev_l1 = l1;
    prev_l15 = l15;
    rows.push_back(row);
  }
  return rows;
}

std::vector<WindowMaxRow> window_max_lower_bounds(const Form& form, double p,
                                                  const std::vector<long long>& n0_list,
                                                  int trials, std::uint64_t seed,
                                                  const lattice::EnumBudget& budget) {
  int dim = form.n_vars();
  long long max_hi = 0;
  for (long long n0 : n0_list) max_hi = std::max(max_hi, n0 * n0);
  std::vector<long long> counts = lattice::radius_profile(form, max_hi, budget);

  std::vector<WindowMaxRow> rows;
  for (long long n0 : n0_list) {
    long long hi = n0 * n0;
    WindowMaxRow row;
    row.n0 = n0;

    // delta trial: exact over the whole lattice via the radius profile
    {
      Kahan acc;
      // the origin contributes sup_N 1/r(N) = 1/r(n0) over the window
      acc.add(std::pow(1.0 / static_cast<double>(counts[static_cast<std::size_t>(n0)]), p));
      for (long long rho = 1; rho <= hi; ++rho) {
        long long shell = counts[static_cast<std::size_t>(rho)] -
                          counts[static_cast<std::size_t>(rho - 1)];
        if (shell == 0) continue;
        long long at = std::max(rho, n0);
        double value = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(at)]);
        acc.add(static_cast<double>(shell) * std::pow(value, p));
      }
      double bound = std::pow(acc.sum, 1.0 / p);  // delta has unit norm
      row.lower_bound = bound;
      row.best_trial = "delta";
      row.best_ratio = bound;
    }

    // sampled trials: cloud patch indicator plus random sparse functions
    long long sample_radius = std::min<long long>(hi, 12);
    lattice::PointCloud sample_cloud = lattice::enumerate_points(form, sample_radius,
                                                                 lattice::EnumStrategy::Auto, budget);
    std::vector<GridFunction> trial_functions;
    std::vector<std::string> trial_names;
    {
      long long patch_radius = std::min<long long>(n0, 3);
      lattice::PointCloud patch = lattice::enumerate_points(form, patch_radius,
                                                            lattice::EnumStrategy::Auto, budget);
      std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
      for (std::size_t i = 0; i < patch.count(); ++i) {
        auto x = patch.point(i);
        entries.emplace_back(std::vector<std::int32_t>(x.begin(), x.end()),
                             std::complex<double>(1.0, 0.0));
      }
      trial_functions.push_back(GridFunction::from_entries(dim, std::move(entries)));
      trial_names.push_back("patch");
    }
    for (int t = 0; t < trials; ++t) {
      SplitMix64 rng(mix_key(mix_key(seed, static_cast<std::uint64_t>(n0)), static_cast<std::uint64_t>(t)));
      std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
      for (int i = 0; i < 40; ++i) {
        std::vector<std::int32_t> pt(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k)
          pt[static_cast<std::size_t>(k)] =
              static_cast<std::int32_t>(rng.next_int(-n0, n0));
        entries.emplace_back(std::move(pt),
                             std::complex<double>(rng.next_double() < 0.5 ? -1.0 : 1.0, 0.0));
      }
      trial_functions.push_back(GridFunction::from_entries(dim, std::move(entries)));
      trial_names.push_back("random" + std::to_string(t));
    }

    for (std::size_t tf = 0; tf < trial_functions.size(); ++tf) {
      const GridFunction& f = trial_functions[tf];
      if (f.size() == 0) continue;
      double fnorm = lp_norm(f, p);
      if (fnorm == 0) continue;
      // evaluation window: supports shifted by a seeded sample of cloud points
      std::set<std::vector<std::int32_t>> window;
      SplitMix64 rng(mix_key(seed, 77 + tf));
      std::size_t samples = std::min<std::size_t>(sample_cloud.count(), 400);
      for (std::size_t i = 0; i < f.size(); ++i) {
        auto s = f.point(i);
        window.insert(std::vector<std::int32_t>(s.begin(), s.end()));
        for (std::size_t j = 0; j < samples; ++j) {
          std::size_t ci = sample_cloud.count() <= samples
                               ? j
                               : rng.next_below(sample_cloud.count());
          auto x = sample_cloud.point(ci);
          std::vector<std::int32_t> y(static_cast<std::size_t>(dim));
          for (int k = 0; k < dim; ++k)
            y[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)] + x[static_cast<std::size_t>(k)];
          window.insert(std::move(y));
        }
      }
      Kahan acc;
      for (const auto& y : window) {
        double v = window_sup_at(form, counts, f, std::span<const std::int32_t>(y.data(), y.size()),
                                 n0, hi);
        if (v > 0) acc.add(std::pow(v, p));
      }
      double ratio = std::pow(acc.sum, 1.0 / p) / fnorm;
      if (ratio > row.best_ratio) {
        row.best_ratio = ratio;
        row.lower_bound = ratio;
        row.best_trial = trial_names[tf];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_grid(const GridFunction& f, std::ostream& out) {
  out << f.dim;
  for (int k = 0; k < f.dim; ++k)
    out << ' ' << f.box_lo[static_cast<std::size_t>(k)] << ' '
        << f.box_hi[static_cast<std::size_t>(k)];
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto pt = f.point(i);
    for (int k = 0; k < f.dim; ++k) out << pt[static_cast<std::size_t>(k)] << ' ';
    out << f.vals[i].real() << ' ' << f.vals[i].imag() << '\n';
  }
}

GridFunction load_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty grid file");
  std::istringstream header(line);
  int dim = 0;
  if (!(header >> dim) || dim < 1) throw IoError("bad grid header");
  std::vector<std::int32_t> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    long long a, b;
    if (!(header >> a >> b)) throw IoError("bad grid header bounds");
    lo[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(a);
    hi[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(b);
  }
  std::vector<std::pair<std::vector<std::int32_t>, std::complex<double>>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::int32_t> p(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      long long c;
      if (!(row >> c)) throw IoError("bad grid record");
      p[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(c);
    }
    double re, im;
    if (!(row >> re >> im)) throw IoError("bad grid record value");
    entries.emplace_back(std::move(p), std::complex<double>(re, im));
  }
  GridFunction f = GridFunction::from_entries(dim, std::move(entries));
  f.box_lo = lo;
  f.box_hi = hi;
  return f;
}

}  // namespace birchmax::maxop
