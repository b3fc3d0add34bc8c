#include "birchmax/multiplier.hpp"

#include <algorithm>
#include <cmath>

#include "birchmax/expsum.hpp"
#include "birchmax/numeric.hpp"
#include "birchmax/parallel.hpp"
#include "birchmax/rng.hpp"

namespace birchmax::multiplier {

TorusPoint TorusPoint::reduce(std::vector<double> raw) {
  TorusPoint p;
  for (double& u : raw) {
    u -= std::floor(u + 0.5);
    if (u >= 0.5) u -= 1.0;  // guards the floor rounding edge
  }
  p.xi = std::move(raw);
  return p;
}

double bump_1d(double t) {
  double a = std::fabs(t);
  if (a <= 0.1) return 1.0;
  if (a >= 0.2) return 0.0;
  auto g = [](double u) { return std::exp(-1.0 / u); };
  double u = (0.2 - a) / 0.1;  // in (0, 1)
  return g(u) / (g(u) + g(1.0 - u));
}

double bump_box(const std::vector<double>& t, double scale) {
  double prod = 1.0;
  for (double c : t) {
    prod *= bump_1d(c * scale);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

double bump_transform_1d(double u) {
  // 2 * integral over [0, 1/5] of bump(v) cos(2 pi u v) dv, by panel Gauss
  // quadrature sized to the oscillation
  static const int kOrder = 24;
  int panels = 2 + static_cast<int>(std::fabs(u) * 0.2);
  double total = 0;
  // [0, 0.1] where the bump is 1, then the smooth shoulder [0.1, 0.2]
  for (int half = 0; half < 2; ++half) {
    double a = half == 0 ? 0.0 : 0.1;
    double b = half == 0 ? 0.1 : 0.2;
    double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      double mid = a + (p + 0.5) * width;
      double hw = 0.5 * width;
      // fixed 24-point rule via the shared helper in oscillatory is private;
      // use a local Gauss-Lobatto-free fallback: composite 8-point Legendre
      static const double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                      0.7966664774136267, 0.9602898564975363};
      static const double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};
      for (int g = 0; g < 4; ++g) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          double x = mid + sgn * hw * nodes[g];
          total += weights[g] * hw * bump_1d(x) * std::cos(kTwoPi * u * x);
        }
      }
    }
  }
  (void)kOrder;
  return 2.0 * total;
}

long long block_modulus(int j) {
  if (j < 0 || j > 5) throw BudgetExceeded("block index out of the supported range");
  long long top = 1LL << j;
  long long m = 1;
  for (long long q = 2; q <= top; ++q) m = expsum::lcm_ll(m, q);
  return m;
}

std::vector<TorusPoint> decomposition_samples(const Form& form, int j, int count,
                                              std::uint64_t seed) {
  int n = form.n_vars();
  long long Qj = block_modulus(j);
  double narrow = 1.0 / (5.0 * static_cast<double>(Qj) * static_cast<double>(Qj));
  double wide = 1.0 / (5.0 * std::pow(10.0, j - 1));
  SplitMix64 rng(mix_key(seed, static_cast<std::uint64_t>(j)));
  std::vector<long long> moduli;
  for (long long q = 1; q <= Qj; ++q)
    if (Qj % q == 0 || q < (1LL << j)) moduli.push_back(q);

  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    std::vector<double> xi(static_cast<std::size_t>(n));
    if (k % 3 == 0) {
      for (int i = 0; i < n; ++i) xi[static_cast<std::size_t>(i)] = rng.next_double() - 0.5;
    } else {
      long long q = moduli[rng.next_below(moduli.size())];
      // offsets spanning the narrow bump up to the wide one
      double w = (k % 3 == 1) ? narrow : wide;
      for (int i = 0; i < n; ++i) {
        long long a = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(q)));
        double offset = (2.0 * rng.next_double() - 1.0) * w;
        xi[static_cast<std::size_t>(i)] = static_cast<double>(a) / static_cast<double>(q) + offset;
      }
    }
    out.push_back(TorusPoint::reduce(std::move(xi)));
  }
  return out;
}

double exact_multiplier(const lattice::PointCloud& cloud, const TorusPoint& xi) {
  if (cloud.count() == 0) throw EmptyCloud("empty point cloud");
  if (xi.dim() != cloud.dim) throw DimensionMismatch("frequency arity mismatch");
  KahanComplex acc;
  std::size_t count = cloud.count();
  int dim = cloud.dim;
  const std::int32_t* base = cloud.coords.data();
  for (std::size_t i = 0; i < count; ++i) {
    const std::int32_t* p = base + i * static_cast<std::size_t>(dim);
    double dot = 0;
    for (int k = 0; k < dim; ++k) dot += static_cast<double>(p[k]) * xi.xi[static_cast<std::size_t>(k)];
    acc.add(unit_phase(dot));
  }
  std::complex<double> total = acc.value();
  double r = static_cast<double>(count);
  if (std::fabs(total.imag()) >= 1e-9 * r)
    throw Error("ImaginaryResidual",
                "multiplier imaginary part " + std::to_string(total.imag() / r));
  return total.real() / r;
}

Engine::Engine(Form form, ApproxConfig config) : form_(std::move(form)), config_(config) {
  config_.shell.scale = 1;
  if (config_.shell.tol > config_.dsig_tol) config_.shell.tol = config_.dsig_tol;
}

std::complex<double> Engine::complete_sum_cached(long long q, long long a,
                                                 const std::vector<long long>& avec) {
  std::vector<long long> key;
  key.reserve(avec.size() + 2);
  key.push_back(q);
  key.push_back(a);
  for (long long v : avec) key.push_back(((v % q) + q) % q);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sum_cache_.find(key);
    if (it != sum_cache_.end()) return it->second;
  }
  std::vector<long long> reduced(key.begin() + 2, key.end());
  std::complex<double> v =
      expsum::complete_sum_auto(form_, expsum::ExpSumSpec::uniform(a, q, reduced));
  std::lock_guard<std::mutex> lock(mu_);
  sum_cache_.emplace(std::move(key), v);
  return v;
}

double Engine::singular_series(int q_max) {
  int n = form_.n_vars();
  std::vector<long long> zero(static_cast<std::size_t>(n), 0);
  Kahan acc;
  for (long long q = 1; q <= q_max; ++q) {
    for (long long a = q == 1 ? 0 : 1; a < std::max<long long>(q, 1); ++a) {
      if (q > 1 && expsum::gcd_ll(a, q) != 1) continue;
      acc.add(complete_sum_cached(q, a, zero).real());
    }
  }
  return acc.sum;
}

double Engine::surface_mass() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (mass_ready_) return mass_;
  }
  oscillatory::ShellSpec spec = config_.shell;
  spec.scale = 1;
  std::vector<double> zero(static_cast<std::size_t>(form_.n_vars()), 0.0);
  double m = oscillatory::surface_transform(form_, spec, zero).value.real();
  std::lock_guard<std::mutex> lock(mu_);
  mass_ = m;
  mass_ready_ = true;
  return mass_;
}

double Engine::kappa() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (kappa_ready_) return kappa_;
  }
  double k;
  if (config_.kappa != 0) {
    k = config_.kappa;
  } else {
    double series = singular_series(config_.series_q_max);
    double mass = surface_mass();
    if (series <= 0 || mass <= 0)
      throw NonconvergentShell("normalization series or mass not positive");
    k = 1.0 / (series * mass);
  }
  std::lock_guard<std::mutex> lock(mu_);
  kappa_ = k;
  kappa_ready_ = true;
  return kappa_;
}

std::complex<double> Engine::dsig(long long N, const std::vector<double>& eta) {
  std::vector<double> scaled(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) scaled[i] = static_cast<double>(N) * eta[i];
  {
    std::unique_lock<std::mutex> lock(mu_);
    auto it = dsig_cache_.find(scaled);
    if (it != dsig_cache_.end()) {
      std::complex<double> raw = it->second;
      lock.unlock();  // kappa() takes the same mutex
      return kappa() * raw;
    }
  }
  oscillatory::ShellSpec spec = config_.shell;
  spec.scale = 1;
  std::complex<double> raw = oscillatory::surface_transform(form_, spec, scaled).value;
  double k = kappa();
  std::lock_guard<std::mutex> lock(mu_);
  dsig_cache_.emplace(std::move(scaled), raw);
  return k * raw;
}

std::vector<long long> Engine::prune_fraction(long long q, const TorusPoint& xi, double width,
                                              bool* in_support) const {
  int n = xi.dim();
  std::vector<long long> avec(static_cast<std::size_t>(n));
  *in_support = true;
  for (int i = 0; i < n; ++i) {
    double target = static_cast<double>(q) * xi.xi[static_cast<std::size_t>(i)];
    long long nearest = std::llround(target);
    avec[static_cast<std::size_t>(i)] = nearest;
    double delta = xi.xi[static_cast<std::size_t>(i)] -
                   static_cast<double>(nearest) / static_cast<double>(q);
    if (std::fabs(delta) >= width) *in_support = false;
  }
  return avec;
}

std::complex<double> Engine::major_arc_block(long long N, int l, const TorusPoint& xi) {
  if (xi.dim() != form_.n_vars()) throw DimensionMismatch("frequency arity mismatch");
  double scale = std::pow(10.0, l);
  double width = 1.0 / (5.0 * scale);
  std::complex<double> total = 0;
  int n = xi.dim();
  for (long long q = 1LL << l; q < (1LL << (l + 1)); ++q) {
    bool in_support = true;
    std::vector<long long> avec = prune_fraction(q, xi, width, &in_support);
    if (!in_support) continue;
    std::vector<double> delta(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      delta[static_cast<std::size_t>(i)] = xi.xi[static_cast<std::size_t>(i)] -
                                           static_cast<double>(avec[static_cast<std::size_t>(i)]) /
                                               static_cast<double>(q);
    double zeta = bump_box(delta, scale);
    if (zeta == 0.0) continue;
    std::complex<double> sum_a = 0;
    for (long long a = q == 1 ? 0 : 1; a < std::max<long long>(q, 1); ++a) {
      if (q > 1 && expsum::gcd_ll(a, q) != 1) continue;
      sum_a += complete_sum_cached(q, a, avec);
    }
    total += sum_a * zeta * dsig(N, delta);
  }
  return total;
}

std::complex<double> Engine::mollified_approximant(long long N, long long q,
                                                   const TorusPoint& xi) {
  if (xi.dim() != form_.n_vars()) throw DimensionMismatch("frequency arity mismatch");
  double scale = static_cast<double>(q) * static_cast<double>(q);
  double width = 1.0 / (5.0 * scale);
  bool in_support = true;
  std::vector<long long> avec = prune_fraction(q, xi, width, &in_support);
  if (!in_support) return 0.0;
  int n = xi.dim();
  std::vector<double> delta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    delta[static_cast<std::size_t>(i)] = xi.xi[static_cast<std::size_t>(i)] -
                                         static_cast<double>(avec[static_cast<std::size_t>(i)]) /
                                             static_cast<double>(q);
  double zeta = bump_box(delta, scale);
  if (zeta == 0.0) return 0.0;
  std::complex<double> sum_a = 0;
  for (long long a = 0; a < q; ++a) sum_a += complete_sum_cached(q, a, avec);
  return sum_a * zeta * dsig(N, delta);
}

Engine::ErrorTerms Engine::error_terms(long long N, int j, const TorusPoint& xi) {
  if (j < 1) throw DimensionMismatch("block index must be >= 1");
  long long Qj = block_modulus(j);
  double block_scale = static_cast<double>(Qj) * static_cast<double>(Qj);
  int n = xi.dim();

  ErrorTerms out{0.0, 0.0};

  // bump mismatch across the dyadic blocks below 2^j
  for (int l = 0; l < j; ++l) {
    double scale = std::pow(10.0, l);
    double width = 1.0 / (5.0 * scale);
    for (long long q = 1LL << l; q < (1LL << (l + 1)); ++q) {
      bool in_support = true;
      std::vector<long long> avec = prune_fraction(q, xi, width, &in_support);
      if (!in_support) continue;
      std::vector<double> delta(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        delta[static_cast<std::size_t>(i)] = xi.xi[static_cast<std::size_t>(i)] -
                                             static_cast<double>(avec[static_cast<std::size_t>(i)]) /
                                                 static_cast<double>(q);
      double diff = bump_box(delta, block_scale) - bump_box(delta, scale);
      if (diff == 0.0) continue;
      std::complex<double> sum_a = 0;
      for (long long a = q == 1 ? 0 : 1; a < std::max<long long>(q, 1); ++a) {
        if (q > 1 && expsum::gcd_ll(a, q) != 1) continue;
        sum_a += complete_sum_cached(q, a, avec);
      }
      out.bump_difference += sum_a * diff * dsig(N, delta);
    }
  }

  // divisors of the block modulus at or above 2^j
  double width = 1.0 / (5.0 * block_scale);
  for (long long q = 1LL << j; q <= Qj; ++q) {
    if (Qj % q != 0) continue;
    bool in_support = true;
    std::vector<long long> avec = prune_fraction(q, xi, width, &in_support);
    if (!in_support) continue;
    std::vector<double> delta(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      delta[static_cast<std::size_t>(i)] = xi.xi[static_cast<std::size_t>(i)] -
                                           static_cast<double>(avec[static_cast<std::size_t>(i)]) /
                                               static_cast<double>(q);
    double zeta = bump_box(delta, block_scale);
    if (zeta == 0.0) continue;
    std::complex<double> sum_a = 0;
    for (long long a = q == 1 ? 0 : 1; a < std::max<long long>(q, 1); ++a) {
      if (q > 1 && expsum::gcd_ll(a, q) != 1) continue;
      sum_a += complete_sum_cached(q, a, avec);
    }
    out.large_divisor += sum_a * zeta * dsig(N, delta);
  }
  return out;
}

double Engine::verify_decomposition(long long N, int j, const std::vector<TorusPoint>& samples) {
  long long Qj = block_modulus(j);
  double worst = 0;
  for (const TorusPoint& xi : samples) {
    std::complex<double> lhs = mollified_approximant(N, Qj, xi);
    std::complex<double> rhs = 0;
    for (int l = 0; l < j; ++l) rhs += major_arc_block(N, l, xi);
    ErrorTerms errs = error_terms(N, j, xi);
    rhs += errs.bump_difference + errs.large_divisor;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

MultiplierReport Engine::approximation_error_sweep(
    const std::vector<const lattice::PointCloud*>& clouds, std::uint64_t grid_seed,
    int grid_points) {
  if (clouds.empty()) throw DimensionMismatch("need at least one cloud");
  int n = form_.n_vars();
  MultiplierReport report;
  report.grid_seed = grid_seed;
  report.grid_points = grid_points;

  TorusSequence seq(n, grid_seed);
  std::vector<TorusPoint> grid;
  grid.reserve(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) grid.push_back(TorusPoint::reduce(seq.point(static_cast<std::uint64_t>(k))));

  // frequency-zero normalization row (independent of the radius)
  {
    TorusPoint zero;
    zero.xi.assign(static_cast<std::size_t>(n), 0.0);
    std::complex<double> approx = 0;
    for (int l = 0; l <= config_.l_max; ++l) approx += major_arc_block(clouds[0]->radius, l, zero);
    report.zero_error = std::abs(1.0 - approx);
  }

  for (const lattice::PointCloud* cloud : clouds) {
    long long N = cloud->radius;
    std::vector<double> errs(grid.size());
    parallel_for(grid.size(), [&](std::size_t gi) {
      const TorusPoint& xi = grid[gi];
      double exact = exact_multiplier(*cloud, xi);
      std::complex<double> approx = 0;
      for (int l = 0; l <= config_.l_max; ++l) approx += major_arc_block(N, l, xi);
      errs[gi] = std::abs(exact - approx);
    });
    MultiplierReport::Row row;
    row.N = N;
    row.sup_error = 0;
    std::size_t argmax = 0;
    for (std::size_t gi = 0; gi < errs.size(); ++gi) {
      if (errs[gi] > row.sup_error) {
        row.sup_error = errs[gi];
        argmax = gi;
      }
    }
    row.argmax_xi = grid[argmax].xi;
    report.per_radius.push_back(std::move(row));
    report.radii.push_back(N);
  }

  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < report.per_radius.size(); ++i)
    if (!(report.per_radius[i].sup_error < report.per_radius[i - 1].sup_error))
      report.strictly_decreasing = false;

  std::vector<double> xs, ys;
  for (const auto& row : report.per_radius) {
    if (row.sup_error > 0) {
      xs.push_back(std::log(static_cast<double>(row.N)));
      ys.push_back(std::log(row.sup_error));
    }
  }
  if (xs.size() >= 2) report.delta_hat = -lattice::least_squares_slope(xs, ys, nullptr, nullptr);
  return report;
}

// ---------------------------------------------------------------------------
// Convolution kernel of the single-modulus multiplier
// ---------------------------------------------------------------------------

namespace {

// in-place DFT along each axis of a q^n cube: out[r] = sum_avec v[avec] e(-r.avec/q)
void residue_dft(std::vector<std::complex<double>>& values, long long q, int n) {
  std::size_t total = values.size();
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(q));
  for (long long k = 0; k < q; ++k)
    twiddle[static_cast<std::size_t>(k)] =
        unit_phase(-static_cast<double>(k) / static_cast<double>(q));
  std::vector<std::complex<double>> line(static_cast<std::size_t>(q));
  std::size_t stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    std::size_t block = stride * static_cast<std::size_t>(q);
    for (std::size_t start = 0; start < total; start += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (long long r = 0; r < q; ++r) {
          std::complex<double> acc = 0;
          for (long long s = 0; s < q; ++s) {
            std::size_t idx = start + off + static_cast<std::size_t>(s) * stride;
            acc += values[idx] * twiddle[static_cast<std::size_t>((r * s) % q)];
          }
          line[static_cast<std::size_t>(r)] = acc;
        }
        for (long long r = 0; r < q; ++r)
          values[start + off + static_cast<std::size_t>(r) * stride] =
              line[static_cast<std::size_t>(r)];
      }
    }
    stride = block;
  }
}

}  // namespace

std::complex<double> Engine::kernel_value(long long q, const std::vector<long long>& y) {
  int n = form_.n_vars();
  if (static_cast<int>(y.size()) != n) throw DimensionMismatch("kernel point arity mismatch");

  const std::vector<std::complex<double>>* table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = kernel_residue_cache_.find(q);
    table = it == kernel_residue_cache_.end() ? nullptr : &it->second;
  }
  if (table == nullptr) {
    // residue table: for every shift class r, sum over (a, avec) of the
    // complete sum times e(-r.avec/q), assembled as an n-dimensional DFT
    std::uint64_t cube = 1;
    for (int i = 0; i < n; ++i) {
      cube *= static_cast<std::uint64_t>(q);
      if (cube > 50000000ull) throw BudgetExceeded("kernel residue cube too large");
    }
    std::vector<std::complex<double>> acc(static_cast<std::size_t>(cube), 0.0);
    std::vector<std::complex<double>> values(static_cast<std::size_t>(cube));
    for (long long a = 0; a < q; ++a) {
      std::vector<long long> avec(static_cast<std::size_t>(n), 0);
      for (std::size_t idx = 0; idx < cube; ++idx) {
        values[idx] = complete_sum_cached(q, a, avec);
        int axis = n - 1;
        while (axis >= 0) {
          std::size_t ui = static_cast<std::size_t>(axis);
          if (avec[ui] + 1 < q) {
            ++avec[ui];
            break;
          }
          avec[ui] = 0;
          --axis;
        }
      }
      residue_dft(values, q, n);
      for (std::size_t idx = 0; idx < cube; ++idx) acc[idx] += values[idx];
    }
    std::lock_guard<std::mutex> lock(mu_);
    table = &kernel_residue_cache_.emplace(q, std::move(acc)).first->second;
  }

  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    long long r = ((y[static_cast<std::size_t>(i)] % q) + q) % q;
    idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(r);
  }
  double qq = static_cast<double>(q) * static_cast<double>(q);
  double prod = 1.0;
  for (int i = 0; i < n; ++i)
    prod *= bump_transform_1d(static_cast<double>(y[static_cast<std::size_t>(i)]) / qq);
  double norm = std::pow(qq, -n);
  return (*table)[idx] * prod * norm;
}

double Engine::kernel_l1_norm(long long q, long long radius) {
  int n = form_.n_vars();
  if (radius <= 0) radius = 40 * q * q;

  // touch the residue table
  std::vector<long long> origin(static_cast<std::size_t>(n), 0);
  kernel_value(q, origin);
  const std::vector<std::complex<double>>* table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    table = &kernel_residue_cache_.at(q);
  }

  double qq = static_cast<double>(q) * static_cast<double>(q);
  auto norm_at = [&](long long R) {
    // column sums per residue class of the bump-transform factor
    std::vector<double> columns(static_cast<std::size_t>(q), 0.0);
    for (long long r = 0; r < q; ++r) {
      Kahan col;
      for (long long y = -R; y <= R; ++y) {
        if (((y % q) + q) % q != r) continue;
        col.add(std::fabs(bump_transform_1d(static_cast<double>(y) / qq)));
      }
      columns[static_cast<std::size_t>(r)] = col.sum;
    }
    // fold the residue table against the product of column sums
    Kahan total;
    std::vector<long long> rvec(static_cast<std::size_t>(n), 0);
    std::size_t cube = table->size();
    for (std::size_t idx = 0; idx < cube; ++idx) {
      double prod = std::abs((*table)[idx]);
      if (prod != 0) {
        for (int i = 0; i < n; ++i)
          prod *= columns[static_cast<std::size_t>(rvec[static_cast<std::size_t>(i)])];
        total.add(prod);
      }
      int axis = n - 1;
      while (axis >= 0) {
        std::size_t ui = static_cast<std::size_t>(axis);
        if (rvec[ui] + 1 < q) {
          ++rvec[ui];
          break;
        }
        rvec[ui] = 0;
        --axis;
      }
    }
    return total.sum * std::pow(qq, -n);
  };

  double at_radius = norm_at(radius);
  double at_double = norm_at(2 * radius);
  if (std::fabs(at_double - at_radius) > 0.01 * std::fabs(at_radius))
    throw TruncationTooSmall("kernel tail beyond radius " + std::to_string(radius) +
                             " exceeds 1% of the norm");
  return at_radius;
}

}  // namespace birchmax::multiplier
