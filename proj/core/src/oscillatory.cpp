#include "birchmax/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "birchmax/lattice.hpp"
#include "birchmax/numeric.hpp"
#include "birchmax/parallel.hpp"

namespace birchmax::oscillatory {

double cutoff_1d(double t) {
  double a = std::fabs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  double u = a - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double cutoff_box(const std::vector<double>& x, double scale) {
  double prod = 1.0;
  for (double c : x) {
    prod *= cutoff_1d(c / scale);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

double ShellSpec::effective_eps() const { return eps > 0 ? eps : std::pow(h, 2.0 / 3.0); }

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on the Legendre
// recurrence. Deterministic to the last bit for a fixed order.
struct GaussRule {
  std::vector<double> nodes, weights;
};

const GaussRule& gauss_rule(int order) {
  static GaussRule cache[3];
  static const int orders[3] = {8, 16, 24};
  int slot = order <= 8 ? 0 : (order <= 16 ? 1 : 2);
  GaussRule& rule = cache[slot];
  int m = orders[slot];
  if (!rule.nodes.empty()) return rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (m + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double sinc(double z) {
  if (std::fabs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

// ---------------------------------------------------------------------------
// Reference path: midpoint quadrature of the shell indicator, both shell
// widths accumulated in one sweep, streamed with per-level partial sums.
// ---------------------------------------------------------------------------

struct StreamedForm {
  // monomials grouped by their deepest variable
  struct Mono {
    double coeff;
    std::vector<std::pair<int, int>> powers;  // (var, exp)
    int deepest;
  };
  int n;
  std::vector<std::vector<Mono>> by_level;

  explicit StreamedForm(const Form& form) : n(form.n_vars()), by_level(static_cast<std::size_t>(form.n_vars())) {
    for (const auto& [exps, c] : form.monomials()) {
      Mono m;
      m.coeff = c.convert_to<double>();
      m.deepest = 0;
      for (int v = 0; v < n; ++v) {
        if (exps[v] > 0) {
          m.powers.emplace_back(v, exps[v]);
          m.deepest = v;
        }
      }
      by_level[static_cast<std::size_t>(m.deepest)].push_back(std::move(m));
    }
  }
};

struct ReferenceResult {
  std::complex<double> coarse;  // shell width eps
  std::complex<double> fine;    // shell width eps/2
};

ReferenceResult reference_shell_sums(const Form& form, const ShellSpec& spec,
                                     const std::vector<double>& xi) {
  int n = form.n_vars();
  double N = static_cast<double>(spec.scale);
  bool sharp = spec.cutoff == CutoffKind::SharpBox;
  double half_box = sharp ? N : 2.0 * N;
  long long cells_per_axis = std::llround(std::ceil(2.0 * half_box / spec.h));
  if (cells_per_axis < 2) cells_per_axis = 2;
  double h = 2.0 * half_box / static_cast<double>(cells_per_axis);
  double eps = spec.effective_eps();

  double total_cells = 1.0;
  for (int i = 0; i < n; ++i) total_cells *= static_cast<double>(cells_per_axis);
  if (total_cells > static_cast<double>(spec.cell_budget))
    throw BudgetExceeded("shell quadrature needs " + std::to_string(total_cells) + " cells");

  StreamedForm stream(form);

  // parallel over the leading axis, deterministic slice merge
  std::size_t slices = static_cast<std::size_t>(cells_per_axis);
  std::vector<KahanComplex> slice_coarse(slices), slice_fine(slices);

  parallel_for(slices, [&](std::size_t slice) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> val(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> phase(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> cut(static_cast<std::size_t>(n) + 1, 1.0);
    std::vector<long long> k(static_cast<std::size_t>(n), 0);
    k[0] = static_cast<long long>(slice);

    auto set_level = [&](int level) {
      std::size_t ul = static_cast<std::size_t>(level);
      x[ul] = -half_box + (static_cast<double>(k[ul]) + 0.5) * h;
      double add = 0;
      for (const auto& m : stream.by_level[ul]) {
        double t = m.coeff;
        for (const auto& [v, e] : m.powers)
          for (int rep = 0; rep < e; ++rep) t *= x[static_cast<std::size_t>(v)];
        add += t;
      }
      val[ul + 1] = val[ul] + add;
      phase[ul + 1] = phase[ul] + x[ul] * xi[ul];
      cut[ul + 1] = cut[ul] * (sharp ? 1.0 : cutoff_1d(x[ul] / N));
    };

    for (int level = 0; level < n; ++level) set_level(level);
    KahanComplex coarse, fine;
    while (true) {
      double v = val[static_cast<std::size_t>(n)];
      double av = std::fabs(v);
      if (av < eps && cut[static_cast<std::size_t>(n)] != 0.0) {
        std::complex<double> w = cut[static_cast<std::size_t>(n)] * unit_phase(phase[static_cast<std::size_t>(n)]);
        coarse.add(w);
        if (av < 0.5 * eps) fine.add(w);
      }
      int axis = n - 1;
      while (axis >= 1) {
        std::size_t ui = static_cast<std::size_t>(axis);
        if (k[ui] + 1 < cells_per_axis) {
          ++k[ui];
          break;
        }
        k[ui] = 0;
        --axis;
      }
      if (axis < 1) break;
      for (int level = axis; level < n; ++level) set_level(level);
    }
    slice_coarse[slice] = coarse;
    slice_fine[slice] = fine;
  });

  double cell_volume = 1.0;
  for (int i = 0; i < n; ++i) cell_volume *= h;
  KahanComplex coarse, fine;
  for (std::size_t s = 0; s < slices; ++s) {
    coarse.add(slice_coarse[s].value());
    fine.add(slice_fine[s].value());
  }
  ReferenceResult out;
  out.coarse = coarse.value() * (cell_volume / (2.0 * eps));
  out.fine = fine.value() * (cell_volume / eps);
  return out;
}

// ---------------------------------------------------------------------------
// Factorized path for diagonal forms: the finite-shell average equals the
// integral over t of sinc(2 pi eps t) * prod_i I_i(t) with one-dimensional
// oscillatory factors I_i. The bulk zone is integrated directly on panels
// sized by phase-rate bounds (with magnitude probing to skip dead panels);
// the slowly-modulated tail is integrated by Filon-Legendre rules whose sine
// moments are exact via spherical Bessel values, so the sinc oscillation
// costs nothing. Panel layout is fixed a priori, so evaluation parallelizes
// deterministically.
// ---------------------------------------------------------------------------

struct FactorSpec {
  double coeff;
  double freq;  // xi_i
};

// One factor: integral over [-2N, 2N] of psi(x/N) e(coeff x^d t + x freq) dx.
// cycles_per_panel trades accuracy for speed (2 is near machine accuracy).
std::complex<double> factor_integral(const FactorSpec& fs, int degree, double N, double t,
                                     double cycles_per_panel, bool sharp) {
  double box = sharp ? N : 2.0 * N;
  double cycles = 2.0 * std::fabs(fs.coeff) * std::pow(box, degree) * std::fabs(t) +
                  2.0 * box * std::fabs(fs.freq);
  int panels = static_cast<int>(cycles / cycles_per_panel) + 2;
  const GaussRule& rule = gauss_rule(16);
  KahanComplex acc;
  double width = 2.0 * box / static_cast<double>(panels);
  for (int p = 0; p < panels; ++p) {
    double a = -box + width * static_cast<double>(p);
    double mid = a + 0.5 * width;
    double half = 0.5 * width;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      double x = mid + half * rule.nodes[g];
      double cut = sharp ? 1.0 : cutoff_1d(x / N);
      if (cut == 0.0) continue;
      double xd = 1.0;
      for (int k = 0; k < degree; ++k) xd *= x;
      acc.add(rule.weights[g] * half * cut * unit_phase(fs.coeff * xd * t + x * fs.freq));
    }
  }
  return acc.value();
}

// spherical Bessel j_0..j_kmax at x >= 0
void spherical_bessel(double x, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (x < 1e-10) {
    out[0] = 1.0;
    return;
  }
  if (x > kmax + 2) {
    // upward recurrence, stable for x above the order
    double j0 = std::sin(x) / x;
    double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    out[0] = j0;
    if (kmax >= 1) out[1] = j1;
    for (int k = 1; k < kmax; ++k)
      out[static_cast<std::size_t>(k) + 1] =
          (2 * k + 1) / x * out[static_cast<std::size_t>(k)] - out[static_cast<std::size_t>(k) - 1];
    return;
  }
  // Miller's downward recurrence
  int start = kmax + 20 + static_cast<int>(x);
  double fp = 0.0, fc = 1e-30;
  std::vector<double> tmp(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (int k = start; k >= 1; --k) {
    double fm = (2 * k + 1) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (k - 1 <= kmax) tmp[static_cast<std::size_t>(k - 1)] = fc;
    if (std::fabs(fc) > 1e200) {  // rescale to avoid overflow
      fp /= 1e200;
      fc /= 1e200;
      for (auto& v : tmp) v /= 1e200;
    }
  }
  double scale = (std::sin(x) / x) / tmp[0];
  for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = tmp[static_cast<std::size_t>(k)] * scale;
}

// Legendre values P_k(x), k = 0..kmax
void legendre_row(double x, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  out[0] = 1.0;
  if (kmax >= 1) out[1] = x;
  for (int k = 1; k < kmax; ++k)
    out[static_cast<std::size_t>(k) + 1] =
        ((2 * k + 1) * x * out[static_cast<std::size_t>(k)] - k * out[static_cast<std::size_t>(k) - 1]) / (k + 1);
}

// integral over [-1,1] of G(u) sin(alpha u + beta) du from Legendre
// coefficients of G: uses int P_k e^{i alpha u} du = 2 i^k j_k(alpha)
std::complex<double> filon_sine(const std::vector<std::complex<double>>& coeffs, double alpha,
                                double beta) {
  int kmax = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> bessel;
  spherical_bessel(std::fabs(alpha), kmax, bessel);
  std::complex<double> iplus = 0, iminus = 0;
  std::complex<double> ik = 1.0;  // i^k
  const std::complex<double> iunit(0.0, 1.0);
  double sign = alpha < 0 ? -1.0 : 1.0;
  for (int k = 0; k <= kmax; ++k) {
    double jk = bessel[static_cast<std::size_t>(k)];
    if (sign < 0 && (k % 2) == 1) jk = -jk;  // j_k odd/even parity in alpha
    iplus += coeffs[static_cast<std::size_t>(k)] * 2.0 * ik * jk;
    iminus += coeffs[static_cast<std::size_t>(k)] * 2.0 * std::conj(ik) * jk;
    ik *= iunit;
  }
  std::complex<double> eb = unit_phase(beta / kTwoPi);  // e^{i beta}
  return (eb * iplus - std::conj(eb) * iminus) / std::complex<double>(0.0, 2.0);
}

struct FactorizedResult {
  std::complex<double> coarse;
  std::complex<double> fine;
};

FactorizedResult factorized_shell_sums(const Form& form, const ShellSpec& spec,
                                       const std::vector<double>& xi, bool refine) {
  int n = form.n_vars();
  int d = form.degree();
  double N = static_cast<double>(spec.scale);
  double eps = spec.effective_eps();
  double pi = 3.14159265358979323846;

  std::vector<FactorSpec> factors;
  auto coeffs = form.diagonal_coefficients();
  for (int i = 0; i < n; ++i)
    factors.push_back({coeffs[static_cast<std::size_t>(i)].convert_to<double>(),
                       xi[static_cast<std::size_t>(i)]});

  bool sharp = spec.cutoff == CutoffKind::SharpBox;
  double box = sharp ? N : 2.0 * N;
  double moment = 2.0 * std::pow(box, d + 1) / static_cast<double>(d + 1);
  double cycles_per_panel = refine ? 1.3 : 2.0;
  double phase_budget = refine ? 0.8 : 1.5;

  auto g_of = [&](double t, double cpp) {
    std::complex<double> prod = 1.0;
    for (const auto& f : factors) prod *= factor_integral(f, d, N, t, cpp, sharp);
    return prod;
  };

  // rate bound on the product's variation, radians per unit t (without sinc)
  auto g_rate = [&](double t) {
    double r = 0;
    for (const auto& f : factors) {
      double smooth = kTwoPi * std::fabs(f.coeff) * moment;
      double tt = std::max(std::fabs(t), 1e-12);
      double stationary =
          f.freq * f.freq / (4.0 * std::max(std::fabs(f.coeff), 1e-12) * tt * tt) + 1.0 / tt;
      r += std::min(smooth, stationary);
    }
    return r;
  };

  auto envelope = [&](double t) {
    double e = 1.0;
    for (const auto& f : factors) {
      double osc = 2.5 / std::pow(std::max(std::fabs(f.coeff) * std::fabs(t), 1e-30), 1.0 / d);
      e *= std::min(box, osc);
    }
    return e;
  };

  double tol = std::max(spec.tol, 1e-10);
  double ratio = static_cast<double>(n) / static_cast<double>(d);

  // bulk/tail split: all stationary points interior past t0
  double t0 = 2.0;
  for (const auto& f : factors) {
    double thresh = std::fabs(f.freq) /
                    std::max(1e-12, static_cast<double>(d) * std::fabs(f.coeff) *
                                        std::pow(box, d - 1));
    t0 = std::max(t0, 1.2 * thresh);
  }

  // truncation: tail of envelope(t)/(pi eps t) past T
  double t_max = std::max(t0 * 1.5, 2.0 / (pi * eps));
  for (int iter = 0; iter < 400; ++iter) {
    double tail = 2.0 * envelope(t_max) / (pi * eps * ratio);
    if (tail < 0.2 * tol || t_max > 3e6) break;
    t_max *= 1.4;
  }

  // zone 1 panels: [0, t0], direct quadrature with the sinc weights
  std::vector<double> breaks{0.0};
  {
    double t = 0.0;
    while (t < t0) {
      double w = phase_budget / (g_rate(t) + kTwoPi * eps);
      w = std::max(w, 1e-4);
      w = std::min(w, 0.2 * std::max(t, 0.5));
      t += w;
      breaks.push_back(std::min(t, t0));
    }
  }
  std::size_t zone1_panels = breaks.size() - 1;

  // zone 2 panels: [t0, t_max], Filon with exact sine moments
  std::vector<double> tail_breaks{t0};
  {
    double t = t0;
    while (t < t_max) {
      double w = phase_budget / std::max(g_rate(t), 1e-9);
      w = std::max(w, 0.05 * t);
      w = std::min(w, 0.9 * t);
      t += w;
      tail_breaks.push_back(std::min(t, t_max));
    }
  }
  std::size_t zone2_panels = tail_breaks.size() - 1;

  const GaussRule& z1rule = gauss_rule(24);
  const GaussRule& z2rule = gauss_rule(16);
  static std::vector<std::vector<double>> legendre_cache;  // P_k at the 16 nodes
  {
    static std::mutex legendre_mu;
    std::lock_guard<std::mutex> lock(legendre_mu);
    if (legendre_cache.empty()) {
      legendre_cache.resize(z2rule.nodes.size());
      for (std::size_t i = 0; i < z2rule.nodes.size(); ++i)
        legendre_row(z2rule.nodes[i], 11, legendre_cache[i]);
    }
  }

  double probe_cut = tol / (8.0 * static_cast<double>(std::max<std::size_t>(zone1_panels, 1)));

  std::size_t jobs = 2 * (zone1_panels + zone2_panels);
  std::vector<std::complex<double>> coarse_parts(jobs, 0.0), fine_parts(jobs, 0.0);

  parallel_for(jobs, [&](std::size_t job) {
    std::size_t half = job / 2;
    double sign = (job % 2 == 0) ? 1.0 : -1.0;
    KahanComplex coarse, fine;
    if (half < zone1_panels) {
      double a = breaks[half], b = breaks[half + 1];
      double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
      // cheap probe: skip panels with negligible mass
      std::complex<double> probe = g_of(sign * mid, 8.0);
      if (std::abs(probe) * (b - a) < probe_cut) {
        coarse.add(probe * (b - a) * sinc(kTwoPi * eps * mid));
        fine.add(probe * (b - a) * sinc(pi * eps * mid));
      } else {
        for (std::size_t g = 0; g < z1rule.nodes.size(); ++g) {
          double tg = sign * (mid + hw * z1rule.nodes[g]);
          std::complex<double> val = g_of(tg, cycles_per_panel);
          double w = z1rule.weights[g] * hw;
          coarse.add(w * sinc(kTwoPi * eps * tg) * val);
          fine.add(w * sinc(pi * eps * tg) * val);
        }
      }
    } else {
      std::size_t p = half - zone1_panels;
      double a = tail_breaks[p], b = tail_breaks[p + 1];
      double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
      // Legendre coefficients of G(u) = g(t)/t at the 16 nodes
      std::vector<std::complex<double>> gu(z2rule.nodes.size());
      for (std::size_t i = 0; i < z2rule.nodes.size(); ++i) {
        double tg = sign * (mid + hw * z2rule.nodes[i]);
        gu[i] = g_of(tg, cycles_per_panel) / tg;
      }
      std::vector<std::complex<double>> coeffs_leg(12, 0.0);
      for (int k = 0; k <= 11; ++k) {
        std::complex<double> c = 0;
        for (std::size_t i = 0; i < z2rule.nodes.size(); ++i)
          c += z2rule.weights[i] * legendre_cache[i][static_cast<std::size_t>(k)] * gu[i];
        coeffs_leg[static_cast<std::size_t>(k)] = c * ((2.0 * k + 1.0) / 2.0);
      }
      // weight sin(2 pi e t)/(2 pi e t): integral h * G(u) sin(alpha u + beta) / (2 pi e)
      double alpha_c = kTwoPi * eps * hw * sign;
      double beta_c = kTwoPi * eps * mid * sign;
      coarse.add(hw * filon_sine(coeffs_leg, alpha_c, beta_c) / (kTwoPi * eps));
      double alpha_f = pi * eps * hw * sign;
      double beta_f = pi * eps * mid * sign;
      fine.add(hw * filon_sine(coeffs_leg, alpha_f, beta_f) / (pi * eps));
    }
    coarse_parts[job] = coarse.value();
    fine_parts[job] = fine.value();
  });

  KahanComplex coarse, fine;
  for (std::size_t j = 0; j < jobs; ++j) {
    coarse.add(coarse_parts[j]);
    fine.add(fine_parts[j]);
  }
  return {coarse.value(), fine.value()};
}

}  // namespace

TransformSample surface_transform(const Form& form, const ShellSpec& spec,
                                  const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != form.n_vars())
    throw DimensionMismatch("frequency arity mismatch");
  if (spec.scale < 1) throw DimensionMismatch("scale must be >= 1");

  ShellPath path = spec.path;
  if (path == ShellPath::Auto)
    path = form.is_diagonal() ? ShellPath::Factorized : ShellPath::Reference;
  if (path == ShellPath::Factorized && !form.is_diagonal())
    throw DimensionMismatch("factorized shell path needs a diagonal form");

  TransformSample sample;
  sample.xi = xi;

  std::complex<double> coarse, fine;
  double quad_delta = 0;
  if (path == ShellPath::Reference) {
    ReferenceResult r = reference_shell_sums(form, spec, xi);
    coarse = r.coarse;
    fine = r.fine;
  } else {
    FactorizedResult base = factorized_shell_sums(form, spec, xi, false);
    FactorizedResult refined = factorized_shell_sums(form, spec, xi, true);
    coarse = refined.coarse;
    fine = refined.fine;
    quad_delta = std::abs(((4.0 * refined.fine - refined.coarse) / 3.0) -
                          ((4.0 * base.fine - base.coarse) / 3.0));
  }

  sample.value = (4.0 * fine - coarse) / 3.0;
  sample.error_estimate = std::abs(fine - coarse) / 3.0 + quad_delta;
  if (sample.error_estimate > spec.max_residual)
    throw NonconvergentShell("shell residual " + std::to_string(sample.error_estimate));
  return sample;
}

double verify_scaling(const Form& form, long long N, const std::vector<std::vector<double>>& xis,
                      const ShellSpec& base) {
  int d = form.degree();
  int n = form.n_vars();
  double worst = 0;
  std::vector<double> results(xis.size());
  parallel_for(xis.size(), [&](std::size_t i) {
    const auto& xi = xis[i];
    std::vector<double> scaled(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) scaled[k] = static_cast<double>(N) * xi[k];
    ShellSpec unit = base;
    unit.scale = 1;
    ShellSpec at_n = base;
    at_n.scale = N;
    std::complex<double> lhs = surface_transform(form, unit, scaled).value;
    std::complex<double> rhs =
        std::pow(static_cast<double>(N), d - n) * surface_transform(form, at_n, xi).value;
    results[i] = std::abs(lhs - rhs) / (std::abs(lhs) + 1e-8);
  });
  for (double r : results) worst = std::max(worst, r);
  return worst;
}

RayDecayFit ray_decay_fit(const Form& form, const std::vector<double>& direction,
                          const std::vector<double>& magnitudes, const ShellSpec& spec) {
  if (magnitudes.size() < 2) throw DegenerateFit("need at least two magnitudes");
  double norm = 0;
  for (double c : direction) norm += c * c;
  norm = std::sqrt(norm);
  if (norm == 0) throw DegenerateFit("zero ray direction");

  RayDecayFit fit;
  fit.magnitudes = magnitudes;
  fit.values.resize(magnitudes.size());
  fit.errors.resize(magnitudes.size());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    std::vector<double> xi(direction.size());
    for (std::size_t k = 0; k < direction.size(); ++k)
      xi[k] = direction[k] / norm * magnitudes[i];
    TransformSample s = surface_transform(form, spec, xi);
    fit.values[i] = std::abs(s.value);
    fit.errors[i] = s.error_estimate;
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (fit.values[i] <= 0) throw DegenerateFit("vanishing transform value on the ray");
    xs.push_back(std::log(magnitudes[i]));
    ys.push_back(std::log(fit.values[i]));
  }
  fit.slope = lattice::least_squares_slope(xs, ys, nullptr, nullptr);
  return fit;
}

}  // namespace birchmax::oscillatory
