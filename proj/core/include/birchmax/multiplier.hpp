#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "birchmax/forms.hpp"
#include "birchmax/lattice.hpp"
#include "birchmax/oscillatory.hpp"

namespace birchmax::multiplier {

// A frequency on the torus, componentwise reduced to [-1/2, 1/2).
struct TorusPoint {
  std::vector<double> xi;

  static TorusPoint reduce(std::vector<double> raw);
  int dim() const { return static_cast<int>(xi.size()); }
};

// Narrow smooth bump: 1 on [-1/10, 1/10], supported on [-1/5, 1/5],
// tensor-product in several variables.
double bump_1d(double t);
double bump_box(const std::vector<double>& t, double scale);
// Real-line Fourier transform of bump_1d (real and even).
double bump_transform_1d(double u);

// Smallest modulus divisible by every q < 2^j.
long long block_modulus(int j);

struct ApproxConfig {
  int series_q_max = 64;   // truncation of the normalization series
  int l_max = 3;           // dyadic blocks l = 0..l_max feed the approximant
  double kappa = 0;        // 0 = compute from the truncated series and the mass
  double dsig_tol = 2e-3;  // absolute tolerance of cached transform values
  oscillatory::ShellSpec shell;  // shared shell parameters (scale field unused)
};

struct MultiplierReport {
  std::vector<long long> radii;
  std::uint64_t grid_seed = 0;
  int grid_points = 0;
  struct Row {
    long long N = 0;
    double sup_error = 0;
    std::vector<double> argmax_xi;
  };
  std::vector<Row> per_radius;
  double zero_error = 0;   // |1 - approximant(0)|, radius-independent
  double delta_hat = 0;    // fitted decay exponent of the sup errors
  bool strictly_decreasing = false;
};

// Seeded frequency samples for exercising the block decomposition: a mix of
// uniform torus points and points placed inside the bump supports around
// fractions with denominators tied to the block modulus.
std::vector<TorusPoint> decomposition_samples(const Form& form, int j, int count,
                                              std::uint64_t seed);

// Exact multiplier of the normalized average: mean of e(x.xi) over the cloud.
// Provably real by the +-x symmetry; the residual imaginary part is checked
// against 1e-9 * count and discarded.
double exact_multiplier(const lattice::PointCloud& cloud, const TorusPoint& xi);

// Shared evaluation context: caches complete-sum values, transform samples
// and the computed normalization for one form.
class Engine {
 public:
  Engine(Form form, ApproxConfig config);

  const Form& form() const { return form_; }
  const ApproxConfig& config() const { return config_; }

  // Truncated normalization series: sum over q <= q_max, unit numerators, of
  // the zero-coordinate complete sums. Real by conjugate symmetry.
  double singular_series(int q_max);
  // Unit-scale transform at zero frequency (no normalization factor).
  double surface_mass();
  // Normalization making the approximant equal 1 at frequency zero up to the
  // series truncation.
  double kappa();

  // kappa * (unit-scale transform at N * eta), cached per (N, eta).
  std::complex<double> dsig(long long N, const std::vector<double>& eta);

  // Major-arc block l of the approximant at scale N (support-pruned).
  std::complex<double> major_arc_block(long long N, int l, const TorusPoint& xi);

  // Mollified approximant at modulus q with bump scale q^2 (full residue
  // sums, support-pruned to the single nearby fraction).
  std::complex<double> mollified_approximant(long long N, long long q, const TorusPoint& xi);

  // The two correction terms of the block decomposition at index j.
  struct ErrorTerms {
    std::complex<double> bump_difference;  // within-block bump mismatch
    std::complex<double> large_divisor;    // divisors >= 2^j of the block modulus
  };
  ErrorTerms error_terms(long long N, int j, const TorusPoint& xi);

  // Max |approximant - (blocks + corrections)| over the samples; the identity
  // is algebraic, so this checks the divisor/unit bookkeeping numerically.
  double verify_decomposition(long long N, int j, const std::vector<TorusPoint>& samples);

  // Sup error |exact - sum of blocks| per radius over a seeded grid, plus the
  // zero-frequency normalization row and a fitted decay exponent.
  MultiplierReport approximation_error_sweep(const std::vector<const lattice::PointCloud*>& clouds,
                                             std::uint64_t grid_seed, int grid_points);

  // Convolution kernel of the single-modulus multiplier (bump at scale q^2):
  // closed form via the bump transform. radius 0 = default 40*q^2.
  std::complex<double> kernel_value(long long q, const std::vector<long long>& y);
  // l1 norm over the box |y| <= radius, with a tail check at twice the radius;
  // throws TruncationTooSmall when the tail exceeds 1% of the accumulated norm.
  double kernel_l1_norm(long long q, long long radius = 0);

  std::complex<double> complete_sum_cached(long long q, long long a,
                                           const std::vector<long long>& avec);

 private:
  std::vector<long long> prune_fraction(long long q, const TorusPoint& xi, double width,
                                        bool* in_support) const;

  Form form_;
  ApproxConfig config_;
  double kappa_ = 0;
  double mass_ = 0;
  bool kappa_ready_ = false;
  bool mass_ready_ = false;
  std::mutex mu_;
  std::map<std::vector<long long>, std::complex<double>> sum_cache_;
  // keyed by the exact double bits of the scaled argument
  std::map<std::vector<double>, std::complex<double>> dsig_cache_;
  std::map<long long, std::vector<std::complex<double>>> kernel_residue_cache_;
};

}  // namespace birchmax::multiplier
