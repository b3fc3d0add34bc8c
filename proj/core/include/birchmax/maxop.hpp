#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "birchmax/forms.hpp"
#include "birchmax/lattice.hpp"

namespace birchmax::maxop {

// Finitely supported complex function on the integer lattice: sorted sparse
// (point, value) records plus the bounding box.
struct GridFunction {
  int dim = 0;
  std::vector<std::int32_t> box_lo, box_hi;
  std::vector<std::int32_t> pts;  // flat, dim entries per record, lex sorted
  std::vector<std::complex<double>> vals;

  std::size_t size() const { return dim == 0 ? 0 : pts.size() / dim; }
  std::span<const std::int32_t> point(std::size_t i) const {
    return {pts.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::complex<double> value_at(std::span<const std::int32_t> p) const;

  static GridFunction delta(int dim);  // unit mass at the origin
  static GridFunction from_entries(int dim,
                                   std::vector<std::pair<std::vector<std::int32_t>,
                                                         std::complex<double>>> entries);
};

double lp_norm(const GridFunction& f, double p);  // p >= 1 or infinity

enum class ConvStrategy { Auto, DirectSparse, Fft };

// Normalized average over the cloud: convolution of f with the probability
// mass on the cloud points. Auto switches to zero-padded FFT convolution when
// the direct sparse sum is more expensive and the padded box fits memory.
GridFunction apply_average(const lattice::PointCloud& cloud, const GridFunction& f,
                           ConvStrategy strategy = ConvStrategy::Auto);

struct MaxOpResult {
  GridFunction result;               // pointwise max of |averages|
  std::vector<long long> radii_used;
};

// Pointwise supremum of |average at radius r| over the given dyadic clouds.
MaxOpResult apply_maximal(const std::vector<const lattice::PointCloud*>& clouds,
                          const GridFunction& f, ConvStrategy strategy = ConvStrategy::Auto);

// sup over every integer radius in [lo, hi] of |average of f at y|, computed
// from the radius profile without materializing clouds (f sparse).
double window_sup_at(const Form& form, const std::vector<long long>& radius_counts,
                     const GridFunction& f, std::span<const std::int32_t> y, long long lo,
                     long long hi);

struct PartialSumRow {
  int k = 0;                 // box exponent: sums over |y| <= 2^k
  double l1 = 0;
  double l15 = 0;
  double l1_increment = 0;
  double l15_increment = 0;
};

// Point-mass experiment: partial l^1 and l^1.5 sums of the maximal function
// of the delta at the origin over growing dyadic boxes. cloud must cover
// radius 2^k_max; radius_counts must cover the dyadic radii.
std::vector<PartialSumRow> point_mass_partial_sums(const lattice::PointCloud& cloud,
                                                   const std::vector<long long>& radius_counts,
                                                   int k_max);

struct WindowMaxRow {
  long long n0 = 0;
  double lower_bound = 0;   // on the lp operator norm of the windowed maximal op
  std::string best_trial;
  double best_ratio = 0;
};

// Lower bounds on the window-restricted maximal operator norm, maximizing the
// ratio over seeded trial functions (delta, cloud patches, random sparse).
// Output norms are restricted to a deterministic finite window of evaluation
// points, so every reported number is a certified lower bound only.
std::vector<WindowMaxRow> window_max_lower_bounds(const Form& form, double p,
                                                  const std::vector<long long>& n0_list,
                                                  int trials, std::uint64_t seed,
                                                  const lattice::EnumBudget& budget = {});

// Text round-trip: header "n lo1 hi1 ... lon hin", then point/value records.
void save_grid(const GridFunction& f, std::ostream& out);
GridFunction load_grid(std::istream& in);

}  // namespace birchmax::maxop
