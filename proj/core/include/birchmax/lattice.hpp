#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "birchmax/forms.hpp"

namespace birchmax::lattice {

// The integral zero set of a form inside the cube of a given radius, stored
// as lexicographically sorted coordinate rows.
struct PointCloud {
  int dim = 0;
  long long radius = 0;
  std::vector<std::int32_t> coords;  // flat, dim entries per point

  std::size_t count() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const std::int32_t> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

enum class EnumStrategy { Auto, BruteForce, MeetInMiddle };

struct EnumBudget {
  std::uint64_t max_visits = 1000000000;
};

// Complete, duplicate-free enumeration. Auto picks meet-in-the-middle for
// diagonal forms and brute force otherwise.
PointCloud enumerate_points(const Form& form, long long radius,
                            EnumStrategy strategy = EnumStrategy::Auto,
                            const EnumBudget& budget = {});

// Count only; the meet-in-the-middle route never materializes points.
long long count_points(const Form& form, long long radius,
                       EnumStrategy strategy = EnumStrategy::Auto,
                       const EnumBudget& budget = {});

// r(N) for every N = 0..radius_max in one pass (shell-incremental).
std::vector<long long> radius_profile(const Form& form, long long radius_max,
                                      const EnumBudget& budget = {});

struct GrowthFit {
  std::vector<long long> radii;
  std::vector<long long> counts;
  double slope = 0;
  double residual = 0;  // rms residual of the log-log fit
};

// Least-squares slope of log count against log radius. Needs at least two
// radii and strictly positive counts.
GrowthFit growth_fit(const Form& form, const std::vector<long long>& radii,
                     EnumStrategy strategy = EnumStrategy::Auto, const EnumBudget& budget = {});
GrowthFit growth_fit_from_counts(const std::vector<long long>& radii,
                                 const std::vector<long long>& counts);

// Line-per-point integer text format.
void save_cloud(const PointCloud& cloud, std::ostream& out);
PointCloud load_cloud(std::istream& in, const Form& form);
void save_cloud_file(const PointCloud& cloud, const std::string& path);

// Least-squares slope helper shared by the fit routines.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double* intercept = nullptr, double* residual = nullptr);

}  // namespace birchmax::lattice
