#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "birchmax/forms.hpp"

namespace birchmax::oscillatory {

// Smooth cutoff: 1 on [-1, 1], exp(1 - 1/(1 - (|t|-1)^2)) on 1 < |t| < 2,
// 0 beyond. The tensor product of this profile is the box cutoff used by the
// surface measure.
double cutoff_1d(double t);
double cutoff_box(const std::vector<double>& x, double scale);

enum class ShellPath { Auto, Reference, Factorized };

// Smooth: the tensor cutoff (1 on [-N,N], supported on [-2N,2N]).
// SharpBox: the indicator of [-N,N]^n, giving the box-weighted level density
// that the raw lattice counts track.
enum class CutoffKind { Smooth, SharpBox };

// Parameters of the thin-shell transform evaluation.
//
// The computed object is (2 eps)^-1 * integral over {|p(x)| < eps} of
// phi(x/N) e(x.xi) dx, Richardson-extrapolated over (eps, eps/2); in the
// eps -> 0 limit this is the Fourier transform of the gradient-weighted
// surface measure on {p = 0} cut off at scale N.
struct ShellSpec {
  long long scale = 1;          // N
  double h = 0.05;              // midpoint grid step (reference path)
  double eps = 0;               // shell half-width; 0 means the h^(2/3) default
  double tol = 1e-3;            // target absolute accuracy (factorized path)
  double max_residual = std::numeric_limits<double>::infinity();
  std::uint64_t cell_budget = 250000000;
  ShellPath path = ShellPath::Auto;
  CutoffKind cutoff = CutoffKind::Smooth;

  double effective_eps() const;
};

struct TransformSample {
  std::vector<double> xi;
  std::complex<double> value;
  double error_estimate = 0;  // Richardson residual plus quadrature refinement delta
};

// Evaluate the cutoff surface-measure transform at one frequency. The
// reference path is full-dimensional midpoint quadrature of the shell; the
// factorized path (diagonal forms) evaluates the same finite-eps quantity
// through its one-dimensional frequency factorization. Throws BudgetExceeded
// and, when max_residual is finite, NonconvergentShell.
TransformSample surface_transform(const Form& form, const ShellSpec& spec,
                                  const std::vector<double>& xi);

// Max relative discrepancy of the exact rescaling identity between the
// unit-scale transform at N*xi and N^(d-n) times the scale-N transform at xi.
double verify_scaling(const Form& form, long long N,
                      const std::vector<std::vector<double>>& xis, const ShellSpec& base);

struct RayDecayFit {
  std::vector<double> magnitudes;
  std::vector<double> values;  // |transform| at magnitude * direction
  std::vector<double> errors;
  double slope = 0;
};

// Slope of log |transform(t * direction)| against log t.
RayDecayFit ray_decay_fit(const Form& form, const std::vector<double>& direction,
                          const std::vector<double>& magnitudes, const ShellSpec& spec);

}  // namespace birchmax::oscillatory
