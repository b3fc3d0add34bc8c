#include "birchmax/oscillatory.hpp"

#include <cmath>

#include "birchmax/rng.hpp"
#include "doctest.h"

using namespace birchmax;
using namespace birchmax::oscillatory;

namespace {

const char* kDeskForm = "x1^2+x2^2+x3^2-x4^2-x5^2";

ShellSpec product_form_spec() {
  ShellSpec spec;
  spec.scale = 1;
  spec.h = 0.02;
  spec.path = ShellPath::Reference;
  return spec;
}

}  // namespace

TEST_SUITE("oscillatory") {
  TEST_CASE("cutoff profile") {
    CHECK(cutoff_1d(0.0) == 1.0);
    CHECK(cutoff_1d(0.999) == 1.0);
    CHECK(cutoff_1d(-1.0) == 1.0);
    CHECK(cutoff_1d(2.0) == 0.0);
    CHECK(cutoff_1d(2.5) == 0.0);
    double prev = 1.0;
    for (double t = 1.05; t < 2.0; t += 0.05) {
      double v = cutoff_1d(t);
      CHECK(v > 0.0);
      CHECK(v <= prev);
      prev = v;
    }
    CHECK(cutoff_box({0.5, -0.5}, 1.0) == 1.0);
    CHECK(cutoff_box({2.1, 0.0}, 1.0) == 0.0);
  }

  TEST_CASE("reference path is hermitian and deterministic") {
    Form prod = Form::parse("x1*x2");
    ShellSpec spec = product_form_spec();
    std::vector<double> xi{0.35, -0.6};
    TransformSample a = surface_transform(prod, spec, xi);
    TransformSample b = surface_transform(prod, spec, {-0.35, 0.6});
    CHECK(a.value.real() == doctest::Approx(b.value.real()).epsilon(1e-12));
    CHECK(a.value.imag() == doctest::Approx(-b.value.imag()).epsilon(1e-12));
    TransformSample c = surface_transform(prod, spec, xi);
    CHECK(a.value == c.value);  // bitwise reproducible
    CHECK(a.error_estimate == c.error_estimate);
  }

  TEST_CASE("richardson residual shrinks as the shell is refined") {
    // the residual contract is meaningful where the gradient weight is
    // integrable (the regular five-variable form); it is driven by the shell
    // half-width, which the step couples into through the h^(2/3) default
    Form desk = Form::parse(kDeskForm);
    SplitMix64 rng(31);
    for (int s = 0; s < 3; ++s) {
      std::vector<double> xi(5);
      for (auto& c : xi) c = 0.4 * (rng.next_double() - 0.5);
      ShellSpec spec;
      spec.scale = 1;
      spec.tol = 5e-4;
      double prev = std::numeric_limits<double>::infinity();
      for (double eps : {0.4, 0.2, 0.1}) {
        spec.eps = eps;
        double residual = surface_transform(desk, spec, xi).error_estimate;
        CHECK(residual < prev);
        prev = residual;
      }
    }
  }

  TEST_CASE("factorized path reproduces the frozen mass value") {
    // independent semi-analytic quadrature (exact innermost coordinate)
    // extrapolated over the shell pair (0.2, 0.1) gives 66.4054
    Form desk = Form::parse(kDeskForm);
    ShellSpec spec;
    spec.scale = 1;
    spec.eps = 0.2;
    spec.tol = 1e-3;
    TransformSample mass = surface_transform(desk, spec, std::vector<double>(5, 0.0));
    CHECK(mass.value.real() == doctest::Approx(66.4054).epsilon(2e-3));
    CHECK(std::fabs(mass.value.imag()) < 1e-9);
    CHECK(mass.value.real() > 0);
  }

  TEST_CASE("factorized and reference paths agree within their estimates") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec fact;
    fact.scale = 1;
    fact.eps = 0.4;
    fact.tol = 1e-3;
    ShellSpec ref;
    ref.scale = 1;
    ref.h = 0.125;
    ref.eps = 0.4;
    ref.path = ShellPath::Reference;
    for (const std::vector<double>& xi :
         {std::vector<double>{0, 0, 0, 0, 0}, std::vector<double>{0.3, -0.2, 0.1, 0.05, -0.15}}) {
      TransformSample a = surface_transform(desk, fact, xi);
      TransformSample b = surface_transform(desk, ref, xi);
      CHECK(std::abs(a.value - b.value) <= 3.0 * (a.error_estimate + b.error_estimate) + 1e-6);
    }
  }

  TEST_CASE("factorized hermitian symmetry") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec spec;
    spec.scale = 1;
    spec.eps = 0.2;
    spec.tol = 1e-3;
    std::vector<double> xi{0.4, 0.1, -0.3, 0.2, 0.6};
    std::vector<double> neg(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) neg[i] = -xi[i];
    TransformSample a = surface_transform(desk, spec, xi);
    TransformSample b = surface_transform(desk, spec, neg);
    CHECK(std::abs(a.value - std::conj(b.value)) <= a.error_estimate + b.error_estimate + 1e-6);
  }

  TEST_CASE("rescaling identity") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec base;
    base.eps = 0.05;
    base.tol = 2e-4;
    // N = 1 compares an evaluation against itself
    CHECK(verify_scaling(desk, 1, {{0.2, 0.1, -0.3, 0.05, 0.0}}, base) == 0.0);
    SplitMix64 rng(404);
    std::vector<std::vector<double>> xis;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> xi(5);
      double norm2 = 0;
      for (auto& c : xi) {
        c = 2 * rng.next_double() - 1;
        norm2 += c * c;
      }
      double s = rng.next_double() / std::sqrt(norm2);
      for (auto& c : xi) c *= s;
      xis.push_back(xi);
    }
    CHECK(verify_scaling(desk, 2, xis, base) < 5e-2);
  }

  TEST_CASE("ray decay on the desk form") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec spec;
    spec.scale = 1;
    spec.eps = 0.1;
    spec.tol = 1e-4;
    std::vector<double> dir{1.0, 0.7071, 1.0 / 3.0, 2.0 / 7.0, 0.2};
    RayDecayFit fit = ray_decay_fit(desk, dir, {5, 10, 20, 40}, spec);
    for (std::size_t i = 1; i < fit.values.size(); ++i) CHECK(fit.values[i] < fit.values[i - 1]);
    CHECK(fit.slope <= -1.3);
    CHECK_THROWS_AS(ray_decay_fit(desk, dir, {8}, spec), DegenerateFit);
    CHECK_THROWS_AS(ray_decay_fit(desk, {0, 0, 0, 0, 0}, {4, 8}, spec), DegenerateFit);
  }

  TEST_CASE("budget and residual guards") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec ref;
    ref.scale = 1;
    ref.h = 0.01;
    ref.path = ShellPath::Reference;
    CHECK_THROWS_AS(surface_transform(desk, ref, std::vector<double>(5, 0.0)), BudgetExceeded);

    ShellSpec strict;
    strict.scale = 1;
    strict.eps = 0.4;
    strict.tol = 1e-3;
    strict.max_residual = 1e-12;
    CHECK_THROWS_AS(surface_transform(desk, strict, std::vector<double>(5, 0.0)),
                    NonconvergentShell);

    ShellSpec bad;
    bad.scale = 0;
    CHECK_THROWS_AS(surface_transform(desk, bad, std::vector<double>(5, 0.0)), DimensionMismatch);
    Form prod = Form::parse("x1*x2");
    ShellSpec fact;
    fact.path = ShellPath::Factorized;
    CHECK_THROWS_AS(surface_transform(prod, fact, {0.0, 0.0}), DimensionMismatch);
  }

  TEST_CASE("sharp box density at zero is below the smooth-cutoff mass") {
    Form desk = Form::parse(kDeskForm);
    ShellSpec smooth;
    smooth.eps = 0.2;
    smooth.tol = 1e-3;
    ShellSpec box = smooth;
    box.cutoff = CutoffKind::SharpBox;
    double m = surface_transform(desk, smooth, std::vector<double>(5, 0.0)).value.real();
    double j = surface_transform(desk, box, std::vector<double>(5, 0.0)).value.real();
    CHECK(j > 0);
    CHECK(j < m);
  }
}
