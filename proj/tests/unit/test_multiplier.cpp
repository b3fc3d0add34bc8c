#include "birchmax/multiplier.hpp"

#include <cmath>

#include "birchmax/expsum.hpp"
#include "birchmax/lattice.hpp"
#include "birchmax/rng.hpp"
#include "doctest.h"

using namespace birchmax;
using namespace birchmax::multiplier;

namespace {

const char* kDeskForm = "x1^2+x2^2+x3^2-x4^2-x5^2";

ApproxConfig quick_config() {
  ApproxConfig cfg;
  cfg.shell.eps = 0.1;
  cfg.shell.tol = 1e-3;
  cfg.dsig_tol = 1e-3;
  return cfg;
}

}  // namespace

TEST_SUITE("multiplier") {
  TEST_CASE("torus reduction") {
    TorusPoint p = TorusPoint::reduce({0.5, -0.5, 1.25, -2.75, 0.0});
    CHECK(p.xi[0] == -0.5);
    CHECK(p.xi[1] == -0.5);
    CHECK(p.xi[2] == doctest::Approx(0.25));
    CHECK(p.xi[3] == doctest::Approx(0.25));
    CHECK(p.xi[4] == 0.0);
    // integer shifts of exactly representable frequencies land on the
    // identical representative
    TorusPoint a = TorusPoint::reduce({0.3125, -0.40625});
    TorusPoint b = TorusPoint::reduce({0.3125 + 2.0, -0.40625 - 3.0});
    CHECK(a.xi[0] == b.xi[0]);
    CHECK(a.xi[1] == b.xi[1]);
  }

  TEST_CASE("narrow bump profile") {
    CHECK(bump_1d(0.0) == 1.0);
    CHECK(bump_1d(0.09) == 1.0);
    CHECK(bump_1d(0.21) == 0.0);
    CHECK(bump_1d(0.25) == 0.0);
    double v = bump_1d(0.15);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    double prev = 1.0;
    for (double t = 0.105; t < 0.2; t += 0.005) {
      double b = bump_1d(t);
      CHECK(b <= prev);
      prev = b;
    }
  }

  TEST_CASE("bump transform against a plain midpoint oracle") {
    for (double u : {0.0, 1.0, 4.5}) {
      double oracle = 0;
      int M = 40000;
      for (int i = 0; i < M; ++i) {
        double v = -0.2 + 0.4 * (i + 0.5) / M;
        oracle += bump_1d(v) * std::cos(2 * 3.14159265358979323846 * u * v) * 0.4 / M;
      }
      CHECK(bump_transform_1d(u) == doctest::Approx(oracle).epsilon(1e-6));
    }
    CHECK(bump_transform_1d(0.0) == doctest::Approx(0.3).epsilon(1e-6));
  }

  TEST_CASE("block moduli") {
    CHECK(block_modulus(1) == 2);
    CHECK(block_modulus(2) == 12);
    CHECK(block_modulus(3) == 840);
  }

  TEST_CASE("exact multiplier basics") {
    Form desk = Form::parse(kDeskForm);
    lattice::PointCloud cloud = lattice::enumerate_points(desk, 8);
    TorusPoint zero = TorusPoint::reduce(std::vector<double>(5, 0.0));
    CHECK(exact_multiplier(cloud, zero) == doctest::Approx(1.0).epsilon(1e-12));

    SplitMix64 rng(3);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> xi(5);
      for (auto& c : xi) c = rng.next_double() - 0.5;
      double v = exact_multiplier(cloud, TorusPoint::reduce(xi));
      CHECK(std::fabs(v) <= 1.0 + 1e-9);
    }

    // parity cross-check at the half-integer frequency
    TorusPoint half = TorusPoint::reduce({0.5, 0, 0, 0, 0});
    double v = exact_multiplier(cloud, half);
    long long signed_count = 0;
    for (std::size_t i = 0; i < cloud.count(); ++i)
      signed_count += (cloud.point(i)[0] % 2 == 0) ? 1 : -1;
    CHECK(v == doctest::Approx(static_cast<double>(signed_count) /
                               static_cast<double>(cloud.count()))
                   .epsilon(1e-9));

    // periodicity through the canonical representative
    TorusPoint shifted = TorusPoint::reduce({0.5 + 3.0, 0, -2.0, 0, 0});
    CHECK(exact_multiplier(cloud, shifted) == v);  // 0.5 is representable

    lattice::PointCloud empty;
    empty.dim = 5;
    CHECK_THROWS_AS(exact_multiplier(empty, zero), EmptyCloud);
  }

  TEST_CASE("normalization series fixtures") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    CHECK(eng.singular_series(15) == doctest::Approx(1.274691).epsilon(1e-5));
    CHECK(eng.singular_series(64) == doctest::Approx(1.324919).epsilon(1e-5));
    CHECK(eng.kappa() > 0);
    CHECK(eng.kappa() == doctest::Approx(1.1362e-2).epsilon(2e-3));
  }

  TEST_CASE("normalization tracks the box-weighted lattice density") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    oscillatory::ShellSpec box;
    box.eps = 0.1;
    box.tol = 1e-3;
    box.cutoff = oscillatory::CutoffKind::SharpBox;
    double density =
        oscillatory::surface_transform(desk, box, std::vector<double>(5, 0.0)).value.real();
    long long r = lattice::count_points(desk, 32);
    double ratio = static_cast<double>(r) * std::pow(32.0, -3.0) /
                   (eng.singular_series(64) * density);
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.15));
  }

  TEST_CASE("major arc blocks at and away from fractions") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    TorusPoint far = TorusPoint::reduce({0.37, 0.29, 0.41, 0.33, 0.47});
    for (int l = 0; l <= 3; ++l) CHECK(eng.major_arc_block(16, l, far) == std::complex<double>(0.0));

    TorusPoint zero = TorusPoint::reduce(std::vector<double>(5, 0.0));
    std::complex<double> m0 = eng.major_arc_block(16, 0, zero);
    double expected = eng.kappa() * eng.surface_mass();
    CHECK(std::abs(m0 - expected) < 1e-9 * std::fabs(expected));
    // the zero-frequency positivity of the single-modulus approximant
    std::complex<double> omega1 = eng.mollified_approximant(16, 1, zero);
    CHECK(omega1.real() > 0);
    CHECK(eng.mollified_approximant(16, 5, far) == std::complex<double>(0.0));
  }

  TEST_CASE("block sum at zero matches the series ratio") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    TorusPoint zero = TorusPoint::reduce(std::vector<double>(5, 0.0));
    std::complex<double> total = 0;
    for (int l = 0; l <= 3; ++l) total += eng.major_arc_block(16, l, zero);
    // the l <= 3 blocks cover moduli below 16, so the sum telescopes to
    // series(15) / series(64)
    double expected = eng.singular_series(15) / eng.singular_series(64);
    CHECK(total.real() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::fabs(1.0 - total.real()) < 0.1);
  }

  TEST_CASE("correction terms at zero") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    TorusPoint zero = TorusPoint::reduce(std::vector<double>(5, 0.0));
    Engine::ErrorTerms e = eng.error_terms(16, 1, zero);
    CHECK(e.bump_difference == std::complex<double>(0.0));  // both bumps equal one at zero
    // the desk form's even-modulus sums vanish at zero coordinates
    CHECK(std::abs(e.large_divisor) < 1e-12);

    Form prod = Form::parse("x1*x2");
    ApproxConfig pc = quick_config();
    pc.shell.h = 0.02;
    Engine peng(prod, pc);
    TorusPoint zero2 = TorusPoint::reduce({0.0, 0.0});
    Engine::ErrorTerms pe = peng.error_terms(8, 1, zero2);
    CHECK(pe.bump_difference == std::complex<double>(0.0));
    CHECK(std::abs(pe.large_divisor) > 1e-6);  // nonzero for the product form
  }

  TEST_CASE("decomposition identity on support-active samples") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    auto pts = decomposition_samples(desk, 1, 8, 4242);
    CHECK(eng.verify_decomposition(16, 1, pts) < 1e-8);

    Form prod = Form::parse("x1*x2");
    ApproxConfig pc = quick_config();
    pc.shell.h = 0.02;
    Engine peng(prod, pc);
    for (int j : {1, 2}) {
      auto ppts = decomposition_samples(prod, j, 8, 777);
      CHECK(peng.verify_decomposition(8, j, ppts) < 1e-8);
    }
  }

  TEST_CASE("kernel values and uniform l1 bounds") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());

    // q = 1: kernel is the bump transform itself
    std::complex<double> k0 = eng.kernel_value(1, {0, 0, 0, 0, 0});
    CHECK(k0.real() == doctest::Approx(std::pow(0.3, 5)).epsilon(1e-6));
    // the transform tail oscillates slowly, so three orders of decay is the
    // honest expectation at this distance
    std::complex<double> kfar = eng.kernel_value(1, {35, 0, 0, 0, 0});
    CHECK(std::abs(kfar) < 1e-3 * std::abs(k0));

    // q = 2: supported on the residue classes solving the form
    std::complex<double> on = eng.kernel_value(2, {1, 1, 0, 1, 1});
    std::complex<double> off = eng.kernel_value(2, {1, 0, 0, 0, 0});
    CHECK(std::abs(off) < 1e-12);
    double qq = 4.0;
    double expected = 2.0 * std::pow(qq, -5.0) * bump_transform_1d(1 / qq) *
                      bump_transform_1d(1 / qq) * bump_transform_1d(0.0) *
                      bump_transform_1d(1 / qq) * bump_transform_1d(1 / qq);
    CHECK(on.real() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::fabs(on.imag()) < 1e-12);

    // l1 norms stay below one recorded constant across the moduli
    const double kRecordedUniformBound = 14.0;
    double l1_q2 = 0, l1_q4 = 0;
    for (long long q : {1LL, 2LL, 3LL, 4LL, 6LL}) {
      double l1 = eng.kernel_l1_norm(q);
      CHECK(l1 <= kRecordedUniformBound);
      CHECK(l1 > 1.0);
      if (q == 2) l1_q2 = l1;
      if (q == 4) l1_q4 = l1;
    }
    CHECK(l1_q4 / l1_q2 < 3.0);
    CHECK(l1_q2 / l1_q4 < 3.0);

    // q = 1 lattice sum against the continuum integral of |transform|
    double l1_q1 = eng.kernel_l1_norm(1, 100);
    double integral = 0;
    int M = 200000;
    for (int i = 0; i < M; ++i) {
      double u = -100.0 + 200.0 * (i + 0.5) / M;
      integral += std::fabs(bump_transform_1d(u)) * 200.0 / M;
    }
    // measured lattice-vs-continuum gap is 2.4 percent (kinks of |transform|
    // at its zeros keep the two sums from agreeing more closely)
    CHECK(l1_q1 == doctest::Approx(std::pow(integral, 5)).epsilon(0.04));

    CHECK_THROWS_AS(eng.kernel_l1_norm(2, 8), TruncationTooSmall);
  }

  TEST_CASE("small approximation sweep is monotone") {
    Form desk = Form::parse(kDeskForm);
    Engine eng(desk, quick_config());
    lattice::PointCloud c8 = lattice::enumerate_points(desk, 8);
    lattice::PointCloud c16 = lattice::enumerate_points(desk, 16);
    MultiplierReport rep = eng.approximation_error_sweep({&c8, &c16}, 20240817, 80);
    REQUIRE(rep.per_radius.size() == 2);
    CHECK(rep.per_radius[0].sup_error > rep.per_radius[1].sup_error);
    CHECK(rep.zero_error < 0.1);
    CHECK(rep.per_radius[0].sup_error < 0.2);
  }
}
