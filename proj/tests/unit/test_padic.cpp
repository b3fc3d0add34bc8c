#include "birchmax/padic.hpp"

#include "birchmax/expsum.hpp"

#include "birchmax/rng.hpp"
#include "doctest.h"

using namespace birchmax;
using namespace birchmax::padic;

namespace {

const char* kDeskForm = "x1^2+x2^2+x3^2-x4^2-x5^2";

// independent oracle over the full residue cube, exact arithmetic
BigInt oracle_count(const Form& form, long long q) {
  int n = form.n_vars();
  std::vector<long long> s(static_cast<std::size_t>(n), 0);
  BigInt count = 0;
  while (true) {
    BigInt v = form.evaluate(s) % q;
    if (v == 0) ++count;
    int axis = n - 1;
    while (axis >= 0) {
      std::size_t ui = static_cast<std::size_t>(axis);
      if (s[ui] + 1 < q) {
        ++s[ui];
        break;
      }
      s[ui] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return count;
}

}  // namespace

TEST_SUITE("padic") {
  TEST_CASE("direct counts match the exhaustive oracle") {
    Form prod = Form::parse("x1*x2");
    CHECK(count_solutions_direct(prod, 1).count == 1);
    CHECK(count_solutions_direct(prod, 2).count == 3);
    CHECK(oracle_count(prod, 2) == 3);
    CHECK(count_solutions_direct(prod, 3).count == 5);
    CHECK(oracle_count(prod, 3) == 5);

    Form desk = Form::parse(kDeskForm);
    BigInt q3 = oracle_count(desk, 3);
    CHECK(count_solutions_direct(desk, 3).count == q3);
    CHECK(count_solutions_direct(desk, 4).count == oracle_count(desk, 4));
    CHECK(count_solutions_direct(desk, 2).count == 16);
  }

  TEST_CASE("character-sum route reproduces the direct counts") {
    Form prod = Form::parse("x1*x2");
    Form desk = Form::parse(kDeskForm);
    for (long long q = 1; q <= 16; ++q) {
      CHECK(count_solutions_characters(prod, q).count == count_solutions_direct(prod, q).count);
      CHECK(count_solutions_characters(desk, q).count == count_solutions_direct(desk, q).count);
    }
  }

  TEST_CASE("crt route multiplies prime-power counts") {
    Form prod = Form::parse("x1*x2");
    CHECK(count_solutions_crt(prod, 6).count == 15);  // 3 * 5
    Form desk = Form::parse(kDeskForm);
    for (long long q : {7LL, 9LL, 12LL, 18LL, 30LL}) {
      CHECK(count_solutions_crt(desk, q).count == count_solutions_direct(desk, q).count);
      CHECK(count_solutions_crt(prod, q).count == count_solutions_direct(prod, q).count);
    }
  }

  TEST_CASE("multiplicativity on coprime pairs") {
    Form desk = Form::parse(kDeskForm);
    for (long long q1 = 2; q1 <= 8; ++q1) {
      for (long long q2 = q1 + 1; q1 * q2 <= 40; ++q2) {
        if (expsum::gcd_ll(q1, q2) != 1) continue;
        CHECK(count_solutions_direct(desk, q1 * q2).count ==
              count_solutions_direct(desk, q1).count * count_solutions_direct(desk, q2).count);
      }
    }
  }

  TEST_CASE("normalized sweep basics") {
    Form desk = Form::parse(kDeskForm);
    CountSweep one = normalized_count_sweep(desk, 1);
    CHECK(one.max_ratio == doctest::Approx(1.0));
    CountSweep sweep = normalized_count_sweep(desk, 50);
    CHECK(sweep.max_ratio > 0);
    CHECK(sweep.max_ratio <= 4.0);
    CHECK(sweep.rows.size() == 50);

    Form prod = Form::parse("x1*x2");
    CountSweep ps = normalized_count_sweep(prod, 50);
    CHECK(ps.max_ratio >= 1.0);
  }

  TEST_CASE("prime-power pullback identity for the character sums") {
    Form desk = Form::parse(kDeskForm);
    for (long long p : {2LL, 3LL, 5LL}) CHECK(prime_power_reduction_discrepancy(desk, p, 3) < 1e-8);
    Form prod = Form::parse("x1*x2");
    for (long long p : {2LL, 3LL, 5LL}) CHECK(prime_power_reduction_discrepancy(prod, p, 3) < 1e-8);
  }

  TEST_CASE("liftable witnesses") {
    Form desk = Form::parse(kDeskForm);
    auto w3 = hensel_witness(desk, 3);
    REQUIRE(w3.has_value());
    CHECK(w3->level == 0);
    // certified: value vanishes mod 3, gradient does not
    std::vector<long long> pt = w3->point;
    BigInt v = desk.evaluate(pt) % 3;
    if (v < 0) v += 3;
    CHECK(v == 0);
    bool grad_nonzero = false;
    for (const auto& g : desk.gradient(pt)) {
      BigInt r = g % 3;
      if (r != 0) grad_nonzero = true;
    }
    CHECK(grad_nonzero);

    // even prime: the quadratic gradient forces a depth-one certificate
    auto w2 = hensel_witness(desk, 2);
    REQUIRE(w2.has_value());
    CHECK(w2->level == 1);
    BigInt v8 = desk.evaluate(w2->point) % 8;
    if (v8 < 0) v8 += 8;
    CHECK(v8 == 0);

    // a double line has no liftable zero at 2
    Form sq = Form::parse("x1^2", 2);
    CHECK_FALSE(hensel_witness(sq, 2).has_value());
  }

  TEST_CASE("factorization helper") {
    auto f60 = factorize(60);
    REQUIRE(f60.size() == 3);
    CHECK(f60[0] == std::make_pair(2LL, 2));
    CHECK(f60[1] == std::make_pair(3LL, 1));
    CHECK(f60[2] == std::make_pair(5LL, 1));
    CHECK(factorize(1).empty());
  }

  TEST_CASE("budget refusal") {
    Form desk = Form::parse(kDeskForm);
    CountBudget tiny{100};
    CHECK_THROWS_AS(count_solutions_direct(desk, 7, tiny), BudgetExceeded);
  }
}
