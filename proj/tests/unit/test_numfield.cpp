#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wsc/numfield.hpp"

using namespace wsc;
using testing_support::golden_field;
using testing_support::random_element;

TEST_CASE("golden field: rho*rho + rho == 1") {
  auto f = golden_field();
  const FieldElement rho = FieldElement::generator(f);
  CHECK(rho * rho + rho == FieldElement::one(f));
  CHECK(rho + FieldElement::zero(f) == rho);
}

TEST_CASE("rationals: 2/3 * 3/4 == 1/2") {
  auto q = AlgebraicField::rationals();
  CHECK(FieldElement::rational(q, mpq_class(2, 3)) * FieldElement::rational(q, mpq_class(3, 4)) ==
        FieldElement::rational(q, mpq_class(1, 2)));
}

TEST_CASE("golden field comparisons") {
  auto f = golden_field();
  const FieldElement rho = FieldElement::generator(f);
  const FieldElement half = FieldElement::rational(f, mpq_class(1, 2));
  CHECK(compare(rho, half) > 0);
  CHECK(compare(rho, rho) == 0);
  CHECK(compare(rho * rho, FieldElement::one(f) - rho) == 0);
  // rho^3 = 2 rho - 1 by repeated reduction
  CHECK(rho.pow(3) == rho * FieldElement::rational(f, 2) - FieldElement::one(f));
  // A difference of 1e-30 is still resolved.
  const FieldElement tiny = FieldElement::rational(f, mpq_class(mpz_class(1), mpz_class("1000000000000000000000000000000")));
  CHECK(rho + tiny > rho);
  CHECK(rho - tiny < rho);
}

TEST_CASE("embed returns certified narrow enclosures") {
  auto f = golden_field();
  const RationalInterval r = FieldElement::generator(f).embed(20);
  CHECK(r.width() <= mpq_class(1, 1 << 20));
  CHECK(r.lo_double() <= 0.6180339887498949);
  CHECK(r.hi_double() >= 0.6180339887498948);
  const RationalInterval z = FieldElement::zero(f).embed(40);
  CHECK(z.lo == 0);
  CHECK(z.hi == 0);
  auto q = AlgebraicField::rationals();
  CHECK(FieldElement::rational(q, mpq_class(1, 3)).embed(10).contains(mpq_class(1, 3)));
}

TEST_CASE("field axioms on random elements") {
  std::mt19937_64 g(7);
  for (auto f : {golden_field(), AlgebraicField::create({-2, 0, 0, 1}, mpq_class(1), mpq_class(2))}) {
    for (int trial = 0; trial < 200; ++trial) {
      const FieldElement a = random_element(g, f), b = random_element(g, f), c = random_element(g, f);
      CHECK((a + b) + c == a + (b + c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK((a * b) * c == a * (b * c));
      if (!a.is_zero()) CHECK(a * a.inverse() == FieldElement::one(f));
    }
  }
}

TEST_CASE("compare is a total order consistent with embed") {
  std::mt19937_64 g(11);
  auto f = AlgebraicField::create({-2, 0, 0, 1}, mpq_class(1), mpq_class(2));  // cube root of 2
  for (int trial = 0; trial < 300; ++trial) {
    const FieldElement a = random_element(g, f, 5), b = random_element(g, f, 5);
    const auto ab = compare(a, b), ba = compare(b, a);
    CHECK((ab < 0) == (ba > 0));
    CHECK((ab == 0) == (a == b));
    for (long bits : {8L, 32L, 64L}) {
      const RationalInterval ea = a.embed(bits), eb = b.embed(bits);
      if (ea.hi < eb.lo) CHECK(ab < 0);
      if (eb.hi < ea.lo) CHECK(ab > 0);
    }
    CHECK(std::fabs(a.to_double() - (a.coeffs()[0].get_d() + a.coeffs()[1].get_d() * std::cbrt(2.0) +
                                     a.coeffs()[2].get_d() * std::cbrt(4.0))) < 1e-9);
  }
}

TEST_CASE("field construction rejects bad input") {
  CHECK_THROWS_AS(AlgebraicField::create({-1, 1, 1}, mpq_class(-2), mpq_class(1)), FieldError);  // two roots
  CHECK_THROWS_AS(AlgebraicField::create({-1, 1, 2}, mpq_class(0), mpq_class(1)), FieldError);   // not monic
  CHECK_THROWS_AS(FieldElement::zero(golden_field()).inverse(), FieldError);
  CHECK_THROWS(parse_rational("1/0"));
  CHECK(parse_rational("-6/8") == mpq_class(-3, 4));
}

TEST_CASE("sturm counts roots") {
  const QPoly p{mpq_class(-2), mpq_class(0), mpq_class(1)};  // x^2 - 2
  CHECK(poly::sturm_count(p, -2, 2) == 2);
  CHECK(poly::sturm_count(p, 0, 2) == 1);
  CHECK(poly::sturm_count(p, 2, 3) == 0);
}
