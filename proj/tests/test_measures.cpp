#include <catch2/catch.hpp>

#include <algorithm>
#include <numeric>

#include "cantorperm/measures.hpp"
#include "oracles.hpp"

using namespace cantorperm;

namespace {

std::vector<std::vector<std::size_t>> surjections(std::size_t a, std::size_t c) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> t(a, 0);
  while (true) {
    if (SetMap(c, t).surjective()) out.push_back(t);
    std::size_t i = 0;
    while (i < a && ++t[i] == c) t[i++] = 0;
    if (i == a) break;
  }
  return out;
}

}  // namespace

TEST_CASE("measure values on X(n) and maps", "[measures]") {
  auto mu = MeasureSpec::mu(), nu = MeasureSpec::nu();
  CHECK(eval_measure(mu, FormalGSet::x(1)) == 1);
  CHECK(eval_measure(mu, FormalGSet::x(3)) == 4);
  CHECK(eval_measure(nu, FormalGSet::x(4)) == -1);
  CHECK(eval_measure(mu, FormalGSet()) == 0);
  GMap f(SetMap(1, {0, 0, 0}));
  CHECK(map_measure(mu, f) == 4);
  CHECK(map_measure(nu, f) == 1);
  CHECK_THROWS_AS(MeasureSpec::from_name("lambda"), ArgumentError);
  CHECK(MeasureSpec::from_name("nu") == nu);
}

TEST_CASE("map measure is multiplicative under composition", "[measures][property]") {
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()})
    for (std::size_t a = 1; a <= 5; ++a)
      for (std::size_t b = 1; b <= a; ++b)
        for (std::size_t c = 1; c <= b; ++c)
          for (const auto& f : surjections(a, b))
            for (const auto& g : surjections(b, c)) {
              std::vector<std::size_t> gf(a);
              for (std::size_t i = 0; i < a; ++i) gf[i] = g[f[i]];
              CHECK(map_measure(m, GMap(SetMap(c, gf))) ==
                    map_measure(m, GMap(SetMap(b, f))) * map_measure(m, GMap(SetMap(c, g))));
            }
  CHECK(map_measure(MeasureSpec::mu(), GMap(SetMap::identity(3))) == 1);
}

TEST_CASE("regularity identity on every surjection pair up to size 4", "[measures][property]") {
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()})
    for (std::size_t c = 1; c <= 4; ++c)
      for (std::size_t a = c; a <= 4; ++a)
        for (std::size_t b = c; b <= 4; ++b)
          for (const auto& f : surjections(a, c))
            for (const auto& g : surjections(b, c)) {
              auto z = x_product_decompose(GMap(SetMap(c, f)), GMap(SetMap(c, g)));
              CHECK(eval_measure(m, z) * m.power(static_cast<long>(c) - 1) ==
                    m.power(static_cast<long>(a) - 1) * m.power(static_cast<long>(b) - 1));
              CHECK(eval_measure(m, z) == oracle::profile_measure(oracle::fiber_product_profile(f, g), m.alpha()));
            }
}

TEST_CASE("regularity fails for other alphas", "[measures]") {
  for (long a : {1L, 2L, -3L}) {
    bool violated = false;
    for (const auto& c : regularity_constraints(3))
      if (c.polynomial(Rational(a)) != 0) violated = true;
    CHECK(violated);
  }
}

TEST_CASE("Y-measures: closed form equals decomposition", "[measures]") {
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()})
    for (std::size_t n = 0; n <= 8; ++n)
      CHECK(y_measure(m, n, YMeasureMethod::closed_form) == y_measure(m, n, YMeasureMethod::decompose));
  CHECK(y_measure(MeasureSpec::mu(), 3, YMeasureMethod::decompose) == 1);
  CHECK(y_measure(MeasureSpec::mu(), 4, YMeasureMethod::decompose) == 0);
  CHECK(y_measure(MeasureSpec::nu(), 5, YMeasureMethod::decompose) == 1);
  CHECK(y_measure(MeasureSpec::nu(), 0, YMeasureMethod::decompose) == 0);
}

TEST_CASE("quotient measure divides by the group order", "[measures]") {
  QuotientDescription s2(2, {{0, 1}, {1, 0}});
  CHECK(quotient_measure(MeasureSpec::mu(), s2) == -1);
  CHECK(quotient_measure(MeasureSpec::nu(), s2) == Rational(-1, 2));
  QuotientDescription c3(3, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
  CHECK(quotient_measure(MeasureSpec::mu(), c3) == Rational(4, 3));
}

TEST_CASE("polynomials", "[measures]") {
  Polynomial p({BigInt(2), BigInt(3), BigInt(1)});  // (a + 1)(a + 2)
  CHECK(p(Rational(-1)) == 0);
  CHECK(p.rational_roots() == std::set<Rational>{Rational(-2), Rational(-1)});
  Polynomial q({BigInt(0), BigInt(0), BigInt(-1), BigInt(2)});  // a^2 (2a - 1)
  CHECK(q.without_zero_roots() == Polynomial({BigInt(-1), BigInt(2)}));
  CHECK(q.rational_roots() == std::set<Rational>{Rational(0), Rational(1, 2)});
  CHECK((p - p).is_zero());
  CHECK_THROWS_AS(Polynomial().rational_roots(), ArgumentError);
}

TEST_CASE("regularity constraints come from live decompositions", "[measures]") {
  auto cs = regularity_constraints(3);
  REQUIRE(cs.size() == 5);
  for (const auto& c : cs) {
    if (c.same_point) {
      CHECK(c.polynomial == Polynomial({BigInt(2), BigInt(3), BigInt(1)}));
      CHECK(c.polynomial(Rational(1)) == 6);
      CHECK(c.polynomial(Rational(-2)) == 0);
    } else {
      CHECK(c.polynomial.is_zero());
    }
  }
  CHECK(solve_regular_parameters() == std::vector<Rational>{Rational(-2), Rational(-1)});
}

TEST_CASE("theta elements", "[measures]") {
  auto x1 = theta_of(FormalGSet::x(2));
  CHECK(x1 == ThetaElement(-2, -1));
  // x = 2 + 4x + x^2 coordinatewise
  auto two = ThetaElement(2, 2), four = ThetaElement(4, 4);
  auto rhs = theta_arith(theta_arith(two, theta_arith(four, x1, ThetaOp::mul), ThetaOp::add),
                         theta_arith(x1, x1, ThetaOp::mul), ThetaOp::add);
  CHECK(rhs == x1);
  CHECK(theta_of(QuotientDescription(2, {{0, 1}, {1, 0}})) == ThetaElement(-1, Rational(-1, 2)));
  CHECK_THROWS_AS(ThetaElement(Rational(1, 2), 0), IntegrityError);
  CHECK_NOTHROW(ThetaElement(Rational(1, 3), Rational(1, 2)));
}

TEST_CASE("theta is multiplicative on products", "[measures][property]") {
  for (std::size_t a = 1; a <= 3; ++a)
    for (std::size_t b = 1; b <= 3; ++b) {
      GMap f(SetMap(1, std::vector<std::size_t>(a, 0))), g(SetMap(1, std::vector<std::size_t>(b, 0)));
      CHECK(theta_of(x_product_decompose(f, g)) ==
            theta_arith(theta_of(FormalGSet::x(a)), theta_of(FormalGSet::x(b)), ThetaOp::mul));
    }
  ThetaElement zero(0, 0), one(1, 1), v(Rational(1, 3), 5);
  CHECK(theta_arith(zero, v, ThetaOp::add) == v);
  CHECK(theta_arith(one, v, ThetaOp::mul) == v);
}

TEST_CASE("c_n = (1/n!)((-2)^n, (-1)^n) is x1 times the S_n quotient", "[measures]") {
  auto x1 = theta_of(FormalGSet::x(2));
  Rational fact = 1;
  for (long n = 1; n <= 5; ++n) {
    fact *= n;
    ThetaElement c(rational_pow(-2, n) / fact, rational_pow(-1, n) / fact);
    CHECK(mpz_odd_p(c.mu().get_den_mpz_t()));
    std::vector<Permutation> sym;
    Permutation p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do sym.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    auto q = theta_of(QuotientDescription(static_cast<std::size_t>(n), sym));
    CHECK(theta_arith(x1, q, ThetaOp::mul) == c);
  }
}
