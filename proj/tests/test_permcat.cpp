#include <catch2/catch.hpp>

#include <random>

#include "cantorperm/permcat.hpp"
#include "oracles.hpp"

using namespace cantorperm;

namespace {

const MeasureSpec kMeasures[] = {MeasureSpec::mu(), MeasureSpec::nu()};

Rational frac(long p, unsigned long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Random matrix y_object(a) -> y_object(b) with about `terms` X-strata.
PermMatrix random_y(std::mt19937_64& rng, const MeasureSpec& m, std::size_t a, std::size_t b, int terms) {
  StratumVector x;
  std::uint64_t span = std::uint64_t{1} << (a * b);
  for (int t = 0; t < terms; ++t) x[1 + rng() % (span - 1)] += static_cast<long>(rng() % 7) - 3;
  std::erase_if(x, [](const auto& kv) { return kv.second == 0; });
  return from_x_coefficients(m, {a}, {b}, x);
}

/// Random matrix between arbitrary objects, on a random subset of ample strata.
PermMatrix random_matrix(std::mt19937_64& rng, const MeasureSpec& m, const PermObject& src, const PermObject& tgt) {
  PermMatrix out(m, src, tgt);
  for (std::size_t j = 0; j < tgt.size(); ++j)
    for (std::size_t i = 0; i < src.size(); ++i)
      for (const auto& d : enumerate_ample({tgt.pieces[j].size, src.pieces[i].size}))
        if (rng() % 4 == 0) out.add(j, i, d.mask().to_u64(), frac(static_cast<long>(rng() % 9) - 4, 1 + rng() % 3));
  return out;
}

PermObject concat(std::initializer_list<PermObject> parts) {
  PermObject out;
  for (const auto& p : parts) out.pieces.insert(out.pieces.end(), p.pieces.begin(), p.pieces.end());
  return out;
}

std::map<std::uint64_t, oracle::Q> as_q(const StratumVector& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("Y-objects list non-empty subsets, larger first", "[permcat]") {
  auto y2 = y_object({2});
  REQUIRE(y2.size() == 3);
  CHECK(y2.pieces[0].tag->mask() == BitMask(0b11ULL));
  CHECK(y2.pieces[1].tag->mask() == BitMask(0b01ULL));
  CHECK(y2.pieces[2].tag->mask() == BitMask(0b10ULL));
  CHECK(y_object({1}).size() == 1);
  CHECK(y_object({0}).size() == 0);
  CHECK(y_object({3}).size() == 7);
}

TEST_CASE("indicator matrices", "[permcat]") {
  for (const auto& m : kMeasures) {
    auto diag = indicator_matrix(m, {2}, {2}, ProductSubset({2, 2}, BitMask(0b1001ULL)), Basis::Y);
    CHECK(diag == identity_matrix(m, y_object({2})));
    auto single = indicator_matrix(m, {2}, {2}, ProductSubset({2, 2}, BitMask(0b0010ULL)), Basis::Y);
    CHECK(single.entry_count() == 1);
    CHECK(single.get(1, 2, 1) == 1);  // X({1}) -> X({0})
    auto full = indicator_matrix(m, {2}, {2}, ProductSubset::full({2, 2}), Basis::Y);
    CHECK(full.entry_count() == 15);
    CHECK(x_coefficients(full).size() == 15);
    CHECK(indicator_matrix(m, {2}, {2}, ProductSubset({2, 2}, BitMask()), Basis::Y).is_zero());
    CHECK(indicator_matrix(m, {2}, {2}, ProductSubset({2, 2}, BitMask(0b0011ULL)), Basis::X).entry_count() == 1);
    CHECK_THROWS_AS(indicator_matrix(m, {2}, {2}, ProductSubset({2, 2}, BitMask()), Basis::X), ArgumentError);
    CHECK_THROWS_AS(indicator_matrix(m, {2}, {3}, ProductSubset({2, 2}, BitMask(1ULL)), Basis::Y), ArgumentError);
  }
}

TEST_CASE("basis conversion", "[permcat][property]") {
  CHECK(convert_basis({{0b1011, 1}}, BasisDirection::to_X).size() == 7);
  CHECK(convert_basis({}, BasisDirection::to_X).empty());
  CHECK_THROWS_AS(convert_basis({{0, 1}}, BasisDirection::to_X), ArgumentError);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    StratumVector v;
    for (int t = 0; t < 6; ++t) v[1 + rng() % 511] += frac(static_cast<long>(rng() % 9) - 4, 1 + rng() % 4);
    std::erase_if(v, [](const auto& kv) { return kv.second == 0; });
    CHECK(convert_basis(convert_basis(v, BasisDirection::to_X), BasisDirection::to_Y) == v);
    CHECK(convert_basis(convert_basis(v, BasisDirection::to_Y), BasisDirection::to_X) == v);
  }
}

TEST_CASE("identity matrices", "[permcat]") {
  auto id = identity_matrix(MeasureSpec::mu(), x_object(2));
  CHECK(id.entry_count() == 1);
  CHECK(id.get(0, 0, 0b1001) == 1);
  CHECK(identity_matrix(MeasureSpec::mu(), PermObject{}).is_zero());
  CHECK(identity_matrix(MeasureSpec::nu(), y_object({2})).entry_count() == 3);
}

TEST_CASE("matrices reject non-ample strata", "[permcat]") {
  PermMatrix m(MeasureSpec::mu(), x_object(2), x_object(2));
  CHECK_THROWS_AS(m.add(0, 0, 0b0011, 1), ArgumentError);
  CHECK_THROWS_AS(m.add(1, 0, 0b1001, 1), ArgumentError);
  m.add(0, 0, 0b1001, 2);
  m.add(0, 0, 0b1001, -2);
  CHECK(m.is_zero());
}

TEST_CASE("composition examples", "[permcat]") {
  auto e01 = indicator_matrix(MeasureSpec::nu(), {2}, {2}, ProductSubset({2, 2}, BitMask(0b0010ULL)), Basis::Y);
  for (auto mode : {ComposeMode::oracle, ComposeMode::lemma, ComposeMode::fast}) CHECK(compose(e01, e01, mode).is_zero());
  std::mt19937_64 rng(1);
  for (const auto& m : kMeasures) {
    auto a = random_y(rng, m, 2, 3, 10);
    for (auto mode : {ComposeMode::oracle, ComposeMode::lemma, ComposeMode::fast}) {
      CHECK(compose(identity_matrix(m, y_object({3})), a, mode) == a);
      CHECK(compose(a, identity_matrix(m, y_object({2})), mode) == a);
    }
  }
}

TEST_CASE("composition matches the defining triple sum", "[permcat][property]") {
  std::mt19937_64 rng(2);
  const std::size_t shapes[][3] = {{2, 2, 2}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1}, {1, 3, 2}, {3, 2, 2}, {2, 3, 2}, {2, 2, 3}};
  for (const auto& m : kMeasures)
    for (const auto& s : shapes) {
      std::size_t nc = s[0], nb = s[1], na = s[2];
      auto a = random_y(rng, m, na, nb, 5);
      auto b = random_y(rng, m, nb, nc, 5);
      auto want = oracle::compose_global(as_q(x_coefficients(b)), as_q(x_coefficients(a)), nc, nb, na, m.alpha());
      for (auto mode : {ComposeMode::oracle, ComposeMode::lemma, ComposeMode::fast})
        CHECK(as_q(x_coefficients(compose(b, a, mode))) == want);
    }
}

TEST_CASE("composition routes agree on single strata", "[permcat][property]") {
  for (const auto& m : kMeasures)
    for (std::size_t nc = 1; nc <= 2; ++nc)
      for (std::size_t nb = 1; nb <= 3; ++nb)
        for (std::size_t na = 1; na <= 2; ++na)
          for (const auto& e : enumerate_ample({nc, nb}))
            for (const auto& d : enumerate_ample({nb, na})) {
              PermMatrix b(m, x_object(nb), x_object(nc)), a(m, x_object(na), x_object(nb));
              b.add(0, 0, e.mask().to_u64(), 1);
              a.add(0, 0, d.mask().to_u64(), 1);
              auto o = compose(b, a, ComposeMode::oracle);
              CHECK(o == compose(b, a, ComposeMode::lemma));
              CHECK(o == compose(b, a, ComposeMode::fast));
            }
}

TEST_CASE("push-forward support equals the semiring product", "[permcat][property]") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << (n * n)); ++e)
      for (std::uint64_t d = 0; d < (std::uint64_t{1} << (n * n)); ++d) {
        CHECK(pushforward_support(e, d, n, n, n, FiberMode::odd) == detail::semiring_product(e, d, n, n, n, true));
        CHECK(pushforward_support(e, d, n, n, n, FiberMode::nonempty) == detail::semiring_product(e, d, n, n, n, false));
      }
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t nc = 1 + rng() % 4, nb = 1 + rng() % 4, na = 1 + rng() % 4;
    std::uint64_t e = rng() & ((std::uint64_t{1} << (nc * nb)) - 1), d = rng() & ((std::uint64_t{1} << (nb * na)) - 1);
    CHECK(pushforward_support(e, d, nc, nb, na, FiberMode::odd) == detail::semiring_product(e, d, nc, nb, na, true));
    CHECK(pushforward_support(e, d, nc, nb, na, FiberMode::nonempty) ==
          detail::semiring_product(e, d, nc, nb, na, false));
  }
}

TEST_CASE("composition is associative", "[permcat][property]") {
  std::mt19937_64 rng(5);
  for (const auto& m : kMeasures)
    for (int trial = 0; trial < 6; ++trial) {
      auto a = random_y(rng, m, 2, 3, 8), b = random_y(rng, m, 3, 2, 8), c = random_y(rng, m, 2, 3, 8);
      CHECK(compose(compose(c, b), a) == compose(c, compose(b, a)));
      auto a2 = random_y(rng, m, 2, 2, 5), b2 = random_y(rng, m, 2, 2, 5), c2 = random_y(rng, m, 2, 2, 5);
      CHECK(compose(compose(c2, b2, ComposeMode::oracle), a2, ComposeMode::oracle) ==
            compose(c2, compose(b2, a2, ComposeMode::oracle), ComposeMode::oracle));
    }
}

TEST_CASE("composition and tensor are bilinear", "[permcat][property]") {
  std::mt19937_64 rng(6);
  Rational s(-3, 2);
  for (const auto& m : kMeasures) {
    auto a1 = random_y(rng, m, 2, 2, 6), a2 = random_y(rng, m, 2, 2, 6), b = random_y(rng, m, 2, 2, 6);
    CHECK(compose(b, a1 + a2) == compose(b, a1) + compose(b, a2));
    CHECK(compose(b + a2, a1) == compose(b, a1) + compose(a2, a1));
    CHECK(compose(s * b, a1) == s * compose(b, a1));
    auto x1 = random_matrix(rng, m, x_object(2), x_object(1)), x2 = random_matrix(rng, m, x_object(2), x_object(1));
    auto y = random_matrix(rng, m, x_object(1), x_object(2));
    CHECK(tensor_matrix(x1 + x2, y) == tensor_matrix(x1, y) + tensor_matrix(x2, y));
    CHECK(tensor_matrix(x1, s * y) == s * tensor_matrix(x1, y));
  }
}

TEST_CASE("tensor products", "[permcat]") {
  CHECK(tensor_object(x_object(2), x_object(2)).size() == 7);
  CHECK(tensor_object(x_object(2), x_object(3)).size() == 25);
  std::mt19937_64 rng(8);
  for (const auto& m : kMeasures) {
    auto mat = random_matrix(rng, m, y_object({2}), concat({x_object(3), x_object(1)}));
    auto id1 = identity_matrix(m, unit_object());
    CHECK(reindex(tensor_matrix(mat, id1), mat.source(), mat.target()) == mat);
    CHECK(reindex(tensor_matrix(id1, mat), mat.source(), mat.target()) == mat);
  }
  CHECK_THROWS_AS(tensor_matrix(identity_matrix(MeasureSpec::mu(), x_object(1)), identity_matrix(MeasureSpec::nu(), x_object(1))),
                  ArgumentError);
}

TEST_CASE("duality", "[permcat]") {
  auto [ev, coev] = diagonal_duality(MeasureSpec::mu(), x_object(2));
  CHECK(unit_scalar(compose(ev, coev, ComposeMode::oracle)) == -2);
  auto [ev1, coev1] = duality_data(MeasureSpec::nu(), unit_object());
  CHECK(ev1.get(0, 0, 1) == 1);
  CHECK(coev1.get(0, 0, 1) == 1);
  CHECK(ev1.entry_count() == 1);
  auto whole = duality_data(MeasureSpec::mu(), y_object({2}));
  CHECK(whole.ev.source().size() == tensor_pieces(y_object({2}), y_object({2})).size());
  CHECK(whole.ev.entry_count() == 3);
}

TEST_CASE("snake identities", "[permcat]") {
  for (const auto& m : kMeasures) {
    for (std::size_t n = 1; n <= 3; ++n) {
      auto obj = x_object(n);
      auto [s1, s2] = snake_composites(m, obj);
      CHECK(s1 == identity_matrix(m, obj));
      CHECK(s2 == identity_matrix(m, obj));
    }
    auto y2 = y_object({2});
    auto [s1, s2] = snake_composites(m, y2);
    CHECK(s1 == identity_matrix(m, y2));
    CHECK(s2 == identity_matrix(m, y2));
  }
}

TEST_CASE("trace examples", "[permcat]") {
  CHECK(trace(identity_matrix(MeasureSpec::mu(), y_object({3}))) == 1);
  auto swap = indicator_matrix(MeasureSpec::nu(), {2}, {2}, ProductSubset({2, 2}, BitMask(0b0110ULL)), Basis::Y);
  CHECK(trace(swap) == 0);
  CHECK(trace(swap, TraceMode::closed_form) == 0);
  CHECK(trace(zero_matrix(MeasureSpec::mu(), y_object({2}), y_object({2}))) == 0);
  CHECK_THROWS_AS(trace(zero_matrix(MeasureSpec::mu(), y_object({2}), y_object({1}))), ArgumentError);
}

TEST_CASE("trace modes agree and traces are cyclic", "[permcat][property]") {
  std::mt19937_64 rng(9);
  for (const auto& m : kMeasures) {
    for (int trial = 0; trial < 4; ++trial) {
      auto e = random_y(rng, m, 2, 2, 8);
      CHECK(trace(e) == trace(e, TraceMode::closed_form));
      auto x = random_matrix(rng, m, concat({x_object(3), x_object(2)}), concat({x_object(3), x_object(2)}));
      CHECK(trace(x) == trace(x, TraceMode::closed_form));
      auto a = random_y(rng, m, 2, 3, 10), b = random_y(rng, m, 3, 2, 10);
      auto ab = compose(a, b), ba = compose(b, a);
      CHECK(trace(ab) == trace(ba));
      CHECK(trace(ab) == trace(ab, TraceMode::closed_form));
      CHECK(trace(ba) == trace(ba, TraceMode::closed_form));
    }
  }
}

TEST_CASE("dimension equals the measure of the underlying G-set", "[permcat][property]") {
  for (const auto& m : kMeasures) {
    for (std::size_t n = 1; n <= 4; ++n) CHECK(dimension(m, x_object(n)) == m.power(static_cast<long>(n) - 1));
    for (std::size_t n = 0; n <= 3; ++n)
      CHECK(dimension(m, y_object({n})) == y_measure(m, n, YMeasureMethod::closed_form));
    auto mixed = concat({x_object(4), x_object(1), x_object(2), x_object(2)});
    CHECK(dimension(m, mixed) == eval_measure(m, underlying_gset(mixed)));
  }
  CHECK(dimension(MeasureSpec::mu(), y_object({2})) == 0);
  CHECK(dimension(MeasureSpec::nu(), y_object({2})) == 1);
}

TEST_CASE("composition errors", "[permcat]") {
  auto a = identity_matrix(MeasureSpec::mu(), y_object({2}));
  CHECK_THROWS_AS(compose(a, identity_matrix(MeasureSpec::nu(), y_object({2}))), ArgumentError);
  CHECK_THROWS_AS(compose(a, identity_matrix(MeasureSpec::mu(), y_object({3}))), ArgumentError);
  PermMatrix big(MeasureSpec::mu(), x_object(5), x_object(5));
  big.add(0, 0, (std::uint64_t{1} << 25) - 1, 1);
  CHECK_THROWS_AS(compose(big, big, ComposeMode::oracle), CapacityError);
}
