#include <catch2/catch.hpp>

#include <random>

#include "cantorperm/finsets.hpp"
#include "oracles.hpp"

using namespace cantorperm;

TEST_CASE("bitmask hex round trip and ordering", "[finsets]") {
  CHECK(BitMask().to_hex() == "0");
  CHECK(BitMask(0x1fULL).to_hex() == "1f");
  BitMask big;
  big.set(70);
  big.set(3);
  CHECK(big.to_hex() == "400000000000000008");
  CHECK(BitMask::from_hex(big.to_hex()) == big);
  CHECK(BitMask::from_hex("00ff") == BitMask(0xffULL));
  CHECK(BitMask(5ULL) < BitMask(6ULL));
  CHECK(BitMask(0xffULL) < big);
  CHECK_THROWS_AS(BitMask::from_hex("xyz"), ArgumentError);
}

TEST_CASE("tuple rank puts the last coordinate fastest", "[finsets]") {
  std::vector<std::size_t> sizes{2, 3};
  std::vector<std::size_t> t{1, 2};
  CHECK(tuple_rank(sizes, t) == 5);
  CHECK(tuple_unrank(sizes, 4) == std::vector<std::size_t>{1, 1});
  for (std::size_t r = 0; r < 6; ++r) CHECK(tuple_rank(sizes, tuple_unrank(sizes, r)) == r);
}

TEST_CASE("product subsets validate their masks", "[finsets]") {
  CHECK_THROWS_AS(ProductSubset({2, 2}, BitMask(0x10ULL)), ArgumentError);
  CHECK_THROWS_AS(ProductSubset({2, 0}, BitMask()), ArgumentError);
  auto s = ProductSubset::from_tuples({2, 2}, {{0, 0}, {1, 1}});
  CHECK(s.mask() == BitMask(0b1001ULL));
  CHECK(s.tuples() == std::vector<std::vector<std::size_t>>{{0, 0}, {1, 1}});
}

TEST_CASE("is_ample examples", "[finsets]") {
  CHECK(is_ample(ProductSubset({2, 2}, BitMask(0b1001ULL))));
  CHECK_FALSE(is_ample(ProductSubset({2, 2}, BitMask(0b0011ULL))));
  CHECK_FALSE(is_ample(ProductSubset({2, 2}, BitMask())));
  CHECK(is_ample(ProductSubset::full({3})));
  CHECK_FALSE(is_ample(ProductSubset({3}, BitMask(0b011ULL))));
}

TEST_CASE("projection of a subset", "[finsets]") {
  auto s = ProductSubset::from_tuples({2, 3, 2}, {{0, 2, 1}, {1, 0, 1}});
  std::vector<std::size_t> c{0, 2};
  CHECK(project_subset(s, c) == ProductSubset::from_tuples({2, 2}, {{0, 1}, {1, 1}}));
  std::vector<std::size_t> bad{2, 0};
  CHECK_THROWS_AS(project_subset(s, bad), ArgumentError);
}

TEST_CASE("ample subsets of [2] x [2] are the seven pictured", "[finsets]") {
  auto all = enumerate_ample({2, 2});
  REQUIRE(all.size() == 7);
  std::vector<std::uint64_t> masks;
  for (const auto& s : all) masks.push_back(s.mask().to_u64());
  CHECK(masks == std::vector<std::uint64_t>{0b0110, 0b0111, 0b1001, 0b1011, 0b1101, 0b1110, 0b1111});
}

TEST_CASE("ample counts of [2]^n against explicit tuple enumeration", "[finsets]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    BigInt want = oracle::count_ample_brute(n);
    CHECK(count_ample_power2(n, CountMethod::enumerate) == want);
    CHECK(count_ample_power2(n, CountMethod::inclusion_exclusion) == want);
  }
  CHECK(count_ample_power2(0, CountMethod::inclusion_exclusion) == 1);
  CHECK(count_ample_power2(0, CountMethod::enumerate) == 1);
}

TEST_CASE("enumeration past the budget is a capacity error", "[finsets]") {
  CHECK_THROWS_AS(count_ample_power2(5, CountMethod::enumerate), CapacityError);
  Limits tight;
  tight.enum_bits = 3;
  CHECK_THROWS_AS(enumerate_ample({2, 2}, tight), CapacityError);
}

TEST_CASE("inclusion-exclusion is exact for large n", "[finsets]") {
  // Reference values from sum_k (-1)^k C(n,k) 2^k (2^(2^(n-k)) - 1), a
  // different grouping of the same inclusion-exclusion.
  CHECK(count_ample_power2(5, CountMethod::inclusion_exclusion) == BigInt("4294321153"));
  CHECK(count_ample_power2(6, CountMethod::inclusion_exclusion) == BigInt("18446744022173838463"));
}

TEST_CASE("fiber_image keeps odd or non-empty fibers", "[finsets]") {
  SetMap f(3, {0, 0, 1, 2, 2, 2});
  CHECK(fiber_image(f, BitMask(0b111111ULL), FiberMode::odd) == BitMask(0b110ULL));
  CHECK(fiber_image(f, BitMask(0b111111ULL), FiberMode::nonempty) == BitMask(0b111ULL));
  CHECK(fiber_image(f, BitMask(0b000011ULL), FiberMode::odd) == BitMask());
  CHECK_THROWS_AS(fiber_image(f, BitMask(0b1000000ULL), FiberMode::odd), ArgumentError);
}

TEST_CASE("property: fiber_image(odd) is the parity of fiber counts", "[finsets][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 12, m = 1 + rng() % 5;
    std::vector<std::size_t> t(n);
    for (auto& v : t) v = rng() % m;
    SetMap f(m, t);
    std::uint64_t s = rng() & ((std::uint64_t{1} << n) - 1);
    auto odd = fiber_image(f, BitMask(s), FiberMode::odd);
    auto any = fiber_image(f, BitMask(s), FiberMode::nonempty);
    for (std::size_t b = 0; b < m; ++b) {
      int c = 0;
      for (std::size_t x = 0; x < n; ++x)
        if ((s >> x & 1U) && t[x] == b) ++c;
      CHECK(odd.test(b) == (c % 2 == 1));
      CHECK(any.test(b) == (c > 0));
    }
    CHECK(odd.subset_of(any));
  }
}

TEST_CASE("fiber product subset", "[finsets]") {
  SetMap f(2, {0, 0, 1}), g(2, {0, 1});
  CHECK(fiber_product_subset(f, g) == ProductSubset::from_tuples({3, 2}, {{0, 0}, {1, 0}, {2, 1}}));
  CHECK_THROWS_AS(fiber_product_subset(f, SetMap(3, {0})), ArgumentError);
}

TEST_CASE("rank and unrank round trip on [4,4,4]", "[finsets][property]") {
  std::vector<std::size_t> sizes{4, 4, 4};
  for (std::size_t r = 0; r < 64; ++r) CHECK(tuple_rank(sizes, tuple_unrank(sizes, r)) == r);
  for (const auto& t : oracle::product_tuples(sizes)) CHECK(tuple_unrank(sizes, tuple_rank(sizes, t)) == t);
}

TEST_CASE("ample iff every single-coordinate projection is full", "[finsets][property]") {
  std::vector<std::size_t> sizes{2, 3};
  auto pts = oracle::product_tuples(sizes);
  for (std::uint64_t m = 0; m < 64; ++m) {
    ProductSubset s(sizes, BitMask(m));
    bool full = true;
    for (std::size_t c = 0; c < 2; ++c) {
      std::vector<std::size_t> coord{c};
      full &= project_subset(s, coord) == ProductSubset::full({sizes[c]});
    }
    std::vector<oracle::Tuple> sub;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (m >> i & 1U) sub.push_back(pts[i]);
    CHECK(is_ample(s) == full);
    CHECK(is_ample(s) == oracle::surjects_everywhere(sub, sizes));
  }
}

TEST_CASE("enumerate_ample small cases", "[finsets]") {
  CHECK(enumerate_ample({1, 1}) == std::vector<ProductSubset>{ProductSubset::full({1, 1})});
  CHECK(enumerate_ample({2, 1}) == std::vector<ProductSubset>{ProductSubset::full({2, 1})});
}
