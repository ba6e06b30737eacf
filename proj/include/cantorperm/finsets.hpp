#pragma once

// Finite sets, maps between them, and subsets of finite products encoded as
// bitmasks. A tuple (a_1, ..., a_k) in n_1 x ... x n_k has bit index
// ((a_1 * n_2 + a_2) * n_3 + ...) + a_k, so the last coordinate varies
// fastest. Every enumeration order in the library derives from this.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cantorperm/bitmask.hpp"
#include "cantorperm/errors.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

/// The set {0, ..., size-1}.
struct FinSet {
  std::size_t size = 0;
  friend auto operator<=>(const FinSet&, const FinSet&) = default;
};

/// A function between finite sets, given by its value table.
class SetMap {
 public:
  SetMap(std::size_t cod, std::vector<std::size_t> table) : cod_(cod), table_(std::move(table)) {
    for (auto v : table_)
      if (v >= cod_) throw ArgumentError("set map value " + std::to_string(v) + " outside codomain of size " + std::to_string(cod_));
  }

  static SetMap identity(std::size_t n) {
    std::vector<std::size_t> t(n);
    std::iota(t.begin(), t.end(), std::size_t{0});
    return SetMap(n, std::move(t));
  }

  FinSet dom() const { return {table_.size()}; }
  FinSet cod() const { return {cod_}; }
  std::size_t operator()(std::size_t x) const { return table_.at(x); }
  const std::vector<std::size_t>& table() const { return table_; }

  bool surjective() const {
    std::vector<bool> hit(cod_, false);
    for (auto v : table_) hit[v] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

  friend bool operator==(const SetMap&, const SetMap&) = default;

 private:
  std::size_t cod_;
  std::vector<std::size_t> table_;
};

/// Number of points in a product, throwing past 2^40.
inline std::size_t product_points(std::span<const std::size_t> sizes) {
  std::size_t p = 1;
  for (auto n : sizes) {
    if (n != 0 && p > (std::size_t{1} << 40) / n) throw CapacityError("product of factor sizes exceeds 2^40 points");
    p *= n;
  }
  return p;
}

inline std::size_t tuple_rank(std::span<const std::size_t> sizes, std::span<const std::size_t> tuple) {
  if (sizes.size() != tuple.size()) throw ArgumentError("tuple arity does not match factor count");
  std::size_t r = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (tuple[i] >= sizes[i]) throw ArgumentError("tuple coordinate out of range");
    r = r * sizes[i] + tuple[i];
  }
  return r;
}

inline std::vector<std::size_t> tuple_unrank(std::span<const std::size_t> sizes, std::size_t rank) {
  std::vector<std::size_t> t(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    t[i] = rank % sizes[i];
    rank /= sizes[i];
  }
  return t;
}

/// A subset of n_1 x ... x n_k.
class ProductSubset {
 public:
  ProductSubset() = default;
  ProductSubset(std::vector<std::size_t> factor_sizes, BitMask mask)
      : sizes_(std::move(factor_sizes)), mask_(std::move(mask)) {
    for (auto n : sizes_)
      if (n == 0) throw ArgumentError("product subset factor sizes must be positive");
    if (mask_.bit_width() > product_points(sizes_))
      throw ArgumentError("product subset mask has bits beyond the product");
  }

  static ProductSubset full(std::vector<std::size_t> sizes) {
    auto n = product_points(sizes);
    return ProductSubset(std::move(sizes), BitMask::full(n));
  }
  static ProductSubset from_tuples(std::vector<std::size_t> sizes,
                                   const std::vector<std::vector<std::size_t>>& tuples) {
    BitMask m;
    for (const auto& t : tuples) m.set(tuple_rank(sizes, t));
    return ProductSubset(std::move(sizes), std::move(m));
  }

  const std::vector<std::size_t>& factor_sizes() const { return sizes_; }
  const BitMask& mask() const { return mask_; }
  std::size_t points() const { return product_points(sizes_); }
  std::size_t count() const { return mask_.count(); }
  bool empty() const { return mask_.none(); }
  bool contains(std::span<const std::size_t> tuple) const { return mask_.test(tuple_rank(sizes_, tuple)); }

  std::vector<std::vector<std::size_t>> tuples() const {
    std::vector<std::vector<std::size_t>> out;
    mask_.for_each([&](std::size_t r) { out.push_back(tuple_unrank(sizes_, r)); });
    return out;
  }

  friend bool operator==(const ProductSubset&, const ProductSubset&) = default;
  friend std::strong_ordering operator<=>(const ProductSubset& a, const ProductSubset& b) {
    if (auto c = a.sizes_ <=> b.sizes_; c != 0) return c;
    return a.mask_ <=> b.mask_;
  }

 private:
  std::vector<std::size_t> sizes_;
  BitMask mask_;
};

/// Image of S under projection onto the chosen factors (strictly increasing).
inline ProductSubset project_subset(const ProductSubset& s, std::span<const std::size_t> coords) {
  const auto& sizes = s.factor_sizes();
  if (coords.empty()) throw ArgumentError("projection needs at least one coordinate");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] >= sizes.size()) throw ArgumentError("projection coordinate out of range");
    if (i > 0 && coords[i] <= coords[i - 1]) throw ArgumentError("projection coordinates must be strictly increasing");
  }
  std::vector<std::size_t> out_sizes;
  for (auto c : coords) out_sizes.push_back(sizes[c]);
  BitMask out;
  std::vector<std::size_t> sub(coords.size());
  s.mask().for_each([&](std::size_t r) {
    auto t = tuple_unrank(sizes, r);
    for (std::size_t i = 0; i < coords.size(); ++i) sub[i] = t[coords[i]];
    out.set(tuple_rank(out_sizes, sub));
  });
  return ProductSubset(std::move(out_sizes), std::move(out));
}

/// Non-empty and surjective onto every factor.
inline bool is_ample(const ProductSubset& s) {
  if (s.empty()) return false;
  const auto& sizes = s.factor_sizes();
  std::vector<std::vector<bool>> seen(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) seen[i].assign(sizes[i], false);
  s.mask().for_each([&](std::size_t r) {
    auto t = tuple_unrank(sizes, r);
    for (std::size_t i = 0; i < t.size(); ++i) seen[i][t[i]] = true;
  });
  for (const auto& v : seen)
    if (!std::all_of(v.begin(), v.end(), [](bool b) { return b; })) return false;
  return true;
}

namespace detail {

/// For each (factor, value): the mask of product points with that coordinate.
/// Only valid when the product has at most 64 points.
inline std::vector<std::uint64_t> coordinate_fibers(std::span<const std::size_t> sizes) {
  std::size_t n = product_points(sizes);
  if (n > 64) throw CapacityError("coordinate fibers need at most 64 points");
  std::vector<std::uint64_t> fibers;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t v = 0; v < sizes[i]; ++v) {
      std::uint64_t f = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (tuple_unrank(sizes, r)[i] == v) f |= std::uint64_t{1} << r;
      fibers.push_back(f);
    }
  }
  return fibers;
}

inline bool meets_all(std::uint64_t mask, std::span<const std::uint64_t> fibers) {
  for (auto f : fibers)
    if ((mask & f) == 0) return false;
  return mask != 0;
}

}  // namespace detail

/// All ample subsets of the product, in increasing mask order.
inline std::vector<ProductSubset> enumerate_ample(const std::vector<std::size_t>& factor_sizes,
                                                  const Limits& lim = {}) {
  for (auto n : factor_sizes)
    if (n == 0) throw ArgumentError("factor sizes must be positive");
  std::size_t points = product_points(factor_sizes);
  require_budget(points, lim.enum_bits, "enumerate_ample");
  auto fibers = detail::coordinate_fibers(factor_sizes);
  std::vector<ProductSubset> out;
  std::uint64_t end = std::uint64_t{1} << points;
  for (std::uint64_t m = 1; m < end; ++m)
    if (detail::meets_all(m, fibers)) out.emplace_back(factor_sizes, BitMask(m));
  return out;
}

enum class CountMethod { enumerate, inclusion_exclusion };

/// Number of ample subsets of [2]^n.
inline BigInt count_ample_power2(std::size_t n, CountMethod method, const Limits& lim = {}) {
  if (method == CountMethod::enumerate) {
    if (n >= 6) throw CapacityError("count_ample_power2: enumerate mode needs 2^" + std::to_string(n) +
                                    " bits, budget is " + std::to_string(lim.enum_bits) + " bits");
    require_budget(std::size_t{1} << n, lim.enum_bits, "count_ample_power2");
    return BigInt(static_cast<unsigned long>(enumerate_ample(std::vector<std::size_t>(n, 2), lim).size()));
  }
  // Each coordinate excludes none (k0), one (k1, two ways) or both (k2) of its
  // values; the surviving points number 2^k0 if k2 == 0 and 0 otherwise.
  // Excluding both values is two events, so only k1 sets the sign.
  BigInt total = 0;
  BigInt fact_n;
  mpz_fac_ui(fact_n.get_mpz_t(), n);
  for (std::size_t k1 = 0; k1 <= n; ++k1) {
    for (std::size_t k2 = 0; k1 + k2 <= n; ++k2) {
      std::size_t k0 = n - k1 - k2;
      BigInt f0, f1, f2;
      mpz_fac_ui(f0.get_mpz_t(), k0);
      mpz_fac_ui(f1.get_mpz_t(), k1);
      mpz_fac_ui(f2.get_mpz_t(), k2);
      BigInt ways = fact_n / (f0 * f1 * f2);
      ways <<= k1;
      BigInt subsets;
      if (k2 == 0) {
        if (k0 >= 40) throw CapacityError("count_ample_power2: 2^(2^n) term too large");
        mpz_ui_pow_ui(subsets.get_mpz_t(), 2, 1UL << k0);
      } else {
        subsets = 1;
      }
      BigInt term = ways * subsets;
      if (k1 % 2 == 0) total += term;
      else total -= term;
    }
  }
  // With no factors the empty subset surjects vacuously but is not ample.
  if (n == 0) total -= 1;
  return total;
}

enum class FiberMode { odd, nonempty };

/// Points of the codomain whose fiber meets S an odd number of times
/// (odd) or at all (nonempty).
inline BitMask fiber_image(const SetMap& f, const BitMask& s, FiberMode mode) {
  if (s.bit_width() > f.dom().size) throw ArgumentError("fiber_image: subset not contained in domain");
  std::vector<std::size_t> hits(f.cod().size, 0);
  s.for_each([&](std::size_t x) { ++hits[f(x)]; });
  BitMask out;
  for (std::size_t b = 0; b < hits.size(); ++b) {
    bool keep = mode == FiberMode::odd ? (hits[b] % 2 == 1) : (hits[b] > 0);
    if (keep) out.set(b);
  }
  return out;
}

/// {(a, b) : f(a) = g(b)} inside A x B.
inline ProductSubset fiber_product_subset(const SetMap& f, const SetMap& g) {
  if (f.cod() != g.cod()) throw ArgumentError("fiber product needs maps with a common codomain");
  std::size_t na = f.dom().size, nb = g.dom().size;
  if (na == 0 || nb == 0) throw ArgumentError("fiber product of maps with empty domain");
  BitMask m;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      if (f(a) == g(b)) m.set(a * nb + b);
  return ProductSubset({na, nb}, std::move(m));
}

}  // namespace cantorperm
