#pragma once

// Orbit calculus for the smooth G-sets X(A) (surjective colourings by A) and
// Y(A) (all colourings). Everything here is finite combinatorics on the
// index sets: orbits of X(A) x_{X(C)} X(B) are the ample subsets of
// A x_C B, and Y(A) splits into one X(C) per non-empty C inside A.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"

namespace cantorperm {

/// One transitive piece X(A), |A| = size. The optional tag records the subset
/// the piece stands for inside some ambient product (a stratum C of Y(A), or
/// an orbit label D of a fiber product).
struct TransitivePiece {
  std::size_t size = 1;
  std::optional<ProductSubset> tag;

  friend bool operator==(const TransitivePiece&, const TransitivePiece&) = default;
};

/// Larger pieces first, then by tag.
inline bool canonical_less(const TransitivePiece& a, const TransitivePiece& b) {
  if (a.size != b.size) return a.size > b.size;
  if (a.tag.has_value() != b.tag.has_value()) return !a.tag.has_value();
  if (a.tag) return *a.tag < *b.tag;
  return false;
}

/// A finite disjoint union of transitive pieces with multiplicities.
class FormalGSet {
 public:
  struct Entry {
    TransitivePiece piece;
    std::size_t multiplicity;
  };

  FormalGSet() = default;

  static FormalGSet x(std::size_t n) {
    FormalGSet s;
    s.add(TransitivePiece{n, std::nullopt});
    return s;
  }

  void add(const TransitivePiece& p, std::size_t multiplicity = 1) {
    if (p.size == 0) throw ArgumentError("X of the empty set does not exist");
    if (multiplicity == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                               [](const Entry& e, const TransitivePiece& q) { return canonical_less(e.piece, q); });
    if (it != entries_.end() && it->piece == p)
      it->multiplicity += multiplicity;
    else
      entries_.insert(it, {p, multiplicity});
  }

  /// Adds many pieces with one sort.
  void add_all(std::vector<Entry> more) {
    for (const auto& e : more)
      if (e.piece.size == 0) throw ArgumentError("X of the empty set does not exist");
    std::erase_if(more, [](const Entry& e) { return e.multiplicity == 0; });
    more.insert(more.end(), std::make_move_iterator(entries_.begin()), std::make_move_iterator(entries_.end()));
    std::stable_sort(more.begin(), more.end(),
                     [](const Entry& a, const Entry& b) { return canonical_less(a.piece, b.piece); });
    entries_.clear();
    for (auto& e : more) {
      if (!entries_.empty() && entries_.back().piece == e.piece)
        entries_.back().multiplicity += e.multiplicity;
      else
        entries_.push_back(std::move(e));
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  std::size_t piece_count() const {
    std::size_t c = 0;
    for (const auto& e : entries_) c += e.multiplicity;
    return c;
  }

  /// Multiplicity of each piece size, tags forgotten.
  std::map<std::size_t, std::size_t, std::greater<>> size_profile() const {
    std::map<std::size_t, std::size_t, std::greater<>> out;
    for (const auto& e : entries_) out[e.piece.size] += e.multiplicity;
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

/// A G-map X(A) -> X(B); always X(f) for a unique surjection f.
class GMap {
 public:
  explicit GMap(SetMap f) : f_(std::move(f)) {
    if (f_.dom().size == 0) throw ArgumentError("X of the empty set does not exist");
    if (!f_.surjective()) throw ArgumentError("maps of X-sets come from surjections only");
  }
  const SetMap& underlying() const { return f_; }
  FinSet dom() const { return f_.dom(); }
  FinSet cod() const { return f_.cod(); }

 private:
  SetMap f_;
};

/// X(A) x_{X(C)} X(B) as the sum of X(D) over ample D in A x_C B; each piece
/// is tagged with its D (a subset of A x B).
inline FormalGSet x_product_decompose(const GMap& f, const GMap& g, const Limits& lim = {}) {
  if (f.cod() != g.cod()) throw ArgumentError("x_product_decompose: codomains differ");
  std::size_t na = f.dom().size, nb = g.dom().size;
  require_budget(na * nb, 64, "x_product_decompose tags");
  auto fp = fiber_product_subset(f.underlying(), g.underlying());
  auto points = fp.mask().bits();
  require_budget(points.size(), lim.enum_bits, "x_product_decompose");
  std::vector<std::uint64_t> fibers = detail::coordinate_fibers(std::vector<std::size_t>{na, nb});
  std::vector<FormalGSet::Entry> pieces;
  std::uint64_t end = std::uint64_t{1} << points.size();
  for (std::uint64_t sub = 1; sub < end; ++sub) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
      if ((sub >> i) & 1U) m |= std::uint64_t{1} << points[i];
    if (!detail::meets_all(m, fibers)) continue;
    pieces.push_back({TransitivePiece{static_cast<std::size_t>(std::popcount(m)), ProductSubset({na, nb}, BitMask(m))}, 1});
  }
  FormalGSet out;
  out.add_all(std::move(pieces));
  return out;
}

/// Orbit labels of X(A_1) x ... x X(A_k).
inline std::vector<ProductSubset> multiway_orbit_decompose(const std::vector<FinSet>& labels,
                                                           const Limits& lim = {}) {
  std::vector<std::size_t> sizes;
  for (auto l : labels) {
    if (l.size == 0) throw ArgumentError("X of the empty set does not exist");
    sizes.push_back(l.size);
  }
  return enumerate_ample(sizes, lim);
}

/// Y(A) as the sum of X(C) over non-empty C, each tagged with C.
inline FormalGSet y_set_decompose(FinSet a, const Limits& lim = {}) {
  FormalGSet out;
  if (a.size == 0) return out;
  require_budget(a.size, lim.enum_bits, "y_set_decompose");
  std::vector<FormalGSet::Entry> pieces;
  for (std::uint64_t c = 1; c < (std::uint64_t{1} << a.size); ++c)
    pieces.push_back({TransitivePiece{static_cast<std::size_t>(std::popcount(c)), ProductSubset({a.size}, BitMask(c))}, 1});
  out.add_all(std::move(pieces));
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence relations on X(A). A G-stable relation is a family of ample
// subsets of A x A; bit (x, y) of a member is x * |A| + y.

using Permutation = std::vector<std::size_t>;

namespace detail {

inline std::uint64_t pair_bit(std::size_t n, std::size_t x, std::size_t y) { return std::uint64_t{1} << (x * n + y); }

inline std::uint64_t diagonal_mask(std::size_t n) {
  std::uint64_t d = 0;
  for (std::size_t x = 0; x < n; ++x) d |= pair_bit(n, x, x);
  return d;
}

inline std::uint64_t transpose_mask(std::size_t n, std::uint64_t m) {
  std::uint64_t t = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (m & pair_bit(n, x, y)) t |= pair_bit(n, y, x);
  return t;
}

inline bool is_ample_square(std::size_t n, std::uint64_t m) {
  std::uint64_t rows = 0, cols = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (m & pair_bit(n, x, y)) {
        rows |= std::uint64_t{1} << x;
        cols |= std::uint64_t{1} << y;
      }
  std::uint64_t all = (std::uint64_t{1} << n) - 1;
  return m != 0 && rows == all && cols == all;
}

inline std::uint64_t graph_mask(const Permutation& p) {
  std::uint64_t m = 0;
  for (std::size_t x = 0; x < p.size(); ++x) m |= pair_bit(p.size(), x, p[x]);
  return m;
}

/// Images p13(F) over all F inside the chain set of (e1, e2) with
/// p12(F) = e1 and p23(F) = e2. For a candidate image R the largest F with
/// p13(F) inside R is the part of the chain set lying over R, and it has the
/// right projections iff some F does.
inline std::vector<std::uint64_t> chain_images(std::size_t n, std::uint64_t e1, std::uint64_t e2) {
  struct Triple {
    std::uint64_t b12, b23, b13;
  };
  std::vector<Triple> chain;
  std::uint64_t reach13 = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!(e1 & pair_bit(n, x, y))) continue;
      for (std::size_t z = 0; z < n; ++z) {
        if (!(e2 & pair_bit(n, y, z))) continue;
        chain.push_back({pair_bit(n, x, y), pair_bit(n, y, z), pair_bit(n, x, z)});
        reach13 |= pair_bit(n, x, z);
      }
    }
  std::vector<std::size_t> reach_bits;
  for (std::size_t i = 0; i < n * n; ++i)
    if (reach13 >> i & 1U) reach_bits.push_back(i);
  std::vector<std::uint64_t> out;
  for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << reach_bits.size()); ++sub) {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < reach_bits.size(); ++i)
      if (sub >> i & 1U) r |= std::uint64_t{1} << reach_bits[i];
    std::uint64_t p12 = 0, p23 = 0, p13 = 0;
    for (const auto& t : chain) {
      if (!(r & t.b13)) continue;
      p12 |= t.b12;
      p23 |= t.b23;
      p13 |= t.b13;
    }
    if (p12 == e1 && p23 == e2 && p13 == r) out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// A G-stable relation on X(A), as its set of orbit labels.
class EqRelFamily {
 public:
  EqRelFamily(std::size_t base, std::set<std::uint64_t> members) : base_(base), members_(std::move(members)) {
    if (base_ == 0) throw ArgumentError("equivalence relation on X of the empty set");
    if (base_ > 8) throw CapacityError("equivalence families support |A| <= 8");
    for (auto m : members_)
      if (!detail::is_ample_square(base_, m))
        throw ArgumentError("family member " + BitMask(m).to_hex() + " is not ample in A x A");
  }

  FinSet base() const { return {base_}; }
  const std::set<std::uint64_t>& members() const { return members_; }
  bool contains(std::uint64_t m) const { return members_.count(m) != 0; }

  friend bool operator==(const EqRelFamily&, const EqRelFamily&) = default;

 private:
  std::size_t base_;
  std::set<std::uint64_t> members_;
};

/// X(B)/Gamma for a permutation group Gamma on B.
class QuotientDescription {
 public:
  QuotientDescription(std::size_t base, std::vector<Permutation> group) : base_(base), group_(std::move(group)) {
    std::sort(group_.begin(), group_.end());
    group_.erase(std::unique(group_.begin(), group_.end()), group_.end());
    validate();
  }

  FinSet base() const { return {base_}; }
  const std::vector<Permutation>& group() const { return group_; }
  std::size_t order() const { return group_.size(); }

  friend bool operator==(const QuotientDescription&, const QuotientDescription&) = default;

 private:
  void validate() const {
    if (base_ == 0) throw ArgumentError("X of the empty set does not exist");
    std::set<Permutation> g(group_.begin(), group_.end());
    Permutation id(base_);
    for (std::size_t i = 0; i < base_; ++i) id[i] = i;
    if (!g.count(id)) throw ArgumentError("permutation group must contain the identity");
    for (const auto& p : group_) {
      if (p.size() != base_) throw ArgumentError("permutation has the wrong degree");
      Permutation inv(base_, base_);
      for (std::size_t i = 0; i < base_; ++i) {
        if (p[i] >= base_ || inv[p[i]] != base_) throw ArgumentError("not a permutation");
        inv[p[i]] = i;
      }
      if (!g.count(inv)) throw ArgumentError("permutation group is not closed under inverses");
      for (const auto& q : group_) {
        Permutation pq(base_);
        for (std::size_t i = 0; i < base_; ++i) pq[i] = p[q[i]];
        if (!g.count(pq)) throw ArgumentError("permutation group is not closed under composition");
      }
    }
  }

  std::size_t base_;
  std::vector<Permutation> group_;
};

/// Reflexive, symmetric and transitive, checked on orbit labels.
inline bool eqrel_validate(const EqRelFamily& f, const Limits& lim = {}) {
  std::size_t n = f.base().size;
  if (n > lim.eqrel_base)
    throw CapacityError("eqrel_validate: |A| = " + std::to_string(n) + " exceeds budget " +
                        std::to_string(lim.eqrel_base));
  if (!f.contains(detail::diagonal_mask(n))) return false;
  for (auto e : f.members())
    if (!f.contains(detail::transpose_mask(n, e))) return false;
  for (auto e1 : f.members())
    for (auto e2 : f.members())
      for (auto r : detail::chain_images(n, e1, e2))
        if (!f.contains(r)) return false;
  return true;
}

/// Smallest valid family containing the seeds.
inline EqRelFamily eqrel_close(std::size_t n, std::set<std::uint64_t> seeds, const Limits& lim = {}) {
  if (n > lim.eqrel_base) throw CapacityError("eqrel_close: |A| exceeds budget");
  seeds.insert(detail::diagonal_mask(n));
  // Only pairs touching a member added in the previous round can yield new images.
  std::set<std::uint64_t> fresh = seeds;
  while (!fresh.empty()) {
    std::set<std::uint64_t> add;
    for (auto e : fresh) add.insert(detail::transpose_mask(n, e));
    for (auto e1 : seeds)
      for (auto e2 : seeds) {
        if (!fresh.count(e1) && !fresh.count(e2)) continue;
        for (auto r : detail::chain_images(n, e1, e2)) add.insert(r);
      }
    fresh.clear();
    for (auto a : add)
      if (seeds.insert(a).second) fresh.insert(a);
  }
  return EqRelFamily(n, std::move(seeds));
}

/// The family {graph of sigma : sigma in Gamma}.
inline EqRelFamily eqrel_from_group(std::size_t n, const std::vector<Permutation>& group) {
  QuotientDescription q(n, group);
  std::set<std::uint64_t> members;
  for (const auto& p : q.group()) members.insert(detail::graph_mask(p));
  return EqRelFamily(n, std::move(members));
}

/// Every member is the graph of a permutation.
inline bool eqrel_is_small(const EqRelFamily& f) {
  std::size_t n = f.base().size;
  for (auto e : f.members())
    for (std::size_t x = 0; x < n; ++x) {
      std::uint64_t row = (e >> (x * n)) & ((std::uint64_t{1} << n) - 1);
      if (std::popcount(row) != 1) return false;
    }
  return true;
}

/// The collapse A -> A/(b ~ c), b < c, as a set map.
inline SetMap collapse_map(std::size_t n, std::size_t b, std::size_t c) {
  if (b >= c || c >= n) throw ArgumentError("collapse needs b < c < n");
  std::vector<std::size_t> t(n);
  for (std::size_t x = 0; x < n; ++x) t[x] = x < c ? x : (x == c ? b : x - 1);
  return SetMap(n - 1, std::move(t));
}

/// (g x g)(E) for every member.
inline EqRelFamily eqrel_pushforward(const EqRelFamily& f, const SetMap& g) {
  std::size_t n = f.base().size, m = g.cod().size;
  if (g.dom().size != n || !g.surjective()) throw ArgumentError("pushforward needs a surjection from the base");
  std::set<std::uint64_t> out;
  for (auto e : f.members()) {
    std::uint64_t img = 0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (e & detail::pair_bit(n, x, y)) img |= detail::pair_bit(m, g(x), g(y));
    out.insert(img);
  }
  return EqRelFamily(m, std::move(out));
}

/// Identifies X(A)/R with some X(B)/Gamma: collapse pairs (b, c) that some
/// member relates to a common point until the family consists of
/// permutation graphs. The first witness in mask/index order is used.
inline QuotientDescription eqrel_classify(const EqRelFamily& family, const Limits& lim = {}) {
  if (!eqrel_validate(family, lim)) throw ArgumentError("eqrel_classify: family is not an equivalence relation");
  EqRelFamily f = family;
  while (!eqrel_is_small(f)) {
    std::size_t n = f.base().size;
    std::optional<SetMap> g;
    for (auto e : f.members()) {
      for (std::size_t a = 0; a < n && !g; ++a) {
        std::vector<std::size_t> partners;
        for (std::size_t y = 0; y < n; ++y)
          if (e & detail::pair_bit(n, a, y)) partners.push_back(y);
        if (partners.size() >= 2) g = collapse_map(n, partners[0], partners[1]);
      }
      if (g) break;
    }
    f = eqrel_pushforward(f, *g);
    if (!eqrel_validate(f, lim)) throw IntegrityError("pushforward of an equivalence family is not an equivalence family");
  }
  std::size_t n = f.base().size;
  std::vector<Permutation> group;
  for (auto e : f.members()) {
    Permutation p(n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (e & detail::pair_bit(n, x, y)) p[x] = y;
    group.push_back(std::move(p));
  }
  try {
    return QuotientDescription(n, std::move(group));
  } catch (const ArgumentError& err) {
    throw IntegrityError(std::string("small equivalence family is not a group: ") + err.what());
  }
}

}  // namespace cantorperm
