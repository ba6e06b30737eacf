#pragma once

// The permutation-module category Perm(G; mu or nu) restricted to smooth
// sets built from the X(A). An object is a list of transitive pieces; a
// morphism is a block matrix whose (j, i) block is a G-invariant function on
// X(B_j) x X(A_i), stored as coefficients on orbits (ample subsets of
// B_j x A_i, local coordinates, bit (b, a) = b * |A_i| + a).
//
// Every piece carries a tag: the subset of a flattened ambient set [N] it
// stands for. Tags make Y(A)'s strata, tensor-product strata, unitors and
// associators line up by plain equality.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/measures.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

struct PermObject {
  std::vector<TransitivePiece> pieces;

  std::size_t size() const { return pieces.size(); }
  friend bool operator==(const PermObject&, const PermObject&) = default;
};

namespace detail {

inline ProductSubset flat_tag(std::size_t ambient, BitMask mask) {
  return ProductSubset({ambient}, std::move(mask));
}

/// Sorted ambient elements of a tagged piece; element k is local index k.
inline std::vector<std::size_t> piece_elements(const TransitivePiece& p) {
  if (!p.tag) {
    std::vector<std::size_t> v(p.size);
    for (std::size_t i = 0; i < p.size; ++i) v[i] = i;
    return v;
  }
  return p.tag->mask().bits();
}

inline std::size_t tag_ambient(const TransitivePiece& p) { return p.tag ? p.tag->points() : p.size; }

inline std::size_t block_bits(std::size_t nt, std::size_t ns) {
  if (nt * ns > 64) throw CapacityError("matrix block " + std::to_string(nt) + "x" + std::to_string(ns) + " exceeds 64 strata points");
  return nt * ns;
}

/// Surjects onto both factors of [nt] x [ns].
inline bool block_ample(std::size_t nt, std::size_t ns, std::uint64_t m) {
  if (m == 0) return false;
  std::uint64_t rows = 0, cols = 0;
  for (std::size_t t = 0; t < nt; ++t) {
    std::uint64_t row = (m >> (t * ns)) & ((ns == 64 ? 0 : (std::uint64_t{1} << ns)) - 1);
    if (row != 0) rows |= std::uint64_t{1} << t;
    cols |= row;
  }
  return rows == (std::uint64_t{1} << nt) - 1 && cols == (std::uint64_t{1} << ns) - 1;
}

inline std::uint64_t diagonal_block(std::size_t n) {
  std::uint64_t d = 0;
  for (std::size_t k = 0; k < n; ++k) d |= std::uint64_t{1} << (k * n + k);
  return d;
}

template <class F>
void for_each_nonempty_subset(std::uint64_t mask, F&& f) {
  for (std::uint64_t sub = mask; sub != 0; sub = (sub - 1) & mask) f(sub);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Objects

/// Vec of X(n), as a single piece tagged with all of [n].
inline PermObject x_object(std::size_t n) {
  if (n == 0) throw ArgumentError("X of the empty set does not exist");
  return {{TransitivePiece{n, detail::flat_tag(n, BitMask::full(n))}}};
}

/// The tensor unit X(1).
inline PermObject unit_object() { return x_object(1); }

/// Vec of Y(A): one piece X(C) per non-empty C, larger pieces first.
inline PermObject y_object(FinSet a, const Limits& lim = {}) {
  PermObject obj;
  if (a.size == 0) return obj;
  require_budget(a.size, lim.enum_bits, "y_object");
  for (std::uint64_t c = 1; c < (std::uint64_t{1} << a.size); ++c)
    obj.pieces.push_back(TransitivePiece{static_cast<std::size_t>(std::popcount(c)), detail::flat_tag(a.size, BitMask(c))});
  std::stable_sort(obj.pieces.begin(), obj.pieces.end(), canonical_less);
  return obj;
}

/// The pieces as a formal G-set (tags kept).
inline FormalGSet underlying_gset(const PermObject& obj) {
  FormalGSet s;
  for (const auto& p : obj.pieces) s.add(p);
  return s;
}

inline std::optional<std::size_t> find_piece(const PermObject& obj, const TransitivePiece& p) {
  for (std::size_t i = 0; i < obj.pieces.size(); ++i)
    if (obj.pieces[i] == p) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Matrices

class PermMatrix {
 public:
  using Block = std::map<std::uint64_t, Rational>;
  using BlockIndex = std::pair<std::size_t, std::size_t>;  // (target piece, source piece)

  PermMatrix(MeasureSpec measure, PermObject source, PermObject target)
      : measure_(measure), source_(std::move(source)), target_(std::move(target)) {
    for (const auto& t : target_.pieces)
      for (const auto& s : source_.pieces) detail::block_bits(t.size, s.size);
  }

  const MeasureSpec& measure() const { return measure_; }
  const PermObject& source() const { return source_; }
  const PermObject& target() const { return target_; }
  const std::map<BlockIndex, Block>& blocks() const { return blocks_; }

  std::size_t target_size(std::size_t j) const { return target_.pieces.at(j).size; }
  std::size_t source_size(std::size_t i) const { return source_.pieces.at(i).size; }

  Rational get(std::size_t j, std::size_t i, std::uint64_t stratum) const {
    auto b = blocks_.find({j, i});
    if (b == blocks_.end()) return 0;
    auto e = b->second.find(stratum);
    return e == b->second.end() ? Rational(0) : e->second;
  }

  /// Adds c to the coefficient of a stratum; zero results are erased.
  void add(std::size_t j, std::size_t i, std::uint64_t stratum, const Rational& c) {
    check_stratum(j, i, stratum);
    if (c == 0) return;
    auto& block = blocks_[{j, i}];
    auto [it, inserted] = block.try_emplace(stratum, c);
    if (inserted) {
      it->second.canonicalize();
    } else {
      it->second += c;
      if (it->second == 0) block.erase(it);
    }
    if (block.empty()) blocks_.erase({j, i});
  }

  void set(std::size_t j, std::size_t i, std::uint64_t stratum, const Rational& c) {
    check_stratum(j, i, stratum);
    auto b = blocks_.find({j, i});
    if (b != blocks_.end()) {
      b->second.erase(stratum);
      if (b->second.empty()) blocks_.erase(b);
    }
    add(j, i, stratum, c);
  }

  bool is_zero() const { return blocks_.empty(); }
  std::size_t entry_count() const {
    std::size_t n = 0;
    for (const auto& [_, b] : blocks_) n += b.size();
    return n;
  }

  PermMatrix& operator+=(const PermMatrix& o) {
    require_same_shape(o, "matrix addition");
    for (const auto& [idx, block] : o.blocks_)
      for (const auto& [m, c] : block) add(idx.first, idx.second, m, c);
    return *this;
  }
  friend PermMatrix operator+(PermMatrix a, const PermMatrix& b) { return a += b; }

  PermMatrix& operator*=(const Rational& s) {
    if (s == 0) {
      blocks_.clear();
      return *this;
    }
    for (auto& [_, block] : blocks_)
      for (auto& [m, c] : block) c *= s;
    return *this;
  }
  friend PermMatrix operator*(const Rational& s, PermMatrix a) { return a *= s; }

  friend bool operator==(const PermMatrix&, const PermMatrix&) = default;

 private:
  void check_stratum(std::size_t j, std::size_t i, std::uint64_t stratum) const {
    if (j >= target_.size() || i >= source_.size()) throw ArgumentError("matrix block index out of range");
    if (!detail::block_ample(target_size(j), source_size(i), stratum))
      throw ArgumentError("stratum " + BitMask(stratum).to_hex() + " is not ample in its block");
  }
  void require_same_shape(const PermMatrix& o, const char* what) const {
    if (!(measure_ == o.measure_)) throw ArgumentError(std::string(what) + ": measure mismatch");
    if (!(source_ == o.source_) || !(target_ == o.target_)) throw ArgumentError(std::string(what) + ": shape mismatch");
  }

  MeasureSpec measure_;
  PermObject source_, target_;
  std::map<BlockIndex, Block> blocks_;
};

inline PermMatrix zero_matrix(const MeasureSpec& m, const PermObject& source, const PermObject& target) {
  return PermMatrix(m, source, target);
}

inline PermMatrix identity_matrix(const MeasureSpec& m, const PermObject& obj) {
  PermMatrix id(m, obj, obj);
  for (std::size_t i = 0; i < obj.size(); ++i) id.add(i, i, detail::diagonal_block(obj.pieces[i].size), 1);
  return id;
}

/// Moves M onto other objects whose pieces are matched by equality (size
/// and tag). This realises inclusions of summands together with the unit
/// and associativity constraints, which are identities on flattened tags.
/// A non-zero block whose piece has no counterpart is an error.
inline PermMatrix reindex(const PermMatrix& m, const PermObject& source, const PermObject& target) {
  auto map_pieces = [](const PermObject& from, const PermObject& to) {
    std::vector<std::optional<std::size_t>> idx;
    for (const auto& p : from.pieces) idx.push_back(find_piece(to, p));
    return idx;
  };
  auto src = map_pieces(m.source(), source);
  auto tgt = map_pieces(m.target(), target);
  PermMatrix out(m.measure(), source, target);
  for (const auto& [bi, block] : m.blocks()) {
    if (!tgt[bi.first] || !src[bi.second]) throw ArgumentError("reindex: non-zero block has no matching piece");
    for (const auto& [s, c] : block) out.add(*tgt[bi.first], *src[bi.second], s, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrices between Y-objects, addressed by global strata D inside B x A
// (bit (b, a) = b * |A| + a).

enum class Basis { X, Y };

/// Coefficients indexed by global strata; the basis is implied by context.
using StratumVector = std::map<std::uint64_t, Rational>;

namespace detail {

/// Index of the piece of y_object(n) tagged with subset c.
inline std::vector<std::size_t> y_piece_index(const PermObject& y, std::size_t n) {
  std::vector<std::size_t> idx(std::size_t{1} << n, SIZE_MAX);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& tag = y.pieces[i].tag;
    if (!tag || tag->points() != n) throw ArgumentError("object is not a Y-object of the expected size");
    idx[tag->mask().to_u64()] = i;
  }
  return idx;
}

inline std::size_t local_index(std::uint64_t set, std::size_t element) {
  return static_cast<std::size_t>(std::popcount(set & ((std::uint64_t{1} << element) - 1)));
}

struct GlobalStratum {
  std::uint64_t rows = 0, cols = 0;  // p1(D) inside B, p2(D) inside A
  std::uint64_t local = 0;           // D in local coordinates of its block
};

inline GlobalStratum split_stratum(std::uint64_t d, std::size_t nb, std::size_t na) {
  GlobalStratum g;
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t a = 0; a < na; ++a)
      if (d >> (b * na + a) & 1U) {
        g.rows |= std::uint64_t{1} << b;
        g.cols |= std::uint64_t{1} << a;
      }
  std::size_t ns = static_cast<std::size_t>(std::popcount(g.cols));
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t a = 0; a < na; ++a)
      if (d >> (b * na + a) & 1U) g.local |= std::uint64_t{1} << (local_index(g.rows, b) * ns + local_index(g.cols, a));
  return g;
}

inline std::size_t y_object_size(const PermObject& obj) {
  if (obj.pieces.empty()) return 0;
  const auto& tag = obj.pieces.front().tag;
  if (!tag) throw ArgumentError("object is not a Y-object");
  return tag->points();
}

}  // namespace detail

/// Builds the matrix y_object(A) -> y_object(B) with the given global
/// X-basis coefficients.
inline PermMatrix from_x_coefficients(const MeasureSpec& m, FinSet a, FinSet b, const StratumVector& x,
                                      const Limits& lim = {}) {
  auto src = y_object(a, lim), tgt = y_object(b, lim);
  PermMatrix out(m, src, tgt);
  if (a.size == 0 || b.size == 0) {
    if (!x.empty()) throw ArgumentError("non-zero coefficients on a zero object");
    return out;
  }
  auto si = detail::y_piece_index(src, a.size), ti = detail::y_piece_index(tgt, b.size);
  for (const auto& [d, c] : x) {
    if (d == 0 || std::bit_width(d) > a.size * b.size) throw ArgumentError("stratum outside B x A");
    auto g = detail::split_stratum(d, b.size, a.size);
    out.add(ti[g.rows], si[g.cols], g.local, c);
  }
  return out;
}

/// Global X-basis coefficients of a matrix between Y-objects.
inline StratumVector x_coefficients(const PermMatrix& mat) {
  std::size_t na = detail::y_object_size(mat.source());
  StratumVector out;
  for (const auto& [bi, block] : mat.blocks()) {
    auto t_el = detail::piece_elements(mat.target().pieces[bi.first]);
    auto s_el = detail::piece_elements(mat.source().pieces[bi.second]);
    for (const auto& [local, c] : block) {
      std::uint64_t d = 0;
      for (std::size_t t = 0; t < t_el.size(); ++t)
        for (std::size_t s = 0; s < s_el.size(); ++s)
          if (local >> (t * s_el.size() + s) & 1U) d |= std::uint64_t{1} << (t_el[t] * na + s_el[s]);
      out[d] += c;
    }
  }
  return out;
}

enum class BasisDirection { to_X, to_Y };

/// to_X: b(E) = sum of c(D) over D containing E (Y-indicators expand into
/// their strata). to_Y: the Moebius inverse c(D) = sum over E containing D
/// of (-1)^|E \ D| b(E). Only non-empty strata carry coefficients.
inline StratumVector convert_basis(const StratumVector& v, BasisDirection dir, const Limits& lim = {}) {
  StratumVector out;
  for (const auto& [d, c] : v) {
    if (d == 0) throw ArgumentError("convert_basis: the empty stratum carries no coefficient");
    require_budget(static_cast<std::size_t>(std::popcount(d)), lim.enum_bits, "convert_basis");
    detail::for_each_nonempty_subset(d, [&](std::uint64_t sub) {
      if (dir == BasisDirection::to_X) {
        out[sub] += c;
      } else {
        bool odd = (std::popcount(d) - std::popcount(sub)) % 2 == 1;
        if (odd) out[sub] -= c;
        else out[sub] += c;
      }
    });
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

/// The Y-basis coefficients of a matrix between Y-objects.
inline StratumVector y_coefficients(const PermMatrix& mat, const Limits& lim = {}) {
  return convert_basis(x_coefficients(mat), BasisDirection::to_Y, lim);
}

/// 1_{Y(D)} (Y basis) or 1_{X(D)} (X basis) as a matrix y_object(A) ->
/// y_object(B); D is a subset of B x A.
inline PermMatrix indicator_matrix(const MeasureSpec& m, FinSet a, FinSet b, const ProductSubset& d, Basis basis,
                                   const Limits& lim = {}) {
  if (d.factor_sizes() != std::vector<std::size_t>{b.size, a.size})
    throw ArgumentError("indicator_matrix: D must be a subset of B x A");
  std::uint64_t mask = d.mask().to_u64();
  if (basis == Basis::X) {
    if (mask == 0) throw ArgumentError("indicator_matrix: the empty set is not an orbit");
    return from_x_coefficients(m, a, b, {{mask, Rational(1)}}, lim);
  }
  StratumVector y;
  if (mask != 0) y[mask] = 1;
  return from_x_coefficients(m, a, b, convert_basis(y, BasisDirection::to_X, lim), lim);
}

// ---------------------------------------------------------------------------
// Composition. Three independent routes:
//   oracle - sums over orbits F of X(C) x X(B) x X(A) with the measure of
//            the projection F -> p13(F);
//   lemma  - expands each block in Y-indicators, pushes the chain set
//            forward with fiber_image (odd fibers for mu, non-empty for nu);
//   fast   - same expansion, multiplies supports as F2 / Boolean matrices.

enum class ComposeMode { oracle, lemma, fast };

namespace detail {

struct ChainPoint {
  std::uint64_t left, right, outer;  // bits in C x B, B x A, C x A
};

inline std::vector<ChainPoint> chain_set(std::uint64_t eb, std::uint64_t ea, std::size_t nc, std::size_t nb,
                                         std::size_t na) {
  std::vector<ChainPoint> out;
  for (std::size_t z = 0; z < nc; ++z)
    for (std::size_t y = 0; y < nb; ++y) {
      if (!(eb >> (z * nb + y) & 1U)) continue;
      for (std::size_t x = 0; x < na; ++x)
        if (ea >> (y * na + x) & 1U)
          out.push_back({std::uint64_t{1} << (z * nb + y), std::uint64_t{1} << (y * na + x), std::uint64_t{1} << (z * na + x)});
    }
  return out;
}

inline void oracle_block(const PermMatrix::Block& bb, const PermMatrix::Block& ab, std::size_t nc, std::size_t nb,
                         std::size_t na, const MeasureSpec& m, const Limits& lim,
                         std::unordered_map<std::uint64_t, Rational>& acc) {
  for (const auto& [eb, cb] : bb)
    for (const auto& [ea, ca] : ab) {
      auto chain = chain_set(eb, ea, nc, nb, na);
      require_budget(chain.size(), lim.oracle_bits, "oracle composition");
      Rational weight = cb * ca;
      // Sum of alpha^(|F| - |p13 F|) per outer orbit, gathered by exponent.
      std::unordered_map<std::uint64_t, std::map<long, long>> counts;
      std::uint64_t end = std::uint64_t{1} << chain.size();
      for (std::uint64_t f = 1; f < end; ++f) {
        std::uint64_t l = 0, r = 0, o = 0;
        for (std::uint64_t rest = f; rest != 0; rest &= rest - 1) {
          const auto& p = chain[static_cast<std::size_t>(std::countr_zero(rest))];
          l |= p.left;
          r |= p.right;
          o |= p.outer;
        }
        if (l != eb || r != ea) continue;
        ++counts[o][std::popcount(f) - std::popcount(o)];
      }
      for (const auto& [o, by_exp] : counts) {
        Rational s = 0;
        for (const auto& [e, n] : by_exp) s += Rational(n) * m.power(e);
        if (s != 0) acc[o] += weight * s;
      }
    }
}

/// Y-indicator expansion of one X-basis block over [nt] x [ns].
inline std::unordered_map<std::uint64_t, Rational> block_to_y(const PermMatrix::Block& block) {
  std::unordered_map<std::uint64_t, Rational> y;
  for (const auto& [e, c] : block) {
    int ne = std::popcount(e);
    for_each_nonempty_subset(e, [&](std::uint64_t d) {
      if ((ne - std::popcount(d)) % 2 == 1) y[d] -= c;
      else y[d] += c;
    });
  }
  std::erase_if(y, [](const auto& kv) { return kv.second == 0; });
  return y;
}

inline std::uint64_t semiring_product(std::uint64_t left, std::uint64_t right, std::size_t nc, std::size_t nb,
                                      std::size_t na, bool parity) {
  std::vector<std::uint64_t> col(na, 0);
  for (std::size_t y = 0; y < nb; ++y)
    for (std::size_t x = 0; x < na; ++x)
      if (right >> (y * na + x) & 1U) col[x] |= std::uint64_t{1} << y;
  std::uint64_t rowmask = nb == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << nb) - 1;
  std::uint64_t out = 0;
  for (std::size_t z = 0; z < nc; ++z) {
    std::uint64_t row = (left >> (z * nb)) & rowmask;
    for (std::size_t x = 0; x < na; ++x) {
      std::uint64_t meet = row & col[x];
      bool bit = parity ? (std::popcount(meet) % 2 == 1) : meet != 0;
      if (bit) out |= std::uint64_t{1} << (z * na + x);
    }
  }
  return out;
}

}  // namespace detail

/// Support of Y(pi)_*(1) for the projection pi of the chain set
/// {(z, y, x) : (z, y) in E, (y, x) in D} onto C x A.
inline std::uint64_t pushforward_support(std::uint64_t e, std::uint64_t d, std::size_t nc, std::size_t nb,
                                         std::size_t na, FiberMode mode) {
  auto chain = detail::chain_set(e, d, nc, nb, na);
  std::vector<std::size_t> table;
  for (const auto& p : chain) table.push_back(static_cast<std::size_t>(std::countr_zero(p.outer)));
  SetMap pi(nc * na, std::move(table));
  return fiber_image(pi, BitMask::full(chain.size()), mode).to_u64();
}

namespace detail {

inline void y_route_block(const PermMatrix::Block& bb, const PermMatrix::Block& ab, std::size_t nc, std::size_t nb,
                          std::size_t na, const MeasureSpec& m, ComposeMode mode,
                          std::unordered_map<std::uint64_t, Rational>& acc) {
  bool mu = m == MeasureSpec::mu();
  auto yb = block_to_y(bb), ya = block_to_y(ab);
  std::unordered_map<std::uint64_t, Rational> yc;
  for (const auto& [db, cb] : yb)
    for (const auto& [da, ca] : ya) {
      std::uint64_t f = mode == ComposeMode::fast
                            ? semiring_product(db, da, nc, nb, na, mu)
                            : pushforward_support(db, da, nc, nb, na, mu ? FiberMode::odd : FiberMode::nonempty);
      if (f != 0) yc[f] += cb * ca;
    }
  for (const auto& [f, c] : yc) {
    if (c == 0) continue;
    for_each_nonempty_subset(f, [&](std::uint64_t e) {
      if (block_ample(nc, na, e)) acc[e] += c;
    });
  }
}

}  // namespace detail

/// B after A.
inline PermMatrix compose(const PermMatrix& b, const PermMatrix& a, ComposeMode mode = ComposeMode::fast,
                          const Limits& lim = {}) {
  if (!(a.measure() == b.measure())) throw ArgumentError("compose: measure mismatch");
  if (!(a.target() == b.source())) throw ArgumentError("compose: target of the right factor differs from source of the left");
  PermMatrix out(a.measure(), a.source(), b.target());
  // Group A's blocks by middle piece.
  std::map<std::size_t, std::vector<std::pair<std::size_t, const PermMatrix::Block*>>> a_by_mid;
  for (const auto& [bi, block] : a.blocks()) a_by_mid[bi.first].push_back({bi.second, &block});
  for (const auto& [bi, bblock] : b.blocks()) {
    auto [k, j] = bi;
    auto it = a_by_mid.find(j);
    if (it == a_by_mid.end()) continue;
    for (const auto& [i, ablock] : it->second) {
      std::size_t nc = b.target_size(k), nb = b.source_size(j), na = a.source_size(i);
      std::unordered_map<std::uint64_t, Rational> acc;
      if (mode == ComposeMode::oracle) {
        detail::oracle_block(bblock, *ablock, nc, nb, na, a.measure(), lim, acc);
      } else {
        require_budget(std::max(nc * nb, nb * na), lim.enum_bits, "Y-basis composition");
        detail::y_route_block(bblock, *ablock, nc, nb, na, a.measure(), mode, acc);
      }
      for (const auto& [e, c] : acc) out.add(k, i, e, c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tensor products. The pieces of (obj1 (x) obj2) are X(D) for D ample in
// A_i x A'_i', tagged with the image of D in the product of the ambient
// sets.

struct TensorPiece {
  std::size_t left, right;
  std::uint64_t local;  // D inside [|A_left|] x [|A'_right|]

  friend bool operator==(const TensorPiece&, const TensorPiece&) = default;
};

inline std::vector<TensorPiece> tensor_pieces(const PermObject& l, const PermObject& r, const Limits& lim = {}) {
  std::vector<TensorPiece> out;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t k = 0; k < r.size(); ++k) {
      std::size_t nl = l.pieces[i].size, nr = r.pieces[k].size;
      for (const auto& d : enumerate_ample({nl, nr}, lim)) out.push_back({i, k, d.mask().to_u64()});
    }
  return out;
}

/// Pieces (i, i, diagonal) of obj (x) obj.
inline std::vector<TensorPiece> diagonal_pieces(const PermObject& obj) {
  std::vector<TensorPiece> out;
  for (std::size_t i = 0; i < obj.size(); ++i) out.push_back({i, i, detail::diagonal_block(obj.pieces[i].size)});
  return out;
}

inline TransitivePiece tensor_piece(const PermObject& l, const PermObject& r, const TensorPiece& tp) {
  const auto& pl = l.pieces.at(tp.left);
  const auto& pr = r.pieces.at(tp.right);
  auto el = detail::piece_elements(pl), er = detail::piece_elements(pr);
  std::size_t nl = detail::tag_ambient(pl), nr = detail::tag_ambient(pr);
  if (nl * nr > (std::size_t{1} << 20)) throw CapacityError("tensor tag ambient set too large");
  BitMask tag;
  for (std::size_t p = 0; p < el.size(); ++p)
    for (std::size_t q = 0; q < er.size(); ++q)
      if (tp.local >> (p * er.size() + q) & 1U) tag.set(el[p] * nr + er[q]);
  return TransitivePiece{static_cast<std::size_t>(std::popcount(tp.local)), detail::flat_tag(nl * nr, std::move(tag))};
}

inline PermObject tensor_object(const PermObject& l, const PermObject& r, const std::vector<TensorPiece>& pieces) {
  PermObject out;
  for (const auto& tp : pieces) out.pieces.push_back(tensor_piece(l, r, tp));
  return out;
}

inline PermObject tensor_object(const PermObject& l, const PermObject& r, const Limits& lim = {}) {
  return tensor_object(l, r, tensor_pieces(l, r, lim));
}

namespace detail {

/// Orbit coefficients of M (x) M' on the block (t, s) of the product.
inline void tensor_block(const PermMatrix& m1, const PermMatrix& m2, const TensorPiece& t, const TensorPiece& s,
                         const Limits& lim, PermMatrix& out, std::size_t ti, std::size_t si) {
  auto b1 = m1.blocks().find({t.left, s.left});
  auto b2 = m2.blocks().find({t.right, s.right});
  if (b1 == m1.blocks().end() || b2 == m2.blocks().end()) return;
  std::size_t na = m1.source_size(s.left);
  std::size_t nb2 = m2.target_size(t.right), na2 = m2.source_size(s.right);
  // Elements of D_t and D_s as (first, second) local pairs.
  auto pairs = [](std::uint64_t local, std::size_t n2) {
    std::vector<std::pair<std::size_t, std::size_t>> v;
    for (std::uint64_t r = local; r != 0; r &= r - 1) {
      auto bit = static_cast<std::size_t>(std::countr_zero(r));
      v.push_back({bit / n2, bit % n2});
    }
    return v;
  };
  auto dt = pairs(t.local, nb2), ds = pairs(s.local, na2);
  std::uint64_t full_t = (std::uint64_t{1} << dt.size()) - 1, full_s = (std::uint64_t{1} << ds.size()) - 1;
  for (const auto& [e1, c1] : b1->second)
    for (const auto& [e2, c2] : b2->second) {
      struct Cand {
        std::uint64_t bit, first, second, tbit, sbit;
      };
      std::vector<Cand> cand;
      for (std::size_t p = 0; p < dt.size(); ++p)
        for (std::size_t q = 0; q < ds.size(); ++q) {
          std::uint64_t f = std::uint64_t{1} << (dt[p].first * na + ds[q].first);
          std::uint64_t g = std::uint64_t{1} << (dt[p].second * na2 + ds[q].second);
          if ((e1 & f) && (e2 & g))
            cand.push_back({std::uint64_t{1} << (p * ds.size() + q), f, g, std::uint64_t{1} << p, std::uint64_t{1} << q});
        }
      require_budget(cand.size(), lim.enum_bits, "tensor_matrix");
      Rational w = c1 * c2;
      for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << cand.size()); ++sub) {
        std::uint64_t q = 0, f = 0, g = 0, tb = 0, sb = 0;
        for (std::uint64_t rest = sub; rest != 0; rest &= rest - 1) {
          const auto& c = cand[static_cast<std::size_t>(std::countr_zero(rest))];
          q |= c.bit;
          f |= c.first;
          g |= c.second;
          tb |= c.tbit;
          sb |= c.sbit;
        }
        if (f == e1 && g == e2 && tb == full_t && sb == full_s) out.add(ti, si, q, w);
      }
    }
}

}  // namespace detail

/// Kronecker product restricted to chosen pieces of the target and source
/// tensor objects (pass the full piece lists for the whole product).
inline PermMatrix tensor_matrix(const PermMatrix& m1, const PermMatrix& m2, const std::vector<TensorPiece>& target_sel,
                                const std::vector<TensorPiece>& source_sel, const Limits& lim = {}) {
  if (!(m1.measure() == m2.measure())) throw ArgumentError("tensor_matrix: measure mismatch");
  PermMatrix out(m1.measure(), tensor_object(m1.source(), m2.source(), source_sel),
                 tensor_object(m1.target(), m2.target(), target_sel));
  for (std::size_t ti = 0; ti < target_sel.size(); ++ti)
    for (std::size_t si = 0; si < source_sel.size(); ++si)
      detail::tensor_block(m1, m2, target_sel[ti], source_sel[si], lim, out, ti, si);
  return out;
}

inline PermMatrix tensor_matrix(const PermMatrix& m1, const PermMatrix& m2, const Limits& lim = {}) {
  return tensor_matrix(m1, m2, tensor_pieces(m1.target(), m2.target(), lim),
                       tensor_pieces(m1.source(), m2.source(), lim), lim);
}

// ---------------------------------------------------------------------------
// Duality. Every object is self-dual; evaluation is the indicator of the
// diagonal orbit of each X(A) x X(A), coevaluation its transpose.

struct DualityData {
  PermMatrix ev;    // obj (x) obj -> unit
  PermMatrix coev;  // unit -> obj (x) obj
};

/// ev and coev on the summand of obj (x) obj spanned by the diagonal pieces;
/// both vanish on every other piece.
inline DualityData diagonal_duality(const MeasureSpec& m, const PermObject& obj) {
  auto diag = diagonal_pieces(obj);
  auto sub = tensor_object(obj, obj, diag);
  PermMatrix ev(m, sub, unit_object()), coev(m, unit_object(), sub);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    std::uint64_t full = (std::uint64_t{1} << sub.pieces[i].size) - 1;
    ev.add(0, i, full, 1);
    coev.add(i, 0, full, 1);
  }
  return {ev, coev};
}

inline DualityData duality_data(const MeasureSpec& m, const PermObject& obj, const Limits& lim = {}) {
  auto all = tensor_pieces(obj, obj, lim);
  auto whole = tensor_object(obj, obj, all);
  PermMatrix ev(m, whole, unit_object()), coev(m, unit_object(), whole);
  for (const auto& d : diagonal_pieces(obj)) {
    auto pos = static_cast<std::size_t>(std::find(all.begin(), all.end(), d) - all.begin());
    std::uint64_t full = (std::uint64_t{1} << whole.pieces[pos].size) - 1;
    ev.add(0, pos, full, 1);
    coev.add(pos, 0, full, 1);
  }
  return {ev, coev};
}

enum class TraceMode { categorical, closed_form };

/// Scalar value of an endomorphism of the unit object.
inline Rational unit_scalar(const PermMatrix& m) {
  if (!(m.source() == unit_object()) || !(m.target() == unit_object())) throw ArgumentError("not an endomorphism of the unit");
  return m.get(0, 0, 1);
}

inline Rational trace(const PermMatrix& m, TraceMode mode = TraceMode::categorical, const Limits& lim = {}) {
  if (!(m.source() == m.target())) throw ArgumentError("trace of a non-endomorphism");
  const auto& obj = m.source();
  if (mode == TraceMode::closed_form) {
    Rational t = 0;
    for (std::size_t i = 0; i < obj.size(); ++i) {
      std::size_t n = obj.pieces[i].size;
      t += m.measure().power(static_cast<long>(n) - 1) * m.get(i, i, detail::diagonal_block(n));
    }
    return t;
  }
  // ev o (M (x) id) o coev, computed on the diagonal summand where ev and
  // coev live.
  auto [ev, coev] = diagonal_duality(m.measure(), obj);
  auto diag = diagonal_pieces(obj);
  auto mid = tensor_matrix(m, identity_matrix(m.measure(), obj), diag, diag, lim);
  auto r = compose(ev, compose(mid, coev, ComposeMode::oracle, lim), ComposeMode::oracle, lim);
  return unit_scalar(r);
}

inline Rational dimension(const MeasureSpec& m, const PermObject& obj, const Limits& lim = {}) {
  return trace(identity_matrix(m, obj), TraceMode::categorical, lim);
}

/// The two zig-zag composites obj -> obj:
///   (ev (x) id) o (id (x) coev)  and  (id (x) ev) o (coev (x) id).
/// Both must be the identity.
inline std::pair<PermMatrix, PermMatrix> snake_composites(const MeasureSpec& m, const PermObject& obj,
                                                          const Limits& lim = {}) {
  auto [ev, coev] = diagonal_duality(m, obj);
  const auto& delta = ev.source();
  auto id = identity_matrix(m, obj);

  // Middle object: union of obj (x) delta and delta (x) obj, matched by tag.
  PermObject mid = tensor_object(obj, delta, lim);
  for (const auto& p : tensor_object(delta, obj, lim).pieces)
    if (!find_piece(mid, p)) mid.pieces.push_back(p);

  auto zig = [&](const PermMatrix& first, const PermMatrix& second) {
    auto a = reindex(first, obj, mid);
    auto b = reindex(second, mid, obj);
    return compose(b, a, ComposeMode::oracle, lim);
  };
  auto s1 = zig(tensor_matrix(id, coev, lim), tensor_matrix(ev, id, lim));
  auto s2 = zig(tensor_matrix(coev, id, lim), tensor_matrix(id, ev, lim));
  return {s1, s2};
}

}  // namespace cantorperm
