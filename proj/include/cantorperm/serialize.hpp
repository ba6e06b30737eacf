#pragma once

// JSON forms of the library's values. Rationals are "p/q" strings, subsets
// are lowercase hex masks (most significant nibble first).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/linmon.hpp"
#include "cantorperm/permcat.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm::json {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ArgumentError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError(std::string("field \"") + key + "\" has the wrong type");
  }
}

inline std::uint64_t small_mask(const std::string& hex) {
  auto m = BitMask::from_hex(hex);
  if (!m.fits_u64()) throw CapacityError("mask " + hex + " does not fit in 64 bits");
  return m.to_u64();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ProductSubset

inline Json to_json(const ProductSubset& s) {
  return Json{{"factor_sizes", s.factor_sizes()}, {"mask_hex", s.mask().to_hex()}};
}

inline ProductSubset product_subset_from_json(const Json& j) {
  return ProductSubset(detail::get_field<std::vector<std::size_t>>(j, "factor_sizes"),
                       BitMask::from_hex(detail::get_field<std::string>(j, "mask_hex")));
}

// ---------------------------------------------------------------------------
// FormalGSet: [{size, multiplicity, ambient_tag?}]. A tag is written as its
// mask with the ambient factor sizes alongside.

inline Json piece_fields(const TransitivePiece& p) {
  Json j{{"size", p.size}};
  if (p.tag) {
    j["ambient_tag"] = p.tag->mask().to_hex();
    j["ambient_factor_sizes"] = p.tag->factor_sizes();
  }
  return j;
}

inline TransitivePiece piece_from_json(const Json& j) {
  TransitivePiece p{detail::get_field<std::size_t>(j, "size"), std::nullopt};
  if (p.size == 0) throw ArgumentError("piece size must be positive");
  if (j.contains("ambient_tag")) {
    std::vector<std::size_t> sizes;
    if (j.contains("ambient_factor_sizes")) sizes = detail::get_field<std::vector<std::size_t>>(j, "ambient_factor_sizes");
    else if (j.contains("ambient_points")) sizes = {detail::get_field<std::size_t>(j, "ambient_points")};
    else throw ArgumentError("ambient_tag needs ambient_factor_sizes");
    p.tag = ProductSubset(std::move(sizes), BitMask::from_hex(detail::get_field<std::string>(j, "ambient_tag")));
    if (p.tag->count() != p.size) throw ArgumentError("piece size differs from the size of its ambient tag");
  }
  return p;
}

inline Json to_json(const FormalGSet& s) {
  Json arr = Json::array();
  for (const auto& e : s.entries()) {
    Json j = piece_fields(e.piece);
    Json out{{"size", e.piece.size}, {"multiplicity", e.multiplicity}};
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "size") out[it.key()] = it.value();
    arr.push_back(std::move(out));
  }
  return arr;
}

inline FormalGSet gset_from_json(const Json& j) {
  if (!j.is_array()) throw ArgumentError("a G-set is a JSON list of pieces");
  FormalGSet s;
  for (const auto& e : j) {
    std::size_t mult = e.contains("multiplicity") ? detail::get_field<std::size_t>(e, "multiplicity") : 1;
    s.add(piece_from_json(e), mult);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Equivalence families and quotients

inline Json to_json(const EqRelFamily& f) {
  Json members = Json::array();
  for (auto m : f.members()) members.push_back(BitMask(m).to_hex());
  return Json{{"base_size", f.base().size}, {"members", members}};
}

inline EqRelFamily eqrel_from_json(const Json& j) {
  std::set<std::uint64_t> members;
  for (const auto& h : detail::get_field<std::vector<std::string>>(j, "members")) members.insert(detail::small_mask(h));
  return EqRelFamily(detail::get_field<std::size_t>(j, "base_size"), std::move(members));
}

inline Json to_json(const QuotientDescription& q) {
  return Json{{"base_size", q.base().size}, {"group_order", q.order()}, {"group", q.group()}};
}

// ---------------------------------------------------------------------------
// PermObject: a list of pieces, or {"y": n} / {"x": n}.

inline Json to_json(const PermObject& obj) {
  Json arr = Json::array();
  for (const auto& p : obj.pieces) arr.push_back(piece_fields(p));
  return arr;
}

inline PermObject perm_object_from_json(const Json& j, const Limits& lim = {}) {
  if (j.is_object() && j.contains("y")) return y_object(FinSet{detail::get_field<std::size_t>(j, "y")}, lim);
  if (j.is_object() && j.contains("x")) return x_object(detail::get_field<std::size_t>(j, "x"));
  if (!j.is_array()) throw ArgumentError("an object is a list of pieces, {\"y\": n} or {\"x\": n}");
  PermObject obj;
  for (const auto& p : j) {
    auto piece = piece_from_json(p);
    if (!piece.tag) throw ArgumentError("pieces of a matrix object need an ambient tag");
    if (piece.tag->factor_sizes().size() != 1)
      piece.tag = ProductSubset({piece.tag->points()}, piece.tag->mask());
    obj.pieces.push_back(std::move(piece));
  }
  return obj;
}

// ---------------------------------------------------------------------------
// PermMatrix

inline Json to_json(const PermMatrix& m) {
  Json entries = Json::array();
  for (const auto& [bi, block] : m.blocks())
    for (const auto& [mask, c] : block)
      entries.push_back(Json{{"target_piece", bi.first},
                             {"source_piece", bi.second},
                             {"mask_hex", BitMask(mask).to_hex()},
                             {"coeff", to_string(c)}});
  return Json{{"measure", m.measure().name()},
              {"source", to_json(m.source())},
              {"target", to_json(m.target())},
              {"entries", entries}};
}

inline PermMatrix perm_matrix_from_json(const Json& j, const Limits& lim = {}) {
  auto measure = MeasureSpec::from_name(detail::get_field<std::string>(j, "measure"));
  if (!j.contains("source") || !j.contains("target")) throw ArgumentError("matrix needs source and target");
  PermMatrix m(measure, perm_object_from_json(j.at("source"), lim), perm_object_from_json(j.at("target"), lim));
  if (j.contains("entries")) {
    for (const auto& e : j.at("entries")) {
      auto t = detail::get_field<std::size_t>(e, "target_piece");
      auto s = detail::get_field<std::size_t>(e, "source_piece");
      m.add(t, s, detail::small_mask(detail::get_field<std::string>(e, "mask_hex")),
            parse_rational(detail::get_field<std::string>(e, "coeff")));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Algebra reports

inline Json to_json(const MonAlgElement& x) {
  Json terms = Json::array();
  for (const auto& [m, c] : x.terms) terms.push_back(Json{{"mask_hex", BitMask(m).to_hex()}, {"coeff", to_string(c)}});
  return Json{{"terms", terms}};
}

inline Json to_json(const AlgebraReport& r) {
  Json j{{"kind", kind_name(r.kind)},
         {"n", r.n},
         {"algebra_dim", r.algebra_dim},
         {"radical_dim", r.radical_dim},
         {"semisimple", r.semisimple}};
  if (r.certificate_prime) j["certificate_prime"] = *r.certificate_prime;
  j["certificate"] = r.certificate;
  return j;
}

inline Json to_json(const TraceWitness& w) {
  Json j = to_json(w.element);
  j["nilpotency_exponent"] = w.nilpotency_exponent;
  j["trace"] = to_string(w.trace);
  return j;
}

}  // namespace cantorperm::json
