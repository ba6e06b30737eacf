#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cantorperm/errors.hpp"

namespace cantorperm {

/// Arbitrary-width set of non-negative integers, compared as the unsigned
/// integer whose binary digits it holds. Trailing zero words are never kept,
/// so equal sets have equal representations.
class BitMask {
 public:
  BitMask() = default;
  explicit BitMask(std::uint64_t word) {
    if (word != 0) words_.push_back(word);
  }

  static BitMask full(std::size_t nbits) {
    BitMask m;
    m.words_.assign((nbits + 63) / 64, ~std::uint64_t{0});
    if (nbits % 64 != 0 && !m.words_.empty())
      m.words_.back() = (std::uint64_t{1} << (nbits % 64)) - 1;
    m.trim();
    return m;
  }

  bool test(std::size_t i) const {
    std::size_t w = i / 64;
    return w < words_.size() && ((words_[w] >> (i % 64)) & 1U);
  }
  void set(std::size_t i) {
    std::size_t w = i / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (i % 64);
  }
  void reset(std::size_t i) {
    std::size_t w = i / 64;
    if (w < words_.size()) {
      words_[w] &= ~(std::uint64_t{1} << (i % 64));
      trim();
    }
  }

  bool none() const { return words_.empty(); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  /// One past the highest set bit (0 for the empty set).
  std::size_t bit_width() const {
    if (words_.empty()) return 0;
    return 64 * (words_.size() - 1) + static_cast<std::size_t>(std::bit_width(words_.back()));
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        f(64 * w + static_cast<std::size_t>(std::countr_zero(word)));
        word &= word - 1;
      }
    }
  }
  std::vector<std::size_t> bits() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  bool fits_u64() const { return words_.size() <= 1; }
  std::uint64_t to_u64() const {
    if (!fits_u64()) throw CapacityError("bitmask wider than 64 bits");
    return words_.empty() ? 0 : words_[0];
  }

  /// Lowercase hex, most significant nibble first; the empty set is "0".
  std::string to_hex() const {
    if (words_.empty()) return "0";
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t w = words_.size(); w-- > 0;) {
      for (int shift = 60; shift >= 0; shift -= 4)
        out.push_back(digits[(words_[w] >> shift) & 0xF]);
    }
    auto first = out.find_first_not_of('0');
    return out.substr(first);
  }

  static BitMask from_hex(std::string_view hex) {
    if (hex.starts_with("0x")) hex.remove_prefix(2);
    if (hex.empty()) throw ArgumentError("empty hex mask");
    BitMask m;
    std::size_t nibble = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++nibble) {
      char c = *it;
      unsigned v;
      if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
      else throw ArgumentError("invalid hex digit in mask: " + std::string(hex));
      if (v == 0) continue;
      std::size_t w = nibble / 16;
      if (w >= m.words_.size()) m.words_.resize(w + 1, 0);
      m.words_[w] |= std::uint64_t{v} << (4 * (nibble % 16));
    }
    return m;
  }

  BitMask& operator|=(const BitMask& o) {
    if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitMask& operator&=(const BitMask& o) {
    if (words_.size() > o.words_.size()) words_.resize(o.words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    trim();
    return *this;
  }
  friend BitMask operator|(BitMask a, const BitMask& b) { return a |= b; }
  friend BitMask operator&(BitMask a, const BitMask& b) { return a &= b; }

  /// a ⊆ b
  bool subset_of(const BitMask& o) const { return (*this & o) == *this; }

  friend bool operator==(const BitMask&, const BitMask&) = default;
  friend std::strong_ordering operator<=>(const BitMask& a, const BitMask& b) {
    if (a.words_.size() != b.words_.size()) return a.words_.size() <=> b.words_.size();
    for (std::size_t i = a.words_.size(); i-- > 0;)
      if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto w : words_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x100000001b3ULL;
    return h;
  }

 private:
  void trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
  }
  std::vector<std::uint64_t> words_;
};

}  // namespace cantorperm

template <>
struct std::hash<cantorperm::BitMask> {
  std::size_t operator()(const cantorperm::BitMask& m) const noexcept { return m.hash(); }
};
