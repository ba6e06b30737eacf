#pragma once

// Exact kernels and ranks of integer matrices.
//
// Both kernel routines return the same canonical basis: one vector per
// non-pivot column f (pivots chosen as the leftmost non-zero column, top
// row first), with x_f = 1, x_g = 0 for the other non-pivot columns and
// x_{pivot i} = -R[i][f] where R is the reduced row echelon form over Q.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

using IntMatrix = std::vector<std::vector<BigInt>>;

struct KernelResult {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  std::vector<std::vector<Rational>> basis;
};

namespace detail {

inline std::size_t columns(const IntMatrix& m) { return m.empty() ? 0 : m.front().size(); }

inline void check_rectangular(const IntMatrix& m) {
  for (const auto& row : m)
    if (row.size() != columns(m)) throw ArgumentError("matrix rows have different lengths");
}

inline KernelResult kernel_from_rref(std::size_t ncols, const std::vector<std::size_t>& pivots,
                                     const std::vector<std::vector<Rational>>& rref_free_cols,
                                     const std::vector<std::size_t>& free) {
  KernelResult out;
  out.rank = pivots.size();
  out.pivots = pivots;
  for (std::size_t k = 0; k < free.size(); ++k) {
    std::vector<Rational> x(ncols, Rational(0));
    x[free[k]] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -rref_free_cols[i][k];
    out.basis.push_back(std::move(x));
  }
  return out;
}

inline std::vector<std::size_t> free_columns(std::size_t ncols, const std::vector<std::size_t>& pivots) {
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < ncols; ++c)
    if (!is_pivot[c]) free.push_back(c);
  return free;
}

}  // namespace detail

/// Fraction-free Gauss-Jordan elimination (every intermediate entry is a
/// minor, so each division is exact). At the end all pivots equal the same
/// determinant d and R = M / d.
inline KernelResult bareiss_kernel(IntMatrix m) {
  detail::check_rectangular(m);
  std::size_t rows = m.size(), cols = detail::columns(m);
  std::vector<std::size_t> pivots;
  BigInt prev = 1, t;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const BigInt piv = m[r][c];
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const BigInt f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == c) continue;
        // m[i][j] = (piv * m[i][j] - f * m[r][j]) / prev
        mpz_mul(t.get_mpz_t(), piv.get_mpz_t(), m[i][j].get_mpz_t());
        mpz_submul(t.get_mpz_t(), f.get_mpz_t(), m[r][j].get_mpz_t());
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    pivots.push_back(c);
    prev = piv;
    ++r;
  }
  auto free = detail::free_columns(cols, pivots);
  std::vector<std::vector<Rational>> rf(pivots.size(), std::vector<Rational>(free.size()));
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    const BigInt& d = m[i][pivots[i]];
    for (std::size_t k = 0; k < free.size(); ++k) {
      rf[i][k] = Rational(m[i][free[k]], d);
      rf[i][k].canonicalize();
    }
  }
  return detail::kernel_from_rref(cols, pivots, rf, free);
}

// ---------------------------------------------------------------------------
// Arithmetic modulo word-sized primes.

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  for (; e != 0; e >>= 1, a = mulmod(a, a, p))
    if (e & 1U) r = mulmod(r, a, p);
  return r;
}

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s && composite; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

struct ModRref {
  std::vector<std::size_t> pivots;
  std::vector<std::vector<std::uint64_t>> rows;  // reduced pivot rows
};

inline ModRref rref_mod(const IntMatrix& m, std::uint64_t p) {
  std::size_t rows = m.size(), cols = columns(m);
  std::vector<std::vector<std::uint64_t>> a(rows, std::vector<std::uint64_t>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = mpz_fdiv_ui(m[i][j].get_mpz_t(), p);
  ModRref out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::uint64_t inv = powmod(a[r][c], p - 2, p);
    for (std::size_t j = c; j < cols; ++j) a[r][j] = mulmod(a[r][j], inv, p);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      std::uint64_t f = p - a[i][c];
      auto& row = a[i];
      const auto& prow = a[r];
      for (std::size_t j = c; j < cols; ++j)
        if (prow[j] != 0) row[j] = (row[j] + mulmod(f, prow[j], p)) % p;
    }
    out.pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  out.rows = std::move(a);
  return out;
}

/// p/q with |p|, q <= sqrt(modulus / 2) and p/q = a (mod modulus), if any.
inline std::optional<Rational> rational_reconstruct(const BigInt& a, const BigInt& modulus) {
  BigInt bound = sqrt(BigInt(modulus / 2));
  BigInt r0 = modulus, r1 = a, t0 = 0, t1 = 1;
  while (r1 > bound) {
    BigInt q = r0 / r1;
    BigInt r2 = r0 - q * r1;
    BigInt t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return std::nullopt;
  BigInt g = gcd(r1, t1);
  if (g != 1) return std::nullopt;
  Rational out(r1, t1);
  out.canonicalize();
  return out;
}

}  // namespace detail

/// Rank of m modulo the prime p.
inline std::size_t rank_mod_p(const IntMatrix& m, std::uint64_t p) {
  detail::check_rectangular(m);
  if (p >= (std::uint64_t{1} << 62) || !detail::is_prime_u64(p)) throw ArgumentError("modulus must be a prime below 2^62");
  return detail::rref_mod(m, p).pivots.size();
}

/// Kernel by reduction modulo a sequence of primes, Chinese remaindering and
/// rational reconstruction of the non-pivot columns of the RREF. The result
/// is accepted only after exact verification m * x = 0 for every basis
/// vector; since the vectors are independent and their number equals
/// cols - rank_p >= cols - rank_Q, this certifies rank and kernel over Q.
inline KernelResult multimodular_kernel(const IntMatrix& m, std::size_t max_primes = 4096) {
  detail::check_rectangular(m);
  std::size_t cols = detail::columns(m);
  std::uint64_t p = (std::uint64_t{1} << 61) - 1;
  BigInt modulus = 1;
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> free;
  std::vector<std::vector<BigInt>> residues;  // pivot row i, free column k
  bool have = false;
  auto better = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return a.size() > b.size() || (a.size() == b.size() && a < b);
  };
  for (std::size_t used = 0; used < max_primes; ++used) {
    do --p;
    while (!detail::is_prime_u64(p));
    auto rr = detail::rref_mod(m, p);
    if (!have || better(rr.pivots, pivots)) {
      // First prime, or every earlier prime was unlucky.
      have = true;
      pivots = rr.pivots;
      free = detail::free_columns(cols, pivots);
      residues.assign(pivots.size(), std::vector<BigInt>(free.size()));
      modulus = 1;
    } else if (rr.pivots != pivots) {
      continue;
    }
    BigInt bp = static_cast<unsigned long>(p);
    BigInt inv;
    mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), bp.get_mpz_t());
    for (std::size_t i = 0; i < pivots.size(); ++i)
      for (std::size_t k = 0; k < free.size(); ++k) {
        // x = r (mod modulus), x = v (mod p)
        BigInt& r = residues[i][k];
        BigInt v = static_cast<unsigned long>(rr.rows[i][free[k]]);
        BigInt h = ((v - r) * inv) % bp;
        if (h < 0) h += bp;
        r += modulus * h;
      }
    modulus *= bp;

    std::vector<std::vector<Rational>> rf(pivots.size(), std::vector<Rational>(free.size()));
    bool ok = true;
    for (std::size_t i = 0; i < pivots.size() && ok; ++i)
      for (std::size_t k = 0; k < free.size() && ok; ++k) {
        auto q = detail::rational_reconstruct(residues[i][k], modulus);
        if (!q) ok = false;
        else rf[i][k] = *q;
      }
    if (!ok) continue;
    auto result = detail::kernel_from_rref(cols, pivots, rf, free);
    bool verified = true;
    for (const auto& x : result.basis) {
      BigInt den = 1;
      for (const auto& v : x) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
      std::vector<BigInt> xi(cols);
      for (std::size_t j = 0; j < cols; ++j) xi[j] = x[j].get_num() * (den / x[j].get_den());
      for (const auto& row : m) {
        BigInt s = 0;
        for (std::size_t j = 0; j < cols; ++j)
          if (xi[j] != 0) mpz_addmul(s.get_mpz_t(), row[j].get_mpz_t(), xi[j].get_mpz_t());
        if (s != 0) {
          verified = false;
          break;
        }
      }
      if (!verified) break;
    }
    if (verified) return result;
  }
  throw CapacityError("multimodular_kernel: no verified kernel after " + std::to_string(max_primes) + " primes");
}

}  // namespace cantorperm
