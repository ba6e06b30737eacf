#pragma once

// Matrix monoids over F2 and the Boolean semiring, their contracted monoid
// algebras over Q, and the functor phi sending a matrix to the Y-indicator
// of its support.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/exact_linalg.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/measures.hpp"
#include "cantorperm/permcat.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

enum class SemiringKind { F2, Bool };

inline std::string kind_name(SemiringKind k) { return k == SemiringKind::F2 ? "f2" : "bool"; }

inline SemiringKind kind_from_name(const std::string& s) {
  if (s == "f2") return SemiringKind::F2;
  if (s == "bool") return SemiringKind::Bool;
  throw ArgumentError("unknown semiring \"" + s + "\" (expected f2 or bool)");
}

/// F2 pairs with mu, Bool with nu.
inline MeasureSpec measure_for(SemiringKind k) { return k == SemiringKind::F2 ? MeasureSpec::mu() : MeasureSpec::nu(); }

/// A rows x cols 0/1 matrix; entry (i, j) is bit i * cols + j.
struct SRMatrix {
  SemiringKind kind = SemiringKind::F2;
  std::size_t rows = 1, cols = 1;
  std::uint64_t support = 0;

  SRMatrix() = default;
  SRMatrix(SemiringKind k, std::size_t r, std::size_t c, std::uint64_t s) : kind(k), rows(r), cols(c), support(s) {
    if (r == 0 || c == 0) throw ArgumentError("semiring matrix dimensions must be positive");
    if (r * c > 64) throw CapacityError("semiring matrix has more than 64 entries");
    if (r * c < 64 && (s >> (r * c)) != 0) throw ArgumentError("support has bits outside the matrix");
  }

  static SRMatrix identity(SemiringKind k, std::size_t n) { return {k, n, n, detail::diagonal_block(n)}; }

  bool at(std::size_t i, std::size_t j) const { return (support >> (i * cols + j)) & 1U; }
  bool is_zero() const { return support == 0; }

  friend bool operator==(const SRMatrix&, const SRMatrix&) = default;
};

inline SRMatrix sr_multiply(const SRMatrix& a, const SRMatrix& b) {
  if (a.kind != b.kind) throw ArgumentError("sr_multiply: semiring mismatch");
  if (a.cols != b.rows) throw ArgumentError("sr_multiply: inner dimensions differ");
  return {a.kind, a.rows, b.cols,
          detail::semiring_product(a.support, b.support, a.rows, a.cols, b.cols, a.kind == SemiringKind::F2)};
}

/// Kronecker product; row (i, i') is i * b.rows + i'.
inline SRMatrix sr_kronecker(const SRMatrix& a, const SRMatrix& b) {
  if (a.kind != b.kind) throw ArgumentError("sr_kronecker: semiring mismatch");
  SRMatrix out(a.kind, a.rows * b.rows, a.cols * b.cols, 0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a.at(i, j))
        for (std::size_t k = 0; k < b.rows; ++k)
          for (std::size_t l = 0; l < b.cols; ++l)
            if (b.at(k, l)) out.support |= std::uint64_t{1} << ((i * b.rows + k) * out.cols + j * b.cols + l);
  return out;
}

/// All non-zero n x n matrices in mask order.
inline std::vector<SRMatrix> enumerate_nonzero(SemiringKind k, std::size_t n, const Limits& lim = {}) {
  if (n == 0) throw ArgumentError("matrix size must be positive");
  if (n * n > 25) throw CapacityError("enumerate_nonzero: n^2 = " + std::to_string(n * n) + " exceeds 25 bits");
  require_budget(n * n, lim.enum_bits, "enumerate_nonzero");
  std::vector<SRMatrix> out;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << (n * n)); ++s) out.emplace_back(k, n, n, s);
  return out;
}

// ---------------------------------------------------------------------------
// phi

inline PermMatrix phi(const SRMatrix& a, const Limits& lim = {}) {
  return indicator_matrix(measure_for(a.kind), FinSet{a.cols}, FinSet{a.rows},
                          ProductSubset({a.rows, a.cols}, BitMask(a.support)), Basis::Y, lim);
}

/// Element of the contracted algebra of n x n matrices: coefficients on the
/// basis u_m, m non-zero.
struct MonAlgElement {
  SemiringKind kind = SemiringKind::F2;
  std::size_t n = 1;
  std::map<std::uint64_t, Rational> terms;

  bool is_zero() const { return terms.empty(); }

  void add(std::uint64_t m, const Rational& c) {
    if (m == 0) return;  // u_0 = 0
    auto [it, inserted] = terms.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    } else if (c == 0) {
      terms.erase(it);
    } else {
      it->second.canonicalize();
    }
  }

  friend bool operator==(const MonAlgElement&, const MonAlgElement&) = default;
};

inline MonAlgElement basis_element(SemiringKind k, std::size_t n, std::uint64_t m) {
  MonAlgElement x{k, n, {}};
  x.add(m, 1);
  return x;
}

inline MonAlgElement algebra_multiply(const MonAlgElement& x, const MonAlgElement& y) {
  if (x.kind != y.kind || x.n != y.n) throw ArgumentError("algebra_multiply: elements of different algebras");
  MonAlgElement out{x.kind, x.n, {}};
  bool parity = x.kind == SemiringKind::F2;
  for (const auto& [a, ca] : x.terms)
    for (const auto& [b, cb] : y.terms) out.add(detail::semiring_product(a, b, x.n, x.n, x.n, parity), ca * cb);
  return out;
}

inline MonAlgElement algebra_add(const MonAlgElement& x, const MonAlgElement& y) {
  if (x.kind != y.kind || x.n != y.n) throw ArgumentError("algebra_add: elements of different algebras");
  MonAlgElement out = x;
  for (const auto& [m, c] : y.terms) out.add(m, c);
  return out;
}

/// Linear extension of phi to the algebra.
inline PermMatrix phi_linear(const MonAlgElement& x, const Limits& lim = {}) {
  FinSet a{x.n};
  StratumVector y;
  for (const auto& [m, c] : x.terms) y[m] += c;
  return from_x_coefficients(measure_for(x.kind), a, a, convert_basis(y, BasisDirection::to_X, lim), lim);
}

/// Smallest k >= 1 with x^k = 0, or nullopt if none up to max_power.
inline std::optional<std::size_t> nilpotency_exponent(const MonAlgElement& x, std::size_t max_power) {
  if (x.is_zero()) return 1;
  MonAlgElement p = x;
  for (std::size_t k = 2; k <= max_power; ++k) {
    p = algebra_multiply(p, x);
    if (p.is_zero()) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Radical of the contracted algebra via the trace form of the regular
// representation: Gram(a, b) = #{c != 0 : (ab)c = c}.

class ContractedAlgebra {
 public:
  ContractedAlgebra(SemiringKind k, std::size_t n, const Limits& lim = {}) : kind_(k), n_(n) {
    if (n == 0) throw ArgumentError("matrix size must be positive");
    if (n > lim.algebra_n)
      throw CapacityError("contracted algebra of " + std::to_string(n) + "x" + std::to_string(n) +
                          " matrices exceeds the structure-analysis limit n <= " + std::to_string(lim.algebra_n));
    dim_ = (std::size_t{1} << (n * n)) - 1;
    bool parity = k == SemiringKind::F2;
    table_.assign((dim_ + 1) * (dim_ + 1), 0);
    for (std::uint64_t a = 1; a <= dim_; ++a)
      for (std::uint64_t b = 1; b <= dim_; ++b)
        table_[a * (dim_ + 1) + b] = static_cast<std::uint32_t>(detail::semiring_product(a, b, n, n, n, parity));
    fix_.assign(dim_ + 1, 0);
    for (std::uint64_t m = 1; m <= dim_; ++m)
      for (std::uint64_t c = 1; c <= dim_; ++c)
        if (product(m, c) == c) ++fix_[m];
  }

  SemiringKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  /// 2^(n^2) - 1; basis index i stands for the matrix with mask i + 1.
  std::size_t dim() const { return dim_; }

  std::uint64_t product(std::uint64_t a, std::uint64_t b) const { return table_[a * (dim_ + 1) + b]; }
  std::size_t fixed_points(std::uint64_t m) const { return m == 0 ? 0 : fix_[m]; }

  IntMatrix gram() const {
    IntMatrix g(dim_, std::vector<BigInt>(dim_));
    for (std::uint64_t a = 1; a <= dim_; ++a)
      for (std::uint64_t b = 1; b <= dim_; ++b)
        g[a - 1][b - 1] = static_cast<unsigned long>(fixed_points(product(a, b)));
    return g;
  }

 private:
  SemiringKind kind_;
  std::size_t n_;
  std::size_t dim_;
  std::vector<std::uint32_t> table_;
  std::vector<std::size_t> fix_;
};

inline IntMatrix gram_matrix(SemiringKind k, std::size_t n, const Limits& lim = {}) {
  return ContractedAlgebra(k, n, lim).gram();
}

enum class KernelMethod { bareiss, multimodular };

/// Prime recorded in full-rank certificates.
inline constexpr std::uint64_t certificate_prime = 2147483647;

struct AlgebraReport {
  SemiringKind kind;
  std::size_t n;
  std::size_t algebra_dim;
  std::size_t radical_dim;
  bool semisimple;
  std::optional<std::uint64_t> certificate_prime;  // full rank modulo this prime
  std::string certificate;
  std::vector<MonAlgElement> radical;
};

namespace detail {

inline MonAlgElement element_from_vector(SemiringKind k, std::size_t n, const std::vector<Rational>& v) {
  MonAlgElement x{k, n, {}};
  for (std::size_t i = 0; i < v.size(); ++i) x.add(i + 1, v[i]);
  return x;
}

}  // namespace detail

/// Exact basis of the kernel of the Gram form, each element checked
/// nilpotent. A full rank modulo the certificate prime short-cuts to the
/// empty basis.
inline std::vector<MonAlgElement> radical_basis(SemiringKind k, std::size_t n, const Limits& lim = {},
                                                KernelMethod method = KernelMethod::bareiss) {
  ContractedAlgebra alg(k, n, lim);
  auto g = alg.gram();
  if (rank_mod_p(g, certificate_prime) == alg.dim()) return {};
  auto ker = method == KernelMethod::bareiss ? bareiss_kernel(g) : multimodular_kernel(g);
  std::vector<MonAlgElement> out;
  for (const auto& v : ker.basis) {
    auto x = detail::element_from_vector(k, n, v);
    if (!nilpotency_exponent(x, alg.dim()))
      throw IntegrityError("a kernel element of the trace form is not nilpotent");
    out.push_back(std::move(x));
  }
  return out;
}

inline AlgebraReport semisimplicity_report(SemiringKind k, std::size_t n, const Limits& lim = {},
                                           KernelMethod method = KernelMethod::bareiss) {
  ContractedAlgebra alg(k, n, lim);
  AlgebraReport r{k, n, alg.dim(), 0, true, std::nullopt, "", {}};
  auto g = alg.gram();
  std::size_t rank_p = rank_mod_p(g, certificate_prime);
  if (rank_p == alg.dim()) {
    r.certificate_prime = certificate_prime;
    r.certificate = "Gram matrix has full rank " + std::to_string(rank_p) + " modulo " + std::to_string(certificate_prime);
    return r;
  }
  r.radical = radical_basis(k, n, lim, method);
  r.radical_dim = r.radical.size();
  r.semisimple = r.radical_dim == 0;
  if (r.semisimple) throw IntegrityError("Gram matrix is singular modulo the certificate prime but has trivial kernel");
  r.certificate = "exact kernel of the Gram form, " + std::to_string(r.radical_dim) + " nilpotent basis elements";
  return r;
}

/// True if w lies in the span of a kernel basis returned by radical_basis.
/// In that basis each element's largest index is its own free column,
/// carrying 1, and no other element touches it, so the coordinates of w
/// are read off directly.
inline bool in_radical_span(const MonAlgElement& w, const std::vector<MonAlgElement>& basis) {
  MonAlgElement rest = w;
  for (const auto& b : basis) {
    if (b.is_zero()) throw ArgumentError("in_radical_span: zero basis element");
    auto [free, one] = *b.terms.rbegin();
    if (one != 1) throw ArgumentError("in_radical_span: basis is not in canonical kernel form");
    auto it = w.terms.find(free);
    if (it == w.terms.end()) continue;
    Rational c = it->second;
    for (const auto& [m, v] : b.terms) rest.add(m, -c * v);
  }
  return rest.is_zero();
}

struct TraceWitness {
  MonAlgElement element;
  PermMatrix image;
  Rational trace;
  std::size_t nilpotency_exponent;
};

/// A radical element whose image on Y(n) has non-zero categorical trace.
/// Returns nullopt when the radical is zero; a non-zero radical with no
/// such element is an integrity error. Traces are linear, so if every
/// basis element has trace zero so does every combination.
inline std::optional<TraceWitness> find_trace_witness(std::size_t n, SemiringKind k = SemiringKind::Bool,
                                                      const Limits& lim = {}) {
  auto basis = radical_basis(k, n, lim);
  if (basis.empty()) return std::nullopt;
  std::size_t dim = (std::size_t{1} << (n * n)) - 1;
  for (const auto& r : basis) {
    auto image = phi_linear(r, lim);
    Rational closed = trace(image, TraceMode::closed_form, lim);
    if (closed == 0) continue;
    Rational cat = trace(image, TraceMode::categorical, lim);
    if (cat != closed) throw IntegrityError("categorical and closed-form traces disagree on a radical element");
    auto k_exp = nilpotency_exponent(r, dim);
    if (!k_exp) throw IntegrityError("radical element is not nilpotent");
    return TraceWitness{r, image, cat, *k_exp};
  }
  throw IntegrityError("the radical is non-zero but every element has zero trace");
}

}  // namespace cantorperm
