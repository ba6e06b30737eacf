#pragma once

// The two regular measures. A measure with parameter alpha assigns
// alpha^(n-1) to X(n) and alpha^(n-m) to any map X(n) -> X(m); the
// regularity identity on elementary fiber squares forces alpha in {-2, -1}.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

class MeasureSpec {
 public:
  static MeasureSpec mu() { return MeasureSpec(-2); }
  static MeasureSpec nu() { return MeasureSpec(-1); }

  static MeasureSpec from_name(const std::string& name) {
    if (name == "mu") return mu();
    if (name == "nu") return nu();
    throw ArgumentError("unknown measure \"" + name + "\" (expected mu or nu)");
  }

  long alpha() const { return alpha_; }
  std::string name() const { return alpha_ == -2 ? "mu" : "nu"; }

  /// alpha^k, k possibly negative.
  Rational power(long k) const { return rational_pow(alpha_, k); }

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;

 private:
  explicit MeasureSpec(long alpha) : alpha_(alpha) {}
  long alpha_;
};

inline Rational eval_measure(const MeasureSpec& m, const FormalGSet& s) {
  Rational total = 0;
  for (const auto& e : s.entries())
    total += Rational(static_cast<unsigned long>(e.multiplicity)) * m.power(static_cast<long>(e.piece.size) - 1);
  return total;
}

inline Rational map_measure(const MeasureSpec& m, const GMap& f) {
  return m.power(static_cast<long>(f.dom().size) - static_cast<long>(f.cod().size));
}

enum class YMeasureMethod { closed_form, decompose };

inline Rational y_measure(const MeasureSpec& m, std::size_t n, YMeasureMethod method, const Limits& lim = {}) {
  if (method == YMeasureMethod::decompose) return eval_measure(m, y_set_decompose({n}, lim));
  if (n == 0) return 0;
  if (m == MeasureSpec::nu()) return 1;
  return n % 2 == 1 ? 1 : 0;
}

inline Rational quotient_measure(const MeasureSpec& m, const QuotientDescription& q) {
  Rational v = m.power(static_cast<long>(q.base().size) - 1);
  v /= Rational(static_cast<unsigned long>(q.order()));
  return v;
}

// ---------------------------------------------------------------------------
// Univariate integer polynomials in alpha, just enough to solve the
// regularity constraints symbolically.

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

  /// coeff * alpha^k
  static Polynomial monomial(const BigInt& coeff, std::size_t k) {
    std::vector<BigInt> c(k + 1, 0);
    c[k] = coeff;
    return Polynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<BigInt>& coeffs() const { return c_; }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

  Rational operator()(const Rational& x) const {
    Rational acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + Rational(c_[i]);
    return acc;
  }

  /// Divides out the largest power of alpha.
  Polynomial without_zero_roots() const {
    std::size_t k = 0;
    while (k < c_.size() && c_[k] == 0) ++k;
    return Polynomial(std::vector<BigInt>(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end()));
  }

  /// All rational roots, by the rational root theorem.
  std::set<Rational> rational_roots() const {
    std::set<Rational> out;
    if (is_zero()) throw ArgumentError("the zero polynomial has every root");
    if (c_[0] == 0) out.insert(Rational(0));
    Polynomial p = without_zero_roots();
    if (p.degree() == 0) return out;
    auto divisors = [](BigInt v) {
      v = abs(v);
      std::vector<BigInt> d;
      for (BigInt i = 1; i * i <= v; ++i)
        if (v % i == 0) {
          d.push_back(i);
          if (i * i != v) d.push_back(v / i);
        }
      return d;
    };
    for (const auto& num : divisors(p.c_.front()))
      for (const auto& den : divisors(p.c_.back()))
        for (int sign : {1, -1}) {
          Rational cand(num * sign, den);
          cand.canonicalize();
          if (p(cand) == 0) out.insert(cand);
        }
    return out;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<BigInt> c_;
};

/// One regularity constraint rho(Z) rho(W) - rho(X) rho(Y) = 0 for an
/// elementary fiber square, with powers of alpha divided out.
struct RegularityConstraint {
  std::size_t base_size;       // |C|
  bool same_point;             // both maps collapse the same point of C
  Polynomial polynomial;
};

namespace detail {

/// Elementary surjection [m+1] -> [m] whose fiber over `point` is {point, m}.
inline GMap elementary_map(std::size_t m, std::size_t point) {
  std::vector<std::size_t> t(m + 1);
  for (std::size_t i = 0; i < m; ++i) t[i] = i;
  t[m] = point;
  return GMap(SetMap(m, std::move(t)));
}

/// rho_alpha of a formal G-set as a polynomial in alpha.
inline Polynomial symbolic_measure(const FormalGSet& s) {
  Polynomial p;
  for (const auto& e : s.entries())
    p += Polynomial::monomial(BigInt(static_cast<unsigned long>(e.multiplicity)), e.piece.size - 1);
  return p;
}

}  // namespace detail

/// Constraints from live decompositions of elementary fiber squares over
/// X(m), 1 <= m <= max_base (the "different point" case needs m >= 2).
inline std::vector<RegularityConstraint> regularity_constraints(std::size_t max_base = 3, const Limits& lim = {}) {
  std::vector<RegularityConstraint> out;
  for (std::size_t m = 1; m <= max_base; ++m) {
    for (bool same : {true, false}) {
      if (!same && m < 2) continue;
      GMap f = detail::elementary_map(m, 0);
      GMap g = detail::elementary_map(m, same ? 0 : 1);
      auto z = x_product_decompose(f, g, lim);
      Polynomial lhs = detail::symbolic_measure(z) * Polynomial::monomial(1, m - 1);
      Polynomial rhs = Polynomial::monomial(1, m) * Polynomial::monomial(1, m);
      out.push_back({m, same, (lhs - rhs).without_zero_roots()});
    }
  }
  return out;
}

/// Non-zero rational alphas satisfying every regularity constraint.
inline std::vector<Rational> solve_regular_parameters(const Limits& lim = {}) {
  auto constraints = regularity_constraints(3, lim);
  std::set<Rational> candidates;
  bool first = true;
  for (const auto& c : constraints) {
    if (c.polynomial.is_zero()) continue;
    auto roots = c.polynomial.rational_roots();
    if (first) {
      candidates = roots;
      first = false;
    } else {
      std::set<Rational> keep;
      for (const auto& r : candidates)
        if (roots.count(r)) keep.insert(r);
      candidates = std::move(keep);
    }
  }
  if (first) throw IntegrityError("no non-trivial regularity constraint was generated");
  candidates.erase(Rational(0));
  return {candidates.begin(), candidates.end()};
}

// ---------------------------------------------------------------------------
// The ring of all measure values, embedded in Q x Q by (mu, nu). The first
// coordinate always has odd denominator.

class ThetaElement {
 public:
  ThetaElement(Rational mu_coord, Rational nu_coord) : mu_(std::move(mu_coord)), nu_(std::move(nu_coord)) {
    mu_.canonicalize();
    nu_.canonicalize();
    if (mpz_even_p(mu_.get_den_mpz_t()))
      throw IntegrityError("theta element " + to_string(mu_) + " has even denominator in its mu coordinate");
  }

  const Rational& mu() const { return mu_; }
  const Rational& nu() const { return nu_; }

  friend bool operator==(const ThetaElement&, const ThetaElement&) = default;

 private:
  Rational mu_, nu_;
};

inline ThetaElement theta_of(const FormalGSet& s) {
  return {eval_measure(MeasureSpec::mu(), s), eval_measure(MeasureSpec::nu(), s)};
}

inline ThetaElement theta_of(const QuotientDescription& q) {
  return {quotient_measure(MeasureSpec::mu(), q), quotient_measure(MeasureSpec::nu(), q)};
}

enum class ThetaOp { add, mul };

inline ThetaElement theta_arith(const ThetaElement& a, const ThetaElement& b, ThetaOp op) {
  if (op == ThetaOp::add) return {a.mu() + b.mu(), a.nu() + b.nu()};
  return {a.mu() * b.mu(), a.nu() * b.nu()};
}

}  // namespace cantorperm
