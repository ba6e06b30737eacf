#pragma once

// Replays every finitary claim at desk scale and reports one line per claim.

#include <chrono>
#include <cstddef>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/linmon.hpp"
#include "cantorperm/measures.hpp"
#include "cantorperm/permcat.hpp"
#include "cantorperm/rational.hpp"

namespace cantorperm {

enum class SelftestLevel { quick, full };

struct SelftestOptions {
  SelftestLevel level = SelftestLevel::quick;
  Limits limits{};
  /// Replaceable so that a broken solver can be shown to be caught.
  std::function<std::vector<Rational>(const Limits&)> solver = [](const Limits& lim) {
    return solve_regular_parameters(lim);
  };
};

struct ClaimResult {
  std::string claim;
  bool passed;
  std::string detail;
  double seconds;
};

namespace detail {

using Check = std::function<std::string(const SelftestOptions&)>;  // empty string on success

inline std::string check_growth(const SelftestOptions& o) {
  const long expected[] = {1, 7, 193, 63775};
  for (std::size_t n = 1; n <= 4; ++n) {
    auto ie = count_ample_power2(n, CountMethod::inclusion_exclusion, o.limits);
    auto en = count_ample_power2(n, CountMethod::enumerate, o.limits);
    if (ie != expected[n - 1] || en != ie) return "f(" + std::to_string(n) + ") = " + ie.get_str();
  }
  return "";
}

inline std::string check_solve(const SelftestOptions& o) {
  auto alphas = o.solver(o.limits);
  if (alphas != std::vector<Rational>{Rational(-2), Rational(-1)}) {
    std::string got;
    for (const auto& a : alphas) got += (got.empty() ? "" : ", ") + to_string(a);
    return "alphas {" + got + "}";
  }
  return "";
}

/// n = |A| = |B| = |C| + 1 for elementary surjections A -> C <- B.
inline std::string check_elementary_squares(const SelftestOptions& o) {
  using Profile = std::map<std::size_t, std::size_t, std::greater<>>;
  for (std::size_t n = 2; n <= 5; ++n) {
    auto same = x_product_decompose(elementary_map(n - 1, 0), elementary_map(n - 1, 0), o.limits).size_profile();
    if (same != Profile{{n + 2, 1}, {n + 1, 4}, {n, 2}}) return "same point, n = " + std::to_string(n);
    if (n >= 3) {
      auto diff = x_product_decompose(elementary_map(n - 1, 0), elementary_map(n - 1, 1), o.limits).size_profile();
      if (diff != Profile{{n + 1, 1}}) return "different points, n = " + std::to_string(n);
    }
  }
  return "";
}

inline std::string check_y_measures(const SelftestOptions& o) {
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()})
    for (std::size_t n = 0; n <= 8; ++n) {
      auto c = y_measure(m, n, YMeasureMethod::closed_form, o.limits);
      auto d = y_measure(m, n, YMeasureMethod::decompose, o.limits);
      Rational want = n == 0 ? 0 : (m == MeasureSpec::nu() ? 1 : (n % 2 == 1 ? 1 : 0));
      if (c != d || c != want) return m.name() + "(Y(" + std::to_string(n) + "))";
    }
  return "";
}

inline std::string check_theta(const SelftestOptions&) {
  ThetaElement x1 = theta_of(FormalGSet::x(2));
  for (const auto& [x, name] : {std::pair{x1.mu(), "mu"}, std::pair{x1.nu(), "nu"}})
    if (x != 2 + 4 * x + x * x) return std::string("x = 2 + 4x + x^2 fails in the ") + name + " coordinate";
  Rational fact = 1;
  for (long n = 1; n <= 6; ++n) {
    fact *= n;
    Rational mu = rational_pow(-2, n) / fact;
    Rational nu = rational_pow(-1, n) / fact;
    if (mpz_even_p(ThetaElement(mu, nu).mu().get_den_mpz_t())) return "c_" + std::to_string(n) + " has an even mu-denominator";
  }
  return "";
}

inline std::string check_functoriality(SemiringKind k, ComposeMode mode, const SelftestOptions& o) {
  for (const auto& a : enumerate_nonzero(k, 2, o.limits))
    for (const auto& b : enumerate_nonzero(k, 2, o.limits))
      if (phi(sr_multiply(a, b), o.limits) != compose(phi(a, o.limits), phi(b, o.limits), mode, o.limits))
        return "phi(ab) != phi(a) phi(b) for a = " + BitMask(a.support).to_hex() + ", b = " + BitMask(b.support).to_hex();
  return "";
}

inline std::string check_kronecker(SemiringKind k, const SelftestOptions& o) {
  auto target = y_object(FinSet{4}, o.limits);
  for (const auto& a : enumerate_nonzero(k, 2, o.limits))
    for (const auto& b : enumerate_nonzero(k, 2, o.limits)) {
      auto t = reindex(tensor_matrix(phi(a, o.limits), phi(b, o.limits), o.limits), target, target);
      if (t != phi(sr_kronecker(a, b), o.limits))
        return "phi(a (x) b) differs for a = " + BitMask(a.support).to_hex() + ", b = " + BitMask(b.support).to_hex();
    }
  return "";
}

inline std::string check_paths(const SelftestOptions& o) {
  std::mt19937_64 rng(7);
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()})
    for (int trial = 0; trial < 20; ++trial) {
      StratumVector xa, xb;
      for (std::uint64_t d = 1; d < 16; ++d) {
        if (rng() % 3 == 0) xa[d] = Rational(static_cast<long>(rng() % 7) - 3);
        if (rng() % 3 == 0) xb[d] = Rational(static_cast<long>(rng() % 7) - 3);
      }
      std::erase_if(xa, [](const auto& kv) { return kv.second == 0; });
      std::erase_if(xb, [](const auto& kv) { return kv.second == 0; });
      auto a = from_x_coefficients(m, {2}, {2}, xa, o.limits);
      auto b = from_x_coefficients(m, {2}, {2}, xb, o.limits);
      auto oracle = compose(b, a, ComposeMode::oracle, o.limits);
      if (oracle != compose(b, a, ComposeMode::lemma, o.limits) || oracle != compose(b, a, ComposeMode::fast, o.limits))
        return m.name() + ": composition routes disagree";
    }
  return "";
}

inline std::string check_small_algebras(const SelftestOptions& o) {
  for (std::size_t n = 1; n <= 2; ++n) {
    auto r = semisimplicity_report(SemiringKind::F2, n, o.limits);
    if (!r.semisimple || !r.certificate_prime) return "F2 n=" + std::to_string(n) + " not certified semisimple";
  }
  if (!radical_basis(SemiringKind::Bool, 1, o.limits).empty()) return "bool n=1 radical is non-zero";
  if (find_trace_witness(1, SemiringKind::Bool, o.limits)) return "bool n=1 has a trace witness";
  return "";
}

inline std::string check_classification(const SelftestOptions& o) {
  std::size_t valid = 0;
  auto ample = enumerate_ample({2, 2}, o.limits);
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << ample.size()); ++pick) {
    std::set<std::uint64_t> members;
    for (std::size_t i = 0; i < ample.size(); ++i)
      if (pick >> i & 1U) members.insert(ample[i].mask().to_u64());
    EqRelFamily f(2, members);
    if (!eqrel_validate(f, o.limits)) continue;
    ++valid;
    eqrel_classify(f, o.limits);
  }
  if (valid == 0) return "no valid family on [2]";
  std::vector<std::vector<Permutation>> subgroups = {
      {{0, 1, 2}},
      {{0, 1, 2}, {1, 0, 2}},
      {{0, 1, 2}, {0, 2, 1}},
      {{0, 1, 2}, {2, 1, 0}},
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}},
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& g : subgroups)
    if (!(eqrel_classify(eqrel_from_group(3, g), o.limits) == QuotientDescription(3, g)))
      return "classification of a subgroup of S3 on [3] failed";
  return "";
}

inline std::string check_rigidity(const SelftestOptions& o) {
  for (auto m : {MeasureSpec::mu(), MeasureSpec::nu()}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      auto obj = x_object(n);
      auto [s1, s2] = snake_composites(m, obj, o.limits);
      auto id = identity_matrix(m, obj);
      if (s1 != id || s2 != id) return m.name() + ": snake identity fails on X(" + std::to_string(n) + ")";
      if (dimension(m, obj, o.limits) != m.power(static_cast<long>(n) - 1))
        return m.name() + ": dim X(" + std::to_string(n) + ")";
    }
    for (std::size_t n = 1; n <= 3; ++n)
      if (dimension(m, y_object(FinSet{n}, o.limits), o.limits) != y_measure(m, n, YMeasureMethod::closed_form))
        return m.name() + ": dim Y(" + std::to_string(n) + ")";
  }
  return "";
}

inline std::string check_big_algebra(SemiringKind k, const SelftestOptions& o) {
  auto r = semisimplicity_report(k, 3, o.limits);
  if (k == SemiringKind::F2) {
    if (!r.semisimple || r.radical_dim != 0 || !r.certificate_prime) return "F2 n=3 not certified semisimple";
  } else if (r.radical_dim == 0) {
    return "bool n=3 radical is zero";
  }
  return "";
}

inline std::string check_witness(const SelftestOptions& o) {
  auto w = find_trace_witness(3, SemiringKind::Bool, o.limits);
  if (!w) return "no witness";
  if (w->trace == 0) return "witness has zero trace";
  return "";
}

}  // namespace detail

/// Runs the claims for the level, printing one line each; true if all pass.
inline bool run_selftest(const SelftestOptions& o, std::ostream& out, std::vector<ClaimResult>* results = nullptr) {
  using detail::Check;
  std::vector<std::pair<std::string, Check>> claims = {
      {"ample count: f(1..4) = 1, 7, 193, 63775", detail::check_growth},
      {"measure solve: the regular alphas are exactly -2 and -1", detail::check_solve},
      {"elementary squares: X(n+2) + 4X(n+1) + 2X(n) and X(n+1)", detail::check_elementary_squares},
      {"Y-measures: mu(Y(n)) is the parity of n, nu(Y(n)) = 1", detail::check_y_measures},
      {"theta: x = 2 + 4x + x^2 and odd mu-denominators of c_n", detail::check_theta},
      {"phi(ab) = phi(a) phi(b), 2x2 over F2 (oracle)",
       [](const SelftestOptions& o) { return detail::check_functoriality(SemiringKind::F2, ComposeMode::oracle, o); }},
      {"phi(ab) = phi(a) phi(b), 2x2 over the Boolean semiring (oracle)",
       [](const SelftestOptions& o) { return detail::check_functoriality(SemiringKind::Bool, ComposeMode::oracle, o); }},
      {"phi(a (x) b) = phi(a) (x) phi(b), 2x2 over F2",
       [](const SelftestOptions& o) { return detail::check_kronecker(SemiringKind::F2, o); }},
      {"phi(a (x) b) = phi(a) (x) phi(b), 2x2 over the Boolean semiring",
       [](const SelftestOptions& o) { return detail::check_kronecker(SemiringKind::Bool, o); }},
      {"composition routes agree on Y(2)", detail::check_paths},
      {"small contracted algebras: F2 n=1,2 semisimple, bool n=1 radical zero", detail::check_small_algebras},
      {"equivalence families: [2] classified, S3 subgroups recovered", detail::check_classification},
      {"rigidity: snake identities and dimension = measure", detail::check_rigidity},
  };
  if (o.level == SelftestLevel::full) {
    claims.push_back({"f2 n=3 semisimple with mod-p certificate",
                      [](const SelftestOptions& o) { return detail::check_big_algebra(SemiringKind::F2, o); }});
    claims.push_back({"bool n=3 radical_dim > 0",
                      [](const SelftestOptions& o) { return detail::check_big_algebra(SemiringKind::Bool, o); }});
    claims.push_back({"bool n=3 nilpotent endomorphism with non-zero trace", detail::check_witness});
  }
  bool all = true;
  for (const auto& [name, check] : claims) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = check(o);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = detail.empty();
    all &= ok;
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!ok) out << " -- " << detail;
    out << '\n';
    if (results) results->push_back({name, ok, detail, secs});
  }
  out << (all ? "selftest passed" : "selftest FAILED") << '\n';
  return all;
}

}  // namespace cantorperm
