#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "sral/linalg.hpp"
#include "sral/rng.hpp"

namespace sral {
namespace families {

constexpr long long kDefaultBudget = 50'000'000;

enum class NormKind { Operator, Frobenius };

inline double norm_of(const CMatrix& a, NormKind k) {
  return k == NormKind::Operator ? linalg::op_norm(a) : linalg::frobenius(a);
}

struct SummableFamily {
  std::vector<CMatrix> members;
  std::vector<long long> multiplicities;  // defaults to all-ones when empty
};

struct BoundedFamily {
  std::vector<CMatrix> members;
};

inline Eigen::Index dim_of(const std::vector<CMatrix>& members, const char* who) {
  if (members.empty()) throw ParseError(std::string(who) + ": empty family");
  Eigen::Index d = members.front().rows();
  for (const CMatrix& a : members) {
    if (a.rows() != a.cols()) throw NonSquare(who);
    if (a.rows() != d) throw DimMismatch(std::string(who) + ": mixed dimensions");
    linalg::require_finite(a, who);
  }
  return d;
}

inline void validate(const SummableFamily& m) {
  Eigen::Index d = dim_of(m.members, "SummableFamily");
  (void)d;
  if (!m.multiplicities.empty() && m.multiplicities.size() != m.members.size())
    throw LengthMismatch("SummableFamily: multiplicities length");
  for (long long mu : m.multiplicities)
    if (mu < 1) throw ParseError("SummableFamily: multiplicities must be positive");
}

inline void validate(const BoundedFamily& m) { dim_of(m.members, "BoundedFamily"); }

inline Eigen::Index dim(const SummableFamily& m) { return dim_of(m.members, "SummableFamily"); }

inline long long multiplicity(const SummableFamily& m, std::size_t i) {
  return m.multiplicities.empty() ? 1 : m.multiplicities[i];
}

// Members repeated according to multiplicity, in storage order.
inline std::vector<CMatrix> expanded(const SummableFamily& m) {
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < m.members.size(); ++i)
    for (long long r = 0; r < multiplicity(m, i); ++r) out.push_back(m.members[i]);
  return out;
}

inline SummableFamily as_summable(const BoundedFamily& k) {
  SummableFamily m;
  m.members = k.members;
  return m;
}

inline double eta(const SummableFamily& m, NormKind norm = NormKind::Operator) {
  validate(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.members.size(); ++i)
    acc += static_cast<double>(multiplicity(m, i)) * norm_of(m.members[i], norm);
  return acc;
}

// Pairwise products a_i b_j, i-major order; equal products are kept as
// distinct members (multiplicities multiply, nothing is merged).
inline SummableFamily family_product(const SummableFamily& m, const SummableFamily& n) {
  validate(m);
  validate(n);
  if (dim(m) != dim(n)) throw DimMismatch("family_product");
  SummableFamily out;
  for (std::size_t i = 0; i < m.members.size(); ++i)
    for (std::size_t j = 0; j < n.members.size(); ++j) {
      out.members.push_back(m.members[i] * n.members[j]);
      out.multiplicities.push_back(multiplicity(m, i) * multiplicity(n, j));
    }
  return out;
}

inline SummableFamily family_disjoint_union(const SummableFamily& m, const SummableFamily& n) {
  validate(m);
  validate(n);
  if (dim(m) != dim(n)) throw DimMismatch("family_disjoint_union");
  SummableFamily out;
  for (std::size_t i = 0; i < m.members.size(); ++i) {
    out.members.push_back(m.members[i]);
    out.multiplicities.push_back(multiplicity(m, i));
  }
  for (std::size_t j = 0; j < n.members.size(); ++j) {
    out.members.push_back(n.members[j]);
    out.multiplicities.push_back(multiplicity(n, j));
  }
  return out;
}

// Cauchy convolution of the multiplicity-expanded sequences:
// c_n = sum_{i+j=n+1} a_i b_j (1-based).
inline SummableFamily family_convolution(const SummableFamily& m, const SummableFamily& n) {
  validate(m);
  validate(n);
  if (dim(m) != dim(n)) throw DimMismatch("family_convolution");
  std::vector<CMatrix> a = expanded(m), b = expanded(n);
  Eigen::Index d = a.front().rows();
  SummableFamily out;
  for (std::size_t s = 0; s + 1 <= a.size() + b.size() - 1; ++s) {
    CMatrix c = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (s < i || s - i >= b.size()) continue;
      c += a[i] * b[s - i];
    }
    out.members.push_back(c);
    out.multiplicities.push_back(1);
  }
  return out;
}

// Aligned termwise sum of the multiplicity-expanded sequences.
inline SummableFamily family_sum(const SummableFamily& m, const SummableFamily& n) {
  validate(m);
  validate(n);
  if (dim(m) != dim(n)) throw DimMismatch("family_sum");
  std::vector<CMatrix> a = expanded(m), b = expanded(n);
  if (a.size() != b.size()) throw LengthMismatch("family_sum: expanded lengths differ");
  SummableFamily out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.members.push_back(a[i] + b[i]);
    out.multiplicities.push_back(1);
  }
  return out;
}

// New family b_n = sum_m t(n,m) a_m over the expanded member list; each
// row of t must have l1 norm at most 1.
inline SummableFamily abs_t_transform(const SummableFamily& m, const CMatrix& t) {
  validate(m);
  std::vector<CMatrix> a = expanded(m);
  if (t.cols() != static_cast<Eigen::Index>(a.size()))
    throw DimMismatch("abs_t_transform: column count != expanded member count");
  if (t.rows() < 1) throw DimMismatch("abs_t_transform: empty transform");
  linalg::require_finite(t, "abs_t_transform");
  Eigen::Index d = a.front().rows();
  SummableFamily out;
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    double row_sum = 0.0;
    for (Eigen::Index c = 0; c < t.cols(); ++c) row_sum += std::abs(t(r, c));
    if (row_sum > 1.0 + 1e-12)
      throw RowSumExceeded("abs_t_transform: row " + std::to_string(r) + " l1 sum " +
                           std::to_string(row_sum));
    CMatrix b = CMatrix::Zero(d, d);
    for (Eigen::Index c = 0; c < t.cols(); ++c) b += t(r, c) * a[c];
    out.members.push_back(b);
    out.multiplicities.push_back(1);
  }
  return out;
}

// Element sum t_n a_n of the unit-coefficient envelope of the family.
inline CMatrix omega_sample(const SummableFamily& m, const std::vector<Complex>& t) {
  validate(m);
  std::vector<CMatrix> a = expanded(m);
  if (t.size() != a.size()) throw LengthMismatch("omega_sample: coefficient count");
  Eigen::Index d = a.front().rows();
  CMatrix out = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) > 1.0 + 1e-12)
      throw CoefficientTooLarge("omega_sample: |t_" + std::to_string(i) + "| > 1");
    out += t[i] * a[i];
  }
  return out;
}

struct PowerNormTable {
  int depth = 0;
  NormKind norm = NormKind::Operator;
  std::vector<double> eta_values;  // eta_values[j] = eta(M^(j+1))
  std::vector<double> set_norms;   // set_norms[j]  = ||K^(j+1)||
  std::vector<double> gen_radii;   // gen_radii[j]  = r_(j+1)
  std::vector<int> best_word;      // word attaining max_n gen_radii[n]
  double best_radius = 0.0;
};

namespace detail {

inline double node_count(std::size_t k, int depth) {
  double total = 0.0, level = 1.0;
  for (int j = 0; j < depth; ++j) {
    level *= static_cast<double>(k);
    total += level;
    if (total > 1e18) return total;
  }
  return total;
}

}  // namespace detail

// Depth-first enumeration of all words up to the requested length with
// prefix-product reuse; collects eta, set norms and generalized radii.
inline PowerNormTable power_norm_table(const SummableFamily& m, int depth,
                                       NormKind norm = NormKind::Operator,
                                       long long budget = kDefaultBudget) {
  validate(m);
  if (depth < 1) throw ParseError("power_norm_table: depth must be >= 1");
  const Eigen::Index d = dim(m);
  const std::size_t k = m.members.size();

  PowerNormTable t;
  t.depth = depth;
  t.norm = norm;
  t.eta_values.assign(depth, 0.0);
  t.set_norms.assign(depth, 0.0);
  t.gen_radii.assign(depth, 0.0);

  if (d == 1) {
    // Scalar families: eta(M^n) = (sum mult|a|)^n and ||K^n|| = (max|a|)^n
    // exactly, so no enumeration is needed.
    double s = 0.0, mx = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double v = std::abs(m.members[i](0, 0));
      s += static_cast<double>(multiplicity(m, i)) * v;
      if (v > mx) {
        mx = v;
        arg = i;
      }
    }
    for (int j = 0; j < depth; ++j) {
      t.eta_values[j] = std::pow(s, j + 1);
      t.set_norms[j] = std::pow(mx, j + 1);
      t.gen_radii[j] = mx;
    }
    t.best_radius = mx;
    t.best_word = {static_cast<int>(arg)};
    return t;
  }

  if (detail::node_count(k, depth) > static_cast<double>(budget))
    throw BudgetExceeded("power_norm_table: " + std::to_string(k) + "^" +
                         std::to_string(depth) + " words exceed budget " +
                         std::to_string(budget));

  std::vector<int> word(depth, 0);
  std::function<void(int, const CMatrix&, double)> rec = [&](int j, const CMatrix& prod,
                                                             double weight) {
    if (j == depth) return;
    for (std::size_t i = 0; i < k; ++i) {
      word[j] = static_cast<int>(i);
      CMatrix p = j == 0 ? m.members[i] : CMatrix(prod * m.members[i]);
      double w = weight * static_cast<double>(multiplicity(m, i));
      double nv = norm_of(p, norm);
      t.eta_values[j] += w * nv;
      t.set_norms[j] = std::max(t.set_norms[j], linalg::op_norm(p));
      double r = std::pow(linalg::rho(p), 1.0 / (j + 1));
      t.gen_radii[j] = std::max(t.gen_radii[j], r);
      if (r > t.best_radius) {
        t.best_radius = r;
        t.best_word.assign(word.begin(), word.begin() + j + 1);
      }
      rec(j + 1, p, w);
    }
  };
  rec(0, CMatrix::Identity(d, d), 1.0);
  return t;
}

struct RadiusBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<int> lower_witness;  // word indices, or +-1 sign pattern, or empty
  int upper_depth = 0;
  bool certified = true;
};

namespace detail {

struct SampledLower {
  double value = 0.0;
  std::vector<int> sign_witness;  // empty when a torus sample wins
  bool from_signs = false;
};

// Best spectral radius over unit-coefficient combinations: exhaustive
// over {+-1}^k for k <= 12, otherwise the all-ones vector plus seeded
// torus samples.
inline SampledLower sampled_envelope_radius(const std::vector<CMatrix>& a) {
  const std::size_t k = a.size();
  const Eigen::Index d = a.front().rows();
  SampledLower best;
  auto consider = [&](const std::vector<Complex>& t, bool signs) {
    CMatrix s = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < k; ++i) s += t[i] * a[i];
    double r = linalg::rho(s);
    if (r > best.value) {
      best.value = r;
      best.from_signs = signs;
      best.sign_witness.clear();
      if (signs)
        for (const Complex& z : t) best.sign_witness.push_back(z.real() >= 0 ? 1 : -1);
    }
  };
  if (k <= 12) {
    std::vector<Complex> t(k);
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
      for (std::size_t i = 0; i < k; ++i) t[i] = (mask >> i) & 1 ? -1.0 : 1.0;
      consider(t, true);
    }
  } else {
    std::vector<Complex> ones(k, Complex(1.0, 0.0));
    consider(ones, true);
    Rng rng = Rng::stream(0x7a11e5, static_cast<std::uint64_t>(k));
    std::vector<Complex> t(k);
    for (int s = 0; s < 4096; ++s) {
      for (std::size_t i = 0; i < k; ++i) t[i] = rng.phase();
      consider(t, false);
    }
  }
  return best;
}

}  // namespace detail

// Two-sided bracket for the summability radius of the family: upper edge
// from the eta table, lower edge from word radii and envelope samples.
inline RadiusBracket tsr_bracket(const SummableFamily& m, int depth,
                                 NormKind norm = NormKind::Operator,
                                 long long budget = kDefaultBudget) {
  PowerNormTable t = power_norm_table(m, depth, norm, budget);
  RadiusBracket b;
  b.upper = std::numeric_limits<double>::infinity();
  for (int j = 0; j < depth; ++j) {
    double root = std::pow(t.eta_values[j], 1.0 / (j + 1));
    if (root < b.upper) {
      b.upper = root;
      b.upper_depth = j + 1;
    }
  }
  detail::SampledLower env = detail::sampled_envelope_radius(expanded(m));
  if (t.best_radius >= env.value) {
    b.lower = t.best_radius;
    b.lower_witness = t.best_word;
  } else {
    b.lower = env.value;
    b.lower_witness = env.from_signs ? env.sign_witness : std::vector<int>{};
  }
  b.certified = true;
  return b;
}

// Joint spectral radius bracket via branch-and-bound word search: keeps a
// word alive while its best prefix norm root g(w) stays above L + delta,
// where L is the best spectral-radius witness seen so far. On budget or
// frontier exhaustion the best bracket so far is returned, not certified.
inline RadiusBracket jsr_bracket(const BoundedFamily& fam, double delta = 1e-3,
                                 long long budget = kDefaultBudget) {
  validate(fam);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParseError("jsr_bracket: delta must be > 0");
  const std::vector<CMatrix>& a = fam.members;
  const std::size_t k = a.size();
  const Eigen::Index d = a.front().rows();

  RadiusBracket b;

  if (k == 1) {
    // Single generator: prefix roots along the unique branch evaluated at
    // power-of-two word lengths via squaring, with log-scale norms.
    long long evals = 1;
    double L = linalg::rho(a[0]);
    b.lower = L;
    b.lower_witness = {0};
    double n0 = linalg::op_norm(a[0]);
    double g = n0;  // min over evaluated prefix roots
    b.upper_depth = 1;
    if (g <= L + delta) {
      b.upper = L + delta;
      return b;
    }
    CMatrix unit = a[0];
    double log_norm = std::log(n0);  // log ||a^(2^j)||
    unit /= n0;
    double len = 1.0;
    for (int j = 0; j < 60 && evals < budget; ++j) {
      CMatrix sq = unit * unit;
      double ns = linalg::op_norm(sq);
      ++evals;
      len *= 2.0;
      if (ns == 0.0) {
        g = 0.0;
        b.upper_depth = 62;
        break;
      }
      log_norm = 2.0 * log_norm + std::log(ns);
      unit = sq / ns;
      double root = std::exp(log_norm / len);
      g = std::min(g, root);
      b.upper_depth = j + 2;
      if (g <= L + delta) break;
    }
    if (g <= L + delta) {
      b.upper = L + delta;
    } else {
      b.upper = g;
      b.certified = false;
    }
    return b;
  }

  struct Node {
    double g;
    std::vector<int> word;
    CMatrix prod;
  };
  auto cmp = [](const Node& x, const Node& y) {
    if (x.g != y.g) return x.g < y.g;  // max-heap on g
    return x.word > y.word;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);

  double L = 0.0;
  std::vector<int> l_witness;
  long long evals = 0;
  const std::size_t frontier_cap = 200000;
  int max_depth = 1;

  auto note_radius = [&](const CMatrix& p, const std::vector<int>& w) {
    double r = std::pow(linalg::rho(p), 1.0 / static_cast<double>(w.size()));
    if (r > L) {
      L = r;
      l_witness = w;
    }
  };

  for (std::size_t i = 0; i < k; ++i) {
    Node nd;
    nd.word = {static_cast<int>(i)};
    nd.prod = a[i];
    nd.g = linalg::op_norm(nd.prod);
    ++evals;
    note_radius(nd.prod, nd.word);
    heap.push(std::move(nd));
  }

  bool exhausted = false;
  double frontier_sup = 0.0;
  while (!heap.empty()) {
    Node nd = heap.top();
    if (nd.g <= L + delta) break;  // heap max below threshold: everything prunes
    heap.pop();
    if (evals + static_cast<long long>(k) > budget || heap.size() + k > frontier_cap) {
      exhausted = true;
      frontier_sup = nd.g;
      break;
    }
    max_depth = std::max(max_depth, static_cast<int>(nd.word.size()) + 1);
    for (std::size_t i = 0; i < k; ++i) {
      Node ch;
      ch.word = nd.word;
      ch.word.push_back(static_cast<int>(i));
      ch.prod = nd.prod * a[i];
      double nv = linalg::op_norm(ch.prod);
      ++evals;
      const double n_len = static_cast<double>(ch.word.size());
      ch.g = std::min(nd.g, std::pow(nv, 1.0 / n_len));
      // Spectral-radius evaluations only improve the lower witness; skip
      // them when the norm already caps rho(P_w) below L^|w|.
      if (d <= 2 || ch.word.size() <= 4 || nv > std::pow(L, n_len))
        note_radius(ch.prod, ch.word);
      if (ch.g > L + delta) heap.push(std::move(ch));
    }
  }

  b.lower = L;
  b.lower_witness = l_witness;
  b.upper_depth = max_depth;
  if (exhausted) {
    b.upper = std::max(L + delta, frontier_sup);
    b.certified = false;
  } else {
    b.upper = L + delta;
    b.certified = true;
  }
  return b;
}

// min_m ||K^m||^(1/m) - max_m r_m over m <= depth; nonnegative up to
// roundoff, and shrinking with depth as the two sides approach the joint
// spectral radius from both ends.
inline double berger_wang_gap(const BoundedFamily& fam, int depth,
                              long long budget = kDefaultBudget) {
  PowerNormTable t = power_norm_table(as_summable(fam), depth, NormKind::Operator, budget);
  double up = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  for (int j = 0; j < depth; ++j) {
    up = std::min(up, std::pow(t.set_norms[j], 1.0 / (j + 1)));
    lo = std::max(lo, t.gen_radii[j]);
  }
  return up - lo;
}

// Truncated union of the powers M, M^2, ..., M^(m_max); requires the
// summability radius of M to be certifiably below one.
inline SummableFamily geometric_family(const SummableFamily& m, int m_max,
                                       long long budget = kDefaultBudget) {
  validate(m);
  if (m_max < 1) throw ParseError("geometric_family: m_max must be >= 1");
  const std::size_t k = m.members.size();
  int pre_depth = 1;
  while (pre_depth < 6 && detail::node_count(k, pre_depth + 1) <= 1e6) ++pre_depth;
  RadiusBracket pre = tsr_bracket(m, pre_depth, NormKind::Operator, budget);
  if (!(pre.upper < 1.0))
    throw RadiusNotBelowOne("geometric_family: upper bound " + std::to_string(pre.upper));

  const Eigen::Index d = dim(m);
  if (detail::node_count(k, m_max) > static_cast<double>(budget))
    throw BudgetExceeded("geometric_family: enumeration exceeds budget");

  SummableFamily out;
  std::function<void(int, const CMatrix&, long long)> rec = [&](int j, const CMatrix& prod,
                                                                long long weight) {
    if (j == m_max) return;
    for (std::size_t i = 0; i < k; ++i) {
      CMatrix p = j == 0 ? m.members[i] : CMatrix(prod * m.members[i]);
      long long w = weight * multiplicity(m, i);
      out.members.push_back(p);
      out.multiplicities.push_back(w);
      rec(j + 1, p, w);
    }
  };
  rec(0, CMatrix::Identity(d, d), 1);
  return out;
}

struct FreeWordElement {
  int length = 0;
  std::map<std::vector<int>, CMatrix> terms;

  double l1_norm(NormKind norm = NormKind::Operator) const {
    double acc = 0.0;
    for (const auto& [w, c] : terms) acc += norm_of(c, norm);
    return acc;
  }
};

// n-th power of the family's free-semigroup symbol: coefficient of each
// word w is (product of multiplicities along w) * P_w, so the l1 norm of
// the element reproduces eta(M^n).
inline FreeWordElement free_semigroup_lift(const SummableFamily& m, int n,
                                           long long budget = kDefaultBudget) {
  validate(m);
  if (n < 1) throw ParseError("free_semigroup_lift: n must be >= 1");
  const std::size_t k = m.members.size();
  const Eigen::Index d = dim(m);
  double leaves = std::pow(static_cast<double>(k), n);
  if (detail::node_count(k, n) > static_cast<double>(budget) || leaves > 1e7)
    throw BudgetExceeded("free_semigroup_lift: word count exceeds budget");

  FreeWordElement e;
  e.length = n;
  std::vector<int> word(n, 0);
  std::function<void(int, const CMatrix&, double)> rec = [&](int j, const CMatrix& prod,
                                                             double weight) {
    if (j == n) {
      e.terms.emplace(word, weight * prod);
      return;
    }
    for (std::size_t i = 0; i < k; ++i) {
      word[j] = static_cast<int>(i);
      CMatrix p = j == 0 ? m.members[i] : CMatrix(prod * m.members[i]);
      rec(j + 1, p, weight * static_cast<double>(multiplicity(m, i)));
    }
  };
  rec(0, CMatrix::Identity(d, d), 1.0);

  double direct = eta(m, NormKind::Operator);
  double ln = e.l1_norm(NormKind::Operator);
  PowerNormTable t = power_norm_table(m, n, NormKind::Operator, budget);
  double ref = t.eta_values[n - 1];
  (void)direct;
  if (std::abs(ln - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
    throw Error("free_semigroup_lift: l1 norm drifted from eta");
  return e;
}

}  // namespace families
}  // namespace sral
