#ifndef GMIX_SL2_VERIFY_HPP_
#define GMIX_SL2_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "gmix/dist.hpp"
#include "gmix/group.hpp"
#include "gmix/rng.hpp"

namespace gmix {

// ---------------------------------------------------------------------------
// Trace of a u g u^-1 in closed form. Valid for any 2x2 matrices a and g as
// long as det(u) = 1, which is what the trace experiment needs: its reference
// matrices (0 1; 1 w) and (v 1; 1 0) have determinant -1, but their product
// with the conjugated factor lands back in SL(2,q).
// ---------------------------------------------------------------------------

inline std::uint32_t trace_conj_form(const FieldSpec& f, const Mat& a, const Mat& g, const Mat& u) {
  auto add = [&](std::uint32_t x, std::uint32_t y) { return f.radd(x, y); };
  auto sub = [&](std::uint32_t x, std::uint32_t y) { return f.rsub(x, y); };
  auto mul = [&](std::uint32_t x, std::uint32_t y) { return f.rmul(x, y); };
  std::uint32_t t1 = mul(add(mul(a.a, u.a), mul(a.b, u.c)), sub(mul(g.a, u.d), mul(g.b, u.c)));
  std::uint32_t t2 = mul(add(mul(a.a, u.b), mul(a.b, u.d)), sub(mul(g.c, u.d), mul(g.d, u.c)));
  std::uint32_t t3 = mul(add(mul(a.c, u.a), mul(a.d, u.c)), sub(mul(g.b, u.a), mul(g.a, u.b)));
  std::uint32_t t4 = mul(add(mul(a.c, u.b), mul(a.d, u.d)), sub(mul(g.d, u.a), mul(g.c, u.b)));
  return add(add(t1, t2), add(t3, t4));
}

/// tr(a u g u^-1) for group elements, by the closed form.
inline FieldElem trace_of_conjugated(const GroupTable& grp, GroupElem a, GroupElem g, GroupElem u) {
  return FieldElem{trace_conj_form(grp.field(), grp.mat(a), grp.mat(g), grp.mat(u)),
                   grp.field().id()};
}

// ---------------------------------------------------------------------------
// Distributions over F_q, kept as integer counts.
// ---------------------------------------------------------------------------

struct FqDist {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double prob(std::uint32_t x) const {
    return static_cast<double>(counts[x]) / static_cast<double>(total);
  }
  double max_prob() const {
    std::uint64_t m = 0;
    for (std::uint64_t c : counts) m = std::max(m, c);
    return static_cast<double>(m) / static_cast<double>(total);
  }
  double stat_dist_to_uniform() const {
    const double q = static_cast<double>(counts.size());
    double s = 0.0;
    for (std::uint64_t c : counts)
      s += std::abs(static_cast<double>(c) / static_cast<double>(total) - 1.0 / q);
    return 0.5 * s;
  }
  bool operator==(const FqDist&) const = default;
};

/// Parameters of one Lemma-5.5-style trace experiment.
struct TraceExperimentSpec {
  std::uint32_t v = 0, w = 0;
  bool exact = true;
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
};

/// For odd q the lemma excludes (v,w) = (0,0) and (v^2,w^2) = (-4,-4). Such
/// runs still execute but are labeled as outside the hypothesis.
inline bool trace_hypothesis_holds(const FieldSpec& f, std::uint32_t v, std::uint32_t w) {
  if (f.p() == 2) return true;
  if (v == 0 && w == 0) return false;
  std::uint32_t m4 = f.rneg(f.radd(f.radd(1, 1), f.radd(1, 1)));
  if (f.rmul(v, v) == m4 && f.rmul(w, w) == m4) return false;
  return true;
}

inline Mat trace_left_matrix(std::uint32_t w) { return Mat{0, 1, 1, w}; }   // (0 1; 1 w)
inline Mat trace_right_matrix(std::uint32_t v) { return Mat{v, 1, 1, 0}; }  // (v 1; 1 0)

/// The conjugated product a u g u^-1 itself (an SL(2,q) element).
inline GroupElem trace_experiment_element(const GroupTable& grp, std::uint32_t v, std::uint32_t w,
                                          GroupElem u) {
  const FieldSpec& f = grp.field();
  const Mat& um = grp.mat(u);
  Mat uinv{um.d, f.rneg(um.b), f.rneg(um.c), um.a};
  Mat m = grp.mul_mat(grp.mul_mat(trace_left_matrix(w), um),
                      grp.mul_mat(trace_right_matrix(v), uinv));
  return grp.from_mat(m);
}

/// Exact law of tr((0 1; 1 w) u (v 1; 1 0) u^-1) over uniform u.
inline FqDist trace_dist_exact(const GroupTable& grp, std::uint32_t v, std::uint32_t w) {
  const FieldSpec& f = grp.field();
  FqDist d;
  d.counts.assign(f.q(), 0);
  d.total = grp.order();
  for (std::uint32_t u = 0; u < grp.order(); ++u) {
    const Mat& um = grp.mat(GroupElem{u});
    ++d.counts[trace_conj_form(f, trace_left_matrix(w), trace_right_matrix(v), um)];
  }
  return d;
}

inline FqDist trace_dist_mc(const GroupTable& grp, std::uint32_t v, std::uint32_t w,
                            std::uint64_t n_samples, std::uint64_t seed) {
  const FieldSpec& f = grp.field();
  FqDist d;
  d.counts.assign(f.q(), 0);
  d.total = n_samples;
  CounterRng rng = CounterRng(seed).child(0x7472ull);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const Mat& um = grp.mat(GroupElem{static_cast<std::uint32_t>(rng.below(grp.order()))});
    ++d.counts[trace_conj_form(f, trace_left_matrix(w), trace_right_matrix(v), um)];
  }
  return d;
}

/// Law of (u1 - u2 - u3 + u4)^2 over uniform u in G: the even-q, v = w = 0
/// trace in closed form.
inline FqDist square_sum_law(const GroupTable& grp) {
  const FieldSpec& f = grp.field();
  FqDist d;
  d.counts.assign(f.q(), 0);
  d.total = grp.order();
  for (std::uint32_t u = 0; u < grp.order(); ++u) {
    const Mat& m = grp.mat(GroupElem{u});
    std::uint32_t s = f.radd(f.rsub(f.rsub(m.a, m.b), m.c), m.d);  // u1 - u2 - u3 + u4
    ++d.counts[f.rmul(s, s)];
  }
  return d;
}

/// Class histogram of the trace-experiment element over all u (counts per
/// conjugacy-class id, denominator |G|).
inline std::vector<std::uint64_t> trace_class_law(const GroupTable& grp, std::uint32_t v,
                                                  std::uint32_t w) {
  std::vector<std::uint64_t> counts(grp.classes().size(), 0);
  for (std::uint32_t u = 0; u < grp.order(); ++u)
    ++counts[grp.class_id(trace_experiment_element(grp, v, w, GroupElem{u}))];
  return counts;
}

/// Class law of a uniform group element: Pr[class = S] = |S| / |G|.
inline std::vector<std::uint64_t> uniform_class_law(const GroupTable& grp) {
  std::vector<std::uint64_t> counts(grp.classes().size(), 0);
  for (const auto& cls : grp.classes()) counts[cls.id] = cls.size();
  return counts;
}

inline double class_law_stat_dist(const std::vector<std::uint64_t>& a, std::uint64_t atot,
                                  const std::vector<std::uint64_t>& b, std::uint64_t btot) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::abs(static_cast<double>(a[i]) / static_cast<double>(atot) -
                  static_cast<double>(b[i]) / static_cast<double>(btot));
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Point counts for the section-5 quartic
//   f = x^4 - x^2 y^2 - x^2 z^2 + y^2 z^2 + 2yz + 1
//       + v(-x^3 y + xz + x y z^2) + w(-xy - x y^2 z + x^3 z) - vw x^2 y z + s x^2
// obtained from the trace polynomial by eliminating u4 on the u1 != 0 slice.
// ---------------------------------------------------------------------------

struct PolyCountReport {
  std::uint32_t q = 0, v = 0, w = 0;
  std::vector<std::uint64_t> roots_per_s;      // N_s over F_q^3, incl. the x = 0 slice
  std::vector<std::uint64_t> group_per_s;      // M_s = #{u in G : f''(u) = -s}
  std::vector<std::uint64_t> zero_slice_per_s; // A_s = #{u in G : u1 = 0, f''(u) = -s}
  std::uint64_t x0_roots = 0;                  // roots of f on the x = 0 slice (s-independent)
  std::vector<std::uint32_t> candidate_exceptional;  // {0, v, w, v/w + w/v, quadratic roots}
  std::vector<std::uint32_t> detected_exceptional;   // |N_s - q^2| > threshold
  double max_nonexceptional_ratio = 0.0;             // max |N_s - q^2| / q^1.5 off-candidates
  bool reconciliation_ok = false;  // M_s = A_s + N_s - (q-1) and both totals
};

/// Candidate exceptional trace parameters from the irreducibility analysis:
/// 0, v, w, v/w + w/v and the roots of
/// 2s(v^2+w^2) - 4vw - s^2 vw - s v^2 w^2 + vw(w^2+v^2) = 0.
inline std::vector<std::uint32_t> candidate_exceptional_s(const FieldSpec& f, std::uint32_t v,
                                                          std::uint32_t w) {
  std::vector<std::uint32_t> out{0, v, w};
  if (v != 0 && w != 0) {
    std::uint32_t vw = f.rmul(v, f.rinv(w));
    std::uint32_t wv = f.rmul(w, f.rinv(v));
    out.push_back(f.radd(vw, wv));
  }
  // quadratic in s: (-vw) s^2 + (2(v^2+w^2) - v^2 w^2) s + (vw(v^2+w^2) - 4vw)
  std::uint32_t v2 = f.rmul(v, v), w2 = f.rmul(w, w);
  std::uint32_t sum2 = f.radd(v2, w2);
  std::uint32_t vw = f.rmul(v, w);
  std::uint32_t c2 = f.rneg(vw);
  std::uint32_t c1 = f.rsub(f.radd(sum2, sum2), f.rmul(v2, w2));
  std::uint32_t four = f.radd(f.radd(1, 1), f.radd(1, 1));
  std::uint32_t c0 = f.rsub(f.rmul(vw, sum2), f.rmul(four, vw));
  if (c2 != 0 || c1 != 0 || c0 != 0) {
    for (std::uint32_t s = 0; s < f.q(); ++s) {
      std::uint32_t val = f.radd(f.rmul(c2, f.rmul(s, s)), f.radd(f.rmul(c1, s), c0));
      if (val == 0) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Counts roots of f over F_q^3 for every s in one pass (for x != 0 the value
/// of s is determined by (x,y,z)), counts the group-side solutions of
/// f'' = -s over u in G, and reconciles the two per the u1 != 0 reduction.
inline PolyCountReport poly_count(const GroupTable& grp, std::uint32_t v, std::uint32_t w,
                                  double exceptional_ratio_threshold) {
  const FieldSpec& f = grp.field();
  const std::uint32_t q = f.q();
  PolyCountReport rep;
  rep.q = q;
  rep.v = v;
  rep.w = w;
  rep.roots_per_s.assign(q, 0);
  rep.group_per_s.assign(q, 0);
  rep.zero_slice_per_s.assign(q, 0);

  // F_q^3 side: for x != 0, s = -f'(x,y,z) with
  // f' = vz(1+yz)/x - z^2 + (1+yz)^2/x^2 - vxy + x^2 - vwyz + wxz - y^2 - wy(1+yz)/x.
  for (std::uint32_t x = 1; x < q; ++x) {
    std::uint32_t xinv = f.rinv(x);
    std::uint32_t xinv2 = f.rmul(xinv, xinv);
    for (std::uint32_t y = 0; y < q; ++y)
      for (std::uint32_t z = 0; z < q; ++z) {
        std::uint32_t oyz = f.radd(1, f.rmul(y, z));  // 1 + yz
        std::uint32_t val = 0;
        val = f.radd(val, f.rmul(f.rmul(v, z), f.rmul(oyz, xinv)));
        val = f.rsub(val, f.rmul(z, z));
        val = f.radd(val, f.rmul(f.rmul(oyz, oyz), xinv2));
        val = f.rsub(val, f.rmul(v, f.rmul(x, y)));
        val = f.radd(val, f.rmul(x, x));
        val = f.rsub(val, f.rmul(f.rmul(v, w), f.rmul(y, z)));
        val = f.radd(val, f.rmul(w, f.rmul(x, z)));
        val = f.rsub(val, f.rmul(y, y));
        val = f.rsub(val, f.rmul(f.rmul(w, y), f.rmul(oyz, xinv)));
        ++rep.roots_per_s[f.rneg(val)];
      }
  }
  // x = 0 slice: f collapses to (1 + yz)^2 for every s.
  for (std::uint32_t y = 1; y < q; ++y) {
    // z = -1/y is the unique solution of yz = -1
    ++rep.x0_roots;
  }
  for (std::uint32_t s = 0; s < q; ++s) rep.roots_per_s[s] += rep.x0_roots;

  // Group side: histogram of -trace over u in G, via the matrix product
  // route (independent of the f' evaluation above).
  for (std::uint32_t u = 0; u < grp.order(); ++u) {
    const Mat& um = grp.mat(GroupElem{u});
    std::uint32_t tr = trace_conj_form(f, trace_left_matrix(w), trace_right_matrix(v), um);
    std::uint32_t s = f.rneg(tr);
    ++rep.group_per_s[s];
    if (um.a == 0) ++rep.zero_slice_per_s[s];
  }

  // Reconciliation: M_s = A_s + (N_s - (q-1)) for every s, and the totals
  // sum to q^3 - q on both sides.
  rep.reconciliation_ok = true;
  std::uint64_t sum_m = 0, sum_n = 0;
  for (std::uint32_t s = 0; s < q; ++s) {
    sum_m += rep.group_per_s[s];
    sum_n += rep.roots_per_s[s];
    if (rep.group_per_s[s] != rep.zero_slice_per_s[s] + rep.roots_per_s[s] - (q - 1))
      rep.reconciliation_ok = false;
  }
  if (sum_m != grp.order()) rep.reconciliation_ok = false;
  if (sum_n != std::uint64_t{q} * q * q - q) rep.reconciliation_ok = false;

  rep.candidate_exceptional = candidate_exceptional_s(f, v, w);
  const double q32 = std::pow(static_cast<double>(q), 1.5);
  const double target = static_cast<double>(q) * q;
  for (std::uint32_t s = 0; s < q; ++s) {
    double dev = std::abs(static_cast<double>(rep.roots_per_s[s]) - target);
    bool is_candidate = std::binary_search(rep.candidate_exceptional.begin(),
                                           rep.candidate_exceptional.end(), s);
    if (dev > exceptional_ratio_threshold * q32) rep.detected_exceptional.push_back(s);
    if (!is_candidate) rep.max_nonexceptional_ratio =
        std::max(rep.max_nonexceptional_ratio, dev / q32);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Conjugacy-class products and the collision statistic.
// ---------------------------------------------------------------------------

/// Lazy cache of product-count tables: table(c1,c2)[y] counts pairs
/// (g,h) in class c1 x class c2 with gh = y.
class ClassProducts {
 public:
  explicit ClassProducts(const GroupTable& grp) : grp_(&grp) {}

  const std::vector<std::uint32_t>& table(std::uint32_t c1, std::uint32_t c2) {
    auto key = std::make_pair(c1, c2);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<std::uint32_t> counts(grp_->order(), 0);
    const auto& m1 = grp_->classes()[c1].members;
    const auto& m2 = grp_->classes()[c2].members;
    for (std::uint32_t g : m1)
      for (std::uint32_t h : m2) ++counts[grp_->mul(GroupElem{g}, GroupElem{h}).idx];
    return cache_.emplace(key, std::move(counts)).first->second;
  }

  const GroupTable& group() const { return *grp_; }

 private:
  const GroupTable* grp_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> cache_;
};

/// Exact law of C(g) C(h) as counts over |class(g)| * |class(h)|.
inline CountDist class_product_dist(ClassProducts& cp, GroupElem g, GroupElem h) {
  const GroupTable& grp = cp.group();
  std::uint32_t c1 = grp.class_id(g), c2 = grp.class_id(h);
  const auto& t = cp.table(c1, c2);
  std::vector<std::uint64_t> counts(t.begin(), t.end());
  Carrier c(grp, 1);
  return CountDist(c, std::move(counts),
                   u128(grp.classes()[c1].size()) * grp.classes()[c2].size());
}

/// Pr[g C(h) in S] for every conjugacy class S, as counts over |class(h)|.
inline std::vector<std::uint64_t> left_product_class_probs(const GroupTable& grp, GroupElem g,
                                                           GroupElem h) {
  std::vector<std::uint64_t> counts(grp.classes().size(), 0);
  for (std::uint32_t m : grp.class_of(h).members)
    ++counts[grp.class_id(grp.mul(g, GroupElem{m}))];
  return counts;
}

struct CollisionExact {
  u128 numerator = 0;  // sum_g (sum_b N(a,b,g))^2, denominator |G|^6
  double lhs = 0.0;    // E_{b,b'} P[collision]
  double gamma = 0.0;  // lhs * |G| - 1
};

/// Exact collision statistic for fixed a:
///   E_{b,b'} P[C(a b^-1) C(b) = C(a b'^-1) C(b')],
/// the collision probability of the b-mixture, computed from class product
/// counts weighted by centralizer orders.
inline CollisionExact collision_lhs_exact(ClassProducts& cp, GroupElem a) {
  const GroupTable& grp = cp.group();
  const std::uint64_t n = grp.order();
  std::vector<u128> mix(n, 0);  // sum_b N(a,b,g)
  for (std::uint32_t b = 0; b < n; ++b) {
    GroupElem ab = grp.mul(a, grp.inv(GroupElem{b}));
    std::uint32_t c1 = grp.class_id(ab), c2 = grp.class_id(GroupElem{b});
    std::uint64_t cent1 = n / grp.classes()[c1].size();
    std::uint64_t cent2 = n / grp.classes()[c2].size();
    const auto& t = cp.table(c1, c2);
    const std::uint64_t weight = cent1 * cent2;
    for (std::uint64_t g = 0; g < n; ++g)
      if (t[g]) mix[g] += u128(weight) * t[g];
  }
  CollisionExact res;
  for (std::uint64_t g = 0; g < n; ++g) res.numerator += mix[g] * mix[g];
  double denom = std::pow(static_cast<double>(n), 6);
  res.lhs = static_cast<double>(res.numerator) / denom;
  res.gamma = res.lhs * static_cast<double>(n) - 1.0;
  return res;
}

/// a-averaged collision statistic; gamma = |G| E_a lhs(a) - 1.
struct CollisionAverage {
  u128 numerator_total = 0;  // sum_a numerator(a), denominator |G|^7
  double lhs_avg = 0.0;
  double gamma = 0.0;
};

inline CollisionAverage collision_lhs_average_exact(ClassProducts& cp) {
  const GroupTable& grp = cp.group();
  CollisionAverage res;
  for (std::uint32_t a = 0; a < grp.order(); ++a)
    res.numerator_total += collision_lhs_exact(cp, GroupElem{a}).numerator;
  double denom = std::pow(static_cast<double>(grp.order()), 7);
  res.lhs_avg = static_cast<double>(res.numerator_total) / denom;
  res.gamma = res.lhs_avg * static_cast<double>(grp.order()) - 1.0;
  return res;
}

struct CollisionMc {
  double lhs = 0.0;
  double gamma = 0.0;
  double gamma_sigma = 0.0;
  std::uint64_t samples = 0;
};

/// Pair-sampling estimator: each trial draws (a if averaged), b, b' and the
/// four conjugators, and tests the two realizations for equality.
inline CollisionMc collision_lhs_mc(const GroupTable& grp, std::int64_t fixed_a,
                                    std::uint64_t n_samples, std::uint64_t seed) {
  const std::uint64_t n = grp.order();
  CounterRng rng = CounterRng(seed).child(0x636f6cull);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    GroupElem a = fixed_a >= 0 ? GroupElem{static_cast<std::uint32_t>(fixed_a)}
                               : GroupElem{static_cast<std::uint32_t>(rng.below(n))};
    auto draw = [&]() {
      GroupElem b{static_cast<std::uint32_t>(rng.below(n))};
      GroupElem u{static_cast<std::uint32_t>(rng.below(n))};
      GroupElem vv{static_cast<std::uint32_t>(rng.below(n))};
      GroupElem ab = grp.mul(a, grp.inv(b));
      return grp.mul(grp.conj(u, ab), grp.conj(vv, b));
    };
    if (draw() == draw()) ++hits;
  }
  CollisionMc res;
  res.samples = n_samples;
  double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  res.lhs = p;
  res.gamma = p * static_cast<double>(n) - 1.0;
  res.gamma_sigma = static_cast<double>(n) *
                    std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(n_samples));
  return res;
}

// ---------------------------------------------------------------------------
// The section-2 reduction chain at q = 3 (or 2), entirely in integer counts:
//   Gamma(x,y) = [x . y = 1] on G^2 x G^2,
//   Delta(x,x') = E_y Gamma(x,y) Gamma(x',y) = c(x,x') / |G|^2,
//   E_{x'} Delta(x,x') = 1/|G|^2,
//   E_z Delta(x,z) Delta(x',z) = (1/|G|^3) Pr_z[ C(x1'^-1 z1) C(z1^-1 x1) = x2' x2^-1 ],
//   ||Delta||_box^4 = |G|^-6 E_{x,x'} (Pr_z[...])^2 = (1+gamma)/|G|^8.
// ---------------------------------------------------------------------------

struct ReductionReport {
  bool row_averages_ok = false;      // E_x' Delta(x,x') = 1/|G|^2 for every x
  bool symmetric_ok = false;
  std::uint64_t pairs_checked = 0;   // identity (iii) sample size
  bool pair_identity_ok = false;
  bool global_identity_ok = false;   // identity (iv), all pairs at once
  bool lemma24_delta_ok = false;     // ||g||^4 = ||Delta||^4 - 1/|G|^8 in counts
  bool bound_ok = false;             // ||Delta||^4 <= (1+gamma)/|G|^8
  double box4 = 0.0;                 // ||Delta||_box^4
  double gamma = 0.0;                // from the exact a-averaged collision statistic
};

inline ReductionReport reduction_identity_check(const GroupTable& grp, std::uint64_t sample_pairs,
                                                std::uint64_t seed) {
  const std::uint64_t n = grp.order();
  const std::uint64_t n2 = n * n;
  if (n2 > 1024) throw BudgetError("reduction chain needs |G|^2 <= 1024 (q <= 3)");
  ReductionReport rep;

  // c(x,z) = #{y in G^2 : x.y = 1 and z.y = 1}; for each y1 the second
  // coordinates are forced, so each (x,y1) contributes one z.
  std::vector<std::uint8_t> c(n2 * n2, 0);
  auto pack = [&](std::uint32_t a, std::uint32_t b) { return std::uint64_t{a} * n + b; };
  for (std::uint32_t x1 = 0; x1 < n; ++x1)
    for (std::uint32_t x2 = 0; x2 < n; ++x2) {
      std::uint64_t x = pack(x1, x2);
      for (std::uint32_t y1 = 0; y1 < n; ++y1) {
        // y2 = (x1 y1 x2)^-1
        GroupElem y2 = grp.inv(grp.mul(grp.mul(GroupElem{x1}, GroupElem{y1}), GroupElem{x2}));
        for (std::uint32_t z1 = 0; z1 < n; ++z1) {
          // z2 = y1^-1 z1^-1 y2^-1
          GroupElem z2 = grp.mul(grp.inv(grp.mul(GroupElem{z1}, GroupElem{y1})), grp.inv(y2));
          ++c[x * n2 + pack(z1, z2.idx)];
        }
      }
    }

  rep.row_averages_ok = true;
  for (std::uint64_t x = 0; x < n2 && rep.row_averages_ok; ++x) {
    std::uint64_t sum = 0;
    for (std::uint64_t z = 0; z < n2; ++z) sum += c[x * n2 + z];
    if (sum != n2) rep.row_averages_ok = false;
  }
  rep.symmetric_ok = true;
  for (std::uint64_t x = 0; x < n2 && rep.symmetric_ok; ++x)
    for (std::uint64_t z = 0; z < x; ++z)
      if (c[x * n2 + z] != c[z * n2 + x]) rep.symmetric_ok = false;

  // D2(x,x') = sum_z c(x,z) c(x',z); Sigma D2^2 drives the box norm.
  std::vector<std::uint32_t> d2(n2 * n2, 0);
  for (std::uint64_t x = 0; x < n2; ++x) {
    const std::uint8_t* cx = c.data() + x * n2;
    for (std::uint64_t xp = 0; xp <= x; ++xp) {
      const std::uint8_t* cxp = c.data() + xp * n2;
      std::uint32_t acc = 0;
      for (std::uint64_t z = 0; z < n2; ++z) acc += std::uint32_t{cx[z]} * cxp[z];
      d2[x * n2 + xp] = acc;
      d2[xp * n2 + x] = acc;
    }
  }
  u128 sum_d2_sq = 0;
  for (std::uint64_t i = 0; i < n2 * n2; ++i) sum_d2_sq += u128(d2[i]) * d2[i];

  // Lemma-2.4 consistency on Delta itself: with E2 built from c - 1,
  // Sigma E2^2 must equal Sigma D2^2 - |G|^8.
  u128 sum_e2_sq = 0;
  for (std::uint64_t x = 0; x < n2; ++x)
    for (std::uint64_t xp = 0; xp < n2; ++xp) {
      std::int64_t acc = 0;
      for (std::uint64_t z = 0; z < n2; ++z)
        acc += (std::int64_t{c[x * n2 + z]} - 1) * (std::int64_t{c[xp * n2 + z]} - 1);
      sum_e2_sq += u128(i128(acc) * i128(acc));
    }
  u128 n8 = 1;
  for (int i = 0; i < 8; ++i) n8 *= n;
  rep.lemma24_delta_ok = (sum_e2_sq == sum_d2_sq - n8);

  // Identity (iii) on sampled pairs: D2(x,x') equals the (z1,u,u') count of
  // C(x1'^-1 z1) C(z1^-1 x1) = x2' x2^-1, evaluated through class tables.
  ClassProducts cp(grp);
  CounterRng rng = CounterRng(seed).child(0x726564ull);
  rep.pair_identity_ok = true;
  rep.pairs_checked = sample_pairs;
  for (std::uint64_t i = 0; i < sample_pairs; ++i) {
    std::uint32_t x1 = static_cast<std::uint32_t>(rng.below(n));
    std::uint32_t x2 = static_cast<std::uint32_t>(rng.below(n));
    std::uint32_t xp1 = static_cast<std::uint32_t>(rng.below(n));
    std::uint32_t xp2 = static_cast<std::uint32_t>(rng.below(n));
    GroupElem target = grp.mul(GroupElem{xp2}, grp.inv(GroupElem{x2}));
    u128 count3 = 0;
    for (std::uint32_t z1 = 0; z1 < n; ++z1) {
      GroupElem alpha = grp.mul(grp.inv(GroupElem{xp1}), GroupElem{z1});
      GroupElem beta = grp.mul(grp.inv(GroupElem{z1}), GroupElem{x1});
      std::uint32_t c1 = grp.class_id(alpha), c2 = grp.class_id(beta);
      std::uint64_t cent1 = n / grp.classes()[c1].size();
      std::uint64_t cent2 = n / grp.classes()[c2].size();
      count3 += u128(cent1 * cent2) * cp.table(c1, c2)[target.idx];
    }
    if (count3 != d2[pack(x1, x2) * n2 + pack(xp1, xp2)]) rep.pair_identity_ok = false;
  }

  // Identity (iv) globally plus the collision bound: Sigma D2^2 must equal
  // |G|^2 sum_a numerator(a), and the box norm then ties to gamma exactly.
  CollisionAverage avg = collision_lhs_average_exact(cp);
  rep.global_identity_ok = (sum_d2_sq == u128(n2) * avg.numerator_total);
  rep.gamma = avg.gamma;
  double n16 = std::pow(static_cast<double>(n), 16);
  rep.box4 = static_cast<double>(sum_d2_sq) / n16;
  // ||Delta||^4 <= (1+gamma)/|G|^8 cross-multiplied: Sigma D2^2 <= |G|^2 num.
  rep.bound_ok = (sum_d2_sq <= u128(n2) * avg.numerator_total);
  return rep;
}

}  // namespace gmix

#endif  // GMIX_SL2_VERIFY_HPP_
