#ifndef GMIX_DIST_HPP_
#define GMIX_DIST_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmix/group.hpp"
#include "gmix/rng.hpp"

namespace gmix {

/// Thrown when an exact computation would exceed its multiply-add budget.
/// Callers downshift to sampled mode.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Default exact-mode budget: carrier size times support size, in
/// multiply-adds. Drivers may pass a larger budget where an exact result is
/// required by contract.
constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// G^m with a mixed-radix index codec over element indices.
/// Coordinate 0 is the most significant digit.
class Carrier {
 public:
  Carrier(const GroupTable& group, std::uint32_t m) : group_(&group), m_(m) {
    if (m < 1 || m > 8) throw std::invalid_argument("carrier arity must be in [1,8]");
    size_ = 1;
    for (std::uint32_t i = 0; i < m; ++i) {
      if (size_ > UINT64_MAX / group.order()) throw std::invalid_argument("carrier too large");
      size_ *= group.order();
    }
  }

  const GroupTable& group() const { return *group_; }
  std::uint32_t arity() const { return m_; }
  std::uint64_t size() const { return size_; }

  void decompose(std::uint64_t idx, std::uint32_t* out) const {
    const std::uint64_t n = group_->order();
    for (std::uint32_t i = m_; i-- > 0;) {
      out[i] = static_cast<std::uint32_t>(idx % n);
      idx /= n;
    }
  }
  std::uint64_t compose(const std::uint32_t* ids) const {
    const std::uint64_t n = group_->order();
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < m_; ++i) idx = idx * n + ids[i];
    return idx;
  }

  /// Componentwise group product of two tuple indices.
  std::uint64_t tuple_mul(std::uint64_t x, std::uint64_t y) const {
    std::array<std::uint32_t, 8> a, b;
    decompose(x, a.data());
    decompose(y, b.data());
    for (std::uint32_t i = 0; i < m_; ++i)
      a[i] = group_->mul(GroupElem{a[i]}, GroupElem{b[i]}).idx;
    return compose(a.data());
  }
  std::uint64_t tuple_inv(std::uint64_t x) const {
    std::array<std::uint32_t, 8> a;
    decompose(x, a.data());
    for (std::uint32_t i = 0; i < m_; ++i) a[i] = group_->inv(GroupElem{a[i]}).idx;
    return compose(a.data());
  }

  bool same_as(const Carrier& o) const {
    return group_ == o.group_ && m_ == o.m_;
  }

 private:
  const GroupTable* group_;
  std::uint32_t m_;
  std::uint64_t size_;
};

/// Subset of a carrier with its density.
struct SubsetIndicator {
  Carrier carrier;
  std::vector<std::uint8_t> member;
  std::uint64_t count = 0;

  explicit SubsetIndicator(const Carrier& c)
      : carrier(c), member(c.size(), 0) {}

  double density() const { return static_cast<double>(count) / static_cast<double>(carrier.size()); }
  bool contains(std::uint64_t idx) const { return member[idx] != 0; }
  void set(std::uint64_t idx, bool in) {
    if (member[idx] != (in ? 1 : 0)) {
      member[idx] = in ? 1 : 0;
      count += in ? 1 : std::uint64_t(-1);
    }
  }
  std::vector<std::uint64_t> indices() const {
    std::vector<std::uint64_t> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < member.size(); ++i)
      if (member[i]) out.push_back(i);
    return out;
  }
};

/// Seeded Bernoulli thinning followed by exact-density repair, so the subset
/// cardinality is exactly round(density * size).
inline SubsetIndicator random_subset(const Carrier& c, double density, CounterRng rng) {
  if (density <= 0.0 || density > 1.0) throw std::invalid_argument("density must be in (0,1]");
  SubsetIndicator s(c);
  const std::uint64_t target = static_cast<std::uint64_t>(std::llround(density * static_cast<double>(c.size())));
  if (target == 0) throw std::invalid_argument("density rounds to empty subset");
  for (std::uint64_t i = 0; i < c.size(); ++i)
    if (rng.real01() < density) s.set(i, true);
  while (s.count < target) s.set(rng.below(c.size()), true);
  while (s.count > target) {
    std::uint64_t i = rng.below(c.size());
    if (s.member[i]) s.set(i, false);
  }
  return s;
}

/// S^-1 for a subset of G (arity-1 carriers only).
inline SubsetIndicator inverse_subset(const SubsetIndicator& s) {
  if (s.carrier.arity() != 1) throw std::invalid_argument("inverse_subset needs arity 1");
  SubsetIndicator out(s.carrier);
  const GroupTable& g = s.carrier.group();
  for (std::uint64_t i = 0; i < s.member.size(); ++i)
    if (s.member[i]) out.set(g.inv(GroupElem{static_cast<std::uint32_t>(i)}).idx, true);
  return out;
}

inline SubsetIndicator complement_subset(const SubsetIndicator& s) {
  SubsetIndicator out(s.carrier);
  for (std::uint64_t i = 0; i < s.member.size(); ++i)
    if (!s.member[i]) out.set(i, true);
  return out;
}

/// Probability vector over an indexed carrier. Exact form holds computed
/// weights; empirical form holds sampled frequencies plus (N, seed).
struct Dist {
  enum class Form { kExact, kEmpirical };

  Carrier carrier;
  std::vector<double> w;
  Form form = Form::kExact;
  std::uint64_t samples = 0;  // empirical only
  std::uint64_t seed = 0;     // empirical only

  Dist(const Carrier& c, std::vector<double> weights, Form f = Form::kExact,
       std::uint64_t n_samples = 0, std::uint64_t s = 0)
      : carrier(c), w(std::move(weights)), form(f), samples(n_samples), seed(s) {
    validate();
  }

  void validate() const {
    if (w.size() != carrier.size()) throw std::invalid_argument("weight vector size mismatch");
    double sum = 0.0;
    for (double x : w) {
      if (x < 0.0) throw std::invalid_argument("negative weight");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 0x1.0p-40) throw std::invalid_argument("weights do not sum to 1");
  }

  /// Two-sigma half width of a single cell estimate (empirical form).
  double cell_half_width(std::uint64_t idx) const {
    if (form != Form::kEmpirical || samples == 0) return 0.0;
    double p = w[idx];
    return 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  }
};

inline Dist dist_uniform(const Carrier& c) {
  return Dist(c, std::vector<double>(c.size(), 1.0 / static_cast<double>(c.size())));
}

inline Dist dist_point(const Carrier& c, std::uint64_t idx) {
  std::vector<double> w(c.size(), 0.0);
  w.at(idx) = 1.0;
  return Dist(c, std::move(w));
}

inline Dist dist_from_subset(const SubsetIndicator& s) {
  if (s.count == 0) throw std::invalid_argument("empty subset has no uniform distribution");
  std::vector<double> w(s.carrier.size(), 0.0);
  double p = 1.0 / static_cast<double>(s.count);
  for (std::uint64_t i = 0; i < s.member.size(); ++i)
    if (s.member[i]) w[i] = p;
  return Dist(s.carrier, std::move(w));
}

namespace detail {
inline std::vector<std::uint64_t> support_of(const std::vector<double>& w) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) s.push_back(i);
  return s;
}
inline std::vector<std::uint64_t> support_of_counts(const std::vector<std::uint64_t>& c) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < c.size(); ++i)
    if (c[i]) s.push_back(i);
  return s;
}
}  // namespace detail

namespace detail {
/// Generic scatter convolution core: out[y*z] += a[y] * b[z] over the two
/// support lists, with digit arrays walked incrementally instead of div/mod
/// per element. Deterministic iteration order.
template <typename Weight, typename Acc>
void convolve_scatter(const Carrier& c, const std::vector<Weight>& a,
                      const std::vector<std::uint64_t>& sa, const std::vector<Weight>& b,
                      const std::vector<std::uint64_t>& sb, std::vector<Acc>& out) {
  const GroupTable& g = c.group();
  const std::uint32_t m = c.arity();
  std::vector<std::array<std::uint32_t, 8>> da(sa.size()), db(sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) c.decompose(sa[i], da[i].data());
  for (std::size_t i = 0; i < sb.size(); ++i) c.decompose(sb[i], db[i].data());
  std::array<std::uint32_t, 8> prod;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const Weight ai = a[sa[i]];
    const auto& ya = da[i];
    for (std::size_t j = 0; j < sb.size(); ++j) {
      const auto& zb = db[j];
      std::uint64_t idx = 0;
      for (std::uint32_t coord = 0; coord < m; ++coord) {
        prod[coord] = g.mul(GroupElem{ya[coord]}, GroupElem{zb[coord]}).idx;
        idx = idx * g.order() + prod[coord];
      }
      out[idx] += static_cast<Acc>(ai) * static_cast<Acc>(b[sb[j]]);
    }
  }
}
}  // namespace detail

/// Exact convolution on the carrier's componentwise group structure:
/// (D1*D2)(x) = sum_y D1(y) D2(y^-1 x). Iterates the two supports in fixed
/// order, so results do not depend on the worker count.
inline Dist dist_convolve(const Dist& d1, const Dist& d2, std::uint64_t budget = kDefaultBudget) {
  if (!d1.carrier.same_as(d2.carrier)) throw std::invalid_argument("carrier mismatch in convolution");
  const Carrier& c = d1.carrier;
  std::vector<std::uint64_t> s1 = detail::support_of(d1.w);
  std::vector<std::uint64_t> s2 = detail::support_of(d2.w);
  if (s1.size() * s2.size() > budget)
    throw BudgetError("convolution exceeds exact-mode budget");
  std::vector<double> out(c.size(), 0.0);
  detail::convolve_scatter(c, d1.w, s1, d2.w, s2, out);
  // Remove float drift so long chains keep the sum-to-one invariant.
  double total = 0.0;
  for (double v : out) total += v;
  for (double& v : out) v /= total;
  return Dist(c, std::move(out));
}

inline double stat_dist(const Dist& a, const Dist& b) {
  if (!a.carrier.same_as(b.carrier)) throw std::invalid_argument("carrier mismatch");
  double s = 0.0;
  for (std::uint64_t i = 0; i < a.w.size(); ++i) s += std::abs(a.w[i] - b.w[i]);
  return 0.5 * s;
}

inline double linf_dist(const Dist& a, const Dist& b) {
  if (!a.carrier.same_as(b.carrier)) throw std::invalid_argument("carrier mismatch");
  double m = 0.0;
  for (std::uint64_t i = 0; i < a.w.size(); ++i) m = std::max(m, std::abs(a.w[i] - b.w[i]));
  return m;
}

/// l2 norm: sqrt(sum w^2).
inline double l2_norm(const Dist& d) {
  double s = 0.0;
  for (double x : d.w) s += x * x;
  return std::sqrt(s);
}

/// L2 norm: sqrt(E w^2) over the carrier.
inline double L2_norm(const Dist& d) {
  double s = 0.0;
  for (double x : d.w) s += x * x;
  return std::sqrt(s / static_cast<double>(d.carrier.size()));
}

inline double collision_prob(const Dist& d) {
  double s = 0.0;
  for (double x : d.w) s += x * x;
  return s;
}

/// Marginal of D onto the given coordinates (in their listed order).
inline Dist dist_marginal(const Dist& d, const std::vector<std::uint32_t>& coords) {
  const Carrier& c = d.carrier;
  const std::uint64_t n = c.group().order();
  std::uint64_t msize = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) msize *= n;
  std::vector<double> out(msize, 0.0);
  std::array<std::uint32_t, 8> ids;
  for (std::uint64_t x = 0; x < c.size(); ++x) {
    if (d.w[x] == 0.0) continue;
    c.decompose(x, ids.data());
    std::uint64_t mi = 0;
    for (std::uint32_t coord : coords) mi = mi * n + ids[coord];
    out[mi] += d.w[x];
  }
  Carrier mc(c.group(), static_cast<std::uint32_t>(coords.size()));
  double total = 0.0;
  for (double v : out) total += v;
  for (double& v : out) v /= total;
  return Dist(mc, std::move(out), d.form, d.samples, d.seed);
}

/// Verdict of an (eps,k)-goodness scan with its worst witness.
struct GoodnessResult {
  bool good = true;
  double max_rel_dev = 0.0;                // worst |p * n^k - 1|
  std::vector<std::uint32_t> worst_coords;
  std::vector<std::uint32_t> worst_assignment;
  double worst_prob = 0.0;
};

namespace detail {
inline void for_each_subset(std::uint32_t m, std::uint32_t k,
                            const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
  std::vector<std::uint32_t> idx(k);
  for (std::uint32_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::int32_t i = static_cast<std::int32_t>(k) - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (std::uint32_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}
}  // namespace detail

/// Checks every k-subset of coordinates and every assignment against the
/// (1 +- eps) n^-k band.
inline GoodnessResult is_eps_k_good(const Dist& d, double eps, std::uint32_t k,
                                    std::uint64_t budget = kDefaultBudget) {
  const std::uint32_t m = d.carrier.arity();
  if (k < 1 || k > m) throw std::invalid_argument("k must be in [1, arity]");
  const std::uint64_t n = d.carrier.group().order();
  std::uint64_t cells = 1;
  for (std::uint32_t i = 0; i < k; ++i) cells *= n;
  if (cells > budget || d.carrier.size() > budget)
    throw BudgetError("goodness scan exceeds budget");

  GoodnessResult res;
  const double target = 1.0 / static_cast<double>(cells);
  detail::for_each_subset(m, k, [&](const std::vector<std::uint32_t>& coords) {
    Dist marg = dist_marginal(d, coords);
    for (std::uint64_t cell = 0; cell < marg.w.size(); ++cell) {
      double rel = std::abs(marg.w[cell] - target) / target;
      if (rel > res.max_rel_dev) {
        res.max_rel_dev = rel;
        res.worst_coords = coords;
        res.worst_assignment.resize(k);
        std::uint64_t tmp = cell;
        for (std::uint32_t i = k; i-- > 0;) {
          res.worst_assignment[i] = static_cast<std::uint32_t>(tmp % n);
          tmp /= n;
        }
        res.worst_prob = marg.w[cell];
      }
    }
  });
  res.good = res.max_rel_dev <= eps;
  return res;
}

/// Seeded empirical estimate from an index sampler. Per-cell uncertainty is
/// available through Dist::cell_half_width.
inline Dist mc_estimate(const std::function<std::uint64_t(CounterRng&)>& sampler,
                        const Carrier& c, std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<std::uint64_t> hits(c.size(), 0);
  CounterRng rng = CounterRng(seed).child(0x6d635f657374ull);
  for (std::uint64_t i = 0; i < n_samples; ++i) ++hits[sampler(rng)];
  std::vector<double> w(c.size());
  for (std::uint64_t i = 0; i < c.size(); ++i)
    w[i] = static_cast<double>(hits[i]) / static_cast<double>(n_samples);
  return Dist(c, std::move(w), Dist::Form::kEmpirical, n_samples, seed);
}

/// Alias-table sampler over a Dist, deterministic for a fixed build order.
class DistSampler {
 public:
  explicit DistSampler(const Dist& d) : n_(d.w.size()), prob_(n_), alias_(n_) {
    std::vector<double> scaled(n_);
    for (std::uint64_t i = 0; i < n_; ++i) scaled[i] = d.w[i] * static_cast<double>(n_);
    std::vector<std::uint64_t> small, large;
    for (std::uint64_t i = n_; i-- > 0;) (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
      std::uint64_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint64_t i : large) prob_[i] = 1.0;
    for (std::uint64_t i : small) prob_[i] = 1.0;
  }

  std::uint64_t sample(CounterRng& rng) const {
    std::uint64_t i = rng.below(n_);
    return rng.real01() < prob_[i] ? i : alias_[i];
  }

 private:
  std::uint64_t n_;
  std::vector<double> prob_;
  std::vector<std::uint64_t> alias_;
};

// ---------------------------------------------------------------------------
// Integer-count form. The paper's identities are exact; identity-type checks
// run on counts over a common denominator so no float rounding can mask a
// violation.
// ---------------------------------------------------------------------------

using u128 = unsigned __int128;
using i128 = __int128;

struct CountDist {
  Carrier carrier;
  std::vector<std::uint64_t> counts;
  u128 denom = 0;

  CountDist(const Carrier& c, std::vector<std::uint64_t> cnt, u128 den)
      : carrier(c), counts(std::move(cnt)), denom(den) {
    if (counts.size() != carrier.size()) throw std::invalid_argument("count vector size mismatch");
  }

  u128 total() const {
    u128 t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
  }
  bool is_distribution() const { return total() == denom; }

  Dist to_dist() const {
    std::vector<double> w(counts.size());
    double d = static_cast<double>(denom);
    for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(counts[i]) / d;
    return Dist(carrier, std::move(w));
  }
};

inline CountDist count_uniform(const Carrier& c) {
  return CountDist(c, std::vector<std::uint64_t>(c.size(), 1), c.size());
}

inline CountDist count_point(const Carrier& c, std::uint64_t idx) {
  std::vector<std::uint64_t> cnt(c.size(), 0);
  cnt.at(idx) = 1;
  return CountDist(c, std::move(cnt), 1);
}

inline CountDist count_from_subset(const SubsetIndicator& s) {
  if (s.count == 0) throw std::invalid_argument("empty subset");
  std::vector<std::uint64_t> cnt(s.carrier.size(), 0);
  for (std::uint64_t i = 0; i < s.member.size(); ++i) cnt[i] = s.member[i];
  return CountDist(s.carrier, std::move(cnt), s.count);
}

inline CountDist count_convolve(const CountDist& d1, const CountDist& d2,
                                std::uint64_t budget = kDefaultBudget) {
  if (!d1.carrier.same_as(d2.carrier)) throw std::invalid_argument("carrier mismatch in convolution");
  const Carrier& c = d1.carrier;
  if (d1.denom * d2.denom > u128(UINT64_MAX)) throw BudgetError("count denominator overflow");
  std::vector<std::uint64_t> s1 = detail::support_of_counts(d1.counts);
  std::vector<std::uint64_t> s2 = detail::support_of_counts(d2.counts);
  if (s1.size() * s2.size() > budget) throw BudgetError("count convolution exceeds budget");
  std::vector<std::uint64_t> out(c.size(), 0);
  detail::convolve_scatter(c, d1.counts, s1, d2.counts, s2, out);
  return CountDist(c, std::move(out), d1.denom * d2.denom);
}

/// Exact statistical distance to uniform, as a double computed from counts.
inline double count_stat_dist_to_uniform(const CountDist& d) {
  // sum |c/D - 1/M| = sum |c*M - D| / (D*M)
  const u128 D = d.denom;
  const u128 M = d.carrier.size();
  u128 acc = 0;
  for (std::uint64_t c : d.counts) {
    u128 lhs = u128(c) * M;
    acc += lhs > D ? lhs - D : D - lhs;
  }
  return 0.5 * static_cast<double>(acc) / (static_cast<double>(D) * static_cast<double>(M));
}

/// CSV rows: index, tuple (element indices joined by ';'), weight.
inline void dist_to_csv(const Dist& d, std::ostream& os) {
  os << "index,tuple,weight\n";
  std::array<std::uint32_t, 8> ids;
  for (std::uint64_t i = 0; i < d.w.size(); ++i) {
    d.carrier.decompose(i, ids.data());
    os << i << ",";
    for (std::uint32_t j = 0; j < d.carrier.arity(); ++j) {
      if (j) os << ';';
      os << ids[j];
    }
    os << "," << d.w[i] << "\n";
  }
}

/// Uniform distribution on the conjugacy class of x (the law of u^-1 x u for
/// uniform u).
inline Dist class_dist(const GroupTable& g, GroupElem x) {
  Carrier c(g, 1);
  const ConjClass& cls = g.class_of(x);
  std::vector<double> w(c.size(), 0.0);
  double p = 1.0 / static_cast<double>(cls.size());
  for (std::uint32_t m : cls.members) w[m] = p;
  return Dist(c, std::move(w));
}

}  // namespace gmix

#endif  // GMIX_DIST_HPP_
