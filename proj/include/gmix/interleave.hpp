#ifndef GMIX_INTERLEAVE_HPP_
#define GMIX_INTERLEAVE_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmix/dist.hpp"
#include "gmix/group.hpp"
#include "gmix/rng.hpp"

namespace gmix {

/// k x t matrix of group elements: row i is party i's tuple.
struct TupleInput {
  std::uint32_t k = 0, t = 0;
  std::vector<GroupElem> entries;  // row-major, entries[i*t + j]

  TupleInput(std::uint32_t k_, std::uint32_t t_)
      : k(k_), t(t_), entries(std::size_t{k_} * t_) {}
  GroupElem& at(std::uint32_t i, std::uint32_t j) { return entries[std::size_t{i} * t + j]; }
  GroupElem at(std::uint32_t i, std::uint32_t j) const { return entries[std::size_t{i} * t + j]; }
};

/// a1 b1 a2 b2 ... at bt.
inline GroupElem interleaved2(const GroupTable& g, const std::vector<GroupElem>& a,
                              const std::vector<GroupElem>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("interleaved tuples must have equal length");
  GroupElem acc = g.id();
  for (std::size_t j = 0; j < a.size(); ++j) acc = g.mul(g.mul(acc, a[j]), b[j]);
  return acc;
}

/// Column-order product a11 ... ak1 a12 ... ak2 ...
inline GroupElem interleavedK(const GroupTable& g, const TupleInput& x) {
  GroupElem acc = g.id();
  for (std::uint32_t j = 0; j < x.t; ++j)
    for (std::uint32_t i = 0; i < x.k; ++i) acc = g.mul(acc, x.at(i, j));
  return acc;
}

/// Interleaved product of two G^t carrier indices.
inline std::uint32_t interleaved2_index(const Carrier& ct, std::uint64_t ai, std::uint64_t bi) {
  const GroupTable& g = ct.group();
  std::array<std::uint32_t, 8> a, b;
  ct.decompose(ai, a.data());
  ct.decompose(bi, b.data());
  GroupElem acc = g.id();
  for (std::uint32_t j = 0; j < ct.arity(); ++j)
    acc = g.mul(g.mul(acc, GroupElem{a[j]}), GroupElem{b[j]});
  return acc.idx;
}

/// Exact distribution of a . b for a, b uniform on subsets of G^t, as counts
/// over |A||B|.
inline CountDist count_interleaved2(const SubsetIndicator& A, const SubsetIndicator& B,
                                    std::uint64_t budget = kDefaultBudget) {
  if (!A.carrier.same_as(B.carrier)) throw std::invalid_argument("carrier mismatch");
  if (A.count == 0 || B.count == 0) throw std::invalid_argument("empty subset");
  if (A.count * B.count > budget) throw BudgetError("interleaved product enumeration exceeds budget");
  const Carrier& ct = A.carrier;
  Carrier cg(ct.group(), 1);
  std::vector<std::uint64_t> counts(cg.size(), 0);
  std::vector<std::uint64_t> as = A.indices(), bs = B.indices();
  for (std::uint64_t ai : as)
    for (std::uint64_t bi : bs) ++counts[interleaved2_index(ct, ai, bi)];
  return CountDist(cg, std::move(counts), u128(A.count) * B.count);
}

inline Dist dist_interleaved2_exact(const SubsetIndicator& A, const SubsetIndicator& B,
                                    std::uint64_t budget = kDefaultBudget) {
  return count_interleaved2(A, B, budget).to_dist();
}

inline Dist dist_interleaved2_mc(const SubsetIndicator& A, const SubsetIndicator& B,
                                 std::uint64_t n_samples, std::uint64_t seed) {
  const Carrier& ct = A.carrier;
  Carrier cg(ct.group(), 1);
  std::vector<std::uint64_t> as = A.indices(), bs = B.indices();
  return mc_estimate(
      [&](CounterRng& rng) {
        std::uint64_t ai = as[rng.below(as.size())];
        std::uint64_t bi = bs[rng.below(bs.size())];
        return std::uint64_t{interleaved2_index(ct, ai, bi)};
      },
      cg, n_samples, seed);
}

// ---------------------------------------------------------------------------
// The s-tuple: s(eps) = u_1^{eps_1} u_2^{eps_2} ... u_k^{eps_k} over 2k
// independent uniform u's, a distribution on G^(2^k).
// ---------------------------------------------------------------------------

/// Exact s-tuple law by enumerating all |G|^(2k) u-assignments.
inline Dist s_tuple_dist(const GroupTable& g, std::uint32_t k,
                         std::uint64_t budget = kDefaultBudget) {
  if (k < 1 || k > 3) throw std::invalid_argument("s_tuple_dist supports k in [1,3]");
  const std::uint64_t n = g.order();
  const std::uint32_t m = 1u << k;
  std::uint64_t assignments = 1;
  for (std::uint32_t i = 0; i < 2 * k; ++i) assignments *= n;
  Carrier cm(g, m);
  if (assignments * m > budget || cm.size() > budget)
    throw BudgetError("s-tuple enumeration exceeds budget");

  std::vector<std::uint64_t> counts(cm.size(), 0);
  std::vector<std::uint32_t> u(2 * k, 0);  // u[2i+b] = u_{i+1}^b
  std::array<std::uint32_t, 8> coords;
  while (true) {
    for (std::uint32_t eps = 0; eps < m; ++eps) {
      GroupElem acc = g.id();
      for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t bit = (eps >> (k - 1 - i)) & 1;
        acc = g.mul(acc, GroupElem{u[2 * i + bit]});
      }
      coords[eps] = acc.idx;
    }
    ++counts[cm.compose(coords.data())];
    std::uint32_t pos = 2 * k;
    while (pos > 0) {
      --pos;
      if (++u[pos] < n) break;
      u[pos] = 0;
      if (pos == 0) goto done;
    }
  }
done:
  std::vector<double> w(counts.size());
  for (std::uint64_t i = 0; i < counts.size(); ++i)
    w[i] = static_cast<double>(counts[i]) / static_cast<double>(assignments);
  return Dist(cm, std::move(w));
}

/// Exact joint law of (s(eps), s(eta)) for one coordinate pair, by dynamic
/// programming over the k factors. Feasible for any k since the state lives
/// on G^2.
inline Dist s_tuple_pair_marginal(const GroupTable& g, std::uint32_t k, std::uint32_t eps,
                                  std::uint32_t eta) {
  if (eps >= (1u << k) || eta >= (1u << k)) throw std::invalid_argument("coordinate out of range");
  const std::uint64_t n = g.order();
  Carrier c2(g, 2);
  std::vector<double> state(c2.size(), 0.0);
  state[c2.compose(std::array<std::uint32_t, 2>{g.id().idx, g.id().idx}.data())] = 1.0;
  std::vector<double> next(c2.size());
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t be = (eps >> (k - 1 - i)) & 1, bn = (eta >> (k - 1 - i)) & 1;
    std::fill(next.begin(), next.end(), 0.0);
    if (be == bn) {
      // same u multiplies both partial products
      for (std::uint64_t s = 0; s < c2.size(); ++s) {
        if (state[s] == 0.0) continue;
        std::array<std::uint32_t, 2> xy;
        c2.decompose(s, xy.data());
        double v = state[s] / static_cast<double>(n);
        for (std::uint32_t u = 0; u < n; ++u) {
          std::array<std::uint32_t, 2> out{g.mul(GroupElem{xy[0]}, GroupElem{u}).idx,
                                           g.mul(GroupElem{xy[1]}, GroupElem{u}).idx};
          next[c2.compose(out.data())] += v;
        }
      }
    } else {
      // independent u's: each partial product becomes uniform given the other
      // multiplies independently; fold in two passes.
      std::vector<double> mid(c2.size(), 0.0);
      for (std::uint64_t s = 0; s < c2.size(); ++s) {
        if (state[s] == 0.0) continue;
        std::array<std::uint32_t, 2> xy;
        c2.decompose(s, xy.data());
        double v = state[s] / static_cast<double>(n);
        for (std::uint32_t u = 0; u < n; ++u) {
          std::array<std::uint32_t, 2> out{g.mul(GroupElem{xy[0]}, GroupElem{u}).idx, xy[1]};
          mid[c2.compose(out.data())] += v;
        }
      }
      for (std::uint64_t s = 0; s < c2.size(); ++s) {
        if (mid[s] == 0.0) continue;
        std::array<std::uint32_t, 2> xy;
        c2.decompose(s, xy.data());
        double v = mid[s] / static_cast<double>(n);
        for (std::uint32_t u = 0; u < n; ++u) {
          std::array<std::uint32_t, 2> out{xy[0], g.mul(GroupElem{xy[1]}, GroupElem{u}).idx};
          next[c2.compose(out.data())] += v;
        }
      }
    }
    state.swap(next);
  }
  return Dist(c2, std::move(state));
}

/// Samples one s-tuple realization; writes the 2^k coordinate indices.
inline void sample_s_tuple(const GroupTable& g, std::uint32_t k, CounterRng& rng,
                           std::uint32_t* coords) {
  const std::uint64_t n = g.order();
  std::array<std::uint32_t, 16> u;
  for (std::uint32_t i = 0; i < 2 * k; ++i) u[i] = static_cast<std::uint32_t>(rng.below(n));
  const std::uint32_t m = 1u << k;
  for (std::uint32_t eps = 0; eps < m; ++eps) {
    GroupElem acc = g.id();
    for (std::uint32_t i = 0; i < k; ++i)
      acc = g.mul(acc, GroupElem{u[2 * i + ((eps >> (k - 1 - i)) & 1)]});
    coords[eps] = acc.idx;
  }
}

// ---------------------------------------------------------------------------
// The mu-tuple of the NOF theorem: coordinate eps is the interleaved product
// x_1^{eps_1} . x_2^{eps_2} . ... . x_k^{eps_k} over uniform x_i^b in G^t;
// equivalently the pointwise product of t independent s-tuples.
// ---------------------------------------------------------------------------

/// Incremental exact mu-tuple law for k = 2. Each appended s-factor is applied
/// as four averaging passes (one per u variable), each costing |G|^4 * |G|.
class MuChain {
 public:
  explicit MuChain(const GroupTable& g) : group_(&g), carrier_(g, 4), state_(carrier_.size(), 0.0) {
    std::array<std::uint32_t, 4> e{g.id().idx, g.id().idx, g.id().idx, g.id().idx};
    state_[carrier_.compose(e.data())] = 1.0;
  }

  std::uint32_t t() const { return t_; }

  /// Multiplies the tuple pointwise by one fresh s-factor.
  void advance() {
    // party 1: coords {00,01} get u1^0, coords {10,11} get u1^1
    apply_pass({0, 1});
    apply_pass({2, 3});
    // party 2: coords {00,10} get u2^0, coords {01,11} get u2^1
    apply_pass({0, 2});
    apply_pass({1, 3});
    double total = 0.0;
    for (double v : state_) total += v;
    for (double& v : state_) v /= total;
    ++t_;
  }

  Dist dist() const { return Dist(carrier_, state_); }
  const Carrier& carrier() const { return carrier_; }

 private:
  // state'(x) = E_u state(x with the listed coords right-multiplied by u),
  // scatter form: out[x: coords *= u] += state[x] / n. Digits are walked as
  // an odometer; the scatter index is rebuilt from precomputed coordinate
  // strides.
  void apply_pass(std::array<std::uint32_t, 2> coords) {
    const GroupTable& g = *group_;
    const std::uint64_t n = g.order();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::uint64_t stride[4];
    stride[3] = 1;
    for (int i = 2; i >= 0; --i) stride[i] = stride[i + 1] * n;
    const std::uint32_t c0 = coords[0], c1 = coords[1];
    std::vector<double> out(state_.size(), 0.0);
    std::array<std::uint32_t, 4> ids{0, 0, 0, 0};
    for (std::uint64_t idx = 0; idx < state_.size(); ++idx) {
      const double v = state_[idx] * inv_n;
      if (v != 0.0) {
        const std::uint64_t base =
            idx - ids[c0] * stride[c0] - ids[c1] * stride[c1];
        for (std::uint32_t u = 0; u < n; ++u) {
          std::uint64_t a = g.mul(GroupElem{ids[c0]}, GroupElem{u}).idx;
          std::uint64_t b = g.mul(GroupElem{ids[c1]}, GroupElem{u}).idx;
          out[base + a * stride[c0] + b * stride[c1]] += v;
        }
      }
      for (std::uint32_t pos = 4; pos-- > 0;) {
        if (++ids[pos] < n) break;
        ids[pos] = 0;
      }
    }
    state_.swap(out);
  }

  const GroupTable* group_;
  Carrier carrier_;
  std::vector<double> state_;
  std::uint32_t t_ = 0;
};

/// Exact mu-tuple law (k = 2 only; larger k exceeds any dense carrier).
inline Dist mu_tuple_dist(const GroupTable& g, std::uint32_t k, std::uint32_t t,
                          std::uint64_t budget = kDefaultBudget) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  if (k != 2) throw BudgetError("exact mu-tuple law only materializes for k = 2");
  const std::uint64_t n = g.order();
  std::uint64_t cost = n * n * n * n * n * 4 * t;
  if (cost > budget) throw BudgetError("mu-tuple chain exceeds budget");
  MuChain chain(g);
  for (std::uint32_t i = 0; i < t; ++i) chain.advance();
  return chain.dist();
}

/// Samples the 2^k mu coordinates directly from the definition.
inline void sample_mu_tuple(const GroupTable& g, std::uint32_t k, std::uint32_t t,
                            CounterRng& rng, std::uint32_t* coords) {
  const std::uint32_t m = 1u << k;
  std::array<GroupElem, 256> acc;
  for (std::uint32_t eps = 0; eps < m; ++eps) acc[eps] = g.id();
  std::array<std::uint32_t, 16> u;
  for (std::uint32_t j = 0; j < t; ++j) {
    for (std::uint32_t i = 0; i < 2 * k; ++i) u[i] = static_cast<std::uint32_t>(rng.below(g.order()));
    for (std::uint32_t eps = 0; eps < m; ++eps)
      for (std::uint32_t i = 0; i < k; ++i)
        acc[eps] = g.mul(acc[eps], GroupElem{u[2 * i + ((eps >> (k - 1 - i)) & 1)]});
  }
  for (std::uint32_t eps = 0; eps < m; ++eps) coords[eps] = acc[eps].idx;
}

// ---------------------------------------------------------------------------
// Box norm.
// ---------------------------------------------------------------------------

/// Real-valued function on a product of finite axes, mixed-radix indexed
/// (axis 0 most significant).
struct BoxFunction {
  std::vector<std::uint64_t> axes;
  std::vector<double> values;

  std::uint64_t size() const {
    std::uint64_t s = 1;
    for (std::uint64_t a : axes) s *= a;
    return s;
  }
  double at(const std::vector<std::uint64_t>& ids) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < axes.size(); ++i) idx = idx * axes[i] + ids[i];
    return values[idx];
  }
};

struct BoxNormResult {
  double value = 0.0;      // ||f||_box
  double power_sum = 0.0;  // ||f||_box^(2^k) before the root
  bool exact = true;
  double std_error = 0.0;  // of power_sum, MC mode
  std::uint64_t samples = 0;
};

namespace detail {
inline double box_root(double power_sum, std::uint32_t k) {
  // The cube average is a nonnegative quantity; values below -tolerance
  // indicate a numerical fault rather than rounding.
  if (power_sum < -1e-9) throw std::runtime_error("negative box-norm power sum");
  if (power_sum < 0.0) power_sum = 0.0;
  return std::pow(power_sum, 1.0 / static_cast<double>(1u << k));
}
}  // namespace detail

/// k = 2 exact route: g(x,x') = E_y f(x,y) f(x',y), then ||f||^4 = E g^2.
inline BoxNormResult box_norm_2_exact(const BoxFunction& f) {
  if (f.axes.size() != 2) throw std::invalid_argument("expected two axes");
  const std::uint64_t X = f.axes[0], Y = f.axes[1];
  double sum = 0.0;
  for (std::uint64_t x = 0; x < X; ++x) {
    const double* fx = f.values.data() + x * Y;
    for (std::uint64_t x2 = 0; x2 <= x; ++x2) {
      const double* fx2 = f.values.data() + x2 * Y;
      double inner = 0.0;
      for (std::uint64_t y = 0; y < Y; ++y) inner += fx[y] * fx2[y];
      inner /= static_cast<double>(Y);
      sum += (x2 == x ? 1.0 : 2.0) * inner * inner;
    }
  }
  BoxNormResult res;
  res.power_sum = sum / (static_cast<double>(X) * static_cast<double>(X));
  res.value = detail::box_root(res.power_sum, 2);
  return res;
}

/// General box norm. k = 2 uses the exact quadratic route; k = 3,4 run the
/// full 2k-fold sum when it fits the budget and otherwise a seeded block MC
/// with a standard error on the power sum.
inline BoxNormResult box_norm(const BoxFunction& f, std::uint64_t budget = kDefaultBudget,
                              std::uint64_t n_samples = 1'000'000, std::uint64_t seed = 1) {
  const std::uint32_t k = static_cast<std::uint32_t>(f.axes.size());
  if (k == 2) return box_norm_2_exact(f);
  if (k < 2 || k > 4) throw std::invalid_argument("box norm supports k in [2,4]");

  double pairs_total = 1.0;
  for (std::uint64_t a : f.axes) pairs_total *= static_cast<double>(a) * static_cast<double>(a);
  if (pairs_total <= static_cast<double>(budget)) {
    // direct sum over all (x_i^0, x_i^1)
    std::vector<std::uint64_t> lo(k, 0), hi(k, 0), ids(k);
    const std::uint32_t m = 1u << k;
    double sum = 0.0;
    std::uint64_t count = 0;
    while (true) {
      double prod = 1.0;
      for (std::uint32_t eps = 0; eps < m && prod != 0.0; ++eps) {
        for (std::uint32_t i = 0; i < k; ++i) ids[i] = ((eps >> (k - 1 - i)) & 1) ? hi[i] : lo[i];
        prod *= f.at(ids);
      }
      sum += prod;
      ++count;
      std::uint32_t pos = 2 * k;
      while (pos > 0) {
        --pos;
        std::uint64_t axis = f.axes[pos / 2];
        std::uint64_t& v = (pos % 2 == 0) ? lo[pos / 2] : hi[pos / 2];
        if (++v < axis) break;
        v = 0;
        if (pos == 0) goto direct_done;
      }
    }
  direct_done:
    BoxNormResult res;
    res.power_sum = sum / static_cast<double>(count);
    res.value = detail::box_root(res.power_sum, k);
    return res;
  }

  // MC: block means give the standard error of the power-sum estimate.
  const std::uint64_t n_blocks = 100;
  const std::uint64_t per_block = std::max<std::uint64_t>(1, n_samples / n_blocks);
  std::vector<double> block_means(n_blocks, 0.0);
  std::vector<std::uint64_t> lo(k), hi(k), ids(k);
  const std::uint32_t m = 1u << k;
  CounterRng master(seed);
  for (std::uint64_t b = 0; b < n_blocks; ++b) {
    CounterRng rng = master.child(b);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < per_block; ++s) {
      for (std::uint32_t i = 0; i < k; ++i) {
        lo[i] = rng.below(f.axes[i]);
        hi[i] = rng.below(f.axes[i]);
      }
      double prod = 1.0;
      for (std::uint32_t eps = 0; eps < m && prod != 0.0; ++eps) {
        for (std::uint32_t i = 0; i < k; ++i) ids[i] = ((eps >> (k - 1 - i)) & 1) ? hi[i] : lo[i];
        prod *= f.at(ids);
      }
      acc += prod;
    }
    block_means[b] = acc / static_cast<double>(per_block);
  }
  double mean = 0.0;
  for (double v : block_means) mean += v;
  mean /= static_cast<double>(n_blocks);
  double var = 0.0;
  for (double v : block_means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n_blocks - 1) * static_cast<double>(n_blocks);

  BoxNormResult res;
  res.power_sum = mean;
  res.exact = false;
  res.std_error = std::sqrt(var);
  res.samples = n_blocks * per_block;
  res.value = detail::box_root(std::max(mean, 0.0), k);
  return res;
}

// ---------------------------------------------------------------------------
// Number-on-forehead protocols as cylinder-intersection partitions. Party i
// never sees row i, so each cell predicate i is a subset of the product of
// the other axes. k = 2 cells are plain rectangles.
// ---------------------------------------------------------------------------

struct NofProtocol {
  std::uint32_t k = 2, t = 1;
  std::uint64_t axis = 0;  // |G|^t

  struct Cell {
    int output = 0;
    // preds[i]: bitset over the mixed-radix index of all rows except i
    // (remaining rows in ascending order).
    std::vector<std::vector<std::uint8_t>> preds;
  };
  std::vector<Cell> cells;

  std::uint32_t comm_bits() const {
    std::uint32_t c = 0;
    while ((1ull << c) < cells.size()) ++c;
    return c;
  }

  std::uint64_t others_index(const std::uint64_t* rows, std::uint32_t skip) const {
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < k; ++i)
      if (i != skip) idx = idx * axis + rows[i];
    return idx;
  }

  bool cell_contains(const Cell& c, const std::uint64_t* rows) const {
    for (std::uint32_t i = 0; i < k; ++i)
      if (!c.preds[i][others_index(rows, i)]) return false;
    return true;
  }

  /// Output of the unique cell containing the input. Throws if the cover is
  /// not a partition at this point.
  int evaluate(const std::uint64_t* rows) const {
    int found = -1;
    for (const Cell& c : cells) {
      if (cell_contains(c, rows)) {
        if (found >= 0) throw std::runtime_error("protocol cells overlap");
        found = c.output;
      }
    }
    if (found < 0) throw std::runtime_error("protocol cells do not cover the input space");
    return found;
  }

  /// Deterministic mode requires the cells to partition the input space.
  void verify_partition(std::uint64_t budget = kDefaultBudget) const {
    double total = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) total *= static_cast<double>(axis);
    if (total * static_cast<double>(cells.size()) > static_cast<double>(budget))
      throw BudgetError("partition verification exceeds budget");
    std::vector<std::uint64_t> rows(k, 0);
    while (true) {
      int hits = 0;
      for (const Cell& c : cells)
        if (cell_contains(c, rows.data())) ++hits;
      if (hits != 1) throw std::invalid_argument("rectangle cover is not a partition");
      std::uint32_t pos = k;
      while (pos > 0) {
        --pos;
        if (++rows[pos] < axis) break;
        rows[pos] = 0;
        if (pos == 0) return;
      }
    }
  }
};

/// Random grid partition for two parties: X blocks times Y blocks, with a
/// random output bit per rectangle.
inline NofProtocol random_rectangle_partition(std::uint64_t axis, std::uint32_t bx, std::uint32_t by,
                                              CounterRng rng) {
  NofProtocol p;
  p.k = 2;
  p.axis = axis;
  std::vector<std::uint32_t> xblock(axis), yblock(axis);
  for (std::uint64_t i = 0; i < axis; ++i) xblock[i] = static_cast<std::uint32_t>(rng.below(bx));
  for (std::uint64_t i = 0; i < axis; ++i) yblock[i] = static_cast<std::uint32_t>(rng.below(by));
  for (std::uint32_t i = 0; i < bx; ++i)
    for (std::uint32_t j = 0; j < by; ++j) {
      NofProtocol::Cell c;
      c.output = static_cast<int>(rng.below(2));
      c.preds.assign(2, std::vector<std::uint8_t>(axis, 0));
      for (std::uint64_t x = 0; x < axis; ++x)
        if (xblock[x] == i) c.preds[1][x] = 1;  // depends on row 0 only
      for (std::uint64_t y = 0; y < axis; ++y)
        if (yblock[y] == j) c.preds[0][y] = 1;  // depends on row 1 only
      p.cells.push_back(std::move(c));
    }
  return p;
}

/// Random cylinder partition for three parties: blocks of (x2,x3) crossed
/// with blocks of (x1,x3).
inline NofProtocol random_cylinder_partition3(std::uint64_t axis, std::uint32_t b1, std::uint32_t b2,
                                              CounterRng rng) {
  NofProtocol p;
  p.k = 3;
  p.axis = axis;
  const std::uint64_t pair = axis * axis;
  std::vector<std::uint32_t> phi(pair), psi(pair);
  for (std::uint64_t i = 0; i < pair; ++i) phi[i] = static_cast<std::uint32_t>(rng.below(b1));
  for (std::uint64_t i = 0; i < pair; ++i) psi[i] = static_cast<std::uint32_t>(rng.below(b2));
  for (std::uint32_t i = 0; i < b1; ++i)
    for (std::uint32_t j = 0; j < b2; ++j) {
      NofProtocol::Cell c;
      c.output = static_cast<int>(rng.below(2));
      c.preds.assign(3, {});
      c.preds[0].assign(pair, 0);  // over (x2,x3)
      c.preds[1].assign(pair, 0);  // over (x1,x3)
      c.preds[2].assign(pair, 1);  // over (x1,x2): always true
      for (std::uint64_t v = 0; v < pair; ++v) {
        if (phi[v] == i) c.preds[0][v] = 1;
        if (psi[v] == j) c.preds[1][v] = 1;
      }
      p.cells.push_back(std::move(c));
    }
  return p;
}

/// The +-1 correlation function of the pair (g,h): +1 where the interleaved
/// product is g, -1 where it is h.
inline BoxFunction discrepancy_function(const GroupTable& grp, std::uint32_t k, std::uint32_t t,
                                        GroupElem g, GroupElem h,
                                        std::uint64_t budget = kDefaultBudget) {
  Carrier ct(grp, t);
  const std::uint64_t axis = ct.size();
  double total = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) total *= static_cast<double>(axis);
  if (total > static_cast<double>(budget)) throw BudgetError("discrepancy table exceeds budget");

  BoxFunction f;
  f.axes.assign(k, axis);
  f.values.assign(static_cast<std::uint64_t>(total), 0.0);
  std::vector<std::uint64_t> rows(k, 0);
  std::vector<std::array<std::uint32_t, 8>> decomp(k);
  std::uint64_t flat = 0;
  while (true) {
    for (std::uint32_t i = 0; i < k; ++i) ct.decompose(rows[i], decomp[i].data());
    GroupElem acc = grp.id();
    for (std::uint32_t j = 0; j < t; ++j)
      for (std::uint32_t i = 0; i < k; ++i) acc = grp.mul(acc, GroupElem{decomp[i][j]});
    if (acc == g) f.values[flat] = 1.0;
    else if (acc == h) f.values[flat] = -1.0;
    ++flat;
    std::uint32_t pos = k;
    while (pos > 0) {
      --pos;
      if (++rows[pos] < axis) break;
      rows[pos] = 0;
      if (pos == 0) return f;
    }
  }
}

struct DiscrepancyReport {
  double p_g = 0.0, p_h = 0.0;
  double discrepancy = 0.0;       // |p_g - p_h|
  std::uint32_t comm_bits = 0;
  bool exact = true;
  std::uint64_t samples = 0;      // MC mode
  double box_norm_value = -1.0;   // ||d||_box if evaluated
  double box_norm_bound = -1.0;   // 0.5 n 2^c ||d||_box
  double goodness_bound = -1.0;   // 2^c alpha^(1/2^k) if alpha supplied
};

/// Conditional input law: all entries but the last are uniform and the last
/// is solved so the interleaved product hits the target. Exact over
/// |G|^(kt-1) completions, or sampled.
template <typename Visitor>
void for_each_conditioned_input(const GroupTable& grp, std::uint32_t k, std::uint32_t t,
                                GroupElem target, Visitor&& visit) {
  const std::uint64_t n = grp.order();
  const std::uint32_t free_entries = k * t - 1;
  std::vector<std::uint32_t> entry(free_entries, 0);
  std::vector<std::uint64_t> rows(k);
  while (true) {
    // column-order prefix product of all entries before the solved one
    GroupElem prefix = grp.id();
    for (std::uint32_t j = 0; j < t; ++j)
      for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t pos = j * k + i;
        if (pos < free_entries) prefix = grp.mul(prefix, GroupElem{entry[pos]});
      }
    std::uint32_t solved = grp.mul(grp.inv(prefix), target).idx;
    for (std::uint32_t i = 0; i < k; ++i) {
      rows[i] = 0;
      for (std::uint32_t j = 0; j < t; ++j) {
        std::uint32_t pos = j * k + i;
        rows[i] = rows[i] * n + ((pos < free_entries) ? entry[pos] : solved);
      }
    }
    visit(rows.data());
    std::uint32_t pos = free_entries;
    while (pos > 0) {
      --pos;
      if (++entry[pos] < n) break;
      entry[pos] = 0;
      if (pos == 0) return;
    }
  }
}

/// Measured |p_g - p_h| plus the box-norm bound chain.
inline DiscrepancyReport protocol_discrepancy(const GroupTable& grp, const NofProtocol& proto,
                                              GroupElem g, GroupElem h, bool exact,
                                              std::uint64_t n_samples = 1'000'000,
                                              std::uint64_t seed = 7,
                                              double goodness_alpha = -1.0,
                                              double box_norm_value = -1.0) {
  const std::uint64_t n = grp.order();
  DiscrepancyReport rep;
  rep.comm_bits = proto.comm_bits();
  rep.exact = exact;

  if (exact) {
    double completions = 1.0;
    for (std::uint32_t i = 0; i + 1 < proto.k * proto.t; ++i) completions *= static_cast<double>(n);
    std::uint64_t ones_g = 0, ones_h = 0, count = 0;
    for_each_conditioned_input(grp, proto.k, proto.t, g, [&](const std::uint64_t* rows) {
      ones_g += proto.evaluate(rows);
      ++count;
    });
    for_each_conditioned_input(grp, proto.k, proto.t, h, [&](const std::uint64_t* rows) {
      ones_h += proto.evaluate(rows);
    });
    rep.p_g = static_cast<double>(ones_g) / static_cast<double>(count);
    rep.p_h = static_cast<double>(ones_h) / static_cast<double>(count);
  } else {
    CounterRng rng = CounterRng(seed).child(0x6e6f66ull);
    std::uint64_t ones_g = 0, ones_h = 0;
    std::vector<std::uint32_t> entry(proto.k * proto.t - 1);
    std::vector<std::uint64_t> rows(proto.k);
    for (std::uint64_t s = 0; s < n_samples; ++s) {
      for (auto& e : entry) e = static_cast<std::uint32_t>(rng.below(n));
      for (GroupElem target : {g, h}) {
        GroupElem prefix = grp.id();
        for (std::uint32_t j = 0; j < proto.t; ++j)
          for (std::uint32_t i = 0; i < proto.k; ++i) {
            std::uint32_t pos = j * proto.k + i;
            if (pos + 1 < proto.k * proto.t) prefix = grp.mul(prefix, GroupElem{entry[pos]});
          }
        std::uint32_t solved = grp.mul(grp.inv(prefix), target).idx;
        for (std::uint32_t i = 0; i < proto.k; ++i) {
          rows[i] = 0;
          for (std::uint32_t j = 0; j < proto.t; ++j) {
            std::uint32_t pos = j * proto.k + i;
            rows[i] = rows[i] * n + (pos + 1 < proto.k * proto.t ? entry[pos] : solved);
          }
        }
        (target == g ? ones_g : ones_h) += proto.evaluate(rows.data());
      }
    }
    rep.p_g = static_cast<double>(ones_g) / static_cast<double>(n_samples);
    rep.p_h = static_cast<double>(ones_h) / static_cast<double>(n_samples);
    rep.samples = n_samples;
  }
  rep.discrepancy = std::abs(rep.p_g - rep.p_h);

  const double two_c = static_cast<double>(1ull << rep.comm_bits);
  if (box_norm_value >= 0.0) {
    rep.box_norm_value = box_norm_value;
    rep.box_norm_bound = 0.5 * static_cast<double>(n) * two_c * box_norm_value;
  }
  if (goodness_alpha >= 0.0) {
    const double m = static_cast<double>(1u << proto.k);
    rep.goodness_bound = two_c * std::pow(goodness_alpha, 1.0 / m);
  }
  return rep;
}

}  // namespace gmix

#endif  // GMIX_INTERLEAVE_HPP_
