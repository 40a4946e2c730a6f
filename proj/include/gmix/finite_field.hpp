#ifndef GMIX_FINITE_FIELD_HPP_
#define GMIX_FINITE_FIELD_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmix {

/// Element of a finite field, encoded as the base-p digit expansion of its
/// polynomial residue. rep is in [0, q).
struct FieldElem {
  std::uint32_t rep = 0;
  std::uint32_t fid = 0;  // owning field id, checked by public ops

  friend bool operator==(const FieldElem&, const FieldElem&) = default;
};

/// F_q for q = p^e, p prime, q <= 2^16. The modulus is the lowest-encoding
/// monic irreducible polynomial of degree e over F_p, so element encodings
/// are identical across runs and platforms.
///
/// Immutable after construction; all operations are const and thread-safe.
class FieldSpec {
 public:
  FieldSpec(std::uint32_t p, std::uint32_t e) : p_(p), e_(e) {
    if (!is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
    if (e < 1) throw std::invalid_argument("extension degree must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
      q *= p;
      if (q > 65536) throw std::invalid_argument("field size exceeds 2^16");
    }
    q_ = static_cast<std::uint32_t>(q);
    fid_ = p_ * 100 + e_;
    modulus_ = find_modulus();
    build_reduction_rows();
    if (q_ <= kTableLimit) build_tables();
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t e() const { return e_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t id() const { return fid_; }
  /// Coefficients c_0..c_e of the modulus, c_e = 1. Trivial (x - 0 shape,
  /// i.e. {0,1}) when e = 1.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  FieldElem elem(std::uint32_t rep) const {
    if (rep >= q_) throw std::invalid_argument("element rep out of range");
    return FieldElem{rep, fid_};
  }
  FieldElem zero() const { return FieldElem{0, fid_}; }
  FieldElem one() const { return FieldElem{1 % q_, fid_}; }

  FieldElem add(FieldElem a, FieldElem b) const { return wrap(radd(check(a), check(b))); }
  FieldElem sub(FieldElem a, FieldElem b) const { return wrap(rsub(check(a), check(b))); }
  FieldElem mul(FieldElem a, FieldElem b) const { return wrap(rmul(check(a), check(b))); }
  FieldElem neg(FieldElem a) const { return wrap(rneg(check(a))); }
  FieldElem inv(FieldElem a) const { return wrap(rinv(check(a))); }

  /// All q elements once, in rep order.
  std::vector<FieldElem> enumerate() const {
    std::vector<FieldElem> out;
    out.reserve(q_);
    for (std::uint32_t r = 0; r < q_; ++r) out.push_back(FieldElem{r, fid_});
    return out;
  }

  // Raw ops on reps in [0, q). No field-id checks; used in hot loops.
  std::uint32_t radd(std::uint32_t a, std::uint32_t b) const {
    if (!add_table_.empty()) return add_table_[a * q_ + b];
    return add_digits(a, b);
  }
  std::uint32_t rsub(std::uint32_t a, std::uint32_t b) const { return radd(a, rneg(b)); }
  std::uint32_t rmul(std::uint32_t a, std::uint32_t b) const {
    if (!mul_table_.empty()) return mul_table_[a * q_ + b];
    return mul_poly(a, b);
  }
  std::uint32_t rneg(std::uint32_t a) const {
    if (!neg_table_.empty()) return neg_table_[a];
    return neg_digits(a);
  }
  std::uint32_t rinv(std::uint32_t a) const {
    if (a == 0) throw std::domain_error("inverse of zero field element");
    if (!inv_table_.empty()) return inv_table_[a];
    return rpow(a, q_ - 2);
  }
  std::uint32_t rpow(std::uint32_t a, std::uint64_t n) const {
    std::uint32_t acc = 1 % q_, base = a;
    while (n) {
      if (n & 1) acc = rmul(acc, base);
      base = rmul(base, base);
      n >>= 1;
    }
    return acc;
  }

  static bool is_prime(std::uint32_t p) {
    if (p < 2) return false;
    for (std::uint32_t d = 2; d * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }

 private:
  static constexpr std::uint32_t kTableLimit = 1024;

  std::uint32_t check(FieldElem a) const {
    if (a.fid != fid_) throw std::invalid_argument("field element from a different field");
    if (a.rep >= q_) throw std::invalid_argument("field element rep out of range");
    return a.rep;
  }
  FieldElem wrap(std::uint32_t rep) const { return FieldElem{rep, fid_}; }

  std::uint32_t add_digits(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t out = 0, shift = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      out += ((a + b) % p_) * shift;
      a /= p_;
      b /= p_;
      shift *= p_;
    }
    return out;
  }
  std::uint32_t neg_digits(std::uint32_t a) const {
    std::uint32_t out = 0, shift = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      out += ((p_ - a % p_) % p_) * shift;
      a /= p_;
      shift *= p_;
    }
    return out;
  }

  // Polynomial product of two residues, reduced mod the modulus.
  std::uint32_t mul_poly(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::uint32_t> da(e_), db(e_);
    for (std::uint32_t i = 0; i < e_; ++i) {
      da[i] = a % p_;
      a /= p_;
      db[i] = b % p_;
      b /= p_;
    }
    std::vector<std::uint32_t> prod(2 * e_ - 1, 0);
    for (std::uint32_t i = 0; i < e_; ++i)
      for (std::uint32_t j = 0; j < e_; ++j)
        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    // Fold x^(e+k) terms down using the precomputed reduction rows.
    std::vector<std::uint32_t> low(prod.begin(), prod.begin() + e_);
    for (std::uint32_t k = e_; k < 2 * e_ - 1; ++k) {
      std::uint32_t c = prod[k];
      if (c == 0) continue;
      const auto& row = reduction_rows_[k - e_];
      for (std::uint32_t i = 0; i < e_; ++i) low[i] = (low[i] + c * row[i]) % p_;
    }
    std::uint32_t out = 0, shift = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      out += low[i] * shift;
      shift *= p_;
    }
    return out;
  }

  // reduction_rows_[k] = coefficients of x^(e+k) mod modulus.
  void build_reduction_rows() {
    reduction_rows_.clear();
    if (e_ == 1) return;
    std::vector<std::uint32_t> cur(e_, 0);
    for (std::uint32_t i = 0; i < e_; ++i) cur[i] = (p_ - modulus_[i]) % p_;  // x^e
    reduction_rows_.push_back(cur);
    for (std::uint32_t k = 1; k + 1 < e_; ++k) {
      std::vector<std::uint32_t> nxt(e_, 0);
      std::uint32_t top = cur[e_ - 1];
      for (std::uint32_t i = e_ - 1; i > 0; --i) nxt[i] = cur[i - 1];
      nxt[0] = 0;
      if (top) {
        for (std::uint32_t i = 0; i < e_; ++i)
          nxt[i] = (nxt[i] + top * ((p_ - modulus_[i]) % p_)) % p_;
      }
      reduction_rows_.push_back(nxt);
      cur = nxt;
    }
  }

  // Monic polynomials as coefficient vectors c_0..c_d with c_d = 1.
  using Poly = std::vector<std::uint32_t>;

  // Remainder of a mod b over F_p (b monic).
  Poly poly_rem(Poly a, const Poly& b) const {
    while (a.size() >= b.size()) {
      std::uint32_t lead = a.back();
      if (lead) {
        std::size_t off = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i)
          a[off + i] = (a[off + i] + (p_ - lead * b[i] % p_)) % p_;
      }
      a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
  }

  bool divides(const Poly& d, const Poly& f) const { return poly_rem(f, d).empty(); }

  // Exhaustive check: no monic factor of degree 1..e/2 divides f.
  bool is_irreducible(const Poly& f) const {
    std::uint32_t deg = static_cast<std::uint32_t>(f.size()) - 1;
    for (std::uint32_t d = 1; 2 * d <= deg; ++d) {
      std::uint64_t count = 1;
      for (std::uint32_t i = 0; i < d; ++i) count *= p_;
      for (std::uint64_t enc = 0; enc < count; ++enc) {
        Poly g(d + 1, 0);
        std::uint64_t v = enc;
        for (std::uint32_t i = 0; i < d; ++i) {
          g[i] = static_cast<std::uint32_t>(v % p_);
          v /= p_;
        }
        g[d] = 1;
        if (divides(g, f)) return false;
      }
    }
    return true;
  }

  std::vector<std::uint32_t> find_modulus() const {
    if (e_ == 1) return {0, 1};
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < e_; ++i) count *= p_;
    for (std::uint64_t enc = 0; enc < count; ++enc) {
      Poly f(e_ + 1, 0);
      std::uint64_t v = enc;
      for (std::uint32_t i = 0; i < e_; ++i) {
        f[i] = static_cast<std::uint32_t>(v % p_);
        v /= p_;
      }
      f[e_] = 1;
      if (is_irreducible(f)) return f;
    }
    throw std::logic_error("no irreducible modulus found");  // unreachable for prime p
  }

  void build_tables() {
    add_table_.resize(std::size_t{q_} * q_);
    mul_table_.resize(std::size_t{q_} * q_);
    neg_table_.resize(q_);
    inv_table_.assign(q_, 0);
    for (std::uint32_t a = 0; a < q_; ++a) {
      neg_table_[a] = static_cast<std::uint16_t>(neg_digits(a));
      for (std::uint32_t b = 0; b < q_; ++b) {
        add_table_[std::size_t{a} * q_ + b] = static_cast<std::uint16_t>(add_digits(a, b));
        std::uint32_t m = mul_poly(a, b);
        mul_table_[std::size_t{a} * q_ + b] = static_cast<std::uint16_t>(m);
        if (m == 1) inv_table_[a] = static_cast<std::uint16_t>(b);
      }
    }
  }

  std::uint32_t p_, e_, q_, fid_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::vector<std::uint32_t>> reduction_rows_;
  std::vector<std::uint16_t> add_table_, mul_table_, neg_table_, inv_table_;
};

}  // namespace gmix

#endif  // GMIX_FINITE_FIELD_HPP_
