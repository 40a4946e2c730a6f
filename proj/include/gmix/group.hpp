#ifndef GMIX_GROUP_HPP_
#define GMIX_GROUP_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gmix/finite_field.hpp"

namespace gmix {

/// 2x2 matrix over F_q, entries as field reps: (a b; c d).
struct Mat {
  std::uint32_t a = 0, b = 0, c = 0, d = 0;
  friend bool operator==(const Mat&, const Mat&) = default;
};

/// Handle into a GroupTable's dense element enumeration.
struct GroupElem {
  std::uint32_t idx = 0;
  friend bool operator==(const GroupElem&, const GroupElem&) = default;
};

struct ConjClass {
  std::uint32_t id = 0;
  GroupElem representative;       // smallest member index
  FieldElem trace;                // constant on the class
  std::vector<std::uint32_t> members;  // ascending
  std::uint64_t size() const { return members.size(); }
};

/// SL(2,q) with a dense index over all q^3 - q elements, listed in
/// lexicographic matrix-entry order. Immutable after construction;
/// concurrent reads are the expected mode.
class GroupTable {
 public:
  explicit GroupTable(const FieldSpec& field) : field_(field) {
    const std::uint64_t q = field_.q();
    order_ = q * q * q - q;
    elems_.reserve(order_);
    // a = 0 block: -bc = 1 forces c = -1/b.
    for (std::uint32_t b = 1; b < q; ++b) {
      std::uint32_t c = field_.rneg(field_.rinv(b));
      for (std::uint32_t d = 0; d < q; ++d) elems_.push_back(Mat{0, b, c, d});
    }
    // a != 0: d = (1 + bc) / a.
    for (std::uint32_t a = 1; a < q; ++a) {
      std::uint32_t ainv = field_.rinv(a);
      for (std::uint32_t b = 0; b < q; ++b)
        for (std::uint32_t c = 0; c < q; ++c) {
          std::uint32_t d = field_.rmul(field_.radd(1 % field_.q(), field_.rmul(b, c)), ainv);
          elems_.push_back(Mat{a, b, c, d});
        }
    }
    if (elems_.size() != order_) throw std::logic_error("SL2 enumeration size mismatch");

    inv_table_.resize(order_);
    trace_table_.resize(order_);
    for (std::uint32_t i = 0; i < order_; ++i) {
      const Mat& m = elems_[i];
      inv_table_[i] = rank(Mat{m.d, field_.rneg(m.b), field_.rneg(m.c), m.a});
      trace_table_[i] = static_cast<std::uint16_t>(field_.radd(m.a, m.d));
    }
    if (field_.q() <= 7) {
      mul_table_.resize(order_ * order_);
      for (std::uint32_t i = 0; i < order_; ++i)
        for (std::uint32_t j = 0; j < order_; ++j)
          mul_table_[std::size_t{i} * order_ + j] = rank(mul_mat(elems_[i], elems_[j]));
    }
    build_classes();
  }

  const FieldSpec& field() const { return field_; }
  std::uint64_t order() const { return order_; }

  const Mat& mat(GroupElem x) const { return elems_[x.idx]; }
  GroupElem from_mat(const Mat& m) const { return GroupElem{rank(m)}; }

  GroupElem id() const { return id_; }
  GroupElem neg_id() const { return neg_id_; }

  GroupElem mul(GroupElem x, GroupElem y) const {
    if (!mul_table_.empty()) return GroupElem{mul_table_[std::size_t{x.idx} * order_ + y.idx]};
    return GroupElem{rank(mul_mat(elems_[x.idx], elems_[y.idx]))};
  }
  GroupElem inv(GroupElem x) const { return GroupElem{inv_table_[x.idx]}; }
  /// u^-1 x u.
  GroupElem conj(GroupElem u, GroupElem x) const { return mul(mul(inv(u), x), u); }
  FieldElem trace(GroupElem x) const { return FieldElem{trace_table_[x.idx], field_.id()}; }
  std::uint32_t trace_rep(GroupElem x) const { return trace_table_[x.idx]; }

  Mat mul_mat(const Mat& x, const Mat& y) const {
    const FieldSpec& f = field_;
    return Mat{f.radd(f.rmul(x.a, y.a), f.rmul(x.b, y.c)),
               f.radd(f.rmul(x.a, y.b), f.rmul(x.b, y.d)),
               f.radd(f.rmul(x.c, y.a), f.rmul(x.d, y.c)),
               f.radd(f.rmul(x.c, y.b), f.rmul(x.d, y.d))};
  }

  /// Dense index of a determinant-1 matrix in lexicographic entry order.
  std::uint32_t rank(const Mat& m) const {
    const std::uint32_t q = field_.q();
    if (m.a == 0) return (m.b - 1) * q + m.d;
    return (q - 1) * q + (m.a - 1) * q * q + m.b * q + m.c;
  }

  const std::vector<ConjClass>& classes() const { return classes_; }
  std::uint32_t class_id(GroupElem x) const { return class_id_[x.idx]; }
  const ConjClass& class_of(GroupElem x) const { return classes_[class_id_[x.idx]]; }

  /// Test hook: overwrite one multiplication-table entry (q <= 7 only).
  /// Used by fault-injection tests; never called by library code.
  void corrupt_mul_entry(std::uint32_t i, std::uint32_t j, std::uint32_t value) {
    if (mul_table_.empty()) throw std::logic_error("no dense multiplication table at this q");
    mul_table_[std::size_t{i} * order_ + j] = value % order_;
  }

 private:
  // Orbit closure of the conjugation action. Conjugating by a generating set
  // of G reaches the full class; generators are E12/E21 over a basis of F_q.
  void build_classes() {
    std::vector<GroupElem> gens;
    std::uint32_t shift = 1;
    for (std::uint32_t i = 0; i < field_.e(); ++i) {
      gens.push_back(from_mat(Mat{1 % field_.q(), shift, 0, 1 % field_.q()}));
      gens.push_back(from_mat(Mat{1 % field_.q(), 0, shift, 1 % field_.q()}));
      shift *= field_.p();
    }
    std::vector<GroupElem> gen_invs;
    for (GroupElem g : gens) gen_invs.push_back(inv(g));

    class_id_.assign(order_, UINT32_MAX);
    std::vector<std::vector<std::uint32_t>> orbits;
    std::vector<std::uint32_t> stack;
    for (std::uint32_t start = 0; start < order_; ++start) {
      if (class_id_[start] != UINT32_MAX) continue;
      std::uint32_t oid = static_cast<std::uint32_t>(orbits.size());
      orbits.emplace_back();
      stack.assign(1, start);
      class_id_[start] = oid;
      while (!stack.empty()) {
        std::uint32_t x = stack.back();
        stack.pop_back();
        orbits[oid].push_back(x);
        for (std::size_t g = 0; g < gens.size(); ++g) {
          std::uint32_t y = mul(mul(gen_invs[g], GroupElem{x}), gens[g]).idx;
          if (class_id_[y] == UINT32_MAX) {
            class_id_[y] = oid;
            stack.push_back(y);
          }
        }
      }
    }

    // Deterministic census: sort by (trace rep, size, smallest member).
    for (auto& orb : orbits) std::sort(orb.begin(), orb.end());
    std::vector<std::uint32_t> perm(orbits.size());
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::uint32_t l, std::uint32_t r) {
      std::uint32_t tl = trace_table_[orbits[l][0]], tr = trace_table_[orbits[r][0]];
      if (tl != tr) return tl < tr;
      if (orbits[l].size() != orbits[r].size()) return orbits[l].size() < orbits[r].size();
      return orbits[l][0] < orbits[r][0];
    });
    classes_.resize(orbits.size());
    for (std::uint32_t newid = 0; newid < perm.size(); ++newid) {
      auto& cls = classes_[newid];
      cls.id = newid;
      cls.members = std::move(orbits[perm[newid]]);
      cls.representative = GroupElem{cls.members[0]};
      cls.trace = FieldElem{trace_table_[cls.members[0]], field_.id()};
      for (std::uint32_t m : cls.members) class_id_[m] = newid;
    }

    id_ = from_mat(Mat{1 % field_.q(), 0, 0, 1 % field_.q()});
    std::uint32_t m1 = field_.rneg(1 % field_.q());
    neg_id_ = from_mat(Mat{m1, 0, 0, m1});
  }

  FieldSpec field_;
  std::uint64_t order_;
  std::vector<Mat> elems_;
  std::vector<std::uint32_t> inv_table_;
  std::vector<std::uint16_t> trace_table_;
  std::vector<std::uint32_t> mul_table_;
  std::vector<std::uint32_t> class_id_;
  std::vector<ConjClass> classes_;
  GroupElem id_, neg_id_;
};

}  // namespace gmix

#endif  // GMIX_GROUP_HPP_
