#include <gtest/gtest.h>

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "gmix/finite_field.hpp"
#include "gmix/group.hpp"
#include "gmix/rng.hpp"

using gmix::FieldSpec;
using gmix::GroupElem;
using gmix::GroupTable;
using gmix::Mat;

namespace {

GroupTable build(std::uint32_t p, std::uint32_t e = 1) { return GroupTable(FieldSpec(p, e)); }

TEST(Sl2Build, OrderIsQCubedMinusQ) {
  EXPECT_EQ(build(2).order(), 6u);
  EXPECT_EQ(build(3).order(), 24u);
  EXPECT_EQ(build(5).order(), 120u);
}

TEST(Sl2Build, EnumerationIsLexicographicWithDetOne) {
  GroupTable g = build(3);
  const FieldSpec& f = g.field();
  std::uint32_t prev_key = 0;
  for (std::uint32_t i = 0; i < g.order(); ++i) {
    Mat m = g.mat(GroupElem{i});
    std::uint32_t det = f.rsub(f.rmul(m.a, m.d), f.rmul(m.b, m.c));
    EXPECT_EQ(det, 1u);
    EXPECT_EQ(g.rank(m), i);
    std::uint32_t key = ((m.a * 3 + m.b) * 3 + m.c) * 3 + m.d;
    if (i > 0) EXPECT_GT(key, prev_key);
    prev_key = key;
  }
}

// Independent 2x2 product oracle over Z/p, no FieldSpec involved.
Mat mat_mul_mod_p(const Mat& x, const Mat& y, std::uint32_t p) {
  return Mat{(x.a * y.a + x.b * y.c) % p, (x.a * y.b + x.b * y.d) % p,
             (x.c * y.a + x.d * y.c) % p, (x.c * y.b + x.d * y.d) % p};
}

TEST(GroupOps, MulMatchesModularOracle) {
  GroupTable g = build(5);
  gmix::CounterRng rng(11);
  for (int i = 0; i < 2000; ++i) {
    GroupElem x{static_cast<std::uint32_t>(rng.below(g.order()))};
    GroupElem y{static_cast<std::uint32_t>(rng.below(g.order()))};
    EXPECT_EQ(g.mat(g.mul(x, y)), mat_mul_mod_p(g.mat(x), g.mat(y), 5));
  }
}

TEST(GroupOps, IdentityAndInverse) {
  for (std::uint32_t q : {2u, 3u, 5u, 7u}) {
    GroupTable g = build(q);
    for (std::uint32_t i = 0; i < g.order(); ++i) {
      GroupElem x{i};
      EXPECT_EQ(g.mul(g.id(), x), x);
      EXPECT_EQ(g.mul(x, g.id()), x);
      EXPECT_EQ(g.mul(x, g.inv(x)), g.id());
      EXPECT_EQ(g.inv(g.inv(x)), x);  // inv_table is an involution
    }
  }
}

TEST(GroupOps, NegIdentityCoincidesWithIdentityInChar2) {
  EXPECT_EQ(build(2).neg_id(), build(2).id());
  GroupTable g4 = build(2, 2);
  EXPECT_EQ(g4.neg_id(), g4.id());
  GroupTable g3 = build(3);
  EXPECT_NE(g3.neg_id(), g3.id());
  EXPECT_EQ(g3.mul(g3.neg_id(), g3.neg_id()), g3.id());
}

TEST(GroupOps, TraceOfIdentity) {
  GroupTable g5 = build(5);
  EXPECT_EQ(g5.trace_rep(g5.id()), 2u);
  GroupTable g2 = build(2);
  EXPECT_EQ(g2.trace_rep(g2.id()), 0u);
}

TEST(GroupOps, TraceInvariantUnderConjugationExhaustiveQ3) {
  GroupTable g = build(3);
  for (std::uint32_t u = 0; u < g.order(); ++u)
    for (std::uint32_t x = 0; x < g.order(); ++x)
      EXPECT_EQ(g.trace_rep(g.conj(GroupElem{u}, GroupElem{x})), g.trace_rep(GroupElem{x}));
}

TEST(GroupOps, ConjugationFixesIdentity) {
  GroupTable g = build(5);
  for (std::uint32_t u = 0; u < g.order(); ++u)
    EXPECT_EQ(g.conj(GroupElem{u}, g.id()), g.id());
}

// Orbit enumeration oracle: conjugate by every u in G and compare with the
// class table produced by generator closure.
TEST(Classes, OrbitUnderAllElementsMatchesClassMembers) {
  for (std::uint32_t q : {2u, 3u}) {
    GroupTable g = build(q);
    for (std::uint32_t x = 0; x < g.order(); ++x) {
      std::set<std::uint32_t> orbit;
      for (std::uint32_t u = 0; u < g.order(); ++u)
        orbit.insert(g.conj(GroupElem{u}, GroupElem{x}).idx);
      const auto& members = g.class_of(GroupElem{x}).members;
      std::set<std::uint32_t> expect(members.begin(), members.end());
      EXPECT_EQ(orbit, expect);
    }
  }
}

TEST(Classes, CountsAtSmallQ) {
  EXPECT_EQ(build(2).classes().size(), 3u);
  EXPECT_EQ(build(3).classes().size(), 7u);
}

TEST(Classes, PartitionAndDeterminism) {
  GroupTable g = build(5);
  std::uint64_t total = 0;
  for (const auto& cls : g.classes()) {
    total += cls.size();
    EXPECT_EQ(g.order() % cls.size(), 0u);  // size divides |G|
    for (std::uint32_t m : cls.members) {
      EXPECT_EQ(g.class_id(GroupElem{m}), cls.id);
      EXPECT_EQ(g.trace_rep(GroupElem{m}), cls.trace.rep);
    }
  }
  EXPECT_EQ(total, g.order());
  // census ordering: (trace, size, first member)
  for (std::size_t i = 1; i < g.classes().size(); ++i) {
    const auto &a = g.classes()[i - 1], &b = g.classes()[i];
    auto key = [](const gmix::ConjClass& c) {
      return std::tuple<std::uint32_t, std::uint64_t, std::uint32_t>(c.trace.rep, c.size(),
                                                                     c.members[0]);
    };
    EXPECT_LT(key(a), key(b));
  }
}

TEST(Classes, TrivialClassesAreSingletons) {
  for (std::uint32_t q : {3u, 5u, 7u}) {
    GroupTable g = build(q);
    EXPECT_EQ(g.class_of(g.id()).size(), 1u);
    EXPECT_EQ(g.class_of(g.neg_id()).size(), 1u);
    int singletons = 0;
    for (const auto& cls : g.classes())
      if (cls.size() == 1) ++singletons;
    EXPECT_EQ(singletons, 2);
  }
  GroupTable g2 = build(2);
  int singletons = 0;
  for (const auto& cls : g2.classes())
    if (cls.size() == 1) ++singletons;
  EXPECT_EQ(singletons, 1);  // 1 and -1 coincide in characteristic 2
}

struct CensusExpectation {
  std::uint32_t p, e;
};

TEST(Classes, CensusInvariantsUpToQ13) {
  for (auto [p, e] : std::vector<CensusExpectation>{
           {2, 1}, {3, 1}, {5, 1}, {7, 1}, {3, 2}, {11, 1}, {13, 1}}) {
    GroupTable g(FieldSpec(p, e));
    const std::uint64_t q = g.field().q();
    const std::uint64_t n_classes = g.classes().size();
    EXPECT_GE(n_classes, q) << "q=" << q;
    EXPECT_LE(n_classes, q + 5) << "q=" << q;

    std::uint64_t off_size = 0;
    for (const auto& cls : g.classes()) {
      if (cls.size() != 1) EXPECT_GE(cls.size(), (q * q - 1) / 2) << "q=" << q;
      if (cls.size() != q * (q + 1) && cls.size() != q * (q - 1)) ++off_size;
    }
    if (q >= 5 && q % 2 == 1) EXPECT_LE(off_size, 6u) << "q=" << q;

    // Classes are the fibers of the trace map except for a handful of
    // trace values that split.
    std::map<std::uint32_t, int> classes_per_trace;
    for (const auto& cls : g.classes()) ++classes_per_trace[cls.trace.rep];
    int split_values = 0;
    for (auto& [t, cnt] : classes_per_trace)
      if (cnt > 1) ++split_values;
    EXPECT_LE(split_values, 8) << "q=" << q;
  }
}

TEST(Classes, CorruptMulEntryRequiresDenseTable) {
  GroupTable g = build(11);
  EXPECT_THROW(g.corrupt_mul_entry(0, 0, 1), std::logic_error);
}

}  // namespace
