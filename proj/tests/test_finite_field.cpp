#include <gtest/gtest.h>

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "gmix/finite_field.hpp"
#include "gmix/rng.hpp"

using gmix::FieldElem;
using gmix::FieldSpec;

namespace {

// Independent polynomial-arithmetic oracle: residues as coefficient vectors,
// schoolbook product, long division by the modulus. Shares nothing with the
// table/reduction-row path inside FieldSpec.
class PolyOracle {
 public:
  PolyOracle(std::uint32_t p, std::vector<std::uint32_t> modulus)
      : p_(p), mod_(std::move(modulus)) {}

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::uint32_t> pa = digits(a), pb = digits(b);
    std::vector<std::uint32_t> prod(pa.size() + pb.size() - 1, 0);
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = 0; j < pb.size(); ++j)
        prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % p_;
    // long division by the monic modulus
    while (prod.size() >= mod_.size()) {
      std::uint32_t lead = prod.back();
      std::size_t off = prod.size() - mod_.size();
      for (std::size_t i = 0; i < mod_.size(); ++i)
        prod[off + i] = (prod[off + i] + (p_ - lead * mod_[i] % p_)) % p_;
      prod.pop_back();
    }
    std::uint32_t out = 0, shift = 1;
    for (std::uint32_t c : prod) {
      out += c * shift;
      shift *= p_;
    }
    return out;
  }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::uint32_t> pa = digits(a), pb = digits(b);
    std::uint32_t out = 0, shift = 1;
    for (std::size_t i = 0; i + 1 < mod_.size(); ++i) {
      out += ((pa[i] + pb[i]) % p_) * shift;
      shift *= p_;
    }
    return out;
  }

 private:
  std::vector<std::uint32_t> digits(std::uint32_t x) const {
    std::vector<std::uint32_t> d(mod_.size() - 1, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = x % p_;
      x /= p_;
    }
    return d;
  }

  std::uint32_t p_;
  std::vector<std::uint32_t> mod_;
};

bool poly_irreducible_bruteforce(std::uint32_t p, const std::vector<std::uint32_t>& f) {
  // product scan: f is reducible iff it equals g*h for monic g,h of degree >= 1
  std::uint32_t e = static_cast<std::uint32_t>(f.size()) - 1;
  for (std::uint32_t dg = 1; dg <= e / 2; ++dg) {
    std::uint32_t dh = e - dg;
    std::uint64_t ng = 1, nh = 1;
    for (std::uint32_t i = 0; i < dg; ++i) ng *= p;
    for (std::uint32_t i = 0; i < dh; ++i) nh *= p;
    for (std::uint64_t eg = 0; eg < ng; ++eg)
      for (std::uint64_t eh = 0; eh < nh; ++eh) {
        std::vector<std::uint32_t> g(dg + 1, 0), h(dh + 1, 0);
        std::uint64_t v = eg;
        for (std::uint32_t i = 0; i < dg; ++i) { g[i] = v % p; v /= p; }
        g[dg] = 1;
        v = eh;
        for (std::uint32_t i = 0; i < dh; ++i) { h[i] = v % p; v /= p; }
        h[dh] = 1;
        std::vector<std::uint32_t> prod(e + 1, 0);
        for (std::uint32_t i = 0; i <= dg; ++i)
          for (std::uint32_t j = 0; j <= dh; ++j)
            prod[i + j] = (prod[i + j] + g[i] * h[j]) % p;
        if (prod == f) return false;
      }
  }
  return true;
}

TEST(FieldBuild, PrimeFieldOfSizeTwo) {
  FieldSpec f(2, 1);
  EXPECT_EQ(f.q(), 2u);
  EXPECT_EQ(f.enumerate().size(), 2u);
}

TEST(FieldBuild, F9HasFixedIrreducibleModulus) {
  FieldSpec f(3, 2);
  EXPECT_EQ(f.q(), 9u);
  // The modulus must be the lowest-encoding monic irreducible, checked by
  // scanning all 9 candidate encodings with the brute-force product oracle.
  const auto& mod = f.modulus();
  ASSERT_EQ(mod.size(), 3u);
  EXPECT_TRUE(poly_irreducible_bruteforce(3, mod));
  std::uint64_t enc = mod[0] + 3 * mod[1];
  for (std::uint64_t cand = 0; cand < enc; ++cand) {
    std::vector<std::uint32_t> g{static_cast<std::uint32_t>(cand % 3),
                                 static_cast<std::uint32_t>(cand / 3), 1};
    EXPECT_FALSE(poly_irreducible_bruteforce(3, g)) << "candidate " << cand;
  }
}

TEST(FieldBuild, F8ModulusIrreducible) {
  FieldSpec f(2, 3);
  EXPECT_EQ(f.q(), 8u);
  EXPECT_TRUE(poly_irreducible_bruteforce(2, f.modulus()));
  std::uint64_t enc = f.modulus()[0] + 2 * f.modulus()[1] + 4 * f.modulus()[2];
  for (std::uint64_t cand = 0; cand < enc; ++cand) {
    std::vector<std::uint32_t> g{static_cast<std::uint32_t>(cand & 1),
                                 static_cast<std::uint32_t>((cand >> 1) & 1),
                                 static_cast<std::uint32_t>((cand >> 2) & 1), 1};
    EXPECT_FALSE(poly_irreducible_bruteforce(2, g));
  }
}

TEST(FieldBuild, RejectsBadParameters) {
  EXPECT_THROW(FieldSpec(4, 1), std::invalid_argument);
  EXPECT_THROW(FieldSpec(1, 1), std::invalid_argument);
  EXPECT_THROW(FieldSpec(2, 17), std::invalid_argument);
  EXPECT_THROW(FieldSpec(257, 2), std::invalid_argument);
}

TEST(FieldOps, AdditionIdentityAndChar2) {
  FieldSpec f2(2, 1);
  EXPECT_EQ(f2.add(f2.one(), f2.one()), f2.zero());
  FieldSpec f7(7, 1);
  for (auto x : f7.enumerate()) EXPECT_EQ(f7.add(x, f7.zero()), x);
}

TEST(FieldOps, F9MulMatchesPolyOracle) {
  FieldSpec f(3, 2);
  PolyOracle oracle(3, f.modulus());
  for (std::uint32_t a = 0; a < 9; ++a)
    for (std::uint32_t b = 0; b < 9; ++b) {
      EXPECT_EQ(f.mul(f.elem(a), f.elem(b)).rep, oracle.mul(a, b));
      EXPECT_EQ(f.add(f.elem(a), f.elem(b)).rep, oracle.add(a, b));
    }
}

TEST(FieldOps, InverseBasics) {
  FieldSpec f7(7, 1);
  EXPECT_EQ(f7.inv(f7.one()), f7.one());
  EXPECT_EQ(f7.inv(f7.elem(3)).rep, 5u);  // 3*5 = 15 = 1 mod 7
  EXPECT_THROW(f7.inv(f7.zero()), std::domain_error);
  FieldSpec f8(2, 3);
  for (std::uint32_t a = 1; a < 8; ++a)
    EXPECT_EQ(f8.mul(f8.elem(a), f8.inv(f8.elem(a))), f8.one());
}

TEST(FieldOps, MixedFieldOperandsRejected) {
  FieldSpec f5(5, 1), f7(7, 1);
  EXPECT_THROW(f5.add(f5.one(), f7.one()), std::invalid_argument);
}

TEST(FieldOps, EnumerateIsCompleteAndOrdered) {
  FieldSpec f5(5, 1);
  auto all = f5.enumerate();
  ASSERT_EQ(all.size(), 5u);
  for (std::uint32_t i = 0; i < 5; ++i) EXPECT_EQ(all[i].rep, i);
  EXPECT_EQ(FieldSpec(3, 2).enumerate().size(), 9u);
}

// Field axioms, exhaustive on all triples for q <= 9, random above.
void check_axioms(const FieldSpec& f, bool exhaustive) {
  auto elems = f.enumerate();
  auto check_triple = [&](FieldElem a, FieldElem b, FieldElem c) {
    EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
    EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
    EXPECT_EQ(f.add(a, b), f.add(b, a));
    EXPECT_EQ(f.mul(a, b), f.mul(b, a));
    EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
  };
  if (exhaustive) {
    for (auto a : elems)
      for (auto b : elems)
        for (auto c : elems) check_triple(a, b, c);
  } else {
    gmix::CounterRng rng(0xf1e1d);
    for (int i = 0; i < 2000; ++i)
      check_triple(f.elem(rng.below(f.q())), f.elem(rng.below(f.q())), f.elem(rng.below(f.q())));
  }
  for (auto a : elems) {
    EXPECT_EQ(f.add(a, f.neg(a)), f.zero());
    if (a.rep != 0) EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
  }
}

TEST(FieldAxioms, AllFieldsUpTo13) {
  for (auto [p, e] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
           {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1}}) {
    FieldSpec f(p, e);
    check_axioms(f, f.q() <= 9);
  }
}

TEST(FieldAxioms, FrobeniusSquaringIsBijectionInChar2) {
  for (std::uint32_t e : {1u, 2u, 3u, 4u}) {
    FieldSpec f(2, e);
    std::set<std::uint32_t> image;
    for (auto x : f.enumerate()) image.insert(f.mul(x, x).rep);
    EXPECT_EQ(image.size(), f.q());
  }
}

TEST(FieldOps, LargeFieldWithoutTablesStaysConsistent) {
  // q = 2048 > table limit: exercises the on-the-fly polynomial path.
  FieldSpec f(2, 11);
  PolyOracle oracle(2, f.modulus());
  gmix::CounterRng rng(77);
  for (int i = 0; i < 500; ++i) {
    std::uint32_t a = static_cast<std::uint32_t>(rng.below(f.q()));
    std::uint32_t b = static_cast<std::uint32_t>(rng.below(f.q()));
    EXPECT_EQ(f.mul(f.elem(a), f.elem(b)).rep, oracle.mul(a, b));
  }
  for (int i = 0; i < 50; ++i) {
    std::uint32_t a = static_cast<std::uint32_t>(rng.below(f.q() - 1)) + 1;
    EXPECT_EQ(f.mul(f.elem(a), f.inv(f.elem(a))), f.one());
  }
}

}  // namespace
