#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "doctest.h"
#include "mating/circle.hpp"
#include "mating/error.hpp"

using namespace mating;

namespace {

// All doubling cycles of exact period p among a/(2^p - 1), found by walking
// every numerator. Independent of the digit rule in the library.
std::vector<std::vector<Angle>> brute_force_cycles(unsigned p) {
  const unsigned long m = (1ul << p) - 1;
  std::vector<bool> seen(m, false);
  std::vector<std::vector<Angle>> cycles;
  for (unsigned long a = 0; a < m; ++a) {
    if (seen[a]) continue;
    std::vector<unsigned long> orb;
    unsigned long x = a;
    do {
      orb.push_back(x);
      seen[x] = true;
      x = (2 * x) % m;
    } while (x != a);
    if (orb.size() != p) continue;
    std::vector<Angle> c;
    for (auto n : orb) c.emplace_back(static_cast<long>(n), static_cast<long>(m));
    std::sort(c.begin(), c.end());
    cycles.push_back(c);
  }
  return cycles;
}

// Rotation number of a sorted cycle read off by index arithmetic.
std::optional<unsigned> rotation_shift(const std::vector<Angle>& sorted) {
  const auto n = sorted.size();
  auto idx = [&](const Angle& a) { return std::find(sorted.begin(), sorted.end(), a) - sorted.begin(); };
  const auto shift = static_cast<unsigned>(idx(sorted[0].doubled()));
  for (std::size_t i = 0; i < n; ++i)
    if (static_cast<std::size_t>(idx(sorted[i].doubled())) != (i + shift) % n) return std::nullopt;
  return shift;
}

std::vector<Angle> oracle_cycle(unsigned q, unsigned p) {
  std::vector<std::vector<Angle>> hits;
  for (auto& c : brute_force_cycles(p))
    if (rotation_shift(c) == q) hits.push_back(c);
  REQUIRE(hits.size() == 1);
  return hits[0];
}

}  // namespace

TEST_CASE("angles are reduced and ordered") {
  CHECK(Angle(22, 62) == Angle(11, 31));
  CHECK(Angle(31, 31) == Angle(0, 1));
  CHECK(Angle(-1, 3) == Angle(2, 3));
  CHECK(Angle(1, 3) < Angle(1, 2));
  CHECK(Angle::parse("11/31").str() == "11/31");
  CHECK(Angle::parse("0").str() == "0");
  CHECK_THROWS_AS(Angle::parse("1/0"), Error);
  CHECK_THROWS_AS(Angle::parse("x"), Error);
}

TEST_CASE("doubling examples") {
  CHECK(Angle(11, 31).doubled() == Angle(22, 31));
  CHECK(Angle(22, 31).doubled() == Angle(13, 31));
  CHECK(Angle(0, 1).doubled() == Angle(0, 1));
  CHECK(Angle(1, 3).negated() == Angle(2, 3));
  CHECK(Angle(0, 1).negated() == Angle(0, 1));
  CHECK(Angle(1, 3).halved(0) == Angle(1, 6));
  CHECK(Angle(1, 3).halved(1) == Angle(2, 3));
}

TEST_CASE("doubling keeps the denominator dividing the old one") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    long den = 1 + static_cast<long>(rng() % 1000000);
    Angle t(static_cast<long>(rng() % den), den);
    Angle d = t.doubled();
    CHECK(mpz_divisible_p(t.denominator().get_mpz_t(), d.denominator().get_mpz_t()) != 0);
    // 2t = t + t mod 1, checked with plain rationals.
    mpq_class twice = 2 * mpq_class(t.numerator(), t.denominator());
    twice.canonicalize();
    while (twice >= 1) twice -= 1;
    CHECK(mpq_class(d.numerator(), d.denominator()) == twice);
  }
}

TEST_CASE("binary expansion examples") {
  auto e = binary_expansion(Angle(11, 31));
  CHECK(e.preperiod().empty());
  CHECK(e.period() == "01011");
  CHECK(binary_expansion(Angle(22, 31)).period() == "10110");
  auto half = binary_expansion(Angle(1, 2));
  CHECK(half.preperiod() == "1");
  CHECK(half.terminating());
  auto twin = binary_expansion(Angle(1, 2), Expansion::Twin);
  CHECK(twin.preperiod() == "0");
  CHECK(twin.period() == "1");
  CHECK(binary_expansion(Angle(1, 3), Expansion::Twin) == binary_expansion(Angle(1, 3)));
  CHECK(from_binary(BinarySequence("", "01011")) == Angle(11, 31));
  CHECK(from_binary(BinarySequence("1", "")) == Angle(1, 2));
  auto one = reconstruct(BinarySequence("", "1"));
  CHECK(one.angle == Angle(0, 1));
  CHECK(one.wrapped_from_one);
  CHECK(from_binary(twin) == Angle(1, 2));
}

TEST_CASE("binary sequences normalise") {
  CHECK(BinarySequence("0101", "01") == BinarySequence("", "01"));
  CHECK(BinarySequence("", "0101") == BinarySequence("", "01"));
  CHECK(BinarySequence("10", "0") == BinarySequence("1", ""));
  CHECK(BinarySequence::parse("1(01)").str() == "(10)");
  CHECK(BinarySequence::parse("11(01)").str() == "1(10)");
  CHECK(BinarySequence::parse("0(1)").str() == "0(1)");
  auto s = BinarySequence::parse("(01011)");
  CHECK(s.prefix(7) == "0101101");
  CHECK(s.shifted() == BinarySequence("", "10110"));
  CHECK(s.prepended("11").prefix(4) == "1101");
  CHECK(s.complemented().period() == "10100");
}

TEST_CASE("expansion digits match long division") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 300; ++k) {
    long den = 1 + static_cast<long>(rng() % 5000);
    long num = static_cast<long>(rng() % den);
    auto e = binary_expansion(Angle(num, den));
    long r = num / std::gcd(num, den), d = den / std::gcd(num, den);
    for (std::size_t i = 0; i < 64; ++i) {
      r *= 2;
      int bit = r >= d ? 1 : 0;
      r -= bit * d;
      CHECK(e.digit(i) == bit);
    }
  }
}

TEST_CASE("round trip on 1000 random angles") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    long den = 1 + static_cast<long>(rng() % 1000000);
    Angle t(static_cast<long>(rng() % den), den);
    CHECK(from_binary(binary_expansion(t)) == t);
    if (t.is_dyadic()) CHECK(from_binary(binary_expansion(t, Expansion::Twin)) == t);
  }
}

TEST_CASE("parabolic cycle examples") {
  auto c = parabolic_cycle(RotationNumber(3, 5));
  std::vector<Angle> want{{11, 31}, {13, 31}, {21, 31}, {22, 31}, {26, 31}};
  CHECK(c == want);
  for (std::size_t i = 0; i < 5; ++i) CHECK(c[i].doubled() == c[(i + 3) % 5]);
  CHECK(parabolic_cycle(RotationNumber(0, 1)) == std::vector<Angle>{Angle(0, 1)});
  CHECK(parabolic_cycle(RotationNumber(1, 2)) == std::vector<Angle>{Angle(1, 3), Angle(2, 3)});
  CHECK(parabolic_cycle_word(RotationNumber(3, 5)) == "01011");
}

TEST_CASE("parabolic cycle equals the brute-force oracle for p <= 12") {
  for (unsigned p = 2; p <= 12; ++p) {
    for (unsigned q = 1; q < p; ++q) {
      if (std::gcd(p, q) != 1) continue;
      auto c = parabolic_cycle(RotationNumber(q, p));
      CHECK(c == oracle_cycle(q, p));
      for (std::size_t i = 0; i < p; ++i) CHECK(c[i].doubled() == c[(i + q) % p]);
      CHECK(cycle_rotation_number(c) == RotationNumber(q, p));
    }
  }
}

TEST_CASE("wide cycles stay exact past 64 bits") {
  auto c = parabolic_cycle(RotationNumber(1, 70));
  REQUIRE(c.size() == 70);
  for (std::size_t i = 0; i < 70; ++i) CHECK(c[i].doubled() == c[(i + 1) % 70]);
  mpz_class m = (mpz_class(1) << 70) - 1;
  for (auto& t : c) CHECK(mpz_divisible_p(m.get_mpz_t(), t.denominator().get_mpz_t()) != 0);
}

TEST_CASE("cycle rotation number errors") {
  std::vector<Angle> not_closed{Angle(1, 3)};
  CHECK_THROWS_AS(cycle_rotation_number(not_closed), Error);
  std::vector<Angle> zero{Angle(0, 1)};
  CHECK(cycle_rotation_number(zero) == RotationNumber(0, 1));
  std::vector<Angle> half{Angle(1, 3), Angle(2, 3)};
  CHECK(cycle_rotation_number(half) == RotationNumber(1, 2));
  // Two 3-cycles together are invariant but not a rigid rotation.
  std::vector<Angle> two{Angle(1, 7), Angle(2, 7), Angle(4, 7), Angle(3, 7), Angle(6, 7), Angle(5, 7)};
  try {
    cycle_rotation_number(two);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotRigidRotation);
  }
}

TEST_CASE("orbit shape") {
  auto s = doubling_orbit_shape(Angle(11, 31));
  CHECK(s.preperiod == 0);
  CHECK(s.period == 5);
  s = doubling_orbit_shape(Angle(1, 12));
  CHECK(s.preperiod == 2);
  CHECK(s.period == 2);
  s = doubling_orbit_shape(Angle(1, 8));
  CHECK(s.preperiod == 3);
  CHECK(s.period == 1);
}

TEST_CASE("rotation numbers parse") {
  CHECK(RotationNumber::parse("3/5") == RotationNumber(3, 5));
  CHECK_THROWS_AS(RotationNumber::parse("2/4"), Error);
  CHECK_THROWS_AS(RotationNumber::parse("0.6"), Error);
}
