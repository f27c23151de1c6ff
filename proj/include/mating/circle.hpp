#pragma once

// Exact arithmetic on the circle R/Z under the doubling map.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mating {

// A rational point of the circle, always reduced: 0 <= num < den, gcd = 1.
class Angle {
public:
  Angle() : num_(0), den_(1) {}
  Angle(const mpz_class& num, const mpz_class& den);
  Angle(long num, long den) : Angle(mpz_class(num), mpz_class(den)) {}

  // "a/b" or "0".
  static Angle parse(std::string_view text);

  const mpz_class& numerator() const { return num_; }
  const mpz_class& denominator() const { return den_; }

  Angle doubled() const;
  // t -> -t = 1 - t, with 0 -> 0.
  Angle negated() const;
  // (t + k)/2 for k in {0, 1}.
  Angle halved(int branch) const;

  bool is_zero() const { return num_ == 0; }
  bool is_dyadic() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const Angle& a, const Angle& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Angle& a, const Angle& b);

private:
  mpz_class num_;
  mpz_class den_;
};

// Eventually periodic binary word 0.pre(period)(period)...
// Always held in canonical minimal form; an empty period means a terminating
// expansion. The tail-of-ones twin of a dyadic angle has period "1".
class BinarySequence {
public:
  BinarySequence() = default;
  BinarySequence(std::string preperiod, std::string period);

  const std::string& preperiod() const { return pre_; }
  const std::string& period() const { return per_; }
  bool terminating() const { return per_.empty(); }
  bool tail_of_ones() const { return per_ == "1"; }

  // Symbol at position i (0-based) of the infinite word.
  int digit(std::size_t i) const;
  // First n symbols as a '0'/'1' string.
  std::string prefix(std::size_t n) const;
  // Prepends a finite word.
  BinarySequence prepended(std::string_view word) const;
  // Drops the first symbol (the shift, i.e. doubling on angles).
  BinarySequence shifted() const;
  // Symbol-wise complement 0 <-> 1.
  BinarySequence complemented() const;

  // "pre(period)" notation, e.g. "(01011)" or "1" or "0(1)".
  std::string str() const;
  static BinarySequence parse(std::string_view text);

  friend bool operator==(const BinarySequence&, const BinarySequence&) = default;

private:
  std::string pre_;
  std::string per_;
};

enum class Expansion { Canonical, Twin };

// Canonical expansion of t. For dyadic t, Twin selects the tail-of-ones form;
// for all other angles both variants coincide.
BinarySequence binary_expansion(const Angle& t, Expansion variant = Expansion::Canonical);

struct Reconstruction {
  Angle angle;
  // Set when the word denotes 1 = 0.111... which wraps to the angle 0.
  bool wrapped_from_one = false;
};

Reconstruction reconstruct(const BinarySequence& s);
inline Angle from_binary(const BinarySequence& s) { return reconstruct(s).angle; }

struct RotationNumber {
  std::uint32_t q = 0;
  std::uint32_t p = 1;

  RotationNumber() = default;
  RotationNumber(std::uint32_t q_, std::uint32_t p_);

  static RotationNumber parse(std::string_view text);
  std::string str() const { return std::to_string(q) + "/" + std::to_string(p); }
  double value() const { return static_cast<double>(q) / p; }
  friend bool operator==(const RotationNumber&, const RotationNumber&) = default;
};

// The doubling cycle of combinatorial rotation number nu, ascending:
// t_1 < ... < t_p with 2 t_i = t_{i+q mod p}, each t_i = a_i / (2^p - 1).
std::vector<Angle> parabolic_cycle(const RotationNumber& nu);

// The p-periodic word sigma_1...sigma_p of t_1 (digit rule).
std::string parabolic_cycle_word(const RotationNumber& nu);

// Combinatorial rotation number of doubling restricted to a finite invariant
// set. Throws NotACycle / NotRigidRotation.
RotationNumber cycle_rotation_number(std::span<const Angle> cycle);

struct OrbitShape {
  std::size_t preperiod = 0;
  std::size_t period = 0;
};

// Preperiod and period of t under doubling (the period is the multiplicative
// order of 2 modulo the odd part of the denominator).
OrbitShape doubling_orbit_shape(const Angle& t);

}  // namespace mating
