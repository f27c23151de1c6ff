#pragma once

// Irrational rotation numbers carried as continued-fraction data.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mating {

// theta = [0; a1, a2, ...]. Either an eventually periodic expansion (a
// quadratic irrational, known exactly) or a finite prefix of an unknown tail.
class Theta {
public:
  static Theta golden();
  static Theta sqrt2m1();
  // Periodic block may be empty, meaning "prefix only".
  static Theta from_cf(std::vector<std::uint64_t> prefix, std::vector<std::uint64_t> period = {});
  // (a + b*sqrt(d)) / c reduced mod 1. Throws NotIrrational for rational input.
  static Theta from_surd(const mpz_class& a, const mpz_class& b, const mpz_class& d, const mpz_class& c);
  // golden | sqrt2m1 | cf:[a1,a2,(b1,b2)] | quad:(a+b*sqrt(d))/c
  static Theta parse(std::string_view text);

  const std::vector<std::uint64_t>& prefix() const { return pre_; }
  const std::vector<std::uint64_t>& period() const { return per_; }
  bool exact() const { return !per_.empty(); }

  // a_1 .. a_n; for a finite prefix the list stops early.
  std::vector<std::uint64_t> partial_quotients(std::size_t n) const;

  long double value() const { return value_; }
  // e^{2 pi i theta}, rounded from extended precision.
  std::complex<double> multiplier() const { return mult_; }

  // Canonical spec string; parse(str()) reproduces this value.
  const std::string& str() const { return text_; }

  friend bool operator==(const Theta& a, const Theta& b) { return a.pre_ == b.pre_ && a.per_ == b.per_; }

private:
  Theta(std::vector<std::uint64_t> pre, std::vector<std::uint64_t> per, std::string text);

  std::vector<std::uint64_t> pre_;
  std::vector<std::uint64_t> per_;
  std::string text_;
  long double value_ = 0;
  std::complex<double> mult_;
};

struct BoundedTypeVerdict {
  bool bounded = false;
  // True when the verdict covers the whole expansion (periodic tail known).
  bool exact = false;
  std::uint64_t max_quotient = 0;
  std::size_t terms_checked = 0;
};

BoundedTypeVerdict is_bounded_type(const Theta& theta, std::uint64_t bound, std::size_t depth);

}  // namespace mating
