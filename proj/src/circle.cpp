#include "mating/circle.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "mating/error.hpp"

namespace mating {

namespace {

bool fits_u62(const mpz_class& x) { return mpz_sizeinbase(x.get_mpz_t(), 2) <= 62; }

std::uint64_t to_u64(const mpz_class& x) {
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, x.get_mpz_t());
  return out;
}

mpz_class from_bits(const std::string& bits) {
  if (bits.empty()) return 0;
  return mpz_class(bits, 2);
}

mpz_class pow2(std::size_t k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
  return r;
}

std::size_t strip_twos(mpz_class& m) {
  std::size_t k = mpz_scan1(m.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), k);
  return k;
}

// Multiplicative order of 2 modulo odd m > 1.
std::size_t order_of_two(const mpz_class& m) {
  if (m == 1) return 1;
  if (fits_u62(m)) {
    const auto mod = static_cast<unsigned __int128>(to_u64(m));
    unsigned __int128 x = 2 % mod;
    std::size_t n = 1;
    while (x != 1) {
      x = (x * 2) % mod;
      ++n;
    }
    return n;
  }
  mpz_class x = 2;
  std::size_t n = 1;
  while (x != 1) {
    x *= 2;
    if (x >= m) x -= m;
    ++n;
  }
  return n;
}

void check_bits(std::string_view w) {
  for (char c : w) {
    if (c != '0' && c != '1') throw Error(Errc::Parse, "binary word has symbol '" + std::string(1, c) + "'");
  }
}

std::string primitive_root(const std::string& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return w.substr(0, d);
  }
  return w;
}

}  // namespace

Angle::Angle(const mpz_class& num, const mpz_class& den) : num_(num), den_(den) {
  if (den_ == 0) throw Error(Errc::Parse, "angle with zero denominator");
  if (den_ < 0) {
    den_ = -den_;
    num_ = -num_;
  }
  mpz_fdiv_r(num_.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  mpz_class g = gcd(num_, den_);
  if (num_ == 0) {
    den_ = 1;
  } else if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

Angle Angle::parse(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Angle(mpz_class(std::string(text)), mpz_class(1));
    return Angle(mpz_class(std::string(text.substr(0, slash))), mpz_class(std::string(text.substr(slash + 1))));
  } catch (const std::invalid_argument&) {
    throw Error(Errc::Parse, "not a fraction: '" + std::string(text) + "'");
  }
}

Angle Angle::doubled() const { return Angle(num_ * 2, den_); }

Angle Angle::negated() const { return Angle(den_ - num_, den_); }

Angle Angle::halved(int branch) const { return Angle(num_ + (branch ? den_ : mpz_class(0)), den_ * 2); }

bool Angle::is_dyadic() const { return mpz_popcount(den_.get_mpz_t()) == 1; }

double Angle::to_double() const {
  mpq_class q(num_, den_);
  return q.get_d();
}

std::string Angle::str() const {
  if (num_ == 0) return "0";
  return num_.get_str() + "/" + den_.get_str();
}

std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
  const int c = cmp(a.num_ * b.den_, b.num_ * a.den_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

BinarySequence::BinarySequence(std::string preperiod, std::string period)
    : pre_(std::move(preperiod)), per_(std::move(period)) {
  check_bits(pre_);
  check_bits(per_);
  if (std::all_of(per_.begin(), per_.end(), [](char c) { return c == '0'; })) per_.clear();
  if (per_.empty()) {
    while (!pre_.empty() && pre_.back() == '0') pre_.pop_back();
    return;
  }
  per_ = primitive_root(per_);
  while (!pre_.empty() && pre_.back() == per_.back()) {
    std::rotate(per_.rbegin(), per_.rbegin() + 1, per_.rend());
    pre_.pop_back();
  }
}

int BinarySequence::digit(std::size_t i) const {
  if (i < pre_.size()) return pre_[i] - '0';
  if (per_.empty()) return 0;
  return per_[(i - pre_.size()) % per_.size()] - '0';
}

std::string BinarySequence::prefix(std::size_t n) const {
  std::string out(n, '0');
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<char>('0' + digit(i));
  return out;
}

BinarySequence BinarySequence::prepended(std::string_view word) const {
  return BinarySequence(std::string(word) + pre_, per_);
}

BinarySequence BinarySequence::shifted() const {
  if (!pre_.empty()) return BinarySequence(pre_.substr(1), per_);
  if (per_.empty()) return *this;
  return BinarySequence("", per_.substr(1) + per_.front());
}

BinarySequence BinarySequence::complemented() const {
  auto flip = [](std::string w) {
    for (char& c : w) c = c == '0' ? '1' : '0';
    return w;
  };
  // A terminating word has an implicit tail of zeros that becomes ones.
  if (per_.empty()) return BinarySequence(flip(pre_), "1");
  return BinarySequence(flip(pre_), flip(per_));
}

std::string BinarySequence::str() const {
  if (per_.empty()) return pre_.empty() ? "0" : pre_;
  return pre_ + "(" + per_ + ")";
}

BinarySequence BinarySequence::parse(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    if (text == "0") return {};
    return BinarySequence(std::string(text), "");
  }
  if (text.back() != ')') throw Error(Errc::Parse, "unbalanced period in '" + std::string(text) + "'");
  return BinarySequence(std::string(text.substr(0, open)), std::string(text.substr(open + 1, text.size() - open - 2)));
}

OrbitShape doubling_orbit_shape(const Angle& t) {
  mpz_class m = t.denominator();
  const std::size_t k = strip_twos(m);
  return {k, order_of_two(m)};
}

BinarySequence binary_expansion(const Angle& t, Expansion variant) {
  if (t.is_dyadic()) {
    const std::size_t k = mpz_scan1(t.denominator().get_mpz_t(), 0);
    std::string pre = t.is_zero() ? std::string() : t.numerator().get_str(2);
    pre.insert(0, k - pre.size(), '0');
    if (variant == Expansion::Canonical) return BinarySequence(pre, "");
    // 0.w1 = 0.w0111...
    if (pre.empty()) return BinarySequence("", "1");
    pre.back() = '0';
    return BinarySequence(pre, "1");
  }

  const OrbitShape shape = doubling_orbit_shape(t);
  std::string digits(shape.preperiod + shape.period, '0');
  if (fits_u62(t.denominator())) {
    const std::uint64_t d = to_u64(t.denominator());
    std::uint64_t x = to_u64(t.numerator());
    for (char& c : digits) {
      x <<= 1;
      if (x >= d) {
        x -= d;
        c = '1';
      }
    }
  } else {
    const mpz_class& d = t.denominator();
    mpz_class x = t.numerator();
    for (char& c : digits) {
      x <<= 1;
      if (x >= d) {
        x -= d;
        c = '1';
      }
    }
  }
  return BinarySequence(digits.substr(0, shape.preperiod), digits.substr(shape.preperiod));
}

Reconstruction reconstruct(const BinarySequence& s) {
  const std::size_t k = s.preperiod().size();
  const std::size_t L = s.period().size();
  mpz_class num = from_bits(s.preperiod());
  mpz_class den = pow2(k);
  if (L > 0) {
    const mpz_class cyc = pow2(L) - 1;
    num = num * cyc + from_bits(s.period());
    den *= cyc;
  }
  Reconstruction r;
  r.wrapped_from_one = num == den;
  r.angle = Angle(num, den);
  return r;
}

RotationNumber::RotationNumber(std::uint32_t q_, std::uint32_t p_) : q(q_), p(p_) {
  if (p == 0 || q >= p) throw Error(Errc::Parse, "rotation number needs 0 <= q < p");
  if (std::gcd(q, p) != 1) throw Error(Errc::Parse, "rotation number " + str() + " is not reduced");
}

RotationNumber RotationNumber::parse(std::string_view text) {
  auto num = [&](std::string_view s) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(Errc::Parse, "bad rotation number '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (num(text) != 0) throw Error(Errc::Parse, "rotation number must be q/p");
    return {};
  }
  return RotationNumber(num(text.substr(0, slash)), num(text.substr(slash + 1)));
}

std::string parabolic_cycle_word(const RotationNumber& nu) {
  std::string w(nu.p, '0');
  for (std::uint32_t j = 1; j <= nu.p; ++j) {
    if ((static_cast<std::uint64_t>(j) * nu.q) % nu.p < nu.q) w[j - 1] = '1';
  }
  return w;
}

std::vector<Angle> parabolic_cycle(const RotationNumber& nu) {
  const mpz_class den = pow2(nu.p) - 1;
  if (den == 0) return {Angle()};  // unreachable: p >= 1 gives den >= 1
  Angle t(from_bits(parabolic_cycle_word(nu)), den);
  std::vector<Angle> cycle;
  cycle.reserve(nu.p);
  for (std::uint32_t i = 0; i < nu.p; ++i) {
    cycle.push_back(t);
    t = t.doubled();
  }
  std::sort(cycle.begin(), cycle.end());
  return cycle;
}

RotationNumber cycle_rotation_number(std::span<const Angle> cycle) {
  if (cycle.empty()) throw Error(Errc::NotACycle, "empty set");
  std::vector<Angle> sorted(cycle.begin(), cycle.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error(Errc::NotACycle, "repeated angle");
  const std::size_t n = sorted.size();
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Angle d = sorted[i].doubled();
    auto it = std::lower_bound(sorted.begin(), sorted.end(), d);
    if (it == sorted.end() || *it != d) throw Error(Errc::NotACycle, "not invariant: 2*" + sorted[i].str() + " = " + d.str());
    image[i] = static_cast<std::size_t>(it - sorted.begin());
  }
  const std::size_t shift = (image[0] + n) % n;
  for (std::size_t i = 0; i < n; ++i) {
    if (image[i] != (i + shift) % n) throw Error(Errc::NotRigidRotation, "doubling does not act as a rotation");
  }
  if (std::gcd(shift, n) != 1 && n > 1) throw Error(Errc::NotACycle, "union of several cycles");
  return RotationNumber(static_cast<std::uint32_t>(shift % n), static_cast<std::uint32_t>(n));
}

}  // namespace mating
