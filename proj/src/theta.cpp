#include "mating/theta.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <tuple>

#include "mating/error.hpp"

namespace mating {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

std::string join_terms(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string cf_text(const std::vector<std::uint64_t>& pre, const std::vector<std::uint64_t>& per) {
  std::string out = "cf:[" + join_terms(pre);
  if (!per.empty()) out += std::string(pre.empty() ? "" : ",") + "(" + join_terms(per) + ")";
  return out + "]";
}

std::uint64_t to_term(const mpz_class& a) {
  if (a <= 0 || !a.fits_ulong_p()) throw Error(Errc::Parse, "partial quotient out of range: " + a.get_str());
  return a.get_ui();
}

mpz_class floor_div(const mpz_class& n, const mpz_class& d) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

// Continued fraction of (P + R sqrt(D)) / Q with D not a square. Returns the
// full expansion [a0; a1, ...] split into preperiod and period.
void surd_expansion(mpz_class P, mpz_class R, mpz_class Q, const mpz_class& D, std::vector<mpz_class>& pre,
                    std::vector<mpz_class>& per) {
  using State = std::tuple<mpz_class, mpz_class, mpz_class>;
  auto normalize = [](mpz_class& p, mpz_class& r, mpz_class& q) {
    if (q < 0) {
      p = -p;
      r = -r;
      q = -q;
    }
    mpz_class g = gcd(gcd(p, r), q);
    if (g > 1) {
      p /= g;
      r /= g;
      q /= g;
    }
  };
  std::map<State, std::size_t> seen;
  std::vector<mpz_class> terms;
  normalize(P, R, Q);
  for (std::size_t step = 0; step < 200000; ++step) {
    State s{P, R, Q};
    auto it = seen.find(s);
    if (it != seen.end()) {
      pre.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(it->second));
      per.assign(terms.begin() + static_cast<std::ptrdiff_t>(it->second), terms.end());
      return;
    }
    seen.emplace(std::move(s), terms.size());
    // R sqrt(D) lies strictly between lo - P and lo - P + 1.
    mpz_class m = sqrt(mpz_class(R * R * D));
    mpz_class lo = P + (R > 0 ? m : mpz_class(-m - 1));
    mpz_class a = floor_div(lo, Q);
    terms.push_back(a);
    mpz_class p1 = P - a * Q;
    mpz_class nP = Q * p1;
    mpz_class nR = -Q * R;
    mpz_class nQ = p1 * p1 - R * R * D;
    P = nP;
    R = nR;
    Q = nQ;
    normalize(P, R, Q);
  }
  throw Error(Errc::Parse, "continued fraction period not found");
}

}  // namespace

Theta::Theta(std::vector<std::uint64_t> pre, std::vector<std::uint64_t> per, std::string text)
    : pre_(std::move(pre)), per_(std::move(per)), text_(std::move(text)) {
  if (pre_.empty() && per_.empty()) throw Error(Errc::NotIrrational, "empty continued fraction");
  for (auto a : pre_)
    if (a == 0) throw Error(Errc::Parse, "partial quotients must be positive");
  for (auto a : per_)
    if (a == 0) throw Error(Errc::Parse, "partial quotients must be positive");

  // Convergents until the denominator passes 2^80 (or the prefix runs out).
  mpz_class h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // h_{-1}, h_{-2}, ...
  const mpz_class limit = mpz_class(1) << 80;
  std::size_t n = 0;
  for (;; ++n) {
    if (k0 > limit) break;
    if (per_.empty() && n >= pre_.size()) break;
    const std::uint64_t a = n < pre_.size() ? pre_[n] : per_[(n - pre_.size()) % per_.size()];
    mpz_class h = mpz_class(static_cast<unsigned long>(a)) * h0 + h1;
    mpz_class k = mpz_class(static_cast<unsigned long>(a)) * k0 + k1;
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
  }
  // h/k approximates [a1; a2, ...] and theta is its reciprocal.
  mpq_class q(k0, h0);
  q.canonicalize();
  const double hi = q.get_d();
  const double lo = mpq_class(q - mpq_class(hi)).get_d();
  value_ = static_cast<long double>(hi) + static_cast<long double>(lo);
  const long double ang = 2 * kPi * value_;
  mult_ = {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

Theta Theta::golden() { return Theta({}, {1}, "golden"); }

Theta Theta::sqrt2m1() { return Theta({}, {2}, "sqrt2m1"); }

Theta Theta::from_cf(std::vector<std::uint64_t> prefix, std::vector<std::uint64_t> period) {
  std::string text = cf_text(prefix, period);
  return Theta(std::move(prefix), std::move(period), std::move(text));
}

Theta Theta::from_surd(const mpz_class& a, const mpz_class& b, const mpz_class& d, const mpz_class& c) {
  if (c == 0) throw Error(Errc::Parse, "zero denominator");
  if (b == 0 || d <= 0 || mpz_perfect_square_p(d.get_mpz_t()))
    throw Error(Errc::NotIrrational, "(" + a.get_str() + "+" + b.get_str() + "sqrt(" + d.get_str() + "))/" + c.get_str() + " is rational");
  std::vector<mpz_class> pre, per;
  surd_expansion(a, b, c, d, pre, per);
  // Drop a0 so the expansion is that of theta = x - floor(x).
  if (!pre.empty()) {
    pre.erase(pre.begin());
  } else {
    std::rotate(per.begin(), per.begin() + 1, per.end());
  }
  std::vector<std::uint64_t> p1, p2;
  for (auto& t : pre) p1.push_back(to_term(t));
  for (auto& t : per) p2.push_back(to_term(t));
  std::string text = "quad:(" + a.get_str() + (b < 0 ? "" : "+") + b.get_str() + "sqrt(" + d.get_str() + "))/" + c.get_str();
  return Theta(std::move(p1), std::move(p2), std::move(text));
}

Theta Theta::parse(std::string_view text_in) {
  const std::string text(text_in);
  if (text == "golden") return golden();
  if (text == "sqrt2m1") return sqrt2m1();

  static const std::regex rational(R"(^\s*-?\d+\s*/\s*\d+\s*$)");
  if (std::regex_match(text, rational)) throw Error(Errc::NotIrrational, "rational theta '" + text + "'");

  if (text.rfind("cf:[", 0) == 0 && text.back() == ']') {
    std::vector<std::uint64_t> pre, per;
    bool in_period = false, closed = false;
    std::string body = text.substr(4, text.size() - 5);
    std::size_t i = 0;
    while (i < body.size()) {
      char c = body[i];
      if (c == ' ' || c == ',') {
        ++i;
        continue;
      }
      if (c == '(') {
        if (in_period || closed) throw Error(Errc::Parse, "nested period in '" + text + "'");
        in_period = true;
        ++i;
        continue;
      }
      if (c == ')') {
        if (!in_period) throw Error(Errc::Parse, "unbalanced ')' in '" + text + "'");
        in_period = false;
        closed = true;
        ++i;
        continue;
      }
      if (closed) throw Error(Errc::Parse, "terms after the periodic block in '" + text + "'");
      std::size_t j = i;
      while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
      if (j == i) throw Error(Errc::Parse, "bad continued fraction '" + text + "'");
      std::uint64_t v = std::stoull(body.substr(i, j - i));
      (in_period ? per : pre).push_back(v);
      i = j;
    }
    if (in_period) throw Error(Errc::Parse, "unclosed period in '" + text + "'");
    if (closed && per.empty()) throw Error(Errc::Parse, "empty period in '" + text + "'");
    return from_cf(std::move(pre), std::move(per));
  }

  static const std::regex quad(
      R"(^quad:\(\s*([+-]?\d+)\s*([+-])\s*(\d*)\s*\*?\s*(?:sqrt|\xE2\x88\x9A)\s*\(?\s*(\d+)\s*\)?\s*\)\s*/\s*(\d+)$)");
  std::smatch m;
  if (std::regex_match(text, m, quad)) {
    std::string a_text = m[1].str();
    if (a_text.front() == '+') a_text.erase(0, 1);
    mpz_class a(a_text);
    mpz_class b(m[3].str().empty() ? std::string("1") : m[3].str());
    if (m[2].str() == "-") b = -b;
    return from_surd(a, b, mpz_class(m[4].str()), mpz_class(m[5].str()));
  }
  throw Error(Errc::Parse, "theta must be golden, sqrt2m1, cf:[...] or quad:(a+b sqrt d)/c, got '" + text + "'");
}

std::vector<std::uint64_t> Theta::partial_quotients(std::size_t n) const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < pre_.size()) {
      out.push_back(pre_[i]);
    } else if (!per_.empty()) {
      out.push_back(per_[(i - pre_.size()) % per_.size()]);
    } else {
      break;
    }
  }
  return out;
}

BoundedTypeVerdict is_bounded_type(const Theta& theta, std::uint64_t bound, std::size_t depth) {
  BoundedTypeVerdict v;
  if (theta.exact()) {
    // The tail repeats, so the prefix and one period cover every term.
    for (auto a : theta.prefix()) v.max_quotient = std::max(v.max_quotient, a);
    for (auto a : theta.period()) v.max_quotient = std::max(v.max_quotient, a);
    v.exact = true;
    v.terms_checked = theta.prefix().size() + theta.period().size();
  } else {
    const auto terms = theta.partial_quotients(depth);
    for (auto a : terms) v.max_quotient = std::max(v.max_quotient, a);
    v.terms_checked = terms.size();
  }
  v.bounded = v.max_quotient <= bound;
  return v;
}

}  // namespace mating
