#include "mating/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mating/error.hpp"

namespace mating {

// ---- addresses -------------------------------------------------------------

std::size_t SiegelAddress::depth() const {
  std::size_t d = 0;
  for (auto i : indices) d += i;
  return d;
}

SiegelAddress SiegelAddress::parent() const {
  if (indices.empty()) throw Error(Errc::RootDisk, "the Siegel disk has no parent");
  SiegelAddress a = *this;
  a.indices.pop_back();
  return a;
}

std::string SiegelAddress::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < indices.size(); ++i) s += (i ? "," : "") + std::to_string(indices[i]);
  return s + ")";
}

SiegelAddress apply_map(const SiegelAddress& a) {
  if (a.indices.empty()) throw Error(Errc::RootDisk, "the Siegel disk is invariant");
  for (auto i : a.indices)
    if (i == 0) throw Error(Errc::Inadmissible, "indices are positive");
  SiegelAddress b = a;
  if (b.indices.front() == 1)
    b.indices.erase(b.indices.begin());
  else
    --b.indices.front();
  return b;
}

std::size_t ParabolicAddress::depth() const {
  std::size_t d = 0;
  for (auto i : indices) d += i;
  return d;
}

bool ParabolicAddress::admissible() const {
  if (p < 2) return false;
  if (indices.empty()) return basin < p && markers.empty();
  if (markers.size() != indices.size()) return false;
  if (branch < 1 || branch >= p) return false;
  for (std::size_t s = 0; s < indices.size(); ++s) {
    const std::string& m = markers[s];
    if (m.find_first_not_of("01") != std::string::npos) return false;
    std::uint64_t l = m.size(), io = indices[s];
    if (io < l * p + 1) return false;
    if (s == 0 ? io > (l + 1) * p : io >= (l + 1) * p) return false;
  }
  return true;
}

std::uint32_t ParabolicAddress::branch_at(std::size_t s) const {
  if (s == 0 || s > indices.size()) throw Error(Errc::Inadmissible, "generation out of range");
  if (s == indices.size()) return branch;
  return indices[s] % p;
}

std::string ParabolicAddress::str() const {
  if (indices.empty()) return "U0^(" + std::to_string(basin) + ")";
  std::string s = "(";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    s += (i ? "," : "") + std::to_string(indices[i]);
    if (!markers[i].empty()) s += "^" + markers[i];
  }
  return s + ";" + std::to_string(branch) + ")";
}

ParabolicAddress apply_map(const ParabolicAddress& a) {
  if (a.indices.empty()) throw Error(Errc::ImmediateBasin, "immediate basins rotate: U0^(i) -> U0^(i-1)");
  if (!a.admissible()) throw Error(Errc::Inadmissible, "address " + a.str() + " is not admissible");
  ParabolicAddress b = a;
  std::uint32_t i1 = a.indices.front();
  std::size_t l1 = a.markers.front().size();
  if (i1 == 1) {
    b.indices.erase(b.indices.begin());
    b.markers.erase(b.markers.begin());
    if (b.indices.empty()) {
      b.basin = a.branch - 1;
      b.branch = 1;
    }
  } else if (l1 >= 1 && i1 == l1 * a.p + 1) {
    --b.indices.front();
    b.markers.front().erase(0, 1);
  } else {
    --b.indices.front();
  }
  return b;
}

std::uint32_t rotate_basin(std::uint32_t i0, std::uint32_t p) { return (i0 + p - 1) % p; }

std::vector<ParabolicAddress> children(const ParabolicAddress& a, std::uint32_t max_index) {
  std::vector<ParabolicAddress> out;
  const std::uint32_t p = a.p;
  for (std::uint32_t io = 1; io <= max_index; ++io) {
    if (!a.indices.empty() && io % p != a.branch) continue;
    std::size_t l = (io - 1) / p;
    for (std::uint64_t bits = 0; bits < (1ull << l); ++bits) {
      std::string m(l, '0');
      for (std::size_t j = 0; j < l; ++j)
        if (bits >> (l - 1 - j) & 1) m[j] = '1';
      for (std::uint32_t br = 1; br < p; ++br) {
        ParabolicAddress c = a;
        c.indices.push_back(io);
        c.markers.push_back(m);
        c.branch = br;
        c.basin = 0;
        if (c.admissible()) out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---- itineraries -----------------------------------------------------------

BinarySequence Itinerary::sequence() const {
  if (omega_tail) throw Error(Errc::OmegaUnavailable, "itinerary " + str() + " ends in symbolic omega");
  return tail.prepended(head);
}

std::string Itinerary::str() const {
  if (omega_tail) return head + "w";
  return sequence().str();
}

std::string source_name(Itinerary::Source s) {
  switch (s) {
    case Itinerary::Source::Generic: return "Generic";
    case Itinerary::Source::PreBeta: return "PreBeta";
    case Itinerary::Source::PreCriticalSiegel: return "PreCriticalSiegel";
    case Itinerary::Source::PreParabolic: return "PreParabolic";
  }
  return "?";
}

std::vector<Itinerary> itineraries_of_angle(const Angle& t) {
  std::vector<Itinerary> out;
  Itinerary a;
  a.tail = binary_expansion(t);
  if (!t.is_dyadic()) {
    out.push_back(a);
    return out;
  }
  Itinerary b;
  b.tail = binary_expansion(t, Expansion::Twin);
  std::size_t n = t.is_zero() ? 0 : a.tail.preperiod().size() + 1;
  for (Itinerary* it : {&a, &b}) {
    it->source = Itinerary::Source::PreBeta;
    it->step = n;
  }
  a.variant = 0;
  b.variant = 1;
  out.push_back(a);
  out.push_back(b);
  return out;
}

namespace {

Itinerary omega_itinerary(std::string head, const std::optional<BinarySequence>& omega, std::size_t step,
                          int variant) {
  Itinerary it;
  it.source = Itinerary::Source::PreCriticalSiegel;
  it.step = step;
  it.variant = variant;
  if (omega) {
    it.tail = omega->prepended(head);
  } else {
    it.head = std::move(head);
    it.omega_tail = true;
  }
  return it;
}

void prefix_all(std::vector<Itinerary>& its, const std::string& prefix) {
  for (auto& it : its) {
    if (it.omega_tail)
      it.head = prefix + it.head;
    else
      it.tail = it.tail.prepended(prefix);
    it.step += prefix.size();
  }
}

void check_word(const std::string& w) {
  if (w.find_first_not_of("01") != std::string::npos) throw Error(Errc::Parse, "prefix must be a 0/1 word");
}

}  // namespace

std::vector<Itinerary> itinerary_of_marked_siegel(const SiegelMarked& m, const std::optional<BinarySequence>& omega) {
  using K = SiegelMarked::Kind;
  std::vector<Itinerary> out;
  switch (m.kind) {
    case K::Beta: {
      Itinerary a, b;
      b.tail = BinarySequence("", "1");
      a.source = b.source = Itinerary::Source::PreBeta;
      b.variant = 1;
      out = {a, b};
      break;
    }
    case K::BetaPre: {
      check_word(m.prefix);
      Itinerary a, b;
      a.tail = BinarySequence(m.prefix + "1", "");
      b.tail = BinarySequence(m.prefix + "0", "1");
      a.source = b.source = Itinerary::Source::PreBeta;
      a.step = b.step = m.prefix.size() + 1;
      b.variant = 1;
      out = {a, b};
      break;
    }
    case K::CritOnes:
      if (m.k < 1) throw Error(Errc::Inadmissible, "x_{1^k} needs k >= 1");
      out.push_back(omega_itinerary(std::string(m.k, '0'), omega, m.k, 0));
      out.push_back(omega_itinerary(std::string(m.k, '1'), omega, m.k, 1));
      break;
    case K::CritTwoOnes:
      if (m.k < 1) throw Error(Errc::Inadmissible, "x_{2 1^k} needs k >= 1");
      out.push_back(omega_itinerary("0" + std::string(m.k, '1'), omega, m.k + 1, 0));
      out.push_back(omega_itinerary("1" + std::string(m.k, '0'), omega, m.k + 1, 1));
      break;
    case K::OffSpine: {
      if (m.base == K::OffSpine) throw Error(Errc::Inadmissible, "off-spine base must be a spine point");
      check_word(m.prefix);
      SiegelMarked base;
      base.kind = m.base;
      base.k = m.base_k;
      out = itinerary_of_marked_siegel(base, omega);
      prefix_all(out, m.prefix);
      break;
    }
  }
  return out;
}

std::vector<Itinerary> itinerary_of_marked_parabolic(const ParabolicMarked& m, const RotationNumber& nu) {
  using K = ParabolicMarked::Kind;
  std::vector<Angle> cycle = parabolic_cycle(nu);
  const std::size_t p = nu.p, q = nu.q;
  std::vector<Itinerary> out;
  auto make = [&](std::size_t i, const std::string& head) {
    Itinerary it;
    it.tail = binary_expansion(cycle[i - 1]).prepended(head);
    it.source = Itinerary::Source::PreParabolic;
    it.step = head.size();
    it.variant = static_cast<int>(i);
    return it;
  };
  switch (m.kind) {
    case K::Y0:
      for (std::size_t i = 1; i <= p; ++i) out.push_back(make(i, ""));
      break;
    case K::YOnes:
      if (m.k < 1) throw Error(Errc::Inadmissible, "y_{1^k} needs k >= 1");
      for (std::size_t i = 1; i <= p; ++i) out.push_back(make(i, std::string(m.k, i <= q ? '0' : '1')));
      break;
    case K::YTwoOnes:
      // The head must double onto the head of y_{1^k}, which puts the
      // 1 0^k variants on i <= q.
      if (m.k < 1) throw Error(Errc::Inadmissible, "y_{2 1^k} needs k >= 1");
      for (std::size_t i = 1; i <= p; ++i)
        out.push_back(make(i, i <= q ? "1" + std::string(m.k, '0') : "0" + std::string(m.k, '1')));
      break;
    case K::OffSpine: {
      if (m.base == K::OffSpine) throw Error(Errc::Inadmissible, "off-spine base must be a spine point");
      check_word(m.prefix);
      ParabolicMarked base;
      base.kind = m.base;
      base.k = m.base_k;
      out = itinerary_of_marked_parabolic(base, nu);
      prefix_all(out, m.prefix);
      break;
    }
  }
  return out;
}

Angle itinerary_to_angle(const Itinerary& it) { return from_binary(it.sequence()); }

// ---- ray classes -----------------------------------------------------------

std::string class_kind_name(ClassKind k) {
  switch (k) {
    case ClassKind::Singleton: return "Singleton";
    case ClassKind::SiegelBiaccess: return "SiegelBiaccess";
    case ClassKind::ParabolicColand: return "ParabolicColand";
    case ClassKind::BetaClass: return "BetaClass";
  }
  return "?";
}

std::vector<std::string> RayClass::member_strings() const {
  std::vector<std::string> out;
  for (const auto& a : angles) out.push_back(a.str());
  for (const auto& w : omega_members) out.push_back("0." + w.word + "w");
  return out;
}

namespace {

mpq_class as_q(const Angle& a) { return mpq_class(a.numerator(), a.denominator()); }

// Half-open half circle [a, a + 1/2) mod 1.
bool in_half(const mpq_class& a, const mpq_class& y) {
  mpq_class d = y - a;
  if (d < 0) d += 1;
  return d < mpq_class(1, 2);
}

}  // namespace

std::vector<Angle> parabolic_fiber(const Angle& u, const RotationNumber& nu) {
  const std::vector<Angle> cycle = parabolic_cycle(nu);
  OrbitShape shape = doubling_orbit_shape(u);
  if (shape.period != nu.p) return {u};
  std::vector<Angle> orbit{u};
  for (std::size_t j = 0; j < shape.preperiod; ++j) orbit.push_back(orbit.back().doubled());
  if (!std::binary_search(cycle.begin(), cycle.end(), orbit.back())) return {u};

  // The major leaf is the side of the cycle polygon cut off by the longest
  // gap between consecutive vertices (longer than 1/2). The diameter from its
  // endpoint a crosses no leaf; the polygon sits in [a, a + 1/2) and its
  // other preimage in the complement, the vertex a + 1/2 included.
  std::size_t k = cycle.size() - 1;
  mpq_class widest = as_q(cycle.front()) + 1 - as_q(cycle.back());
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) {
    mpq_class g = as_q(cycle[i + 1]) - as_q(cycle[i]);
    if (g > widest) {
      widest = g;
      k = i;
    }
  }
  const mpq_class a = as_q(cycle[(k + 1) % cycle.size()]);

  std::vector<Angle> fiber = cycle;
  for (std::size_t j = shape.preperiod; j-- > 0;) {
    bool side = in_half(a, as_q(orbit[j]));
    std::vector<Angle> next;
    for (const auto& f : fiber)
      for (int b = 0; b < 2; ++b) {
        Angle h = f.halved(b);
        if (in_half(a, as_q(h)) == side) next.push_back(h);
      }
    fiber = std::move(next);
  }
  std::sort(fiber.begin(), fiber.end());
  return fiber;
}

namespace {

// Sign of 0.x omega - 0.y omega, comparing symbol by symbol.
int compare_omega(const std::string& x, const std::string& y, const OmegaBits& omega) {
  std::size_t n = std::max(x.size(), y.size()) + omega.bits.size();
  auto sym = [&](const std::string& w, std::size_t i) -> int {
    if (i < w.size()) return w[i];
    i -= w.size();
    if (i < omega.bits.size()) return omega.bits[i];
    return -1;
  };
  for (std::size_t i = 0; i < n; ++i) {
    int a = sym(x, i), b = sym(y, i);
    if (a < 0 || b < 0) break;
    if (a != b) return a < b ? -1 : 1;
  }
  throw Error(Errc::InsufficientResolution,
              "telling 0." + x + "w from 0." + y + "w needs more than " + std::to_string(omega.bits.size()) +
                  " bits of omega");
}

bool in_critical_half(const std::string& s, const OmegaBits& omega) {
  return compare_omega("0", s, omega) < 0 && compare_omega(s, "1", omega) < 0;
}

}  // namespace

std::vector<OmegaWord> siegel_fiber(const OmegaWord& t, const OmegaBits& omega) {
  const std::string& w = t.word;
  if (w.find_first_not_of("01") != std::string::npos) throw Error(Errc::Parse, "omega word must be binary");
  if (w.empty()) return {t};
  std::vector<std::string> fiber{"0", "1"};
  for (std::size_t j = w.size() - 1; j-- > 0;) {
    bool side = in_critical_half(w.substr(j), omega);
    std::vector<std::string> next;
    for (const auto& f : fiber)
      for (char b : {'0', '1'}) {
        std::string h = b + f;
        if (in_critical_half(h, omega) == side) next.push_back(h);
      }
    fiber = std::move(next);
  }
  std::vector<OmegaWord> out;
  for (auto& f : fiber) out.push_back({f});
  std::sort(out.begin(), out.end(), [&](const OmegaWord& x, const OmegaWord& y) {
    return compare_omega(x.word, y.word, omega) < 0;
  });
  return out;
}

RayClass ray_class(const Angle& t, const std::optional<OmegaBits>& omega, const RotationNumber& nu, ClassView view) {
  RayClass rc;
  if (view == ClassView::ParabolicSide) {
    rc.angles = parabolic_fiber(t, nu);
    rc.kind = rc.angles.size() > 1 ? ClassKind::ParabolicColand
              : t.is_dyadic()      ? ClassKind::BetaClass
                                   : ClassKind::Singleton;
    return rc;
  }
  if (omega && !omega->bits.empty()) {
    // A rational angle never lands at a precritical point of f_theta, but
    // with finitely many omega bits we can only confirm it.
    // x = a/b agrees with omega on n bits iff floor(2^n a / b) is omega's
    // n-bit prefix read as an integer.
    OrbitShape shape = doubling_orbit_shape(t);
    const std::size_t n = omega->bits.size();
    const mpz_class w(omega->bits, 2);
    const mpz_class b = t.denominator();
    mpz_class a = t.numerator(), head;
    for (std::size_t j = 0; j < shape.preperiod + shape.period; ++j) {
      head = a << n;
      mpz_fdiv_q(head.get_mpz_t(), head.get_mpz_t(), b.get_mpz_t());
      if (head == w)
        throw Error(Errc::InsufficientResolution, "orbit of " + t.str() + " matches every known bit of omega");
      a = (a << 1) % b;
    }
  }
  std::vector<Angle> f = parabolic_fiber(t.negated(), nu);
  if (f.size() > 1) {
    for (auto& a : f) a = a.negated();
    std::sort(f.begin(), f.end());
    rc.kind = ClassKind::ParabolicColand;
    rc.angles = std::move(f);
    return rc;
  }
  rc.angles = {t};
  rc.kind = t.is_dyadic() ? ClassKind::BetaClass : ClassKind::Singleton;
  return rc;
}

RayClass ray_class(const OmegaWord& t, const std::optional<OmegaBits>& omega, const RotationNumber&) {
  if (!omega) throw Error(Errc::OmegaUnavailable, "the class of 0." + t.word + "w needs omega");
  RayClass rc;
  rc.omega_members = siegel_fiber(t, *omega);
  rc.kind = rc.omega_members.size() == 2 ? ClassKind::SiegelBiaccess : ClassKind::Singleton;
  return rc;
}

GluingReport verify_gluing(std::span<const Angle> sample, const std::optional<OmegaBits>& omega,
                           const RotationNumber& nu) {
  GluingReport rep;
  std::map<Angle, std::vector<Angle>> owner;
  auto note = [&](std::size_t& counter, const std::string& msg) {
    ++counter;
    if (rep.messages.size() < 32) rep.messages.push_back(msg);
  };
  for (const Angle& t : sample) {
    ++rep.angles;
    RayClass c = ray_class(t, omega, nu);
    std::size_t n = c.size();
    if (n != 1 && n != 2 && n != nu.p) note(rep.size_violations, "class of " + t.str() + " has size " + std::to_string(n));
    if (std::find(c.angles.begin(), c.angles.end(), t) == c.angles.end())
      note(rep.partition_violations, t.str() + " is missing from its own class");
    for (const Angle& s : c.angles) {
      auto [it, fresh] = owner.emplace(s, c.angles);
      if (fresh) continue;
      if (it->second != c.angles) note(rep.partition_violations, s.str() + " lies in two different classes");
    }
    for (const Angle& s : c.angles) {
      if (ray_class(s, omega, nu).angles != c.angles)
        note(rep.partition_violations, "closure from " + s.str() + " differs from that of " + t.str());
    }
    RayClass d = ray_class(t.doubled(), omega, nu);
    for (const Angle& s : c.angles) {
      Angle s2 = s.doubled();
      if (std::find(d.angles.begin(), d.angles.end(), s2) == d.angles.end())
        note(rep.equivariance_violations, "double of " + s.str() + " leaves the class of " + t.doubled().str());
    }
  }
  std::set<std::vector<Angle>> distinct;
  for (auto& [a, cls] : owner) distinct.insert(cls);
  rep.classes = distinct.size();
  return rep;
}

}  // namespace mating
