#pragma once

// Drop addresses, itineraries of marked points and ray-equivalence classes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mating/circle.hpp"

namespace mating {

// ---- addresses -------------------------------------------------------------

// U_{i1 ... ik} for f_theta; the empty address is the Siegel disk.
struct SiegelAddress {
  std::vector<std::uint32_t> indices;

  std::size_t depth() const;
  SiegelAddress parent() const;
  std::string str() const;
  friend bool operator==(const SiegelAddress&, const SiegelAddress&) = default;
};

// f_theta on drops. Throws RootDisk for the empty address.
SiegelAddress apply_map(const SiegelAddress& a);

// U_{i1 ... ik}^{m1, ..., mk, (branch)} for f_nu; with no indices it is the
// immediate basin U_0^{(basin)}.
struct ParabolicAddress {
  std::uint32_t p = 1;
  std::vector<std::uint32_t> indices;
  std::vector<std::string> markers;  // words over {0,1}, one per index
  std::uint32_t branch = 1;          // i_k in 1..p-1
  std::uint32_t basin = 0;           // i_0 in 0..p-1, used when indices is empty

  std::size_t depth() const;
  bool admissible() const;
  // Branch i_s of the ancestor of generation s (1-based), i.e. iota_{s+1} mod p.
  std::uint32_t branch_at(std::size_t s) const;
  std::string str() const;
  friend bool operator==(const ParabolicAddress&, const ParabolicAddress&) = default;
};

// f_nu on drops. Throws ImmediateBasin for an immediate basin and
// Inadmissible for an inadmissible address.
ParabolicAddress apply_map(const ParabolicAddress& a);

// U_0^{(i)} -> U_0^{(i-1 mod p)}.
std::uint32_t rotate_basin(std::uint32_t i0, std::uint32_t p);

// Children of a drop with iota_{k+1} <= max_index (i_k = iota_{k+1} mod p).
std::vector<ParabolicAddress> children(const ParabolicAddress& a, std::uint32_t max_index);

// ---- itineraries -----------------------------------------------------------

struct Itinerary {
  enum class Source { Generic, PreBeta, PreCriticalSiegel, PreParabolic };

  // Symbols are head followed by tail, or by the digits of omega when
  // omega_tail is set.
  std::string head;
  BinarySequence tail;
  bool omega_tail = false;
  Source source = Source::Generic;
  std::size_t step = 0;  // PreBeta: n with z_n = beta; otherwise prefix length
  int variant = 0;       // 0/1 for the two Siegel variants, i in 1..p otherwise

  BinarySequence sequence() const;  // OmegaUnavailable for a symbolic tail
  std::string str() const;
};

std::string source_name(Itinerary::Source s);

// Plain binary expansion, one itinerary (two for dyadic angles).
std::vector<Itinerary> itineraries_of_angle(const Angle& t);

// Points of J(f_theta) whose itineraries are listed explicitly.
struct SiegelMarked {
  enum class Kind { Beta, BetaPre, CritOnes, CritTwoOnes, OffSpine };
  Kind kind = Kind::Beta;
  std::size_t k = 0;       // CritOnes: x_{1^k}; CritTwoOnes: x_{2 1^k}
  std::string prefix;      // BetaPre: eps_0..eps_{n-2}; OffSpine: pre-spine word
  Kind base = Kind::CritOnes;  // OffSpine base point
  std::size_t base_k = 1;
};

// The two itineraries. Without omega the tails stay symbolic.
std::vector<Itinerary> itinerary_of_marked_siegel(const SiegelMarked& m, const std::optional<BinarySequence>& omega);

struct ParabolicMarked {
  enum class Kind { Y0, YOnes, YTwoOnes, OffSpine };
  Kind kind = Kind::Y0;
  std::size_t k = 0;       // YOnes: y_{1^k}; YTwoOnes: y_{2 1^k}
  std::string prefix;      // OffSpine
  Kind base = Kind::Y0;
  std::size_t base_k = 0;
};

// The p itineraries delta^(1..p).
std::vector<Itinerary> itinerary_of_marked_parabolic(const ParabolicMarked& m, const RotationNumber& nu);

// Angle with the itinerary as binary expansion. OmegaUnavailable for a
// symbolic omega tail.
Angle itinerary_to_angle(const Itinerary& it);

// ---- ray classes -----------------------------------------------------------

enum class ClassKind { Singleton, SiegelBiaccess, ParabolicColand, BetaClass };
std::string class_kind_name(ClassKind k);

// Angles of the form 0.w omega.
struct OmegaWord {
  std::string word;
  friend bool operator==(const OmegaWord&, const OmegaWord&) = default;
  friend auto operator<=>(const OmegaWord&, const OmegaWord&) = default;
};

// Trusted binary digits of omega.
struct OmegaBits {
  std::string bits;
};

struct RayClass {
  ClassKind kind = ClassKind::Singleton;
  std::vector<Angle> angles;        // sorted
  std::vector<OmegaWord> omega_members;  // for SiegelBiaccess

  std::size_t size() const { return angles.size() + omega_members.size(); }
  std::vector<std::string> member_strings() const;
  friend bool operator==(const RayClass&, const RayClass&) = default;
};

// Mating: theta side at t, nu side at -t. ParabolicSide: co-landing under
// eta_nu at t itself.
enum class ClassView { Mating, ParabolicSide };

// Angles s with eta_nu(s) = eta_nu(u), sorted.
std::vector<Angle> parabolic_fiber(const Angle& u, const RotationNumber& nu);
// Words w' with eta_theta(0.w' omega) = eta_theta(0.w omega). Throws
// InsufficientResolution when a comparison needs more omega bits.
std::vector<OmegaWord> siegel_fiber(const OmegaWord& t, const OmegaBits& omega);

// Exact mode. When omega is given, a rational t whose orbit cannot be told
// apart from omega within its bits throws InsufficientResolution.
RayClass ray_class(const Angle& t, const std::optional<OmegaBits>& omega, const RotationNumber& nu,
                   ClassView view = ClassView::Mating);
// Approximate mode for 0.w omega. Throws OmegaUnavailable without omega.
RayClass ray_class(const OmegaWord& t, const std::optional<OmegaBits>& omega, const RotationNumber& nu);

struct GluingReport {
  std::size_t angles = 0;
  std::size_t classes = 0;
  std::size_t size_violations = 0;
  std::size_t partition_violations = 0;
  std::size_t equivariance_violations = 0;
  std::vector<std::string> messages;

  bool ok() const { return size_violations + partition_violations + equivariance_violations == 0; }
};

GluingReport verify_gluing(std::span<const Angle> sample, const std::optional<OmegaBits>& omega,
                           const RotationNumber& nu);

}  // namespace mating
