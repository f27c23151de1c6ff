#include "mating/shell.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mating/error.hpp"
#include "mating/parabolic_local.hpp"
#include "mating/rays.hpp"

namespace nlohmann {
template <class T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& o) {
    if (o)
      j = *o;
    else
      j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& o) {
    if (j.is_null())
      o.reset();
    else
      o = j.get<T>();
  }
};
}  // namespace nlohmann

namespace mating {

// ---- serialisation ---------------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MapArgs, map, theta, nu)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RenderArgs, map, width, height, cx, cy, span, maxiter, escape_radius,
                                                palette, rays, marks, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RayArgs, map, angles, omega, start_radius, min_potential,
                                                steps_per_halving, land_tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AnglesArgs, mode, nu, t, steps, json)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ItineraryArgs, side, point, nu, t, omega_bits)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ClassesArgs, nu, angles, view, omega_word, omega_bits, verify, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InspectArgs, map, what, re, im, budget)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CfArgs, theta, bound, depth)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PointRecord, infinity, re, im)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CycleResult, nu, angles, expansions, word)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OrbitResult, t, orbit, preperiod, period)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExpansionResult, t, expansion, twin)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RayResult, angle, samples, landing, converged)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ItineraryRecord, sequence, source, variant, angle)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ItineraryResult, point, itineraries)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GluingResult, nu, angles, classes, size_violations,
                                                partition_violations, equivariance_violations, messages)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FixedRecord, name, location, multiplier, type)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PetalResult, map, p, a, delta, a_error, attracting, repelling,
                                                vector_residuals, fatou_residual)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CfResult, theta, quotients, bounded, exact, max_quotient,
                                                terms_checked)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RenderResult, png, sidecar, spec)

void to_json(json& j, const ClassResult& c) { j = json{{"angle", c.angle}, {"class", c.cls}, {"kind", c.kind}}; }
void from_json(const json& j, ClassResult& c) {
  c.angle = j.at("angle").get<std::string>();
  c.cls = j.at("class").get<std::vector<std::string>>();
  c.kind = j.at("kind").get<std::string>();
}

void to_json(json& j, const BasinClass& b) {
  j = json{{"label", label_name(b.label)}, {"basin", b.basin}, {"step", b.step}};
}
void from_json(const json& j, BasinClass& b) {
  const std::string l = j.at("label").get<std::string>();
  if (l == label_name(BasinClass::Label::ParabolicBasin))
    b.label = BasinClass::Label::ParabolicBasin;
  else if (l == label_name(BasinClass::Label::SiegelSide))
    b.label = BasinClass::Label::SiegelSide;
  else if (l == label_name(BasinClass::Label::Undecided))
    b.label = BasinClass::Label::Undecided;
  else
    throw Error(Errc::Parse, "unknown basin label '" + l + "'");
  b.basin = j.at("basin").get<int>();
  b.step = j.at("step").get<std::size_t>();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InspectResult, map, fixed, critical, petal, point_class, orbit)

namespace {

template <class T>
struct TypeName;
#define MATING_TYPE_NAME(T, s) \
  template <>                  \
  struct TypeName<T> {         \
    static constexpr const char* value = s; \
  };
MATING_TYPE_NAME(CycleResult, "parabolic-cycle")
MATING_TYPE_NAME(OrbitResult, "double")
MATING_TYPE_NAME(ExpansionResult, "expansion")
MATING_TYPE_NAME(RayResult, "ray")
MATING_TYPE_NAME(ItineraryResult, "itinerary")
MATING_TYPE_NAME(ClassResult, "classes")
MATING_TYPE_NAME(GluingResult, "gluing")
MATING_TYPE_NAME(InspectResult, "inspect")
MATING_TYPE_NAME(CfResult, "cf")
MATING_TYPE_NAME(RenderResult, "render")
#undef MATING_TYPE_NAME

template <class T>
json tagged(const T& x) {
  json j = x;
  j["type"] = TypeName<T>::value;
  j["schema_version"] = kSchemaVersion;
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed JSON: ") + e.what());
  }
}

void check_version(const json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw Error(Errc::SchemaMismatch, "missing schema_version");
  const json& v = j.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw Error(Errc::SchemaMismatch, "schema_version " + v.dump() + ", expected " + std::to_string(kSchemaVersion));
}

}  // namespace

template <class T>
std::string emit_json(const T& result) {
  return tagged(result).dump(2) + "\n";
}

template <class T>
T load_json(const std::string& text) {
  json j = parse_text(text);
  check_version(j);
  if (j.value("type", std::string()) != TypeName<T>::value)
    throw Error(Errc::Parse, "expected a '" + std::string(TypeName<T>::value) + "' document");
  j.erase("type");
  j.erase("schema_version");
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

#define MATING_INSTANTIATE(T)                       \
  template std::string emit_json<T>(const T&); \
  template T load_json<T>(const std::string&);
MATING_INSTANTIATE(CycleResult)
MATING_INSTANTIATE(OrbitResult)
MATING_INSTANTIATE(ExpansionResult)
MATING_INSTANTIATE(RayResult)
MATING_INSTANTIATE(ItineraryResult)
MATING_INSTANTIATE(ClassResult)
MATING_INSTANTIATE(GluingResult)
MATING_INSTANTIATE(InspectResult)
MATING_INSTANTIATE(CfResult)
MATING_INSTANTIATE(RenderResult)
#undef MATING_INSTANTIATE

std::string RunConfig::command() const {
  static const char* names[] = {"render", "ray", "angles", "itinerary", "classes", "inspect", "cf"};
  return names[args.index()];
}

json to_json_value(const RunConfig& c) {
  json params;
  std::visit([&](const auto& a) { params = a; }, c.args);
  return json{{"schema_version", c.schema_version}, {"command", c.command()}, {"params", params}};
}

RunConfig run_config_from_json(const json& j) {
  check_version(j);
  RunConfig c;
  const std::string cmd = j.value("command", std::string());
  const json params = j.value("params", json::object());
  try {
    if (cmd == "render")
      c.args = params.get<RenderArgs>();
    else if (cmd == "ray")
      c.args = params.get<RayArgs>();
    else if (cmd == "angles")
      c.args = params.get<AnglesArgs>();
    else if (cmd == "itinerary")
      c.args = params.get<ItineraryArgs>();
    else if (cmd == "classes")
      c.args = params.get<ClassesArgs>();
    else if (cmd == "inspect")
      c.args = params.get<InspectArgs>();
    else if (cmd == "cf")
      c.args = params.get<CfArgs>();
    else
      throw Error(Errc::Parse, "unknown command '" + cmd + "'");
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
  return c;
}

std::string emit_config(const RunConfig& c) { return to_json_value(c).dump(2) + "\n"; }

RunConfig parse_config(const std::string& text) { return run_config_from_json(parse_text(text)); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Parse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---- commands --------------------------------------------------------------

MapSpec make_map(const MapArgs& a) {
  if (a.map == "siegel") return MapSpec::siegel(Theta::parse(a.theta));
  if (a.map == "para") return MapSpec::para(RotationNumber::parse(a.nu));
  if (a.map == "mating") return MapSpec::mating(Theta::parse(a.theta), RotationNumber::parse(a.nu));
  throw Error(Errc::Parse, "map must be siegel, para or mating");
}

ImageSpec make_image_spec(const RenderArgs& a) {
  ImageSpec s;
  s.map = make_map(a.map);
  s.width = a.width;
  s.height = a.height;
  s.center = {a.cx, a.cy};
  s.span = a.span;
  s.maxiter = a.maxiter;
  s.escape_radius = a.escape_radius;
  s.palette = parse_palette(a.palette);
  s.overlay.ray_angles = a.rays;
  for (auto [x, y] : a.marks) s.overlay.marks.emplace_back(x, y);
  validate(s);
  return s;
}

PointRecord point_record(const SpherePoint& x) {
  if (x.at_inf_chart && x.c == 0.0) return {true, 0, 0};
  cplx z = x.z();
  return {false, z.real(), z.imag()};
}

RayResult ray_result(const RayTrace& t) {
  RayResult r;
  r.angle = t.angle.str();
  for (const auto& s : t.samples) r.samples.push_back({s.potential, s.z.real(), s.z.imag()});
  if (t.converged && t.landing) r.landing = std::array<double, 2>{t.landing->real(), t.landing->imag()};
  r.converged = t.converged;
  return r;
}

CycleResult cmd_parabolic_cycle(const RotationNumber& nu) {
  CycleResult r;
  r.nu = nu.str();
  for (const auto& t : parabolic_cycle(nu)) {
    r.angles.push_back(t.str());
    r.expansions.push_back(binary_expansion(t).str());
  }
  r.word = parabolic_cycle_word(nu);
  return r;
}

OrbitResult cmd_double(const Angle& t, std::size_t steps) {
  OrbitResult r;
  r.t = t.str();
  Angle x = t;
  r.orbit.push_back(x.str());
  for (std::size_t k = 0; k < steps; ++k) {
    x = x.doubled();
    r.orbit.push_back(x.str());
  }
  OrbitShape s = doubling_orbit_shape(t);
  r.preperiod = s.preperiod;
  r.period = s.period;
  return r;
}

ExpansionResult cmd_expansion(const Angle& t) {
  ExpansionResult r;
  r.t = t.str();
  r.expansion = binary_expansion(t).str();
  if (t.is_dyadic()) r.twin = binary_expansion(t, Expansion::Twin).str();
  return r;
}

std::vector<RayResult> cmd_ray(const RayArgs& a) {
  MapSpec m = make_map(a.map);
  // Rays start on a level curve well outside the filled Julia set.
  if (!(a.start_radius >= 16)) throw Error(Errc::Parse, "--start-radius must be at least 16");
  if (!(a.min_potential > 0) || a.steps_per_halving < 1) throw Error(Errc::Parse, "bad ray tracing options");
  RayOptions o;
  o.start_radius = a.start_radius;
  o.min_potential = a.min_potential;
  o.steps_per_halving = a.steps_per_halving;
  o.land_tol = a.land_tol;
  std::vector<RayResult> out;
  for (const auto& s : a.angles) out.push_back(ray_result(trace_ray(m, RayAngle(Angle::parse(s)), o)));
  if (a.omega) {
    OmegaEstimate om = critical_value_angle(m);
    out.push_back(ray_result(trace_ray(m, om.angle, o)));
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::size_t parse_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw Error(Errc::Parse, "expected a count, got '" + s + "'");
  return std::stoul(s);
}

SiegelMarked parse_siegel_point(const std::string& text) {
  auto parts = split(text, ':');
  SiegelMarked m;
  using K = SiegelMarked::Kind;
  auto spine = [&](std::size_t at, K& kind, std::size_t& k) {
    if (parts.size() != at + 2) throw Error(Errc::Parse, "expected x1:K or x21:K in '" + text + "'");
    if (parts[at] == "x1")
      kind = K::CritOnes;
    else if (parts[at] == "x21")
      kind = K::CritTwoOnes;
    else
      throw Error(Errc::Parse, "unknown spine point '" + parts[at] + "'");
    k = parse_count(parts[at + 1]);
  };
  if (text == "beta") {
    m.kind = K::Beta;
  } else if (parts[0] == "beta-pre" && parts.size() == 2) {
    m.kind = K::BetaPre;
    m.prefix = parts[1];
  } else if (parts[0] == "off" && parts.size() >= 3) {
    m.kind = K::OffSpine;
    m.prefix = parts[1];
    spine(2, m.base, m.base_k);
  } else {
    spine(0, m.kind, m.k);
  }
  return m;
}

ParabolicMarked parse_parabolic_point(const std::string& text) {
  auto parts = split(text, ':');
  ParabolicMarked m;
  using K = ParabolicMarked::Kind;
  auto spine = [&](std::size_t at, K& kind, std::size_t& k) {
    if (parts[at] == "y0" && parts.size() == at + 1) {
      kind = K::Y0;
      k = 0;
      return;
    }
    if (parts.size() != at + 2) throw Error(Errc::Parse, "expected y0, y1:K or y21:K in '" + text + "'");
    if (parts[at] == "y1")
      kind = K::YOnes;
    else if (parts[at] == "y21")
      kind = K::YTwoOnes;
    else
      throw Error(Errc::Parse, "unknown spine point '" + parts[at] + "'");
    k = parse_count(parts[at + 1]);
  };
  if (parts[0] == "off" && parts.size() >= 3) {
    m.kind = K::OffSpine;
    m.prefix = parts[1];
    spine(2, m.base, m.base_k);
  } else {
    spine(0, m.kind, m.k);
  }
  return m;
}

std::optional<OmegaBits> omega_of(const std::string& bits) {
  if (bits.empty()) return std::nullopt;
  if (bits.find_first_not_of("01") != std::string::npos) throw Error(Errc::Parse, "omega bits must be 0/1");
  return OmegaBits{bits};
}

}  // namespace

ItineraryResult cmd_itinerary(const ItineraryArgs& a) {
  ItineraryResult r;
  std::vector<Itinerary> its;
  if (a.side == "siegel") {
    std::optional<BinarySequence> om;
    if (!a.omega_bits.empty()) om = BinarySequence::parse(a.omega_bits);
    its = itinerary_of_marked_siegel(parse_siegel_point(a.point), om);
    r.point = a.point;
  } else if (a.side == "parabolic") {
    its = itinerary_of_marked_parabolic(parse_parabolic_point(a.point), RotationNumber::parse(a.nu));
    r.point = a.point;
  } else if (a.side == "angle") {
    its = itineraries_of_angle(Angle::parse(a.t));
    r.point = a.t;
  } else {
    throw Error(Errc::Parse, "side must be siegel, parabolic or angle");
  }
  for (const auto& it : its) {
    ItineraryRecord rec;
    rec.sequence = it.str();
    rec.source = source_name(it.source);
    rec.variant = it.variant;
    if (!it.omega_tail) rec.angle = itinerary_to_angle(it).str();
    r.itineraries.push_back(rec);
  }
  return r;
}

std::vector<ClassResult> cmd_classes(const ClassesArgs& a) {
  const RotationNumber nu = RotationNumber::parse(a.nu);
  const auto omega = omega_of(a.omega_bits);
  ClassView view;
  if (a.view == "mating")
    view = ClassView::Mating;
  else if (a.view == "parabolic")
    view = ClassView::ParabolicSide;
  else
    throw Error(Errc::Parse, "view must be mating or parabolic");
  std::vector<ClassResult> out;
  for (const auto& s : a.angles) {
    RayClass c = ray_class(Angle::parse(s), omega, nu, view);
    out.push_back({Angle::parse(s).str(), c.member_strings(), class_kind_name(c.kind)});
  }
  if (!a.omega_word.empty()) {
    RayClass c = ray_class(OmegaWord{a.omega_word}, omega, nu);
    out.push_back({"0." + a.omega_word + "w", c.member_strings(), class_kind_name(c.kind)});
  }
  return out;
}

GluingResult cmd_verify_gluing(const ClassesArgs& a) {
  const RotationNumber nu = RotationNumber::parse(a.nu);
  std::mt19937_64 rng(a.seed);
  std::vector<Angle> sample;
  const auto cycle = parabolic_cycle(nu);
  // Half uniform rationals, half preimages of the glued cycle.
  for (std::size_t k = 0; k < a.verify; ++k) {
    if (k % 2 == 0) {
      long den = 1 + static_cast<long>(rng() % 4095);
      sample.emplace_back(static_cast<long>(rng() % den), den);
    } else {
      Angle x = cycle[rng() % cycle.size()].negated();
      for (unsigned d = rng() % 9; d > 0; --d) x = x.halved(static_cast<int>(rng() % 2));
      sample.push_back(x);
    }
  }
  GluingReport rep = verify_gluing(sample, omega_of(a.omega_bits), nu);
  return {nu.str(), rep.angles, rep.classes, rep.size_violations, rep.partition_violations,
          rep.equivariance_violations, rep.messages};
}

namespace {

FixedRecord fixed_record(const FixedPoint& f) {
  return {f.name, point_record(f.location), {f.multiplier.real(), f.multiplier.imag()}, fixed_type_name(f.type)};
}

cplx derivative_at(const MapSpec& m, const SpherePoint& x) {
  if (!x.at_inf_chart) return eval_derivative(m, x.c);
  return eval_w_derivative(m, x.c);
}

PetalResult petal_data(const MapSpec& m) {
  const int p = static_cast<int>(m.nu().p);
  if (m.kind() == MapKind::SiegelQuad) throw Error(Errc::NotParabolic, "the Siegel map has no parabolic point");
  HoloMap fp = [m, p](cplx z) {
    for (int k = 0; k < p; ++k) z = eval(m, z);
    return z;
  };
  FitOptions fo;
  fo.max_radius = m.polynomial() ? 0.5 : 0.25;
  ParabolicGerm g = fit_germ(fp, 0.0, 4 * p + 4, fo);
  PetalResult r;
  r.map = m.str();
  r.p = g.p;
  r.a = {g.a.real(), g.a.imag()};
  r.delta = g.delta;
  r.a_error = g.a_error;
  const double pa_p = g.p;
  for (cplx v : attracting_vectors(g)) {
    r.attracting.push_back({v.real(), v.imag()});
    r.vector_residuals.push_back(std::abs(pa_p * g.a * std::pow(v, g.p) + 1.0));
  }
  for (cplx v : repelling_vectors(g)) {
    r.repelling.push_back({v.real(), v.imag()});
    r.vector_residuals.push_back(std::abs(pa_p * g.a * std::pow(v, g.p) - 1.0));
  }
  // Abel equation on a few points of each attracting petal.
  double worst = 0;
  FatouParams params;
  params.tol = 1e-8;
  for (cplx v : attracting_vectors(g)) {
    for (double s : {0.3, 0.6}) {
      cplx z = v / std::abs(v) * (s * g.delta) * std::polar(1.0, 0.1);
      cplx a = fatou_coordinate(fp, g, v, z, params), b = fatou_coordinate(fp, g, v, fp(z), params);
      worst = std::max(worst, std::abs(b - a - 1.0));
    }
  }
  r.fatou_residual = worst;
  return r;
}

}  // namespace

InspectResult cmd_inspect(const InspectArgs& a) {
  const MapSpec m = make_map(a.map);
  InspectResult r;
  r.map = m.str();
  const cplx z(a.re, a.im);
  if (a.what == "fixed") {
    for (const auto& f : fixed_points(m)) r.fixed.push_back(fixed_record(f));
  } else if (a.what == "critical") {
    for (const auto& c : critical_points(m)) {
      cplx d = (c.location.at_inf_chart && c.location.c == 0.0) ? cplx(0) : derivative_at(m, c.location);
      r.critical.push_back({c.name, point_record(c.location), {d.real(), d.imag()}, "critical"});
    }
  } else if (a.what == "petal") {
    r.petal = petal_data(m);
  } else if (a.what == "point") {
    if (m.polynomial()) throw Error(Errc::Parse, "point classification is for the mating map");
    MatingModel model(m);
    r.point_class = model.classify(z, a.budget);
  } else if (a.what == "orbit") {
    OrbitRecord o = m.polynomial() ? orbit(m, z, a.budget, 1e6) : orbit(MatingModel(m), z, a.budget);
    for (const auto& x : o.points) r.orbit.push_back(point_record(x));
  } else {
    throw Error(Errc::Parse, "inspect target must be fixed, critical, petal, point or orbit");
  }
  return r;
}

CfResult cmd_cf(const CfArgs& a) {
  Theta t = Theta::parse(a.theta);
  BoundedTypeVerdict v = is_bounded_type(t, a.bound, a.depth);
  return {t.str(), t.partial_quotients(std::min<std::size_t>(a.depth, 64)), v.bounded, v.exact, v.max_quotient,
          v.terms_checked};
}

namespace {

std::string sidecar_path(const std::string& png) {
  auto dot = png.rfind('.');
  auto slash = png.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return png + ".json";
  return png.substr(0, dot) + ".json";
}

}  // namespace

RenderResult cmd_render(const RenderArgs& a, unsigned threads) {
  ImageSpec spec = make_image_spec(a);
  Image img = render(spec, threads);
  write_png(a.out, img);
  RenderResult r{a.out, sidecar_path(a.out), a};
  std::ofstream side(r.sidecar);
  if (!side) throw Error(Errc::Parse, "cannot write " + r.sidecar);
  side << emit_config(RunConfig{kSchemaVersion, a});
  return r;
}

unsigned default_threads() {
  if (const char* env = std::getenv("MATING_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void execute(const RunConfig& cfg, std::ostream& out, unsigned threads) {
  if (cfg.schema_version != kSchemaVersion) throw Error(Errc::SchemaMismatch, "unsupported schema_version");
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RenderArgs>) {
          out << emit_json(cmd_render(a, threads));
        } else if constexpr (std::is_same_v<T, RayArgs>) {
          // JSON lines, one ray each.
          for (const auto& r : cmd_ray(a)) out << json(r).dump() << "\n";
        } else if constexpr (std::is_same_v<T, AnglesArgs>) {
          if (a.mode == "parabolic-cycle") {
            CycleResult r = cmd_parabolic_cycle(RotationNumber::parse(a.nu));
            if (a.json) {
              out << emit_json(r);
            } else {
              for (std::size_t i = 0; i < r.angles.size(); ++i) out << (i ? " " : "") << r.angles[i];
              out << "\n";
            }
          } else if (a.mode == "double") {
            OrbitResult r = cmd_double(Angle::parse(a.t), a.steps);
            if (a.json) {
              out << emit_json(r);
            } else {
              for (std::size_t i = 0; i < r.orbit.size(); ++i) out << (i ? " " : "") << r.orbit[i];
              out << "\n";
            }
          } else if (a.mode == "expansion") {
            ExpansionResult r = cmd_expansion(Angle::parse(a.t));
            if (a.json)
              out << emit_json(r);
            else
              out << r.expansion << (r.twin.empty() ? "" : " " + r.twin) << "\n";
          } else {
            throw Error(Errc::Parse, "angles mode must be parabolic-cycle, double or expansion");
          }
        } else if constexpr (std::is_same_v<T, ItineraryArgs>) {
          out << emit_json(cmd_itinerary(a));
        } else if constexpr (std::is_same_v<T, ClassesArgs>) {
          if (a.verify > 0) {
            GluingResult g = cmd_verify_gluing(a);
            out << emit_json(g);
            if (g.size_violations + g.partition_violations + g.equivariance_violations > 0)
              throw Error(Errc::Inconsistent, "gluing check found violations");
          }
          for (const auto& c : cmd_classes(a)) out << emit_json(c);
        } else if constexpr (std::is_same_v<T, InspectArgs>) {
          out << emit_json(cmd_inspect(a));
        } else if constexpr (std::is_same_v<T, CfArgs>) {
          out << emit_json(cmd_cf(a));
        }
      },
      cfg.args);
}

// ---- command line ----------------------------------------------------------

namespace {

void add_map_options(CLI::App* sub, MapArgs& m) {
  sub->add_option("--map", m.map, "siegel | para | mating")->check(CLI::IsMember({"siegel", "para", "mating"}));
  sub->add_option("--theta", m.theta, "golden | sqrt2m1 | cf:[a1,a2,(b1,..)] | quad:(a+b*sqrt(d))/c");
  sub->add_option("--nu", m.nu, "combinatorial rotation number q/p");
}

std::pair<double, double> parse_pair(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw Error(Errc::Parse, "expected re,im but got '" + s + "'");
  try {
    return {std::stod(parts[0]), std::stod(parts[1])};
  } catch (const std::exception&) {
    throw Error(Errc::Parse, "expected re,im but got '" + s + "'");
  }
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
  CLI::App app{"Siegel/parabolic polynomials and their mating: angles, rays, classes and pictures"};
  app.require_subcommand(0, 1);
  std::string config_path, save_path;
  unsigned threads = 0;
  app.add_option("--config", config_path, "re-run a saved run configuration");
  app.add_option("--save-config", save_path, "write the run configuration to this path");
  app.add_option("--threads", threads, "worker threads (default: MATING_THREADS or all cores)");

  RenderArgs render_a;
  std::string center, mark;
  std::vector<std::string> marks;
  auto* render_c = app.add_subcommand("render", "filled Julia set or mating picture (PNG + sidecar JSON)");
  add_map_options(render_c, render_a.map);
  render_c->add_option("--width", render_a.width);
  render_c->add_option("--height", render_a.height);
  render_c->add_option("--center", center, "re,im");
  render_c->add_option("--span", render_a.span, "width of the viewport");
  render_c->add_option("--maxiter", render_a.maxiter);
  render_c->add_option("--escape-radius", render_a.escape_radius);
  render_c->add_option("--palette", render_a.palette)->check(CLI::IsMember({"classic", "gray"}));
  render_c->add_option("--ray", render_a.rays, "external ray angle a/b to overlay");
  render_c->add_option("--mark", marks, "re,im point to mark");
  render_c->add_option("--out", render_a.out);

  RayArgs ray_a;
  auto* ray_c = app.add_subcommand("ray", "trace external rays (JSON lines)");
  add_map_options(ray_c, ray_a.map);
  ray_c->add_option("--angle", ray_a.angles, "angle a/b");
  ray_c->add_flag("--omega", ray_a.omega, "also trace the ray of the critical value");
  ray_c->add_option("--start-radius", ray_a.start_radius);
  ray_c->add_option("--min-potential", ray_a.min_potential);
  ray_c->add_option("--steps-per-halving", ray_a.steps_per_halving);
  ray_c->add_option("--land-tol", ray_a.land_tol);

  AnglesArgs angles_a;
  auto* angles_c = app.add_subcommand("angles", "exact angle arithmetic");
  angles_c->add_option("mode", angles_a.mode, "parabolic-cycle | double | expansion")
      ->required()
      ->check(CLI::IsMember({"parabolic-cycle", "double", "expansion"}));
  angles_c->add_option("--nu", angles_a.nu);
  angles_c->add_option("--t", angles_a.t);
  angles_c->add_option("--steps", angles_a.steps);
  angles_c->add_flag("--json", angles_a.json);

  ItineraryArgs it_a;
  auto* it_c = app.add_subcommand("itinerary", "itineraries of marked points");
  it_c->add_option("--side", it_a.side)->check(CLI::IsMember({"siegel", "parabolic", "angle"}));
  it_c->add_option("--point", it_a.point,
                   "beta | beta-pre:W | x1:K | x21:K | y0 | y1:K | y21:K | off:W:<spine point>");
  it_c->add_option("--nu", it_a.nu);
  it_c->add_option("--t", it_a.t);
  it_c->add_option("--omega-bits", it_a.omega_bits, "binary digits of omega, e.g. 1011(0)");

  ClassesArgs cl_a;
  auto* cl_c = app.add_subcommand("classes", "ray-equivalence classes");
  cl_c->add_option("--nu", cl_a.nu);
  cl_c->add_option("--angle", cl_a.angles);
  cl_c->add_option("--view", cl_a.view)->check(CLI::IsMember({"mating", "parabolic"}));
  cl_c->add_option("--omega-word", cl_a.omega_word, "class of 0.w omega");
  cl_c->add_option("--omega-bits", cl_a.omega_bits, "trusted binary digits of omega");
  cl_c->add_option("--verify", cl_a.verify, "check the gluing on this many random angles");
  cl_c->add_option("--seed", cl_a.seed);

  InspectArgs in_a;
  std::string point;
  auto* in_c = app.add_subcommand("inspect", "fixed and critical points, petals, point classes");
  add_map_options(in_c, in_a.map);
  in_c->add_option("--what", in_a.what)->check(CLI::IsMember({"fixed", "critical", "petal", "point", "orbit"}));
  in_c->add_option("--z", point, "re,im");
  in_c->add_option("--budget", in_a.budget);

  CfArgs cf_a;
  auto* cf_c = app.add_subcommand("cf", "continued fraction and bounded-type check");
  cf_c->add_option("--theta", cf_a.theta);
  cf_c->add_option("--bound", cf_a.bound);
  cf_c->add_option("--depth", cf_a.depth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (*render_c) {
      if (!center.empty()) std::tie(render_a.cx, render_a.cy) = parse_pair(center);
      for (const auto& m : marks) render_a.marks.push_back(parse_pair(m));
      cfg.args = render_a;
    } else if (*ray_c) {
      cfg.args = ray_a;
    } else if (*angles_c) {
      cfg.args = angles_a;
    } else if (*it_c) {
      cfg.args = it_a;
    } else if (*cl_c) {
      cfg.args = cl_a;
    } else if (*in_c) {
      if (!point.empty()) std::tie(in_a.re, in_a.im) = parse_pair(point);
      cfg.args = in_a;
    } else if (*cf_c) {
      cfg.args = cf_a;
    } else {
      std::cerr << app.help();
      return 1;
    }
    if (!save_path.empty()) {
      std::ofstream f(save_path);
      if (!f) throw Error(Errc::Parse, "cannot write " + save_path);
      f << emit_config(cfg);
    }
    execute(cfg, std::cout, threads ? threads : default_threads());
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mating
