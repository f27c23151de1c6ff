#pragma once

// Command line, run configurations and JSON serialisation.

#include <array>
#include <complex>
#include <cstdint>
#include <ostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mating/combinatorics.hpp"
#include "mating/maps.hpp"
#include "mating/render.hpp"

namespace mating {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// ---- parameter records -----------------------------------------------------

struct MapArgs {
  std::string map = "para";  // siegel | para | mating
  std::string theta = "golden";
  std::string nu = "3/5";
  friend bool operator==(const MapArgs&, const MapArgs&) = default;
};
MapSpec make_map(const MapArgs& a);

struct RenderArgs {
  MapArgs map;
  int width = 512;
  int height = 512;
  double cx = 0, cy = 0;
  double span = 6.0;
  std::size_t maxiter = 2000;
  double escape_radius = 4.0;
  std::string palette = "classic";
  std::vector<std::string> rays;
  std::vector<std::pair<double, double>> marks;
  std::string out = "render.png";
  friend bool operator==(const RenderArgs&, const RenderArgs&) = default;
};
ImageSpec make_image_spec(const RenderArgs& a);

struct RayArgs {
  MapArgs map;
  std::vector<std::string> angles;
  bool omega = false;  // also trace the ray of the critical value (Siegel map)
  double start_radius = 65536.0;
  double min_potential = 1e-8;
  int steps_per_halving = 16;
  double land_tol = 1e-3;
  friend bool operator==(const RayArgs&, const RayArgs&) = default;
};

struct AnglesArgs {
  std::string mode = "parabolic-cycle";  // parabolic-cycle | double | expansion
  std::string nu = "3/5";
  std::string t = "11/31";
  std::size_t steps = 1;
  bool json = false;
  friend bool operator==(const AnglesArgs&, const AnglesArgs&) = default;
};

struct ItineraryArgs {
  std::string side = "parabolic";  // siegel | parabolic | angle
  std::string point = "y0";
  std::string nu = "3/5";
  std::string t = "0";
  std::string omega_bits;  // binary digits, empty for symbolic
  friend bool operator==(const ItineraryArgs&, const ItineraryArgs&) = default;
};

struct ClassesArgs {
  std::string nu = "3/5";
  std::vector<std::string> angles;
  std::string view = "mating";  // mating | parabolic
  std::string omega_word;       // class of 0.w omega when set
  std::string omega_bits;
  std::size_t verify = 0;  // random angles for a gluing check
  std::uint64_t seed = 1;
  friend bool operator==(const ClassesArgs&, const ClassesArgs&) = default;
};

struct InspectArgs {
  MapArgs map;
  std::string what = "fixed";  // fixed | critical | petal | point | orbit
  double re = 0, im = 0;
  std::size_t budget = 100000;
  friend bool operator==(const InspectArgs&, const InspectArgs&) = default;
};

struct CfArgs {
  std::string theta = "golden";
  std::uint64_t bound = 10;
  std::size_t depth = 64;
  friend bool operator==(const CfArgs&, const CfArgs&) = default;
};

using CommandArgs = std::variant<RenderArgs, RayArgs, AnglesArgs, ItineraryArgs, ClassesArgs, InspectArgs, CfArgs>;

struct RunConfig {
  int schema_version = kSchemaVersion;
  CommandArgs args;
  std::string command() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

json to_json_value(const RunConfig& c);
RunConfig run_config_from_json(const json& j);
std::string emit_config(const RunConfig& c);
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// ---- results ---------------------------------------------------------------

struct PointRecord {
  bool infinity = false;
  double re = 0, im = 0;
  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};
PointRecord point_record(const SpherePoint& x);

struct CycleResult {
  std::string nu;
  std::vector<std::string> angles;
  std::vector<std::string> expansions;
  std::string word;
  friend bool operator==(const CycleResult&, const CycleResult&) = default;
};

struct OrbitResult {
  std::string t;
  std::vector<std::string> orbit;
  std::size_t preperiod = 0, period = 0;
  friend bool operator==(const OrbitResult&, const OrbitResult&) = default;
};

struct ExpansionResult {
  std::string t;
  std::string expansion;
  std::string twin;  // empty unless dyadic
  friend bool operator==(const ExpansionResult&, const ExpansionResult&) = default;
};

struct RayResult {
  std::string angle;
  std::vector<std::array<double, 3>> samples;  // potential, re, im
  std::optional<std::array<double, 2>> landing;
  bool converged = false;
  friend bool operator==(const RayResult&, const RayResult&) = default;
};
RayResult ray_result(const RayTrace& t);

struct ItineraryRecord {
  std::string sequence;
  std::string source;
  int variant = 0;
  std::string angle;  // empty for a symbolic omega tail
  friend bool operator==(const ItineraryRecord&, const ItineraryRecord&) = default;
};

struct ItineraryResult {
  std::string point;
  std::vector<ItineraryRecord> itineraries;
  friend bool operator==(const ItineraryResult&, const ItineraryResult&) = default;
};

struct ClassResult {
  std::string angle;
  std::vector<std::string> cls;
  std::string kind;
  friend bool operator==(const ClassResult&, const ClassResult&) = default;
};

struct GluingResult {
  std::string nu;
  std::size_t angles = 0, classes = 0;
  std::size_t size_violations = 0, partition_violations = 0, equivariance_violations = 0;
  std::vector<std::string> messages;
  friend bool operator==(const GluingResult&, const GluingResult&) = default;
};

struct FixedRecord {
  std::string name;
  PointRecord location;
  std::array<double, 2> multiplier{};
  std::string type;
  friend bool operator==(const FixedRecord&, const FixedRecord&) = default;
};

struct PetalResult {
  std::string map;
  int p = 0;
  std::array<double, 2> a{};
  double delta = 0;
  double a_error = 0;
  std::vector<std::array<double, 2>> attracting, repelling;
  std::vector<double> vector_residuals;  // |p a v^p -+ 1|
  double fatou_residual = 0;             // max |Phi(f z) - Phi(z) - 1| on sample points
  friend bool operator==(const PetalResult&, const PetalResult&) = default;
};

struct InspectResult {
  std::string map;
  std::vector<FixedRecord> fixed;
  std::vector<FixedRecord> critical;  // multiplier holds f'(c)
  std::optional<PetalResult> petal;
  std::optional<BasinClass> point_class;
  std::vector<PointRecord> orbit;
  friend bool operator==(const InspectResult&, const InspectResult&) = default;
};

struct CfResult {
  std::string theta;
  std::vector<std::uint64_t> quotients;
  bool bounded = false, exact = false;
  std::uint64_t max_quotient = 0;
  std::size_t terms_checked = 0;
  friend bool operator==(const CfResult&, const CfResult&) = default;
};

struct RenderResult {
  std::string png;
  std::string sidecar;
  RenderArgs spec;
  friend bool operator==(const RenderResult&, const RenderResult&) = default;
};

// Each result serialises to one JSON object with "type" and "schema_version"
// keys next to its fields. Keys are sorted, so the bytes are stable.
template <class T>
std::string emit_json(const T& result);
template <class T>
T load_json(const std::string& text);

// The subcommands on parsed parameters.
CycleResult cmd_parabolic_cycle(const RotationNumber& nu);
OrbitResult cmd_double(const Angle& t, std::size_t steps);
ExpansionResult cmd_expansion(const Angle& t);
std::vector<RayResult> cmd_ray(const RayArgs& a);
ItineraryResult cmd_itinerary(const ItineraryArgs& a);
std::vector<ClassResult> cmd_classes(const ClassesArgs& a);
GluingResult cmd_verify_gluing(const ClassesArgs& a);
InspectResult cmd_inspect(const InspectArgs& a);
CfResult cmd_cf(const CfArgs& a);
RenderResult cmd_render(const RenderArgs& a, unsigned threads);

// Thread count from MATING_THREADS, else the hardware concurrency.
unsigned default_threads();

// Runs a configuration; writes results to out. Throws mating::Error.
void execute(const RunConfig& cfg, std::ostream& out, unsigned threads);

// Exit codes: 0 success, 1 usage error, 2 numerical failure.
int cli_dispatch(int argc, char** argv);

}  // namespace mating
