#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "mating/error.hpp"
#include "mating/render.hpp"

using namespace mating;

namespace {

const MapSpec kMating = MapSpec::mating(Theta::golden(), RotationNumber(3, 5));

const MatingModel& model35() {
  static const MatingModel m(kMating);
  return m;
}

ImageSpec small(const MapSpec& m, int w, int h) {
  ImageSpec s;
  s.width = w;
  s.height = h;
  s.map = m;
  s.span = m.polynomial() ? 4.0 : 6.0;
  s.maxiter = m.polynomial() ? 500 : 2000;
  return s;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mating_test_" + name)).string();
}

}  // namespace

TEST_CASE("escape steps against a direct loop") {
  auto para = MapSpec::para(RotationNumber(3, 5));
  CHECK(escape_step(para, 0.0, 1000, 4) == 0);
  CHECK(escape_step(para, 10.0, 1000, 4) == 1);
  const cplx lam = std::polar(1.0, 2 * M_PI * 0.6);
  for (double x = -2.5; x <= 2.5; x += 0.37)
    for (double y = -2.5; y <= 2.5; y += 0.41) {
      cplx z(x, y);
      std::size_t want = 0;
      for (std::size_t n = 1; n <= 300; ++n) {
        z = lam * z + z * z;
        if (std::abs(z) > 4) {
          want = n;
          break;
        }
      }
      CHECK(escape_step(para, cplx(x, y), 300, 4) == want);
    }
}

TEST_CASE("non-escaping area shrinks as maxiter grows") {
  ImageSpec s = small(MapSpec::siegel(Theta::golden()), 96, 96);
  std::size_t prev = SIZE_MAX;
  for (std::size_t it : {20u, 80u, 320u}) {
    s.maxiter = it;
    auto g = escape_grid(s, 2);
    std::size_t inside = 0;
    for (auto v : g) inside += v == 0;
    CHECK(inside <= prev);
    prev = inside;
  }
  CHECK(prev > 0);
}

TEST_CASE("tiled grids equal a pixel-by-pixel pass") {
  // 150 x 130 is not a multiple of the tile size.
  ImageSpec s = small(MapSpec::para(RotationNumber(1, 2)), 150, 130);
  for (unsigned th : {1u, 3u, 8u}) {
    auto g = escape_grid(s, th);
    REQUIRE(g.size() == 150u * 130u);
    bool same = true;
    for (int j = 0; j < s.height; ++j)
      for (int i = 0; i < s.width; ++i)
        same &= g[static_cast<std::size_t>(j) * s.width + i] ==
                escape_step(s.map, pixel_point(s, i, j), s.maxiter, s.escape_radius);
    CHECK(same);
  }
  ImageSpec m = small(kMating, 70, 66);
  m.maxiter = 1000;
  auto c = classify_grid(m, model35(), 4);
  bool same = true;
  for (int j = 0; j < m.height; ++j)
    for (int i = 0; i < m.width; ++i)
      same &= c[static_cast<std::size_t>(j) * m.width + i] == model35().classify(pixel_point(m, i, j), m.maxiter);
  CHECK(same);
}

TEST_CASE("pixel geometry") {
  ImageSpec s = small(MapSpec::para(RotationNumber(1, 2)), 200, 100);
  s.center = cplx(0.5, -0.25);
  s.span = 4;
  auto [x, y] = point_pixel(s, pixel_point(s, 17, 42));
  // Pixel centres sit at integer coordinates.
  CHECK(x == doctest::Approx(17));
  CHECK(y == doctest::Approx(42));
  // Row 0 is at the top.
  CHECK(pixel_point(s, 0, 0).imag() > pixel_point(s, 0, 99).imag());
  CHECK(pixel_point(s, 199, 0).real() - pixel_point(s, 0, 0).real() == doctest::Approx(4.0 * 199 / 200));
  s.width = 0;
  CHECK_THROWS_AS(validate(s), Error);
  s.width = 10;
  s.span = -1;
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("renders are identical across thread counts and runs") {
  for (const MapSpec& m : {MapSpec::siegel(Theta::golden()), MapSpec::para(RotationNumber(3, 5))}) {
    ImageSpec s = small(m, 160, 120);
    Image a = render(s, 1);
    CHECK(a == render(s, 4));
    CHECK(a == render(s, 8));
    CHECK(a == render(s, 1));
  }
  ImageSpec s = small(kMating, 128, 128);
  Image a = render_mating(s, model35(), 1);
  CHECK(a == render_mating(s, model35(), 4));
  CHECK(a == render_mating(s, model35(), 8));
}

TEST_CASE("mating pixels at the marked points") {
  ImageSpec s = small(kMating, 129, 129);
  s.span = 0.05;
  s.center = model35().c0().z();
  auto g = classify_grid(s, model35(), 2);
  CHECK(g[64 * 129 + 64].label == BasinClass::Label::ParabolicBasin);
  // Near z = infinity the Siegel side takes over.
  s.center = 1e4;
  s.span = 10;
  g = classify_grid(s, model35(), 2);
  CHECK(g[64 * 129 + 64].label == BasinClass::Label::SiegelSide);
  Image img = render_mating(s, model35(), 1);
  auto c = basin_color(g[64 * 129 + 64], 5, Palette::Classic);
  const std::uint8_t* px = img.at(64, 64);
  CHECK(Rgb{px[0], px[1], px[2]} == c);
}

TEST_CASE("five petal shades meet at the parabolic point") {
  ImageSpec s = small(kMating, 201, 201);
  s.span = 0.2;
  auto g = classify_grid(s, model35(), 4);
  std::set<int> seen;
  for (int k = 0; k < 720; ++k) {
    cplx z = std::polar(0.02, 2 * M_PI * k / 720.0);
    auto [x, y] = point_pixel(s, z);
    const auto& c = g[static_cast<std::size_t>(std::lround(y)) * s.width + static_cast<std::size_t>(std::lround(x))];
    if (c.label == BasinClass::Label::ParabolicBasin) seen.insert(c.basin);
  }
  CHECK(seen.size() == 5);
  std::set<std::vector<std::uint8_t>> shades;
  for (int b = 0; b < 5; ++b) {
    Rgb c = basin_color({BasinClass::Label::ParabolicBasin, b, 3}, 5, Palette::Classic);
    shades.insert({c.r, c.g, c.b});
  }
  CHECK(shades.size() == 5);
}

TEST_CASE("doubling the budget only changes undecided pixels") {
  ImageSpec s = small(kMating, 96, 96);
  s.maxiter = 1000;
  auto a = classify_grid(s, model35(), 4);
  s.maxiter = 2000;
  auto b = classify_grid(s, model35(), 4);
  std::size_t changed = 0, decided = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].label == BasinClass::Label::Undecided) continue;
    ++decided;
    changed += !(a[k] == b[k]);
  }
  CHECK(changed == 0);
  CHECK(decided > a.size() / 2);
}

TEST_CASE("PNG round trip") {
  Image img{5, 3, {}};
  for (int k = 0; k < 45; ++k) img.rgb.push_back(static_cast<std::uint8_t>(k * 37 % 256));
  const std::string path = temp_path("roundtrip.png");
  write_png(path, img);
  CHECK(read_png(path) == img);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_png(temp_path("missing.png")), std::runtime_error);
}

TEST_CASE("overlays") {
  ImageSpec s = small(MapSpec::para(RotationNumber(3, 5)), 128, 128);
  s.span = 3;
  Image base = render(s, 2);
  Image same = base;
  overlay_rays(same, s, {}, {});
  CHECK(same == base);

  std::vector<RayTrace> traces;
  for (const Angle& t : parabolic_cycle(RotationNumber(3, 5))) traces.push_back(trace_ray(s.map, t));
  Image once = base;
  overlay_rays(once, s, traces, {0.0});
  CHECK_FALSE(once == base);
  Image twice = once;
  overlay_rays(twice, s, traces, {0.0});
  CHECK(twice == once);

  // Through the spec the overlay gives the same bytes.
  s.overlay.ray_angles = {"11/31", "13/31", "21/31", "22/31", "26/31"};
  s.overlay.marks = {0.0};
  CHECK(render(s, 3) == once);
  CHECK(parse_palette(palette_name(Palette::Gray)) == Palette::Gray);
}
