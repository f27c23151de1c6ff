#include "mating/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "mating/error.hpp"

namespace mating {

std::string palette_name(Palette p) { return p == Palette::Classic ? "classic" : "gray"; }

Palette parse_palette(const std::string& s) {
  if (s == "classic") return Palette::Classic;
  if (s == "gray") return Palette::Gray;
  throw Error(Errc::Parse, "unknown palette '" + s + "'");
}

void validate(const ImageSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw Error(Errc::Parse, "image size must be positive");
  if (!(spec.span > 0)) throw Error(Errc::Parse, "viewport span must be positive");
  if (!(spec.escape_radius > 0)) throw Error(Errc::Parse, "escape radius must be positive");
}

cplx pixel_point(const ImageSpec& spec, int i, int j) {
  const double px = spec.span / spec.width;
  return {spec.center.real() + (i + 0.5 - spec.width / 2.0) * px,
          spec.center.imag() - (j + 0.5 - spec.height / 2.0) * px};
}

std::pair<double, double> point_pixel(const ImageSpec& spec, cplx z) {
  const double px = spec.span / spec.width;
  return {(z.real() - spec.center.real()) / px + spec.width / 2.0 - 0.5,
          -(z.imag() - spec.center.imag()) / px + spec.height / 2.0 - 0.5};
}

std::size_t escape_step(const MapSpec& poly, cplx z, std::size_t maxiter, double escape_radius) {
  const cplx l = poly.lambda();
  const double r2 = escape_radius * escape_radius;
  for (std::size_t n = 1; n <= maxiter; ++n) {
    z = (l + z) * z;
    if (std::norm(z) > r2) return n;
  }
  return 0;
}

namespace {

// Runs body(i, j) over every pixel, one 64x64 tile at a time. Tiles are
// independent so the result does not depend on the thread count.
void for_each_pixel(int width, int height, unsigned threads, const std::function<void(int, int)>& body) {
  const int tx = (width + kTile - 1) / kTile, ty = (height + kTile - 1) / kTile;
  const int ntiles = tx * ty;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t; (t = next.fetch_add(1)) < ntiles;) {
      const int x0 = (t % tx) * kTile, y0 = (t / tx) * kTile;
      const int x1 = std::min(width, x0 + kTile), y1 = std::min(height, y0 + kTile);
      for (int j = y0; j < y1; ++j)
        for (int i = x0; i < x1; ++i) body(i, j);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ntiles)));
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

Rgb mix(Rgb a, Rgb b, double t) {
  auto m = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
  };
  return {m(a.r, b.r), m(a.g, b.g), m(a.b, b.b)};
}

// Distinct hues for the p immediate basins.
Rgb basin_hue(std::size_t i, Palette pal) {
  static const Rgb classic[] = {{0, 170, 200}, {40, 120, 220}, {0, 200, 140}, {90, 80, 210}, {0, 140, 120},
                              {60, 190, 230}, {20, 90, 160},  {100, 200, 180}, {0, 110, 180}, {70, 150, 110},
                              {30, 60, 200},  {120, 170, 230}};
  static const Rgb gray[] = {{200, 200, 200}, {150, 150, 150}, {175, 175, 175}, {125, 125, 125},
                             {225, 225, 225}, {100, 100, 100}, {190, 190, 190}, {140, 140, 140},
                             {215, 215, 215}, {115, 115, 115}, {160, 160, 160}, {235, 235, 235}};
  return pal == Palette::Classic ? classic[i % 12] : gray[i % 12];
}

Rgb escape_color(std::size_t n, Palette pal) {
  if (pal == Palette::Gray) {
    auto v = static_cast<std::uint8_t>(255 - std::min<std::size_t>(n * 6, 200));
    return {v, v, v};
  }
  // Bands that darken toward the Julia set.
  const double t = std::fmod(std::log2(static_cast<double>(n) + 1.0), 1.0);
  const Rgb a{255, 250, 235}, b{250, 200, 120};
  return mix(a, b, t);
}

const Rgb kInterior{245, 170, 190};   // filled Julia set
const Rgb kSiegel{250, 190, 205};     // Siegel disk side
const Rgb kUndecided{25, 25, 35};

}  // namespace

Rgb basin_color(const BasinClass& c, std::size_t p, Palette pal) {
  switch (c.label) {
    case BasinClass::Label::SiegelSide: return pal == Palette::Classic ? kSiegel : Rgb{240, 240, 240};
    case BasinClass::Label::Undecided: return kUndecided;
    case BasinClass::Label::ParabolicBasin: {
      Rgb base = basin_hue(static_cast<std::size_t>(c.basin) % std::max<std::size_t>(p, 1), pal);
      // Entry time bands within one basin.
      const double t = 0.35 * static_cast<double>(c.step % 8) / 8.0;
      return mix(base, Rgb{255, 255, 255}, t);
    }
  }
  return kUndecided;
}

std::vector<std::size_t> escape_grid(const ImageSpec& spec, unsigned threads) {
  validate(spec);
  if (!spec.map.polynomial()) throw Error(Errc::Parse, "filled Julia sets need a polynomial map");
  std::vector<std::size_t> out(static_cast<std::size_t>(spec.width) * spec.height);
  for_each_pixel(spec.width, spec.height, threads, [&](int i, int j) {
    out[static_cast<std::size_t>(j) * spec.width + i] =
        escape_step(spec.map, pixel_point(spec, i, j), spec.maxiter, spec.escape_radius);
  });
  return out;
}

std::vector<BasinClass> classify_grid(const ImageSpec& spec, const MatingModel& model, unsigned threads) {
  validate(spec);
  std::vector<BasinClass> out(static_cast<std::size_t>(spec.width) * spec.height);
  for_each_pixel(spec.width, spec.height, threads, [&](int i, int j) {
    out[static_cast<std::size_t>(j) * spec.width + i] = model.classify(pixel_point(spec, i, j), spec.maxiter);
  });
  return out;
}

Image render_filled_julia(const ImageSpec& spec, unsigned threads) {
  auto grid = escape_grid(spec, threads);
  Image img{spec.width, spec.height, std::vector<std::uint8_t>(grid.size() * 3)};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Rgb c = grid[k] == 0 ? (spec.palette == Palette::Classic ? kInterior : Rgb{0, 0, 0}) : escape_color(grid[k], spec.palette);
    img.rgb[3 * k] = c.r;
    img.rgb[3 * k + 1] = c.g;
    img.rgb[3 * k + 2] = c.b;
  }
  return img;
}

Image render_mating(const ImageSpec& spec, const MatingModel& model, unsigned threads) {
  auto grid = classify_grid(spec, model, threads);
  const std::size_t p = spec.map.nu().p;
  Image img{spec.width, spec.height, std::vector<std::uint8_t>(grid.size() * 3)};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Rgb c = basin_color(grid[k], p, spec.palette);
    img.rgb[3 * k] = c.r;
    img.rgb[3 * k + 1] = c.g;
    img.rgb[3 * k + 2] = c.b;
  }
  return img;
}

Image render_mating(const ImageSpec& spec, unsigned threads) {
  if (spec.map.kind() != MapKind::MatingRational) throw Error(Errc::Parse, "render_mating needs the mating map");
  MatingModel model(spec.map);
  return render_mating(spec, model, threads);
}

Image render(const ImageSpec& spec, unsigned threads) {
  Image img = spec.map.polynomial() ? render_filled_julia(spec, threads) : render_mating(spec, threads);
  if (!spec.overlay.ray_angles.empty() || !spec.overlay.marks.empty()) {
    std::vector<RayTrace> traces;
    if (!spec.overlay.ray_angles.empty() && !spec.map.polynomial())
      throw Error(Errc::Parse, "ray overlays need a polynomial map");
    for (const auto& a : spec.overlay.ray_angles) traces.push_back(trace_ray(spec.map, RayAngle(Angle::parse(a))));
    overlay_rays(img, spec, traces, spec.overlay.marks);
  }
  return img;
}

namespace {

void put(Image& img, int i, int j, Rgb c) {
  if (i < 0 || j < 0 || i >= img.width || j >= img.height) return;
  std::uint8_t* px = img.at(i, j);
  px[0] = c.r;
  px[1] = c.g;
  px[2] = c.b;
}

// Segment in pixel coordinates, clipped to the image (Liang-Barsky).
void segment(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
  double t0 = 0, t1 = 1;
  const double dx = x1 - x0, dy = y1 - y0;
  const double lo_x = -1, hi_x = img.width, lo_y = -1, hi_y = img.height;
  auto clip = [&](double p, double q) {
    if (p == 0) return q >= 0;
    double r = q / p;
    if (p < 0) {
      if (r > t1) return false;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return false;
      t1 = std::min(t1, r);
    }
    return true;
  };
  if (!clip(-dx, x0 - lo_x) || !clip(dx, hi_x - x0) || !clip(-dy, y0 - lo_y) || !clip(dy, hi_y - y0)) return;
  const double ax = x0 + t0 * dx, ay = y0 + t0 * dy, bx = x0 + t1 * dx, by = y0 + t1 * dy;
  const int steps = static_cast<int>(std::ceil(std::max(std::fabs(bx - ax), std::fabs(by - ay)))) + 1;
  for (int s = 0; s <= steps; ++s) {
    double u = static_cast<double>(s) / steps;
    put(img, static_cast<int>(std::lround(ax + u * (bx - ax))), static_cast<int>(std::lround(ay + u * (by - ay))), c);
  }
}

}  // namespace

void overlay_rays(Image& img, const ImageSpec& spec, const std::vector<RayTrace>& traces, const std::vector<cplx>& marks) {
  const Rgb ray{30, 30, 30}, mark{200, 20, 20};
  for (const auto& tr : traces) {
    std::vector<cplx> pts;
    for (const auto& s : tr.samples) pts.push_back(s.z);
    if (tr.landing) pts.push_back(*tr.landing);
    for (std::size_t k = 1; k < pts.size(); ++k) {
      auto [x0, y0] = point_pixel(spec, pts[k - 1]);
      auto [x1, y1] = point_pixel(spec, pts[k]);
      if (!std::isfinite(x0 + y0 + x1 + y1)) continue;
      segment(img, x0, y0, x1, y1, ray);
    }
  }
  for (cplx z : marks) {
    auto [x, y] = point_pixel(spec, z);
    if (!std::isfinite(x + y)) continue;
    const int i = static_cast<int>(std::lround(x)), j = static_cast<int>(std::lround(y));
    for (int d = -3; d <= 3; ++d) {
      put(img, i + d, j, mark);
      put(img, i, j + d, mark);
    }
  }
}

}  // namespace mating
