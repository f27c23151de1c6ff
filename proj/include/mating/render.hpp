#pragma once

// Tile-parallel, deterministic images of K(f_theta), K(f_nu) and of the basin
// decomposition of F, with ray and point overlays.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mating/maps.hpp"
#include "mating/rays.hpp"

namespace mating {

enum class Palette { Classic, Gray };
std::string palette_name(Palette p);
Palette parse_palette(const std::string& s);

struct Overlay {
  std::vector<std::string> ray_angles;  // traced at render time
  std::vector<cplx> marks;
  friend bool operator==(const Overlay&, const Overlay&) = default;
};

struct ImageSpec {
  int width = 512;
  int height = 512;
  cplx center = 0.0;
  double span = 6.0;  // width of the viewport
  std::size_t maxiter = 2000;
  double escape_radius = 4.0;
  Palette palette = Palette::Classic;
  MapSpec map = MapSpec::para(RotationNumber(1, 2));
  Overlay overlay;

  friend bool operator==(const ImageSpec&, const ImageSpec&) = default;
};

void validate(const ImageSpec& spec);

// Pixel centres, row 0 at the top.
cplx pixel_point(const ImageSpec& spec, int i, int j);
// Fractional pixel coordinates of z.
std::pair<double, double> point_pixel(const ImageSpec& spec, cplx z);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  std::uint8_t* at(int i, int j) { return &rgb[3 * (static_cast<std::size_t>(j) * width + i)]; }
  const std::uint8_t* at(int i, int j) const { return &rgb[3 * (static_cast<std::size_t>(j) * width + i)]; }
  friend bool operator==(const Image&, const Image&) = default;
};

constexpr int kTile = 64;

// First step n >= 1 with |f^n(z)| > R, or 0 if the orbit stays for maxiter.
std::size_t escape_step(const MapSpec& poly, cplx z, std::size_t maxiter, double escape_radius);

// Per-pixel escape steps, row-major.
std::vector<std::size_t> escape_grid(const ImageSpec& spec, unsigned threads);
// Per-pixel basin classes of F, row-major.
std::vector<BasinClass> classify_grid(const ImageSpec& spec, const MatingModel& model, unsigned threads);

Image render_filled_julia(const ImageSpec& spec, unsigned threads = 1);
Image render_mating(const ImageSpec& spec, unsigned threads = 1);
Image render_mating(const ImageSpec& spec, const MatingModel& model, unsigned threads = 1);
// Dispatch on spec.map and apply spec.overlay.
Image render(const ImageSpec& spec, unsigned threads = 1);

// Colours used for the basin classes.
struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
Rgb basin_color(const BasinClass& c, std::size_t p, Palette pal);

void overlay_rays(Image& img, const ImageSpec& spec, const std::vector<RayTrace>& traces, const std::vector<cplx>& marks);

void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

}  // namespace mating
