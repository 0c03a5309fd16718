#pragma once

#include <string>

#include "oio/core.hpp"

namespace oio::plume {

enum class StabilityClass { A, B, C, D, E, F, G };

inline StabilityClass parse_stability(const std::string& s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'G') {
    return static_cast<StabilityClass>(s[0] - 'A');
  }
  throw ConfigError("unknown Pasquill stability class '" + s + "'");
}

inline std::string to_string(StabilityClass c) {
  return std::string(1, static_cast<char>('A' + static_cast<int>(c)));
}

// Semi-axes of the ellipsoidal blank pockets, in metres.
struct BlankShape {
  double along_wind = 1.0;
  double cross_wind = 0.6;
  double vertical = 0.6;
};

// Plume environment parameters. Defaults reproduce the reference table:
// diffusion 1.0, sparsity 0.0, 20 C, 50 %RH, 1.225 kg/m^3, 1 m/s, 1 kg/s,
// class D, 1 m source height, 5 obstacles.
struct PlumeConfig {
  double diffusion = 1.0;           // multiplicative scale on sigma_y, sigma_z
  double sparsity = 0.0;            // expected blank fraction in [0, 1]
  double temperature_c = 20.0;
  double relative_humidity = 50.0;
  double air_density = 1.225;
  double wind_speed = 1.0;          // mean wind along +x, m/s
  double emission_rate = 1.0;       // kg/s
  StabilityClass stability = StabilityClass::D;
  double source_height = 1.0;       // m
  Vec2 source_position{2.5, 5.0};   // m
  int obstacle_count = 5;
  Vec3 bounds{20.0, 10.0, 3.0};     // width (x), depth (y), height (z)

  // Extensions beyond the reference table.
  double initial_spread = 0.25;     // sigma at the source (diffuser + fan outlet), m
  double turbulence_intensity = 0.02;  // vertical gust RMS sigma_w, m/s
  double turbulence_altitude = 1.0;    // altitude for Dryden scale lengths, m
  double tick = 0.1;                // simulation tick, s (10 Hz)
  double horizon = 3600.0;          // precomputed gust/blank horizon, s
  BlankShape blank_shape{};

  static constexpr double kMaxHeight = 3.0;  // flight envelope ceiling

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("plume config: " + m); };
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) fail("sparsity must lie in [0, 1]");
    if (!(wind_speed >= 0.0)) fail("wind_speed must be >= 0");
    if (!(emission_rate > 0.0)) fail("emission_rate must be > 0");
    if (!(diffusion > 0.0)) fail("diffusion must be > 0");
    if (!(bounds.x > 0.0 && bounds.y > 0.0 && bounds.z > 0.0)) fail("bounds must be positive");
    if (bounds.z > kMaxHeight) fail("bounds height exceeds the 3.0 m flight envelope");
    if (!(source_height >= 0.0 && source_height <= bounds.z)) fail("source height outside bounds");
    if (!(source_position.x >= 0.0 && source_position.x <= bounds.x &&
          source_position.y >= 0.0 && source_position.y <= bounds.y)) {
      fail("source outside bounds");
    }
    if (obstacle_count < 0) fail("obstacle_count must be >= 0");
    if (!(initial_spread >= 0.0)) fail("initial_spread must be >= 0");
    if (!(turbulence_intensity >= 0.0)) fail("turbulence_intensity must be >= 0");
    if (!(tick > 0.0)) fail("tick must be > 0");
    if (!(horizon > 0.0)) fail("horizon must be > 0");
    if (!(blank_shape.along_wind > 0.0 && blank_shape.cross_wind > 0.0 &&
          blank_shape.vertical > 0.0)) {
      fail("blank semi-axes must be > 0");
    }
  }
};

}  // namespace oio::plume
