#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "oio/core.hpp"

namespace oio::plume {

// Axis-aligned footprint spanning the full course height.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(double x, double y, double inflate = 0.0) const {
    return x >= x_min - inflate && x <= x_max + inflate && y >= y_min - inflate &&
           y <= y_max + inflate;
  }
};

// Slab test: does the segment a->b touch the box (optionally inflated)?
inline bool segment_hits_box(Vec2 a, Vec2 b, const Box& box, double inflate = 0.0) {
  const double lo[2] = {box.x_min - inflate, box.y_min - inflate};
  const double hi[2] = {box.x_max + inflate, box.y_max + inflate};
  const double p[2] = {a.x, a.y};
  const double d[2] = {b.x - a.x, b.y - a.y};
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    } else {
      double ta = (lo[i] - p[i]) / d[i];
      double tb = (hi[i] - p[i]) / d[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

enum class Room { Room1, Room2 };

inline Room parse_room(const std::string& s) {
  if (s == "room1" || s == "Room1" || s == "1") return Room::Room1;
  if (s == "room2" || s == "Room2" || s == "2") return Room::Room2;
  throw ConfigError("unknown room '" + s + "'");
}

inline std::string to_string(Room r) { return r == Room::Room1 ? "room1" : "room2"; }

struct StartPose {
  Vec3 position{18.5, 9.0, 1.0};
  double heading_deg = 180.0;  // 0 = +x (downwind), counter-clockwise positive
};

// Floor plan: outer bounds, interior walls, obstacle blocks, takeoff pose and
// one candidate source location per room.
struct Course {
  Vec3 bounds{20.0, 10.0, 3.0};
  std::vector<Box> walls;
  std::vector<Box> obstacles;
  StartPose start{};
  Vec2 source_room1{13.0, 5.0};
  Vec2 source_room2{2.5, 5.0};
  Room source_room = Room::Room2;
  double uav_radius = 0.15;  // m, collision inflation

  Vec2 source_xy() const { return source_room == Room::Room1 ? source_room1 : source_room2; }

  bool in_bounds(double x, double y, double inflate = 0.0) const {
    return x >= inflate && x <= bounds.x - inflate && y >= inflate && y <= bounds.y - inflate;
  }

  // Free space for a UAV-sized body centred at (x, y).
  bool is_free(double x, double y) const {
    if (!in_bounds(x, y, uav_radius)) return false;
    for (const auto& b : walls)
      if (b.contains(x, y, uav_radius)) return false;
    for (const auto& b : obstacles)
      if (b.contains(x, y, uav_radius)) return false;
    return true;
  }

  // Straight move a->b is collision free for the inflated body.
  bool move_is_free(Vec2 a, Vec2 b) const {
    if (!in_bounds(b.x, b.y, uav_radius)) return false;
    for (const auto& w : walls)
      if (segment_hits_box(a, b, w, uav_radius)) return false;
    for (const auto& o : obstacles)
      if (segment_hits_box(a, b, o, uav_radius)) return false;
    return true;
  }

  // Line of sight ignores the body radius.
  bool line_of_sight(Vec2 a, Vec2 b) const {
    for (const auto& w : walls)
      if (segment_hits_box(a, b, w)) return false;
    for (const auto& o : obstacles)
      if (segment_hits_box(a, b, o)) return false;
    return true;
  }

  // Distance along the ray from `from` at `heading_deg` to the first wall,
  // obstacle or boundary, sampled at 1 cm up to `max_range`.
  double forward_range(Vec2 from, double heading_deg, double max_range = 4.0) const {
    const double c = std::cos(deg2rad(heading_deg));
    const double s = std::sin(deg2rad(heading_deg));
    constexpr double kStep = 0.01;
    for (double r = kStep; r <= max_range; r += kStep) {
      const double x = from.x + r * c, y = from.y + r * s;
      if (!in_bounds(x, y)) return r;
      for (const auto& w : walls)
        if (w.contains(x, y)) return r;
      for (const auto& o : obstacles)
        if (o.contains(x, y)) return r;
    }
    return max_range;
  }

  // Breadth-first search on a grid at `res` metres; true when the start can
  // reach the active source while staying in free space.
  bool path_exists(double res = 0.1) const {
    const int nx = static_cast<int>(std::floor(bounds.x / res));
    const int ny = static_cast<int>(std::floor(bounds.y / res));
    auto cell_free = [&](int i, int j) {
      return is_free((i + 0.5) * res, (j + 0.5) * res);
    };
    auto cell_of = [&](double v) { return static_cast<int>(std::floor(v / res)); };
    const int si = std::clamp(cell_of(start.position.x), 0, nx - 1);
    const int sj = std::clamp(cell_of(start.position.y), 0, ny - 1);
    const Vec2 src = source_xy();
    std::vector<char> seen(static_cast<std::size_t>(nx) * ny, 0);
    std::deque<std::pair<int, int>> q;
    if (!cell_free(si, sj)) return false;
    q.emplace_back(si, sj);
    seen[static_cast<std::size_t>(sj) * nx + si] = 1;
    while (!q.empty()) {
      auto [i, j] = q.front();
      q.pop_front();
      const double cx = (i + 0.5) * res, cy = (j + 0.5) * res;
      if (std::hypot(cx - src.x, cy - src.y) <= 0.5) return true;
      constexpr int kDi[4] = {1, -1, 0, 0};
      constexpr int kDj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int ni = i + kDi[d], nj = j + kDj[d];
        if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
        auto& flag = seen[static_cast<std::size_t>(nj) * nx + ni];
        if (flag || !cell_free(ni, nj)) continue;
        flag = 1;
        q.emplace_back(ni, nj);
      }
    }
    return false;
  }

  void validate() const {
    if (!(bounds.x > 0.0 && bounds.y > 0.0 && bounds.z > 0.0)) {
      throw ConfigError("course: bounds must be positive");
    }
    if (!is_free(start.position.x, start.position.y)) {
      throw ConfigError("course: start pose is not in free space");
    }
    const Vec2 src = source_xy();
    if (!in_bounds(src.x, src.y)) throw ConfigError("course: source outside bounds");
    if (!path_exists()) throw ConfigError("course: no free-space path from start to source");
  }
};

// The default 200 m^2 two-room course: a 20 m x 10 m floor split by a wall at
// x = 10 m with a 2 m doorway, five 1 m square obstacles, takeoff at the far
// end of Room 1. Wind flows +x, from Room 2 towards the takeoff point.
inline Course default_course() {
  Course c;
  c.walls = {
      Box{9.9, 0.0, 10.1, 4.0},
      Box{9.9, 6.0, 10.1, 10.0},
  };
  c.obstacles = {
      Box{5.5, 0.5, 6.5, 1.5},
      Box{5.5, 8.5, 6.5, 9.5},
      Box{15.0, 0.5, 16.0, 1.5},
      Box{12.0, 8.0, 13.0, 9.0},
      Box{1.0, 8.0, 2.0, 9.0},
  };
  return c;
}

}  // namespace oio::plume
