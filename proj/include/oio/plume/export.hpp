#pragma once

#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "oio/plume/field.hpp"

namespace oio::plume {

// Horizontal slices of the field at height z and time t, one row per cell
// centre: x,y,value.
template <class CellValue>
void write_grid(std::ostream& out, const PlumeField& field, double res, const char* value_name,
                CellValue&& value) {
  if (!(res > 0.0)) throw std::domain_error("grid export: resolution must be > 0");
  const Vec3& b = field.config().bounds;
  out << "x,y," << value_name << '\n' << std::setprecision(17);
  for (double y = 0.5 * res; y < b.y; y += res) {
    for (double x = 0.5 * res; x < b.x; x += res) out << x << ',' << y << ',' << value(x, y) << '\n';
  }
}

inline void write_concentration_grid(std::ostream& out, const PlumeField& field, double t, double z,
                                     double res = 0.25) {
  write_grid(out, field, res, "concentration",
             [&](double x, double y) { return field.concentration_at({x, y, z}, t); });
}

inline void write_blank_grid(std::ostream& out, const PlumeField& field, double t, double z,
                             double res = 0.25) {
  write_grid(out, field, res, "blank",
             [&](double x, double y) { return field.blanks().masked({x, y, z}, t) ? 1 : 0; });
}

}  // namespace oio::plume
