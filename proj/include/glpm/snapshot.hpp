#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "glpm/grid.hpp"

namespace glpm {

// Field snapshots: <prefix>.f64 holds the cell values as little-endian
// 64-bit reals (axis 0 fastest), <prefix>.json the header with shape,
// spacing, origin and any run parameters passed in `extra`.
void save_snapshot(const Field& u, const std::string& prefix,
                   const nlohmann::json& extra = nlohmann::json::object());
std::pair<Field, nlohmann::json> load_snapshot(const std::string& prefix_or_json);

// Plot-friendly CSV: "x,u" rows in 1-D, "x,y,u" in 2-D. For 3-D fields a
// mid-plane slice along the last axis is written.
void export_field_csv(const Field& u, const std::string& path);

} // namespace glpm
