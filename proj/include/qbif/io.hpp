#pragma once

// File formats: game JSON, plan JSON, diagram/trajectory CSV, atomic writes.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qbif/bifurcation.hpp"
#include "qbif/dynamics.hpp"
#include "qbif/game.hpp"
#include "qbif/mechanism.hpp"

namespace qbif::io {

/// {"A": [[a11, a12], [a21, a22]], "B": [[b11, b12], [b21, b22]]}.
/// Parse errors carry line and column; all errors are InvalidArgument.
PayoffMatrices parse_game(std::string_view text);
PayoffMatrices load_game(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// %.17g; NaN and infinities as "nan", "inf", "-inf".
std::string format_double(double v);

nlohmann::json to_json(const MechanismPlan& plan);
MechanismPlan plan_from_json(const nlohmann::json& j);

/// Columns: x, y, t_x, branch_id, principal, stable.
std::string diagram_csv(const BifurcationDiagram& diagram, const Orientation& orientation);

/// Columns: t, x, y, t_x, t_y, sw, entropy.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace qbif::io
