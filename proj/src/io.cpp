#include "qbif/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbif/error.hpp"

namespace qbif::io {

using nlohmann::json;

namespace {

Matrix2 parse_matrix(const json& j, const char* name) {
  if (!j.contains(name)) throw InvalidArgument(std::string("game file: missing key \"") + name + "\"");
  const json& m = j.at(name);
  if (!m.is_array() || m.size() != 2)
    throw InvalidArgument(std::string("game file: \"") + name + "\" must be a 2x2 array");
  Matrix2 out{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (!m[i].is_array() || m[i].size() != 2)
      throw InvalidArgument(std::string("game file: \"") + name + "\" must be a 2x2 array");
    for (std::size_t k = 0; k < 2; ++k) {
      if (!m[i][k].is_number())
        throw InvalidArgument(std::string("game file: \"") + name + "\" entries must be numbers");
      out[i][k] = m[i][k].get<double>();
    }
  }
  return out;
}

json profile_json(StrategyProfile p) { return {{"x", p.x}, {"y", p.y}}; }

StrategyProfile profile_from(const json& j) { return {j.at("x").get<double>(), j.at("y").get<double>()}; }

}  // namespace

PayoffMatrices parse_game(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("game file: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("game file: top level must be an object");
  PayoffMatrices g;
  g.A = parse_matrix(j, "A");
  g.B = parse_matrix(j, "B");
  g.validate();
  return g;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PayoffMatrices load_game(const std::filesystem::path& path) { return parse_game(read_file(path)); }

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalConsistency("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const MechanismPlan& plan) {
  json phases = json::array();
  for (const auto& p : plan.schedule.phases)
    phases.push_back({{"which", to_string(p.which)}, {"target", p.target}, {"label", p.label}});
  return {
      {"kind", to_string(plan.kind)},
      {"case_id", to_string(plan.case_id)},
      {"target_state", profile_json(plan.target_state)},
      {"offset_target", profile_json(plan.offset_target)},
      {"initial_state", profile_json(plan.initial_state)},
      {"initial", {{"t_x", plan.schedule.initial.t_x}, {"t_y", plan.schedule.initial.t_y}}},
      {"phases", phases},
      {"expected_sw", plan.expected_sw},
      {"best_ne_sw", plan.best_ne_sw},
      {"improved_expected", plan.improved_expected},
  };
}

MechanismPlan plan_from_json(const json& j) {
  try {
    MechanismPlan plan;
    plan.kind = mechanism_kind_from_string(j.at("kind").get<std::string>());
    plan.case_id = case_id_from_string(j.at("case_id").get<std::string>());
    plan.target_state = profile_from(j.at("target_state"));
    plan.offset_target = j.contains("offset_target") ? profile_from(j.at("offset_target")) : plan.target_state;
    if (j.contains("initial_state")) plan.initial_state = profile_from(j.at("initial_state"));
    const json& init = j.at("initial");
    plan.schedule.initial = {init.at("t_x").get<double>(), init.at("t_y").get<double>()};
    for (const json& p : j.at("phases"))
      plan.schedule.phases.push_back(
          {which_from_string(p.at("which").get<std::string>()), p.at("target").get<double>(),
           p.value("label", std::string{})});
    plan.expected_sw = j.at("expected_sw").get<double>();
    plan.best_ne_sw = j.at("best_ne_sw").get<double>();
    plan.improved_expected = j.value("improved_expected", plan.expected_sw > plan.best_ne_sw);
    plan.schedule.validate();
    return plan;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("plan file: ") + e.what());
  }
}

std::string diagram_csv(const BifurcationDiagram& diagram, const Orientation& o) {
  std::string out = "x,y,t_x,branch_id,principal,stable\n";
  for (std::size_t b = 0; b < diagram.branches.size(); ++b) {
    const BranchCurve& br = diagram.branches[b];
    for (const SecondFormSample& s : br.samples) {
      const StrategyProfile p = o.to_original({s.x, s.y_ii});
      const bool stable = slope_stability(s.dT_dx, s.u) == Stability::Stable;
      out += format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(s.t_x_ii) + ',' +
             std::to_string(b) + ',' + (br.is_principal ? '1' : '0') + ',' + (stable ? '1' : '0') + '\n';
    }
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,y,t_x,t_y,sw,entropy\n";
  for (const TrajectoryRow& r : traj.rows) {
    out += format_double(r.t) + ',' + format_double(r.x) + ',' + format_double(r.y) + ',' + format_double(r.t_x) +
           ',' + format_double(r.t_y) + ',' + format_double(r.sw) + ',' + format_double(r.entropy) + '\n';
  }
  return out;
}

}  // namespace qbif::io
