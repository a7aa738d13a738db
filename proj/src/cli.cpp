#include "qbif/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "qbif/bifurcation.hpp"
#include "qbif/dynamics.hpp"
#include "qbif/error.hpp"
#include "qbif/game.hpp"
#include "qbif/io.hpp"
#include "qbif/mechanism.hpp"
#include "qbif/parallel.hpp"
#include "qbif/qre.hpp"

#ifndef QBIF_VERSION
#define QBIF_VERSION "0.0.0"
#endif

namespace qbif::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string game_file;
  std::string out;
  std::string manifest;

  // diagram
  std::vector<double> ty_list;
  int grid = 2048;

  // qre / simulate / plan
  std::optional<double> tx;
  std::optional<double> ty;
  int qre_grid = 4096;

  // plan
  std::string mechanism;
  double delta = 0.01;
  bool on_principal = false;

  // simulate
  std::string plan_file;
  std::string init;
  std::uint64_t seed = 0;
  bool discrete = false;
  double alpha = 0.01;
  long horizon = -1;
  IntegratorConfig integrator;
};

json profile_json(StrategyProfile p) { return {{"x", p.x}, {"y", p.y}}; }

StrategyProfile parse_profile(const std::string& text) {
  std::istringstream in(text);
  StrategyProfile p;
  char comma = 0;
  if (!(in >> p.x >> comma >> p.y) || comma != ',' || !(in >> std::ws).eof())
    throw InvalidArgument("--init expects x,y");
  if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0))
    throw InvalidArgument("--init must be an interior profile with 0 < x, y < 1");
  return p;
}

// Runs share one manifest layout; floats in JSON use the shortest
// round-trip representation.
class Run {
 public:
  Run(std::string command, const Options& opt, std::ostream& out)
      : command_(std::move(command)), opt_(opt), out_(out) {}

  PayoffMatrices load_game() {
    const std::string text = io::read_file(opt_.game_file);
    digest_ = io::sha256_hex(text);
    return io::parse_game(text);
  }

  void write(const fs::path& path, const std::string& content) {
    io::write_atomic(path, content);
    outputs_.push_back(path.string());
  }

  void param(const std::string& key, json value) { params_[key] = std::move(value); }

  void finish() {
    fs::path path;
    if (!opt_.manifest.empty())
      path = opt_.manifest;
    else if (!opt_.out.empty())
      path = opt_.out + ".manifest.json";
    else
      path = "qbif-" + command_ + ".manifest.json";
    const json m = {{"command", command_},
                    {"input", opt_.game_file},
                    {"input_sha256", digest_},
                    {"params", params_},
                    {"version", QBIF_VERSION},
                    {"outputs", outputs_}};
    io::write_atomic(path, m.dump(2) + "\n");
  }

  std::ostream& out() { return out_; }

 private:
  std::string command_;
  const Options& opt_;
  std::ostream& out_;
  std::string digest_;
  json params_ = json::object();
  json outputs_ = json::array();
};

json thresholds_json(const ThresholdTemps& t) {
  // NaN serializes as null.
  return {{"t_i", t.t_i}, {"t_b", t.t_b}, {"t_a", t.t_a}, {"degenerate", t.degenerate}};
}

int cmd_analyze(const Options& opt, std::ostream& out) {
  Run run("analyze", opt, out);
  const PayoffMatrices game = run.load_game();
  const DiagonalForm d = diagonal_form(game);
  const Classification cls = classify(d);
  const Orientation& o = d.orientation;

  json report;
  report["diagonal"] = {{"a_x", d.a_x}, {"b_x", d.b_x}, {"a_y", d.a_y}, {"b_y", d.b_y},
                        {"swap_x", o.swap_x}, {"swap_y", o.swap_y}, {"doubly_degenerate", d.doubly_degenerate()}};
  report["class"] = std::string(to_string(cls.tag));
  report["strict_coordination"] = cls.strict_coordination;

  const auto ne = pure_nash(game);
  json ne_json = json::array();
  for (const auto& p : ne) ne_json.push_back({{"x", p.x}, {"y", p.y}, {"sw", social_welfare(game, p)}});
  report["pure_nash"] = ne_json;
  const auto mixed = mixed_nash(d);
  report["mixed_nash"] = mixed ? profile_json(o.to_original(*mixed)) : json(nullptr);

  const WelfareOptimum so = max_welfare(game);
  report["social_optimum"] = {{"x", so.profile.x}, {"y", so.profile.y}, {"sw", so.welfare}};
  json table = json::array();
  for (StrategyProfile c : {StrategyProfile{1, 1}, StrategyProfile{1, 0}, StrategyProfile{0, 1}, StrategyProfile{0, 0}})
    table.push_back({{"x", c.x}, {"y", c.y}, {"sw", social_welfare(game, c)}});
  report["welfare"] = table;

  std::string warning;
  if (ne.empty()) {
    report["poa"] = report["pos"] = nullptr;
    warning = "no pure equilibrium";
  } else {
    try {
      const Efficiency e = poa_pos(game, ne);
      report["poa"] = e.poa;
      report["pos"] = e.pos;
    } catch (const UndefinedRatio& ex) {
      report["poa"] = report["pos"] = nullptr;
      warning = ex.what();
    }
  }
  if (!warning.empty()) report["efficiency_warning"] = warning;
  report["thresholds"] = thresholds_json(threshold_temps(d));

  out << "diagonal form  a_x=" << d.a_x << " b_x=" << d.b_x << " a_y=" << d.a_y << " b_y=" << d.b_y;
  if (o.swap_x || o.swap_y) out << "  (relabeled:" << (o.swap_x ? " player 1" : "") << (o.swap_y ? " player 2" : "") << ")";
  out << "\nclass          " << to_string(cls.tag) << (cls.strict_coordination ? " (all diagonal values positive)" : "")
      << "\npure NE       ";
  for (const auto& p : ne) out << " (" << p.x << "," << p.y << ") sw=" << social_welfare(game, p);
  if (ne.empty()) out << " none";
  out << "\nmixed NE       ";
  if (mixed) {
    const StrategyProfile m = o.to_original(*mixed);
    out << "(" << m.x << "," << m.y << ")";
  } else {
    out << "none";
  }
  out << "\nsocial optimum (" << so.profile.x << "," << so.profile.y << ") sw=" << so.welfare << "\n";
  if (warning.empty())
    out << "PoA=" << report["poa"].get<double>() << " PoS=" << report["pos"].get<double>() << "\n";
  else
    out << "warning: " << warning << "\n";

  if (!opt.out.empty()) run.write(opt.out, report.dump(2) + "\n");
  run.finish();
  return kOk;
}

fs::path diagram_path(const fs::path& base, std::size_t i, std::size_t n) {
  if (n == 1) return base;
  fs::path p = base;
  p.replace_filename(base.stem().string() + "_ty" + std::to_string(i) + base.extension().string());
  return p;
}

int cmd_diagram(const Options& opt, std::ostream& out) {
  if (opt.ty_list.empty()) throw InvalidArgument("diagram: at least one --ty is required");
  for (double t : opt.ty_list) TemperaturePair{kMinTemperature, t}.validate();
  if (opt.grid < 256) throw InvalidArgument("--grid must be at least 256");
  Run run("diagram", opt, out);
  const PayoffMatrices game = run.load_game();
  const DiagonalForm d = diagonal_form(game);

  std::vector<BifurcationDiagram> diagrams(opt.ty_list.size());
  parallel_for(diagrams.size(), [&](std::size_t i) { diagrams[i] = trace_diagram(d, opt.ty_list[i], opt.grid); });

  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    const BifurcationDiagram& bd = diagrams[i];
    const fs::path csv = diagram_path(opt.out, i, diagrams.size());
    run.write(csv, io::diagram_csv(bd, d.orientation));

    json branches = json::array();
    for (std::size_t b = 0; b < bd.branches.size(); ++b) {
      const BranchCurve& br = bd.branches[b];
      json segs = json::array();
      for (const Interval& s : br.stable_segments) segs.push_back({s.lo, s.hi});
      branches.push_back({{"branch_id", b},
                          {"side", br.side == Side::LeftOfHalf ? "left" : "right"},
                          {"principal", br.is_principal},
                          {"samples", br.samples.size()},
                          {"stable_segments_normalized_x", segs}});
    }
    const json side = {{"t_y", bd.t_y},
                       {"thresholds", thresholds_json(bd.thresholds)},
                       {"critical_temp", bd.critical_temp ? json(*bd.critical_temp) : json(nullptr)},
                       {"swap_x", d.orientation.swap_x},
                       {"swap_y", d.orientation.swap_y},
                       {"branches", branches}};
    fs::path sidecar = csv;
    sidecar.replace_extension(".json");
    run.write(sidecar, side.dump(2) + "\n");
    out << "T_y=" << bd.t_y << ": " << bd.branches.size() << " branch(es), critical T_x = "
        << (bd.critical_temp ? io::format_double(*bd.critical_temp) : std::string("n/a")) << " -> " << csv.string()
        << "\n";
  }
  run.param("ty", opt.ty_list);
  run.param("grid", opt.grid);
  run.finish();
  return kOk;
}

int cmd_qre(const Options& opt, std::ostream& out) {
  if (!opt.tx || !opt.ty) throw InvalidArgument("qre: --tx and --ty are required");
  const TemperaturePair temps{*opt.tx, *opt.ty};
  temps.validate();
  Run run("qre", opt, out);
  const PayoffMatrices game = run.load_game();
  const DiagonalForm d = diagonal_form(game);
  std::vector<QrePoint> pts = enumerate_qre(d, temps, opt.qre_grid);
  for (auto& q : pts) {
    const StrategyProfile p = d.orientation.to_original({q.x, q.y});
    q.x = p.x;
    q.y = p.y;
  }
  std::sort(pts.begin(), pts.end(), [](const QrePoint& a, const QrePoint& b) { return a.x < b.x; });
  json list = json::array();
  for (const auto& q : pts)
    list.push_back({{"x", q.x}, {"y", q.y}, {"t_x", q.t_x}, {"t_y", q.t_y}, {"stability", to_string(q.stability)}});
  const std::string text = list.dump(2) + "\n";
  if (opt.out.empty())
    out << text;
  else
    run.write(opt.out, text);
  run.param("tx", temps.t_x);
  run.param("ty", temps.t_y);
  run.param("grid", opt.qre_grid);
  run.finish();
  return kOk;
}

int cmd_plan(const Options& opt, std::ostream& out) {
  Run run("plan", opt, out);
  const PayoffMatrices game = run.load_game();
  MechanismPlan plan;
  if (opt.mechanism == "hysteresis") {
    HysteresisOptions h;
    if (opt.tx.has_value() != opt.ty.has_value()) throw InvalidArgument("plan: give both --tx and --ty or neither");
    if (opt.tx) h.initial = TemperaturePair{*opt.tx, *opt.ty};
    plan = plan_hysteresis(game, h);
  } else if (opt.mechanism == "optimal") {
    OptimalControlOptions o;
    o.delta = opt.delta;
    o.init_on_principal = opt.on_principal;
    plan = plan_optimal_control(game, o);
  } else {
    throw InvalidArgument("--mechanism must be hysteresis or optimal");
  }
  const std::string text = io::to_json(plan).dump(2) + "\n";
  if (opt.out.empty())
    out << text;
  else
    run.write(opt.out, text);
  run.param("mechanism", opt.mechanism);
  if (opt.tx) run.param("tx", *opt.tx);
  if (opt.ty) run.param("ty", *opt.ty);
  run.param("delta", opt.delta);
  run.param("on_principal", opt.on_principal);
  run.finish();
  return kOk;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  if (opt.out.empty()) throw InvalidArgument("simulate: --out is required");
  opt.integrator.validate();
  Run run("simulate", opt, out);
  const PayoffMatrices game = run.load_game();
  const DiagonalForm d = diagonal_form(game);

  json report;
  Trajectory traj;
  std::optional<MechanismPlan> plan;
  if (!opt.plan_file.empty()) {
    if (opt.discrete) throw InvalidArgument("simulate: --discrete cannot run a plan");
    if (opt.tx || opt.ty) throw InvalidArgument("simulate: --plan and --tx/--ty are exclusive");
    json j;
    try {
      j = json::parse(io::read_file(opt.plan_file));
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("plan file: ") + e.what());
    }
    plan = io::plan_from_json(j);
  } else if (!opt.tx || !opt.ty) {
    throw InvalidArgument("simulate: give --plan or both --tx and --ty");
  }

  StrategyProfile init;
  if (!opt.init.empty())
    init = parse_profile(opt.init);
  else if (plan)
    init = plan->initial_state;
  else
    throw InvalidArgument("simulate: --init is required without a plan");

  if (plan) {
    ExecutionReport rep = execute(*plan, game, init, opt.integrator);
    traj = std::move(rep.trajectory);
    json ends = json::array();
    for (const auto& e : rep.phase_endpoints)
      ends.push_back({{"label", e.label}, {"x", e.state.x}, {"y", e.state.y}, {"t_x", e.temps.t_x}, {"t_y", e.temps.t_y}});
    report["case_id"] = to_string(plan->case_id);
    report["improved"] = rep.improved;
    report["best_ne_sw"] = plan->best_ne_sw;
    report["phase_endpoints"] = ends;
  } else {
    const TemperaturePair temps{*opt.tx, *opt.ty};
    temps.validate();
    if (opt.discrete) {
      DiscreteAgentConfig cfg;
      cfg.alpha = opt.alpha;
      cfg.seed = opt.seed;
      cfg.horizon = opt.horizon >= 0 ? opt.horizon : static_cast<long>(std::ceil(10.0 * temps.t_x / opt.alpha));
      cfg.initial_q = {initial_q(init.x, temps.t_x), initial_q(init.y, temps.t_y)};
      traj = simulate_discrete_q(game, temps, cfg);
      report["alpha"] = cfg.alpha;
      report["horizon"] = cfg.horizon;
    } else {
      traj = to_original(integrate(d, d.orientation.to_normalized(init), temps, opt.integrator), game, d.orientation);
    }
  }

  const StrategyProfile fin = traj.final_state();
  report["converged"] = traj.converged;
  report["final_residual"] = opt.discrete ? json(nullptr) : json(traj.final_residual);
  report["final_state"] = profile_json(fin);
  report["final_sw"] = social_welfare(game, fin);
  report["rows"] = traj.rows.size();

  run.write(opt.out, io::trajectory_csv(traj));
  fs::path sidecar = opt.out;
  sidecar.replace_extension(".json");
  run.write(sidecar, report.dump(2) + "\n");

  out << "final state (" << fin.x << ", " << fin.y << ") sw=" << social_welfare(game, fin);
  if (!opt.discrete) out << (traj.converged ? " converged" : " NOT converged");
  if (report.contains("improved")) out << (report["improved"].get<bool>() ? ", improved" : ", not improved");
  out << "\n";

  if (!opt.plan_file.empty()) run.param("plan", opt.plan_file);
  if (opt.tx) run.param("tx", *opt.tx);
  if (opt.ty) run.param("ty", *opt.ty);
  run.param("init", profile_json(init));
  run.param("discrete", opt.discrete);
  if (opt.discrete) {
    run.param("alpha", opt.alpha);
    run.param("seed", opt.seed);
  }
  run.param("step", opt.integrator.step);
  run.param("max_time", opt.integrator.max_time);
  run.param("record_every", opt.integrator.record_every);
  run.finish();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantal response equilibria, bifurcations and temperature mechanisms for 2x2 games", "qbif"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QBIF_VERSION);
  Options opt;

  const auto common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("game", opt.game_file, "Game JSON file")->required()->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", opt.out, "Output file");
    if (out_required) o->required();
    sub->add_option("--manifest", opt.manifest, "Manifest path (default <out>.manifest.json)");
  };

  auto* analyze = app.add_subcommand("analyze", "Diagonal form, equilibria, welfare and thresholds");
  common(analyze, false);

  auto* diagram = app.add_subcommand("diagram", "Trace the bifurcation diagram at fixed T_y");
  common(diagram, true);
  diagram->add_option("--ty", opt.ty_list, "Player 2 temperature (repeatable)")->required();
  diagram->add_option("--grid", opt.grid, "Samples per side");

  auto* qre = app.add_subcommand("qre", "Enumerate QREs at fixed temperatures");
  common(qre, false);
  qre->add_option("--tx", opt.tx)->required();
  qre->add_option("--ty", opt.ty)->required();
  qre->add_option("--grid", opt.qre_grid, "Scan resolution");

  auto* plan = app.add_subcommand("plan", "Plan a temperature mechanism");
  common(plan, false);
  plan->add_option("--mechanism", opt.mechanism)->required()->check(CLI::IsMember({"hysteresis", "optimal"}));
  plan->add_option("--tx", opt.tx, "Initial T_x (hysteresis)");
  plan->add_option("--ty", opt.ty, "Initial T_y (hysteresis)");
  plan->add_option("--delta", opt.delta, "Target offset (optimal)");
  plan->add_flag("--on-principal", opt.on_principal, "Start lies on the principal branch (optimal, cases A3/A4)");

  auto* sim = app.add_subcommand("simulate", "Integrate the dynamics or execute a plan");
  common(sim, true);
  sim->add_option("--plan", opt.plan_file, "Plan JSON from `qbif plan`");
  sim->add_option("--tx", opt.tx);
  sim->add_option("--ty", opt.ty);
  sim->add_option("--init", opt.init, "Initial profile x,y");
  sim->add_option("--seed", opt.seed);
  sim->add_flag("--discrete", opt.discrete, "Run discrete Q-learning agents");
  sim->add_option("--alpha", opt.alpha, "Q-learning step size (discrete)");
  sim->add_option("--horizon", opt.horizon, "Rounds (discrete; default covers 10 time units)");
  sim->add_option("--step", opt.integrator.step, "Integrator step");
  sim->add_option("--max-time", opt.integrator.max_time);
  sim->add_option("--record-every", opt.integrator.record_every);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze) return cmd_analyze(opt, out);
    if (*diagram) return cmd_diagram(opt, out);
    if (*qre) return cmd_qre(opt, out);
    if (*plan) return cmd_plan(opt, out);
    if (*sim) return cmd_simulate(opt, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedCase& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ScheduleStalled& e) {
    err << "stalled: " << e.what() << "\n";
    return kStalled;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kFailure;
  }
  return kInputError;
}

}  // namespace qbif::cli
