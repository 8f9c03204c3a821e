#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dexp/csv.hpp"
#include "dexp/equilibrium.hpp"
#include "dexp/montecarlo.hpp"
#include "dexp/numeric.hpp"
#include "dexp/oracle_suite.hpp"
#include "dexp/policy.hpp"
#include "dexp/presets.hpp"
#include "dexp/team.hpp"
#include "dexp/welfare.hpp"

#ifndef DEXP_VERSION
#define DEXP_VERSION "0.0.0"
#endif

namespace dexp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version() { return DEXP_VERSION; }

namespace {

// Values that may come from flags, a config file or --from-json. Flags win.
struct Layer {
  std::optional<double> gamma, beta, tau0, taueps, tauS, muS, theta, delta;
  std::optional<std::string> regime;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> points;
};

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::InvalidInput, fmt::format("config key '{}': '{}' is not a number", key, text));
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v < 0.0 || v != std::floor(v)) {
    throw Error(ErrorCode::InvalidInput, fmt::format("config key '{}': '{}' is not a count", key, text));
  }
  return static_cast<std::uint64_t>(v);
}

Layer config_layer(const std::string& path) {
  Layer l;
  for (const auto& [k, v] : read_config(path)) {
    if (k == "gamma") l.gamma = parse_double(k, v);
    else if (k == "beta") l.beta = parse_double(k, v);
    else if (k == "tau0") l.tau0 = parse_double(k, v);
    else if (k == "taueps") l.taueps = parse_double(k, v);
    else if (k == "tauS") l.tauS = parse_double(k, v);
    else if (k == "muS") l.muS = parse_double(k, v);
    else if (k == "theta") l.theta = parse_double(k, v);
    else if (k == "delta") l.delta = parse_double(k, v);
    else if (k == "regime") l.regime = v;
    else if (k == "seed") l.seed = parse_count(k, v);
    else if (k == "points") l.points = parse_count(k, v);
    else throw Error(ErrorCode::InvalidInput, fmt::format("config: unknown key '{}'", k));
  }
  return l;
}

void apply(const Layer& l, Options& o) {
  if (l.gamma) o.params.gamma = *l.gamma;
  if (l.beta) o.params.beta = *l.beta;
  if (l.tau0) o.params.tau0 = *l.tau0;
  if (l.taueps) o.params.tau_eps = *l.taueps;
  if (l.tauS) o.params.tau_s = *l.tauS;
  if (l.muS) o.params.mu_s = *l.muS;
  if (l.theta) o.bias.theta = *l.theta;
  if (l.delta) o.tax.delta = *l.delta;
  if (l.regime) o.tax.regime = parse_regime(*l.regime);
  if (l.seed) o.seed = *l.seed;
  if (l.points) o.points = *l.points;
}

json params_json(const MarketParams& p) {
  return {{"gamma", p.gamma}, {"beta", p.beta}, {"tau0", p.tau0},
          {"taueps", p.tau_eps}, {"tauS", p.tau_s}, {"muS", p.mu_s}};
}

MarketParams params_from(const json& j) {
  MarketParams p;
  p.gamma = j.at("gamma").get<double>();
  p.beta = j.at("beta").get<double>();
  p.tau0 = j.at("tau0").get<double>();
  p.tau_eps = j.at("taueps").get<double>();
  p.tau_s = j.at("tauS").get<double>();
  p.mu_s = j.value("muS", 0.0);
  return p;
}

// Serialises NaN and inf as null so the output stays valid JSON.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt_num(double x) { return csv::format(x); }

void print_table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& [k, v] : rows) out << fmt::format("{:<{}}  {}\n", k, w, v);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidInput, fmt::format("cannot write {}", path.string()));
  f << text;
}

// Writes each (name, contents) pair under out_dir plus <stem>.manifest.json.
void emit(const Options& o, const std::string& stem, const std::vector<std::pair<std::string, std::string>>& files,
          std::vector<std::string> notes, std::ostream& err) {
  fs::create_directories(o.out_dir);
  RunManifest m;
  m.version = version();
  m.options = o;
  m.notes = std::move(notes);
  for (const auto& [name, text] : files) {
    write_file(fs::path(o.out_dir) / name, text);
    m.outputs.push_back(name);
  }
  const auto mpath = fs::path(o.out_dir) / (stem + ".manifest.json");
  write_file(mpath, to_json(m).dump(2) + "\n");
  for (const auto& name : m.outputs) err << "wrote " << (fs::path(o.out_dir) / name).string() << "\n";
  err << "wrote " << mpath.string() << "\n";
}

void require_model(const Options& o) {
  require_valid(o.params, o.bias, o.tax);
  auto s = validate(o.settings);
  if (!s.ok()) throw Error(ErrorCode::InvalidInput, s.message());
}

json solve_json(const Options& o) {
  auto eq = equilibrium(o.params, o.bias, o.tax, o.settings);
  auto ps = price_stats(eq);
  json j;
  j["params"] = params_json(o.params);
  j["theta"] = o.bias.theta;
  j["delta"] = o.tax.delta;
  j["regime"] = std::string(to_string(o.tax.regime));
  j["equilibrium"] = {{"a", eq.a},         {"alpha", eq.alpha}, {"eta", eq.eta},     {"eta_p", eq.eta_p},
                      {"tau", eq.tau},     {"A", eq.A},         {"B", eq.B},         {"C", eq.C},
                      {"kappa", eq.kappa}, {"var_p", ps.var_p}, {"residual", eq.residual}};
  if (o.tax.delta == 0.0) {
    auto w = welfare_loss(eq);
    j["welfare"] = {{"wl_total", w.wl_total}, {"wl_bayes", w.wl_bayes}, {"wl_diag", w.wl_diag}};
  } else {
    j["welfare"] = {{"wl_total", welfare_loss_tax(eq)}, {"wl_bayes", nullptr}, {"wl_diag", nullptr}};
  }
  return j;
}

int cmd_solve(const Options& o, std::ostream& out) {
  require_model(o);
  const json j = solve_json(o);
  if (o.json) {
    out << j.dump(2) << "\n";
    return kOk;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto* key : {"a", "alpha", "eta", "eta_p", "tau", "A", "B", "C", "kappa", "var_p"}) {
    rows.emplace_back(key, fmt_num(j["equilibrium"][key].get<double>()));
  }
  for (const auto* key : {"wl_total", "wl_bayes", "wl_diag"}) {
    const auto& v = j["welfare"][key];
    rows.emplace_back(key, v.is_null() ? "-" : fmt_num(v.get<double>()));
  }
  print_table(out, rows);
  return kOk;
}

int cmd_sweep(Options o, std::ostream& out, std::ostream& err) {
  require_model(o);
  const bool theta_axis = o.axis == "theta";
  if (!o.range_given) {
    if (theta_axis) {
      o.lo = -0.5;
      o.hi = 1.5;
    } else {
      const auto r = tax_search_range(o.params, o.tax.regime);
      o.lo = r.first;
      o.hi = std::min(r.second, 2.0 * o.params.gamma);
    }
  }
  if (o.points == 0) o.points = 101;
  if (o.points < 2 || !(o.lo < o.hi)) throw Error(ErrorCode::InvalidInput, "sweep needs lo < hi and points >= 2");
  const auto grid = numeric::linspace(o.lo, o.hi, o.points);
  auto table = sweep(o.params, theta_axis ? SweepAxis::Theta : SweepAxis::Delta, grid, o.bias, o.tax, o.settings);
  const std::string text = table.to_csv();
  if (o.out_dir.empty()) {
    out << text;
  } else {
    emit(o, "sweep", {{"sweep.csv", text}}, {}, err);
  }
  return kOk;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  require_model(o);
  auto bal = externality_balance(o.params, o.settings);
  const double tp = threshold_theta_private(o.params, o.settings);
  const double tpp = threshold_theta_public(o.params, o.settings);
  std::optional<double> ds;
  std::string ds_note;
  try {
    ds = threshold_delta_star(o.params, o.bias, o.tax.regime, o.settings);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
    ds_note = "infeasible";
  }
  if (o.json) {
    json j = {{"params", params_json(o.params)},
              {"theta", o.bias.theta},
              {"regime", std::string(to_string(o.tax.regime))},
              {"a_star", bal.a_star},
              {"a_team", bal.a_team},
              {"balance", std::string(to_string(bal.balance))},
              {"theta_prime", tp},
              {"theta_dprime", tpp},
              {"delta_star", ds ? json(*ds) : json(nullptr)}};
    out << j.dump(2) << "\n";
    return kOk;
  }
  print_table(out, {{"a_star", fmt_num(bal.a_star)},
                    {"a_team", fmt_num(bal.a_team)},
                    {"balance", std::string(to_string(bal.balance))},
                    {"theta_prime", fmt_num(tp)},
                    {"theta_dprime", fmt_num(tpp)},
                    {"delta_star", ds ? fmt_num(*ds) : ds_note}});
  return kOk;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  require_model(o);
  auto th = optimal_theta(o.params, o.settings);
  auto tx = optimal_tax(o.params, o.bias, o.tax.regime, o.settings);
  if (o.json) {
    json j = {{"params", params_json(o.params)},
              {"theta_opt", {{"theta", th.theta},
                             {"wl", th.wl},
                             {"theta_lower", th.theta_lower},
                             {"theta_upper", th.theta_upper},
                             {"at_boundary", th.at_boundary},
                             {"local_minima", th.local_minima}}},
              {"tax_opt", {{"theta", o.bias.theta},
                           {"regime", std::string(to_string(o.tax.regime))},
                           {"delta", tx.delta},
                           {"wl", tx.wl},
                           {"lower_bound", tx.lower_bound},
                           {"upper_bound", tx.upper_bound},
                           {"at_lower", tx.at_lower},
                           {"at_upper", tx.at_upper}}}};
    out << j.dump(2) << "\n";
    return kOk;
  }
  auto flag = [](bool lo, bool hi) { return lo ? std::string(" (lower bound)") : hi ? std::string(" (upper bound)") : ""; };
  print_table(out, {{"theta_opt", fmt_num(th.theta) + (th.at_boundary ? " (boundary)" : "")},
                    {"wl_at_theta_opt", fmt_num(th.wl)},
                    {"theta_lower", fmt_num(th.theta_lower)},
                    {"theta_upper", fmt_num(th.theta_upper)},
                    {"delta_opt", fmt_num(tx.delta) + flag(tx.at_lower, tx.at_upper)},
                    {"wl_at_delta_opt", fmt_num(tx.wl)}});
  return kOk;
}

int cmd_figure(Options o, std::ostream& err) {
  const auto& spec = presets::figure(o.figure);
  if (o.points == 0) o.points = spec.default_points;
  if (o.points < 2) throw Error(ErrorCode::InvalidInput, "figure needs points >= 2");
  if (o.out_dir.empty()) o.out_dir = ".";
  const std::string text = presets::figure_csv(spec.name, o.points, o.settings);
  std::vector<std::string> notes{"preset parameters use muS = 0"};
  if (spec.name == "fig3") {
    notes.emplace_back("case1 = fig1a parameters, case2 = fig1b parameters, both-sides tax");
  } else {
    const auto p = spec.name == "fig1a" ? presets::case1() : presets::case2();
    // the preset, not the flags, defines the figure economy
    o.params = p;
  }
  emit(o, spec.name, {{spec.name + ".csv", text}}, std::move(notes), err);
  return kOk;
}

SimConfig sim_config(const Options& o) {
  SimConfig c;
  c.n_agents = o.agents;
  c.n_reps = o.reps;
  c.seed = o.seed;
  c.antithetic = o.antithetic;
  c.threads = o.threads;
  if (o.sampling == "sufficient") c.sampling = Sampling::SufficientStatistics;
  else if (o.sampling == "agents") c.sampling = Sampling::PerAgent;
  else throw Error(ErrorCode::InvalidInput, "sampling must be 'sufficient' or 'agents'");
  auto r = validate(c);
  if (!r.ok()) throw Error(ErrorCode::InvalidInput, r.message());
  return c;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  require_model(o);
  const auto cfg = sim_config(o);
  auto eq = equilibrium(o.params, o.bias, o.tax, o.settings);
  auto sim = simulate_market(eq, cfg);
  const double wl = o.tax.delta == 0.0 ? welfare_loss(eq).wl_total : welfare_loss_tax(eq);
  auto reg = mc_price_regression(sim);
  auto kap = mc_posterior_check(sim, eq);
  auto ps = price_stats(eq);

  auto row = [](const std::string& name, double analytic, const Estimate& e) {
    return json{{"name", name},
                {"analytic", analytic},
                {"estimate", e.estimate},
                {"standard_error", e.standard_error},
                {"z", num((e.estimate - analytic) / e.standard_error)}};
  };
  json checks = json::array({row("wl", wl, sim.summary.loss), row("var_p", ps.var_p, sim.summary.var_p),
                             row("kappa", eq.kappa, kap), row("A", eq.A, reg.A), row("B", eq.B, reg.B),
                             row("C", eq.C, reg.C)});
  json summary = {{"params", params_json(o.params)},
                  {"theta", o.bias.theta},
                  {"delta", o.tax.delta},
                  {"regime", std::string(to_string(o.tax.regime))},
                  {"n_agents", cfg.n_agents},
                  {"n_reps", cfg.n_reps},
                  {"seed", cfg.seed},
                  {"checks", checks},
                  {"max_budget_gap", sim.summary.max_budget_gap}};
  if (o.json) {
    out << summary.dump(2) << "\n";
  } else {
    out << fmt::format("{:<8} {:>22} {:>22} {:>12} {:>8}\n", "check", "analytic", "estimate", "se", "z");
    for (const auto& c : checks) {
      out << fmt::format("{:<8} {:>22} {:>22} {:>12.4g} {:>8.3f}\n", c["name"].get<std::string>(),
                         fmt_num(c["analytic"].get<double>()), fmt_num(c["estimate"].get<double>()),
                         c["standard_error"].get<double>(), c["z"].is_null() ? NAN : c["z"].get<double>());
    }
    out << fmt::format("max_budget_gap {}\n", fmt_num(sim.summary.max_budget_gap));
  }
  if (!o.out_dir.empty()) {
    emit(o, "simulate", {{"simulate.csv", records_csv(sim)}, {"simulate.json", summary.dump(2) + "\n"}}, {}, err);
  }
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  OracleOptions opt = o.quick ? OracleOptions::quick() : OracleOptions{};
  opt.seed = o.seed;
  opt.draws = o.draws;
  if (opt.draws == 0) throw Error(ErrorCode::InvalidInput, "draws must be positive");
  auto rep = run_oracle_suite(opt);

  json j = {{"seed", opt.seed},
            {"draws", opt.draws},
            {"n_agents", opt.sim.n_agents},
            {"n_reps", opt.sim.n_reps},
            {"z_max", opt.z_max},
            {"first_pass_failures", rep.failures},
            {"rerun_used", rep.rerun_used},
            {"pass", rep.pass}};
  json draws = json::array();
  for (std::size_t i = 0; i < rep.draws.size(); ++i) {
    const auto& d = rep.draws[i];
    json cs = json::array();
    for (const auto& c : d.checks) {
      cs.push_back({{"name", c.name},
                    {"analytic", c.analytic},
                    {"estimate", c.estimate},
                    {"standard_error", c.standard_error},
                    {"z", num(c.z)},
                    {"pass", c.pass}});
    }
    draws.push_back({{"index", i},
                     {"params", params_json(d.draw.params)},
                     {"theta", d.draw.bias.theta},
                     {"delta", d.draw.tax.delta},
                     {"regime", std::string(to_string(d.draw.tax.regime))},
                     {"sim_seed", d.sim_seed},
                     {"rerun", d.rerun},
                     {"budget_gap", d.budget_gap},
                     {"budget_ok", d.budget_ok},
                     {"checks", cs}});
  }
  j["results"] = draws;

  if (o.json) {
    out << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < rep.draws.size(); ++i) {
      const auto& d = rep.draws[i];
      std::string line = fmt::format("draw {:>2}{} ", i, d.rerun ? "*" : " ");
      for (const auto& c : d.checks) line += fmt::format(" {}={:+.2f}{}", c.name, c.z, c.pass ? "" : "!");
      line += d.budget_ok ? "" : " budget!";
      out << line << "\n";
    }
    out << fmt::format("{} ({} first-pass failures{})\n", rep.pass ? "PASS" : "FAIL", rep.failures,
                       rep.rerun_used ? ", one draw rerun" : "");
  }
  if (!o.out_dir.empty()) emit(o, "verify", {{"verify.json", j.dump(2) + "\n"}}, {}, err);
  return rep.pass ? kOk : kFailed;
}

int dispatch(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.command == "solve") return cmd_solve(o, out);
  if (o.command == "sweep") return cmd_sweep(o, out, err);
  if (o.command == "threshold") return cmd_threshold(o, out);
  if (o.command == "optimize") return cmd_optimize(o, out);
  if (o.command == "figure") return cmd_figure(o, err);
  if (o.command == "simulate") return cmd_simulate(o, out, err);
  if (o.command == "verify") return cmd_verify(o, out, err);
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown command '{}'", o.command));
}

json read_json_input(const std::string& src, std::istream& in) {
  if (src == "-") return json::parse(std::string(std::istreambuf_iterator<char>(in), {}));
  std::ifstream f(src);
  if (!f) throw Error(ErrorCode::InvalidInput, fmt::format("cannot read {}", src));
  return json::parse(f);
}

Layer solve_input_layer(const json& j) {
  Layer l;
  const auto p = params_from(j.at("params"));
  l.gamma = p.gamma;
  l.beta = p.beta;
  l.tau0 = p.tau0;
  l.taueps = p.tau_eps;
  l.tauS = p.tau_s;
  l.muS = p.mu_s;
  if (j.contains("theta")) l.theta = j["theta"].get<double>();
  if (j.contains("delta")) l.delta = j["delta"].get<double>();
  if (j.contains("regime")) l.regime = j["regime"].get<std::string>();
  return l;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, fmt::format("cannot read config {}", path));
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, fmt::format("{}:{}: expected key=value", path, lineno));
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

json to_json(const Options& o) {
  return {{"command", o.command},
          {"params", params_json(o.params)},
          {"theta", o.bias.theta},
          {"delta", o.tax.delta},
          {"regime", std::string(to_string(o.tax.regime))},
          {"settings", {{"abs_tol", o.settings.abs_tol},
                        {"rel_tol", o.settings.rel_tol},
                        {"max_iter", o.settings.max_iter},
                        {"scan_points", o.settings.scan_points}}},
          {"seed", o.seed},
          {"points", o.points},
          {"json", o.json},
          {"out_dir", o.out_dir},
          {"axis", o.axis},
          {"lo", o.lo},
          {"hi", o.hi},
          {"range_given", o.range_given},
          {"figure", o.figure},
          {"agents", o.agents},
          {"reps", o.reps},
          {"antithetic", o.antithetic},
          {"sampling", o.sampling},
          {"threads", o.threads},
          {"quick", o.quick},
          {"draws", o.draws}};
}

Options options_from_json(const json& j) {
  Options o;
  o.command = j.at("command").get<std::string>();
  o.params = params_from(j.at("params"));
  o.bias.theta = j.at("theta").get<double>();
  o.tax.delta = j.at("delta").get<double>();
  o.tax.regime = parse_regime(j.at("regime").get<std::string>());
  const auto& s = j.at("settings");
  o.settings.abs_tol = s.at("abs_tol").get<double>();
  o.settings.rel_tol = s.at("rel_tol").get<double>();
  o.settings.max_iter = s.at("max_iter").get<int>();
  o.settings.scan_points = s.at("scan_points").get<std::size_t>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.points = j.at("points").get<std::size_t>();
  o.json = j.at("json").get<bool>();
  o.out_dir = j.at("out_dir").get<std::string>();
  o.axis = j.at("axis").get<std::string>();
  o.lo = j.at("lo").get<double>();
  o.hi = j.at("hi").get<double>();
  o.range_given = j.at("range_given").get<bool>();
  o.figure = j.at("figure").get<std::string>();
  o.agents = j.at("agents").get<std::uint64_t>();
  o.reps = j.at("reps").get<std::uint64_t>();
  o.antithetic = j.at("antithetic").get<bool>();
  o.sampling = j.at("sampling").get<std::string>();
  o.threads = j.at("threads").get<unsigned>();
  o.quick = j.at("quick").get<bool>();
  o.draws = j.at("draws").get<std::uint64_t>();
  return o;
}

json to_json(const RunManifest& m) {
  return {{"tool", m.tool}, {"version", m.version}, {"options", to_json(m.options)},
          {"outputs", m.outputs}, {"notes", m.notes}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.tool = j.at("tool").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.options = options_from_json(j.at("options"));
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.notes = j.value("notes", std::vector<std::string>{});
  return m;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Diagnostic-expectations market equilibrium: solve, sweep, optimise and verify", "dexp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Layer flags;
  Options o;
  std::string config_path;
  std::string from_json;
  std::string manifest_path;
  bool quiet = false;

  auto model_flags = [&](CLI::App* sub) {
    sub->add_option("--gamma", flags.gamma, "informed trading cost curvature");
    sub->add_option("--beta", flags.beta, "liquidity supply slope");
    sub->add_option("--tau0", flags.tau0, "prior precision of V");
    sub->add_option("--taueps", flags.taueps, "private signal precision");
    sub->add_option("--tauS", flags.tauS, "supply shock precision");
    sub->add_option("--muS", flags.muS, "supply shifter");
    sub->add_option("--theta", flags.theta, "diagnosticity (0 = Bayesian)");
    sub->add_option("--delta", flags.delta, "quadratic tax rate (negative = subsidy)");
    sub->add_option("--regime", flags.regime, "who pays the tax")
        ->check(CLI::IsMember({"both", "informed", "BothSides", "InformedOnly"}));
    sub->add_option("--config", config_path, "flat key=value file; flags override it");
    sub->add_flag("--json", o.json, "machine-readable output");
  };
  auto out_flag = [&](CLI::App* sub) { sub->add_option("--out", o.out_dir, "output directory"); };
  auto seed_flag = [&](CLI::App* sub) { sub->add_option("--seed", flags.seed, "random seed"); };
  auto points_flag = [&](CLI::App* sub) { sub->add_option("--points", flags.points, "grid points"); };

  auto* solve = app.add_subcommand("solve", "solve the equilibrium and its welfare loss");
  model_flags(solve);
  solve->add_option("--from-json", from_json, "read parameters from solve --json output ('-' for stdin)");

  auto* sw = app.add_subcommand("sweep", "sweep theta or delta and write the sweep table");
  model_flags(sw);
  out_flag(sw);
  points_flag(sw);
  sw->add_option("--axis", o.axis, "theta or delta")->check(CLI::IsMember({"theta", "delta"}));
  auto* lo_opt = sw->add_option("--lo", o.lo, "first grid value");
  auto* hi_opt = sw->add_option("--hi", o.hi, "last grid value");

  auto* th = app.add_subcommand("threshold", "a*, a^T, theta', theta'' and delta*");
  model_flags(th);

  auto* op = app.add_subcommand("optimize", "welfare-optimal theta and tax");
  model_flags(op);

  auto* fig = app.add_subcommand("figure", "write a figure CSV for a preset");
  fig->add_option("name", o.figure, "fig1a, fig1b or fig3")->required();
  fig->add_option("--config", config_path, "flat key=value file; flags override it");
  out_flag(fig);
  points_flag(fig);

  auto* sim = app.add_subcommand("simulate", "finite-agent Monte Carlo of one economy");
  model_flags(sim);
  out_flag(sim);
  seed_flag(sim);
  sim->add_option("--agents", o.agents, "agents per replication");
  sim->add_option("--reps", o.reps, "replications");
  sim->add_flag("--antithetic", o.antithetic, "mirror every other replication");
  sim->add_option("--sampling", o.sampling, "sufficient or agents")->check(CLI::IsMember({"sufficient", "agents"}));
  sim->add_option("--threads", o.threads, "worker threads");

  auto* ver = app.add_subcommand("verify", "run the Monte Carlo oracle suite");
  out_flag(ver);
  seed_flag(ver);
  ver->add_flag("--quick", o.quick, "1e4 replications per draw");
  ver->add_option("--draws", o.draws, "random economies");
  ver->add_flag("--json", o.json, "machine-readable output");
  ver->add_option("--config", config_path, "flat key=value file; flags override it");

  auto* rep = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  rep->add_option("manifest", manifest_path, "path to a *.manifest.json")->required()->check(CLI::ExistingFile);
  out_flag(rep);

  app.add_flag("-q,--quiet", quiet, "do not report written files");

  std::vector<std::string> argv_store{"dexp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::ostringstream sink;
  std::ostream& log = quiet ? sink : err;

  try {
    if (rep->parsed()) {
      std::ifstream f(manifest_path);
      auto m = manifest_from_json(json::parse(f));
      Options r = m.options;
      // outputs land next to the manifest unless redirected
      if (!o.out_dir.empty()) {
        r.out_dir = o.out_dir;
      } else if (!r.out_dir.empty()) {
        const auto dir = fs::path(manifest_path).parent_path();
        r.out_dir = dir.empty() ? "." : dir.string();
      }
      return dispatch(r, out, log);
    }

    o.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) apply(config_layer(config_path), o);
    if (!from_json.empty()) apply(solve_input_layer(read_json_input(from_json, in)), o);
    apply(flags, o);
    o.range_given = lo_opt->count() > 0 || hi_opt->count() > 0;
    if (o.range_given && (lo_opt->count() == 0 || hi_opt->count() == 0)) {
      throw Error(ErrorCode::InvalidInput, "give both --lo and --hi");
    }
    return dispatch(o, out, log);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidInput ? kUsage : kFailed;
  } catch (const json::exception& e) {
    err << "error: bad JSON input: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace dexp::cli
