#include <CLI11.hpp>
#include <json.hpp>

#include <distjet/distance_field.hpp>
#include <distjet/evaluator.hpp>
#include <distjet/flow.hpp>
#include <distjet/poly_io.hpp>
#include <distjet/recursion.hpp>
#include <distjet/shapes.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

// Every subcommand echoes its parsed configuration before doing any work; the
// file-writing subcommands additionally persist it next to their outputs.
void echo_config(const ordered_json& j) {
  std::fprintf(stderr, "config: %s\n", j.dump().c_str());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Planar node polygons for the flow subcommands. Beyond the round and
// elliptic starts, a limacon with b > a has a self-crossing inner loop and is
// the stock way to exercise the flagged halt.
std::vector<distjet::Vec2> planar_nodes(const std::string& spec, int count) {
  std::string kind = spec;
  std::vector<std::pair<std::string, double>> kv;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string item =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("shape: expected key=value in '" + spec + "'");
      kv.push_back({item.substr(0, eq), std::stod(item.substr(eq + 1))});
      pos = comma == std::string::npos ? rest.size() : comma + 1;
    }
  }
  auto get = [&](const std::string& key, double dflt) {
    for (auto& [k, v] : kv)
      if (k == key) return v;
    return dflt;
  };
  if (kind == "circle") return distjet::circle_nodes(get("R", 1.0), count);
  if (kind == "ellipse") return distjet::ellipse_nodes(get("a", 2.0), get("b", 1.0), count);
  if (kind == "limacon") {
    const double a = get("a", 1.0), b = get("b", 1.6);
    std::vector<distjet::Vec2> nodes(count);
    for (int i = 0; i < count; ++i) {
      const double t = 2 * M_PI * i / count;
      nodes[i] = {(a + b * std::cos(t)) * std::cos(t), (a + b * std::cos(t)) * std::sin(t)};
    }
    return nodes;
  }
  throw std::invalid_argument("shape: flow accepts circle, ellipse, limacon; got '" +
                              spec + "'");
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("eps-list: bad number '" + item + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string snapshots_csv(const std::vector<distjet::Snapshot>& snaps) {
  std::string out = "t,node,x,y\n";
  for (const distjet::Snapshot& s : snaps)
    for (size_t i = 0; i < s.nodes.size(); ++i)
      out += sci(s.time) + "," + std::to_string(i) + "," + sci(s.nodes[i].x) + "," +
             sci(s.nodes[i].y) + "\n";
  return out;
}

std::string energy_log_csv(const std::vector<distjet::LogRow>& rows) {
  std::string out = "t,energy,length,max_abs_curvature,radius_fit\n";
  for (const distjet::LogRow& r : rows)
    out += sci(r.time) + "," + sci(r.energy) + "," + sci(r.length) + "," +
           sci(r.max_abs_curvature) + "," + sci(r.radius_fit) + "\n";
  return out;
}

const char* status_name(distjet::RunStatus s) {
  switch (s) {
    case distjet::RunStatus::kGradientStop: return "gradient-stop";
    case distjet::RunStatus::kSelfIntersection: return "self-intersection-halt";
    default: return "finished";
  }
}

int run_derive(int k, int s, const std::string& format) {
  echo_config({{"command", "derive"}, {"k", k}, {"s", s}, {"format", format}});
  const distjet::RecursionTable table = distjet::filled_table(k);
  const distjet::PolyTensor& p = table.at(k, s);
  if (format == "json")
    std::fputs((distjet::to_json(p).dump(2) + "\n").c_str(), stdout);
  else
    std::fputs(distjet::to_text(p).c_str(), stdout);
  return 0;
}

int run_verify(const std::string& shape, int k_max, int samples, double tol) {
  echo_config({{"command", "verify-identities"},
               {"shape", shape},
               {"k_max", k_max},
               {"samples", samples},
               {"tol", tol}});
  const distjet::Immersion im = distjet::parse_shape(shape);

  ordered_json report;
  report["shape"] = shape;
  report["k_max"] = k_max;
  report["samples"] = samples;
  report["tol"] = tol;

  double worst = 0;
  ordered_json failures = ordered_json::array();
  try {
    const distjet::IdentityReport idr = distjet::verify_prop1(im, samples);
    report["identities"] = {{"grad_is_projection", idr.grad_is_projection},
                            {"hessian_is_tangent", idr.hessian_is_tangent},
                            {"b_from_a3", idr.b_from_a3},
                            {"a3_from_b", idr.a3_from_b},
                            {"trace_is_h", idr.trace_is_h},
                            {"hessian_eta_normal", idr.hessian_eta_normal}};
    worst = std::max({idr.grad_is_projection, idr.hessian_is_tangent, idr.b_from_a3,
                      idr.a3_from_b, idr.trace_is_h, idr.hessian_eta_normal});
  } catch (const std::exception& e) {
    failures.push_back({{"stage", "identities"}, {"error", e.what()}});
  }

  // Assembled |A^k|^2 from the recursion table against the finite-difference
  // tensor norm, sampled at the same spread of parameter points.
  const distjet::RecursionTable table = distjet::filled_table(k_max);
  distjet::DistanceField df(im);
  ordered_json norms;
  for (int k = 3; k <= k_max; ++k) {
    double err_k = 0, value0 = 0, fd0 = 0;
    for (int sp = 0; sp < samples; ++sp) {
      std::vector<double> u0(im.n);
      const double span = im.periodic ? 2 * M_PI : 2.0;
      const double lo = im.periodic ? 0.0 : -1.0;
      u0[0] = lo + span * std::fmod(0.381966 + (double)sp / samples, 1.0);
      if (im.n == 2) u0[1] = lo + span * std::fmod(0.7548776662 * (sp + 1), 1.0);
      try {
        const distjet::JetData jd = distjet::jets(im, u0, std::max(0, k - 3));
        const distjet::FdResult fd =
            distjet::fd_Ak(df, jd.point, k, distjet::default_step(df, k));
        const double value = distjet::norm_Ak(table, k, jd.sample);
        const double ref = fd.extrapolated.norm2();
        if (sp == 0) {
          value0 = value;
          fd0 = ref;
        }
        err_k = std::max(err_k, std::abs(value - ref) / std::max(1.0, std::abs(ref)));
      } catch (const std::exception& e) {
        failures.push_back({{"stage", "norm_Ak"}, {"k", k}, {"sample", sp}, {"error", e.what()}});
      }
    }
    norms[std::to_string(k)] = {{"value", value0}, {"fd_value", fd0}, {"max_error", err_k}};
    worst = std::max(worst, err_k);
  }
  report["norm_Ak"] = norms;
  if (!failures.empty()) report["failures"] = failures;
  report["max_error"] = worst;
  const bool pass = failures.empty() && worst < tol;
  report["pass"] = pass;
  std::fputs((report.dump(2) + "\n").c_str(), stdout);
  return pass ? 0 : 1;
}

int run_scan(int k, int n, int m, long long samples, std::uint64_t seed) {
  echo_config({{"command", "norm-scan"},
               {"k", k},
               {"n", n},
               {"m", m},
               {"samples", samples},
               {"seed", seed}});
  const distjet::RecursionTable table = distjet::filled_table(k);
  const distjet::ScanReport rep = distjet::inequality_scan(table, k, n, m, samples, seed);
  std::fputs((distjet::to_json(rep).dump(2) + "\n").c_str(), stdout);
  return rep.min_ratio > 0 ? 0 : 1;
}

int run_flow(int k, double eps, const std::string& shape, int nodes, double t_end,
             bool have_t_end, const std::string& stepper, const std::string& out_dir) {
  if (stepper == "explicit" && !have_t_end) {
    std::fprintf(stderr, "flow: --stepper explicit needs --t-end\n");
    return 2;
  }
  distjet::FlowConfig cfg;
  cfg.k = k;
  cfg.eps = eps;
  cfg.nodes = nodes;
  cfg.stepper = stepper == "explicit" ? distjet::Stepper::kExplicit
                                      : distjet::Stepper::kDescent;
  if (have_t_end) cfg.t_end = t_end;

  ordered_json echo{{"command", "flow"},
                    {"k", cfg.k},
                    {"eps", cfg.eps},
                    {"shape", shape},
                    {"nodes", cfg.nodes},
                    {"stepper", stepper},
                    {"grad_tol", cfg.grad_tol},
                    {"max_steps", cfg.max_steps},
                    {"redistribute_every", cfg.redistribute_every},
                    {"log_ticks", cfg.log_ticks},
                    {"snapshot_ticks", cfg.snapshot_ticks},
                    {"seed", cfg.seed},
                    {"out", out_dir}};
  echo["t_end"] = std::isfinite(cfg.t_end) ? ordered_json(cfg.t_end) : ordered_json(nullptr);
  echo_config(echo);

  const std::vector<distjet::Vec2> initial = planar_nodes(shape, cfg.nodes);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.json", echo.dump(2) + "\n");

  distjet::RunResult res;
  try {
    res = distjet::run(distjet::filled_table(cfg.k), cfg, initial);
  } catch (const distjet::SelfIntersectionError& e) {
    std::fprintf(stderr, "flow: halted: %s (initial curve, nothing to save)\n", e.what());
    return 3;
  }
  write_file(dir / "snapshots.csv", snapshots_csv(res.trajectory.snapshots));
  write_file(dir / "energy_log.csv", energy_log_csv(res.trajectory.log));

  const distjet::LogRow& last = res.trajectory.log.back();
  std::printf("status=%s steps=%lld t=%s energy=%s radius_fit=%s\n",
              status_name(res.status), res.steps, sci(last.time).c_str(),
              sci(last.energy).c_str(), sci(last.radius_fit).c_str());
  if (res.status == distjet::RunStatus::kSelfIntersection) {
    std::fprintf(stderr, "flow: halted on self-intersection; last valid state saved\n");
    return 3;
  }
  return 0;
}

int run_mcf(const std::string& eps_list_text, const std::string& shape, int k, int nodes,
            double t_end, const std::string& out_dir) {
  const std::vector<double> eps_list = parse_eps_list(eps_list_text);
  distjet::FlowConfig cfg;
  cfg.k = k;
  cfg.nodes = nodes;
  cfg.t_end = t_end;
  cfg.stepper = distjet::Stepper::kExplicit;

  ordered_json echo{{"command", "mcf-compare"}, {"eps_list", eps_list}, {"shape", shape},
                    {"k", cfg.k},               {"nodes", cfg.nodes},   {"t_end", cfg.t_end},
                    {"seed", cfg.seed},         {"out", out_dir}};
  echo_config(echo);

  const std::vector<distjet::Vec2> initial = planar_nodes(shape, cfg.nodes);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.json", echo.dump(2) + "\n");

  const distjet::McfCompareResult cmp =
      distjet::mcf_compare(distjet::filled_table(cfg.k), cfg, initial, eps_list);

  std::string table = "eps,sup_deviation\n";
  for (const distjet::McfRow& row : cmp.rows)
    table += sci(row.eps) + "," + sci(row.sup_deviation) + "\n";
  write_file(dir / "deviations.csv", table);
  for (size_t i = 0; i < cmp.runs.size(); ++i) {
    const std::string tag = "_eps" + std::to_string(i);
    write_file(dir / ("snapshots" + tag + ".csv"),
               snapshots_csv(cmp.runs[i].trajectory.snapshots));
    write_file(dir / ("energy_log" + tag + ".csv"),
               energy_log_csv(cmp.runs[i].trajectory.log));
  }

  std::printf("reference=%s initial_radius=%s\n",
              cmp.circle_reference ? "analytic-circle" : "shortening-run",
              sci(cmp.initial_radius).c_str());
  for (const distjet::McfRow& row : cmp.rows)
    std::printf("eps=%s sup_deviation=%s\n", sci(row.eps).c_str(),
                sci(row.sup_deviation).c_str());
  for (const distjet::RunResult& r : cmp.runs)
    if (r.status == distjet::RunStatus::kSelfIntersection) {
      std::fprintf(stderr, "mcf-compare: a run halted on self-intersection\n");
      return 3;
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squared-distance derivative tensors, bounds, and curve flows"};
  app.require_subcommand(1);

  int d_k = 3, d_s = 2;
  std::string d_format = "text";
  CLI::App* derive = app.add_subcommand("derive", "print a derivative tensor entry");
  derive->add_option("--k", d_k, "derivative order")->required()->check(CLI::Range(2, 8));
  derive->add_option("--s", d_s, "tangent slot count")->required()->check(CLI::Range(0, 8));
  derive->add_option("--format", d_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string v_shape = "circle:R=1";
  int v_kmax = 4, v_samples = 4;
  double v_tol = 1e-4;
  CLI::App* verify =
      app.add_subcommand("verify-identities", "check derivative identities on a shape");
  verify->add_option("--shape", v_shape, "circle:R=1, ellipse:a=2,b=1, torus3:R=2,r=0.5, "
                                         "clifford4:R=1, plane");
  verify->add_option("--k-max", v_kmax, "highest derivative order")->check(CLI::Range(3, 6));
  verify->add_option("--samples", v_samples, "surface points per check")
      ->check(CLI::Range(1, 64));
  verify->add_option("--tol", v_tol, "pass threshold for all max errors");

  int s_k = 3, s_n = 1, s_m = 1;
  long long s_samples = 10000;
  std::uint64_t s_seed = 42;
  CLI::App* scan =
      app.add_subcommand("norm-scan", "scan the norm lower bound on random jets");
  scan->add_option("--k", s_k, "derivative order")->check(CLI::Range(3, 6));
  scan->add_option("--n", s_n, "intrinsic dimension")->check(CLI::Range(1, 3));
  scan->add_option("--m", s_m, "codimension")->check(CLI::Range(1, 3));
  scan->add_option("--samples", s_samples, "sample count")->check(CLI::PositiveNumber);
  scan->add_option("--seed", s_seed, "generator seed");

  int f_k = 3, f_nodes = 128;
  double f_eps = 1.0, f_t_end = 0;
  std::string f_shape = "circle:R=3", f_stepper = "descent", f_out = "flow_out";
  CLI::App* flow = app.add_subcommand("flow", "run the regularized curve flow");
  flow->add_option("--k", f_k, "derivative order in the energy")->check(CLI::Range(3, 6));
  flow->add_option("--eps", f_eps, "curvature energy weight")->check(CLI::PositiveNumber);
  flow->add_option("--shape", f_shape, "circle:R=3, ellipse:a=2,b=1, limacon:a=1,b=1.6");
  flow->add_option("--nodes", f_nodes, "node count")->check(CLI::Range(16, 4096));
  CLI::Option* f_t_opt =
      flow->add_option("--t-end", f_t_end, "time horizon")->check(CLI::PositiveNumber);
  flow->add_option("--stepper", f_stepper, "descent or explicit")
      ->check(CLI::IsMember({"descent", "explicit"}));
  flow->add_option("--out", f_out, "output directory");

  std::string m_eps_list, m_shape = "circle:R=1", m_out = "mcf_out";
  int m_k = 3, m_nodes = 64;
  double m_t_end = 0.3;
  CLI::App* mcf = app.add_subcommand(
      "mcf-compare", "deviation from curve shortening across eps values");
  mcf->add_option("--eps-list", m_eps_list, "strictly decreasing, comma separated")
      ->required();
  mcf->add_option("--shape", m_shape, "circle:R=1 or ellipse:a=2,b=1");
  mcf->add_option("--k", m_k, "derivative order in the energy")->check(CLI::Range(3, 6));
  mcf->add_option("--nodes", m_nodes, "node count")->check(CLI::Range(16, 4096));
  mcf->add_option("--t-end", m_t_end, "comparison window")->check(CLI::PositiveNumber);
  mcf->add_option("--out", m_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*derive) {
      if (d_s > d_k) {
        std::fprintf(stderr, "derive: --s must not exceed --k\n");
        return 2;
      }
      return run_derive(d_k, d_s, d_format);
    }
    if (*verify) return run_verify(v_shape, v_kmax, v_samples, v_tol);
    if (*scan) return run_scan(s_k, s_n, s_m, s_samples, s_seed);
    if (*flow)
      return run_flow(f_k, f_eps, f_shape, f_nodes, f_t_end, f_t_opt->count() > 0,
                      f_stepper, f_out);
    if (*mcf) return run_mcf(m_eps_list, m_shape, m_k, m_nodes, m_t_end, m_out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
