// sbmlab: batch runner for the planted-partition experiments.
//
// Every subcommand writes a self-describing artifact: the resolved
// configuration and seed are embedded in the output, while the timestamp and
// worker count go to a sidecar "<output>.log" so reruns are byte-identical.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "sbm/broadcast.hpp"
#include "sbm/coupling.hpp"
#include "sbm/cycles.hpp"
#include "sbm/errors.hpp"
#include "sbm/estimation.hpp"
#include "sbm/graph.hpp"
#include "sbm/graph_io.hpp"
#include "sbm/moments.hpp"
#include "sbm/parallel.hpp"
#include "sbm/rng.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

Json json_num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

Json json_opt(const std::optional<double>& x) { return x ? json_num(*x) : Json(nullptr); }

// Options shared by every subcommand plus a record of which settings belong in
// the embedded configuration.
struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string config_path;
  std::string output;
  std::string format;
  unsigned threads = 0;
  std::vector<std::pair<std::string, CLI::Option*>> keyed;
  std::vector<std::pair<std::string, std::function<Json()>>> resolved;
  std::function<void(Command&)> run;

  template <typename T>
  CLI::Option* option(const std::string& key, T& value, const std::string& help) {
    auto* opt = app->add_option("--" + key, value, help)->capture_default_str();
    keyed.emplace_back(key, opt);
    resolved.emplace_back(key, [&value] { return Json(value); });
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& value, const std::string& help) {
    auto* opt = app->add_flag("--" + key, value, help);
    keyed.emplace_back(key, opt);
    resolved.emplace_back(key, [&value] { return Json(value); });
    return opt;
  }

  Json config() const {
    Json c = Json::object();
    for (const auto& [key, get] : resolved) c[key] = get();
    return c;
  }
};

void apply_config_file(Command& cmd) {
  if (cmd.config_path.empty()) return;
  std::ifstream in(cmd.config_path);
  if (!in) throw IoError("cannot open config file " + cmd.config_path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      if (value != cmd.name) throw std::invalid_argument("config is for command " + value.dump());
      continue;
    }
    CLI::Option* target = nullptr;
    for (const auto& [k, opt] : cmd.keyed)
      if (k == key) target = opt;
    if (!target) throw std::invalid_argument("unknown config key '" + key + "'");
    if (target->count() > 0) continue;  // flags take precedence
    const std::string text = value.is_string() ? value.get<std::string>()
                             : value.is_boolean() ? (value.get<bool>() ? "true" : "false")
                                                  : value.dump();
    target->add_result(text);
    target->run_callback();
  }
}

std::vector<std::string> comment_lines(const Command& cmd) {
  return {"sbmlab " + cmd.name, "config " + cmd.config().dump(),
          std::string("rng ") + sbm::RngStream::kAlgorithm};
}

std::string csv_document(const Command& cmd, const std::string& header,
                         const std::vector<std::string>& rows) {
  std::string out;
  for (const auto& line : comment_lines(cmd)) out += "# " + line + "\n";
  out += header + "\n";
  for (const auto& row : rows) out += row + "\n";
  return out;
}

std::string json_document(const Command& cmd, Json result) {
  Json doc = Json::object();
  doc["command"] = cmd.name;
  doc["config"] = cmd.config();
  doc["rng"] = sbm::RngStream::kAlgorithm;
  doc["result"] = std::move(result);
  return doc.dump(2) + "\n";
}

void write_sidecar(const Command& cmd, int argc, char** argv) {
  if (cmd.output.empty() || cmd.output == "-") return;
  std::ofstream log(cmd.output + ".log");
  if (!log) return;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << "timestamp " << stamp << "\n";
  log << "threads " << sbm::resolve_threads(cmd.threads) << "\n";
  log << "argv";
  for (int i = 0; i < argc; ++i) log << ' ' << argv[i];
  log << "\n";
}

void emit(const Command& cmd, const std::string& text) {
  if (cmd.output.empty() || cmd.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(cmd.output, std::ios::binary);
  if (!out) throw IoError("cannot write output file " + cmd.output);
  out << text;
  if (!out) throw IoError("failed writing " + cmd.output);
}

std::string resolved_format(const Command& cmd, const std::string& fallback) {
  const std::string f = cmd.format.empty() ? fallback : cmd.format;
  if (f != "csv" && f != "json") throw std::invalid_argument("--format must be csv or json");
  return f;
}

sbm::LabeledGraph load_input(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--input is required");
  std::ifstream probe(path);
  if (!probe) throw IoError("cannot open input file " + path);
  try {
    return sbm::read_edge_list(probe);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

sbm::GraphModel parse_model(const std::string& s) {
  if (s == "sbm") return sbm::GraphModel::sbm;
  if (s == "er") return sbm::GraphModel::er;
  throw std::invalid_argument("--model must be sbm or er");
}

// Settings storage; each subcommand binds the subset it uses.
struct Settings {
  std::size_t n = 2000;
  double a = 5.0;
  double b = 1.0;
  int k = 3;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  int radius = 3;
  std::string model = "sbm";
  std::string method = "nb";
  std::string input;
  std::string law = "half";
  bool balanced = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on sparse planted-partition graphs: samplers, short-cycle counts, "
               "parameter estimation, tree reconstruction and likelihood-ratio moments."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sbmlab 1.0");

  std::vector<Settings> settings(8);
  std::vector<Command> commands;
  commands.reserve(8);

  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    Command& c = commands.emplace_back();
    c.name = name;
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.config_path, "JSON file of settings; command-line flags win");
    c.app->add_option("-o,--output", c.output, "Output path (default stdout)");
    c.app->add_option("--format", c.format, "csv or json");
    c.app->add_option("--threads", c.threads,
                      "Worker threads (0: SBM_THREADS or hardware concurrency); results do not depend on it");
    return c;
  };

  // generate ---------------------------------------------------------------
  {
    Settings& s = settings[0];
    Command& c = make("generate",
                      "Sample one graph from the planted bisection model (labels iid uniform, edge "
                      "probability a/n within and b/n across classes) or from its Erdos-Renyi null "
                      "G(n, (a+b)/(2n)), and write it as an edge list.");
    c.option("n", s.n, "Number of vertices");
    c.option("a", s.a, "Within-class intensity");
    c.option("b", s.b, "Between-class intensity");
    c.option("seed", s.seed, "Seed (stream 0)");
    c.option("model", s.model, "sbm or er");
    c.flag("balanced", s.balanced, "Force floor(n/2) vertices labelled +1");
    c.run = [&s](Command& cmd) {
      const sbm::ModelParams params{s.n, s.a, s.b};
      params.validate();
      sbm::RngStream rng(s.seed, 0);
      const auto g = parse_model(s.model) == sbm::GraphModel::sbm
                         ? sbm::sample_sbm(params, rng, {.balanced = s.balanced})
                         : sbm::sample_er(s.n, params.null_intensity(), rng);
      std::ostringstream out;
      sbm::write_edge_list(out, g, comment_lines(cmd));
      emit(cmd, out.str());
    };
  }

  // cycles -----------------------------------------------------------------
  {
    Settings& s = settings[1];
    Command& c = make("cycles",
                      "Count k-cycles X_k of an edge-list graph, exactly or by non-backtracking "
                      "walks on balls (the short-cycle census behind the Poisson cycle law).");
    c.option("input", s.input, "Edge-list file (required)");
    c.option("k", s.k, "Cycle length");
    c.option("method", s.method,
             "exact | nb (cyclically reduced NB walks) | nb-vertex (standard NB recursion, "
             "vertex entries) | nb-literal (A_j = A_{j-1} A - D A_{j-2} for every j, radius-k balls)");
    c.run = [&s](Command& cmd) {
      const auto g = load_input(s.input);
      Json result = Json::object();
      result["k"] = s.k;
      result["method"] = s.method;
      if (s.method == "exact" || s.method == "nb") {
        const auto census = s.method == "exact" ? sbm::count_cycles_exact(g.graph(), s.k)
                                                : sbm::count_cycles_nb(g.graph(), s.k, cmd.threads);
        result["X_k"] = census.count(s.k);
        result["flagged_fraction"] = census.flagged_fraction();
        result["approximate"] = census.approximate();
      } else if (s.method == "nb-vertex" || s.method == "nb-literal") {
        const auto rec = s.method == "nb-vertex" ? sbm::NbRecurrence::standard
                                                 : sbm::NbRecurrence::uniform_degree;
        const auto total = sbm::closed_nb_walk_total(g.graph(), s.k, rec);
        result["closed_walk_total"] = total;
        result["X_k"] = static_cast<double>(total) / (2.0 * s.k);
        result["approximate"] = true;
      } else {
        throw std::invalid_argument("--method must be exact, nb, nb-vertex or nb-literal");
      }
      if (resolved_format(cmd, "json") == "json") {
        emit(cmd, json_document(cmd, result));
      } else {
        const std::string x = result["X_k"].dump();
        const std::string flagged =
            result.contains("flagged_fraction") ? result["flagged_fraction"].dump() : "nan";
        emit(cmd, csv_document(cmd, "k,method,x_k,flagged_fraction",
                               {fmt::format("{},{},{},{}", s.k, s.method, x, flagged)}));
      }
    };
  }

  // poisson-check ----------------------------------------------------------
  {
    Settings& s = settings[2];
    Command& c = make("poisson-check",
                      "Monte Carlo check of the Poisson limit law for the k-cycle count: mean "
                      "((a+b)^k + (a-b)^k)/(k 2^{k+1}) under the planted model, ((a+b)/2)^k/(2k) "
                      "under the null.");
    c.option("n", s.n, "Number of vertices");
    c.option("a", s.a, "Within-class intensity");
    c.option("b", s.b, "Between-class intensity");
    c.option("k", s.k, "Cycle length");
    c.option("trials", s.trials, "Number of sampled graphs (>= 100)");
    c.option("seed", s.seed, "Seed; trial i uses stream i");
    c.option("model", s.model, "sbm or er");
    c.option("method", s.method, "exact or nb");
    c.run = [&s](Command& cmd) {
      if (s.method != "exact" && s.method != "nb") throw std::invalid_argument("--method must be exact or nb");
      const auto model = parse_model(s.model);
      const auto r = sbm::poisson_law_check(
          {s.n, s.a, s.b}, model, s.k, s.trials, sbm::RngStream(s.seed, 0),
          s.method == "exact" ? sbm::CensusMethod::exact : sbm::CensusMethod::nb_walk, cmd.threads);
      if (resolved_format(cmd, "csv") == "csv") {
        emit(cmd, csv_document(cmd, "model,n,a,b,k,trials,emp_mean,emp_var,pred_mean,flagged_fraction,pass",
                               {fmt::format("{},{},{},{},{},{},{},{},{},{},{}", s.model, s.n, num(s.a),
                                            num(s.b), s.k, s.trials, num(r.emp_mean), num(r.emp_var),
                                            num(r.pred_mean), num(r.flagged_fraction), r.pass)}));
      } else {
        Json j = Json::object();
        j["model"] = s.model;
        j["emp_mean"] = r.emp_mean;
        j["emp_var"] = r.emp_var;
        j["se_mean"] = r.se_mean;
        j["se_var"] = r.se_var;
        j["pred_mean"] = r.pred_mean;
        j["finite_n_mean"] = r.finite_n_mean;
        j["flagged_fraction"] = r.flagged_fraction;
        j["chi_square"] = {{"statistic", r.chi_square}, {"dof", r.chi_square_dof}, {"p_value", r.chi_square_p}};
        j["pass"] = r.pass;
        emit(cmd, json_document(cmd, j));
      }
    };
  }

  // estimate ---------------------------------------------------------------
  {
    Settings& s = settings[3];
    Command& c = make("estimate",
                      "Cycle-count estimator of (a, b): d = 2|E|/n, f = (2k X_k - d^k)^{1/k}, "
                      "a = d + f, b = d - f. With --input it reads one unlabelled graph; "
                      "otherwise it pools --trials sampled planted graphs.");
    c.option("input", s.input, "Edge-list file (labels are ignored)");
    c.option("k", s.k, "Cycle length (default max(3, floor((ln n)^{1/4})) = 3 at desk scale)");
    c.option("n", s.n, "Vertices per sampled graph (pooled mode)");
    c.option("a", s.a, "Within-class intensity (pooled mode)");
    c.option("b", s.b, "Between-class intensity (pooled mode)");
    c.option("trials", s.trials, "Sampled graphs (pooled mode)");
    c.option("seed", s.seed, "Seed (pooled mode)");
    c.run = [&s](Command& cmd) {
      Json j = Json::object();
      if (!s.input.empty()) {
        const auto g = load_input(s.input);
        const auto e = sbm::estimate_params(g.graph(), s.k, cmd.threads);
        j["n"] = e.n;
        j["num_edges"] = e.num_edges;
        j["d_hat"] = e.d_hat;
        j["f_hat"] = json_opt(e.f_hat);
        j["a_hat"] = json_opt(e.a_hat);
        j["b_hat"] = json_opt(e.b_hat);
        j["k_used"] = e.k_used;
        j["X_k"] = e.x_k;
        j["raw_statistic"] = e.raw_statistic;
        j["flags"] = {{"f_undefined", !e.defined()},
                      {"census_method", sbm::to_string(e.method)},
                      {"census_approximate", e.census_approximate}};
      } else {
        const sbm::ModelParams params{s.n, s.a, s.b};
        params.validate();
        const auto trials =
            sbm::estimator_trials(params, s.k, s.trials, sbm::RngStream(s.seed, 0), cmd.threads);
        const auto p = sbm::pool_estimates(trials);
        std::size_t undefined = 0;
        for (const auto& e : trials) undefined += !e.defined();
        j["pooled"] = true;
        j["trials"] = p.trials;
        j["k"] = p.k;
        j["mean_raw_statistic"] = p.mean_raw;
        j["se_raw_statistic"] = p.se_raw;
        j["mean_d_hat"] = p.mean_d_hat;
        j["f_hat"] = json_opt(p.f_hat);
        j["a_hat"] = json_opt(p.a_hat);
        j["b_hat"] = json_opt(p.b_hat);
        j["per_graph_undefined"] = undefined;
      }
      if (resolved_format(cmd, "json") == "json") {
        emit(cmd, json_document(cmd, j));
      } else {
        std::string header, row;
        for (const auto& [key, value] : j.items()) {
          if (value.is_object()) continue;
          header += (header.empty() ? "" : ",") + key;
          row += (row.empty() ? "" : ",") + (value.is_null() ? std::string("nan") : value.dump());
        }
        emit(cmd, csv_document(cmd, header, {row}));
      }
    };
  }

  // distinguish ------------------------------------------------------------
  {
    Settings& s = settings[4];
    s.k = 4;
    Command& c = make("distinguish",
                      "Cycle-count test between the planted model and its Erdos-Renyi null: "
                      "planted-like iff X_k > ((a+b)/2)^k/(2k) + rho^k with sqrt((a+b)/2) < rho < "
                      "(a-b)/2. Refused when (a-b)^2 <= 2(a+b), where the two models are mutually "
                      "contiguous. Without --input, runs the mean-gap study over --trials graphs "
                      "per model.");
    c.option("input", s.input, "Edge-list file (labels are ignored)");
    c.option("a", s.a, "Within-class intensity of the alternative");
    c.option("b", s.b, "Between-class intensity of the alternative");
    c.option("k", s.k, "Cycle length");
    c.option("n", s.n, "Vertices per sampled graph (study mode)");
    c.option("trials", s.trials, "Graphs per model (study mode)");
    c.option("seed", s.seed, "Seed (study mode)");
    c.run = [&s](Command& cmd) {
      if (!s.input.empty()) {
        const auto g = load_input(s.input);
        const auto r = sbm::distinguish(g.graph(), s.a, s.b, s.k, cmd.threads);
        Json j = Json::object();
        j["k"] = r.k;
        j["X_k"] = r.x_k;
        j["rho"] = r.rho;
        j["mean_er"] = r.mean_er;
        j["threshold"] = r.threshold;
        j["decision"] = sbm::to_string(r.decision);
        j["zscore"] = r.zscore;
        if (resolved_format(cmd, "json") == "json") {
          emit(cmd, json_document(cmd, j));
        } else {
          emit(cmd, csv_document(cmd, "k,x_k,rho,mean_er,threshold,decision,zscore",
                                 {fmt::format("{},{},{},{},{},{},{}", r.k, r.x_k, num(r.rho),
                                              num(r.mean_er), num(r.threshold),
                                              sbm::to_string(r.decision), num(r.zscore))}));
        }
        return;
      }
      const sbm::ModelParams params{s.n, s.a, s.b};
      params.validate();
      sbm::distinguishing_rho(s.a, s.b);
      const auto r = sbm::mean_gap_study(params, s.k, s.trials, sbm::RngStream(s.seed, 0), cmd.threads);
      if (resolved_format(cmd, "csv") == "csv") {
        emit(cmd, csv_document(cmd, "check,n,a,b,t,k,trials,observed,predicted,stderr,pass",
                               {fmt::format("mean_gap,{},{},{},{},{},{},{},{},{},{}", s.n, num(s.a),
                                            num(s.b), num(params.t()), s.k, s.trials, num(r.gap),
                                            num(r.predicted_gap), num(r.se_gap), r.pass),
                                fmt::format("z_power,{},{},{},{},{},{},{},nan,nan,nan", s.n, num(s.a),
                                            num(s.b), num(params.t()), s.k, s.trials, num(r.z_power)),
                                fmt::format("z_size,{},{},{},{},{},{},{},nan,nan,nan", s.n, num(s.a),
                                            num(s.b), num(params.t()), s.k, s.trials, num(r.z_size))}));
      } else {
        Json j = Json::object();
        j["mean_sbm"] = r.mean_sbm;
        j["mean_er"] = r.mean_er;
        j["gap"] = r.gap;
        j["se_gap"] = r.se_gap;
        j["predicted_gap"] = r.predicted_gap;
        j["z_power"] = r.z_power;
        j["z_size"] = r.z_size;
        j["pass"] = r.pass;
        emit(cmd, json_document(cmd, j));
      }
    };
  }

  // tree-recon -------------------------------------------------------------
  {
    Settings& s = settings[5];
    s.a = 3.0;
    s.radius = 8;
    s.trials = 2000;
    Command& c = make("tree-recon",
                      "Root reconstruction on the Poisson broadcast tree: E|P(root=+ | depth-R "
                      "labels) - 1/2| for R = 0..R, against the Kesten-Stigum value d(1-2eps)^2 "
                      "(non-reconstructable iff <= 1).");
    c.option("a", s.a, "Same-label offspring intensity (Pois(a/2))");
    c.option("b", s.b, "Opposite-label offspring intensity (Pois(b/2))");
    c.option("R", s.radius, "Largest depth");
    c.option("trials", s.trials, "Sampled trees (>= 500)");
    c.option("seed", s.seed, "Seed; tree i uses stream i");
    c.option("law", s.law, "half (Pois(a/2), Pois(b/2)) or full (Pois(a), Pois(b))");
    c.run = [&s](Command& cmd) {
      if (s.law != "half" && s.law != "full") throw std::invalid_argument("--law must be half or full");
      const auto law = s.law == "half" ? sbm::OffspringLaw::half_rates : sbm::OffspringLaw::full_rates;
      const auto curve = sbm::reconstruction_curve(s.a, s.b, s.radius, s.trials,
                                                   sbm::RngStream(s.seed, 0), cmd.threads, law);
      if (resolved_format(cmd, "csv") == "csv") {
        std::vector<std::string> rows;
        for (const auto& p : curve.points)
          rows.push_back(fmt::format("{},{},{},{},{},{},{},{},{}", num(s.a), num(s.b), num(curve.d),
                                     num(curve.theta), num(curve.ks_value), p.depth, curve.trials,
                                     num(p.mean_abs_bias), num(p.stderr)));
        emit(cmd, csv_document(cmd, "a,b,d,theta,ks_value,R,trials,mean_abs_bias,stderr", rows));
      } else {
        Json j = Json::object();
        j["d"] = curve.d;
        j["theta"] = curve.theta;
        j["ks_value"] = curve.ks_value;
        j["reconstructability"] =
            sbm::to_string(sbm::ks_check({curve.d, s.b / (s.a + s.b)}));
        Json pts = Json::array();
        for (const auto& p : curve.points)
          pts.push_back({{"R", p.depth}, {"mean_abs_bias", p.mean_abs_bias}, {"stderr", p.stderr}});
        j["curve"] = pts;
        emit(cmd, json_document(cmd, j));
      }
    };
  }

  // coupling ---------------------------------------------------------------
  {
    Settings& s = settings[6];
    s.n = 100000;
    Command& c = make("coupling",
                      "Ball-to-tree coupling: fraction of depth-R neighbourhoods of a planted graph "
                      "that are trees, shared-child and intra-level edge rates, and TV distance of "
                      "the offspring split to Pois(a/2) x Pois(b/2).");
    c.option("n", s.n, "Number of vertices");
    c.option("a", s.a, "Within-class intensity");
    c.option("b", s.b, "Between-class intensity");
    c.option("R", s.radius, "Ball radius");
    c.option("trials", s.trials, "Sampled (graph, root) pairs (>= 100)");
    c.option("seed", s.seed, "Seed; trial i uses stream i");
    c.run = [&s](Command& cmd) {
      const auto r = sbm::tree_likeness({s.n, s.a, s.b}, s.radius, s.trials,
                                        sbm::RngStream(s.seed, 0), cmd.threads);
      if (resolved_format(cmd, "csv") == "csv") {
        emit(cmd, csv_document(
                      cmd, "n,a,b,R,trials,tree_fraction,A_violation_rate,B_violation_rate,offspring_tv,paper_R",
                      {fmt::format("{},{},{},{},{},{},{},{},{},{}", s.n, num(s.a), num(s.b), s.radius,
                                   s.trials, num(r.tree_fraction), num(r.a_violation_rate),
                                   num(r.b_violation_rate), num(r.offspring_tv), r.asymptotic_radius)}));
      } else {
        Json j = Json::object();
        j["tree_fraction"] = r.tree_fraction;
        j["A_violation_rate"] = r.a_violation_rate;
        j["B_violation_rate"] = r.b_violation_rate;
        j["C_violation_rate"] = r.c_violation_rate;
        j["boundary_growth"] = r.boundary_growth;
        j["offspring_tv"] = r.offspring_tv;
        j["offspring_samples"] = r.offspring_samples;
        j["same_count_p_value"] = r.same_count_p_value;
        j["balance_statistic"] = r.balance_statistic;
        j["paper_R"] = r.asymptotic_radius;
        emit(cmd, json_document(cmd, j));
      }
    };
  }

  // moments ----------------------------------------------------------------
  {
    Settings& s = settings[7];
    s.n = 14;
    s.a = 3.0;
    s.trials = 20000;
    Command& c = make("moments",
                      "Likelihood-ratio moments on small null graphs with Y computed exactly: "
                      "E Y = 1, E[Y X_k] against lambda_k (1 + delta_k), and E Y^2 against "
                      "exp(-t/2 - t^2/4)/sqrt(1 - t).");
    c.option("n", s.n, "Number of vertices (<= 24)");
    c.option("a", s.a, "Within-class intensity");
    c.option("b", s.b, "Between-class intensity");
    c.option("k", s.k, "Cycle length");
    c.option("trials", s.trials, "Sampled null graphs");
    c.option("seed", s.seed, "Seed; trial i uses stream i");
    c.run = [&s](Command& cmd) {
      const auto r = sbm::conditioned_moment_check(s.a, s.b, s.n, s.k, s.trials,
                                                   sbm::RngStream(s.seed, 0), cmd.threads);
      struct Row {
        std::string check;
        double observed, predicted, stderr;
        std::string pass;
      };
      const bool mean_ok = std::abs(r.mean_y - 1.0) <= 3.0 * r.se_mean_y;
      const bool yx_ok = r.ratio >= 0.8 && r.ratio <= 1.2;
      const bool y2_ok = std::isnan(r.limit_y2) || r.mean_y2 <= 2.0 * r.limit_y2;
      const std::vector<Row> rows{
          {"mean_y", r.mean_y, 1.0, r.se_mean_y, mean_ok ? "true" : "false"},
          {"mean_yx", r.mean_yx, r.predicted_yx, r.se_mean_yx, yx_ok ? "true" : "false"},
          {"normalized_yx", r.mean_yx / r.mean_y, r.predicted_yx, r.se_normalized_ratio * r.predicted_yx, "nan"},
          {"mean_y2_exact", r.mean_y2, r.exact_y2, r.se_mean_y2, "nan"},
          {"mean_y2_limit", r.mean_y2, r.limit_y2, r.se_mean_y2, y2_ok ? "true" : "false"},
      };
      if (resolved_format(cmd, "csv") == "csv") {
        std::vector<std::string> lines;
        for (const auto& row : rows)
          lines.push_back(fmt::format("{},{},{},{},{},{},{},{},{},{},{}", row.check, s.n, num(s.a), num(s.b),
                                      num(r.t), s.k, s.trials, num(row.observed), num(row.predicted),
                                      num(row.stderr), row.pass));
        emit(cmd, csv_document(cmd, "check,n,a,b,t,k,trials,observed,predicted,stderr,pass", lines));
      } else {
        Json j = Json::object();
        for (const auto& row : rows)
          j[row.check] = {{"observed", json_num(row.observed)},
                          {"predicted", json_num(row.predicted)},
                          {"stderr", json_num(row.stderr)},
                          {"pass", row.pass == "nan" ? Json(nullptr) : Json(row.pass == "true")}};
        j["lambda_k"] = r.lambda_k;
        j["lambda_k_n"] = r.lambda_k_n;
        j["delta_k"] = r.delta_k;
        j["ratio"] = r.ratio;
        j["se_ratio"] = r.se_ratio;
        emit(cmd, json_document(cmd, j));
      }
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      apply_config_file(cmd);
      cmd.run(cmd);
      write_sidecar(cmd, argc, argv);
      return kExitOk;
    } catch (const sbm::BudgetExceeded& e) {
      std::cerr << "budget exceeded: " << e.what() << "\n";
      return kExitBudget;
    } catch (const IoError& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return kExitIo;
    } catch (const CLI::ParseError& e) {
      std::cerr << "invalid config value: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::invalid_argument& e) {
      std::cerr << "invalid argument: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::domain_error& e) {
      std::cerr << "invalid argument: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
  }
  return kExitValidation;
}
