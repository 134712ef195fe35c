#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svarid/autocov.hpp"
#include "svarid/electricity.hpp"
#include "svarid/error.hpp"
#include "svarid/estimate.hpp"
#include "svarid/experiments.hpp"
#include "svarid/identify.hpp"
#include "svarid/io.hpp"
#include "svarid/rng.hpp"
#include "svarid/svar.hpp"
#include "svarid/version.hpp"

namespace fs = std::filesystem;
using namespace svarid;

namespace {

struct Options {
  std::string command;
  std::string graph, params, data, spec, config, example = "Ex3_6";
  std::string out = ".";
  std::string delta = "-10..10";
  std::string t_grid = "100,1000,10000";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  int reps = 200;
  std::int64_t block_len = 0;
  std::int64_t length = 1000;
  std::int64_t burnin = 1000;
  int max_lag = 10;
  int graphs = 100;
  int n_params = 3;
  int model = 1;
  int row = 1;
  std::size_t max_attempts = 100000;
  bool demean = false;
  bool demean_user = true;
  bool tight_tau = false;
  bool observed_only = false;
};

struct Run {
  Options opt;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;

  std::string path(const std::string& name) const { return (fs::path(opt.out) / name).string(); }
  void json(const std::string& name, const Json& j) {
    write_json(path(name), j);
    artifacts.push_back(name);
  }
};

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw SpecError("range must look like a..b, got '" + s + "'");
  try {
    return {std::stoll(s.substr(0, pos)), std::stoll(s.substr(pos + 2))};
  } catch (const std::exception&) {
    throw SpecError("bad range '" + s + "'");
  }
}

std::vector<std::int64_t> parse_grid(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double v = 0.0;
    try {
      v = std::stod(cell);
    } catch (const std::exception&) {
      throw SpecError("bad T grid entry '" + cell + "'");
    }
    if (!(v >= 1.0) || v != std::floor(v)) throw SpecError("T grid entries must be positive integers");
    out.push_back(static_cast<std::int64_t>(v));
  }
  if (out.empty()) throw SpecError("empty T grid");
  return out;
}

void need(const std::string& value, const char* flag) {
  if (value.empty()) throw SpecError(std::string("missing ") + flag);
}

void cmd_simulate(Run& run) {
  need(run.opt.params, "--params");
  const auto p = params_from_json(read_json(run.opt.params));
  const auto data = simulate(p, run.opt.length, run.opt.burnin, run.seed);
  write_series_csv(run.path("data.csv"), series_table(p.graph, data, run.opt.observed_only));
  run.artifacts.push_back("data.csv");
}

void cmd_exact_cov(Run& run) {
  need(run.opt.params, "--params");
  const auto p = params_from_json(read_json(run.opt.params));
  const auto table = exact_autocov(p, run.opt.max_lag);
  Json j = covariance_to_json(p.graph, table);
  j["spectral_margin"] = spectral_margin(p);
  run.json("covariance.json", j);
}

void cmd_identify(Run& run) {
  need(run.opt.graph, "--graph");
  const auto g = graph_from_json(read_json(run.opt.graph));
  const auto [lo, hi] = parse_range(run.opt.delta);
  SweepOptions so;
  so.delta_lo = lo;
  so.delta_hi = hi;
  so.tau_mode = run.opt.tight_tau ? TauMode::Tight : TauMode::Default;
  const auto rs = delta_sweep(g, Vertex{g.observed(0), 0}, so);
  Json j = sweep_to_json(g, rs);
  j["graph"] = graph_to_json(g);
  run.json("identify.json", j);
  const auto best = preferred_result(rs);
  if (best) run.json("spec.json", spec_to_json(g, rs[*best].spec));
}

Eigen::MatrixXd load_data(const Run& run, const Json& spec_json) {
  need(run.opt.data, "--data");
  return data_for_frame(naming_frame(spec_json), read_series_csv(run.opt.data));
}

void cmd_estimate(Run& run) {
  need(run.opt.spec, "--spec");
  const Json sj = read_json(run.opt.spec);
  const auto spec = spec_from_json(sj);
  const auto data = load_data(run, sj);
  const auto est = estimate_from_data(data, spec, run.opt.demean_user);
  run.json("estimate.json", estimate_to_json(naming_frame(sj), est));
}

void cmd_bootstrap(Run& run) {
  need(run.opt.spec, "--spec");
  const Json sj = read_json(run.opt.spec);
  const auto spec = spec_from_json(sj);
  const auto data = load_data(run, sj);
  std::int64_t L = run.opt.block_len;
  if (L <= 0)
    L = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::cbrt(static_cast<double>(data.cols()))));
  const auto b = block_bootstrap(data, spec, L, run.opt.reps, run.seed, run.opt.demean_user);
  Json j = bootstrap_to_json(naming_frame(sj), b);
  j["block_len"] = L;
  run.json("bootstrap.json", j);
}

void write_study(Run& run, const std::vector<ErrorRow>& rows) {
  write_error_rows_csv(run.path("errors.csv"), rows);
  run.artifacts.push_back("errors.csv");
  write_median_rows_csv(run.path("medians.csv"), median_errors(rows));
  run.artifacts.push_back("medians.csv");
}

void cmd_experiment_random(Run& run) {
  RandomGraphProtocol pr;
  if (!run.opt.config.empty()) pr = protocol_from_json(read_json(run.opt.config));
  pr.params_per_graph = run.opt.n_params;
  const auto grid = parse_grid(run.opt.t_grid);
  AcceptanceLog log;
  const auto insts = accept_instances(pr, static_cast<std::size_t>(run.opt.graphs),
                                      derive_seed(run.seed, 0), run.opt.max_attempts, &log);
  std::vector<StudyInstance> study;
  Json graphs = Json::array();
  for (std::size_t i = 0; i < insts.size(); ++i) {
    study.push_back(study_instance(insts[i], static_cast<std::int64_t>(i)));
    graphs.push_back({{"instance", i},
                      {"seed", insts[i].seed},
                      {"graph", graph_to_json(insts[i].graph)},
                      {"passing_deltas", insts[i].passing},
                      {"certificate", certificate_to_json(insts[i].graph, insts[i].chosen.certificate)},
                      {"spec", spec_to_json(insts[i].graph, insts[i].chosen.spec)}});
  }
  StudyOptions so;
  so.burnin = run.opt.burnin;
  so.demean = run.opt.demean;
  const auto rows = convergence_study(study, grid, derive_seed(run.seed, 1), so);
  write_study(run, rows);
  std::map<std::int64_t, std::pair<std::size_t, std::size_t>> above;  // T -> (count, total)
  for (const auto& m : median_errors(rows)) {
    auto& a = above[m.T];
    ++a.second;
    if (!(m.median_abs_error <= 1.0)) ++a.first;
  }
  Json per_t = Json::array();
  for (const auto& [T, a] : above)
    per_t.push_back({{"T", T}, {"median_error_above_1", a.first}, {"graphs", a.second}});
  run.json("instances.json", graphs);
  run.json("summary.json", {{"accepted", insts.size()},
                            {"attempts", log.attempts},
                            {"not_identified", log.not_identified},
                            {"no_stable_params", log.no_stable_params},
                            {"per_T", per_t}});
}

void cmd_replicate_example(Run& run) {
  const auto ex = worked_example(parse_example(run.opt.example));
  const auto grid = parse_grid(run.opt.t_grid);
  const auto inst = example_instance(ex, run.opt.n_params, derive_seed(run.seed, 0));
  StudyOptions so;
  so.burnin = run.opt.burnin;
  so.demean = run.opt.demean;
  write_study(run, convergence_study({inst}, grid, derive_seed(run.seed, 1), so));
  run.json("example.json", {{"name", ex.name},
                            {"graph", graph_to_json(ex.graph)},
                            {"certificate", certificate_to_json(ex.graph, ex.certificate)},
                            {"spec", spec_to_json(ex.graph, ex.spec)}});
}

void cmd_electricity(Run& run) {
  if (run.opt.model < 1 || run.opt.model > 3) throw SpecError("--model must be 1, 2 or 3");
  auto m = ElectricityModel::defaults(static_cast<ElectricityVariant>(run.opt.model));
  if (!run.opt.config.empty()) m = electricity_from_json(read_json(run.opt.config));
  const auto rep = electricity_semisynth(m, run.opt.row, run.opt.length, run.opt.reps, run.seed,
                                         run.opt.burnin);
  Json pop;
  try {
    pop = electricity_population_estimate(m, run.opt.row);
  } catch (const NumericalError& e) {
    pop = e.what();
  }
  {
    std::ofstream os(run.path("estimates.csv"), std::ios::binary);
    os << "repetition_ok_index,beta_P_hat\n";
    for (std::size_t i = 0; i < rep.estimates.size(); ++i)
      os << i << ',' << format_double(rep.estimates[i]) << '\n';
    run.artifacts.push_back("estimates.csv");
  }
  run.json("electricity.json", {{"model", electricity_to_json(m)},
                                {"row", run.opt.row},
                                {"row_valid_for_model", estimator_row_valid(run.opt.row, m.variant)},
                                {"T", run.opt.length},
                                {"repetitions", run.opt.reps},
                                {"failures", rep.failures},
                                {"q025", rep.q025},
                                {"median", rep.median},
                                {"q975", rep.q975},
                                {"population_estimate", pop}});
}

Json resolved(const Run& run) {
  const auto& o = run.opt;
  return {{"command", o.command},   {"graph", o.graph},         {"params", o.params},
          {"data", o.data},         {"spec", o.spec},           {"config", o.config},
          {"example", o.example},   {"out", o.out},             {"delta", o.delta},
          {"t_grid", o.t_grid},     {"seed", run.seed},         {"threads", o.threads},
          {"reps", o.reps},         {"block_len", o.block_len}, {"length", o.length},
          {"burnin", o.burnin},     {"max_lag", o.max_lag},     {"graphs", o.graphs},
          {"n_params", o.n_params}, {"model", o.model},         {"row", o.row},
          {"demean", o.command == "estimate" || o.command == "bootstrap" ? o.demean_user : o.demean},     {"tight_tau", o.tight_tau}, {"observed_only", o.observed_only}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int fail(const Options& opt, int code, const std::string& kind, const std::string& msg) {
  const Json err = {{"error", kind}, {"message", msg}, {"exit_code", code}};
  std::cerr << err.dump() << '\n';
  try {
    if (fs::is_directory(opt.out)) write_json((fs::path(opt.out) / "error.json").string(), err);
  } catch (...) {
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identification and estimation of direct effects in latently confounded SVAR processes"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (falls back to SVARID_SEED, then 0)");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--threads", opt.threads, "worker cap (0 = OpenMP default)");
  app.set_version_flag("--version", SVARID_VERSION);

  auto* sim = app.add_subcommand("simulate", "simulate an SVAR process to CSV");
  sim->add_option("--params", opt.params)->required();
  sim->add_option("--length", opt.length, "number of time points");
  sim->add_option("--burnin", opt.burnin);
  sim->add_flag("--observed-only", opt.observed_only);

  auto* cov = app.add_subcommand("exact-cov", "exact autocovariances of an SVAR process");
  cov->add_option("--params", opt.params)->required();
  cov->add_option("--max-lag", opt.max_lag);

  auto* id = app.add_subcommand("identify", "sweep delta and emit certificates and specs");
  id->add_option("--graph", opt.graph)->required();
  id->add_option("--delta", opt.delta, "delta range a..b");
  id->add_flag("--tight-tau", opt.tight_tau);

  auto* est = app.add_subcommand("estimate", "solve the estimator on data");
  est->add_option("--data", opt.data)->required();
  est->add_option("--spec", opt.spec)->required();
  est->add_flag("--demean,!--no-demean", opt.demean_user, "subtract sample means (default on)");

  auto* boot = app.add_subcommand("bootstrap", "moving-block bootstrap of an estimator");
  boot->add_option("--data", opt.data)->required();
  boot->add_option("--spec", opt.spec)->required();
  boot->add_option("--reps", opt.reps);
  boot->add_option("--block-len", opt.block_len, "block length (0 = T^(1/3))");
  boot->add_flag("--demean,!--no-demean", opt.demean_user, "subtract sample means (default on)");

  auto* rnd = app.add_subcommand("experiment-random", "random-graph convergence study");
  rnd->add_option("--config", opt.config, "protocol JSON");
  rnd->add_option("--graphs", opt.graphs);
  rnd->add_option("--params-per-graph", opt.n_params);
  rnd->add_option("--t-grid", opt.t_grid);
  rnd->add_option("--burnin", opt.burnin);
  rnd->add_option("--max-attempts", opt.max_attempts);
  rnd->add_flag("--demean", opt.demean);

  auto* rep = app.add_subcommand("replicate-example", "convergence study on a worked example");
  rep->add_option("--example", opt.example, "Ex3_6, F1, F2 or F3");
  rep->add_option("--t-grid", opt.t_grid);
  rep->add_option("--n-params", opt.n_params);
  rep->add_option("--burnin", opt.burnin);
  rep->add_flag("--demean", opt.demean);

  auto* el = app.add_subcommand("electricity", "semi-synthetic electricity market study");
  el->add_option("--model", opt.model, "1, 2 or 3");
  el->add_option("--row", opt.row, "estimator row 1..5");
  el->add_option("--config", opt.config, "model JSON");
  el->add_option("--length", opt.length);
  el->add_option("--reps", opt.reps);
  el->add_option("--burnin", opt.burnin);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(opt, 2, "usage", e.what());
  }

  Run run;
  run.opt = opt;
  const auto* sub = app.get_subcommands().front();
  run.opt.command = sub->get_name();
  if (sub == el && !el->get_option("--length")->count()) run.opt.length = 27072;
  try {
    if (seed_opt->count()) {
      run.seed = seed_flag;
    } else if (const char* env = std::getenv("SVARID_SEED")) {
      try {
        run.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw SpecError("SVARID_SEED is not an unsigned integer");
      }
    }
    if (run.opt.threads < 0) throw SpecError("--threads must be nonnegative");
    if (run.opt.threads > 0) omp_set_num_threads(run.opt.threads);
    fs::create_directories(run.opt.out);

    if (sub == sim) cmd_simulate(run);
    else if (sub == cov) cmd_exact_cov(run);
    else if (sub == id) cmd_identify(run);
    else if (sub == est) cmd_estimate(run);
    else if (sub == boot) cmd_bootstrap(run);
    else if (sub == rnd) cmd_experiment_random(run);
    else if (sub == rep) cmd_replicate_example(run);
    else if (sub == el) cmd_electricity(run);

    write_json(run.path("manifest.json"), {{"version", SVARID_VERSION},
                                           {"timestamp", timestamp()},
                                           {"config", resolved(run)},
                                           {"artifacts", run.artifacts}});
  } catch (const SpecError& e) {
    return fail(run.opt, 2, "spec", e.what());
  } catch (const NumericalError& e) {
    return fail(run.opt, 3, "numerical", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(run.opt, 2, "io", e.what());
  }
  return 0;
}
