// Command-line front end: parse a config, dispatch a single simulation or
// the verification suites, emit plot-ready CSV and JSON reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmfsim/dmfsim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Config assembly: file (or built-in defaults), then --set overrides applied
// on the canonical serialization, then --seed / --threads.
dmfsim::ExperimentConfig assemble_config(const std::string& config_path,
                                         const std::vector<std::string>& overrides,
                                         std::optional<std::uint64_t> seed,
                                         std::optional<int> threads) {
  dmfsim::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = dmfsim::parse_config(read_file(config_path));
  if (!overrides.empty()) {
    std::string text = dmfsim::serialize_config(cfg);
    for (const auto& ov : overrides) {
      std::size_t eq = ov.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("--set expects key=value, got '" + ov + "'");
      const std::string key = ov.substr(0, eq);
      const std::string value = ov.substr(eq + 1);
      std::istringstream lines(text);
      std::ostringstream rebuilt;
      std::string line;
      bool replaced = false;
      while (std::getline(lines, line)) {
        if (line.rfind(key + " = ", 0) == 0) {
          rebuilt << key << " = " << value << "\n";
          replaced = true;
        } else {
          rebuilt << line << "\n";
        }
      }
      if (!replaced) rebuilt << key << " = " << value << "\n";
      text = rebuilt.str();
    }
    cfg = dmfsim::parse_config(text);
  }
  if (seed) cfg.master_seed = *seed;
  if (threads) cfg.threads = *threads;
  return cfg;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DMFSIM_OUT")) return env;
  return ".";
}

json provenance(const dmfsim::ExperimentConfig& cfg) {
  return json{{"version", dmfsim::kVersion},
              {"config_hash", dmfsim::config_hash(cfg)},
              {"master_seed", cfg.master_seed}};
}

int cmd_simulate_pdmp(const dmfsim::ExperimentConfig& cfg, std::size_t n,
                      const fs::path& out_dir) {
  const auto env = dmfsim::sample_environment(
      cfg.model.disorder, n, dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-env")));
  dmfsim::CounterRng init_rng(
      dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-init")));
  const double x0 = cfg.model.init_particle.sample(init_rng, n);
  const auto path = dmfsim::simulate_pdmp(
      cfg.model, env, x0,
      dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-pdmp")));
  dmfsim::CsvBuilder csv("time,state,particle_index", dmfsim::config_hash(cfg),
                         cfg.master_seed);
  csv.raw_row(dmfsim::fmt17(path.t0) + "," + dmfsim::fmt17(path.x0) + ",");
  for (const auto& e : path.events)
    csv.raw_row(dmfsim::fmt17(e.time) + "," + dmfsim::fmt17(e.post_state) + "," +
                std::to_string(e.particle_index));
  csv.raw_row(dmfsim::fmt17(path.horizon) + "," +
              dmfsim::fmt17(dmfsim::path_value_at(path, path.horizon)) + ",");
  write_file(out_dir / "pdmp_path.csv", csv.str());
  std::cout << "wrote " << (out_dir / "pdmp_path.csv").string() << " (" << path.events.size()
            << " events, N=" << n << ")\n";
  return 0;
}

int cmd_simulate_limit(const dmfsim::ExperimentConfig& cfg, std::optional<double> w,
                       const fs::path& out_dir) {
  dmfsim::CounterRng init_rng(
      dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-init")));
  const double x0 = cfg.model.init_limit.sample(init_rng, 1);
  const std::uint64_t seed =
      dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-limit"));
  const auto path = w ? dmfsim::simulate_limit_given_w(cfg.model, *w, x0, cfg.dt, seed)
                      : dmfsim::simulate_annealed(cfg.model, x0, cfg.dt, seed);
  dmfsim::CsvBuilder csv("time,state", dmfsim::config_hash(cfg), cfg.master_seed);
  for (std::size_t k = 0; k < path.states.size(); ++k)
    csv.raw_row(dmfsim::fmt17(static_cast<double>(k) * path.dt) + "," +
                dmfsim::fmt17(path.states[k]));
  write_file(out_dir / "limit_path.csv", csv.str());
  std::cout << "wrote " << (out_dir / "limit_path.csv").string()
            << " (w=" << dmfsim::fmt17(path.w_used) << ")\n";
  return 0;
}

int cmd_couple(const dmfsim::ExperimentConfig& cfg, std::size_t n, const fs::path& out_dir) {
  const dmfsim::DisorderLaw law = cfg.coupler == dmfsim::CouplerKind::DyadicKmt
                                      ? dmfsim::DisorderLaw::rademacher()
                                      : cfg.model.disorder;
  const auto ks = dmfsim::sample_k_statistics(
      cfg.coupler, law, n, cfg.replicates,
      dmfsim::derive_seed(cfg.master_seed, dmfsim::stream_tag("cli-couple")), cfg.threads);
  const auto profile = dmfsim::k_tail_profile_from_samples(ks, n);
  dmfsim::CsvBuilder csv("x,tail_freq", dmfsim::config_hash(cfg), cfg.master_seed);
  for (std::size_t i = 0; i < profile.x_grid.size(); ++i)
    csv.raw_row(dmfsim::fmt17(profile.x_grid[i]) + "," + dmfsim::fmt17(profile.tail_freq[i]));
  write_file(out_dir / "k_tail.csv", csv.str());
  json fit = provenance(cfg);
  fit["gamma_hat"] = profile.gamma_hat;
  fit["lambda_hat"] = profile.lambda_hat;
  fit["r2"] = profile.r2;
  fit["n"] = profile.n;
  fit["replicates"] = profile.replicates;
  fit["degenerate"] = profile.degenerate;
  write_file(out_dir / "k_tail_fit.json", fit.dump(2) + "\n");
  std::cout << "coupler=" << dmfsim::coupler_name(cfg.coupler) << " N=" << n
            << " median K=" << dmfsim::fmt17(dmfsim::median(ks))
            << (profile.degenerate ? " (degenerate tail)" : "") << "\n";
  return 0;
}

int cmd_verify(const dmfsim::ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto report = dmfsim::run_verify(cfg);
  write_file(out_dir / "report.json", report.payload().dump(2) + "\n");
  write_file(out_dir / "timings.json", report.timings().dump(2) + "\n");
  for (const auto& suite : report.suites)
    for (const auto& [name, content] : suite.tables) write_file(out_dir / name, content);
  for (const auto& suite : report.suites)
    for (const auto& v : suite.verdicts)
      std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << suite.name << "/" << v.name
                << " value=" << dmfsim::fmt17(v.value) << " (" << v.criterion << ")\n";
  std::cout << (report.all_pass() ? "all verdicts passed" : "some verdicts FAILED")
            << "; report at " << (out_dir / "report.json").string() << "\n";
  return report.all_pass() ? 0 : 1;
}

int cmd_rate_fit(const std::string& csv_path, const fs::path& out_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path);
  std::vector<double> ns, gaps, ses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("N,", 0) == 0) continue;  // header
    std::istringstream row(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(row, tok, ',') && vals.size() < 3) vals.push_back(std::stod(tok));
    if (vals.size() < 3) throw std::runtime_error("rate-fit: need rows N,gap,se");
    ns.push_back(vals[0]);
    gaps.push_back(vals[1]);
    ses.push_back(vals[2]);
  }
  const auto fit = dmfsim::rate_fit(ns, gaps, ses);
  json out{{"version", dmfsim::kVersion},
           {"c_hat", fit.c_hat},
           {"loglog_slope", fit.loglog_slope},
           {"r2", fit.r2},
           {"degenerate", fit.degenerate}};
  write_file(out_dir / "rate_fit.json", out.dump(2) + "\n");
  std::cout << "c_hat=" << dmfsim::fmt17(fit.c_hat)
            << " loglog_slope=" << dmfsim::fmt17(fit.loglog_slope)
            << " r2=" << dmfsim::fmt17(fit.r2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dmfsim: disordered mean-field jump process simulation and verification"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  std::string config_path, out_flag;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> threads_flag;
  app.add_option("--config,-c", config_path, "experiment config file");
  app.add_option("--out,-o", out_flag, "output directory (default $DMFSIM_OUT or .)");
  app.add_option("--set", overrides, "override a config key, key=value (repeatable)");
  app.add_option("--seed", seed_flag, "master seed override");
  app.add_option("--threads", threads_flag, "worker count hint (0 = hardware)");

  auto* sim_pdmp = app.add_subcommand("simulate-pdmp", "one exact particle-system path");
  std::optional<std::size_t> n_flag;
  sim_pdmp->add_option("--n", n_flag, "particle count (default: config n or first grid entry)");

  auto* sim_limit = app.add_subcommand("simulate-limit", "one Euler-Maruyama limit path");
  std::optional<double> w_flag;
  sim_limit->add_option("--w", w_flag, "frozen Gaussian environment (default: annealed draw)");

  auto* couple = app.add_subcommand("couple", "K statistics and tail profile for a coupler");
  std::optional<std::size_t> couple_n_flag;
  couple->add_option("--n", couple_n_flag, "walk length (default: largest coupling grid entry)");
  std::string coupler_flag;
  couple->add_option("--coupler", coupler_flag,
                     "exact-gaussian | naive-quantile | dyadic-kmt (default: config)");
  std::optional<std::size_t> reps_flag;
  couple->add_option("--replicates", reps_flag, "coupled environments to draw");

  auto* verify = app.add_subcommand("verify", "run all verification suites");

  auto* rate_fit_cmd = app.add_subcommand("rate-fit", "fit gap(N) ~ c ln N / sqrt N from CSV");
  std::string gaps_csv;
  rate_fit_cmd->add_option("csv", gaps_csv, "CSV with rows N,gap,se")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir = resolve_out_dir(out_flag);
    fs::create_directories(out_dir);
    if (rate_fit_cmd->parsed()) return cmd_rate_fit(gaps_csv, out_dir);

    auto cfg = assemble_config(config_path, overrides, seed_flag, threads_flag);
    if (sim_pdmp->parsed())
      return cmd_simulate_pdmp(cfg, n_flag ? *n_flag : cfg.single_n(), out_dir);
    if (sim_limit->parsed()) return cmd_simulate_limit(cfg, w_flag, out_dir);
    if (couple->parsed()) {
      if (!coupler_flag.empty()) cfg.coupler = dmfsim::detail::parse_coupler(coupler_flag, 0);
      if (reps_flag) cfg.replicates = *reps_flag;
      const std::size_t n =
          couple_n_flag ? *couple_n_flag
                        : (std::size_t{1} << cfg.coupling_n_log2.back());
      return cmd_couple(cfg, n, out_dir);
    }
    if (verify->parsed()) return cmd_verify(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
