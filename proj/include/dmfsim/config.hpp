#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmfsim/coupling.hpp"
#include "dmfsim/model.hpp"
#include "dmfsim/test_functions.hpp"

namespace dmfsim {

inline constexpr const char* kVersion = "0.1.0";

// 17 significant digits: enough to round-trip any double exactly, which is
// what makes determinism byte-checkable.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ExperimentConfig {
  ModelSpec model;
  CouplerKind coupler = CouplerKind::DyadicKmt;
  double dt = 1e-3;
  std::vector<std::size_t> n_grid = {64, 256, 1024, 4096};
  std::optional<std::size_t> n_single;
  std::vector<double> times = {0.5, 1.0};
  std::vector<TestFunction> test_functions = {TestFunction::tanh_wave(1.0, 1.0)};
  std::size_t n_paths = 20000;
  std::size_t replicates = 500;
  std::vector<int> coupling_n_log2 = {8, 10, 12, 14, 16};
  std::uint64_t master_seed = 1;
  int threads = 0;

  std::size_t single_n() const { return n_single ? *n_single : n_grid.front(); }

  bool operator==(const ExperimentConfig& o) const {
    return model.drift == o.model.drift && model.rate == o.model.rate &&
           model.disorder == o.model.disorder &&
           model.init_particle == o.model.init_particle &&
           model.init_limit == o.model.init_limit && model.horizon == o.model.horizon &&
           coupler == o.coupler && dt == o.dt && n_grid == o.n_grid &&
           n_single == o.n_single && times == o.times &&
           test_functions == o.test_functions && n_paths == o.n_paths &&
           replicates == o.replicates && coupling_n_log2 == o.coupling_n_log2 &&
           master_seed == o.master_seed && threads == o.threads;
  }
};

class config_error : public std::runtime_error {
 public:
  config_error(std::size_t line, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line) + ": " + what) {}
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(line, "invalid number '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(line, "invalid integer '" + s + "'");
  }
}

// "name:p1,p2,..." -> (name, params)
inline std::pair<std::string, std::vector<double>> parse_tagged(const std::string& s,
                                                                std::size_t line) {
  std::size_t colon = s.find(':');
  std::string name = trim(colon == std::string::npos ? s : s.substr(0, colon));
  std::vector<double> params;
  if (colon != std::string::npos) {
    for (const auto& p : split(s.substr(colon + 1), ','))
      params.push_back(parse_double(p, line));
  }
  return {name, params};
}

inline DisorderLaw parse_law(const std::string& s, std::size_t line) {
  auto [name, params] = parse_tagged(s, line);
  try {
    if (name == "rademacher" && params.empty()) return DisorderLaw::rademacher();
    if (name == "uniform" && params.size() == 1)
      return DisorderLaw::uniform_symmetric(params[0]);
    if (name == "laplace" && params.size() == 1)
      return DisorderLaw::laplace_centered(params[0]);
    if (name == "gaussian" && params.size() == 1)
      return DisorderLaw::gaussian_centered(params[0]);
  } catch (const std::invalid_argument& e) {
    throw config_error(line, e.what());
  }
  throw config_error(line, "unknown disorder law '" + s +
                               "' (want rademacher | uniform:a | laplace:s | gaussian:sigma)");
}

inline Drift parse_drift(const std::string& s, std::size_t line) {
  auto [name, params] = parse_tagged(s, line);
  try {
    if (name == "linear" && params.size() == 2) return Drift::linear(params[0], params[1]);
    if (name == "tanh" && params.size() == 2)
      return Drift::tanh_drift(params[0], params[1]);
  } catch (const std::invalid_argument& e) {
    throw config_error(line, e.what());
  }
  throw config_error(line, "unknown drift '" + s + "' (want linear:alpha,c | tanh:scale,gain)");
}

inline Rate parse_rate(const std::string& s, std::size_t line) {
  auto [name, params] = parse_tagged(s, line);
  try {
    if (name == "const" && params.size() == 1) return Rate::constant(params[0]);
    if (name == "tanh" && params.size() == 3)
      return Rate::tanh_rate(params[0], params[1], params[2]);
  } catch (const std::invalid_argument& e) {
    throw config_error(line, e.what());
  }
  throw config_error(line, "unknown rate '" + s + "' (want const:lambda | tanh:f0,f1,kappa)");
}

inline InitialLaw parse_init(const std::string& s, std::size_t line) {
  auto [name, params] = parse_tagged(s, line);
  try {
    if (name == "dirac" && params.size() == 1) return InitialLaw::dirac(params[0]);
    if (name == "gaussian" && params.size() == 2)
      return InitialLaw::gaussian(params[0], params[1]);
    if (name == "perturbed-dirac" && params.size() == 3)
      return InitialLaw::perturbed_dirac(params[0], params[1], params[2]);
  } catch (const std::invalid_argument& e) {
    throw config_error(line, e.what());
  }
  throw config_error(line, "unknown initial law '" + s +
                               "' (want dirac:x0 | gaussian:m,s | perturbed-dirac:x0,eps,q)");
}

inline TestFunction parse_test_function(const std::string& s, std::size_t line) {
  auto [name, params] = parse_tagged(s, line);
  try {
    if (name == "tanh" && params.size() == 2)
      return TestFunction::tanh_wave(params[0], params[1]);
    if (name == "sin" && params.size() == 2)
      return TestFunction::sin_wave(params[0], params[1]);
    if (name == "gauss" && params.size() == 3)
      return TestFunction::gauss_bump(params[0], params[1], params[2]);
  } catch (const std::invalid_argument& e) {
    throw config_error(line, e.what());
  }
  throw config_error(line, "unknown test function '" + s +
                               "' (want tanh:a,k | sin:a,k | gauss:a,m,s)");
}

inline CouplerKind parse_coupler(const std::string& s, std::size_t line) {
  if (s == "exact-gaussian") return CouplerKind::ExactGaussian;
  if (s == "naive-quantile") return CouplerKind::NaiveQuantile;
  if (s == "dyadic-kmt") return CouplerKind::DyadicKmt;
  throw config_error(line, "unknown coupler '" + s +
                               "' (want exact-gaussian | naive-quantile | dyadic-kmt)");
}

inline std::string law_to_string(const DisorderLaw& law) {
  switch (law.kind()) {
    case DisorderKind::Rademacher: return "rademacher";
    case DisorderKind::UniformSymmetric: return "uniform:" + fmt17(law.param());
    case DisorderKind::LaplaceCentered: return "laplace:" + fmt17(law.param());
    case DisorderKind::GaussianCentered: return "gaussian:" + fmt17(law.param());
  }
  return "?";
}

inline std::string drift_to_string(const Drift& d) {
  if (d.kind() == Drift::Kind::Linear)
    return "linear:" + fmt17(d.alpha()) + "," + fmt17(d.c());
  return "tanh:" + fmt17(d.scale()) + "," + fmt17(d.gain());
}

inline std::string rate_to_string(const Rate& r) {
  if (r.kind() == Rate::Kind::Constant) return "const:" + fmt17(r.lambda());
  return "tanh:" + fmt17(r.f0()) + "," + fmt17(r.f1()) + "," + fmt17(r.kappa());
}

inline std::string init_to_string(const InitialLaw& l) {
  switch (l.kind()) {
    case InitialLaw::Kind::Dirac: return "dirac:" + fmt17(l.x0());
    case InitialLaw::Kind::Gaussian:
      return "gaussian:" + fmt17(l.mean()) + "," + fmt17(l.sd());
    case InitialLaw::Kind::PerturbedDirac:
      return "perturbed-dirac:" + fmt17(l.x0()) + "," + fmt17(l.eps()) + "," +
             fmt17(l.exponent());
  }
  return "?";
}

inline std::string test_function_to_string(const TestFunction& g) {
  switch (g.kind()) {
    case TestFunction::Kind::TanhWave:
      return "tanh:" + fmt17(g.amp()) + "," + fmt17(g.wavenumber());
    case TestFunction::Kind::SinWave:
      return "sin:" + fmt17(g.amp()) + "," + fmt17(g.wavenumber());
    case TestFunction::Kind::GaussBump:
      return "gauss:" + fmt17(g.amp()) + "," + fmt17(g.center()) + "," + fmt17(g.width());
  }
  return "?";
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.model.horizon > 0.0)) throw config_error("T must be > 0");
  if (!(cfg.dt > 0.0)) throw config_error("dt must be > 0");
  const double steps = cfg.model.horizon / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw config_error("T must be an integer multiple of dt");
  if (cfg.n_grid.empty()) throw config_error("n_grid must be nonempty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw config_error("n_grid entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw config_error("n_grid must be strictly increasing");
  }
  if (cfg.times.empty()) throw config_error("times must be nonempty");
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    if (cfg.times[i] <= 0.0 || cfg.times[i] > cfg.model.horizon * (1.0 + 1e-12))
      throw config_error("times must lie in (0, T]");
    if (i > 0 && cfg.times[i] < cfg.times[i - 1])
      throw config_error("times must be sorted");
    const double m = cfg.times[i] / cfg.dt;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
      throw config_error("times must sit on the dt grid");
  }
  if (cfg.test_functions.empty()) throw config_error("test_functions must be nonempty");
  if (cfg.test_functions.size() != 1 && cfg.test_functions.size() != cfg.times.size())
    throw config_error("test_functions: need one function or one per time point");
  if (cfg.n_paths < 1) throw config_error("n_paths must be >= 1");
  if (cfg.replicates < 1) throw config_error("replicates must be >= 1");
  if (cfg.threads < 0) throw config_error("threads must be >= 0");
  if (cfg.coupling_n_log2.empty()) throw config_error("coupling_n_log2 must be nonempty");
  for (std::size_t i = 0; i < cfg.coupling_n_log2.size(); ++i) {
    if (cfg.coupling_n_log2[i] < 1 || cfg.coupling_n_log2[i] > 20)
      throw config_error("coupling_n_log2 entries must be in 1..20");
    if (i > 0 && cfg.coupling_n_log2[i] <= cfg.coupling_n_log2[i - 1])
      throw config_error("coupling_n_log2 must be strictly increasing");
  }
  if (cfg.coupler == CouplerKind::DyadicKmt) {
    if (cfg.model.disorder.kind() != DisorderKind::Rademacher)
      throw config_error("coupler dyadic-kmt requires law = rademacher");
    for (std::size_t n : cfg.n_grid)
      if (n < 2 || (n & (n - 1)) != 0)
        throw config_error("coupler dyadic-kmt requires n_grid of powers of two");
  }
  if (cfg.coupler == CouplerKind::ExactGaussian &&
      cfg.model.disorder.kind() != DisorderKind::GaussianCentered)
    throw config_error("coupler exact-gaussian requires law = gaussian:sigma");
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<double> x0_override;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(line_no, "expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error(line_no, "expected 'key = value'");
    if (seen.count(key))
      throw config_error(line_no, "duplicate key '" + key + "' (first at line " +
                                      std::to_string(seen[key]) + ")");
    seen[key] = line_no;

    if (key == "law") {
      cfg.model.disorder = detail::parse_law(value, line_no);
    } else if (key == "coupler") {
      cfg.coupler = detail::parse_coupler(value, line_no);
    } else if (key == "drift") {
      cfg.model.drift = detail::parse_drift(value, line_no);
    } else if (key == "rate") {
      cfg.model.rate = detail::parse_rate(value, line_no);
    } else if (key == "init") {
      cfg.model.init_particle = detail::parse_init(value, line_no);
    } else if (key == "init_limit") {
      cfg.model.init_limit = detail::parse_init(value, line_no);
    } else if (key == "x0") {
      x0_override = detail::parse_double(value, line_no);
    } else if (key == "T") {
      cfg.model.horizon = detail::parse_double(value, line_no);
    } else if (key == "dt") {
      cfg.dt = detail::parse_double(value, line_no);
    } else if (key == "n") {
      cfg.n_single = static_cast<std::size_t>(detail::parse_u64(value, line_no));
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (const auto& tok : detail::split(value, ','))
        cfg.n_grid.push_back(static_cast<std::size_t>(detail::parse_u64(tok, line_no)));
    } else if (key == "times") {
      cfg.times.clear();
      for (const auto& tok : detail::split(value, ','))
        cfg.times.push_back(detail::parse_double(tok, line_no));
    } else if (key == "test_functions") {
      cfg.test_functions.clear();
      for (const auto& tok : detail::split(value, ';'))
        cfg.test_functions.push_back(detail::parse_test_function(tok, line_no));
    } else if (key == "n_paths") {
      cfg.n_paths = static_cast<std::size_t>(detail::parse_u64(value, line_no));
    } else if (key == "replicates") {
      cfg.replicates = static_cast<std::size_t>(detail::parse_u64(value, line_no));
    } else if (key == "coupling_n_log2") {
      cfg.coupling_n_log2.clear();
      for (const auto& tok : detail::split(value, ','))
        cfg.coupling_n_log2.push_back(static_cast<int>(detail::parse_u64(tok, line_no)));
    } else if (key == "master_seed") {
      cfg.master_seed = detail::parse_u64(value, line_no);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(detail::parse_u64(value, line_no));
    } else {
      throw config_error(line_no, "unknown key '" + key + "'");
    }
  }
  if (x0_override) {
    cfg.model.init_particle = InitialLaw::dirac(*x0_override);
    cfg.model.init_limit = InitialLaw::dirac(*x0_override);
  }
  validate_config(cfg);
  return cfg;
}

// Canonical text form; parse_config(serialize_config(cfg)) == cfg.
inline std::string serialize_config(const ExperimentConfig& cfg,
                                    bool include_threads = true) {
  std::ostringstream out;
  out << "law = " << detail::law_to_string(cfg.model.disorder) << "\n";
  out << "coupler = " << coupler_name(cfg.coupler) << "\n";
  out << "drift = " << detail::drift_to_string(cfg.model.drift) << "\n";
  out << "rate = " << detail::rate_to_string(cfg.model.rate) << "\n";
  out << "init = " << detail::init_to_string(cfg.model.init_particle) << "\n";
  out << "init_limit = " << detail::init_to_string(cfg.model.init_limit) << "\n";
  out << "T = " << fmt17(cfg.model.horizon) << "\n";
  out << "dt = " << fmt17(cfg.dt) << "\n";
  if (cfg.n_single) out << "n = " << *cfg.n_single << "\n";
  out << "n_grid = ";
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
    out << (i ? "," : "") << cfg.n_grid[i];
  out << "\n";
  out << "times = ";
  for (std::size_t i = 0; i < cfg.times.size(); ++i)
    out << (i ? "," : "") << fmt17(cfg.times[i]);
  out << "\n";
  out << "test_functions = ";
  for (std::size_t i = 0; i < cfg.test_functions.size(); ++i)
    out << (i ? ";" : "") << detail::test_function_to_string(cfg.test_functions[i]);
  out << "\n";
  out << "n_paths = " << cfg.n_paths << "\n";
  out << "replicates = " << cfg.replicates << "\n";
  out << "coupling_n_log2 = ";
  for (std::size_t i = 0; i < cfg.coupling_n_log2.size(); ++i)
    out << (i ? "," : "") << cfg.coupling_n_log2[i];
  out << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  if (include_threads) out << "threads = " << cfg.threads << "\n";
  return out.str();
}

// FNV-1a over the canonical serialization with the worker hint stripped:
// the hash identifies the experiment, and worker count must not change it.
inline std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canon = serialize_config(cfg, /*include_threads=*/false);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dmfsim
