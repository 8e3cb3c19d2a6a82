#include "cascaderisk/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cascaderisk/calibration.hpp"
#include "cascaderisk/contagion.hpp"
#include "cascaderisk/error.hpp"
#include "cascaderisk/experiments.hpp"
#include "cascaderisk/format.hpp"
#include "cascaderisk/network.hpp"
#include "cascaderisk/risk.hpp"
#include "cascaderisk/roi.hpp"

namespace cascaderisk::cli {

namespace {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"ingest", "cascade", "risk",  "roi",
                                              "sweep-eta", "sweep-alpha", "iso", "synth"};
  return names;
}

const std::vector<double>& default_eta_increases() {
  static const std::vector<double> grid{0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  return grid;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) s += ',';
    s += format_double(values[k]);
  }
  return s;
}

struct LoadedNetwork {
  FinancialNetwork net;
  std::size_t records = 0;
};

bool is_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.rfind("# nodes=", 0) == 0;
  }
  return false;
}

LoadedNetwork load_network(const RunConfig& cfg, std::ostream& err) {
  if (cfg.input.empty()) throw ParameterError("--input is required");
  if (cfg.input.rfind("synth:", 0) == 0) {
    SyntheticSpec base;
    base.rng_seed = cfg.rng_seed;
    return {generate_synthetic(parse_synthetic_spec(cfg.input, base)), 0};
  }
  const std::filesystem::path path(cfg.input);
  if (!std::filesystem::exists(path)) throw InputError("input file not found: " + cfg.input);
  if (is_snapshot(path)) return {read_snapshot(path), 0};

  auto ingested = ingest_transactions(path);
  for (const auto& w : ingested.warnings) err << "warning: " << w << '\n';
  std::optional<DateWindow> window;
  if (cfg.window_start || cfg.window_end) {
    if (!cfg.window_start || !cfg.window_end) {
      throw ParameterError("--window-start and --window-end must be given together");
    }
    try {
      window = DateWindow{parse_date(*cfg.window_start), parse_date(*cfg.window_end)};
    } catch (const InputError& e) {
      throw ParameterError(e.what());
    }
  }
  return {aggregate_window(ingested.records, window), ingested.records.size()};
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw OutputError("cannot create output directory " + dir_.string());
    }
  }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) const {
    const auto path = dir_ / name;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw OutputError("cannot write " + path.string());
    writer(file);
    file.flush();
    if (!file) throw OutputError("error while writing " + path.string());
  }

 private:
  std::filesystem::path dir_;
};

void validate_config(const RunConfig& cfg) {
  CalibrationParams{cfg.beta, cfg.eta, cfg.alpha}.validate();
  if (!(cfg.p_exo > 0.0 && cfg.p_exo <= 1.0)) throw ParameterError("--p-exo must lie in (0, 1]");
  cfg.rates.validate();
  if (cfg.threads == 0) throw ParameterError("--threads must be >= 1");
}

int dispatch(const RunConfig& cfg, const std::string& command, std::ostream& out, std::ostream& err) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    throw ParameterError("unknown command '" + command + "'");
  }
  validate_config(cfg);
  const auto loaded = load_network(cfg, err);
  const auto& net = loaded.net;
  for (const auto& issue : validate_network(net).warnings) err << "warning: " << issue.message << '\n';

  const OutputDir dir(cfg.output_dir);
  dir.write("run.cfg", [&](std::ostream& os) { os << render_config(cfg, command); });

  if (command == "ingest" || command == "synth") {
    const auto report = validate_network(net);
    if (!report.ok()) throw InputError(report.errors.front().message);
    dir.write("network.csv", [&](std::ostream& os) { write_snapshot(os, net); });
    out << "N=" << net.size() << " edges=" << net.edge_count() << " volume=" << format_double(net.total_volume());
    if (command == "ingest") out << " records=" << loaded.records;
    out << '\n';
    return kSuccess;
  }

  const CalibrationParams params{cfg.beta, cfg.eta, cfg.alpha};

  if (command == "cascade") {
    if (cfg.seed_node.empty()) throw ParameterError("--seed-node is required for cascade");
    const auto seed = net.index_of(cfg.seed_node);
    if (!seed) throw InputError("unknown seed node '" + cfg.seed_node + "'");
    const auto cal = calibrate(net, params);
    const auto outcome = run_cascade(cal, SeedSpec{*seed, 1.0}, FundPolicy::rescue(), CascadeOptions{cfg.trace});
    dir.write("cascade.csv", [&](std::ostream& os) {
      os << "node,final_distress,defaulted,rescue_payout\n";
      for (NodeIndex i = 0; i < net.size(); ++i) {
        os << net.node_id(i) << ',' << format_double(outcome.final_distress[i]) << ','
           << (outcome.is_defaulted(i) ? 1 : 0) << ',' << format_double(outcome.rescue_payouts[i]) << '\n';
      }
    });
    if (cfg.trace) dir.write("trace.csv", [&](std::ostream& os) { write_trace_csv(os, outcome, net); });
    out << "seed=" << cfg.seed_node << " defaults=" << outcome.defaulted.size() << " steps=" << outcome.steps
        << '\n';
    return kSuccess;
  }

  if (command == "risk" || command == "roi") {
    const auto cal = calibrate(net, params);
    const auto ens = run_ensemble(cal, FundPolicy::rescue(), EnsembleOptions{cfg.threads});
    const auto risk = risk_report(ens, cal.strengths(), cfg.p_exo);
    if (command == "risk") {
      dir.write("risk.csv", [&](std::ostream& os) { write_risk_csv(os, risk); });
      std::size_t total = 0;
      for (const auto d : risk.delta) total += d;
      out << "p^C=" << format_double(risk.cascade.system) << " N=" << net.size() << " defaults_total=" << total
          << " avg_DR=" << format_double(risk.debtrank.average) << '\n';
    } else {
      const auto roi = roi_report(cal, cfg.rates, risk.default_prob, DegenerateNodes::Skip);
      dir.write("roi.csv", [&](std::ostream& os) { write_roi_csv(os, roi); });
      out << "market_roi_ra_weighted=" << format_double(roi.market_weighted)
          << " market_roi_ra_unweighted=" << format_double(roi.market_unweighted) << " alpha=" << format_double(cfg.alpha)
          << '\n';
    }
    return kSuccess;
  }

  if (command == "sweep-eta" || command == "sweep-alpha") {
    SweepSpec spec;
    const bool eta = command == "sweep-eta";
    spec.varying = eta ? SweepParameter::Eta : SweepParameter::Alpha;
    spec.grid = !cfg.grid.empty() ? cfg.grid : (eta ? default_eta_grid() : default_alpha_grid());
    spec.fixed = eta ? cfg.alpha : cfg.eta;
    spec.beta = cfg.beta;
    spec.rates = cfg.rates;
    spec.p_exo = cfg.p_exo;
    spec.threads = cfg.threads;
    const auto rows = sweep(net, spec);
    dir.write("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, spec.varying, rows); });
    out << "rows=" << rows.size() << " p^C_first=" << format_double(rows.front().cascade_risk)
        << " p^C_last=" << format_double(rows.back().cascade_risk) << '\n';
    return kSuccess;
  }

  // iso
  IsoCurveSpec spec;
  spec.eta0 = cfg.eta;
  spec.eta_increases = !cfg.eta_increases.empty() ? cfg.eta_increases : default_eta_increases();
  spec.beta = cfg.beta;
  spec.threads = cfg.threads;
  const auto points = iso_curve(net, spec);
  dir.write("iso.csv", [&](std::ostream& os) { write_iso_csv(os, points); });
  std::size_t saturated = 0;
  for (const auto& p : points) saturated += p.saturated ? 1 : 0;
  out << "points=" << points.size() << " saturated=" << saturated << '\n';
  return kSuccess;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = line.substr(first, eq - first);
    auto value = line.substr(eq + 1);
    const auto strip = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      s = a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    entries[key] = value;
  }
  return entries;
}

bool flag_present(const std::vector<std::string>& args, const std::string& key) {
  const auto flag = "--" + key;
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

std::string render_config(const RunConfig& c, const std::string& command) {
  std::ostringstream os;
  os << "# command=" << command << '\n';
  os << "input=" << c.input << '\n';
  if (c.window_start) os << "window-start=" << *c.window_start << '\n';
  if (c.window_end) os << "window-end=" << *c.window_end << '\n';
  os << "beta=" << format_double(c.beta) << '\n';
  os << "eta=" << format_double(c.eta) << '\n';
  os << "alpha=" << format_double(c.alpha) << '\n';
  os << "p-exo=" << format_double(c.p_exo) << '\n';
  os << "roi-int=" << format_double(c.rates.roi_int) << '\n';
  os << "roi-ext=" << format_double(c.rates.roi_ext) << '\n';
  os << "roi-e=" << format_double(c.rates.roi_e) << '\n';
  os << "roi-f=" << format_double(c.rates.roi_f) << '\n';
  if (!c.seed_node.empty()) os << "seed-node=" << c.seed_node << '\n';
  os << "rng-seed=" << c.rng_seed << '\n';
  os << "trace=" << (c.trace ? "true" : "false") << '\n';
  if (!c.grid.empty()) os << "grid=" << join(c.grid) << '\n';
  if (!c.eta_increases.empty()) os << "eta-increases=" << join(c.eta_increases) << '\n';
  return os.str();
}

int execute_scenario(const RunConfig& config, const std::string& command, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, command, out, err);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << '\n';
    return kCalibrationInfeasible;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kOutputError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kInvariantViolation;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);

  // Fold --config entries in as flags, unless the flag is already given.
  std::string config_path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
  }
  if (!config_path.empty()) {
    std::map<std::string, std::string> entries;
    try {
      entries = read_config_file(config_path);
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const ParameterError& e) {
      err << "error: " << e.what() << '\n';
      return kBadArguments;
    }
    std::vector<std::string> extra;
    for (const auto& [key, value] : entries) {
      if (key == "config" || flag_present(args, key)) continue;
      if (key == "trace") {
        if (value == "true" || value == "1") extra.push_back("--trace");
        continue;
      }
      extra.push_back("--" + key + "=" + value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
  }

  RunConfig cfg;
  std::string command;
  std::string output_dir = cfg.output_dir.string();
  std::string window_start;
  std::string window_end;

  CLI::App app{"Cascade risk on interbank networks with a tax-funded rescue fund"};
  app.add_option("command", command, "ingest | cascade | risk | roi | sweep-eta | sweep-alpha | iso | synth")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--input", cfg.input, "edge-list or snapshot file, or synth:<spec>");
  app.add_option("--window-start", window_start, "first day of the aggregation window (YYYY-MM-DD)");
  app.add_option("--window-end", window_end, "last day of the aggregation window (YYYY-MM-DD)");
  app.add_option("--beta", cfg.beta, "balance multiplier");
  app.add_option("--eta", cfg.eta, "reserve fraction");
  app.add_option("--alpha", cfg.alpha, "rescue-fund tax rate");
  app.add_option("--p-exo", cfg.p_exo, "exogenous default probability");
  app.add_option("--roi-int", cfg.rates.roi_int, "return on interbank loans");
  app.add_option("--roi-ext", cfg.rates.roi_ext, "return on external assets");
  app.add_option("--roi-e", cfg.rates.roi_e, "return on the reserve");
  app.add_option("--roi-f", cfg.rates.roi_f, "return on the fund share");
  app.add_option("--seed-node", cfg.seed_node, "node id that defaults first (cascade)");
  app.add_option("--out", output_dir, "output directory");
  app.add_option("--config", config_path, "key=value parameter file");
  app.add_option("--rng-seed", cfg.rng_seed, "seed for synthetic networks");
  app.add_flag("--trace", cfg.trace, "write per-round distress trace (cascade)");
  app.add_option("--grid", cfg.grid, "sweep grid")->delimiter(',');
  app.add_option("--eta-increases", cfg.eta_increases, "relative eta increases (iso)")->delimiter(',');
  app.add_option("--threads", cfg.threads, "worker threads");

  std::vector<const char*> cargv{argv[0]};
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  }

  cfg.output_dir = output_dir;
  if (!window_start.empty()) cfg.window_start = window_start;
  if (!window_end.empty()) cfg.window_end = window_end;
  return execute_scenario(cfg, command, out, err);
}

}  // namespace cascaderisk::cli
