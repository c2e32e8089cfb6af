#include "whittleboot/bootstrap.hpp"
#include "whittleboot/family.hpp"
#include "whittleboot/report.hpp"
#include "whittleboot/simulation.hpp"
#include "whittleboot/spectral.hpp"
#include "whittleboot/sunspot.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace wb = whittleboot;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string input;
  std::string family = "ar:1";
  std::string variant = "standard";
  std::string log_term = "discrete";
  std::uint64_t seed = 1;
  std::string out_dir;
  int column = -1;
  std::optional<double> bandwidth;
};

struct BootFlags {
  Eigen::Index B = 400;
  std::optional<Eigen::Index> b;
};

wb::LogTerm parse_log_term(const std::string& s) {
  if (s == "discrete") return wb::LogTerm::discrete;
  if (s == "kolmogorov") return wb::LogTerm::kolmogorov;
  throw wb::InvalidInput("unknown log term '" + s + "' (discrete|kolmogorov)");
}

wb::BootstrapConfig make_config(const Common& c, const BootFlags& f) {
  wb::BootstrapConfig cfg;
  cfg.B = f.B;
  cfg.b = f.b;
  cfg.seed = c.seed;
  cfg.variant = wb::Variant::parse(c.variant);
  cfg.log_term = parse_log_term(c.log_term);
  cfg.bandwidth = c.bandwidth;
  return cfg;
}

// Writes to out_dir/name, or stdout when no directory was given.
void emit(const std::string& out_dir, const std::string& name, const std::string& text) {
  if (out_dir.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(out_dir);
  const fs::path p = fs::path(out_dir) / name;
  wb::write_text_file(p.string(), text);
  std::cerr << "wrote " << p.string() << "\n";
}

int cmd_fit(const Common& c) {
  const wb::TimeSeries x = wb::read_series_csv(c.input, c.column);
  const wb::FamilyPtr family = wb::make_family(c.family);
  wb::BootstrapConfig cfg = make_config(c, {});
  cfg.b = std::min<Eigen::Index>(x.size(), std::max<Eigen::Index>(4, wb::default_block_length(x.size())));
  const wb::VariantFit vf = wb::fit_variant(x, family, cfg);
  wb::Json j = wb::fit_report(vf.fit, vf.centre, vf.bandwidth, *vf.family, cfg.variant, x.size());
  if (vf.ar_order >= 0) j["boundary_ar_order"] = vf.ar_order;
  j["log_term"] = c.log_term;
  emit(c.out_dir, "fit.json", wb::dump(j));
  return vf.fit.converged ? 0 : kExitNumeric;
}

int cmd_bootstrap(const Common& c, const BootFlags& f) {
  const wb::TimeSeries x = wb::read_series_csv(c.input, c.column);
  const wb::FamilyPtr family = wb::make_family(c.family);
  const wb::BootstrapConfig cfg = make_config(c, f);
  const wb::BootstrapResult r = wb::run_hybrid_bootstrap(x, family, cfg);
  wb::Json j = wb::bootstrap_summary(r, *family, cfg);
  j["log_term"] = c.log_term;
  std::ostringstream csv;
  wb::write_samples_csv(r.distribution, csv);
  if (c.out_dir.empty()) {
    std::cout << wb::dump(j);
  } else {
    emit(c.out_dir, "bootstrap_summary.json", wb::dump(j));
    emit(c.out_dir, "bootstrap_samples.csv", csv.str());
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, bool full_scale, const std::string& out_dir) {
  wb::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = wb::experiment_config_from_json(wb::read_json_file(config_path));
  if (full_scale) cfg.apply_full_scale();
  cfg.validate();
  const wb::ExperimentResult res = wb::run_experiment(cfg);
  std::ostringstream csv;
  wb::write_experiment_csv(res, csv);
  const wb::Json summary = wb::experiment_summary(res, cfg);
  if (out_dir.empty()) {
    std::cout << csv.str();
  } else {
    emit(out_dir, "experiment.csv", csv.str());
    emit(out_dir, "experiment_summary.json", wb::dump(summary));
  }
  for (const auto& claim : summary["claims"]) {
    std::cerr << "model " << claim["model"].get<std::string>() << ", n = " << claim["n"].get<Eigen::Index>()
              << ": " << claim["claim"].get<std::string>() << " -> "
              << (claim["holds"].get<bool>() ? "holds" : "does not hold") << "\n";
  }
  return 0;
}

int cmd_sunspot(const Common& c, const BootFlags& f, int order) {
  const wb::TimeSeries x = wb::read_series_csv(c.input, c.column);
  const wb::SunspotAnalysis a = wb::analyze_sunspots(x, order, f.B, c.seed, f.b);
  std::ostringstream csv;
  csv.precision(17);
  csv << "lambda,period\n";
  for (std::size_t i = 0; i < a.replicate_lambdas.size(); ++i) {
    csv << a.replicate_lambdas[i] << "," << a.replicate_periods[i] << "\n";
  }
  const std::string json = wb::dump(wb::sunspot_report(a));
  if (c.out_dir.empty()) {
    std::cout << json;
  } else {
    emit(c.out_dir, "sunspot.json", json);
    emit(c.out_dir, "sunspot_replicates.csv", csv.str());
  }
  std::cerr << "AR(" << order << ") peak period " << a.period << " years, 95% CI [" << a.ci_low << ", "
            << a.ci_high << "], periodogram peak period " << a.periodogram_period << "\n";
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool needs_input) {
  auto* in = sub->add_option("--input,-i", c.input, "CSV with one value per line");
  if (needs_input) in->required();
  sub->add_option("--column", c.column, "field index for multi-column rows (-1: auto)");
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--out-dir,-o", c.out_dir, "output directory (stdout when absent)");
}

void add_model(CLI::App* sub, Common& c) {
  sub->add_option("--family,-f", c.family, "spectral family: ar:p | white");
  sub->add_option("--variant", c.variant, "standard | tapered:rho | debiased | boundary[:p]");
  sub->add_option("--log-term", c.log_term, "discrete | kolmogorov");
  sub->add_option("--bandwidth", c.bandwidth, "kernel half-width in radians (CV when absent)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid periodogram bootstrap for Whittle estimators"};
  app.require_subcommand(1);

  Common common;
  BootFlags boot;
  int order = 2;
  std::string config_path;
  bool full_scale = false;

  auto* fit = app.add_subcommand("fit", "Whittle fit and centering parameter");
  add_common(fit, common, true);
  add_model(fit, common);

  auto* bs = app.add_subcommand("bootstrap", "hybrid bootstrap distribution of sqrt(n)(theta-hat - theta)");
  add_common(bs, common, true);
  add_model(bs, common);
  bs->add_option("--B", boot.B, "bootstrap replicates");
  bs->add_option("--b", boot.b, "subsample block length");

  auto* ex = app.add_subcommand("experiment", "d1 simulation experiment");
  ex->add_option("--config,-c", config_path, "JSON config");
  ex->add_flag("--full-scale", full_scale, "R = 10000, reps = 500, B = 1000");
  ex->add_option("--out-dir,-o", common.out_dir, "output directory (stdout when absent)");

  auto* ss = app.add_subcommand("sunspot", "AR spectral peak periodicity with bootstrap CI");
  add_common(ss, common, true);
  ss->add_option("--order,-p", order, "AR order");
  ss->add_option("--B", boot.B, "bootstrap replicates");
  ss->add_option("--b", boot.b, "subsample block length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*fit) return cmd_fit(common);
    if (*bs) return cmd_bootstrap(common, boot);
    if (*ex) return cmd_experiment(config_path, full_scale, common.out_dir);
    if (*ss) return cmd_sunspot(common, boot, order);
  } catch (const wb::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const wb::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const wb::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitInput;
  } catch (const wb::DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
