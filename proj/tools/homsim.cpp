// homsim: simulate, analyze, evaluate theory and run the reproduction checks.
//
//   homsim simulate        --config run.ini --out dir [--seed N]
//   homsim analyze         --config run.ini --out dir [--tags tags.csv]
//   homsim theory          --config run.ini --out dir
//   homsim reproduce-paper [--config run.ini] --out dir [--seed N]
//
// Exit codes: 0 success, 2 configuration error, 3 analysis error,
// 4 acceptance failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hom/acceptance.hpp"
#include "hom/config.hpp"
#include "hom/io.hpp"
#include "hom/parametric.hpp"
#include "hom/pipeline.hpp"
#include "hom/report.hpp"
#include "hom/run.hpp"
#include "hom/tags.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kAnalysisError = 3;
constexpr int kAcceptanceFailure = 4;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string tags;
};

hom::RunConfig load(Options const& o) {
  hom::RunConfig c = o.config.empty() ? hom::parse_config("") : hom::load_config(o.config);
  if (o.seed) {
    c.seed = *o.seed;
    c.pipeline.seed = *o.seed;
    c.parametric.seed = *o.seed;
  }
  return c;
}

int cmd_simulate(Options const& o) {
  hom::RunConfig const c = load(o);
  c.validate_for_simulation();
  fs::path const out(o.out);
  fs::create_directories(out);
  if (c.tier == hom::Tier::parametric) {
    auto const res = hom::run_parametric(c.parametric);
    auto const summary = hom::summarize_parametric(res, c.parametric);
    hom::write_file_atomic(out / "summary.txt", hom::format_summary(summary));
    std::cout << hom::format_summary(summary);
    return kOk;
  }
  auto const sim = hom::simulate(c.pipeline);
  hom::write_tags_csv(out / "tags.csv", sim.tags);
  auto const analysis = hom::analyze_tags(sim.tags, c, sim.duration_s);
  hom::write_analysis(out, analysis);
  std::cout << hom::format_summary(analysis.summary);
  return kOk;
}

int cmd_analyze(Options const& o) {
  hom::RunConfig const c = load(o);
  fs::path tags_path;
  if (!o.tags.empty()) {
    tags_path = o.tags;
  } else if (c.analysis.tags_file) {
    tags_path = *c.analysis.tags_file;
  } else {
    throw hom::ConfigError("analyze needs --tags or analysis.tags_file");
  }
  hom::TagStream tags;
  try {
    tags = hom::read_tags_csv(tags_path);
  } catch (hom::ConfigError const&) {
    throw;
  } catch (std::exception const& e) {
    throw hom::ConfigError("cannot read tags " + tags_path.string() + ": " + e.what());
  }
  std::optional<double> duration;
  if (c.tier != hom::Tier::parametric) duration = hom::simulated_duration(c);
  auto const analysis = hom::analyze_tags(tags, c, duration);
  hom::write_analysis(o.out, analysis);
  std::cout << hom::format_summary(analysis.summary);
  return kOk;
}

int cmd_theory(Options const& o) {
  hom::RunConfig const c = load(o);
  std::string const text = hom::format_rows(hom::theory_rows(c.theory));
  fs::create_directories(o.out);
  hom::write_file_atomic(fs::path(o.out) / "theory.txt", text);
  std::cout << text;
  return kOk;
}

int cmd_reproduce(Options const& o) {
  hom::AcceptanceOptions a;
  if (!o.config.empty()) {
    hom::RunConfig const c = load(o);
    if (c.seed) a.seed = *c.seed;
  }
  if (o.seed) a.seed = *o.seed;
  std::string report;
  bool all = true;
  for (auto const& r : hom::run_acceptance(a)) {
    std::string const line = hom::format_result(r);
    std::cout << line << std::endl;
    report += line + "\n";
    all = all && r.pass;
  }
  fs::create_directories(o.out);
  hom::write_file_atomic(fs::path(o.out) / "acceptance.txt", report);
  return all ? kOk : kAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HOM interference simulator and time-tag analyzer"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "run configuration (INI)");
    if (config_required) c->required();
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_option("--seed", seed, "run seed (overrides run.seed)");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate tags, histograms and a run summary");
  add_common(simulate, true);
  auto* analyze = app.add_subcommand("analyze", "analyze a tag CSV");
  add_common(analyze, true);
  analyze->add_option("--tags", opt.tags, "tag CSV (overrides analysis.tags_file)");
  auto* theory = app.add_subcommand("theory", "evaluate the closed-form model");
  add_common(theory, true);
  auto* reproduce = app.add_subcommand("reproduce-paper", "run every acceptance check");
  add_common(reproduce, false);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  for (auto* sub : {simulate, analyze, theory, reproduce}) {
    if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (analyze->parsed()) return cmd_analyze(opt);
    if (theory->parsed()) return cmd_theory(opt);
    return cmd_reproduce(opt);
  } catch (hom::ConfigError const& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (hom::DomainError const& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (hom::AnalysisError const& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kAnalysisError;
  } catch (fs::filesystem_error const& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (std::exception const& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kAnalysisError;
  }
}
