#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "foliscope/harness.hpp"

// foliscope: batch experiment runner for the foliation laboratory.
// Subcommands share one config structure; precedence is CLI flags over
// config file over defaults.

namespace {

void apply_config_file(fol::ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  auto get = [&](const char* key, auto& slot) {
    using T = std::decay_t<decltype(slot)>;
    if (j.contains(key)) slot = j[key].get<T>();
  };
  get("foliation", cfg.foliation);
  get("out_dir", cfg.out_dir);
  get("seed", cfg.seed);
  get("steps", cfg.steps);
  get("dt", cfg.dt);
  get("r", cfg.r);
  get("grid", cfg.grid);
  get("jobs", cfg.jobs);
  get("lambda_schedule", cfg.lambda_schedule);
  get("eta", cfg.eta);
  get("s_range", cfg.s_range);
  get("epsilon", cfg.epsilon);
  get("eps0", cfg.eps0);
  get("window", cfg.window);
  get("t1", cfg.t1);
  get("t2", cfg.t2);
}

void add_common(CLI::App* cmd, fol::ExperimentConfig& cfg,
                std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file");
  cmd->add_option("--foliation", cfg.foliation,
                  "preset (linear:eta=a+bi, jouanolou:d) or JSON file");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "RNG seed (mandatory for reproducibility)")
      ->required();
  cmd->add_option("--steps", cfg.steps, "Monte Carlo steps / rays");
  cmd->add_option("--dt", cfg.dt, "Brownian leaf-time increment variance");
  cmd->add_option("--r", cfg.r, "Nevanlinna index in (0,1)");
  cmd->add_option("--grid", cfg.grid, "grid resolution N (N x N cells)");
  cmd->add_option("--jobs", cfg.jobs, "worker threads")
      ->envname("FOLISCOPE_JOBS");
  cmd->add_option("--lambda-schedule", cfg.lambda_schedule,
                  "comma-separated dilation factors");
  cmd->add_option("--eta", cfg.eta, "sector parameter a+bi, b>0");
  cmd->add_option("--s-range", cfg.s_range, "lo:hi:step");
  cmd->add_option("--epsilon", cfg.epsilon, "region-tagging epsilon");
  cmd->add_option("--eps0", cfg.eps0, "theta window half-width");
  cmd->add_option("--window", cfg.window,
                  "chart:cxre,cxim,cyre,cyim,radius");
  cmd->add_option("--t1", cfg.t1, "first cloud: csv path, omega[:n] or line");
  cmd->add_option("--t2", cfg.t2, "second cloud: csv path, omega[:n] or line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foliscope: numerical laboratory for foliated surfaces"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    const char* experiment;
  };
  const Sub subs[] = {
      {"trace", "follow a leaf along a complex-time polyline", "trace"},
      {"nevanlinna", "flow-disc logarithmic averaging", "nevanlinna"},
      {"brownian", "leafwise Brownian occupation measure", "brownian"},
      {"density", "tangent-current density mass along the diagonal", "density"},
      {"sector-lab", "hyperbolic-sector experiments", ""},
      {"lemma-check", "sector lemma suite over the standard etas",
       "lemma-check"},
      {"unique-ergodicity", "multi-start averaging comparison",
       "unique-ergodicity"},
  };

  fol::ExperimentConfig cfg;
  std::string config_path;
  std::string sector_experiment = "lemma-g-int";

  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, cfg, config_path);
    if (std::string(s.name) == "sector-lab")
      cmd->add_option("--experiment", sector_experiment,
                      "lemma-axe-sum|lemma-g-int|lemma-diag|theta-slice|roots");
    cmd->callback([&cfg, &config_path, &sector_experiment, s]() {
      if (!config_path.empty()) {
        // flags win over the file: reparse happens automatically because
        // CLI11 already stored flag values; file fills untouched slots only
        fol::ExperimentConfig file_cfg = cfg;
        apply_config_file(file_cfg, config_path);
        // overlay: any flag the user passed was already written into cfg,
        // so copy file values only where cfg still holds the default
        fol::ExperimentConfig defaults;
        auto pick = [](auto& dst, const auto& cli_v, const auto& file_v,
                       const auto& def_v) { dst = cli_v != def_v ? cli_v : file_v; };
        pick(file_cfg.foliation, cfg.foliation, file_cfg.foliation,
             defaults.foliation);
        pick(file_cfg.out_dir, cfg.out_dir, file_cfg.out_dir, defaults.out_dir);
        pick(file_cfg.steps, cfg.steps, file_cfg.steps, defaults.steps);
        pick(file_cfg.dt, cfg.dt, file_cfg.dt, defaults.dt);
        pick(file_cfg.r, cfg.r, file_cfg.r, defaults.r);
        pick(file_cfg.grid, cfg.grid, file_cfg.grid, defaults.grid);
        pick(file_cfg.jobs, cfg.jobs, file_cfg.jobs, defaults.jobs);
        pick(file_cfg.lambda_schedule, cfg.lambda_schedule,
             file_cfg.lambda_schedule, defaults.lambda_schedule);
        pick(file_cfg.eta, cfg.eta, file_cfg.eta, defaults.eta);
        pick(file_cfg.s_range, cfg.s_range, file_cfg.s_range, defaults.s_range);
        pick(file_cfg.epsilon, cfg.epsilon, file_cfg.epsilon, defaults.epsilon);
        pick(file_cfg.eps0, cfg.eps0, file_cfg.eps0, defaults.eps0);
        pick(file_cfg.window, cfg.window, file_cfg.window, defaults.window);
        pick(file_cfg.t1, cfg.t1, file_cfg.t1, defaults.t1);
        pick(file_cfg.t2, cfg.t2, file_cfg.t2, defaults.t2);
        file_cfg.seed = cfg.seed;
        cfg = file_cfg;
      }
      cfg.experiment = *s.experiment ? s.experiment : sector_experiment;
    });
  }

  CLI11_PARSE(app, argc, argv);
  return fol::run_experiment(cfg);
}
