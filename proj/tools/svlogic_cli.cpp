// svlogic: run single transients or preset sweeps.
//
//   svlogic run --config configs/default.ini --out out/run1 --seed 7
//   svlogic run --preset fig8-inverter --point current=+200uA --out out/inv
//   svlogic sweep --preset fig7-current --out out/fig7 --jobs 4 --seeds 5
//   svlogic list-presets

#include "svlogic/config.hpp"
#include "svlogic/errors.hpp"
#include "svlogic/presets.hpp"
#include "svlogic/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace svl;

constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;

device::DeviceConfig base_config(const std::string& path, const std::vector<std::string>& sets,
                                 std::optional<double> temperature) {
  device::DeviceConfig cfg = path.empty() ? presets::calibrated_config() : config::load_config(path);
  for (const auto& s : sets) config::apply_override(cfg, s);
  if (temperature) cfg.sim.temperature = *temperature;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-valve domain-wall logic simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset_name, point_label;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<double> temperature;
  int jobs = 1, seeds = 1;
  std::uint64_t master_seed = 1;

  auto* run = app.add_subcommand("run", "run one transient and write its CSVs");
  run->add_option("--config", config_path, "INI config file (default: the calibrated built-in config)");
  run->add_option("--preset", preset_name, "apply a preset's overrides on top of the config");
  run->add_option("--point", point_label, "preset point label (default: the first point)");
  run->add_option("--set", sets, "override, section.key=value (repeatable)");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "RNG seed (default: [sim] seed)");
  run->add_option("--temperature", temperature, "temperature in K, overrides the config");

  auto* sweep = app.add_subcommand("sweep", "run every point of a preset for several seeds");
  sweep->add_option("--preset", preset_name, "preset name")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", seeds, "runs per point")->check(CLI::PositiveNumber);
  sweep->add_option("--master-seed", master_seed, "seed the per-run seeds derive from");
  sweep->add_option("--config", config_path, "base config (default: the calibrated built-in config)");
  sweep->add_option("--set", sets, "override applied to the base config (repeatable)");
  sweep->add_option("--temperature", temperature, "temperature in K for every run");

  auto* list = app.add_subcommand("list-presets", "print the available presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& p : presets::all()) {
        std::cout << p.name << "  [" << p.anchor << "]  " << p.points.size() << " point(s)  " << p.description
                  << '\n';
      }
      return 0;
    }

    if (*run) {
      device::DeviceConfig cfg = base_config(config_path, {}, std::nullopt);
      if (!preset_name.empty()) {
        const auto& p = presets::find(preset_name);
        const presets::Point* pt = &p.points.front();
        if (!point_label.empty()) {
          pt = nullptr;
          for (const auto& q : p.points) {
            if (q.label == point_label) pt = &q;
          }
          if (!pt) throw ConfigError("preset " + preset_name + " has no point '" + point_label + "'");
        }
        cfg = presets::point_config(p, *pt, cfg);
      }
      for (const auto& s : sets) config::apply_override(cfg, s);
      if (temperature) cfg.sim.temperature = *temperature;
      const std::uint64_t s = seed.value_or(cfg.sim.seed);
      const auto res = runner::run_to_directory(cfg, s, out_dir);
      std::cout << runner::summary_text(device::build(cfg), res.report, s);
      std::cout << "wrote " << out_dir << '\n';
      return 0;
    }

    if (*sweep) {
      runner::SweepOptions opt;
      opt.preset = preset_name;
      opt.out = out_dir;
      opt.jobs = jobs;
      opt.seeds = seeds;
      opt.master_seed = master_seed;
      opt.base = base_config(config_path, sets, temperature);
      const auto res = runner::run_sweep(opt);
      std::cout << res.runs << " run(s), " << res.failures << " failed; manifest at " << out_dir
                << "/manifest.json\n";
      return res.failures == 0 ? 0 : kExitPhysics;
    }
  } catch (const PhysicsAbort& e) {
    std::cerr << "physics abort: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
