#include "svlogic/runner.hpp"

#include "svlogic/config.hpp"
#include "svlogic/errors.hpp"
#include "svlogic/presets.hpp"
#include "svlogic/transient.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace svl::runner {

void write_file_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string summary_text(const device::Device& dev, const analysis::SwitchReport& r, std::uint64_t seed) {
  const auto& c = dev.config;
  char buf[256];
  std::ostringstream s;
  s << "device            " << device::to_string(dev.kind) << '\n';
  std::snprintf(buf, sizeof buf, "drive             %.6g uA nominal, %.6g uA in the circuit\n", c.drive.current * 1e6,
                c.drive.current * c.drive.current_scale * 1e6);
  s << buf;
  std::snprintf(buf, sizeof buf, "contacts          L_input %.4g nm, L_output %.4g nm, alpha_end %.4g\n",
                c.contacts.L_input * 1e9, c.contacts.L_output * 1e9, c.contacts.alpha_end);
  s << buf;
  std::snprintf(buf, sizeof buf, "temperature       %.4g K, seed %llu\n", c.sim.temperature,
                static_cast<unsigned long long>(seed));
  s << buf;
  s << "switched          " << (r.switched ? "yes" : "no") << '\n';
  if (r.switched) {
    std::snprintf(buf, sizeof buf, "delay             %.4f ns\n", r.delay * 1e9);
    s << buf;
  }
  if (r.dw_created) {
    std::snprintf(buf, sizeof buf, "wall created at   %.4f ns\n", r.dw_created_at * 1e9);
    s << buf;
  }
  std::snprintf(buf, sizeof buf, "energy (wiring)   %.4f fJ\n", r.energy * 1e15);
  s << buf;
  std::snprintf(buf, sizeof buf, "energy (device)   %.4f fJ\n", r.device_energy * 1e15);
  s << buf;
  s << "output            " << r.final_state << " (expected " << r.expected_state << ")\n";
  return s.str();
}

RunResult run_to_directory(const device::DeviceConfig& cfg, std::uint64_t seed, const fs::path& dir) {
  fs::create_directories(dir);
  device::DeviceConfig c = cfg;
  c.sim.seed = seed;
  device::Device dev = device::build(c);
  const auto opt = transient::TransientOptions::from(c);
  const auto trace = transient::run_transient(dev, opt, seed);

  RunResult out;
  out.report = analysis::make_report(dev, trace);
  for (int ic : dev.input_contacts) out.final_inputs.push_back(dev.bit(dev.contacts[ic].wire));

  std::ostringstream t;
  transient::write_trace_csv(t, trace);
  write_file_atomic(dir / "trace.csv", t.str());
  std::ostringstream r;
  analysis::write_report_csv_header(r);
  analysis::write_report_csv_row(r, out.report);
  write_file_atomic(dir / "report.csv", r.str());
  write_file_atomic(dir / "config.ini", config::write_config(c));
  write_file_atomic(dir / "summary.txt", summary_text(dev, out.report, seed));
  out.files = {"trace.csv", "report.csv", "config.ini", "summary.txt"};
  for (std::size_t w = 0; w < dev.wires.size(); ++w) {
    std::ostringstream ws;
    mag::write_wire_csv(ws, dev.wires[w]);
    const std::string name = "wire_" + dev.wire_names[w] + ".csv";
    write_file_atomic(dir / name, ws.str());
    out.files.push_back(name);
  }
  return out;
}

namespace {

struct Job {
  std::string id;
  std::size_t point = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  device::DeviceConfig cfg;
  bool ok = false;
  std::string error;
  RunResult result;
};

std::string run_id(std::size_t point, int seed_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%02zu_s%02d", point, seed_index);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepOptions& opt) {
  const auto& preset = presets::find(opt.preset);
  if (opt.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (opt.seeds < 1) throw ConfigError("seeds must be at least 1");
  fs::create_directories(opt.out);

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < preset.points.size(); ++i) {
    const auto& pt = preset.points[i];
    // Config errors surface before any run starts.
    const auto cfg = presets::point_config(preset, pt, opt.base);
    cfg.validate();
    for (int k = 0; k < opt.seeds; ++k) {
      Job j;
      j.id = run_id(i, k);
      j.point = i;
      j.seed_index = k;
      j.seed = presets::derive_seed(opt.master_seed, preset.name + "/" + pt.label + "/" + std::to_string(k));
      j.cfg = cfg;
      jobs.push_back(std::move(j));
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      Job& j = jobs[i];
      try {
        j.result = run_to_directory(j.cfg, j.seed, opt.out / j.id);
        j.ok = true;
      } catch (const std::exception& e) {
        j.error = e.what();
      }
      if (!opt.quiet) {
        std::lock_guard<std::mutex> lock(log);
        std::cerr << "[" << j.id << "] " << preset.points[j.point].label << " seed " << j.seed << ": "
                  << (j.ok ? (j.result.report.switched ? "switched" : "no switch") : "error: " + j.error) << '\n';
      }
    }
  };
  const int n_threads = std::min<int>(opt.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  nlohmann::ordered_json manifest;
  manifest["preset"] = preset.name;
  manifest["anchor"] = preset.anchor;
  manifest["description"] = preset.description;
  manifest["master_seed"] = opt.master_seed;
  manifest["seeds"] = opt.seeds;
  manifest["seed_scheme"] = "splitmix64(master_seed ^ fnv1a64(preset + '/' + label + '/' + seed_index))";
  manifest["report"] = "report.csv";
  auto& runs = manifest["runs"] = nlohmann::ordered_json::array();

  std::ostringstream report;
  report << "run_id,label,seed_index,seed,";
  analysis::write_report_csv_header(report);

  SweepResult res;
  for (const auto& j : jobs) {
    ++res.runs;
    nlohmann::ordered_json r;
    r["id"] = j.id;
    r["label"] = preset.points[j.point].label;
    r["point"] = j.point;
    r["seed_index"] = j.seed_index;
    r["seed"] = j.seed;
    nlohmann::ordered_json params;
    for (const auto& [k, v] : config::flatten(j.cfg)) params[k] = v;
    r["params"] = params;
    if (j.ok) {
      r["status"] = "ok";
      nlohmann::ordered_json files = nlohmann::ordered_json::array();
      for (const auto& f : j.result.files) files.push_back(j.id + "/" + f);
      r["files"] = files;
      r["switched"] = j.result.report.switched;
      r["final_state"] = j.result.report.final_state;
      r["expected_state"] = j.result.report.expected_state;
      report << j.id << ',' << preset.points[j.point].label << ',' << j.seed_index << ',' << j.seed << ',';
      analysis::write_report_csv_row(report, j.result.report);
    } else {
      ++res.failures;
      r["status"] = "error";
      r["error"] = j.error;
    }
    runs.push_back(r);
  }
  write_file_atomic(opt.out / "report.csv", report.str());
  write_file_atomic(opt.out / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

}  // namespace svl::runner
