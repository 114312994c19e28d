// dblrot: batch front end for the double rotation toolkit. Each subcommand
// runs one experiment against a preset or JSON config and writes CSV/JSON
// artifacts under <out>/<subcommand>/<name>.* for external plotting.
//
// Exit codes: 0 success, 1 invalid configuration, 2 capacity cap hit,
// 3 statistical precondition failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "dblrot/analysis.hpp"
#include "dblrot/descriptor.hpp"
#include "dblrot/diffchain.hpp"
#include "dblrot/displacement.hpp"
#include "dblrot/errors.hpp"
#include "dblrot/rds.hpp"

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;  // insertion order, stable on disk

namespace dblrot {
namespace {

// stream ids, one per experiment so seeds never share draws across kinds
constexpr uint64_t kStreamTwoPoint = 11;
constexpr uint64_t kStreamEnsemble = 12;
constexpr uint64_t kStreamReversed = 13;
constexpr uint64_t kStreamAttractor = 14;
constexpr uint64_t kStreamChain = 15;
constexpr uint64_t kStreamSlowed = 16;
constexpr uint64_t kStreamLaw = 17;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// run fn(0..count-1) on a small pool; slots make merging order independent
template <typename Fn>
void parallel_over(size_t count, int threads, Fn fn) {
  int use = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (use == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < use; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// CSV with a provenance comment line; binary mode keeps bytes identical
// across platforms, and no timestamp ever goes into a CSV
class CsvFile {
 public:
  CsvFile(const fs::path& path, const njson& config,
          const std::string& header) {
    fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw invalid_input_error("cannot open " + path.string());
    out_ << "# config " << config.dump() << "\n" << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

// the timestamp lives in a trailing metadata block so tests can compare
// everything above it byte for byte
void write_json(const fs::path& path, njson j) {
  j["metadata"] = njson{{"timestamp", utc_now()}};
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw invalid_input_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

void deep_merge(njson& base, const njson& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

njson base_defaults() {
  njson d;
  d["experiment"]["seeds"] = {1, 2, 3, 4, 5};
  d["experiment"]["m"] = 256;
  d["experiment"]["bins"] = 64;
  d["experiment"]["deltas"] = {0.05};
  d["experiment"]["checkpoints"] = njson::array();
  d["experiment"]["z0"] = njson::array();
  d["experiment"]["eps"] = njson::array();
  d["experiment"]["trials"] = 100000;
  d["experiment"]["law_n"] = 30;
  d["experiment"]["delta0"] = 0.0;
  d["experiment"]["cutoff"] = 0.0;
  d["experiment"]["fit_window"] = {0.0, 0.0};
  d["experiment"]["grid_per_axis"] = 0;
  d["experiment"]["component_cap"] = 1000000;
  d["experiment"]["n_twopoint"] = 1000000;
  d["experiment"]["n_ensemble"] = 20000;
  d["experiment"]["n_reversed"] = 2000;
  d["experiment"]["n_attractor"] = 256;
  d["experiment"]["n_diffchain"] = 1000000;
  d["output"]["dir"] = "out";
  d["output"]["name"] = "run";
  return d;
}

// the three bundled regimes: a plain interval (synchronizing), a Cantor
// approximant (integrable 1/phi, non synchronizing), and a 2D box (never
// synchronizing)
njson preset_config(const std::string& name) {
  njson p;
  if (name == "interval") {
    p["system"]["set"] = {{"kind", "intervals"},
                          {"segments", njson::array({{0.0, 0.3}})}};
    p["system"]["v"] = {std::sqrt(2.0) - 1.0};
  } else if (name == "cantor8") {
    p["system"]["set"] = {{"kind", "cantor"}, {"depth", 8}};
    p["system"]["v"] = {std::sqrt(2.0) - 1.0};
    p["experiment"]["fit_window"] = {std::ldexp(1.0, -21),
                                     std::ldexp(1.0, -6)};
    p["experiment"]["n_diffchain"] = 10000000;
    p["experiment"]["n_attractor"] = 32;
  } else if (name == "box2d") {
    njson box = njson::array({njson::array({0.0, 0.5}),
                              njson::array({0.0, 0.5})});
    p["system"]["set"] = {{"kind", "boxes"},
                          {"dim", 2},
                          {"boxes", njson::array({box})}};
    p["system"]["v"] = {std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0};
    p["experiment"]["bins"] = 8;
    p["experiment"]["delta0"] = 0.01;
    p["experiment"]["n_diffchain"] = 10000000;
  } else {
    throw invalid_input_error("unknown preset: " + name);
  }
  p["output"]["name"] = name;
  return p;
}

struct Settings {
  njson resolved;  // full provenance config, embedded in every output
  SystemConfig cfg;
  std::vector<uint64_t> seeds;
  fs::path out_dir;
  std::string name;
  int threads = 1;

  const njson& exp() const { return resolved.at("experiment"); }

  uint64_t horizon(const char* kind_key) const {
    if (exp().contains("n")) return exp().at("n").get<uint64_t>();
    return exp().at(kind_key).get<uint64_t>();
  }
  uint64_t u64(const char* key) const { return exp().at(key).get<uint64_t>(); }
  int geti(const char* key) const { return exp().at(key).get<int>(); }
  double getd(const char* key) const { return exp().at(key).get<double>(); }

  std::vector<double> deltas() const {
    return exp().at("deltas").get<std::vector<double>>();
  }
  std::vector<uint64_t> checkpoints() const {
    return exp().at("checkpoints").get<std::vector<uint64_t>>();
  }
  GridSpec grid() const {
    GridSpec g;
    g.uniform_per_axis = geti("grid_per_axis");
    auto w = exp().at("fit_window").get<std::vector<double>>();
    if (w.size() == 2) {
      g.fit_window_lo = w[0];
      g.fit_window_hi = w[1];
    }
    return g;
  }
  TorusPoint z0() const {
    auto raw = exp().at("z0").get<std::vector<double>>();
    if (raw.empty()) {
      Vec mid = Vec::zero(cfg.dim);
      for (int i = 0; i < cfg.dim; ++i) mid[i] = 0.5;
      return mid;
    }
    if (static_cast<int>(raw.size()) != cfg.dim)
      throw invalid_input_error("z0 dimension does not match the system");
    Vec z = Vec::zero(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) z[i] = raw[static_cast<size_t>(i)];
    return wrap(z);
  }
  fs::path file(const std::string& sub, const std::string& ext) const {
    return out_dir / sub / (name + ext);
  }
};

Settings resolve_settings(const std::string& preset,
                          const std::string& config_path,
                          const std::vector<uint64_t>& seed_flags,
                          const std::string& out_flag, int threads_flag) {
  if (preset.empty() && config_path.empty())
    throw invalid_input_error("need --preset or --config");

  njson merged = base_defaults();
  if (!preset.empty()) deep_merge(merged, preset_config(preset));
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw invalid_input_error("cannot read config " + config_path);
    njson file_cfg;
    try {
      in >> file_cfg;
    } catch (const std::exception& e) {
      throw invalid_input_error(std::string("config parse failed: ") +
                                e.what());
    }
    deep_merge(merged, file_cfg);
  }
  if (!seed_flags.empty()) merged["experiment"]["seeds"] = seed_flags;
  if (!out_flag.empty()) merged["output"]["dir"] = out_flag;

  if (!merged.contains("system") || !merged["system"].contains("set"))
    throw invalid_input_error("config has no system.set descriptor");

  Settings s;
  SetRep set = parse_set(merged["system"]["set"].get<nlohmann::json>());
  int dim = set_dim(set);
  TranslationVector v;
  if (merged["system"].contains("v")) {
    auto raw = merged["system"]["v"].get<std::vector<double>>();
    if (static_cast<int>(raw.size()) != dim)
      throw invalid_input_error("v dimension does not match the set");
    v = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) v[i] = raw[static_cast<size_t>(i)];
  } else {
    v = SystemConfig::default_v(dim);
  }
  s.cfg = SystemConfig::make(std::move(set), v);

  // embed the canonical extensional set so the provenance is exact
  merged["system"]["set"] = njson(set_to_json(*s.cfg.set));
  merged["system"]["v"] = njson::array();
  for (int i = 0; i < dim; ++i) merged["system"]["v"].push_back(s.cfg.v[i]);

  s.seeds = merged["experiment"]["seeds"].get<std::vector<uint64_t>>();
  if (s.seeds.empty()) throw invalid_input_error("seed list is empty");
  s.out_dir = merged["output"]["dir"].get<std::string>();
  s.name = merged["output"]["name"].get<std::string>();
  if (s.name.empty()) throw invalid_input_error("output name is empty");
  s.threads = threads_flag > 0 ? threads_flag : 1;
  s.resolved = std::move(merged);
  return s;
}

njson fit_to_json(const ExponentFit& f) {
  njson j;
  j["alpha"] = f.alpha;
  j["alpha_lo"] = f.alpha_lo;
  j["alpha_hi"] = f.alpha_hi;
  j["c"] = f.c;
  j["log_c_se"] = f.log_c_se;
  j["r2"] = f.r2;
  j["points"] = f.points;
  j["window"] = {f.window_lo, f.window_hi};
  return j;
}

std::vector<std::string> sample_row(int dim, const ProfileSample& p) {
  std::vector<std::string> cells;
  for (int i = 0; i < dim; ++i) cells.push_back(g17(p.eps[i]));
  cells.push_back(g17(p.r));
  cells.push_back(g17(p.phi));
  cells.push_back(p.exact ? "1" : "0");
  cells.push_back(g17(p.stderr_est));
  return cells;
}

// extra displacement values requested on top of the profile grid: flag
// doubles in 1D, arrays (or scalars) from the config eps list otherwise
std::vector<TranslationVector> extra_eps(const Settings& s,
                                         const std::vector<double>& flag) {
  std::vector<TranslationVector> out;
  for (double e : flag) {
    if (s.cfg.dim != 1)
      throw invalid_input_error("--eps takes scalars, use config eps "
                                "arrays in dimension 2");
    out.push_back(wrap({e}));
  }
  for (const njson& item : s.exp().at("eps")) {
    Vec e = Vec::zero(s.cfg.dim);
    if (item.is_number()) {
      if (s.cfg.dim != 1)
        throw invalid_input_error("scalar eps entry in dimension 2");
      e[0] = item.get<double>();
    } else {
      auto raw = item.get<std::vector<double>>();
      if (static_cast<int>(raw.size()) != s.cfg.dim)
        throw invalid_input_error("eps entry dimension mismatch");
      for (int i = 0; i < s.cfg.dim; ++i) e[i] = raw[static_cast<size_t>(i)];
    }
    out.push_back(wrap(e));
  }
  return out;
}

std::string eps_header(int dim) {
  std::string h;
  for (int i = 0; i < dim; ++i) h += "eps_" + std::to_string(i + 1) + ",";
  return h;
}

void run_phi(const Settings& s, const std::vector<double>& eps_flag) {
  DisplacementProfile prof = phi_profile(s.cfg.set, s.grid());
  std::vector<TranslationVector> extras = extra_eps(s, eps_flag);

  CsvFile csv(s.file("phi", ".csv"), s.resolved,
              eps_header(prof.dim) + "r,phi,exact,stderr");
  for (const ProfileSample& p : prof.uniform) csv.row(sample_row(prof.dim, p));
  for (const ProfileSample& p : prof.refined) csv.row(sample_row(prof.dim, p));
  njson extra_json = njson::array();
  for (const TranslationVector& e : extras) {
    ProfileSample p;
    p.eps = e;
    p.r = dist_to_zero(e);
    p.phi = phi(*s.cfg.set, e);
    csv.row(sample_row(prof.dim, p));
    njson row;
    row["eps"] = njson::array();
    for (int i = 0; i < prof.dim; ++i) row["eps"].push_back(e[i]);
    row["phi"] = p.phi;
    extra_json.push_back(row);
  }

  njson j;
  j["config"] = s.resolved;
  j["dim"] = prof.dim;
  j["set_measure"] = prof.set_measure;
  j["grid_per_axis"] = prof.grid_per_axis;
  j["uniform_samples"] = prof.uniform.size();
  j["refined_samples"] = prof.refined.size();
  j["fit"] = fit_to_json(prof.fit);
  j["verdict"] = verdict_name(prof.verdict);
  j["extra"] = extra_json;
  write_json(s.file("phi", ".json"), std::move(j));
}

void run_classify(const Settings& s) {
  DisplacementProfile prof = phi_profile(s.cfg.set, s.grid());
  SymmetryResult sym = symmetry_check(prof);
  double bound = alpha_lower_bound(prof);

  njson j;
  j["config"] = s.resolved;
  j["verdict"] = verdict_name(prof.verdict);
  j["fit"] = fit_to_json(prof.fit);
  j["alpha_lower_bound"] = bound;
  njson sj;
  sj["ok"] = sym.ok;
  sj["witness"] = njson::array();
  for (int i = 0; i < prof.dim; ++i) sj["witness"].push_back(sym.witness[i]);
  sj["phi_at_witness"] = sym.phi_at_witness;
  j["symmetry"] = sj;
  if (prof.verdict == Verdict::converges) {
    auto [z, err] = z_constant(prof, s.getd("delta0"));
    j["z"] = njson{{"value", z}, {"error", err}};
  } else {
    j["z"] = nullptr;
  }
  write_json(s.file("classify", ".json"), std::move(j));
}

void run_twopoint(const Settings& s) {
  uint64_t n = s.horizon("n_twopoint");
  int bins = s.geti("bins");
  std::vector<double> deltas = s.deltas();
  if (deltas.empty()) throw invalid_input_error("deltas list is empty");
  std::vector<uint64_t> cps = s.checkpoints();
  if (cps.empty()) cps = geometric_schedule(n, false);
  for (uint64_t& c : cps) c = std::min(c, n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  struct SeedOut {
    std::vector<std::vector<double>> sync;  // [checkpoint][delta]
    std::vector<double> cesaro;             // [checkpoint]
    double zero_bin_mass = 0.0;
  };
  std::vector<SeedOut> results(s.seeds.size());
  parallel_over(s.seeds.size(), s.threads, [&](size_t i) {
    NoiseStream stream{s.seeds[i], kStreamTwoPoint};
    NoiseSource init(stream.sub(kTagInit));
    TorusPoint x = wrap(init.vector(s.cfg.dim));
    TorusPoint y = wrap(init.vector(s.cfg.dim));
    TwoPointTrace trace = two_point_orbit(s.cfg, x, y, n, stream, bins);
    SeedOut& out = results[i];
    out.zero_bin_mass = trace.zero_bin_mass;
    for (uint64_t cp : cps) {
      std::vector<double> row;
      for (double d : deltas) row.push_back(sync_fraction(trace, d, cp));
      out.sync.push_back(std::move(row));
      out.cesaro.push_back(cesaro_distance(trace, cp));
    }
  });

  CsvFile csv(s.file("twopoint", ".csv"), s.resolved,
              "seed,n,delta,sync_fraction,cesaro");
  for (size_t i = 0; i < s.seeds.size(); ++i)
    for (size_t c = 0; c < cps.size(); ++c)
      for (size_t d = 0; d < deltas.size(); ++d)
        csv.row({std::to_string(s.seeds[i]), std::to_string(cps[c]),
                 g17(deltas[d]), g17(results[i].sync[c][d]),
                 g17(results[i].cesaro[c])});

  njson j;
  j["config"] = s.resolved;
  j["n"] = n;
  njson per_delta = njson::array();
  for (size_t d = 0; d < deltas.size(); ++d) {
    std::vector<double> finals, ces;
    for (const SeedOut& r : results) {
      finals.push_back(r.sync.back()[d]);
      ces.push_back(r.cesaro.back());
    }
    njson row;
    row["delta"] = deltas[d];
    row["median_final_sync"] = median_of(finals);
    row["median_final_cesaro"] = median_of(ces);
    per_delta.push_back(row);
  }
  j["per_delta"] = per_delta;
  njson per_seed = njson::array();
  for (size_t i = 0; i < s.seeds.size(); ++i) {
    njson row;
    row["seed"] = s.seeds[i];
    row["zero_bin_mass"] = results[i].zero_bin_mass;
    row["final_sync"] = results[i].sync.back();
    per_seed.push_back(row);
  }
  j["per_seed"] = per_seed;
  write_json(s.file("twopoint", ".json"), std::move(j));
}

void run_ensemble(const Settings& s) {
  uint64_t n = s.horizon("n_ensemble");
  size_t m = s.u64("m");
  std::vector<uint64_t> cps = s.checkpoints();

  std::vector<EnsembleSeries> results(s.seeds.size());
  parallel_over(s.seeds.size(), s.threads, [&](size_t i) {
    results[i] = ensemble_forward(s.cfg, m, n,
                                  NoiseStream{s.seeds[i], kStreamEnsemble},
                                  cps);
  });

  CsvFile csv(s.file("ensemble", ".csv"), s.resolved, "seed,n,d");
  for (size_t i = 0; i < s.seeds.size(); ++i)
    for (size_t c = 0; c < results[i].steps.size(); ++c)
      csv.row({std::to_string(s.seeds[i]),
               std::to_string(results[i].steps[c]),
               g17(results[i].d_values[c])});

  njson j;
  j["config"] = s.resolved;
  j["n"] = n;
  j["m"] = m;
  std::vector<double> finals;
  njson per_seed = njson::array();
  for (size_t i = 0; i < s.seeds.size(); ++i) {
    finals.push_back(results[i].d_values.back());
    per_seed.push_back(njson{{"seed", s.seeds[i]},
                             {"final_d", results[i].d_values.back()}});
  }
  j["per_seed"] = per_seed;
  j["median_final_d"] = median_of(finals);
  write_json(s.file("ensemble", ".json"), std::move(j));
}

void run_reversed(const Settings& s) {
  uint64_t n = s.horizon("n_reversed");
  size_t m = s.u64("m");
  std::vector<uint64_t> cps = s.checkpoints();
  if (cps.empty()) cps = geometric_schedule(n, false);
  for (uint64_t& c : cps) c = std::min(c, n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  struct SeedOut {
    std::vector<double> d;
    bool has_limit = false;
    TorusPoint limit;
    double final_d = 0.0;
  };
  std::vector<SeedOut> results(s.seeds.size());
  parallel_over(s.seeds.size(), s.threads, [&](size_t i) {
    SeedOut& out = results[i];
    NoiseStream stream{s.seeds[i], kStreamReversed};
    for (uint64_t cp : cps) {
      ParticleEnsemble ens = reversed_ensemble(s.cfg, m, cp, stream);
      out.d.push_back(d_functional(ens));
      if (cp == cps.back()) {
        out.final_d = out.d.back();
        if (s.cfg.dim == 1) {
          out.limit = estimate_limit_point(ens);
          out.has_limit = true;
        }
      }
    }
  });

  CsvFile csv(s.file("reversed", ".csv"), s.resolved, "seed,n,d");
  for (size_t i = 0; i < s.seeds.size(); ++i)
    for (size_t c = 0; c < cps.size(); ++c)
      csv.row({std::to_string(s.seeds[i]), std::to_string(cps[c]),
               g17(results[i].d[c])});

  njson j;
  j["config"] = s.resolved;
  j["n"] = n;
  j["m"] = m;
  std::vector<double> finals;
  njson per_seed = njson::array();
  for (size_t i = 0; i < s.seeds.size(); ++i) {
    finals.push_back(results[i].final_d);
    njson row;
    row["seed"] = s.seeds[i];
    row["final_d"] = results[i].final_d;
    if (results[i].has_limit) {
      row["limit_point"] = njson::array();
      for (int c = 0; c < s.cfg.dim; ++c)
        row["limit_point"].push_back(results[i].limit[c]);
    } else {
      row["limit_point"] = nullptr;
    }
    per_seed.push_back(row);
  }
  j["per_seed"] = per_seed;
  j["median_final_d"] = median_of(finals);
  write_json(s.file("reversed", ".json"), std::move(j));
}

void run_attractor(const Settings& s) {
  uint64_t n = s.horizon("n_attractor");
  size_t cap = s.u64("component_cap");
  std::vector<uint64_t> cps = s.checkpoints();
  if (cps.empty()) cps = geometric_schedule(n, false);
  for (uint64_t& c : cps) c = std::min(c, n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  // rows go out as they are computed and the file is flushed after each,
  // so a capacity abort leaves the partial report on disk
  CsvFile csv(s.file("attractor", ".csv"), s.resolved,
              "seed,n,components,measure,largest_component,largest_gap");
  njson per_seed = njson::array();
  for (uint64_t seed : s.seeds) {
    NoiseStream stream{seed, kStreamAttractor};
    njson last;
    for (uint64_t cp : cps) {
      AttractorReport rep = attractor_report(s.cfg, cp, stream, {cp}, cap);
      const AttractorCheckpoint& c = rep.checkpoints.back();
      csv.row({std::to_string(seed), std::to_string(c.n),
               std::to_string(c.components), g17(c.measure),
               g17(c.largest_component), g17(c.largest_gap)});
      csv.flush();
      last = njson{{"seed", seed},
                   {"n", c.n},
                   {"components", c.components},
                   {"measure", c.measure},
                   {"largest_component", c.largest_component},
                   {"largest_gap", c.largest_gap}};
    }
    per_seed.push_back(last);
  }

  njson j;
  j["config"] = s.resolved;
  j["per_seed"] = per_seed;
  write_json(s.file("attractor", ".json"), std::move(j));
}

void run_diffchain(const Settings& s) {
  uint64_t n = s.horizon("n_diffchain");
  int bins = s.geti("bins");
  uint64_t trials = s.u64("trials");
  uint64_t law_n = s.u64("law_n");
  TorusPoint z0 = s.z0();

  DisplacementProfile prof = phi_profile(s.cfg.set, s.grid());
  Histogram pred = predicted_density(prof, bins, s.getd("cutoff"));

  struct SeedOut {
    ChainOrbit chain;
    ChainOrbit slowed;
    bool stall = false;
    double tv = 0.0, tv_excl0 = 0.0, tv_slowed = 0.0;
    LawTestResult law;
  };
  std::vector<SeedOut> results(s.seeds.size());
  parallel_over(s.seeds.size(), s.threads, [&](size_t i) {
    SeedOut& out = results[i];
    LatticePhi provider(s.cfg.set, z0, s.cfg.v);
    out.chain =
        chain_orbit(provider, n, NoiseStream{s.seeds[i], kStreamChain}, bins);
    auto [sl, walk] =
        slowed_orbit(provider, n, NoiseStream{s.seeds[i], kStreamSlowed}, bins);
    out.slowed = std::move(sl);
    out.stall = walk.stall_warning;
    out.tv = occupation_compare(out.chain, pred);
    out.tv_excl0 = occupation_compare(out.chain, pred, true);
    out.tv_slowed = occupation_compare(out.slowed, pred);
    out.law = law_equivalence_test(provider, law_n, trials,
                                   NoiseStream{s.seeds[i], kStreamLaw});
  });

  CsvFile csv(s.file("diffchain", ".csv"), s.resolved,
              "seed,bin,chain,slowed,predicted");
  for (size_t i = 0; i < s.seeds.size(); ++i)
    for (size_t b = 0; b < pred.mass.size(); ++b)
      csv.row({std::to_string(s.seeds[i]), std::to_string(b),
               g17(results[i].chain.occupation.mass[b]),
               g17(results[i].slowed.occupation.mass[b]), g17(pred.mass[b])});

  njson j;
  j["config"] = s.resolved;
  j["n"] = n;
  j["bins"] = bins;
  j["verdict"] = verdict_name(prof.verdict);
  j["predicted_zero_bin"] = pred.mass[0];
  std::vector<double> tvs, tvs_slowed;
  njson per_seed = njson::array();
  for (size_t i = 0; i < s.seeds.size(); ++i) {
    const SeedOut& r = results[i];
    tvs.push_back(r.tv);
    tvs_slowed.push_back(r.tv_slowed);
    njson row;
    row["seed"] = s.seeds[i];
    row["tv"] = r.tv;
    row["tv_excl0"] = r.tv_excl0;
    row["tv_slowed"] = r.tv_slowed;
    row["chain_zero_bin"] = r.chain.zero_bin_mass;
    row["stall_warning"] = r.stall;
    row["law"] = njson{{"stat", r.law.chi.stat},
                       {"dof", r.law.chi.dof},
                       {"p_value", r.law.chi.p_value}};
    per_seed.push_back(row);
  }
  j["per_seed"] = per_seed;
  j["median_tv"] = median_of(tvs);
  j["median_tv_slowed"] = median_of(tvs_slowed);
  write_json(s.file("diffchain", ".json"), std::move(j));
}

void run_report(const Settings& s) {
  njson ran = njson::array();
  njson skipped = njson::array();
  auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
      ran.push_back(name);
    } catch (const capacity_error& e) {
      skipped.push_back(njson{{"subcommand", name}, {"reason", e.what()}});
    } catch (const statistical_error& e) {
      skipped.push_back(njson{{"subcommand", name}, {"reason", e.what()}});
    }
  };
  attempt("classify", [&] { run_classify(s); });
  attempt("phi", [&] { run_phi(s, {}); });
  attempt("twopoint", [&] { run_twopoint(s); });
  attempt("ensemble", [&] { run_ensemble(s); });
  attempt("reversed", [&] { run_reversed(s); });
  if (s.cfg.dim == 1)
    attempt("attractor", [&] { run_attractor(s); });
  else
    skipped.push_back(njson{{"subcommand", "attractor"},
                            {"reason", "exact images need dimension 1"}});
  attempt("diffchain", [&] { run_diffchain(s); });

  njson j;
  j["config"] = s.resolved;
  j["ran"] = ran;
  j["skipped"] = skipped;
  write_json(s.file("report", ".json"), std::move(j));
}

}  // namespace
}  // namespace dblrot

int main(int argc, char** argv) {
  CLI::App app{"random double rotation experiments"};
  app.require_subcommand(1);

  std::string config_path, preset, out_flag;
  std::vector<uint64_t> seed_flags;
  int threads = 0;
  std::vector<double> eps_flag;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed_flags,
                    "seed, repeatable, replaces the config seed list");
    sub->add_option("--preset", preset, "interval, cantor8 or box2d");
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--threads", threads, "worker threads across seeds");
    return sub;
  };

  CLI::App* c_phi = add_shared(
      app.add_subcommand("phi", "displacement profile and power law fit"));
  c_phi->add_option("--eps", eps_flag, "extra displacement values");
  CLI::App* c_classify = add_shared(app.add_subcommand(
      "classify", "integrability verdict, symmetry check, Z constant"));
  CLI::App* c_twopoint = add_shared(app.add_subcommand(
      "twopoint", "coupled pair trace, sync fractions and Cesaro means"));
  CLI::App* c_ensemble = add_shared(app.add_subcommand(
      "ensemble", "forward particle ensemble, D functional series"));
  CLI::App* c_reversed = add_shared(app.add_subcommand(
      "reversed", "reversed compositions, D series and limit point"));
  CLI::App* c_attractor = add_shared(app.add_subcommand(
      "attractor", "exact reversed images at doubling checkpoints"));
  CLI::App* c_diffchain = add_shared(app.add_subcommand(
      "diffchain", "difference chain occupation against 1/phi prediction"));
  CLI::App* c_report = add_shared(app.add_subcommand(
      "report", "bundle of every applicable experiment for one config"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  using namespace dblrot;
  try {
    Settings s =
        resolve_settings(preset, config_path, seed_flags, out_flag, threads);
    if (c_phi->parsed()) run_phi(s, eps_flag);
    if (c_classify->parsed()) run_classify(s);
    if (c_twopoint->parsed()) run_twopoint(s);
    if (c_ensemble->parsed()) run_ensemble(s);
    if (c_reversed->parsed()) run_reversed(s);
    if (c_attractor->parsed()) run_attractor(s);
    if (c_diffchain->parsed()) run_diffchain(s);
    if (c_report->parsed()) run_report(s);
    return 0;
  } catch (const capacity_error& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return 2;
  } catch (const statistical_error& e) {
    std::fprintf(stderr, "statistical error: %s\n", e.what());
    return 3;
  } catch (const invalid_input_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
