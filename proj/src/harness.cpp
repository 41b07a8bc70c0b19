#include "kis/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "kis/diagnostics.hpp"
#include "kis/extrapolate.hpp"
#include "kis/krylov.hpp"
#include "kis/lindblad.hpp"
#include "kis/otoc.hpp"

namespace kis::harness {

json default_config() {
  return json{
      {"L", 4},
      {"J", 1.0},
      {"h_z", 1.0},
      {"tau", 1.0},
      {"h_x", json::array({0.8168})},
      {"seed", 12345},
      {"workers", 1},
      {"out", "out"},
      {"otoc", {{"l", 1}, {"t_max", 60}, {"window", nullptr}, {"L", nullptr}}},
      {"gap",
       // Extrapolation grid: restricted to where g(gamma) is converged in L,
       // so the quadratic intercept estimates the thermodynamic-limit
       // resonance instead of the collapsing finite-size gap.
       {{"gamma", json::array({0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20})},
        {"n_max", 150},
        {"tol", 1e-8},
        {"steady_tol", 1e-6},
        {"stride", 0},
        {"sector", "global"},
        {"L", nullptr}}},
      {"diagnostics", {{"sector", "even"}}},
      // Parity keeps the low-gamma grid: the even/odd crossing lives there.
      {"parity",
       {{"method", "auto"},
        {"gamma", json::array({0.02, 0.04, 0.06, 0.08, 0.10, 0.12})},
        {"L", nullptr}}},
      {"validate",
       {{"L", json::array({4})},
        {"gamma", json::array({0.05})},
        {"h_x", json::array({0.8168})},
        {"k", 6},
        {"threshold", 1e-6}}},
      {"sweep", {{"L_otoc", 12}, {"L_gap", 10}}},
  };
}

namespace {

void check_keys(const json& cfg, const json& schema, const std::string& prefix) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key()))
      throw std::invalid_argument("config: unknown key '" + path + "'");
    if (it.value().is_object() && schema[it.key()].is_object())
      check_keys(it.value(), schema[it.key()], path);
  }
}

void merge_into(json& base, const json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge_into(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

double need_number(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_number())
    throw std::invalid_argument("config: key '" + key + "' must be a number");
  return cfg[key].get<double>();
}

int need_int(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_number_integer())
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return cfg[key].get<int>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number())
        throw std::invalid_argument("config: key '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw std::invalid_argument("config: key '" + key + "' must be a number or array");
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is empty");
  return out;
}

}  // namespace

void validate_config(const json& cfg) {
  check_keys(cfg, default_config(), "");
  need_int(cfg, "L");
  need_number(cfg, "J");
  need_number(cfg, "h_z");
  need_number(cfg, "tau");
  number_list(cfg.at("h_x"), "h_x");
  need_int(cfg, "seed");
  need_int(cfg, "workers");
  if (!cfg.at("out").is_string()) throw std::invalid_argument("config: key 'out' must be a string");
}

json load_config(const std::string& path) {
  json cfg = default_config();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    json user;
    try {
      in >> user;
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("config: parse error in '" + path + "': " + e.what());
    }
    check_keys(user, default_config(), "");
    merge_into(cfg, user);
  }
  validate_config(cfg);
  return cfg;
}

void apply_override(json& cfg, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects key=value, got '" + key_eq_value + "'");
  const std::string dotted = key_eq_value.substr(0, eq);
  const std::string value = key_eq_value.substr(eq + 1);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // plain string
  }

  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string part = dotted.substr(pos, dot - pos);
    if (part.empty()) throw std::invalid_argument("--set: empty key segment in '" + dotted + "'");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ResultStore::ResultStore(const std::filesystem::path& out_dir) : out_dir_(out_dir) {
  std::filesystem::create_directories(out_dir_ / "checkpoints");
}

bool ResultStore::load_point(const std::string& key, json* out) const {
  const auto path = out_dir_ / "checkpoints" / (key + ".json");
  std::ifstream in(path);
  if (!in) return false;
  try {
    in >> *out;
  } catch (const json::parse_error&) {
    return false;  // partial write; recompute
  }
  return true;
}

void ResultStore::save_point(const std::string& key, const json& value) const {
  const auto path = out_dir_ / "checkpoints" / (key + ".json");
  const auto tmp = out_dir_ / "checkpoints" / (key + ".json.tmp");
  {
    std::ofstream out(tmp);
    out << value.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

void ResultStore::write_text(const std::string& filename, const std::string& body) const {
  std::ofstream out(out_dir_ / filename);
  out << body;
}

void ResultStore::write_json(const std::string& filename, const json& j) const {
  std::ofstream out(out_dir_ / filename);
  out << j.dump(2) << "\n";
}

namespace {

ModelParams model_params(const json& cfg, double h_x, int L) {
  ModelParams p;
  p.J = cfg.at("J").get<double>();
  p.h_z = cfg.at("h_z").get<double>();
  p.tau = cfg.at("tau").get<double>();
  p.h_x = h_x;
  p.L = L;
  return p;
}

int model_L(const json& cfg, const char* section) {
  const json& sub = cfg.at(section);
  if (sub.contains("L") && !sub.at("L").is_null()) return sub.at("L").get<int>();
  return need_int(cfg, "L");
}

json params_json(const ModelParams& p) {
  return json{{"J", p.J}, {"h_x", p.h_x}, {"h_z", p.h_z}, {"tau", p.tau}, {"L", p.L}};
}

// Shared worker pool over independent sweep points.
void run_points(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<std::size_t>(workers, n); ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ArnoldiOptions arnoldi_options(const json& cfg) {
  const json& gap = cfg.at("gap");
  ArnoldiOptions o;
  o.n_max = gap.at("n_max").get<int>();
  o.tol = gap.at("tol").get<double>();
  o.steady_tol = gap.at("steady_tol").get<double>();
  o.stride = gap.at("stride").get<int>();
  o.seed = std::uint64_t(need_int(cfg, "seed"));
  return o;
}

json gap_point_key(const ModelParams& p, double gamma, const std::string& sector,
                   const ArnoldiOptions& o) {
  return json{{"kind", "gap"},     {"params", params_json(p)}, {"gamma", gamma},
              {"sector", sector},  {"n_max", o.n_max},         {"tol", o.tol},
              {"steady_tol", o.steady_tol}, {"stride", o.stride}, {"seed", o.seed}};
}

json gap_result_json(const GapResult& g) {
  return json{{"g", g.g},           {"gamma", g.gamma},   {"L", g.L},
              {"h_x", g.h_x},       {"sector", g.sector}, {"n_used", g.n_used},
              {"converged", g.converged}, {"seed", g.seed},
              {"phi_re", g.phi_lead.real()}, {"phi_im", g.phi_lead.imag()}};
}

GapResult gap_result_from_json(const json& j) {
  GapResult g;
  g.g = j.at("g").get<double>();
  g.gamma = j.at("gamma").get<double>();
  g.L = j.at("L").get<int>();
  g.h_x = j.at("h_x").get<double>();
  g.sector = j.at("sector").get<std::string>();
  g.n_used = j.at("n_used").get<int>();
  g.converged = j.at("converged").get<bool>();
  g.seed = j.at("seed").get<std::uint64_t>();
  g.phi_lead = cplx(j.at("phi_re").get<double>(), j.at("phi_im").get<double>());
  return g;
}

// One gap point through the checkpoint store.
GapResult gap_point(ResultStore& store, const ModelParams& p, double gamma,
                    const std::string& sector, const ArnoldiOptions& opts) {
  const std::string key = "gap_" + config_hash(gap_point_key(p, gamma, sector, opts));
  json cached;
  if (store.load_point(key, &cached)) {
    ++store.reused;
    return gap_result_from_json(cached.at("result"));
  }
  FloquetModel model(p);
  DephasingModel deph(model, gamma);
  GapResult res;
  if (sector == "global")
    res = global_gap(deph, opts);
  else
    res = sector_gap(deph, sector == "even" ? +1 : -1, opts);
  store.save_point(key, json{{"result", gap_result_json(res)}});
  ++store.computed;
  return res;
}

struct OtocPoint {
  OtocSeries series;
  DecayFit fit;
};

OtocPoint otoc_point(ResultStore& store, const json& cfg, const ModelParams& p) {
  const json& ocfg = cfg.at("otoc");
  const int l = ocfg.at("l").get<int>();
  const int t_max = ocfg.at("t_max").get<int>();
  const json key_json{{"kind", "otoc"}, {"params", params_json(p)}, {"l", l}, {"t_max", t_max}};
  const std::string key = "otoc_" + config_hash(key_json);

  OtocPoint pt;
  json cached;
  if (store.load_point(key, &cached)) {
    ++store.reused;
    pt.series.o1 = cached.at("o1").get<std::vector<double>>();
    pt.series.imag_max = cached.at("imag_max").get<double>();
    pt.series.l = l;
    pt.series.params = p;
  } else {
    FloquetModel model(p);
    pt.series = otoc_series(model, l, t_max);
    store.save_point(key, json{{"o1", pt.series.o1}, {"imag_max", pt.series.imag_max}});
    ++store.computed;
  }

  std::optional<std::pair<int, int>> window;
  if (!ocfg.at("window").is_null()) {
    const auto w = ocfg.at("window").get<std::vector<int>>();
    if (w.size() != 2) throw std::invalid_argument("config: key 'otoc.window' must be [t1, t2]");
    window = std::make_pair(w[0], w[1]);
  }
  pt.fit = fit_decay(pt.series, window);
  return pt;
}

json fit_json(const DecayFit& f) {
  return json{{"verdict", f.verdict},   {"alpha", f.alpha},
              {"log_prefactor", f.log_prefactor}, {"window", {f.t1, f.t2}},
              {"r_squared", f.r_squared}, {"plateau", f.plateau}};
}

std::string hx_tag(double h_x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", h_x);
  return buf;
}

void write_manifest(ResultStore& store, const std::string& command, const json& cfg,
                    const std::vector<std::string>& outputs, double wall_seconds) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json manifest{
      {"command", command},
      {"config", cfg},
      {"config_hash", config_hash(cfg)},
      {"seed", cfg.at("seed")},
      {"outputs", outputs},
      {"computed", store.computed.load()},
      {"reused", store.reused.load()},
      {"wall_seconds", wall_seconds},
      {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
  };
  store.write_json(command + "_manifest.json", manifest);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

int cmd_diagnostics(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const int L = need_int(cfg, "L");
  const std::string sector_name = cfg.at("diagnostics").at("sector").get<std::string>();
  if (sector_name != "even" && sector_name != "odd")
    throw std::invalid_argument("config: key 'diagnostics.sector' must be even|odd");
  const int parity = sector_name == "even" ? +1 : -1;

  std::vector<DiagnosticsRow> rows(grid.size());
  run_points(grid.size(), need_int(cfg, "workers"), [&](std::size_t i) {
    const ModelParams p = model_params(cfg, grid[i], L);
    const json key_json{{"kind", "diag"}, {"params", params_json(p)}, {"parity", parity}};
    const std::string key = "diag_" + config_hash(key_json);
    json cached;
    if (store.load_point(key, &cached)) {
      ++store.reused;
      rows[i] = {grid[i], L, parity, cached.at("mean_r").get<double>(),
                 cached.at("eta").get<double>(), cached.at("mean_xi").get<double>(),
                 cached.at("dim").get<std::size_t>()};
      return;
    }
    rows[i] = diagnostics_sweep({grid[i]}, p, parity).front();
    store.save_point(key, json{{"mean_r", rows[i].mean_r},
                               {"eta", rows[i].eta},
                               {"mean_xi", rows[i].mean_xi},
                               {"dim", rows[i].dim}});
    ++store.computed;
  });

  std::string csv = "h_x,L,sector,mean_r,eta,mean_xi,D_sec\n";
  for (const DiagnosticsRow& r : rows) {
    csv += fmt_double(r.h_x) + "," + std::to_string(r.L) + "," + sector_name + "," +
           fmt_double(r.mean_r) + "," + fmt_double(r.eta) + "," + fmt_double(r.mean_xi) + "," +
           std::to_string(r.dim) + "\n";
  }
  store.write_text("diagnostics.csv", csv);
  write_manifest(store, "diagnostics", cfg, {"diagnostics.csv"}, timer.seconds());
  return 0;
}

int cmd_otoc(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const int L = model_L(cfg, "otoc");

  json summary = json::array();
  std::vector<std::string> outputs;
  std::vector<OtocPoint> points(grid.size());
  run_points(grid.size(), need_int(cfg, "workers"),
             [&](std::size_t i) { points[i] = otoc_point(store, cfg, model_params(cfg, grid[i], L)); });

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const OtocPoint& pt = points[i];
    const std::string tag = hx_tag(grid[i]);

    std::string csv = "t,O1,abs_O1,C\n";
    for (std::size_t t = 0; t < pt.series.size(); ++t) {
      csv += std::to_string(t) + "," + fmt_double(pt.series.o1[t]) + "," +
             fmt_double(std::abs(pt.series.o1[t])) + "," + fmt_double(pt.series.c(t)) + "\n";
    }
    store.write_text("otoc_hx" + tag + ".csv", csv);
    outputs.push_back("otoc_hx" + tag + ".csv");

    std::string fig = "t,abs_O1,fit_curve\n";
    for (std::size_t t = 0; t < pt.series.size(); ++t) {
      fig += std::to_string(t) + "," + fmt_double(std::abs(pt.series.o1[t])) + ",";
      if (pt.fit.has_decay)
        fig += fmt_double(std::exp(pt.fit.log_prefactor - pt.fit.alpha * double(t)));
      fig += "\n";
    }
    store.write_text("fig1_otoc_hx" + tag + ".csv", fig);
    outputs.push_back("fig1_otoc_hx" + tag + ".csv");

    json entry = fit_json(pt.fit);
    entry["h_x"] = grid[i];
    entry["L"] = L;
    entry["l"] = pt.series.l;
    entry["imag_max"] = pt.series.imag_max;
    summary.push_back(entry);
  }
  store.write_json("otoc_summary.json", summary);
  outputs.push_back("otoc_summary.json");
  write_manifest(store, "otoc", cfg, outputs, timer.seconds());
  return 0;
}

int cmd_gap(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const std::vector<double> gammas = number_list(cfg.at("gap").at("gamma"), "gap.gamma");
  const int L = model_L(cfg, "gap");
  const std::string sector = cfg.at("gap").at("sector").get<std::string>();
  const ArnoldiOptions opts = arnoldi_options(cfg);

  std::vector<GapResult> results(grid.size() * gammas.size());
  run_points(results.size(), need_int(cfg, "workers"), [&](std::size_t idx) {
    const double h_x = grid[idx / gammas.size()];
    const double gamma = gammas[idx % gammas.size()];
    results[idx] = gap_point(store, model_params(cfg, h_x, L), gamma, sector, opts);
  });

  std::string csv = "gamma,L,h_x,sector,g,n_used,converged,seed\n";
  for (const GapResult& r : results) {
    csv += fmt_double(r.gamma) + "," + std::to_string(r.L) + "," + fmt_double(r.h_x) + "," +
           r.sector + "," + fmt_double(r.g) + "," + std::to_string(r.n_used) + "," +
           (r.converged ? "1" : "0") + "," + std::to_string(r.seed) + "\n";
  }
  store.write_text("gaps.csv", csv);
  write_manifest(store, "gap", cfg, {"gaps.csv"}, timer.seconds());
  return 0;
}

int cmd_extrapolate(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const std::vector<double> gammas = number_list(cfg.at("gap").at("gamma"), "gap.gamma");
  const int L = model_L(cfg, "gap");
  const std::string sector = cfg.at("gap").at("sector").get<std::string>();
  const ArnoldiOptions opts = arnoldi_options(cfg);

  json summary = json::array();
  std::string fig = "h_x,gamma,g,fit_curve\n";
  for (double h_x : grid) {
    const ModelParams p = model_params(cfg, h_x, L);
    GapCurve curve;
    curve.L = L;
    curve.h_x = h_x;
    curve.sector = sector;
    curve.points.resize(gammas.size());
    run_points(gammas.size(), need_int(cfg, "workers"), [&](std::size_t k) {
      curve.points[k] = gap_point(store, p, gammas[k], sector, opts);
    });
    ExtrapolationResult ex = quadratic_extrapolate(curve);
    for (const GapResult& r : curve.points) {
      const double fitted = ex.gbar + ex.c1 * r.gamma + ex.c2 * r.gamma * r.gamma;
      fig += fmt_double(h_x) + "," + fmt_double(r.gamma) + "," + fmt_double(r.g) + "," +
             fmt_double(fitted) + "\n";
    }
    summary.push_back(json{{"h_x", h_x},
                           {"L", L},
                           {"sector", sector},
                           {"gbar", ex.gbar},
                           {"c1", ex.c1},
                           {"c2", ex.c2},
                           {"residual_norm", ex.residual_norm},
                           {"points_used", ex.points_used},
                           {"suspicious", ex.suspicious}});
  }
  store.write_text("fig2_gap.csv", fig);
  store.write_json("extrapolation.json", summary);
  write_manifest(store, "extrapolate", cfg, {"fig2_gap.csv", "extrapolation.json"},
                 timer.seconds());
  return 0;
}

int cmd_parity_gaps(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const std::vector<double> gammas = number_list(cfg.at("parity").at("gamma"), "parity.gamma");
  const int L = model_L(cfg, "parity");
  const ArnoldiOptions opts = arnoldi_options(cfg);

  std::string method = cfg.at("parity").at("method").get<std::string>();
  if (method == "auto") {
    const std::size_t D = std::size_t(1) << L;
    const std::size_t palindromes = std::size_t(1) << ((L + 1) / 2);
    method = (D * D + palindromes * palindromes) / 2 <= kDenseSuperCap ? "dense" : "arnoldi";
  }
  if (method != "dense" && method != "arnoldi")
    throw std::invalid_argument("config: key 'parity.method' must be auto|dense|arnoldi");

  struct Row {
    double h_x, gamma, g_even, g_odd, g_global;
  };
  std::vector<Row> rows(grid.size() * gammas.size());
  run_points(rows.size(), need_int(cfg, "workers"), [&](std::size_t idx) {
    const double h_x = grid[idx / gammas.size()];
    const double gamma = gammas[idx % gammas.size()];
    const ModelParams p = model_params(cfg, h_x, L);

    const json key_json{{"kind", "parity"}, {"params", params_json(p)}, {"gamma", gamma},
                        {"method", method}, {"n_max", opts.n_max},       {"tol", opts.tol},
                        {"steady_tol", opts.steady_tol}, {"stride", opts.stride},
                        {"seed", opts.seed}};
    const std::string key = "parity_" + config_hash(key_json);
    json cached;
    if (store.load_point(key, &cached)) {
      ++store.reused;
      rows[idx] = {h_x, gamma, cached.at("g_even").get<double>(),
                   cached.at("g_odd").get<double>(), cached.at("g_global").get<double>()};
      return;
    }

    double g_even, g_odd;
    if (method == "dense") {
      FloquetModel model(p);
      DephasingModel deph(model, gamma);
      ParityGaps gaps = parity_gaps_dense(deph, opts.steady_tol);
      g_even = gaps.g_even;
      g_odd = gaps.g_odd;
    } else {
      g_even = gap_point(store, p, gamma, "even", opts).g;
      g_odd = gap_point(store, p, gamma, "odd", opts).g;
    }
    const double g_global = gap_point(store, p, gamma, "global", opts).g;
    store.save_point(key, json{{"g_even", g_even}, {"g_odd", g_odd}, {"g_global", g_global}});
    ++store.computed;
    rows[idx] = {h_x, gamma, g_even, g_odd, g_global};
  });

  std::string csv = "h_x,L,gamma,g_even,g_odd,g_global,method\n";
  for (const Row& r : rows) {
    csv += fmt_double(r.h_x) + "," + std::to_string(L) + "," + fmt_double(r.gamma) + "," +
           fmt_double(r.g_even) + "," + fmt_double(r.g_odd) + "," + fmt_double(r.g_global) + "," +
           method + "\n";
  }
  store.write_text("fig3_parity.csv", csv);
  write_manifest(store, "parity-gaps", cfg, {"fig3_parity.csv"}, timer.seconds());
  return 0;
}

int cmd_validate(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const json& vcfg = cfg.at("validate");
  const auto Ls = vcfg.at("L").get<std::vector<int>>();
  const std::vector<double> gammas = number_list(vcfg.at("gamma"), "validate.gamma");
  const std::vector<double> hxs = number_list(vcfg.at("h_x"), "validate.h_x");
  const int k = vcfg.at("k").get<int>();
  const double threshold = vcfg.at("threshold").get<double>();
  const ArnoldiOptions opts = arnoldi_options(cfg);

  std::string report;
  double max_dev = 0.0;
  bool all_converged = true;
  json results = json::array();

  for (int L : Ls) {
    for (double h_x : hxs) {
      for (double gamma : gammas) {
        const ModelParams p = model_params(cfg, h_x, L);
        const json key_json{{"kind", "validate"}, {"params", params_json(p)}, {"gamma", gamma},
                            {"k", k},             {"n_max", opts.n_max},      {"tol", opts.tol},
                            {"stride", opts.stride}, {"seed", opts.seed}};
        const std::string key = "validate_" + config_hash(key_json);

        json entry;
        if (store.load_point(key, &entry)) {
          ++store.reused;
        } else {
          FloquetModel model(p);
          DephasingModel deph(model, gamma);

          // Dense side, assembled from the two parity blocks (same
          // spectrum as the full superoperator, block-diagonal by symmetry).
          std::vector<ChannelEigenvalue> dense_all;
          for (int parity : {+1, -1}) {
            DenseSuperoperator s = build_sector_superoperator(deph, parity);
            auto spec = dense_spectrum(s, p.tau);
            dense_all.insert(dense_all.end(), spec.begin(), spec.end());
          }
          std::sort(dense_all.begin(), dense_all.end(),
                    [](const ChannelEigenvalue& a, const ChannelEigenvalue& b) {
                      return std::abs(a.phi) > std::abs(b.phi);
                    });
          std::vector<cplx> dense_top;
          for (const auto& ev : dense_all) {
            if (std::abs(ev.phi - cplx(1.0)) < opts.steady_tol) continue;
            dense_top.push_back(ev.phi);
            if (int(dense_top.size()) == k) break;
          }

          // Arnoldi side on the matrix-free channel; the traceless
          // Hermitian start keeps the steady mode out of the space. The
          // basis is built with F^stride to separate the clustered leading
          // moduli, then the single-period map is projected back.
          const std::size_t D = model.D;
          const int stride = effective_stride(opts, gamma, p.tau);
          CVec scratch(D * D), tmp(D * D);
          MapFn base_map = [&](const cplx* in, cplx* out) {
            std::copy(in, in + D * D, out);
            period_map(out, deph, scratch.data());
          };
          MapFn map = [&](const cplx* in, cplx* out) {
            base_map(in, out);
            for (int r = 1; r < stride; ++r) {
              base_map(out, tmp.data());
              std::copy(tmp.begin(), tmp.end(), out);
            }
          };
          CVec start = random_traceless_hermitian(D, opts.seed);
          KrylovState st = arnoldi(map, start, opts);
          RitzSpectrum ritz = rayleigh_ritz(base_map, st, p.tau, opts.tol, 2 * k + 4);
          std::vector<cplx> ritz_top;
          for (const RitzPair& pr : ritz.pairs) {
            if (!pr.converged) continue;
            if (std::abs(pr.phi - cplx(1.0)) < opts.steady_tol) continue;
            ritz_top.push_back(pr.phi);
          }

          double dev = 0.0;
          bool converged = int(ritz_top.size()) >= k;
          for (const cplx& phi : dense_top) {
            double best = 1e300;
            for (const cplx& r : ritz_top) best = std::min(best, std::abs(phi - r));
            dev = std::max(dev, best);
          }
          entry = json{{"L", L},          {"h_x", h_x},
                       {"gamma", gamma},  {"deviation", dev},
                       {"converged", converged}, {"n_used", st.n},
                       {"dense_top_re", json::array()}, {"dense_top_im", json::array()}};
          for (const cplx& phi : dense_top) {
            entry["dense_top_re"].push_back(phi.real());
            entry["dense_top_im"].push_back(phi.imag());
          }
          store.save_point(key, entry);
          ++store.computed;
        }

        const double dev = entry.at("deviation").get<double>();
        const bool conv = entry.at("converged").get<bool>();
        max_dev = std::max(max_dev, dev);
        all_converged = all_converged && conv;
        char line[160];
        std::snprintf(line, sizeof line,
                      "L=%d h_x=%g gamma=%g: top-%d deviation %.3e (%s)\n", L, h_x, gamma, k,
                      dev, conv ? "converged" : "UNCONVERGED");
        report += line;
        results.push_back(entry);
      }
    }
  }

  const bool pass = all_converged && max_dev < threshold;
  char tail[128];
  std::snprintf(tail, sizeof tail, "max deviation %.3e, threshold %.1e: %s\n", max_dev, threshold,
                pass ? "PASS" : "FAIL");
  report += tail;
  std::fputs(report.c_str(), stdout);
  store.write_text("validate_report.txt", report);
  store.write_json("validate.json",
                   json{{"max_deviation", max_dev}, {"threshold", threshold},
                        {"pass", pass}, {"results", results}});
  write_manifest(store, "validate", cfg, {"validate_report.txt", "validate.json"},
                 timer.seconds());
  return pass ? 0 : 2;
}

int cmd_sweep(const json& cfg) {
  Timer timer;
  ResultStore store(cfg.at("out").get<std::string>());
  const std::vector<double> grid = number_list(cfg.at("h_x"), "h_x");
  const std::vector<double> gammas = number_list(cfg.at("gap").at("gamma"), "gap.gamma");
  const int L_otoc = cfg.at("sweep").at("L_otoc").get<int>();
  const int L_gap = cfg.at("sweep").at("L_gap").get<int>();
  const std::string sector = cfg.at("gap").at("sector").get<std::string>();
  const ArnoldiOptions opts = arnoldi_options(cfg);

  json summary = json::array();
  std::string csv = "h_x,L_otoc,L_gap,alpha,gbar,two_gbar,ratio,discrepancy,verdict\n";
  for (double h_x : grid) {
    OtocPoint ot = otoc_point(store, cfg, model_params(cfg, h_x, L_otoc));

    GapCurve curve;
    curve.L = L_gap;
    curve.h_x = h_x;
    curve.sector = sector;
    curve.points.resize(gammas.size());
    const ModelParams pg = model_params(cfg, h_x, L_gap);
    run_points(gammas.size(), need_int(cfg, "workers"), [&](std::size_t gi) {
      curve.points[gi] = gap_point(store, pg, gammas[gi], sector, opts);
    });
    ExtrapolationResult ex = quadratic_extrapolate(curve);

    json entry{{"h_x", h_x},   {"L_otoc", L_otoc}, {"L_gap", L_gap},
               {"gbar", ex.gbar}, {"fit", fit_json(ot.fit)}};
    if (ot.fit.has_decay) {
      CorrespondenceReport rep = compare_alpha_gap(ot.fit.alpha, ex, h_x, L_otoc, L_gap);
      entry["alpha"] = rep.alpha;
      entry["ratio"] = rep.ratio;
      entry["discrepancy"] = rep.discrepancy;
      csv += fmt_double(h_x) + "," + std::to_string(L_otoc) + "," + std::to_string(L_gap) + "," +
             fmt_double(rep.alpha) + "," + fmt_double(rep.gbar) + "," +
             fmt_double(2.0 * rep.gbar) + "," + fmt_double(rep.ratio) + "," +
             fmt_double(rep.discrepancy) + ",ok\n";
    } else {
      csv += fmt_double(h_x) + "," + std::to_string(L_otoc) + "," + std::to_string(L_gap) + ",," +
             fmt_double(ex.gbar) + "," + fmt_double(2.0 * ex.gbar) + ",,,no-decay\n";
    }
    summary.push_back(entry);
  }
  store.write_text("fig4_summary.csv", csv);
  store.write_json("sweep.json", summary);
  write_manifest(store, "sweep", cfg, {"fig4_summary.csv", "sweep.json"}, timer.seconds());
  return 0;
}

int run_command(const std::string& command, const json& cfg) {
  try {
    if (command == "diagnostics") return cmd_diagnostics(cfg);
    if (command == "otoc") return cmd_otoc(cfg);
    if (command == "gap") return cmd_gap(cfg);
    if (command == "extrapolate") return cmd_extrapolate(cfg);
    if (command == "parity-gaps") return cmd_parity_gaps(cfg);
    if (command == "validate") return cmd_validate(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
    return 1;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 3;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace kis::harness
