// vinecop command-line front end. Talks to the library through the C
// interface only.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vinecop/vinecop.h"

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(vc_status status, const std::string& context) {
  if (status != VC_OK) throw Failure{1, context + ": " + vc_last_error()};
}

struct DataDeleter {
  void operator()(vc_data* d) const { vc_data_free(d); }
};
struct ModelDeleter {
  void operator()(vc_model* m) const { vc_model_free(m); }
};
struct ExtractDeleter {
  void operator()(vc_extract_result* r) const { vc_extract_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { vc_string_free(s); }
};
using Data = std::unique_ptr<vc_data, DataDeleter>;
using Model = std::unique_ptr<vc_model, ModelDeleter>;
using Text = std::unique_ptr<char, StringDeleter>;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
};

// "-" means stdout.
void write_text(const std::string& path, const char* text) {
  const std::string s = text ? text : "";
  if (path == "-") {
    std::fwrite(s.data(), 1, s.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{1, "cannot write '" + path + "'"};
  out << s;
  if (!out.flush()) throw Failure{1, "write failed for '" + path + "'"};
}

std::vector<std::string> header_of(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{1, "cannot open '" + path + "'"};
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string item;
  std::istringstream s(line);
  while (std::getline(s, item, ',')) {
    const auto b = item.find_first_not_of(" \t\"");
    const auto e = item.find_last_not_of(" \t\"");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

// Identifier columns of extracted parameter files are not variables.
std::vector<std::string> default_columns(const std::string& path) {
  std::vector<std::string> cols;
  for (auto& c : header_of(path))
    if (c != "recordingId" && c != "trackId" && c != "frame") cols.push_back(c);
  return cols;
}

Data read_data(const std::string& path, std::vector<std::string> columns) {
  if (columns.empty()) columns = default_columns(path);
  std::vector<const char*> ptrs;
  for (const auto& c : columns) ptrs.push_back(c.c_str());
  vc_data* d = nullptr;
  check(vc_data_read_csv(path.c_str(), ptrs.data(), ptrs.size(), &d), path);
  return Data(d);
}

std::vector<std::string> model_names(const vc_model* m) {
  std::vector<std::string> out;
  for (size_t j = 0; j < vc_model_dim(m); ++j) out.emplace_back(vc_model_name(m, j));
  return out;
}

Model load(const std::string& path) {
  vc_model* m = nullptr;
  check(vc_model_load(path.c_str(), &m), path);
  return Model(m);
}

void apply_jitter(vc_data* d, const std::vector<std::string>& columns, std::uint64_t seed) {
  for (std::size_t k = 0; k < columns.size(); ++k)
    check(vc_data_jitter(d, columns[k].c_str(), seed + k), "--jitter");
}

void write_data(const vc_data* d, const std::string& path) {
  char* text = nullptr;
  check(vc_data_to_csv(d, &text), "output");
  Text owned(text);
  write_text(path, text);
}

// ---- extract -----------------------------------------------------------

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string config;
  std::string out = "-";
  double radius = 0.0;
  double standstill_speed = 0.0;
  int standstill_frames = 0;
  std::string waittime_mode = "running";
};

int run_extract(const ExtractArgs& a, const Globals& g) {
  vc_extract_options o;
  vc_extract_options_init(&o);
  o.config_path = a.config.c_str();
  o.radius = a.radius;
  o.standstill_speed = a.standstill_speed;
  o.standstill_frames = a.standstill_frames;
  o.waittime_total = a.waittime_mode == "total";
  o.threads = g.threads;
  std::vector<const char*> inputs;
  for (const auto& p : a.inputs) inputs.push_back(p.c_str());
  vc_extract_result* raw = nullptr;
  check(vc_extract(inputs.data(), inputs.size(), &o, &raw), "extract");
  std::unique_ptr<vc_extract_result, ExtractDeleter> r(raw);

  const size_t errors = vc_extract_error_count(r.get());
  for (size_t i = 0; i < errors; ++i) std::cerr << "error: " << vc_extract_error(r.get(), i) << "\n";
  if (errors > 0 && vc_extract_recordings(r.get()) == 0)
    throw Failure{1, "no recording could be processed"};

  char* text = nullptr;
  check(vc_extract_to_csv(r.get(), &text), "extract");
  Text owned(text);
  write_text(a.out, text);
  if (!g.quiet)
    std::cerr << vc_extract_rows(r.get()) << " rows from " << vc_extract_recordings(r.get())
              << " recording(s)\n";
  return errors > 0 ? 2 : 0;
}

// ---- tau ---------------------------------------------------------------

struct TauArgs {
  std::string input;
  std::vector<std::string> columns;
  std::vector<std::string> jitter;
  std::string format = "table";
  std::string out = "-";
};

int run_tau(const TauArgs& a, const Globals& g) {
  Data d = read_data(a.input, a.columns);
  apply_jitter(d.get(), a.jitter, g.seed);
  if (a.format == "table") {
    char* text = nullptr;
    check(vc_rank_table(d.get(), g.threads, &text), "tau");
    Text owned(text);
    write_text(a.out, text);
    return 0;
  }
  const size_t n = vc_data_cols(d.get());
  std::vector<double> tau(n * n), rho(n * n);
  check(vc_correlation(d.get(), 0, g.threads, tau.data()), "tau");
  check(vc_correlation(d.get(), 1, g.threads, rho.data()), "rho");
  std::string s = "statistic,variable";
  for (size_t j = 0; j < n; ++j) s += std::string(",") + vc_data_name(d.get(), j);
  s += "\n";
  char buf[32];
  for (int kind = 0; kind < 2; ++kind) {
    const auto& m = kind == 0 ? tau : rho;
    for (size_t i = 0; i < n; ++i) {
      s += (kind == 0 ? "tau," : "rho,") + std::string(vc_data_name(d.get(), i));
      for (size_t j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, ",%.6f", m[i * n + j]);
        s += buf;
      }
      s += "\n";
    }
  }
  write_text(a.out, s.c_str());
  return 0;
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::vector<std::string> columns;
  std::vector<std::string> jitter;
  std::string families;
  std::string criterion = "aic";
  std::size_t truncation = 0;
  std::string weights = "abs";
  bool copula_scale = false;
  std::string out = "-";
};

int run_fit(const FitArgs& a, const Globals& g) {
  Data d = read_data(a.input, a.columns);
  apply_jitter(d.get(), a.jitter, g.seed);
  vc_data_set_copula_scale(d.get(), a.copula_scale);
  vc_fit_options o;
  vc_fit_options_init(&o);
  if (!a.families.empty()) o.families = a.families.c_str();
  o.criterion = a.criterion.c_str();
  o.truncation = a.truncation;
  o.signed_tau = a.weights == "signed";
  o.threads = g.threads;
  vc_model* raw = nullptr;
  check(vc_fit(d.get(), &o, &raw), "fit");
  Model m(raw);
  if (a.out == "-") {
    char* json = nullptr;
    check(vc_model_to_json(m.get(), &json), "fit");
    Text owned(json);
    write_text("-", json);
  } else {
    check(vc_model_save(m.get(), a.out.c_str()), a.out);
  }
  if (!g.quiet) {
    char* summary = nullptr;
    check(vc_model_summary(m.get(), &summary), "fit");
    Text owned(summary);
    std::cerr << summary;
  }
  return 0;
}

// ---- sample ------------------------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t n = 1000;
  bool copula_scale = false;
  std::string out = "-";
  std::string svg;
  std::string overlay;
};

int run_sample(const SampleArgs& a, const Globals& g) {
  Model m = load(a.model);
  vc_data* raw = nullptr;
  check(vc_sample(m.get(), a.n, g.seed, g.threads, a.copula_scale, &raw), "sample");
  Data s(raw);
  write_data(s.get(), a.out);
  if (!a.svg.empty()) {
    Data overlay;
    if (!a.overlay.empty()) overlay = read_data(a.overlay, model_names(m.get()));
    char* text = nullptr;
    check(vc_scatter_svg(s.get(), overlay.get(), &text), "--svg");
    Text owned(text);
    write_text(a.svg, text);
  }
  return 0;
}

// ---- density -----------------------------------------------------------

struct DensityArgs {
  std::string model;
  std::string input;
  bool copula_scale = false;
  std::string out = "-";
};

int run_density(const DensityArgs& a, const Globals& g) {
  Model m = load(a.model);
  Data x = read_data(a.input, model_names(m.get()));
  const size_t n = vc_data_rows(x.get());
  std::vector<double> ld(n);
  size_t clamped = 0;
  check(vc_log_density(m.get(), x.get(), a.copula_scale, g.threads, ld.data(), &clamped),
        "density");
  const char* name = "log_density";
  vc_data* raw = nullptr;
  check(vc_data_create(n, 1, &name, ld.data(), 0, &raw), "density");
  Data out(raw);
  write_data(out.get(), a.out);
  if (clamped > 0 && !g.quiet)
    std::cerr << "warning: " << clamped << " row(s) clamped to the marginal sample range\n";
  return 0;
}

// ---- rosenblatt --------------------------------------------------------

struct RosenblattArgs {
  std::string model;
  std::string input;
  bool inverse = false;
  std::string out = "-";
};

int run_rosenblatt(const RosenblattArgs& a, const Globals& g) {
  Model m = load(a.model);
  Data u = read_data(a.input, model_names(m.get()));
  vc_data_set_copula_scale(u.get(), 1);
  vc_data* raw = nullptr;
  check(vc_rosenblatt(m.get(), u.get(), a.inverse, g.threads, &raw), "rosenblatt");
  Data out(raw);
  write_data(out.get(), a.out);
  return 0;
}

void add_globals(CLI::App& app, Globals& g) {
  app.add_option("--seed", g.seed, "Random seed for sampling and jitter")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress informational messages on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vine copula modelling of traffic parameters"};
  app.require_subcommand(1);
  Globals g;
  add_globals(app, g);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Derive traffic parameters from trajectory recordings");
  extract->add_option("--input", ex.inputs, "Tracks CSV files or directories")->required();
  extract->add_option("--config", ex.config, "Geometry config JSON")->required();
  extract->add_option("--out", ex.out, "Output CSV ('-' for stdout)")->capture_default_str();
  extract->add_option("--radius", ex.radius, "Neighbourhood radius in meters (default 10 or config)")
      ->check(CLI::PositiveNumber);
  extract->add_option("--standstill-speed", ex.standstill_speed,
                      "Standstill speed threshold in m/s (default 0.1 or config)")
      ->check(CLI::PositiveNumber);
  extract->add_option("--standstill-frames", ex.standstill_frames,
                      "Minimum consecutive standstill frames (default 3 or config)")
      ->check(CLI::PositiveNumber);
  extract->add_option("--waittime-mode", ex.waittime_mode, "running: cumulative per frame; total: per track")
      ->check(CLI::IsMember({"running", "total"}))
      ->capture_default_str();

  TauArgs ta;
  auto* tau = app.add_subcommand("tau", "Kendall's tau and Spearman's rho matrices");
  tau->add_option("--input", ta.input, "Input CSV")->required();
  tau->add_option("--columns", ta.columns, "Columns to use (default: all but id columns)")->delimiter(',');
  tau->add_option("--jitter", ta.jitter, "Columns to jitter uniformly on [-0.5, 0.5]")->delimiter(',');
  tau->add_option("--format", ta.format, "table: tau below / rho above the diagonal; csv: both matrices")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();
  tau->add_option("--out", ta.out, "Output file ('-' for stdout)")->capture_default_str();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Select and fit a regular vine copula");
  fit->add_option("--input", fa.input, "Input CSV")->required();
  fit->add_option("--columns", fa.columns, "Columns to use (default: all but id columns)")->delimiter(',');
  fit->add_option("--jitter", fa.jitter, "Columns to jitter uniformly on [-0.5, 0.5]")->delimiter(',');
  fit->add_option("--families", fa.families,
                  "Comma-separated family set (Independence,Gaussian,StudentT,Clayton,Gumbel,Frank,Joe,BB1,BB7; default all)");
  fit->add_option("--criterion", fa.criterion, "Selection criterion")
      ->check(CLI::IsMember({"aic", "bic", "loglik"}, CLI::ignore_case))
      ->capture_default_str();
  fit->add_option("--truncation", fa.truncation, "Trees above this level are Independence (0: none)")
      ->capture_default_str();
  fit->add_option("--weights", fa.weights, "Spanning tree weights: abs (|tau|) or signed (tau)")
      ->check(CLI::IsMember({"abs", "signed"}))
      ->capture_default_str();
  fit->add_flag("--copula-scale", fa.copula_scale, "Input is already uniform; no marginals are fitted");
  fit->add_option("--out", fa.out, "Model JSON ('-' for stdout)")->capture_default_str();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Simulate from a fitted model");
  sample->add_option("--model", sa.model, "Model JSON")->required();
  sample->add_option("--n", sa.n, "Number of samples")->capture_default_str();
  sample->add_flag("--copula-scale", sa.copula_scale, "Emit uniforms instead of data-scale values");
  sample->add_option("--out", sa.out, "Output CSV ('-' for stdout)")->capture_default_str();
  sample->add_option("--svg", sa.svg, "Write a scatter-matrix SVG of the sample");
  sample->add_option("--overlay", sa.overlay, "CSV drawn in grey underneath the sample in --svg");

  DensityArgs da;
  auto* density = app.add_subcommand("density", "Log density of the model at each input row");
  density->add_option("--model", da.model, "Model JSON")->required();
  density->add_option("--input", da.input, "CSV with the model's columns")->required();
  density->add_flag("--copula-scale", da.copula_scale, "Input is uniform; copula density only");
  density->add_option("--out", da.out, "Output CSV ('-' for stdout)")->capture_default_str();

  RosenblattArgs ra;
  auto* rosen = app.add_subcommand("rosenblatt", "Rosenblatt transform of copula-scale rows");
  rosen->add_option("--model", ra.model, "Model JSON")->required();
  rosen->add_option("--input", ra.input, "CSV of uniforms with the model's columns")->required();
  rosen->add_flag("--inverse", ra.inverse, "Apply the inverse transform");
  rosen->add_option("--out", ra.out, "Output CSV ('-' for stdout)")->capture_default_str();

  // Global flags are accepted before or after the subcommand name.
  for (auto* sub : {extract, tau, fit, sample, density, rosen}) add_globals(*sub, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 1;
  }

  try {
    if (*extract) return run_extract(ex, g);
    if (*tau) return run_tau(ta, g);
    if (*fit) return run_fit(fa, g);
    if (*sample) return run_sample(sa, g);
    if (*density) return run_density(da, g);
    if (*rosen) return run_rosenblatt(ra, g);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return 1;
}
