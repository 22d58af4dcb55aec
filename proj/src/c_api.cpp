#include "vinecop/vinecop.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "vinecop/data_matrix.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/error.hpp"
#include "vinecop/fit.hpp"
#include "vinecop/pair_copula.hpp"
#include "vinecop/svg.hpp"
#include "vinecop/traffic.hpp"
#include "vinecop/vine.hpp"

struct vc_data {
  vinecop::DataMatrix m;
};

struct vc_model {
  vinecop::FittedVine v;
};

struct vc_extract_result {
  vinecop::ExtractResult r;
};

namespace {

thread_local std::string g_last_error;

vc_status fail(vc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

vc_status to_status(vinecop::ErrorCode code) {
  using vinecop::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
      return VC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain:
      return VC_ERR_DOMAIN;
    case ErrorCode::Io:
      return VC_ERR_IO;
    case ErrorCode::Parse:
      return VC_ERR_PARSE;
    case ErrorCode::Schema:
      return VC_ERR_SCHEMA;
    case ErrorCode::NonFinite:
      return VC_ERR_NON_FINITE;
    case ErrorCode::UndefinedResult:
      return VC_ERR_UNDEFINED;
    case ErrorCode::Config:
      return VC_ERR_CONFIG;
  }
  return VC_ERR_INTERNAL;
}

// Runs f and converts exceptions into status codes.
template <typename F>
vc_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return VC_OK;
  } catch (const vinecop::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VC_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

struct NullArgument : vinecop::Error {
  explicit NullArgument(const char* what)
      : vinecop::Error(vinecop::ErrorCode::InvalidArgument, std::string(what) + " is null") {}
};

template <typename T>
void require(const T* p, const char* what) {
  if (!p) throw NullArgument(what);
}

vinecop::PairCopula make_pair(const char* family, int rotation, const double* params,
                              std::size_t nparams) {
  require(family, "family");
  if (nparams > 0) require(params, "params");
  return vinecop::PairCopula(vinecop::family_from_name(family),
                             vinecop::rotation_from_degrees(rotation),
                             std::vector<double>(params, params + nparams));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

extern "C" {

const char* vc_version(void) { return "0.1.0"; }

const char* vc_last_error(void) { return g_last_error.c_str(); }

void vc_string_free(char* s) { std::free(s); }

// ---- data -----------------------------------------------------------------

vc_status vc_data_create(size_t rows, size_t cols, const char* const* names, const double* values,
                         int copula_scale, vc_data** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (cols > 0) require(names, "names");
    if (rows * cols > 0) require(values, "values");
    std::vector<std::string> n;
    for (size_t j = 0; j < cols; ++j) {
      require(names[j], "column name");
      n.emplace_back(names[j]);
    }
    std::vector<double> v(values, values + rows * cols);
    auto scale = copula_scale ? vinecop::Scale::Copula : vinecop::Scale::Data;
    vinecop::DataMatrix m(rows, std::move(n), std::move(v), scale);
    if (copula_scale) m.require_copula_scale();
    *out = new vc_data{std::move(m)};
  });
}

vc_status vc_data_read_csv(const char* path, const char* const* columns, size_t ncolumns,
                           vc_data** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::vector<std::string> cols;
    if (columns)
      for (size_t j = 0; j < ncolumns; ++j) {
        require(columns[j], "column name");
        cols.emplace_back(columns[j]);
      }
    *out = new vc_data{vinecop::read_csv_file(path, cols)};
  });
}

vc_status vc_data_write_csv(const vc_data* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    vinecop::write_csv_file(data->m, path);
  });
}

vc_status vc_data_to_csv(const vc_data* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    std::ostringstream s;
    vinecop::write_csv(data->m, s);
    *out = dup_string(s.str());
  });
}

size_t vc_data_rows(const vc_data* data) { return data ? data->m.rows() : 0; }

size_t vc_data_cols(const vc_data* data) { return data ? data->m.cols() : 0; }

const char* vc_data_name(const vc_data* data, size_t column) {
  if (!data || column >= data->m.cols()) return nullptr;
  return data->m.names()[column].c_str();
}

vc_status vc_data_values(const vc_data* data, double* out) {
  return guarded([&] {
    require(data, "data");
    if (data->m.values().empty()) return;
    require(out, "out");
    std::memcpy(out, data->m.values().data(), data->m.values().size() * sizeof(double));
  });
}

int vc_data_is_copula_scale(const vc_data* data) {
  return data && data->m.scale() == vinecop::Scale::Copula ? 1 : 0;
}

void vc_data_set_copula_scale(vc_data* data, int copula_scale) {
  if (data) data->m.set_scale(copula_scale ? vinecop::Scale::Copula : vinecop::Scale::Data);
}

vc_status vc_data_jitter(vc_data* data, const char* column, uint64_t seed) {
  return guarded([&] {
    require(data, "data");
    require(column, "column");
    vinecop::jitter_column(data->m, data->m.index_of(column), seed);
  });
}

void vc_data_free(vc_data* data) { delete data; }

// ---- rank statistics ------------------------------------------------------

vc_status vc_kendall_tau(const double* x, const double* y, size_t n, double* out) {
  return guarded([&] {
    require(x, "x");
    require(y, "y");
    require(out, "out");
    *out = vinecop::kendall_tau({x, n}, {y, n});
  });
}

vc_status vc_spearman_rho(const double* x, const double* y, size_t n, double* out) {
  return guarded([&] {
    require(x, "x");
    require(y, "y");
    require(out, "out");
    *out = vinecop::spearman_rho({x, n}, {y, n});
  });
}

vc_status vc_correlation(const vc_data* data, int kind, unsigned threads, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    if (kind != 0 && kind != 1)
      throw vinecop::Error(vinecop::ErrorCode::InvalidArgument,
                           "correlation kind must be 0 (tau) or 1 (rho)");
    auto k = kind == 0 ? vinecop::CorrelationKind::KendallTau : vinecop::CorrelationKind::SpearmanRho;
    auto m = vinecop::correlation_matrix(data->m, k, threads);
    std::memcpy(out, m.values.data(), m.values.size() * sizeof(double));
  });
}

vc_status vc_rank_table(const vc_data* data, unsigned threads, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    auto tau = vinecop::correlation_matrix(data->m, vinecop::CorrelationKind::KendallTau, threads);
    auto rho = vinecop::correlation_matrix(data->m, vinecop::CorrelationKind::SpearmanRho, threads);
    *out = dup_string(vinecop::format_rank_table(tau, rho));
  });
}

// ---- pair copulas ---------------------------------------------------------

vc_status vc_pair_cdf(const char* family, int rotation, const double* params, size_t nparams,
                      double u1, double u2, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = make_pair(family, rotation, params, nparams).cdf(u1, u2);
  });
}

vc_status vc_pair_pdf(const char* family, int rotation, const double* params, size_t nparams,
                      double u1, double u2, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = make_pair(family, rotation, params, nparams).pdf(u1, u2);
  });
}

vc_status vc_pair_hfunc(const char* family, int rotation, const double* params, size_t nparams,
                        int which, double u1, double u2, double* out) {
  return guarded([&] {
    require(out, "out");
    auto c = make_pair(family, rotation, params, nparams);
    if (which == 1)
      *out = c.hfunc1(u1, u2);
    else if (which == 2)
      *out = c.hfunc2(u1, u2);
    else
      throw vinecop::Error(vinecop::ErrorCode::InvalidArgument, "which must be 1 or 2");
  });
}

vc_status vc_pair_hinv(const char* family, int rotation, const double* params, size_t nparams,
                       int which, double p, double given, double* out) {
  return guarded([&] {
    require(out, "out");
    auto c = make_pair(family, rotation, params, nparams);
    if (which == 1)
      *out = c.hinv1(p, given);
    else if (which == 2)
      *out = c.hinv2(p, given);
    else
      throw vinecop::Error(vinecop::ErrorCode::InvalidArgument, "which must be 1 or 2");
  });
}

vc_status vc_pair_tau(const char* family, int rotation, const double* params, size_t nparams,
                      double* out) {
  return guarded([&] {
    require(out, "out");
    *out = make_pair(family, rotation, params, nparams).tau();
  });
}

// ---- models ---------------------------------------------------------------

void vc_fit_options_init(vc_fit_options* options) {
  if (!options) return;
  options->families = nullptr;
  options->criterion = nullptr;
  options->truncation = 0;
  options->signed_tau = 0;
  options->threads = 1;
}

vc_status vc_fit(const vc_data* data, const vc_fit_options* options, vc_model** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = nullptr;
    vc_fit_options o;
    vc_fit_options_init(&o);
    if (options) o = *options;

    vinecop::VineFitOptions fo;
    if (o.families) {
      std::vector<vinecop::Family> fams;
      for (const auto& name : split_list(o.families))
        fams.push_back(vinecop::family_from_name(name));
      if (fams.empty())
        throw vinecop::Error(vinecop::ErrorCode::InvalidArgument, "empty family list");
      fo.candidates = vinecop::candidates_for(fams);
    }
    if (o.criterion) fo.criterion = vinecop::criterion_from_name(o.criterion);
    fo.truncation = o.truncation;
    fo.weights = o.signed_tau ? vinecop::WeightMode::Tau : vinecop::WeightMode::AbsTau;
    fo.threads = o.threads;

    if (data->m.scale() == vinecop::Scale::Copula)
      *out = new vc_model{vinecop::select_structure(data->m, fo)};
    else
      *out = new vc_model{vinecop::fit_vine(data->m, fo)};
  });
}

vc_status vc_model_load(const char* path, vc_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new vc_model{vinecop::load_model(path)};
  });
}

vc_status vc_model_from_json(const char* json, vc_model** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = nullptr;
    *out = new vc_model{vinecop::model_from_json(json)};
  });
}

vc_status vc_model_save(const vc_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    vinecop::save_model(model->v, path);
  });
}

vc_status vc_model_to_json(const vc_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup_string(vinecop::model_to_json(model->v));
  });
}

vc_status vc_model_summary(const vc_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& v = model->v;
    const auto& names = v.names();
    std::ostringstream s;
    for (std::size_t t = 0; t < v.structure().trees.size(); ++t) {
      s << "tree " << (t + 1) << "\n";
      for (std::size_t i = 0; i < v.structure().trees[t].size(); ++i) {
        const auto& e = v.structure().trees[t][i];
        const auto& c = v.copulas()[t][i];
        std::string label = names[e.a] + "," + names[e.b];
        for (std::size_t k = 0; k < e.cond.size(); ++k)
          label += (k == 0 ? "|" : ",") + names[e.cond[k]];
        char tau[32];
        std::snprintf(tau, sizeof tau, "%.4f", c.tau());
        s << "  " << edge_label(e) << "  " << label << "  " << c.str() << "  tau=" << tau << "\n";
      }
    }
    const auto& info = v.info();
    if (info.n > 0) {
      char line[160];
      std::snprintf(line, sizeof line, "n=%zu loglik=%.4f params=%d aic=%.4f bic=%.4f\n", info.n,
                    info.loglik, info.nparams, info.aic(), info.bic());
      s << line;
    }
    for (const auto& w : info.warnings) s << "warning: " << w << "\n";
    *out = dup_string(s.str());
  });
}

size_t vc_model_dim(const vc_model* model) { return model ? model->v.dim() : 0; }

const char* vc_model_name(const vc_model* model, size_t variable) {
  if (!model || variable >= model->v.dim()) return nullptr;
  return model->v.names()[variable].c_str();
}

int vc_model_has_marginals(const vc_model* model) {
  return model && model->v.has_marginals() ? 1 : 0;
}

void vc_model_free(vc_model* model) { delete model; }

vc_status vc_sample(const vc_model* model, size_t n, uint64_t seed, unsigned threads,
                    int copula_scale, vc_data** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = nullptr;
    if (copula_scale)
      *out = new vc_data{model->v.sample_u(n, seed, threads)};
    else
      *out = new vc_data{model->v.sample(n, seed, threads)};
  });
}

vc_status vc_log_density(const vc_model* model, const vc_data* points, int copula_scale,
                         unsigned threads, double* out, size_t* clamped_rows) {
  return guarded([&] {
    require(model, "model");
    require(points, "points");
    if (points->m.rows() > 0) require(out, "out");
    std::vector<double> ld;
    std::size_t clamped = 0;
    if (copula_scale || !model->v.has_marginals())
      ld = model->v.log_density_u(points->m, threads);
    else
      ld = model->v.log_density(points->m, threads, &clamped);
    if (!ld.empty()) std::memcpy(out, ld.data(), ld.size() * sizeof(double));
    if (clamped_rows) *clamped_rows = clamped;
  });
}

vc_status vc_rosenblatt(const vc_model* model, const vc_data* points, int inverse,
                        unsigned threads, vc_data** out) {
  return guarded([&] {
    require(model, "model");
    require(points, "points");
    require(out, "out");
    *out = nullptr;
    if (inverse)
      *out = new vc_data{model->v.inverse_rosenblatt(points->m, threads)};
    else
      *out = new vc_data{model->v.rosenblatt(points->m, threads)};
  });
}

// ---- extraction -----------------------------------------------------------

void vc_extract_options_init(vc_extract_options* options) {
  if (!options) return;
  options->config_path = nullptr;
  options->radius = 0.0;
  options->standstill_speed = 0.0;
  options->standstill_frames = 0;
  options->waittime_total = 0;
  options->threads = 1;
}

vc_status vc_extract(const char* const* inputs, size_t ninputs, const vc_extract_options* options,
                     vc_extract_result** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(options, "options");
    if (!options->config_path)
      throw vinecop::Error(vinecop::ErrorCode::Config, "a geometry config is required");
    if (ninputs == 0)
      throw vinecop::Error(vinecop::ErrorCode::InvalidArgument, "no input paths given");
    require(inputs, "inputs");
    auto cfg = vinecop::load_config(options->config_path);
    if (options->radius > 0) cfg.radius = options->radius;
    if (options->standstill_speed > 0) cfg.standstill.speed = options->standstill_speed;
    if (options->standstill_frames > 0) cfg.standstill.min_frames = options->standstill_frames;
    cfg.wait_mode =
        options->waittime_total ? vinecop::WaitTimeMode::Total : vinecop::WaitTimeMode::Running;
    cfg.threads = options->threads;
    std::vector<std::string> paths;
    for (size_t i = 0; i < ninputs; ++i) {
      require(inputs[i], "input path");
      paths.emplace_back(inputs[i]);
    }
    *out = new vc_extract_result{vinecop::extract(paths, cfg)};
  });
}

size_t vc_extract_rows(const vc_extract_result* result) {
  return result ? result->r.samples.size() : 0;
}

size_t vc_extract_recordings(const vc_extract_result* result) {
  return result ? result->r.recordings : 0;
}

size_t vc_extract_error_count(const vc_extract_result* result) {
  return result ? result->r.errors.size() : 0;
}

const char* vc_extract_error(const vc_extract_result* result, size_t i) {
  if (!result || i >= result->r.errors.size()) return nullptr;
  return result->r.errors[i].c_str();
}

vc_status vc_extract_to_csv(const vc_extract_result* result, char** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    std::ostringstream s;
    vinecop::write_samples(result->r.samples, s);
    *out = dup_string(s.str());
  });
}

vc_status vc_extract_write_csv(const vc_extract_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    std::ostringstream s;
    vinecop::write_samples(result->r.samples, s);
    FILE* f = std::fopen(path, "wb");
    if (!f)
      throw vinecop::Error(vinecop::ErrorCode::Io, std::string("cannot write '") + path + "'");
    const std::string text = s.str();
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok)
      throw vinecop::Error(vinecop::ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

vc_status vc_extract_data(const vc_extract_result* result, vc_data** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = nullptr;
    *out = new vc_data{vinecop::samples_matrix(result->r.samples)};
  });
}

void vc_extract_free(vc_extract_result* result) { delete result; }

// ---- plots ----------------------------------------------------------------

vc_status vc_scatter_svg(const vc_data* points, const vc_data* overlay, char** out) {
  return guarded([&] {
    require(points, "points");
    require(out, "out");
    *out = dup_string(vinecop::scatter_matrix_svg(points->m, overlay ? &overlay->m : nullptr));
  });
}

}  // extern "C"
