#include "infokm.h"

#include <cstring>
#include <optional>
#include <string>

#include "infokm/core.hpp"
#include "infokm/harness.hpp"
#include "infokm/io.hpp"
#include "infokm/quantize.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ikm_status guarded(Fn&& fn) {
  try {
    fn();
    return IKM_OK;
  } catch (const ikm::invalid_input& e) {
    g_last_error = e.what();
    return IKM_ERR_INVALID;
  } catch (const ikm::io_error& e) {
    g_last_error = e.what();
    return IKM_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IKM_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ikm::DeviationMode to_mode(int32_t mode) {
  switch (mode) {
    case IKM_MODE_UNIFORM: return ikm::DeviationMode::uniform;
    case IKM_MODE_EXCESS: return ikm::DeviationMode::excess;
    case IKM_MODE_EXPECTATION: return ikm::DeviationMode::expectation;
    default: throw ikm::invalid_input("bound: unknown deviation mode");
  }
}

ikm::LloydConfig to_config(const ikm_lloyd_config* cfg) {
  if (!cfg) throw ikm::invalid_input("cluster: config is null");
  ikm::LloydConfig out;
  out.k = cfg->k;
  out.max_iters = cfg->max_iters;
  out.rel_tol = cfg->rel_tol;
  out.abs_tol = cfg->abs_tol;
  out.seed = cfg->seed;
  switch (cfg->init) {
    case IKM_INIT_DSQ: out.init = ikm::InitMethod::dsq_seeding; break;
    case IKM_INIT_RANDOM_POINTS: out.init = ikm::InitMethod::random_points; break;
    default: throw ikm::invalid_input("cluster: unknown init method");
  }
  switch (cfg->empty_policy) {
    case IKM_EMPTY_FARTHEST_RESEED:
      out.empty_policy = ikm::EmptyClusterPolicy::farthest_point_reseed;
      break;
    case IKM_EMPTY_KEEP_PREVIOUS:
      out.empty_policy = ikm::EmptyClusterPolicy::keep_previous;
      break;
    default: throw ikm::invalid_input("cluster: unknown empty-cluster policy");
  }
  out.threads = cfg->threads;
  return out;
}

ikm::SynthSpec to_spec(const ikm_synth_spec* spec) {
  if (!spec) throw ikm::invalid_input("synth: spec is null");
  ikm::SynthSpec out;
  switch (spec->generator) {
    case IKM_GEN_UNIFORM_BALL: out.generator = ikm::Generator::uniform_ball; break;
    case IKM_GEN_GAUSSIAN_MIXTURE:
      out.generator = ikm::Generator::truncated_gaussian_mixture;
      break;
    case IKM_GEN_DIRICHLET:
      out.generator = ikm::Generator::dirichlet_histograms;
      break;
    case IKM_GEN_BAG_OF_WORDS: out.generator = ikm::Generator::bag_of_words; break;
    default: throw ikm::invalid_input("synth: unknown generator");
  }
  out.n = spec->n;
  out.seed = spec->seed;
  out.B = spec->B;
  out.d = spec->d;
  out.components = spec->components;
  out.mixture_std = spec->mixture_std;
  out.m = spec->m;
  out.alpha = spec->alpha;
  out.topics = spec->topics;
  out.doc_length = spec->doc_length;
  return out;
}

std::string bound_out(const ikm::BoundReport& report, double* total,
                      char** json) {
  if (total) *total = report.total;
  std::string js = ikm::bound_report_json(report);
  if (json) *json = dup_string(js);
  return js;
}

}  // namespace

struct ikm_points {
  ikm::PointSet ps;
};

struct ikm_histograms {
  std::vector<ikm::Density> data;
  ikm::MeasurePtr nu;
};

struct ikm_run {
  std::string kind;
  ikm::Labeling labeling;
  std::vector<double> trace;
  std::vector<double> log_z;
  std::int32_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
  double criterion = 0.0;
  double criterion_r2 = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::int32_t k = 0;
  Eigen::MatrixXd centers_matrix;
  std::optional<ikm::QuantizerDensity> centers_density;
};

extern "C" {

const char* ikm_error_message(void) { return g_last_error.c_str(); }

void ikm_string_free(char* s) { delete[] s; }

// ------------------------------------------------------------------ points

ikm_status ikm_points_create(const double* row_major, int64_t n, int64_t d,
                             ikm_points** out) {
  return guarded([&] {
    if (!row_major || !out) throw ikm::invalid_input("points: null argument");
    Eigen::MatrixXd m(n, d);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < d; ++j) m(i, j) = row_major[i * d + j];
    }
    *out = new ikm_points{ikm::validate_pointset(m)};
  });
}

ikm_status ikm_points_load_csv(const char* path, ikm_points** out) {
  return guarded([&] {
    if (!path || !out) throw ikm::invalid_input("points: null argument");
    *out = new ikm_points{ikm::validate_pointset(ikm::load_csv_matrix(path))};
  });
}

ikm_status ikm_points_save_csv(const ikm_points* pts, const char* path) {
  return guarded([&] {
    if (!pts || !path) throw ikm::invalid_input("points: null argument");
    ikm::save_csv_matrix(path, pts->ps.points());
  });
}

ikm_status ikm_points_claim_bound(ikm_points* pts, double bound) {
  return guarded([&] {
    if (!pts) throw ikm::invalid_input("points: null argument");
    pts->ps = ikm::validate_pointset(pts->ps.points(), bound);
  });
}

int64_t ikm_points_n(const ikm_points* pts) { return pts ? pts->ps.n() : 0; }
int64_t ikm_points_d(const ikm_points* pts) { return pts ? pts->ps.dim() : 0; }
double ikm_points_bound(const ikm_points* pts) {
  return pts ? pts->ps.bound() : 0.0;
}
void ikm_points_free(ikm_points* pts) { delete pts; }

// -------------------------------------------------------------- histograms

ikm_status ikm_histograms_load_csv(const char* path, const char* nu_path,
                                   ikm_histograms** out) {
  return guarded([&] {
    if (!path || !out) throw ikm::invalid_input("histograms: null argument");
    ikm::MeasurePtr nu;
    if (nu_path) {
      const Eigen::MatrixXd w = ikm::load_csv_matrix(nu_path);
      if (w.rows() != 1) {
        throw ikm::io_error("reference measure file must hold a single row");
      }
      nu = ikm::ReferenceMeasure::make(w.row(0).array().transpose());
    }
    auto data = ikm::densities_from_matrix(ikm::load_csv_matrix(path), nu);
    auto measure = data.front().measure();
    *out = new ikm_histograms{std::move(data), std::move(measure)};
  });
}

ikm_status ikm_histograms_load_sparse_csv(const char* path, const char* nu_path,
                                          ikm_histograms** out) {
  return guarded([&] {
    if (!path || !out) throw ikm::invalid_input("histograms: null argument");
    ikm::MeasurePtr nu;
    if (nu_path) {
      const Eigen::MatrixXd w = ikm::load_csv_matrix(nu_path);
      if (w.rows() != 1) {
        throw ikm::io_error("reference measure file must hold a single row");
      }
      nu = ikm::ReferenceMeasure::make(w.row(0).array().transpose());
    }
    auto data =
        ikm::densities_from_triplets(ikm::load_csv_triplets(path), nu);
    auto measure = data.front().measure();
    *out = new ikm_histograms{std::move(data), std::move(measure)};
  });
}

ikm_status ikm_histograms_create(const double* weights_row_major, int64_t count,
                                 int64_t support, const double* nu_or_null,
                                 ikm_histograms** out) {
  return guarded([&] {
    if (!weights_row_major || !out) {
      throw ikm::invalid_input("histograms: null argument");
    }
    Eigen::MatrixXd m(count, support);
    for (int64_t i = 0; i < count; ++i) {
      for (int64_t j = 0; j < support; ++j) {
        m(i, j) = weights_row_major[i * support + j];
      }
    }
    ikm::MeasurePtr nu;
    if (nu_or_null) {
      Eigen::ArrayXd w(support);
      for (int64_t j = 0; j < support; ++j) w[j] = nu_or_null[j];
      nu = ikm::ReferenceMeasure::make(std::move(w));
    }
    auto data = ikm::densities_from_matrix(m, nu);
    auto measure = data.front().measure();
    *out = new ikm_histograms{std::move(data), std::move(measure)};
  });
}

ikm_status ikm_histograms_save_csv(const ikm_histograms* h, const char* path) {
  return guarded([&] {
    if (!h || !path) throw ikm::invalid_input("histograms: null argument");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(h->data.size()),
                      h->nu->size());
    for (std::size_t i = 0; i < h->data.size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) =
          h->data[i].values().matrix().transpose();
    }
    ikm::save_csv_matrix(path, m);
  });
}

int64_t ikm_histograms_count(const ikm_histograms* h) {
  return h ? static_cast<int64_t>(h->data.size()) : 0;
}
int64_t ikm_histograms_support(const ikm_histograms* h) {
  return h ? h->nu->size() : 0;
}
void ikm_histograms_free(ikm_histograms* h) { delete h; }

// -------------------------------------------------------------- clustering

void ikm_lloyd_config_init(ikm_lloyd_config* cfg) {
  if (!cfg) return;
  cfg->k = 1;
  cfg->max_iters = 200;
  cfg->rel_tol = 1e-9;
  cfg->abs_tol = 1e-12;
  cfg->seed = 0;
  cfg->init = IKM_INIT_DSQ;
  cfg->empty_policy = IKM_EMPTY_FARTHEST_RESEED;
  cfg->threads = 0;
}

ikm_status ikm_cluster_quadratic(const ikm_points* pts,
                                 const ikm_lloyd_config* cfg, ikm_run** out) {
  return guarded([&] {
    if (!pts || !out) throw ikm::invalid_input("cluster: null argument");
    const ikm::LloydConfig config = to_config(cfg);
    ikm::QuadRunReport rep = ikm::lloyd_quadratic(pts->ps, config);
    auto* run = new ikm_run;
    run->kind = "quadratic";
    run->labeling = std::move(rep.labeling);
    run->trace = std::move(rep.criterion_trace);
    run->iterations = rep.iterations_used;
    run->converged = rep.converged;
    run->degenerate = rep.degenerate;
    run->criterion = rep.criterion;
    run->seed = config.seed;
    run->k = config.k;
    run->centers_matrix = std::move(rep.centers);
    *out = run;
  });
}

ikm_status ikm_cluster_robust(const ikm_points* pts,
                              const ikm_lloyd_config* cfg, double sigma,
                              ikm_run** out) {
  return guarded([&] {
    if (!pts || !out) throw ikm::invalid_input("cluster: null argument");
    const ikm::LloydConfig config = to_config(cfg);
    ikm::QuadRunReport rep = ikm::lloyd_robust(pts->ps, config, sigma);
    auto* run = new ikm_run;
    run->kind = "robust";
    run->labeling = std::move(rep.labeling);
    run->trace = std::move(rep.criterion_trace);
    run->iterations = rep.iterations_used;
    run->converged = rep.converged;
    run->degenerate = rep.degenerate;
    run->criterion = rep.criterion;
    run->criterion_r2 = rep.criterion_r2;
    run->sigma = sigma;
    run->seed = config.seed;
    run->k = config.k;
    run->centers_matrix = std::move(rep.centers);
    *out = run;
  });
}

ikm_status ikm_cluster_info(const ikm_histograms* data,
                            const ikm_lloyd_config* cfg, ikm_run** out) {
  return guarded([&] {
    if (!data || !out) throw ikm::invalid_input("cluster: null argument");
    const ikm::LloydConfig config = to_config(cfg);
    ikm::InfoRunReport rep = ikm::lloyd_info(data->data, config);
    auto* run = new ikm_run;
    run->kind = "info";
    run->labeling = std::move(rep.labeling);
    run->trace = std::move(rep.criterion_trace);
    run->log_z = rep.centers.log_normalizers;
    run->iterations = rep.iterations_used;
    run->converged = rep.converged;
    run->degenerate = rep.degenerate;
    run->criterion = rep.criterion;
    run->seed = config.seed;
    run->k = config.k;
    run->centers_density = std::move(rep.centers);
    *out = run;
  });
}

ikm_status ikm_cluster_info_gaussian(const ikm_points* pts,
                                     const ikm_lloyd_config* cfg, double sigma,
                                     ikm_run** out) {
  return guarded([&] {
    if (!pts || !out) throw ikm::invalid_input("cluster: null argument");
    const ikm::LloydConfig config = to_config(cfg);
    ikm::QuadRunReport rep = ikm::lloyd_info_gaussian(pts->ps, config, sigma);
    auto* run = new ikm_run;
    run->kind = "info_gaussian";
    run->labeling = std::move(rep.labeling);
    run->trace = std::move(rep.criterion_trace);
    run->log_z = std::move(rep.per_cluster_log_z);
    run->iterations = rep.iterations_used;
    run->converged = rep.converged;
    run->degenerate = rep.degenerate;
    run->criterion = rep.criterion;
    run->sigma = sigma;
    run->seed = config.seed;
    run->k = config.k;
    run->centers_matrix = std::move(rep.centers);
    *out = run;
  });
}

int32_t ikm_run_converged(const ikm_run* run) {
  return run && run->converged ? 1 : 0;
}
int32_t ikm_run_iterations(const ikm_run* run) {
  return run ? run->iterations : 0;
}
double ikm_run_criterion(const ikm_run* run) {
  return run ? run->criterion : 0.0;
}
int64_t ikm_run_size(const ikm_run* run) {
  return run ? static_cast<int64_t>(run->labeling.labels.size()) : 0;
}

ikm_status ikm_run_labels(const ikm_run* run, int32_t* out) {
  return guarded([&] {
    if (!run || !out) throw ikm::invalid_input("run: null argument");
    for (std::size_t i = 0; i < run->labeling.labels.size(); ++i) {
      out[i] = run->labeling.labels[i] + 1;
    }
  });
}

ikm_status ikm_run_save_labels_csv(const ikm_run* run, const char* path) {
  return guarded([&] {
    if (!run || !path) throw ikm::invalid_input("run: null argument");
    std::string csv;
    for (std::size_t i = 0; i < run->labeling.labels.size(); ++i) {
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(run->labeling.labels[i] + 1);
      csv += '\n';
    }
    ikm::write_text_file(path, csv);
  });
}

ikm_status ikm_run_save_centers_csv(const ikm_run* run, const char* path) {
  return guarded([&] {
    if (!run || !path) throw ikm::invalid_input("run: null argument");
    if (run->centers_density) {
      Eigen::MatrixXd m(
          static_cast<Eigen::Index>(run->centers_density->centers.size()),
          run->centers_density->centers.front().size());
      for (std::size_t j = 0; j < run->centers_density->centers.size(); ++j) {
        m.row(static_cast<Eigen::Index>(j)) =
            run->centers_density->centers[j].values().matrix().transpose();
      }
      ikm::save_csv_matrix(path, m);
    } else {
      ikm::save_csv_matrix(path, run->centers_matrix);
    }
  });
}

ikm_status ikm_run_report_json(const ikm_run* run, char** out) {
  return guarded([&] {
    if (!run || !out) throw ikm::invalid_input("run: null argument");
    std::string js = "{";
    js += ikm::json_quote("command") + ":" + ikm::json_quote(run->kind) + ",";
    js += ikm::json_quote("k") + ":" + std::to_string(run->k) + ",";
    js += ikm::json_quote("n") + ":" +
          std::to_string(run->labeling.labels.size()) + ",";
    js += ikm::json_quote("seed") + ":" + std::to_string(run->seed) + ",";
    if (!std::isnan(run->sigma)) {
      js += ikm::json_quote("sigma") + ":" + ikm::json_number(run->sigma) + ",";
    }
    js += ikm::json_quote("criterion") + ":" + ikm::json_number(run->criterion) +
          ",";
    if (!std::isnan(run->criterion_r2)) {
      js += ikm::json_quote("criterion_r2") + ":" +
            ikm::json_number(run->criterion_r2) + ",";
    }
    js += ikm::json_quote("iterations") + ":" + std::to_string(run->iterations) +
          ",";
    js += ikm::json_quote("converged") + ":" +
          (run->converged ? "true" : "false") + ",";
    js += ikm::json_quote("degenerate") + ":" +
          (run->degenerate ? "true" : "false") + ",";
    js += ikm::json_quote("criterion_trace") + ":[";
    for (std::size_t t = 0; t < run->trace.size(); ++t) {
      if (t) js += ',';
      js += ikm::json_number(run->trace[t]);
    }
    js += "]";
    if (!run->log_z.empty()) {
      js += "," + ikm::json_quote("per_cluster_log_z") + ":[";
      for (std::size_t j = 0; j < run->log_z.size(); ++j) {
        if (j) js += ',';
        js += ikm::json_number(run->log_z[j]);
      }
      js += "]";
    }
    js += "}";
    *out = dup_string(js);
  });
}

void ikm_run_free(ikm_run* run) { delete run; }

// ------------------------------------------------------------------ bounds

ikm_status ikm_bound_linear(int64_t n, int32_t k, double theta_norm,
                            double w_norm, double a, double b, double delta,
                            int32_t mode, double epsilon, double* total,
                            char** json) {
  return guarded([&] {
    ikm::LinearBoundInputs in;
    in.n = n;
    in.k = k;
    in.theta_norm = theta_norm;
    in.w_norm = w_norm;
    in.a = a;
    in.b = b;
    in.delta = delta;
    in.mode = to_mode(mode);
    in.epsilon = epsilon;
    bound_out(ikm::linear_bound(in), total, json);
  });
}

ikm_status ikm_bound_quadratic(int64_t n, int32_t k, double B, double delta,
                               int32_t mode, double* total, char** json) {
  return guarded([&] {
    bound_out(ikm::quadratic_bound(n, k, B, delta, to_mode(mode)), total, json);
  });
}

ikm_status ikm_bound_quadratic_unsimplified(int64_t n, int32_t k, double B,
                                            double delta, int32_t mode,
                                            double* total, char** json) {
  return guarded([&] {
    bound_out(ikm::quadratic_bound_unsimplified(n, k, B, delta, to_mode(mode)),
              total, json);
  });
}

ikm_status ikm_bound_robust(int64_t n, int32_t k, double sigma, double delta,
                            int32_t mode, double* total, char** json) {
  return guarded([&] {
    bound_out(ikm::robust_bound(n, k, sigma, delta, to_mode(mode)), total, json);
  });
}

ikm_status ikm_bound_info(int64_t n, int32_t k, double B, double C,
                          double delta, int32_t mode, double* total,
                          char** json) {
  return guarded([&] {
    bound_out(ikm::info_bound(n, k, B, C, delta, to_mode(mode)), total, json);
  });
}

// ------------------------------------------------------------------ suites

ikm_status ikm_suite_list(char** names_csv) {
  return guarded([&] {
    if (!names_csv) throw ikm::invalid_input("suites: null argument");
    std::string out;
    for (const std::string& name : ikm::suite_names()) {
      if (!out.empty()) out += ',';
      out += name;
    }
    *names_csv = dup_string(out);
  });
}

ikm_status ikm_suite_run(const char* name, uint64_t seed, char** jsonl,
                         int32_t* failures) {
  return guarded([&] {
    if (!name) throw ikm::invalid_input("suites: null suite name");
    std::string out;
    int32_t failed = 0;
    const auto consume = [&](const ikm::SuiteResult& r) {
      out += ikm::verdicts_to_jsonl(r);
      for (const auto& c : r.cases) {
        if (!c.pass) ++failed;
      }
    };
    if (std::string(name) == "all") {
      for (const std::string& s : ikm::suite_names()) {
        consume(ikm::run_suite(s, seed));
      }
    } else {
      consume(ikm::run_suite(name, seed));
    }
    if (jsonl) *jsonl = dup_string(out);
    if (failures) *failures = failed;
  });
}

// --------------------------------------------------------------- synthesis

void ikm_synth_spec_init(ikm_synth_spec* spec) {
  if (!spec) return;
  spec->generator = IKM_GEN_UNIFORM_BALL;
  spec->n = 100;
  spec->seed = 0;
  spec->B = 1.0;
  spec->d = 2;
  spec->components = 2;
  spec->mixture_std = 0.0;
  spec->m = 10;
  spec->alpha = 1.0;
  spec->topics = 3;
  spec->doc_length = 50;
}

ikm_status ikm_synth_points(const ikm_synth_spec* spec, ikm_points** out) {
  return guarded([&] {
    if (!out) throw ikm::invalid_input("synth: null argument");
    *out = new ikm_points{ikm::generate_points(to_spec(spec))};
  });
}

ikm_status ikm_synth_histograms(const ikm_synth_spec* spec,
                                ikm_histograms** out) {
  return guarded([&] {
    if (!out) throw ikm::invalid_input("synth: null argument");
    auto data = ikm::generate_histograms(to_spec(spec));
    auto measure = data.front().measure();
    *out = new ikm_histograms{std::move(data), std::move(measure)};
  });
}

}  // extern "C"
