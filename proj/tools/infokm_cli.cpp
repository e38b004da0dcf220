// Command line front end for the infokm shared library. Every operation
// goes through the C API in infokm.h.
//
// Exit codes: 0 success, 1 validation-suite failure, 2 invalid input or
// configuration (including I/O problems), 3 cluster run hit max_iters
// without converging (outputs are still written).

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infokm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

int fail(ikm_status status) {
  std::cerr << "error: " << ikm_error_message() << "\n";
  (void)status;
  return kExitInvalid;
}

struct StringOut {
  char* value = nullptr;
  ~StringOut() { ikm_string_free(value); }
};

struct ClusterArgs {
  std::string input;
  std::string nu_file;
  std::string out_prefix = "infokm_run";
  bool sparse = false;
  double sigma = 1.0;
  ikm_lloyd_config cfg{};
  std::string init = "dsq";
  std::string empty_policy = "reseed";
};

void add_lloyd_flags(CLI::App* sub, ClusterArgs& args) {
  sub->add_option("--in", args.input, "input CSV file")->required();
  sub->add_option("--k", args.cfg.k, "number of centers")->required();
  sub->add_option("--seed", args.cfg.seed, "master seed");
  sub->add_option("--max-iters", args.cfg.max_iters, "iteration cap");
  sub->add_option("--rel-tol", args.cfg.rel_tol, "relative stopping tolerance");
  sub->add_option("--abs-tol", args.cfg.abs_tol, "absolute stopping tolerance");
  sub->add_option("--init", args.init, "seeding: dsq or random");
  sub->add_option("--empty-policy", args.empty_policy,
                  "empty clusters: reseed or keep");
  sub->add_option("--threads", args.cfg.threads,
                  "thread cap (default: INFOKM_THREADS or hardware)");
  sub->add_option("--out-prefix", args.out_prefix,
                  "prefix for labels/centers/report files");
}

int resolve_cluster_enums(ClusterArgs& args) {
  if (args.init == "dsq") {
    args.cfg.init = IKM_INIT_DSQ;
  } else if (args.init == "random") {
    args.cfg.init = IKM_INIT_RANDOM_POINTS;
  } else {
    std::cerr << "error: unknown --init '" << args.init << "'\n";
    return kExitInvalid;
  }
  if (args.empty_policy == "reseed") {
    args.cfg.empty_policy = IKM_EMPTY_FARTHEST_RESEED;
  } else if (args.empty_policy == "keep") {
    args.cfg.empty_policy = IKM_EMPTY_KEEP_PREVIOUS;
  } else {
    std::cerr << "error: unknown --empty-policy '" << args.empty_policy << "'\n";
    return kExitInvalid;
  }
  return kExitOk;
}

int emit_run(ikm_run* run, const ClusterArgs& args) {
  std::unique_ptr<ikm_run, decltype(&ikm_run_free)> guard(run, &ikm_run_free);
  ikm_status st =
      ikm_run_save_labels_csv(run, (args.out_prefix + ".labels.csv").c_str());
  if (st != IKM_OK) return fail(st);
  st = ikm_run_save_centers_csv(run, (args.out_prefix + ".centers.csv").c_str());
  if (st != IKM_OK) return fail(st);
  StringOut report;
  st = ikm_run_report_json(run, &report.value);
  if (st != IKM_OK) return fail(st);
  std::ofstream rf(args.out_prefix + ".report.json", std::ios::binary);
  if (!rf) {
    std::cerr << "error: cannot write report file\n";
    return kExitInvalid;
  }
  rf << report.value << "\n";
  std::cout << report.value << "\n";
  return ikm_run_converged(run) ? kExitOk : kExitNotConverged;
}

int run_cluster(const std::string& engine, ClusterArgs& args) {
  if (int rc = resolve_cluster_enums(args); rc != kExitOk) return rc;
  ikm_run* run = nullptr;
  if (engine == "info") {
    ikm_histograms* data = nullptr;
    const char* nu = args.nu_file.empty() ? nullptr : args.nu_file.c_str();
    ikm_status st = args.sparse
                        ? ikm_histograms_load_sparse_csv(args.input.c_str(), nu,
                                                         &data)
                        : ikm_histograms_load_csv(args.input.c_str(), nu, &data);
    if (st != IKM_OK) return fail(st);
    st = ikm_cluster_info(data, &args.cfg, &run);
    ikm_histograms_free(data);
    if (st != IKM_OK) return fail(st);
    return emit_run(run, args);
  }
  ikm_points* pts = nullptr;
  ikm_status st = ikm_points_load_csv(args.input.c_str(), &pts);
  if (st != IKM_OK) return fail(st);
  st = engine == "robust"
           ? ikm_cluster_robust(pts, &args.cfg, args.sigma, &run)
           : ikm_cluster_quadratic(pts, &args.cfg, &run);
  ikm_points_free(pts);
  if (st != IKM_OK) return fail(st);
  return emit_run(run, args);
}

struct BoundArgs {
  std::int64_t n = 1000;
  std::int32_t k = 2;
  double B = 1.0;
  double C = 1.0;
  double sigma = 1.0;
  double delta = 0.1;
  double theta_norm = 1.0;
  double w_norm = 1.0;
  double a = 0.0;
  double b = 1.0;
  double epsilon = 0.0;
  std::string mode = "uniform";
  bool unsimplified = false;
  std::string sweep;
  std::string out;
};

int parse_mode(const std::string& mode, int32_t* out) {
  if (mode == "uniform") {
    *out = IKM_MODE_UNIFORM;
  } else if (mode == "excess") {
    *out = IKM_MODE_EXCESS;
  } else if (mode == "expectation") {
    *out = IKM_MODE_EXPECTATION;
  } else {
    std::cerr << "error: unknown --mode '" << mode << "'\n";
    return kExitInvalid;
  }
  return kExitOk;
}

ikm_status eval_bound(const std::string& kind, const BoundArgs& args,
                      int32_t mode, std::int64_t n, std::int32_t k,
                      double* total, char** json) {
  if (kind == "linear") {
    return ikm_bound_linear(n, k, args.theta_norm, args.w_norm, args.a, args.b,
                            args.delta, mode, args.epsilon, total, json);
  }
  if (kind == "quadratic") {
    return args.unsimplified
               ? ikm_bound_quadratic_unsimplified(n, k, args.B, args.delta,
                                                  mode, total, json)
               : ikm_bound_quadratic(n, k, args.B, args.delta, mode, total,
                                     json);
  }
  if (kind == "robust") {
    return ikm_bound_robust(n, k, args.sigma, args.delta, mode, total, json);
  }
  return ikm_bound_info(n, k, args.B, args.C, args.delta, mode, total, json);
}

// --sweep n=100:100000:20 (geometric grid) or k=2:64:10
int run_sweep(const std::string& kind, const BoundArgs& args, int32_t mode) {
  const auto eq = args.sweep.find('=');
  const auto c1 = args.sweep.find(':');
  const auto c2 = args.sweep.rfind(':');
  if (eq == std::string::npos || c1 == std::string::npos || c2 <= c1) {
    std::cerr << "error: --sweep expects param=lo:hi:steps\n";
    return kExitInvalid;
  }
  const std::string param = args.sweep.substr(0, eq);
  if (param != "n" && param != "k") {
    std::cerr << "error: --sweep parameter must be n or k\n";
    return kExitInvalid;
  }
  double lo = 0, hi = 0;
  int steps = 0;
  try {
    lo = std::stod(args.sweep.substr(eq + 1, c1 - eq - 1));
    hi = std::stod(args.sweep.substr(c1 + 1, c2 - c1 - 1));
    steps = std::stoi(args.sweep.substr(c2 + 1));
  } catch (const std::exception&) {
    std::cerr << "error: --sweep expects param=lo:hi:steps\n";
    return kExitInvalid;
  }
  if (!(lo > 0) || !(hi >= lo) || steps < 2) {
    std::cerr << "error: --sweep needs 0 < lo <= hi and steps >= 2\n";
    return kExitInvalid;
  }

  std::string csv = param + ",total\n";
  std::int64_t last = -1;
  for (int s = 0; s < steps; ++s) {
    const double frac = static_cast<double>(s) / (steps - 1);
    const double value = lo * std::pow(hi / lo, frac);
    const std::int64_t v = static_cast<std::int64_t>(std::llround(value));
    if (v == last) continue;
    last = v;
    const std::int64_t n = param == "n" ? v : args.n;
    const std::int32_t k = param == "k" ? static_cast<std::int32_t>(v) : args.k;
    double total = 0.0;
    const ikm_status st = eval_bound(kind, args, mode, n, k, &total, nullptr);
    if (st != IKM_OK) return fail(st);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.17g\n", v, total);
    csv += buf;
  }
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(args.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << args.out << "\n";
      return kExitInvalid;
    }
    f << csv;
  }
  return kExitOk;
}

int run_bound(const std::string& kind, const BoundArgs& args) {
  int32_t mode = IKM_MODE_UNIFORM;
  if (int rc = parse_mode(args.mode, &mode); rc != kExitOk) return rc;
  if (!args.sweep.empty()) return run_sweep(kind, args, mode);
  StringOut json;
  const ikm_status st =
      eval_bound(kind, args, mode, args.n, args.k, nullptr, &json.value);
  if (st != IKM_OK) return fail(st);
  std::cout << json.value << "\n";
  return kExitOk;
}

int run_validate(const std::string& suite, std::uint64_t seed,
                 const std::string& out) {
  StringOut jsonl;
  int32_t failures = 0;
  const ikm_status st =
      ikm_suite_run(suite.c_str(), seed, &jsonl.value, &failures);
  if (st != IKM_OK) return fail(st);
  if (out.empty()) {
    std::cout << jsonl.value;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return kExitInvalid;
    }
    f << jsonl.value;
  }
  return failures == 0 ? kExitOk : kExitSuiteFailure;
}

struct SynthArgs {
  std::string generator;
  std::string out;
  ikm_synth_spec spec{};
};

int run_synth(SynthArgs& args) {
  if (args.generator == "uniform_ball") {
    args.spec.generator = IKM_GEN_UNIFORM_BALL;
  } else if (args.generator == "gaussian_mixture") {
    args.spec.generator = IKM_GEN_GAUSSIAN_MIXTURE;
  } else if (args.generator == "dirichlet") {
    args.spec.generator = IKM_GEN_DIRICHLET;
  } else if (args.generator == "bag_of_words") {
    args.spec.generator = IKM_GEN_BAG_OF_WORDS;
  } else {
    std::cerr << "error: unknown generator '" << args.generator << "'\n";
    return kExitInvalid;
  }
  if (args.spec.generator == IKM_GEN_UNIFORM_BALL ||
      args.spec.generator == IKM_GEN_GAUSSIAN_MIXTURE) {
    ikm_points* pts = nullptr;
    ikm_status st = ikm_synth_points(&args.spec, &pts);
    if (st != IKM_OK) return fail(st);
    st = ikm_points_save_csv(pts, args.out.c_str());
    ikm_points_free(pts);
    if (st != IKM_OK) return fail(st);
  } else {
    ikm_histograms* h = nullptr;
    ikm_status st = ikm_synth_histograms(&args.spec, &h);
    if (st != IKM_OK) return fail(st);
    st = ikm_histograms_save_csv(h, args.out.c_str());
    ikm_histograms_free(h);
    if (st != IKM_OK) return fail(st);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-means engines (quadratic, robust, information), "
               "generalization bounds, and the validation harness"};
  app.require_subcommand(1);

  // cluster ----------------------------------------------------------------
  auto* cluster = app.add_subcommand("cluster", "run a Lloyd engine");
  cluster->require_subcommand(1);
  ClusterArgs quad_args, robust_args, info_args;
  ikm_lloyd_config_init(&quad_args.cfg);
  ikm_lloyd_config_init(&robust_args.cfg);
  ikm_lloyd_config_init(&info_args.cfg);

  auto* quad = cluster->add_subcommand("quadratic", "plain k-means");
  add_lloyd_flags(quad, quad_args);

  auto* robust = cluster->add_subcommand("robust", "bounded-criterion k-means");
  add_lloyd_flags(robust, robust_args);
  robust->add_option("--sigma", robust_args.sigma, "scale parameter")
      ->required();

  auto* info = cluster->add_subcommand("info", "information k-means");
  add_lloyd_flags(info, info_args);
  info->add_flag("--sparse", info_args.sparse,
                 "input is row,col,weight triplets");
  info->add_option("--nu", info_args.nu_file,
                   "reference measure CSV (single row); uniform by default");

  // bound ------------------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "evaluate a generalization bound");
  bound->require_subcommand(1);
  BoundArgs bound_args[4];
  const char* bound_kinds[4] = {"linear", "quadratic", "robust", "info"};
  for (int i = 0; i < 4; ++i) {
    auto* sub = bound->add_subcommand(bound_kinds[i]);
    BoundArgs& ba = bound_args[i];
    sub->add_option("--n", ba.n, "sample size");
    sub->add_option("--k", ba.k, "number of centers");
    sub->add_option("--delta", ba.delta, "confidence level in (0,1)");
    sub->add_option("--mode", ba.mode, "uniform, excess or expectation");
    sub->add_option("--sweep", ba.sweep, "param=lo:hi:steps CSV sweep");
    sub->add_option("--out", ba.out, "sweep CSV output file");
    if (i == 0) {
      sub->add_option("--theta-norm", ba.theta_norm, "parameter norm");
      sub->add_option("--w-norm", ba.w_norm, "data sup-norm");
      sub->add_option("--a", ba.a, "loss range lower end");
      sub->add_option("--b", ba.b, "loss range upper end");
      sub->add_option("--epsilon", ba.epsilon, "expectation-mode epsilon");
    }
    if (i == 1) {
      sub->add_option("--B", ba.B, "norm bound");
      sub->add_flag("--unsimplified", ba.unsimplified,
                    "emit the three-term form");
    }
    if (i == 2) sub->add_option("--sigma", ba.sigma, "scale parameter");
    if (i == 3) {
      sub->add_option("--B", ba.B, "information-radius constant (>= 1)");
      sub->add_option("--C", ba.C, "log-density second-moment constant");
    }
  }

  // validate ---------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "run property suites");
  std::string suite = "all";
  std::uint64_t val_seed = 0;
  std::string val_out;
  validate->add_option("suite", suite, "suite name or 'all'");
  validate->add_option("--seed", val_seed, "master seed");
  validate->add_option("--out", val_out, "JSONL output file (default stdout)");

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate synthetic data");
  SynthArgs synth_args;
  ikm_synth_spec_init(&synth_args.spec);
  synth->add_option("generator", synth_args.generator,
                    "uniform_ball, gaussian_mixture, dirichlet, bag_of_words")
      ->required();
  synth->add_option("--out", synth_args.out, "output CSV")->required();
  synth->add_option("--n", synth_args.spec.n, "sample count");
  synth->add_option("--seed", synth_args.spec.seed, "seed");
  synth->add_option("--B", synth_args.spec.B, "norm bound");
  synth->add_option("--d", synth_args.spec.d, "dimension");
  synth->add_option("--components", synth_args.spec.components,
                    "mixture components");
  synth->add_option("--mixture-std", synth_args.spec.mixture_std,
                    "component std (default 0.05 B)");
  synth->add_option("--m", synth_args.spec.m, "histogram support size");
  synth->add_option("--alpha", synth_args.spec.alpha, "Dirichlet parameter");
  synth->add_option("--topics", synth_args.spec.topics, "topic count");
  synth->add_option("--doc-length", synth_args.spec.doc_length,
                    "words per document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  if (quad->parsed()) return run_cluster("quadratic", quad_args);
  if (robust->parsed()) return run_cluster("robust", robust_args);
  if (info->parsed()) return run_cluster("info", info_args);
  for (int i = 0; i < 4; ++i) {
    if (bound->get_subcommand(bound_kinds[i])->parsed()) {
      return run_bound(bound_kinds[i], bound_args[i]);
    }
  }
  if (validate->parsed()) return run_validate(suite, val_seed, val_out);
  if (synth->parsed()) return run_synth(synth_args);
  return kExitInvalid;
}
