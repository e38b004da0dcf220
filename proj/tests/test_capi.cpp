#include "infokm.h"

#include <cmath>
#include <cstdio>
#include <unistd.h>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("infokm_capi_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

struct Cleanup {
  std::string path;
  ~Cleanup() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("points lifecycle and bound claims") {
  const double data[8] = {0.0, 0.0, 3.0, 4.0, 1.0, 0.0, 0.0, 1.0};
  ikm_points* pts = nullptr;
  REQUIRE(ikm_points_create(data, 4, 2, &pts) == IKM_OK);
  CHECK(ikm_points_n(pts) == 4);
  CHECK(ikm_points_d(pts) == 2);
  CHECK(ikm_points_bound(pts) == doctest::Approx(5.0));

  CHECK(ikm_points_claim_bound(pts, 6.0) == IKM_OK);
  CHECK(ikm_points_bound(pts) == doctest::Approx(6.0));
  CHECK(ikm_points_claim_bound(pts, 1.0) == IKM_ERR_INVALID);
  CHECK(std::string(ikm_error_message()).find("bound") != std::string::npos);

  const std::string csv = temp_path("pts.csv");
  Cleanup c{csv};
  CHECK(ikm_points_save_csv(pts, csv.c_str()) == IKM_OK);
  ikm_points* redo = nullptr;
  REQUIRE(ikm_points_load_csv(csv.c_str(), &redo) == IKM_OK);
  CHECK(ikm_points_n(redo) == 4);
  ikm_points_free(redo);
  ikm_points_free(pts);

  ikm_points* missing = nullptr;
  CHECK(ikm_points_load_csv("/nonexistent/file.csv", &missing) == IKM_ERR_IO);
}

TEST_CASE("quadratic clustering through the C surface") {
  const double data[4] = {0.0, 0.1, 10.0, 10.1};
  ikm_points* pts = nullptr;
  REQUIRE(ikm_points_create(data, 4, 1, &pts) == IKM_OK);

  ikm_lloyd_config cfg;
  ikm_lloyd_config_init(&cfg);
  cfg.k = 2;
  cfg.seed = 7;

  ikm_run* run = nullptr;
  REQUIRE(ikm_cluster_quadratic(pts, &cfg, &run) == IKM_OK);
  CHECK(ikm_run_converged(run) == 1);
  CHECK(ikm_run_criterion(run) == doctest::Approx(0.0025).epsilon(1e-12));
  CHECK(ikm_run_size(run) == 4);

  int32_t labels[4] = {0, 0, 0, 0};
  REQUIRE(ikm_run_labels(run, labels) == IKM_OK);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[2] == labels[3]);
  CHECK(labels[0] != labels[2]);
  CHECK(labels[0] >= 1);
  CHECK(labels[0] <= 2);

  char* json = nullptr;
  REQUIRE(ikm_run_report_json(run, &json) == IKM_OK);
  CHECK(std::string(json).find("\"criterion_trace\"") != std::string::npos);
  ikm_string_free(json);

  const std::string labels_csv = temp_path("labels.csv");
  const std::string centers_csv = temp_path("centers.csv");
  Cleanup c1{labels_csv}, c2{centers_csv};
  CHECK(ikm_run_save_labels_csv(run, labels_csv.c_str()) == IKM_OK);
  CHECK(ikm_run_save_centers_csv(run, centers_csv.c_str()) == IKM_OK);
  ikm_run_free(run);

  // k > n is a config error, reported without a run handle.
  cfg.k = 9;
  ikm_run* bad = nullptr;
  CHECK(ikm_cluster_quadratic(pts, &cfg, &bad) == IKM_ERR_INVALID);
  CHECK(bad == nullptr);
  ikm_points_free(pts);
}

TEST_CASE("histogram clustering through the C surface") {
  const double weights[4] = {0.5, 0.5, 0.9, 0.1};
  ikm_histograms* data = nullptr;
  REQUIRE(ikm_histograms_create(weights, 2, 2, nullptr, &data) == IKM_OK);
  CHECK(ikm_histograms_count(data) == 2);
  CHECK(ikm_histograms_support(data) == 2);

  ikm_lloyd_config cfg;
  ikm_lloyd_config_init(&cfg);
  cfg.k = 1;
  cfg.seed = 3;

  ikm_run* run = nullptr;
  REQUIRE(ikm_cluster_info(data, &cfg, &run) == IKM_OK);
  CHECK(ikm_run_criterion(run) == doctest::Approx(0.111572).epsilon(1e-4));

  const std::string centers_csv = temp_path("density_centers.csv");
  Cleanup c{centers_csv};
  REQUIRE(ikm_run_save_centers_csv(run, centers_csv.c_str()) == IKM_OK);
  std::FILE* f = std::fopen(centers_csv.c_str(), "r");
  REQUIRE(f != nullptr);
  double v0 = 0.0, v1 = 0.0;
  REQUIRE(std::fscanf(f, "%lf,%lf", &v0, &v1) == 2);
  std::fclose(f);
  CHECK(v0 == doctest::Approx(1.5).epsilon(1e-9));  // density values wrt nu
  CHECK(v1 == doctest::Approx(0.5).epsilon(1e-9));

  char* json = nullptr;
  REQUIRE(ikm_run_report_json(run, &json) == IKM_OK);
  CHECK(std::string(json).find("per_cluster_log_z") != std::string::npos);
  ikm_string_free(json);
  ikm_run_free(run);
  ikm_histograms_free(data);
}

TEST_CASE("robust and gaussian-location runs through the C surface") {
  const double data[6] = {0.0, 0.1, 0.2, 5.0, 5.1, 5.2};
  ikm_points* pts = nullptr;
  REQUIRE(ikm_points_create(data, 6, 1, &pts) == IKM_OK);

  ikm_lloyd_config cfg;
  ikm_lloyd_config_init(&cfg);
  cfg.k = 2;
  cfg.seed = 11;
  cfg.abs_tol = 0.0;

  ikm_run* robust = nullptr;
  REQUIRE(ikm_cluster_robust(pts, &cfg, 1.0, &robust) == IKM_OK);
  char* json = nullptr;
  REQUIRE(ikm_run_report_json(robust, &json) == IKM_OK);
  CHECK(std::string(json).find("criterion_r2") != std::string::npos);
  ikm_string_free(json);
  ikm_run_free(robust);

  CHECK(ikm_cluster_robust(pts, &cfg, 0.0, &robust) == IKM_ERR_INVALID);

  ikm_run* quad = nullptr;
  ikm_run* info = nullptr;
  REQUIRE(ikm_cluster_quadratic(pts, &cfg, &quad) == IKM_OK);
  REQUIRE(ikm_cluster_info_gaussian(pts, &cfg, 2.0, &info) == IKM_OK);
  const double ratio = ikm_run_criterion(quad) / ikm_run_criterion(info);
  CHECK(ratio == doctest::Approx(8.0).epsilon(1e-9));
  int32_t lq[6], li[6];
  REQUIRE(ikm_run_labels(quad, lq) == IKM_OK);
  REQUIRE(ikm_run_labels(info, li) == IKM_OK);
  CHECK(std::memcmp(lq, li, sizeof lq) == 0);
  ikm_run_free(quad);
  ikm_run_free(info);
  ikm_points_free(pts);
}

TEST_CASE("bounds through the C surface") {
  double total = 0.0;
  char* json = nullptr;
  REQUIRE(ikm_bound_quadratic(1000, 2, 1.0, 0.1, IKM_MODE_UNIFORM, &total,
                              &json) == IKM_OK);
  CHECK(total == doctest::Approx(3.8379362874645992).epsilon(1e-12));
  CHECK(std::string(json).find("\"total\":") != std::string::npos);
  ikm_string_free(json);

  CHECK(ikm_bound_robust(1000, 2, 0.0, 0.1, IKM_MODE_UNIFORM, &total,
                         nullptr) == IKM_ERR_INVALID);
  CHECK(ikm_bound_info(1000, 2, 0.5, 1.0, 0.1, IKM_MODE_UNIFORM, &total,
                       nullptr) == IKM_ERR_INVALID);
  CHECK(std::string(ikm_error_message()).find("B >= 1") != std::string::npos);
  CHECK(ikm_bound_linear(1000, 2, 1.0, 1.0, 0.0, 1.0, 0.1, IKM_MODE_EXCESS,
                         0.0, &total, nullptr) == IKM_OK);
  CHECK(ikm_bound_quadratic(1000, 2, 1.0, 0.1, 99, &total, nullptr) ==
        IKM_ERR_INVALID);
}

TEST_CASE("suites through the C surface") {
  char* names = nullptr;
  REQUIRE(ikm_suite_list(&names) == IKM_OK);
  CHECK(std::string(names).find("gibbs") != std::string::npos);
  ikm_string_free(names);

  char* jsonl = nullptr;
  int32_t failures = -1;
  REQUIRE(ikm_suite_run("simple_endpoints", 42, &jsonl, &failures) == IKM_OK);
  CHECK(failures == 0);
  CHECK(std::string(jsonl).find("slack_left") != std::string::npos);
  ikm_string_free(jsonl);

  CHECK(ikm_suite_run("nosuch", 42, &jsonl, &failures) == IKM_ERR_INVALID);
}

TEST_CASE("synthesis round-trips into clustering") {
  ikm_synth_spec spec;
  ikm_synth_spec_init(&spec);
  spec.generator = IKM_GEN_UNIFORM_BALL;
  spec.n = 200;
  spec.d = 2;
  spec.B = 1.0;
  spec.seed = 8;

  ikm_points* pts = nullptr;
  REQUIRE(ikm_synth_points(&spec, &pts) == IKM_OK);
  CHECK(ikm_points_bound(pts) == doctest::Approx(1.0));

  ikm_lloyd_config cfg;
  ikm_lloyd_config_init(&cfg);
  cfg.k = 3;
  cfg.seed = 1;
  ikm_run* run = nullptr;
  REQUIRE(ikm_cluster_quadratic(pts, &cfg, &run) == IKM_OK);
  CHECK(ikm_run_criterion(run) > 0.0);
  ikm_run_free(run);
  ikm_points_free(pts);

  spec.generator = IKM_GEN_BAG_OF_WORDS;
  spec.m = 30;
  spec.topics = 2;
  spec.doc_length = 25;
  ikm_histograms* docs = nullptr;
  REQUIRE(ikm_synth_histograms(&spec, &docs) == IKM_OK);
  CHECK(ikm_histograms_count(docs) == 200);
  ikm_run* info = nullptr;
  REQUIRE(ikm_cluster_info(docs, &cfg, &info) == IKM_OK);
  ikm_run_free(info);
  ikm_histograms_free(docs);

  // A histogram spec cannot synthesize points.
  spec.generator = IKM_GEN_DIRICHLET;
  ikm_points* wrong = nullptr;
  CHECK(ikm_synth_points(&spec, &wrong) == IKM_ERR_INVALID);
}

TEST_CASE("sparse histogram loading") {
  const std::string path = temp_path("sparse.csv");
  Cleanup c{path};
  std::FILE* f = std::fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs("0,0,3\n0,1,1\n1,1,2\n1,2,2\n", f);
  std::fclose(f);

  ikm_histograms* h = nullptr;
  REQUIRE(ikm_histograms_load_sparse_csv(path.c_str(), nullptr, &h) == IKM_OK);
  CHECK(ikm_histograms_count(h) == 2);
  CHECK(ikm_histograms_support(h) == 3);
  ikm_histograms_free(h);
}
