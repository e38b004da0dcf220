// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "infokm/bounds.hpp"
#include "infokm/harness.hpp"
#include "infokm/numeric.hpp"
#include "infokm/parallel.hpp"
#include "infokm/quantize.hpp"

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass, double secs,
            const std::string& detail = "") {
  std::printf("[%s] %2d. %-22s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), secs, detail.empty() ? "" : " ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double suite_max_measure(const ikm::SuiteResult& r, const std::string& key) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : r.cases) {
    for (const auto& [k, v] : c.measured) {
      if (k == key) worst = std::max(worst, v);
    }
  }
  return worst;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

constexpr std::uint64_t kSeed = 42;

void criterion_1_simple_endpoints() {
  Timer t;
  const auto [left, right] = ikm::simple_inequality_slacks();
  const ikm::SuiteResult suite = ikm::run_suite("simple_endpoints", kSeed);
  const bool pass = suite.passed &&
                    std::abs(left - 0.97990277993484284) <= 1e-5 &&
                    std::abs(right - 0.63588128826456638) <= 1e-5 &&
                    left >= 0.9 && right >= 0.6 && t.seconds() < 1.0;
  report(1, "simple_endpoints", pass, t.seconds(),
         "slacks=(" + fmt(left) + "," + fmt(right) + ")");
}

void criterion_2_identity_suites() {
  Timer t;
  double worst = 0.0;
  bool pass = true;
  for (const char* name : {"gibbs", "chain_rule", "bayes"}) {
    const ikm::SuiteResult r = ikm::run_suite(name, kSeed);
    pass = pass && r.passed && r.cases.size() == 1000;
    worst = std::max(worst, suite_max_measure(r, "gap"));
  }
  pass = pass && worst <= 1e-10 && t.seconds() < 10.0;
  report(2, "identity_suites", pass, t.seconds(), "max_gap=" + fmt(worst));
}

void criterion_3_pythagoras() {
  Timer t;
  const ikm::SuiteResult r = ikm::run_suite("pythagoras", kSeed);
  const double worst = suite_max_measure(r, "gap");
  const bool pass =
      r.passed && r.cases.size() == 500 && worst <= 1e-8 && t.seconds() < 30.0;
  report(3, "pythagoras", pass, t.seconds(), "max_gap=" + fmt(worst));
}

void criterion_4_descent() {
  Timer t;
  const ikm::SuiteResult r = ikm::run_suite("descent", kSeed);
  const double worst = suite_max_measure(r, "max_increase");
  const bool pass =
      r.passed && r.cases.size() == 300 && worst <= 1e-10 && t.seconds() < 120.0;
  report(4, "descent", pass, t.seconds(), "max_increase=" + fmt(worst));
}

void criterion_5_gaussian_equivalence() {
  Timer t;
  const ikm::SuiteResult r = ikm::run_suite("gaussian_equivalence", kSeed);
  const bool pass = r.passed && r.cases.size() == 50 && t.seconds() < 60.0;
  report(5, "gaussian_equivalence", pass, t.seconds(),
         "max_ratio_err=" + fmt(suite_max_measure(r, "ratio_rel_err")));
}

void criterion_6_psi() {
  Timer t;
  const ikm::SuiteResult r = ikm::run_suite("psi", kSeed);
  const bool pass = r.passed && t.seconds() < 1.0;
  report(6, "psi_inequalities", pass, t.seconds(),
         "worst=" + fmt(suite_max_measure(r, "worst_violation")));
}

void criterion_7_maximal_mc() {
  Timer t;
  const ikm::SuiteResult r = ikm::run_suite("maximal_mc", kSeed);
  const bool pass = r.passed && r.cases.size() == 9 && t.seconds() < 30.0;
  report(7, "maximal_mc", pass, t.seconds());
}

void criterion_8_bound_fidelity() {
  Timer t;
  bool pass = true;

  // Main term of the simplified quadratic bound at (B=1, k=2, n=1000);
  // the frozen value comes from 16 log(500) sqrt(2 log 2 / 1000).
  const ikm::BoundReport q =
      ikm::quadratic_bound(1000, 2, 1.0, 0.1, ikm::DeviationMode::uniform);
  double main = 0.0;
  for (const auto& term : q.terms) {
    if (term.label == "main") main = term.value;
  }
  pass = pass && std::abs(main - 3.7022134789762968) <= 1e-5;

  // Term accounting across kinds, modes and random inputs.
  auto rng = ikm::make_rng(kSeed, 8);
  for (int trial = 0; trial < 200 && pass; ++trial) {
    const std::int32_t k =
        2 + static_cast<std::int32_t>(ikm::uniform_index(rng, 40));
    const std::int64_t n =
        2 * k + static_cast<std::int64_t>(ikm::uniform01(rng) * 1e6);
    const double delta = 0.01 + 0.9 * ikm::uniform01(rng);
    const double B = 0.5 + 3.0 * ikm::uniform01(rng);
    const auto mode = static_cast<ikm::DeviationMode>(trial % 3);
    ikm::LinearBoundInputs lin;
    lin.n = n;
    lin.k = k;
    lin.theta_norm = B;
    lin.w_norm = 1.0 + B;
    lin.a = -B;
    lin.b = B;
    lin.delta = delta;
    lin.mode = mode;
    for (const ikm::BoundReport& r :
         {ikm::quadratic_bound(n, k, B, delta, mode),
          ikm::quadratic_bound_unsimplified(n, k, B, delta, mode),
          ikm::robust_bound(n, k, B, delta, mode),
          ikm::info_bound(n, k, 1.0 + B, B, delta, mode),
          ikm::linear_bound(lin)}) {
      double sum = 0.0;
      for (const auto& term : r.terms) sum += term.value;
      pass = pass && std::abs(r.total - sum) <= 1e-12;
    }
  }

  const ikm::SuiteResult ordering = ikm::run_suite("ordering_r2_c2_r", kSeed);
  pass = pass && ordering.passed && ordering.cases.size() == 100;

  report(8, "bound_fidelity", pass, t.seconds(), "main=" + fmt(main));
}

void criterion_9_statistical_sanity() {
  Timer t;
  constexpr int kTrials = 200;
  const double delta = 0.05;
  std::vector<char> violated(kTrials, 0);
  std::vector<char> vacuous(kTrials, 0);
  ikm::parallel_for(kTrials, 0, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      ikm::SynthSpec spec;
      spec.generator = ikm::Generator::uniform_ball;
      spec.n = 10000;
      spec.d = 2;
      spec.B = 1.0;
      spec.seed = ikm::derive_seed(kSeed, 900 + i);
      ikm::TrialConfig cfg;
      cfg.k = 2;
      cfg.restarts = 3;
      cfg.delta = delta;
      cfg.holdout_n = 10000;
      const ikm::TrialReport rep =
          ikm::bound_vs_risk_trial(spec, cfg, ikm::BoundKind::quadratic);
      violated[i] = rep.satisfied ? 0 : 1;
      vacuous[i] = rep.vacuous ? 1 : 0;
    }
  });
  int violations = 0;
  for (char v : violated) violations += v;
  const double limit =
      delta * kTrials + 3.0 * std::sqrt(delta * (1.0 - delta) * kTrials);
  const bool pass = violations <= static_cast<int>(limit) &&
                    t.seconds() < 300.0;
  report(9, "statistical_sanity", pass, t.seconds(),
         "violations=" + std::to_string(violations) + "/" +
             std::to_string(kTrials) + " limit=" + fmt(limit));
}

void criterion_10_determinism(const char* cli_path) {
  Timer t;
  bool pass = false;
  std::string detail;
  if (cli_path) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("infokm_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::string f1 = (dir / "all1.jsonl").string();
    const std::string f2 = (dir / "all2.jsonl").string();
    const std::string base = std::string(cli_path) + " validate all --seed 42";
    const int rc1 =
        std::system((base + " --out " + f1 + " >/dev/null 2>&1").c_str());
    const int rc2 =
        std::system((base + " --out " + f2 + " >/dev/null 2>&1").c_str());
    const std::string a = slurp(f1);
    const std::string b = slurp(f2);
    pass = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0 && !a.empty() &&
           a == b;
    detail = "cli bytes=" + std::to_string(a.size());
    std::filesystem::remove_all(dir);
  } else {
    std::string a, b;
    for (const std::string& name : ikm::suite_names()) {
      a += ikm::verdicts_to_jsonl(ikm::run_suite(name, 42));
    }
    for (const std::string& name : ikm::suite_names()) {
      b += ikm::verdicts_to_jsonl(ikm::run_suite(name, 42));
    }
    pass = !a.empty() && a == b;
    detail = "in-process bytes=" + std::to_string(a.size());
  }
  report(10, "determinism", pass, t.seconds(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli_path = argc > 1 ? argv[1] : nullptr;
  criterion_1_simple_endpoints();
  criterion_2_identity_suites();
  criterion_3_pythagoras();
  criterion_4_descent();
  criterion_5_gaussian_equivalence();
  criterion_6_psi();
  criterion_7_maximal_mc();
  criterion_8_bound_fidelity();
  criterion_9_statistical_sanity();
  criterion_10_determinism(cli_path);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
