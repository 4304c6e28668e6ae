#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "anderson_lab.h"

namespace {

const char* kSpectrum = R"({"experiment": "spectrum", "seed": 1,
  "field": {"rule": "iid", "distributions": {"all": {"point": 0.0}}, "M": 1.0, "certify": false},
  "params": {"radius": 1}})";

const char* kPlan = R"({"experiment": "msa-plan",
  "params": {"epsilon": 0.016666666666666666, "delta": 0.01, "delta_prime": 0.02}})";

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::strlen(al_version()) > 0);
  CHECK(al_schema_version() == 1);
  al_config* cfg = nullptr;
  CHECK(al_config_parse("{not json", &cfg) == AL_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(al_last_error()) > 0);
  CHECK(al_config_parse(nullptr, &cfg) == AL_INVALID_ARGUMENT);
  CHECK(al_config_parse(R"({"experiment": "wegner-mc", "field": {"rule": "iid", "distributions": {"all": {"bernoulli": 0.5}}, "M": 1.0},
    "params": {"trials": 0}})", &cfg) == AL_CONFIG);
  CHECK(al_config_load("/nonexistent/config.json", &cfg) == AL_CONFIG);
}

TEST_CASE("run and inspect") {
  al_config* cfg = nullptr;
  REQUIRE(al_config_parse(kSpectrum, &cfg) == AL_OK);
  const char* name = nullptr;
  CHECK(al_config_experiment(cfg, &name) == AL_OK);
  CHECK(std::string(name) == "spectrum");
  al_result* a = nullptr;
  al_result* b = nullptr;
  REQUIRE(al_run(cfg, &a) == AL_OK);
  REQUIRE(al_run(cfg, &b) == AL_OK);
  double count = 0.0, lo = 0.0;
  CHECK(al_result_scalar(a, "count", &count) == AL_OK);
  CHECK(count == 27.0);
  CHECK(al_result_scalar(a, "lambda_min", &lo) == AL_OK);
  CHECK(lo == doctest::Approx(6.0 - 6.0 * std::cos(M_PI / 4.0)));
  CHECK(al_result_scalar(a, "missing", &lo) == AL_INVALID_ARGUMENT);
  const char *sa = nullptr, *sb = nullptr;
  al_result_scalars_json(a, &sa);
  al_result_scalars_json(b, &sb);
  CHECK(std::string(sa) == std::string(sb));
  CHECK(al_result_has_finding(a, nullptr) == 0);
  al_result_free(a);
  al_result_free(b);
  al_config_free(cfg);
}

TEST_CASE("findings are results, not failures") {
  al_config* cfg = nullptr;
  REQUIRE(al_config_parse(kPlan, &cfg) == AL_OK);
  al_result* r = nullptr;
  REQUIRE(al_run(cfg, &r) == AL_OK);
  const char* msg = nullptr;
  CHECK(al_result_has_finding(r, &msg) == 1);
  CHECK(std::string(msg).find("m_star") != std::string::npos);
  double eps_star = 0.0;
  al_result_scalar(r, "eps_star", &eps_star);
  CHECK(eps_star == 0.75 * 0.016666666666666666);
  al_result_free(r);
  al_config_free(cfg);
}

TEST_CASE("sweep through the C API") {
  al_config* cfgs[2] = {nullptr, nullptr};
  REQUIRE(al_config_parse(kSpectrum, &cfgs[0]) == AL_OK);
  REQUIRE(al_config_parse(kPlan, &cfgs[1]) == AL_OK);
  al_result* res[2];
  al_status st[2];
  CHECK(al_sweep(cfgs, 2, 2, 1, 5, res, st) == AL_OK);
  CHECK(st[0] == AL_OK);
  CHECK(st[1] == AL_OK);
  al_result_free(res[0]);
  al_result_free(res[1]);
  al_config_free(cfgs[0]);
  al_config_free(cfgs[1]);
}

TEST_CASE("direct numerics") {
  double g = 0.0;
  REQUIRE(al_lattice_green(0, 0, 0, &g) == AL_OK);
  CHECK(g == doctest::Approx(0.252731009858663).epsilon(1e-6));
  std::vector<double> v27(27, 1.0), e27(27);
  REQUIRE(al_eigenvalues(1, v27.data(), e27.data()) == AL_OK);
  CHECK(e27.front() == doctest::Approx(7.0 - 6.0 * std::cos(M_PI / 4.0)));
  CHECK(al_eigenvalues(-1, v27.data(), e27.data()) == AL_INVALID_ARGUMENT);
  CHECK(al_lattice_green(0, 0, 0, nullptr) == AL_INVALID_ARGUMENT);
}
