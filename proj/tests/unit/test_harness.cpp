#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "anderson/error.hpp"
#include "anderson/harness.hpp"

using namespace anderson;

namespace {

Json free_spectrum_config() {
  return Json::parse(R"({
    "experiment": "spectrum", "seed": 4,
    "field": {"rule": "iid", "distributions": {"all": {"point": 0.0}}, "M": 1.0, "certify": false},
    "params": {"radius": 1}})");
}

Json small_wegner_config() {
  return Json::parse(R"({
    "experiment": "wegner-mc", "seed": 9,
    "field": {"rule": "iid", "distributions": {"all": {"bernoulli": 0.5}}, "M": 1.0, "sigma2_min": 0.25},
    "params": {"L": [1, 2], "Ebar": 0.05, "trials": 5}})");
}

}  // namespace

TEST_CASE("spectrum run matches the tensor formula") {
  const auto r = run(ExperimentConfig::parse(free_spectrum_config()));
  const auto& t = r.tables.at("eigenvalues");
  REQUIRE(t.rows.size() == 27);
  std::vector<double> oracle;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        double e = 0.0;
        for (int k : {a, b, c}) e += 2.0 - 2.0 * std::cos(k * M_PI / 4.0);
        oracle.push_back(e);
      }
  std::sort(oracle.begin(), oracle.end());
  for (std::size_t i = 0; i < 27; ++i) CHECK(std::stod(t.rows[i][1]) == doctest::Approx(oracle[i]).epsilon(1e-12));
}

TEST_CASE("config validation") {
  auto j = small_wegner_config();
  j["params"]["trials"] = 0;
  CHECK_THROWS_AS(ExperimentConfig::parse(j), ConfigError);
  j = small_wegner_config();
  j["params"]["bogus"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::parse(j), ConfigError);
  j = small_wegner_config();
  j.erase("field");
  CHECK_THROWS_AS(ExperimentConfig::parse(j), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("{"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text(R"({"experiment": "nothing"})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text(R"({"experiment": "msa-plan", "params": {"epsilon": 0.05, "delta": 0.01, "delta_prime": 0.02}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse_text(R"({"experiment": "msa-plan", "field": {}, "params": {"epsilon": 0.01, "delta": 0.01, "delta_prime": 0.02}})"),
      ConfigError);
  CHECK(error_class(ConfigError("x")) == 2);
  CHECK(error_class(NumericError("x")) == 3);
  CHECK(error_class(FindingError("x")) == 4);
}

TEST_CASE("runs are deterministic and self-describing") {
  const auto c = ExperimentConfig::parse(small_wegner_config());
  const auto a = run(c), b = run(c);
  CHECK(a.scalars_json() == b.scalars_json());
  CHECK(a.tables.at("wegner").rows.size() == 2);
  const Json j = a.to_json();
  CHECK(j.at("schema_version") == kSchemaVersion);
  CHECK(j.at("config").at("params").at("log_threshold") == "sqrt_L");
  CHECK(ExperimentConfig::parse(j.at("config")).hash() == c.hash());

  auto other = c;
  other.set_seed(10);
  CHECK(other.hash() != c.hash());
}

TEST_CASE("sweep") {
  std::vector<ExperimentConfig> cs{ExperimentConfig::parse(small_wegner_config()),
                                   ExperimentConfig::parse(free_spectrum_config()),
                                   ExperimentConfig::parse(small_wegner_config())};
  const auto one = sweep(cs, 1, 77);
  const auto four = sweep(cs, 4, 77);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    REQUIRE(one[i].record);
    REQUIRE(four[i].record);
    CHECK(one[i].record->scalars_json() == four[i].record->scalars_json());
  }
  // same config at different indices draws different seeds
  CHECK(one[0].record->config.at("seed") != one[2].record->config.at("seed"));

  auto single = cs[0];
  single.set_seed(derive_seed(77, 0));
  CHECK(sweep({cs[0]}, 1, 77)[0].record->scalars_json() == run(single).scalars_json());
}

TEST_CASE("records on disk") {
  const auto dir = (std::filesystem::temp_directory_path() / "anderson_harness_test").string();
  std::filesystem::remove_all(dir);
  const auto r = run(ExperimentConfig::parse(free_spectrum_config()));
  const auto path = write_record(r, dir);
  const Json j = Json::parse(read_text(path));
  CHECK(j.at("scalars").at("count") == 27);
  const auto csv = read_text((std::filesystem::path(dir) / j.at("tables").at("eigenvalues").at("file").get<std::string>()).string());
  CHECK(csv.rfind("index,eigenvalue\r\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("field spec round trip and csv quoting") {
  const Json spec = Json::parse(R"({"rule": "explicit", "M": 2.0, "sigma2_min": 0.01,
    "distributions": {"default": {"uniform": [0.0, 1.0]}, "spike": {"atoms": [[0.0, 0.25], [2.0, 0.75]]}},
    "sites": [[1, 0, 0, "spike"], [0, 0, 0, "spike"]]})");
  const Json once = field_to_json(field_from_json(spec));
  CHECK(field_to_json(field_from_json(once)) == once);
  CHECK(once.at("sites").size() == 2);
  CHECK_THROWS_AS(field_from_json(Json::parse(R"({"rule": "iid", "M": 1.0})")), ConfigError);
  CHECK_THROWS_AS(field_from_json(Json::parse(R"({"rule": "nope", "M": 1.0, "distributions": {}})")), ConfigError);

  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(to_csv(Table{{"x", "y"}, {{"1", "two\nlines"}}}) == "x,y\r\n1,\"two\nlines\"\r\n");
}
