#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anderson/io.hpp"

namespace anderson {

constexpr int kSchemaVersion = 1;

enum class ExperimentKind {
  spectrum,
  lifshitz,
  wegner_mc,
  dynloc,
  decompose,
  sperner,
  cone_check,
  annulus,
  msa_plan,
  combine
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);  // ConfigError when unknown

// A parsed and validated configuration. Construction checks every parameter the
// experiment will read, so no computation starts on a bad config.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const Json& j);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  ExperimentKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t s);
  // Canonical echo: defaults filled in, keys sorted.
  const Json& echo() const { return echo_; }
  std::string hash() const;

 private:
  ExperimentKind kind_ = ExperimentKind::spectrum;
  std::uint64_t seed_ = 0;
  Json echo_;
};

// Scalars are deterministic for a fixed config. Tables are written as CSV.
struct ResultRecord {
  Json config;
  std::string config_hash;
  std::map<std::string, Json> scalars;
  std::map<std::string, Table> tables;
  double wall_seconds = 0.0;
  std::string finding;  // nonempty when a checked inequality failed

  Json to_json() const;
  // scalars only, for reproducibility comparisons
  Json scalars_json() const;
};

ResultRecord run(const ExperimentConfig& config);

// Writes <kind>-<hash>.json and one <kind>-<hash>-<table>.csv per table into dir
// (created if missing). Returns the JSON path.
std::string write_record(const ResultRecord& r, const std::string& dir);

struct SweepItem {
  std::optional<ResultRecord> record;
  std::string error;  // what() of the isolated failure
  int error_class = 0;  // see error_class()
};

// Seeds derived from (master_seed, index) when given. Items come back in input order.
std::vector<SweepItem> sweep(std::vector<ExperimentConfig> configs, unsigned threads,
                             std::optional<std::uint64_t> master_seed = std::nullopt);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// 2 config or domain, 3 numeric, 4 finding, 1 anything else
int error_class(const std::exception& e);

}  // namespace anderson
