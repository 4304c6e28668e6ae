#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anderson/distribution.hpp"
#include "anderson/ensembles.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

using Json = nlohmann::json;

// Distributions: {"atoms": [[value, prob], ...], "pieces": [[lo, hi, weight], ...]}.
// Shorthands accepted on input: {"bernoulli": q[, "value": v]}, {"uniform": [lo, hi]}, {"point": c}.
Json distribution_to_json(const SiteDistribution& d);
SiteDistribution distribution_from_json(const Json& j);

// Field specification:
// {"rule": iid|checkerboard|interface|explicit, "distributions": {role: law},
//  "M": real, "sigma2_min": real, "certify": bool, "sites": [[x, y, z, role], ...]}
Json field_to_json(const PotentialField& f);
PotentialField field_from_json(const Json& j);

Json site_to_json(const Site& s);
Site site_from_json(const Json& j);

// RFC 4180: fields with commas, quotes or line breaks are quoted, quotes doubled.
std::string csv_escape(const std::string& field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& t);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// %.17g, so values round-trip
std::string format_double(double v);

// FNV-1a over the bytes of a string, hex.
std::string fnv1a_hex(const std::string& text);

}  // namespace anderson
