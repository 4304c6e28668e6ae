#include "anderson/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "anderson/error.hpp"

namespace anderson {

Json distribution_to_json(const SiteDistribution& d) {
  Json atoms = Json::array(), pieces = Json::array();
  for (const Atom& a : d.atoms()) atoms.push_back({a.value, a.prob});
  for (const UniformPiece& p : d.pieces()) pieces.push_back({p.lo, p.hi, p.weight});
  return Json{{"atoms", atoms}, {"pieces", pieces}};
}

SiteDistribution distribution_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ConfigError("distribution must be an object");
    if (j.contains("bernoulli")) return SiteDistribution::bernoulli(j.at("bernoulli").get<double>(), j.value("value", 1.0));
    if (j.contains("uniform")) {
      const auto& u = j.at("uniform");
      if (!u.is_array() || u.size() != 2) throw ConfigError("uniform needs [lo, hi]");
      return SiteDistribution::uniform(u[0].get<double>(), u[1].get<double>());
    }
    if (j.contains("point")) return SiteDistribution::point(j.at("point").get<double>());
    std::vector<Atom> atoms;
    std::vector<UniformPiece> pieces;
    for (const auto& a : j.value("atoms", Json::array())) {
      if (!a.is_array() || a.size() != 2) throw ConfigError("atom needs [value, prob]");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    for (const auto& p : j.value("pieces", Json::array())) {
      if (!p.is_array() || p.size() != 3) throw ConfigError("piece needs [lo, hi, weight]");
      pieces.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return SiteDistribution(std::move(atoms), std::move(pieces));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad distribution: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("bad distribution: ") + e.what());
  }
}

Json site_to_json(const Site& s) { return Json::array({s[0], s[1], s[2]}); }

Site site_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("site needs three integer coordinates");
  try {
    return Site{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>()};
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad site: ") + e.what());
  }
}

Json field_to_json(const PotentialField& f) {
  Json laws = Json::object();
  for (const auto& [role, d] : f.laws()) laws[role] = distribution_to_json(d);
  Json out{{"rule", rule_name(f.rule())},
           {"distributions", laws},
           {"M", f.M()},
           {"sigma2_min", f.sigma2_min()},
           {"certify", f.certified()}};
  if (!f.site_table().empty()) {
    // sorted for a stable serialization
    std::map<Site, std::string> sorted(f.site_table().begin(), f.site_table().end());
    Json sites = Json::array();
    for (const auto& [s, role] : sorted) sites.push_back({s[0], s[1], s[2], role});
    out["sites"] = sites;
  }
  return out;
}

PotentialField field_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("field spec must be an object");
  for (const char* key : {"rule", "distributions", "M"})
    if (!j.contains(key)) throw ConfigError(std::string("field spec lacks '") + key + "'");
  try {
    const AssignmentRule rule = rule_from_name(j.at("rule").get<std::string>());
    std::map<std::string, SiteDistribution> laws;
    for (const auto& [role, law] : j.at("distributions").items()) laws.emplace(role, distribution_from_json(law));
    std::unordered_map<Site, std::string, SiteHash> table;
    for (const auto& row : j.value("sites", Json::array())) {
      if (!row.is_array() || row.size() != 4) throw ConfigError("site row needs [x, y, z, role]");
      table[Site{row[0].get<std::int64_t>(), row[1].get<std::int64_t>(), row[2].get<std::int64_t>()}] =
          row[3].get<std::string>();
    }
    const double M = j.at("M").get<double>();
    if (!j.value("certify", true)) return PotentialField::uncertified(rule, std::move(laws), M, std::move(table));
    return PotentialField(rule, std::move(laws), M, j.value("sigma2_min", 0.0), std::move(table));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad field spec: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("bad field spec: ") + e.what());
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
  if (!f) throw ConfigError("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace anderson
