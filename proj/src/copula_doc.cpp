#include "skewrank/copula_doc.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace skewrank {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("copula document: " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail("unknown key '" + item.key() + "' in " + where);
}

double number_at(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number()) fail("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("'" + key + "' must be finite");
  return x;
}

MixingSpec parse_mixing(const json& j) {
  if (!j.is_object()) fail("'mixing' must be an object");
  check_keys(j, {"kind", "shape", "rate"}, "'mixing'");
  if (!j.contains("kind")) fail("'mixing' needs a 'kind'");
  const std::string kind = j.at("kind").is_string()
                               ? j.at("kind").get<std::string>()
                               : std::string();
  if (kind == "degenerate") {
    if (j.contains("shape") || j.contains("rate"))
      fail("degenerate mixing takes no 'shape' or 'rate'");
    return degenerate_mixing();
  }
  if (kind != "gamma" && kind != "inverse-gamma")
    fail("'mixing.kind' must be 'degenerate', 'gamma', or 'inverse-gamma'");
  if (!j.contains("shape") || !j.contains("rate"))
    fail("mixing kind '" + kind + "' needs 'shape' and 'rate'");
  const double shape = number_at(j, "shape");
  const double rate = number_at(j, "rate");
  if (!(shape > 0.0) || !(rate > 0.0))
    fail("mixing 'shape' and 'rate' must be > 0");
  return kind == "gamma" ? gamma_mixing(shape, rate)
                         : inverse_gamma_mixing(shape, rate);
}

}  // namespace

CopulaDocument parse_copula_doc(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j, {"family", "rho", "skew", "mixing", "nu"}, "the document");
  if (!j.contains("family") || !j.at("family").is_string())
    fail("'family' must be a string");

  CopulaDocument doc;
  doc.family_input = j.at("family").get<std::string>();
  const std::string& fam = doc.family_input;

  const bool core = fam == "mn" || fam == "msn";
  const bool needs_nu =
      fam == "gh-skew-t" || fam == "ac-skew-t" || fam == "student-t";
  const bool no_skew = fam == "gaussian" || fam == "student-t";
  if (!core && !needs_nu && fam != "skew-normal" && fam != "gaussian")
    fail("unknown family '" + fam + "'");

  if (j.contains("rho")) {
    const double rho = number_at(j, "rho");
    if (!(std::abs(rho) <= 1.0)) fail("'rho' must lie in [-1, 1]");
    doc.rho = rho;
  }

  Eigen::Vector2d skew = Eigen::Vector2d::Zero();
  if (j.contains("skew")) {
    const json& s = j.at("skew");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
        !s[1].is_number())
      fail("'skew' must be an array of two numbers");
    skew << s[0].get<double>(), s[1].get<double>();
    if (!skew.allFinite()) fail("'skew' must be finite");
    if (no_skew && !skew.isZero(0.0))
      fail("family '" + fam + "' has no skew parameter");
  }

  if (needs_nu) {
    if (j.contains("mixing"))
      fail("family '" + fam + "' fixes its mixing law; drop 'mixing'");
    if (!j.contains("nu")) fail("family '" + fam + "' needs 'nu'");
    const double nu = number_at(j, "nu");
    if (!(nu > 0.0)) fail("'nu' must be > 0");
    doc.nu = nu;
    doc.spec.mixing = ig_from_dof(nu);
  } else {
    if (j.contains("nu")) fail("family '" + fam + "' takes no 'nu'");
    if (core) {
      if (!j.contains("mixing")) fail("family '" + fam + "' needs 'mixing'");
      doc.spec.mixing = parse_mixing(j.at("mixing"));
    } else {
      if (j.contains("mixing"))
        fail("family '" + fam + "' fixes its mixing law; drop 'mixing'");
      doc.spec.mixing = degenerate_mixing();
    }
  }

  const bool msn = fam == "msn" || fam == "ac-skew-t" || fam == "skew-normal";
  doc.spec.family = msn ? Family::MSN : Family::MN;
  doc.spec.skew = skew;
  doc.spec.rho = doc.rho.value_or(0.0);
  return doc;
}

nlohmann::json spec_echo(const CopulaSpec& spec) {
  json mixing;
  mixing["kind"] = mixing_kind_name(spec.mixing.kind);
  if (spec.mixing.kind != MixingKind::Degenerate) {
    mixing["shape"] = spec.mixing.shape;
    mixing["rate"] = spec.mixing.rate;
  }
  json j;
  j["family"] = family_name(spec.family);
  j["rho"] = spec.rho;
  j["skew"] = {spec.skew(0), spec.skew(1)};
  j["mixing"] = mixing;
  return j;
}

std::string family_name(Family family) {
  return family == Family::MN ? "mn" : "msn";
}

std::string mixing_kind_name(MixingKind kind) {
  switch (kind) {
    case MixingKind::Degenerate:
      return "degenerate";
    case MixingKind::Gamma:
      return "gamma";
    case MixingKind::InverseGamma:
      return "inverse-gamma";
  }
  return "degenerate";
}

}  // namespace skewrank
