#pragma once

// JSON copula specifications: a small document format with convenience
// families that expand to the two core families plus a mixing law.
//
//   {"family": "mn" | "msn", "rho": r, "skew": [s1, s2],
//    "mixing": {"kind": "degenerate"} |
//              {"kind": "gamma" | "inverse-gamma", "shape": a, "rate": b}}
//
//   {"family": "gh-skew-t",  "rho": r, "skew": [b1, b2], "nu": v}
//       -> mn,  inverse-gamma(v/2, v/2)
//   {"family": "ac-skew-t",  "rho": r, "skew": [a1, a2], "nu": v}
//       -> msn, inverse-gamma(v/2, v/2)
//   {"family": "skew-normal","rho": r, "skew": [a1, a2]}
//       -> msn, degenerate
//   {"family": "gaussian",   "rho": r}             -> mn, degenerate
//   {"family": "student-t",  "rho": r, "nu": v}    -> mn, inverse-gamma
//
// rho may be omitted where the caller supplies it (inversion, curves).
// Unknown keys, missing required keys, and out-of-domain values throw
// std::invalid_argument with the offending key in the message.

#include <json.hpp>
#include <optional>
#include <string>

#include "skewrank/rankcorr.hpp"

namespace skewrank {

struct CopulaDocument {
  std::string family_input;    // family string as written in the document
  std::optional<double> rho;   // absent when the document omits it
  std::optional<double> nu;    // present only for the *-t shorthands
  CopulaSpec spec;             // canonical expansion; spec.rho = 0 if absent
};

CopulaDocument parse_copula_doc(const nlohmann::json& j);

// Canonical document for a core-family spec (round trip:
// parse_copula_doc(spec_echo(s)).spec reproduces s).
nlohmann::json spec_echo(const CopulaSpec& spec);

std::string family_name(Family family);
std::string mixing_kind_name(MixingKind kind);

}  // namespace skewrank
