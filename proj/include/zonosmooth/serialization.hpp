#ifndef ZONOSMOOTH_SERIALIZATION_HPP_
#define ZONOSMOOTH_SERIALIZATION_HPP_

#include <string>

#include <json.hpp>

#include "zonosmooth/czono.hpp"

namespace zonosmooth::serialization {

/// Schema: {"n":., "n_g":., "n_c":., "G":[row-major], "c":[..],
///          "A":[row-major], "b":[..], "h":[..]} with "inf" admitted in h.
nlohmann::json to_json(const cz::ConstrainedZonotope& Z);
cz::ConstrainedZonotope zonotope_from_json(const nlohmann::json& j);

std::string to_string(const cz::ConstrainedZonotope& Z);
cz::ConstrainedZonotope zonotope_from_string(const std::string& text);

}  // namespace zonosmooth::serialization

#endif
