#ifndef FFDYN_MAPIO_HPP
#define FFDYN_MAPIO_HPP

#include "ffdyn/homog.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ffdyn {

using nlohmann::json;

// {"kind":"Q"} | {"kind":"Fp","p":5}
ConstantField field_from_json(const json& j);
json field_to_json(const ConstantField& f);

// {"field": ..., "n_vars": 2, "degree": 2,
//  "forms": [[{"exp":[2,0],"coeff":"1"}, ...], ...]}
HomogMap map_from_json(const json& j);
json map_to_json(const HomogMap& phi);

HomogMap load_map(const std::string& path);
void save_map(const HomogMap& phi, const std::string& path);

// points file: {"field": ..., "points": [["t","1"], ...]}
std::vector<std::vector<RatFunc>> points_from_json(const json& j, const ConstantField& f);
std::vector<std::vector<RatFunc>> load_points(const std::string& path, const ConstantField& f);

json read_json_file(const std::string& path);

// FNV-1a of the canonical serialization; stable across runs.
std::string map_hash(const HomogMap& phi);

} // namespace ffdyn

#endif
