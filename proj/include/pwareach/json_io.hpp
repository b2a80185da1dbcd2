#pragma once

#include <json.hpp>
#include <string>

#include "pwareach/analysis.hpp"
#include "pwareach/marching.hpp"

namespace pwareach {

// Insertion-ordered JSON keeps the documented field order stable.
using Json = nlohmann::ordered_json;

Json to_json(const Polyhedron& p);
Json to_json(const PolyUnion& u);
Json to_json(const ReluNetwork& net);
Json to_json(const PwaFunction& pwa);
Json to_json(const ReachResult& res);
Json to_json(const FixedPoint& fp);
Json to_json(const HomeoCertificate& cert);

/// expected_dim disambiguates constraint-free polyhedra.
Polyhedron polyhedron_from_json(const Json& j, int expected_dim = -1);
PolyUnion union_from_json(const Json& j, int expected_dim = -1);
ReluNetwork network_from_json(const Json& j);
PwaFunction pwa_from_json(const Json& j);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

ReluNetwork load_network(const std::string& path);
Polyhedron load_polyhedron(const std::string& path, int expected_dim = -1);

}  // namespace pwareach
