#pragma once

#include <string>
#include <vector>

#include "sc/billiard.hpp"

namespace sc::billiard {

// JSON schemas (schema_version 1):
//   table: {schema_version, name, elements:[{type:"arc",center,radius,phi0,dphi,
//           dispersing} | {type:"segment",a,b}], area, perimeter}
//   orbits: {schema_version, table, orbits:[{code, bounce_s, bounce_points,
//           length, primitive_length, repetitions, trace_m, maslov, weight_sq}]}

std::string table_to_json(const BilliardTable& table);
BilliardTable table_from_json(const std::string& text);
BilliardTable load_table(const std::string& path);
void save_table(const BilliardTable& table, const std::string& path);

std::string orbits_to_json(const std::vector<PeriodicOrbit>& orbits, const std::string& table_name);
std::vector<PeriodicOrbit> orbits_from_json(const std::string& text);
std::vector<PeriodicOrbit> load_orbits(const std::string& path);
void save_orbits(const std::vector<PeriodicOrbit>& orbits, const std::string& table_name,
                 const std::string& path);

}  // namespace sc::billiard
