#pragma once
// JSON group definition files and textual element coordinates.

#include <string>

#include <json.hpp>

#include "rfg/mgroup.hpp"

namespace rfg {

MGroupDescription parse_group_json(const nlohmann::json& j);
MGroupDescription read_group_description(const std::string& path);
// Parses and validates; throws SchemaError or ValidationFailure.
MGroup parse_group_file(const std::string& path);

nlohmann::json group_to_json(const MGroupDescription& d);
nlohmann::json rational_matrix_json(const RatMatrix& m);

// "k_1 ... k_m;h_1 ... h_n" with ";f" appended when F is nontrivial.
std::string format_element(const GroupElement& g, bool with_finite);
// Comma separated K coordinates, e.g. "0,0,1/2".
Vec parse_k_coords(const std::string& text, int dim);
std::vector<i64> parse_int_list(const std::string& text);

// Path of a bundled catalog file.
std::string catalog_path(const std::string& file);

}  // namespace rfg
