#include "rfg/group_io.hpp"

#include <fstream>
#include <sstream>

namespace rfg {

using nlohmann::json;

namespace {

Scalar rational_field(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Scalar(Integer(v.get<long>()));
  throw SchemaError("rational values must be strings \"p/q\" or integers");
}

RatMatrix matrix_field(const json& v, int n, const std::string& label) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) throw SchemaError(label + " must have " + std::to_string(n) + " rows");
  RatMatrix m(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw SchemaError(label + " has a malformed row");
    for (int j = 0; j < n; ++j) m(i, j) = rational_field(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

int int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw SchemaError(std::string("missing integer field '") + key + "'");
  return j[key].get<int>();
}

}  // namespace

MGroupDescription parse_group_json(const json& j) {
  if (!j.is_object()) throw SchemaError("group definition must be a JSON object");
  MGroupDescription d;
  if (!j.contains("name") || !j["name"].is_string()) throw SchemaError("missing string field 'name'");
  d.name = j["name"].get<std::string>();
  d.dim_k = int_field(j, "dim_k");
  d.rank_h = int_field(j, "rank_h");
  d.delta = int_field(j, "delta");
  d.nilpotency_class = int_field(j, "nilpotency_class");
  if (d.dim_k < 1) throw SchemaError("dim_k must be positive");
  if (d.rank_h < 0) throw SchemaError("rank_h must be non-negative");
  if (j.contains("structure_constants")) {
    for (const auto& e : j["structure_constants"]) {
      if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number_integer())
        throw SchemaError("structure constants are [i, j, k, \"c\"] with 1-based indices");
      d.structure_constants.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<int>() - 1, rational_field(e[3])});
    }
  }
  if (j.contains("actions")) {
    if (!j["actions"].is_array()) throw SchemaError("'actions' must be an array");
    for (const auto& a : j["actions"]) d.actions.push_back(matrix_field(a, d.dim_k, "action matrix"));
  }
  if (j.contains("finite_part") && !j["finite_part"].is_null()) {
    const auto& f = j["finite_part"];
    FinitePart F;
    F.order = int_field(f, "order");
    if (!f.contains("table") || !f.contains("actions")) throw SchemaError("finite_part needs 'table' and 'actions'");
    F.table = f["table"].get<std::vector<std::vector<int>>>();
    for (const auto& a : f["actions"]) F.actions.push_back(matrix_field(a, d.dim_k, "finite action matrix"));
    d.finite_part = std::move(F);
  }
  if (j.contains("generators") && !(j["generators"].is_string() && j["generators"] == "standard")) {
    if (!j["generators"].is_array()) throw SchemaError("'generators' must be \"standard\" or a list");
    std::vector<GroupElement> gens;
    for (const auto& g : j["generators"]) {
      GroupElement x;
      if (!g.contains("k") || !g["k"].is_array()) throw SchemaError("explicit generators need a 'k' list");
      for (const auto& c : g["k"]) x.k.push_back(rational_field(c));
      if (g.contains("h")) x.h = g["h"].get<std::vector<i64>>();
      else x.h.assign(static_cast<std::size_t>(d.rank_h), 0);
      x.f = g.contains("f") ? g["f"].get<int>() : 0;
      gens.push_back(std::move(x));
    }
    d.generators = std::move(gens);
  }
  if (j.contains("relators")) d.relators = j["relators"].get<std::vector<std::vector<int>>>();
  if (j.contains("declared_bound") && !j["declared_bound"].is_null()) {
    const auto& b = j["declared_bound"];
    DeclaredBound db;
    db.model = b.at("model").get<std::string>();
    db.exponent = b.at("exponent").get<double>();
    if (db.model != "polynomial" && db.model != "polylog" && db.model != "exponential")
      throw SchemaError("declared_bound.model must be polynomial, polylog or exponential");
    d.declared_bound = db;
  }
  return d;
}

MGroupDescription read_group_description(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open group file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("malformed JSON in '" + path + "': " + e.what());
  }
  try {
    return parse_group_json(j);
  } catch (const json::exception& e) {
    throw SchemaError("schema violation in '" + path + "': " + e.what());
  }
}

MGroup parse_group_file(const std::string& path) { return MGroup(read_group_description(path)); }

json rational_matrix_json(const RatMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int k = 0; k < m.n; ++k) row.push_back(format_rational(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

json group_to_json(const MGroupDescription& d) {
  json j;
  j["name"] = d.name;
  j["dim_k"] = d.dim_k;
  j["rank_h"] = d.rank_h;
  j["delta"] = d.delta.get_si();
  j["nilpotency_class"] = d.nilpotency_class;
  j["structure_constants"] = json::array();
  for (const auto& s : d.structure_constants)
    j["structure_constants"].push_back({s.i + 1, s.j + 1, s.k + 1, format_rational(s.c)});
  j["actions"] = json::array();
  for (const auto& a : d.actions) j["actions"].push_back(rational_matrix_json(a));
  if (d.finite_part) {
    json f;
    f["order"] = d.finite_part->order;
    f["table"] = d.finite_part->table;
    f["actions"] = json::array();
    for (const auto& a : d.finite_part->actions) f["actions"].push_back(rational_matrix_json(a));
    j["finite_part"] = f;
  } else {
    j["finite_part"] = nullptr;
  }
  if (d.generators) {
    j["generators"] = json::array();
    for (const auto& g : *d.generators) {
      json k = json::array();
      for (const auto& c : g.k) k.push_back(format_rational(c));
      j["generators"].push_back({{"k", k}, {"h", g.h}, {"f", g.f}});
    }
  } else {
    j["generators"] = "standard";
  }
  if (!d.relators.empty()) j["relators"] = d.relators;
  if (d.declared_bound) j["declared_bound"] = {{"model", d.declared_bound->model}, {"exponent", d.declared_bound->exponent}};
  return j;
}

std::string format_element(const GroupElement& g, bool with_finite) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.k.size(); ++i) os << (i ? " " : "") << format_rational(g.k[i]);
  os << ';';
  for (std::size_t i = 0; i < g.h.size(); ++i) os << (i ? " " : "") << g.h[i];
  if (with_finite) os << ';' << g.f;
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

Vec parse_k_coords(const std::string& text, int dim) {
  Vec v;
  for (const auto& part : split(text, ',')) v.push_back(parse_rational(part));
  if (static_cast<int>(v.size()) != dim)
    throw SchemaError("element has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(dim));
  return v;
}

std::vector<i64> parse_int_list(const std::string& text) {
  std::vector<i64> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    Scalar q = parse_rational(part);
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) throw SchemaError("expected an integer, got '" + part + "'");
    out.push_back(q.get_num().get_si());
  }
  return out;
}

std::string catalog_path(const std::string& file) { return std::string(RFG_DATA_DIR) + "/" + file; }

}  // namespace rfg
