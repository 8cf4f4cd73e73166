// rf_cli: experiments on residual finiteness growth of split M-groups.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <gmp.h>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rfg/experiments.hpp"
#include "rfg/group_io.hpp"

namespace {

using namespace rfg;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Config {
  std::string command;
  std::string group;
  int rmax = 4;
  long long bound = 200;
  std::string mode = "paper";
  int primes = 1;
  std::string out;
  int threads = 0;
  unsigned long long seed = 1;
  std::string element;
  std::string h;
  std::string fit;
};

json config_json(const Config& c) {
  return {{"command", c.command}, {"group", c.group}, {"rmax", c.rmax},     {"bound", c.bound},
          {"mode", c.mode},       {"primes", c.primes}, {"out", c.out},     {"threads", c.threads},
          {"seed", c.seed},       {"element", c.element}, {"h", c.h},       {"fit", c.fit}};
}

std::string resolve_group(const std::string& path) {
  if (std::filesystem::exists(path)) return path;
  for (const std::string& cat : {catalog_path(path), catalog_path(path + ".json")})
    if (std::filesystem::exists(cat)) return cat;
  return path;
}

GroupElement parse_element(const Config& c, const MGroup& G) {
  if (c.element.empty()) throw PreconditionError("--element is required");
  GroupElement g = G.from_k(parse_k_coords(c.element, G.dim()));
  if (!c.h.empty()) {
    auto h = parse_int_list(c.h);
    if (static_cast<int>(h.size()) != G.rank()) throw SchemaError("--h needs " + std::to_string(G.rank()) + " entries");
    g.h = h;
  }
  return g;
}

std::string csv_element(const GroupElement& g, const MGroup& G) { return format_element(g, G.finite_order() > 1); }

struct Outcome {
  std::string csv;
  json extra = json::object();
  std::vector<double> fit_r, fit_y;
};

Outcome run_ball(const Config& c, const MGroup& G) {
  BallOptions bo;
  bo.threads = c.threads;
  Ball B = enumerate_ball(G, c.rmax, bo);
  auto stats = coefficient_stats(G, B);
  Outcome o;
  std::ostringstream s;
  s << "r,ball_size,k_size\n";
  for (const auto& row : stats) {
    s << row.r << ',' << row.ball_size << ',' << row.k_size << '\n';
    if (row.r >= 1) {
      o.fit_r.push_back(row.r);
      o.fit_y.push_back(static_cast<double>(row.ball_size));
    }
  }
  o.csv = s.str();
  return o;
}

Outcome run_coeff_stats(const Config& c, const MGroup& G) {
  BallOptions bo;
  bo.threads = c.threads;
  auto stats = coefficient_stats(G, c.rmax, bo);
  Outcome o;
  std::ostringstream s;
  s << "r,ball_size,max_numerator,max_delta_exponent\n";
  for (const auto& row : stats) {
    s << row.r << ',' << row.ball_size << ',' << row.max_numerator.get_str() << ',' << row.max_delta_exponent << '\n';
    if (row.r >= 1 && row.max_numerator > 0) {
      o.fit_r.push_back(row.r);
      o.fit_y.push_back(row.max_numerator.get_d());
    }
  }
  o.csv = s.str();
  return o;
}

SeparatorOptions separator_options(const Config& c) {
  SeparatorOptions so;
  so.mode = parse_prime_mode(c.mode);
  so.prime_count = c.primes;
  so.ideal_options.threads = c.threads;
  return so;
}

Outcome run_upper_curve(const Config& c, const MGroup& G) {
  BallOptions bo;
  bo.threads = c.threads;
  Ball B = enumerate_ball(G, c.rmax, bo);
  Separator S(G, separator_options(c));
  auto rows = upper_bound_curve(S, B, {c.threads, true});
  Outcome o;
  std::ostringstream s;
  s << "r,rf_upper,witness_norm,witness_coords,prime,codim,exponent\n";
  for (const auto& row : rows) {
    if (row.r < 1) continue;
    s << row.r << ',' << row.rf_upper << ',' << B.norm[row.witness] << ',' << csv_element(B.elements[row.witness], G)
      << ',' << row.prime << ',' << row.codim << ',' << row.exponent << '\n';
    o.fit_r.push_back(row.r);
    o.fit_y.push_back(static_cast<double>(row.rf_upper));
  }
  o.csv = s.str();
  o.extra["checks"] = "all separating quotients verified";
  return o;
}

Outcome run_rf_curve(const Config& c, const MGroup& G) {
  BallOptions bo;
  bo.threads = c.threads;
  Ball B = enumerate_ball(G, c.rmax, bo);
  DivisibilityOracle O(G, c.bound);
  Separator S(G, separator_options(c));
  auto upper = upper_bound_curve(S, B, {c.threads, true});
  auto rows = rf_curve(O, B, upper, {c.threads, true});
  Outcome o;
  std::ostringstream s;
  s << "r,rf_exact,rf_upper,witness_norm,witness_coords,bound_status\n";
  bool sandwich = true;
  for (const auto& row : rows) {
    s << row.r << ',' << row.rf_exact << ',' << row.rf_upper << ',' << B.norm[row.witness] << ','
      << csv_element(B.elements[row.witness], G) << ',' << row.bound_status() << '\n';
    if (row.exact && static_cast<u64>(row.rf_exact) > row.rf_upper) sandwich = false;
    if (row.exact) {
      o.fit_r.push_back(row.r);
      o.fit_y.push_back(static_cast<double>(row.rf_exact));
    }
  }
  if (!sandwich) throw VerificationError("oracle value exceeds the separator bound");
  o.csv = s.str();
  o.extra["family"] = to_string(O.family());
  return o;
}

Outcome run_witness_curve(const Config& c, const MGroup& G) {
  GroupElement g = parse_element(c, G);
  DivisibilityOracle O(G, c.bound);
  auto rows = witness_curve(O, g, c.rmax);
  Outcome o;
  std::ostringstream s;
  s << "r,lcm,d_value,bound_status\n";
  for (const auto& row : rows) {
    s << row.r << ',' << row.lcm.get_str() << ',';
    if (row.d_value)
      s << *row.d_value;
    else
      s << '>' << c.bound;
    s << ',' << row.bound_status() << '\n';
    if (row.d_value) {
      o.fit_r.push_back(row.r);
      o.fit_y.push_back(static_cast<double>(*row.d_value));
    }
  }
  o.csv = s.str();
  o.extra["family"] = to_string(O.family());
  return o;
}

Outcome run_delta(const Config& c, const MGroup& G) {
  IdealSearchOptions io;
  io.threads = c.threads;
  auto t = delta_table(G, parse_prime_mode(c.mode), c.primes, io);
  Outcome o;
  std::ostringstream s;
  s << "p,delta_p,split_ok,order_checks\n";
  bool laws = true;
  for (const auto& row : t.rows) {
    s << row.prime << ',' << row.delta_p << ',' << (row.split_ok ? "true" : "false") << ',' << row.order_checks()
      << '\n';
    laws = laws && row.order_ok;
  }
  if (!laws) throw VerificationError("matrix order law failed");
  o.csv = s.str();
  o.extra["stable_min"] = t.stable_min;
  o.extra["unstable"] = t.unstable;
  return o;
}

Outcome run_separate(const Config& c, const MGroup& G) {
  GroupElement g = parse_element(c, G);
  Separator S(G, separator_options(c));
  auto Q = S.separate(g);
  Outcome o;
  json cert = certificate_json(Q);
  cert["element"] = csv_element(g, G);
  o.csv = cert.dump(2) + "\n";
  o.extra["order"] = Q.order;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

int run(const Config& c) {
  auto t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
  if (c.rmax < 0 || (c.command != "ball" && c.command != "coeff-stats" && c.rmax < 1))
    throw PreconditionError("--rmax must be at least 1");
  if (c.bound < 2) throw PreconditionError("--bound must be at least 2");
  std::string path = resolve_group(c.group);
  MGroup G = parse_group_file(path);
  auto t1 = std::chrono::steady_clock::now();

  Outcome o;
  if (c.command == "ball") o = run_ball(c, G);
  else if (c.command == "coeff-stats") o = run_coeff_stats(c, G);
  else if (c.command == "upper-curve") o = run_upper_curve(c, G);
  else if (c.command == "rf-curve") o = run_rf_curve(c, G);
  else if (c.command == "witness-curve") o = run_witness_curve(c, G);
  else if (c.command == "delta") o = run_delta(c, G);
  else if (c.command == "separate") o = run_separate(c, G);
  else throw PreconditionError("unknown command " + c.command);
  auto t2 = std::chrono::steady_clock::now();

  json manifest;
  manifest["config"] = config_json(c);
  manifest["group_file"] = path;
  manifest["group"] = group_to_json(G.description());
  manifest["versions"] = {{"rf_cli", kVersion}, {"gmp", gmp_version}, {"compiler", __VERSION__}};
  manifest["results"] = o.extra;
  if (!c.fit.empty()) {
    GrowthModel model = parse_growth_model(c.fit);
    try {
      auto f = fit_exponent(o.fit_r, o.fit_y, model, G.description().declared_bound);
      manifest["fit"] = {{"model", to_string(f.model)}, {"exponent", f.exponent}, {"intercept", f.intercept},
                         {"residual", f.residual},     {"points", f.points},     {"verdict", f.verdict}};
    } catch (const PreconditionError& e) {
      // Too few points is a property of the run, not a failure of it.
      manifest["fit"] = {{"model", to_string(model)}, {"verdict", "inconclusive"}, {"note", e.what()}};
    }
  }
  manifest["timings_ms"] = {
      {"load", std::chrono::duration<double, std::milli>(t1 - t0).count()},
      {"compute", std::chrono::duration<double, std::milli>(t2 - t1).count()}};
  manifest["status"] = "ok";

  if (c.out.empty()) {
    std::cout << o.csv;
    if (manifest.contains("fit")) std::cerr << manifest["fit"].dump() << '\n';
  } else {
    write_text(c.out, o.csv);
    write_text(c.out + ".manifest.json", manifest.dump(2) + "\n");
  }
  return 0;
}

int report_error(const Config& c, const std::string& kind, const std::string& msg, int code) {
  json err{{"status", "error"}, {"kind", kind}, {"message", msg}, {"config", config_json(c)}};
  std::cerr << err.dump() << '\n';
  if (!c.out.empty()) {
    try {
      write_text(c.out + ".manifest.json", err.dump(2) + "\n");
    } catch (...) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual finiteness growth experiments for split M-groups"};
  app.require_subcommand(1);
  Config c;
  const char* names[][2] = {{"ball", "Word-ball sizes"},
                            {"rf-curve", "Exact RF curve from the divisibility oracle, with the separator bound"},
                            {"upper-curve", "Certified upper curve from separating quotients"},
                            {"witness-curve", "D(g^lcm(1..r)) for a fixed element"},
                            {"delta", "delta_p over admissible primes"},
                            {"separate", "Separating quotient certificate for one element"},
                            {"coeff-stats", "Coefficient and denominator growth over balls"}};
  for (auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--group", c.group, "Group definition file or catalog name")->required();
    sub->add_option("--rmax", c.rmax, "Largest radius");
    sub->add_option("--bound", c.bound, "Oracle index bound B");
    sub->add_option("--mode", c.mode, "Prime mode")->check(CLI::IsMember({"paper", "best_effort"}));
    sub->add_option("--primes", c.primes, "Number of primes to sample");
    sub->add_option("--out", c.out, "Output path (manifest goes to <out>.manifest.json)");
    sub->add_option("--threads", c.threads, "Worker threads (0: runtime default)");
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--element", c.element, "K coordinates, comma separated");
    sub->add_option("--h", c.h, "Exponents of h_1..h_n, comma separated");
    sub->add_option("--fit", c.fit, "Growth model to fit")->check(CLI::IsMember({"polynomial", "polylog", "exponential"}));
    sub->callback([&c, name = std::string(name)] { c.command = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return run(c);
  } catch (const VerificationError& e) {
    return report_error(c, "verification", e.what(), 3);
  } catch (const ValidationFailure& e) {
    return report_error(c, "validation", e.what(), 2);
  } catch (const SchemaError& e) {
    return report_error(c, "schema", e.what(), 2);
  } catch (const BudgetError& e) {
    return report_error(c, "budget", e.what(), 4);
  } catch (const UnsupportedError& e) {
    return report_error(c, "unsupported", e.what(), 5);
  } catch (const std::exception& e) {
    return report_error(c, "error", e.what(), 1);
  }
}
