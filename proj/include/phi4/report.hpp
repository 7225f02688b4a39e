#pragma once

// standard library
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <phi4/bounds.hpp>
#include <phi4/chain.hpp>
#include <phi4/flow.hpp>
#include <phi4/lemmas.hpp>

namespace phi4
{
  inline constexpr int report_schema_version = 1;

  /// floats serialized with 17 significant digits
  inline std::string float17(double v)
  {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  // ---------------------------------------------------------------- config

  /// Flat sections of key = value pairs; CLI flags override file values.
  struct RunConfig {
    std::map<std::string, std::string> kv; // "section.key" -> value
    uint64_t seed = 20260808;
    std::string out_dir = "out";

    static RunConfig from_file(const std::string &path)
    {
      RunConfig cfg;
      std::ifstream in(path);
      if (!in) throw domain_error("config: cannot open " + path);
      std::string line, section;
      while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
          const auto a = s.find_first_not_of(" \t\r");
          const auto b = s.find_last_not_of(" \t\r");
          return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
          section = trim(line.substr(1, line.size() - 2));
          continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw domain_error("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        cfg.kv[(section.empty() ? key : section + "." + key)] = val;
      }
      return cfg;
    }

    void set(const std::string &dotted, const std::string &value) { kv[dotted] = value; }

    double get_double(const std::string &key, double fallback) const
    {
      auto it = kv.find(key);
      return it == kv.end() ? fallback : std::stod(it->second);
    }
    int get_int(const std::string &key, int fallback) const
    {
      auto it = kv.find(key);
      return it == kv.end() ? fallback : std::stoi(it->second);
    }

    SolverConfig solver_config() const
    {
      SolverConfig sc = SolverConfig::defaults();
      sc.g = get_double("solver.g", sc.g);
      sc.m = get_double("solver.m", sc.m);
      sc.lambda0 = get_double("solver.lambda0", sc.lambda0);
      sc.l_max = get_int("solver.l_max", sc.l_max);
      sc.n_lambda = get_int("solver.n_lambda", sc.n_lambda);
      sc.n_radial = get_int("solver.n_radial", sc.n_radial);
      sc.n_angle = get_int("solver.n_angle", sc.n_angle);
      sc.ode_rtol = get_double("solver.ode_rtol", sc.ode_rtol);
      sc.refine = get_int("solver.refine", sc.refine);
      return sc;
    }

    nlohmann::json to_json() const
    {
      nlohmann::json j = nlohmann::json::object();
      for (const auto &[k, v] : kv)
        j[k] = v;
      j["seed"] = seed;
      j["out_dir"] = out_dir;
      return j;
    }
  };

  // ---------------------------------------------------------------- reports

  inline nlohmann::json cert_report_json(const CertReport &rep)
  {
    nlohmann::json j;
    j["id"] = rep.id;
    j["domain"] = rep.domain;
    j["pass"] = rep.pass;
    j["claims"] = nlohmann::json::array();
    for (const auto &c : rep.claims) {
      nlohmann::json cj;
      cj["name"] = c.name;
      cj["claimed"] = float17(c.claimed);
      cj["computed"] = float17(c.computed);
      cj["ratio"] = float17(c.ratio);
      cj["pass"] = c.pass;
      if (!c.note.empty()) cj["note"] = c.note;
      j["claims"].push_back(cj);
    }
    return j;
  }

  inline nlohmann::json chain_result_json(const ConstantChain::Result &res)
  {
    nlohmann::json j;
    j["K_star"] = float17(res.K_star);
    j["binding"] = {{"id", res.binding_id}, {"n", res.n}, {"l", res.l}, {"w", res.w}};
    j["iterations"] = res.iterations;
    j["records"] = nlohmann::json::array();
    for (const auto &row : res.table)
      j["records"].push_back({{"id", row.id},
                              {"implied_bound", float17(row.implied)},
                              {"n", row.n},
                              {"l", row.l},
                              {"w", row.w},
                              {"binding", row.binding}});
    return j;
  }

  inline nlohmann::json table_metadata_json(const AmplitudeTable &t, const SolverConfig &cfg)
  {
    nlohmann::json j;
    j["schema_version"] = report_schema_version;
    j["l"] = t.l;
    j["n"] = t.n;
    j["family"] = t.family;
    j["units"] = "m = " + float17(cfg.m) + ", lambda0 = " + float17(cfg.lambda0);
    j["coupling"] = cfg.unit_coupling_output ? "unit" : "g/4! = " + float17(cfg.vertex());
    j["axes"] = nlohmann::json::array();
    for (const auto &a : t.axes) {
      nlohmann::json aj = nlohmann::json::array();
      for (double v : a)
        aj.push_back(float17(v));
      j["axes"].push_back(aj);
    }
    nlohmann::json lj = nlohmann::json::array();
    for (double v : t.lambda_nodes)
      lj.push_back(float17(v));
    j["lambda_nodes"] = lj;
    return j;
  }

  /// CSV of one table: family parameters, lambda, value (LF line endings)
  inline void write_table_csv(const AmplitudeTable &t, const SolverConfig &cfg,
                              const std::string &path, bool unit_coupling = false)
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot write " + path);
    const double conv = unit_coupling ? std::pow(cfg.vertex(), t.n + t.l - 1) : 1.0;
    if (t.family == "antipodal-pair") out << "p,lambda,value\n";
    else out << "r1,r2,cos,lambda,value\n";
    const std::size_t np = t.points();
    for (std::size_t il = 0; il < t.lambda_nodes.size(); ++il)
      for (std::size_t i = 0; i < np; ++i) {
        std::size_t rem = i;
        std::vector<double> coord(t.axes.size());
        for (std::size_t d = t.axes.size(); d-- > 0;) {
          coord[d] = t.axes[d][rem % t.axes[d].size()];
          rem /= t.axes[d].size();
        }
        for (double c : coord)
          out << float17(c) << ',';
        out << float17(t.lambda_nodes[il]) << ',' << float17(t.values[il * np + i] / conv)
            << '\n';
      }
  }

  inline void write_json(const nlohmann::json &j, const std::string &path)
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot write " + path);
    out << j.dump(2) << '\n';
  }

  inline void ensure_dir(const std::string &dir) { std::filesystem::create_directories(dir); }
} // namespace phi4
