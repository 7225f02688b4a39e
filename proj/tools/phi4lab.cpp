// Command-line front end: lemma certification, K-chain evaluation, flow
// solving, oracle comparison and bound verification.
//
// Exit codes: 0 = all checks pass, 1 = check failure, 2 = usage/config error,
// 3 = numerical non-convergence / guard failure.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include <phi4/bounds.hpp>
#include <phi4/chain.hpp>
#include <phi4/constants.hpp>
#include <phi4/flow.hpp>
#include <phi4/lemmas.hpp>
#include <phi4/oracle.hpp>
#include <phi4/report.hpp>

namespace
{
  using namespace phi4;

  struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 20260808;
    int threads = 0;
    std::vector<std::string> overrides; // section.key=value
    std::vector<std::string> perturb;   // NAME=FACTOR or NAME=+10%
  };

  RunConfig resolve_config(const CommonOpts &opts)
  {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
    for (const auto &ov : opts.overrides) {
      const auto eq = ov.find('=');
      if (eq == std::string::npos) throw domain_error("--set expects section.key=value");
      cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    cfg.seed = opts.seed;
    if (const char *env = std::getenv("PHI4LAB_OUT")) cfg.out_dir = env;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.threads > 0) global_thread_count() = opts.threads;
    return cfg;
  }

  ConstantRegistry resolve_registry(const CommonOpts &opts)
  {
    ConstantRegistry reg;
    for (const auto &p : opts.perturb) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw domain_error("--perturb expects NAME=FACTOR or NAME=+P%");
      const std::string name = p.substr(0, eq);
      std::string val = p.substr(eq + 1);
      if (!val.empty() && val.back() == '%') {
        const double pct = std::stod(val.substr(0, val.size() - 1));
        reg.scale(name, 1.0 + pct / 100.0);
      } else {
        reg.set(name, std::stod(val));
      }
    }
    return reg;
  }

  void print_cert(const CertReport &rep)
  {
    std::printf("[%s] %s  (%s)\n", rep.pass ? "PASS" : "FAIL", rep.id.c_str(),
                rep.domain.c_str());
    for (const auto &c : rep.claims)
      std::printf("    %-64s claimed %-12.6g computed %-12.6g %s\n", c.name.c_str(), c.claimed,
                  c.computed, c.pass ? "ok" : "FAIL");
  }

  int cmd_certify_lemmas(const CommonOpts &opts, int lemma_filter)
  {
    const RunConfig cfg = resolve_config(opts);
    const ConstantRegistry reg = resolve_registry(opts);
    const auto reports = certify_all_lemmas(reg, cfg.seed, lemma_filter);
    ensure_dir(cfg.out_dir);
    nlohmann::json all;
    all["schema_version"] = report_schema_version;
    all["config"] = cfg.to_json();
    all["lemmas"] = nlohmann::json::array();
    bool pass = true;
    for (const auto &rep : reports) {
      print_cert(rep);
      pass = pass && rep.pass;
      all["lemmas"].push_back(cert_report_json(rep));
      write_json(cert_report_json(rep), cfg.out_dir + "/" + rep.id + ".json");
    }
    all["pass"] = pass;
    write_json(all, cfg.out_dir + "/lemmas.json");
    std::printf("lemma suite: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
  }

  int cmd_certify_k(const CommonOpts &opts, int caps)
  {
    const RunConfig cfg = resolve_config(opts);
    const ConstantRegistry reg = resolve_registry(opts);
    ConstantChain chain(reg);
    ConstantChain::Options copt;
    if (caps > 0) copt.n_cap = copt.l_cap = caps;
    const auto res = chain.minimal_K(copt);
    ensure_dir(cfg.out_dir);
    nlohmann::json j = chain_result_json(res);
    j["schema_version"] = report_schema_version;
    j["config"] = cfg.to_json();
    write_json(j, cfg.out_dir + "/certify_k.json");
    {
      // per-record implied bound at K*, plus bound-vs-n curves for plotting
      std::ofstream csv(cfg.out_dir + "/certify_k.csv", std::ios::binary);
      csv << "record,n,l,w,implied_bound,binding\n";
      for (const auto &row : res.table)
        csv << row.id << ',' << row.n << ',' << row.l << ',' << row.w << ','
            << float17(row.implied) << ',' << (row.binding ? 1 : 0) << '\n';
      std::ofstream curves(cfg.out_dir + "/certify_k_curves.csv", std::ios::binary);
      curves << "record,n,implied_bound\n";
      for (const auto &rec : chain.records()) {
        const int nhi = rec.n_max >= 0 ? rec.n_max : copt.n_cap;
        for (int n = rec.n_min; n <= nhi; ++n) {
          InequalityRecord fixed = rec;
          fixed.n_min = fixed.n_max = n;
          const auto sup = chain.supremum_over_parameters(fixed, res.K_star, copt.n_cap,
                                                          copt.l_cap);
          curves << rec.id << ',' << n << ',' << float17(sup.implied) << '\n';
        }
      }
    }
    std::printf("K* = %.6g   binding: %s at n=%d l=%d |w|=%d   (%d iterations)\n", res.K_star,
                res.binding_id.c_str(), res.n, res.l, res.w, res.iterations);
    // internal consistency: every record satisfied at K*
    for (const auto &row : res.table)
      if (row.implied > res.K_star * (1.0 + 1e-9)) return 1;
    return 0;
  }

  int cmd_solve(const CommonOpts &opts, int l_max, const std::string &family, bool unit_coupling)
  {
    const RunConfig cfg = resolve_config(opts);
    if (family != "four-point" && family != "antipodal-pair" && family != "all")
      throw domain_error("solve: unknown family '" + family + "'");
    SolverConfig sc = cfg.solver_config();
    if (l_max >= 0) sc.l_max = l_max;
    sc.unit_coupling_output = unit_coupling;
    FlowSolver solver(sc);
    solver.solve();
    ensure_dir(cfg.out_dir);
    for (const auto &[n, l] : solver.solved_tables()) {
      const auto &t = solver.table(n, l);
      if (family != "all" && t.family != family) continue;
      const std::string stem =
          cfg.out_dir + "/cag_2n" + std::to_string(2 * n) + "_l" + std::to_string(l);
      nlohmann::json meta = table_metadata_json(t, sc);
      meta["config"] = cfg.to_json();
      meta["quadrature_tail_bound"] = float17(solver.quadrature_tail_bound());
      meta["freeze_bound"] = float17(solver.freeze_bound());
      if (l >= 1) {
        const auto &ct = solver.counterterms(l);
        meta["counterterms"] = {{"a", float17(ct.a)}, {"b", float17(ct.b)}, {"c", float17(ct.c)}};
      }
      write_json(meta, stem + ".json");
      write_table_csv(t, sc, stem + ".csv", sc.unit_coupling_output);
      std::printf("wrote %s.{json,csv}\n", stem.c_str());
    }
    return 0;
  }

  int cmd_oracle_compare(const CommonOpts &opts)
  {
    const RunConfig cfg = resolve_config(opts);
    SolverConfig sc = cfg.solver_config();
    sc.l_max = std::max(sc.l_max, 1);
    FlowSolver solver(sc);
    solver.solve();

    bool pass = true;
    nlohmann::json j;
    j["schema_version"] = report_schema_version;
    j["config"] = cfg.to_json();

    // tadpole vs 1D-quadrature oracle over Lambda/m in [0, 10]
    double worst_tadpole = 0.0;
    {
      double sup = 0.0;
      std::vector<std::pair<double, double>> rows;
      for (double lam : solver.lambda_nodes()) {
        if (lam > 10.0 * sc.m) break;
        const auto o = tadpole_l1(solver.scales(lam), sc.g);
        sup = std::max(sup, std::abs(o.value));
        FourMomentum z{};
        const double f = solver.evaluate(1, 1, MomentumConfig({z, z}), lam);
        rows.push_back({o.value, f});
      }
      for (const auto &[o, f] : rows)
        worst_tadpole = std::max(worst_tadpole, std::abs(o - f) / std::max(sup, 1e-300));
      pass = pass && worst_tadpole < 1e-6;
      j["tadpole_rel_err"] = float17(worst_tadpole);
      std::printf("tadpole  rel err %.3g  (tolerance 1e-6)\n", worst_tadpole);
    }

    // tree six-point vs graph enumeration at seeded random configurations
    double worst_tree = 0.0;
    {
      Rng rng(cfg.seed);
      for (int it = 0; it < 100; ++it) {
        std::vector<FourMomentum> p(6);
        FourMomentum sum{};
        for (int i = 0; i < 5; ++i) {
          for (int mu = 0; mu < 4; ++mu)
            p[i][mu] = 2.0 * rng.normal();
          sum = sum + p[i];
        }
        p[5] = -sum;
        MomentumConfig config(p);
        const double lam = rng.uniform(0.0, 5.0);
        const double a = solver.tree(config, lam);
        const double b = tree_graph_enumeration(config, solver.scales(lam), sc.g);
        worst_tree = std::max(worst_tree, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      }
      pass = pass && worst_tree < 1e-10;
      j["tree6_rel_err"] = float17(worst_tree);
      std::printf("tree 6pt rel err %.3g  (tolerance 1e-10)\n", worst_tree);
    }

    // renormalized one-loop four-point vs the 2D-quadrature bubble oracle
    double worst_bubble = 0.0;
    {
      // nodes of the solved grid, exact under evaluation
      const std::vector<std::array<double, 3>> points = {
          {0.5, 0.0, 0.0},  {1.2, 0.0, 0.0},  {2.7, 0.0, 0.0},  {6.0, 0.0, 0.0},
          {9.0, 0.0, 0.0},  {0.8, 0.8, 0.0},  {1.8, 1.2, 0.0},  {4.0, 2.7, 0.0},
          {9.0, 4.0, 0.0},  {9.0, 8.0, 0.0},  {1.2, 1.2, 0.5},  {2.7, 1.8, 0.5},
          {6.0, 4.0, 0.5},  {9.0, 6.0, 0.5},  {1.8, 0.8, 0.85}, {4.0, 1.2, 0.85},
          {9.0, 2.7, 0.85}, {2.7, 2.7, 0.95}, {6.0, 6.0, 0.95}, {9.0, 8.0, 0.95}};
      for (const auto &[rp, rq, c] : points) {
        const auto config = make_family("four-point", {rp, rq, c});
        const double flow = solver.evaluate(1, 2, config, 0.0);
        const auto o = bubble_l1(config, solver.scales(0.0), sc.g);
        worst_bubble =
            std::max(worst_bubble, std::abs(flow - o.value) / std::max(std::abs(o.value), 1e-300));
      }
      pass = pass && worst_bubble < 1e-4;
      j["bubble_rel_err"] = float17(worst_bubble);
      std::printf("bubble   rel err %.3g  (tolerance 1e-4)\n", worst_bubble);
    }

    ensure_dir(cfg.out_dir);
    j["pass"] = pass;
    write_json(j, cfg.out_dir + "/oracle_compare.json");
    std::printf("oracle comparison: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
  }

  int cmd_verify_bounds(const CommonOpts &opts, double ktilde)
  {
    const RunConfig cfg = resolve_config(opts);
    SolverConfig sc = cfg.solver_config();
    FlowSolver solver(sc);
    solver.solve();
    const auto tables = solver.solved_tables();
    if (tables.empty()) throw domain_error("verify-bounds: no solved tables");
    bool pass = true;
    nlohmann::json j;
    j["schema_version"] = report_schema_version;
    j["config"] = cfg.to_json();
    j["K_tilde"] = float17(ktilde);
    j["tables"] = nlohmann::json::array();
    ensure_dir(cfg.out_dir);
    std::ofstream csv(cfg.out_dir + "/bounds.csv", std::ios::binary);
    csv << "n,l,lambda,p_sup,value,bound,margin\n";
    for (const auto &[n, l] : tables) {
      const auto rep = check_amplitude(
          solver.table(n, l), sc, ktilde, true, [&](const BoundViolation &node) {
            const double margin =
                node.value > 0.0 ? node.bound / node.value : std::numeric_limits<double>::infinity();
            csv << node.n << ',' << node.l << ',' << float17(node.lambda) << ','
                << float17(node.p_sup) << ',' << float17(node.value) << ','
                << float17(node.bound) << ',' << float17(margin) << '\n';
          });
      if (rep.nodes == 0) continue;
      pass = pass && rep.pass;
      j["tables"].push_back({{"n", rep.n},
                             {"l", rep.l},
                             {"nodes", rep.nodes},
                             {"pass", rep.pass},
                             {"worst_margin", float17(rep.worst_margin)}});
      std::printf("bounds 2n=%d l=%d: %zu nodes, worst margin %.3g  %s\n", 2 * rep.n, rep.l,
                  rep.nodes, rep.worst_margin, rep.pass ? "ok" : "FAIL");
    }
    j["pass"] = pass;
    write_json(j, cfg.out_dir + "/bounds.json");
    std::printf("bound verification: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
  }

  int cmd_report(const CommonOpts &opts)
  {
    int rc = 0;
    rc = std::max(rc, cmd_certify_lemmas(opts, 0));
    rc = std::max(rc, cmd_certify_k(opts, 0));
    rc = std::max(rc, cmd_solve(opts, 2, "all", false));
    rc = std::max(rc, cmd_oracle_compare(opts));
    rc = std::max(rc, cmd_verify_bounds(opts, 6.2e5));
    return rc;
  }
} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"phi4lab: flow-equation amplitudes and bound certification for phi^4_4"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "key = value config file");
  app.add_option("--out", opts.out_dir, "output directory (or PHI4LAB_OUT)");
  app.add_option("--seed", opts.seed, "seed for randomized sweeps");
  app.add_option("--threads", opts.threads, "worker pool size (default: cores)");
  app.add_option("--set", opts.overrides, "override config values, section.key=value");
  app.add_option("--perturb", opts.perturb, "perturb a registry constant, NAME=+10% or NAME=value");

  int lemma_filter = 0;
  auto *lem = app.add_subcommand("certify-lemmas", "verify the auxiliary inequalities");
  lem->add_option("--lemma", lemma_filter, "verify a single lemma (1-8)");

  int caps = 0;
  auto *ck = app.add_subcommand("certify-k", "compute the minimal constant K");
  ck->add_option("--caps", caps, "parameter sweep caps (default 50)");

  int l_max = -1;
  std::string family = "all";
  bool unit_coupling = false;
  auto *solve = app.add_subcommand("solve", "solve the flow and write tables");
  solve->add_option("--l-max", l_max, "highest loop order (0-2)");
  solve->add_option("--family", family, "table family to emit (four-point, antipodal-pair, all)");
  solve->add_flag("--unit-coupling", unit_coupling, "emit values in the unit-coupling convention");

  auto *oc = app.add_subcommand("oracle-compare", "compare the solver against diagram oracles");
  double ktilde = 6.2e5;
  auto *vb = app.add_subcommand("verify-bounds", "check solved tables against the global bound");
  vb->add_option("--ktilde", ktilde, "bound constant (default 6.2e5)");
  auto *rep = app.add_subcommand("report", "run everything and write all reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (lem->parsed()) return cmd_certify_lemmas(opts, lemma_filter);
    if (ck->parsed()) return cmd_certify_k(opts, caps);
    if (solve->parsed()) return cmd_solve(opts, l_max, family, unit_coupling);
    if (oc->parsed()) return cmd_oracle_compare(opts);
    if (vb->parsed()) return cmd_verify_bounds(opts, ktilde);
    if (rep->parsed()) return cmd_report(opts);
  } catch (const phi4::convergence_error &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const phi4::domain_error &e) {
    std::fprintf(stderr, "usage/config error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
