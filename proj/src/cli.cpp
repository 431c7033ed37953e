#include "btq/cli.hpp"

#include <CLI11.hpp>

#include <fstream>

#include "btq/errors.hpp"
#include "btq/grouphom.hpp"

namespace btq {

GroupSpec RunConfig::group() const {
  if (!is_prime(q)) throw ConfigError("q must be a prime (got " + std::to_string(q) + ")");
  if (d < 2) throw ConfigError("d must be at least 2");
  GroupSpec g;
  g.q = q;
  g.d = d;
  g.modulus = parse_poly(q, ideal).monic();
  if (g.modulus.is_zero()) throw ConfigError("ideal generator must be nonzero");
  return g;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "q") cfg.q = std::stoi(value);
    else if (key == "d") cfg.d = std::stoi(value);
    else if (key == "ideal") cfg.ideal = value;
    else if (key == "alpha") cfg.alpha = std::stoi(value);
    else if (key == "max-deg") cfg.max_level = std::stoi(value);
    else if (key == "cap") cfg.per_level_cap = std::stoll(value);
    else if (key == "unimodular") cfg.unimodular = (value == "1" || value == "true");
    else if (key == "max-s") cfg.max_s = std::stoi(value);
    else if (key == "max-order") cfg.max_order = std::stoll(value);
    else if (key == "stab-cap") cfg.stab_cap = std::stoll(value);
    else if (key == "jobs") cfg.jobs = std::stoi(value);
    else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(value));
    else if (key == "out") cfg.out_path = value;
    else if (key == "dot") cfg.want_dot = (value == "1" || value == "true");
    else throw ConfigError("unknown config key: " + key);
  }
}

namespace {

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out_path.empty()) {
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
    return;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + cfg.out_path);
  f << text;
}

int alpha_or_default(const RunConfig& cfg) {
  if (cfg.alpha > 0) return cfg.alpha;
  return cfg.d + 1;  // smallest sensible level above d-1
}

int cmd_quotient(const RunConfig& cfg, std::ostream& out) {
  GroupSpec g = cfg.group();
  int alpha = alpha_or_default(cfg);
  QuotientComplex qc = build_quotient(g, alpha);
  if (cfg.want_dot) {
    emit(cfg, quotient_to_dot(qc), out);
    return kOk;
  }
  Json j = quotient_to_json(qc, cfg.stab_cap);
  validate_quotient_json(j);
  emit(cfg, j.dump(2), out);
  return kOk;
}

int cmd_homology(const RunConfig& cfg, std::ostream& out) {
  GroupSpec g = cfg.group();
  int alpha = alpha_or_default(cfg);
  QuotientComplex qc = build_quotient(g, alpha);
  SubMask mask = qc.truncation_mask(alpha);
  Json j;
  j["group"] = g.str();
  j["alpha"] = alpha;
  Json rel = Json::array();
  for (int i = 0; i <= qc.complex.dim(); ++i) {
    RelativeHomology rh = relative_homology(qc.complex, mask, i);
    Json deg;
    deg["degree"] = i;
    deg["relative"] = abgroup_to_json(rh.invariants);
    deg["absolute"] = abgroup_to_json(homology(qc.complex, i));
    rel.push_back(deg);
  }
  j["homology"] = rel;
  emit(cfg, j.dump(2), out);
  return kOk;
}

int cmd_symbols(const RunConfig& cfg, std::ostream& out) {
  GroupSpec g = cfg.group();
  int alpha = alpha_or_default(cfg);
  QuotientComplex qc = build_quotient(g, alpha);
  RelativePair pair = make_relative_pair(qc, alpha);
  StreamOptions opts;
  opts.max_level = cfg.max_level;
  opts.unimodular_only = cfg.unimodular;
  opts.per_level_cap = cfg.per_level_cap;
  opts.seed = cfg.seed;
  MSLatticeResult ms = ms_lattice(qc, pair, opts);
  Json j;
  j["group"] = g.str();
  j["alpha"] = alpha;
  j["pair_rank"] = pair.rank();
  j["lattice_rank"] = ms.rank;
  Json div = Json::array();
  for (auto& t : ms.divisors) div.push_back(t.get_str());
  j["divisors"] = div;
  j["stabilized"] = ms.stabilized;
  j["stream"] = ms.provenance;
  j["symbols_computed"] = ms.symbols_computed;
  emit(cfg, j.dump(2), out);
  return ms.stabilized ? kOk : kBudget;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  GroupSpec g = cfg.group();
  int alpha = alpha_or_default(cfg);
  QuotientComplex qc = build_quotient(g, alpha, alpha + 1);
  AlphaTransition tr = alpha_transition(qc, alpha);
  RelativePair pair = make_relative_pair(qc, alpha);
  StreamOptions opts;
  opts.max_level = cfg.max_level;
  opts.unimodular_only = cfg.unimodular;
  opts.per_level_cap = cfg.per_level_cap;
  opts.seed = cfg.seed;
  MSLatticeResult ms = ms_lattice(qc, pair, opts);
  IndexReport rep = index_and_exponent(ms, pair);
  BoundConstants bc = bound_constants(cfg.d, cfg.q);
  Json j = index_report_to_json(rep, ms, bc, cfg.q);
  j["alpha"] = alpha;
  j["group"] = g.str();
  j["ml_isomorphism"] = tr.isomorphism;
  validate_verdict_json(j);
  emit(cfg, j.dump(2), out);

  out << "verify " << g.str() << " at alpha=" << alpha << "\n";
  out << "  rank(MS) = " << rep.rank_lattice << ", rank(H) = " << rep.rank_homology
      << (rep.rank_ok ? "  [ok]" : "  [VIOLATION]") << "\n";
  out << "  index = " << (rep.finite ? rep.index.get_str() : "infinite")
      << ", exponent = " << (rep.finite ? rep.exponent.get_str() : "infinite") << "\n";
  out << "  bound p^e(d) N(d) = " << j["bound"].get<std::string>()
      << (j["divides"].get<bool>() ? "  [divides]" : "  [VIOLATION]") << "\n";
  out << "  mittag-leffler transition iso: " << (tr.isomorphism ? "yes" : "no") << "\n";

  if (!ms.stabilized) return kBudget;
  bool violation = !rep.rank_ok || !rep.finite || !j["divides"].get<bool>();
  if (!g.is_full_group() && !j["p_part_ok"].get<bool>()) violation = true;
  if (cfg.d == 2 && rep.finite && rep.index != 1) violation = true;
  return violation ? kViolation : kOk;
}

int cmd_ghom(const RunConfig& cfg, std::ostream& out) {
  Json source;
  if (!cfg.from_quotient.empty()) {
    std::ifstream in(cfg.from_quotient);
    if (!in) throw ConfigError("cannot open quotient file " + cfg.from_quotient);
    in >> source;
  } else {
    GroupSpec g = cfg.group();
    QuotientComplex qc = build_quotient(g, alpha_or_default(cfg));
    source = quotient_to_json(qc, cfg.stab_cap);
  }
  validate_quotient_json(source);
  int q = source["group"]["q"].get<int>();
  int d = source["group"]["d"].get<int>();
  Json verdicts = Json::array();
  bool all_hold = true;
  auto harvest = [&](const Json& orbit, const std::string& kind) {
    if (!orbit.contains("stab_elements")) return;
    long long order = orbit["stab_order"].get<long long>();
    if (order < 2 || order > cfg.max_order) return;
    std::vector<MatA> elems;
    for (auto& m : orbit["stab_elements"]) elems.push_back(mata_from_json(m, q));
    FiniteGroup h = FiniteGroup::from_matrices(elems);
    SignCharacter triv = SignCharacter::trivial(h.order());
    for (int s = 1; s <= cfg.max_s; ++s) {
      AbGroup hs = group_homology(h, triv, s);
      // corollary bound p^(1 + s(d-2))
      Int bound = 1;
      for (int i = 0; i < 1 + s * (d - 2); ++i) bound *= q;
      bool holds = hs.free_rank == 0;
      for (auto& t : hs.torsion)
        if (bound % t != 0) holds = false;
      Json v;
      v["kind"] = kind;
      v["stab_order"] = order;
      v["s"] = s;
      v["homology"] = abgroup_to_json(hs);
      v["bound"] = bound.get_str();
      v["holds"] = holds;
      verdicts.push_back(v);
      if (!holds) all_hold = false;
    }
  };
  for (auto& orbit : source["vertices"]) harvest(orbit, "vertex");
  for (int dim = 1; dim <= d - 1; ++dim) {
    std::string key = "cells_dim" + std::to_string(dim);
    if (source.contains(key))
      for (auto& c : source[key]) harvest(c, "cell");
  }
  Json j;
  j["group"] = source["group"];
  j["verdicts"] = verdicts;
  j["all_hold"] = all_hold;
  emit(cfg, j.dump(2), out);
  return all_hold ? kOk : kViolation;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    if (command == "quotient") return cmd_quotient(cfg, out);
    if (command == "homology") return cmd_homology(cfg, out);
    if (command == "symbols") return cmd_symbols(cfg, out);
    if (command == "verify") return cmd_verify(cfg, out);
    if (command == "ghom") return cmd_ghom(cfg, out);
    if (command == "export-dot") {
      RunConfig c2 = cfg;
      c2.want_dot = true;
      return cmd_quotient(c2, out);
    }
    err << "unknown command: " << command << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const SearchBudgetExceeded& e) {
    err << "search budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const NonStabilized& e) {
    err << "not stabilized: " << e.what() << "\n";
    return kBudget;
  } catch (const RankDeficient& e) {
    err << "rank deficient: " << e.what() << "\n";
    return kViolation;
  }
}

int btq_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"btq: arithmetic quotients of the Bruhat-Tits building over F_q(t)"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  std::vector<CLI::App*> subs;
  for (const char* name : {"quotient", "homology", "symbols", "verify", "ghom", "export-dot"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--q", cfg.q, "field size (prime)");
    sub->add_option("--d", cfg.d, "rank");
    sub->add_option("--ideal", cfg.ideal, "ideal generator, e.g. t or t^2+t+1; 1 = full group");
    sub->add_option("--alpha", cfg.alpha, "truncation level (> d-1)");
    sub->add_option("--max-deg", cfg.max_level, "generator stream: max entry degree");
    sub->add_option("--cap", cfg.per_level_cap, "generator stream: per-level cap (0 = exhaust)");
    sub->add_flag("--unimodular", cfg.unimodular, "restrict the stream to GL_d(A) bases");
    sub->add_option("--max-s", cfg.max_s, "group homology: maximal degree");
    sub->add_option("--max-order", cfg.max_order, "group homology: maximal group order");
    sub->add_option("--stab-cap", cfg.stab_cap, "emit stabilizer elements up to this order");
    sub->add_option("--jobs", cfg.jobs, "worker cap");
    sub->add_option("--seed", cfg.seed, "seed for sampled streams");
    sub->add_option("--out", cfg.out_path, "output file (stdout when omitted)");
    sub->add_flag("--dot", cfg.want_dot, "emit a DOT graph (d = 2)");
    sub->add_option("--from-quotient", cfg.from_quotient, "ghom: harvest from a quotient JSON");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << "\n";
    return kConfigError;
  }
  try {
    if (!config_path.empty()) {
      // flags override the file: reparse by applying the file first
      RunConfig file_cfg;
      apply_config_file(config_path, file_cfg);
      // re-run CLI parsing on top of the file values
      CLI::App app2{"btq"};
      app2.require_subcommand(1);
      RunConfig merged = file_cfg;
      std::string ignored;
      for (const char* name : {"quotient", "homology", "symbols", "verify", "ghom", "export-dot"}) {
        CLI::App* sub = app2.add_subcommand(name);
        sub->add_option("--config", ignored);
        sub->add_option("--q", merged.q);
        sub->add_option("--d", merged.d);
        sub->add_option("--ideal", merged.ideal);
        sub->add_option("--alpha", merged.alpha);
        sub->add_option("--max-deg", merged.max_level);
        sub->add_option("--cap", merged.per_level_cap);
        sub->add_flag("--unimodular", merged.unimodular);
        sub->add_option("--max-s", merged.max_s);
        sub->add_option("--max-order", merged.max_order);
        sub->add_option("--stab-cap", merged.stab_cap);
        sub->add_option("--jobs", merged.jobs);
        sub->add_option("--seed", merged.seed);
        sub->add_option("--out", merged.out_path);
        sub->add_flag("--dot", merged.want_dot);
        sub->add_option("--from-quotient", merged.from_quotient);
      }
      app2.parse(argc, argv);
      cfg = merged;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  return run_command(command, cfg, out, err);
}

}  // namespace btq
