// Command-line front end: runs a script, then one command on its bindings,
// and prints a JSON report.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "dtf/report.hpp"
#include "dtf/script.hpp"

using nlohmann::json;
using namespace dtf;

namespace {

struct Options {
  std::string script_path;
  std::string tower_path;
  bool pretty = false;
  std::string name;
  int steps = 1;
  std::string direction = "right";
  std::string split;
  std::string psi;
  std::string m;
  std::string first;
  std::string second;
};

std::string read_source(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SyntaxError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string pick(const Environment& env, const std::string& requested, std::initializer_list<const char*> kinds,
                 const char* role) {
  if (!requested.empty()) {
    env.lookup(requested);
    return requested;
  }
  for (const char* kind : kinds) {
    std::string name = env.last_of_kind(kind);
    if (!name.empty()) return name;
  }
  throw Error(ErrorCode::UnboundName, std::string("script binds no ") + role);
}

json laplace_chain_report(const LaplaceChain& chain, int steps) {
  json entries = json::array();
  const int sign = steps >= 0 ? 1 : -1;
  for (std::size_t i = 0; i < chain.ops.size(); ++i) {
    const SchrodingerOp& l = chain.ops[i];
    entries.push_back({{"index", sign * static_cast<int>(i)},
                       {"a", l.a().to_string()},
                       {"b", l.b().to_string()},
                       {"c", l.c().to_string()},
                       {"h", l.h().to_string()},
                       {"k", l.k().to_string()}});
  }
  return json{{"chain", entries},
              {"termination", chain.termination == ChainTermination::Complete ? "Complete" : "Factorizable"},
              {"relationsHold", chain.relations_hold}};
}

// Returns the result payload and whether everything in it is verified.
std::pair<json, bool> run_command(const std::string& command, const Options& o, Environment& env) {
  if (command == "invariants") {
    const SchrodingerOp l = env.as_schrodinger(env.lookup(pick(env, o.name, {"schrodinger"}, "operator")), "invariants");
    incomplete_factorizations(l);
    return {json{{"h", l.h().to_string()}, {"k", l.k().to_string()}}, true};
  }
  if (command == "laplace-chain") {
    const SchrodingerOp l = env.as_schrodinger(env.lookup(pick(env, o.name, {"schrodinger"}, "operator")), "laplace-chain");
    if (o.direction != "right" && o.direction != "left") throw Error(ErrorCode::TypeError, "--direction is right or left");
    const int steps = o.direction == "right" ? o.steps : -o.steps;
    const LaplaceChain chain = laplace_chain(l, steps);
    return {laplace_chain_report(chain, steps), chain.relations_hold};
  }
  if (command == "certify-kernel") {
    const SchrodingerOp l = env.as_schrodinger(env.lookup(pick(env, o.name, {"schrodinger"}, "operator")), "certify-kernel");
    json certified = json::array();
    std::vector<FieldElem> elements = env.kernels().elements(l);
    if (!o.psi.empty()) {
      const FieldElem psi = certify_kernel(l, env.as_field(env.evaluate(o.psi), "--psi"));
      if (std::find(elements.begin(), elements.end(), psi) == elements.end()) elements.insert(elements.begin(), psi);
    }
    for (const auto& psi : elements) certified.push_back(psi.to_string());
    return {json{{"certified", certified}, {"residual", "0"}}, true};
  }
  if (command == "wronskian-dt") {
    const SchrodingerOp l = env.as_schrodinger(env.lookup(pick(env, o.name, {"schrodinger"}, "operator")), "wronskian-dt");
    unsigned m = 0, n = 0;
    char comma = 0;
    std::istringstream in(o.split);
    if (!(in >> m >> comma >> n) || comma != ',') throw Error(ErrorCode::SyntaxError, "--split expects m,n");
    std::vector<FieldElem> hints = env.kernels().elements(l);
    if (hints.size() < m + n) {
      throw Error(ErrorCode::NotCertified, "needs " + std::to_string(m + n) + " certified kernel elements, script has " +
                                               std::to_string(hints.size()));
    }
    hints.resize(m + n);
    const DarbouxMorphism dt = make_wronskian_dt(l, hints, m, n);
    json out = to_json(dt);
    out["order"] = m + n;
    out["determinantSize"] = m + n + 1;
    return {out, true};
  }
  if (command == "solve-first-order") {
    const SchrodingerOp l =
        env.as_schrodinger(env.lookup(pick(env, o.name, {"schrodinger"}, "operator")), "solve-first-order");
    if (o.m.empty()) throw Error(ErrorCode::SyntaxError, "--m is required");
    const DiffOp m = env.as_diffop(env.evaluate(o.m), "--m");
    json sols = json::array();
    for (const auto& s : solve_first_order(l, m)) {
      json entry{{"N", to_json(s.n)}, {"target", to_json(s.target)}};
      if (s.parameter) entry["parameter"] = variable_name(*s.parameter);
      sols.push_back(entry);
    }
    return {json{{"M", to_json(m)}, {"solutions", sols}}, true};
  }
  if (command == "verify") {
    const Value& v = env.lookup(pick(env, o.name, {"pair", "morphism"}, "morphism"));
    Verification ver;
    if (const auto* p = std::get_if<PairValue>(&v)) {
      ver = verify_intertwining(p->source, p->m, p->n, p->target);
    } else {
      const DarbouxMorphism d = env.as_morphism(v, "verify");
      ver = verify_intertwining(d.source(), d.m(), d.n(), d.target());
    }
    if (!ver.ok) throw Error(ErrorCode::NotVerified, "N L != L1 M", ver.residual.to_string());
    return {json{{"verified", true}, {"residual", "0"}}, true};
  }
  if (command == "compose") {
    if (o.first.empty() || o.second.empty()) throw Error(ErrorCode::SyntaxError, "--first and --second are required");
    const DarbouxMorphism a = env.as_morphism(env.lookup(o.first), "--first");
    const DarbouxMorphism b = env.as_morphism(env.lookup(o.second), "--second");
    return {to_json(compose_morphisms(a, b)), true};
  }
  if (command == "factorize" || command == "classify") {
    const DarbouxMorphism m = env.as_morphism(env.lookup(pick(env, o.name, {"morphism", "pair"}, "morphism")), command);
    const FactorizationChain chain = factorize(m, env.kernels().elements(m.source()));
    if (command == "factorize") return {to_json(chain, m), chain.composed_equivalent};
    json kinds = json::array();
    for (const auto& s : chain.steps) kinds.push_back(step_kind_name(s.kind));
    return {json{{"invertible", classify_invertible(chain)}, {"kinds", kinds}}, chain.composed_equivalent};
  }
  throw Error(ErrorCode::SyntaxError, "unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Darboux transformations of 2D Schrodinger operators"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tower", o.tower_path, "script of symbol declarations loaded first");
  app.add_flag("--pretty", o.pretty, "indent the JSON report");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"invariants", "Laplace invariants h and k"},
      {"laplace-chain", "iterate Laplace transformations"},
      {"certify-kernel", "check kernel elements"},
      {"wronskian-dt", "Wronskian-type transformation from kernel elements"},
      {"solve-first-order", "all first-order N, L1 for a given M"},
      {"verify", "check N L == L1 M"},
      {"compose", "compose two morphisms"},
      {"factorize", "factor a morphism into first-order steps"},
      {"classify", "invertibility of a morphism"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("script", o.script_path, "script file, stdin when omitted or '-'");
    sub->add_option("--name", o.name, "binding to operate on (default: the last suitable one)");
    sub->add_flag("--pretty", o.pretty, "indent the JSON report");
    sub->add_option("--tower", o.tower_path, "script of symbol declarations loaded first");
    const std::string name = c.name;
    if (name == "laplace-chain") {
      sub->add_option("--steps", o.steps, "number of moves")->check(CLI::NonNegativeNumber);
      sub->add_option("--direction", o.direction, "right or left")->check(CLI::IsMember({"right", "left"}));
    } else if (name == "wronskian-dt") {
      sub->add_option("--split", o.split, "m,n")->required();
    } else if (name == "certify-kernel") {
      sub->add_option("--psi", o.psi, "expression to certify");
    } else if (name == "solve-first-order") {
      sub->add_option("--m", o.m, "first-order operator Dx + m or Dy + m")->required();
    } else if (name == "compose") {
      sub->add_option("--first", o.first, "morphism applied first")->required();
      sub->add_option("--second", o.second, "morphism applied second")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  json report{{"schema", kReportSchema}, {"command", command}};
  const auto start = std::chrono::steady_clock::now();
  int status = 0;
  try {
    Environment env;
    if (!o.tower_path.empty()) {
      const Script tower = parse_script(read_source(o.tower_path));
      for (const auto& s : tower.statements) {
        if (s.kind != Statement::Kind::Declare) throw Error(ErrorCode::SyntaxError, "--tower accepts declarations only");
      }
      env.run(tower);
    }
    env.run(parse_script(read_source(o.script_path)));
    auto [result, verified] = run_command(command, o, env);
    report["result"] = result;
    report["verified"] = verified;
    if (!verified) status = 2;
  } catch (const Error& e) {
    report["error"] = to_json(e);
    report["verified"] = false;
    status = exit_code(e);
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report["timing"] = {{"ms", ms}};
  std::cout << (o.pretty ? report.dump(2) : report.dump()) << "\n";
  return status;
}
