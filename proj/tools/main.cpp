// Command-line front end: typechecking, bounded execution, traces,
// unrollings, the of^n decision, compactness checks, and fuzz campaigns.
//
// Exit codes: 0 success, 1 property violation or rejection, 2 usage or
// parse errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "unwind/harness.hpp"

namespace {

using namespace unwind;

struct CliFail {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFail{2, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Exp parse_file(const std::string& path) {
  ParseResult r = parse(read_file(path));
  if (!r.ok()) {
    const ParseError& e = r.error();
    throw CliFail{2, path + ":" + std::to_string(e.line) + ":" +
                         std::to_string(e.col) + ": " + e.message};
  }
  return r.exp();
}

FunctionSpec load_spec(const std::string& path) {
  Exp f = parse_file(path);
  if (f.kind() != Kind::Fun || !is_closed(f))
    throw CliFail{2, path + ": a spec file must hold one closed fun"};
  FunctionSpec spec = FunctionSpec::from_fun(f);
  if (!validate_spec(spec))
    throw CliFail{2, path + ": the function does not typecheck"};
  return spec;
}

FunctionSpec spec_or_default(const std::string& path) {
  if (path.empty()) return FunctionSpec(unit1(), unit1(), var(0));
  return load_spec(path);
}

std::string run_line(const RunResult& r) {
  switch (r.tag) {
    case RunResult::Tag::Terminated:
      return "value " + print(*r.term) + " in " + std::to_string(r.steps) + " steps";
    case RunResult::Tag::SelfLoop: return "selfloop@" + std::to_string(r.steps);
    case RunResult::Tag::FuelExhausted: return "fuel-exhausted";
    default: return "stuck: " + r.reason;
  }
}

int cmd_check(const std::string& file, const std::string& spec_path) {
  FunctionSpec spec = spec_or_default(spec_path);
  Exp e = parse_file(file);
  TypeResult r = type_of(spec, TypingContext{}, e);
  if (!r.ok()) {
    std::cout << "type error [" << r.error().rule << "] " << r.error().message
              << " at " << print(r.error().subterm) << "\n";
    return 1;
  }
  std::cout << print(r.type()) << "\n";
  return 0;
}

int cmd_run(const std::string& file, const std::string& spec_path, std::uint64_t fuel) {
  FunctionSpec spec = spec_or_default(spec_path);
  Exp e = parse_file(file);
  RunResult r = run(spec, e, fuel);
  std::cout << run_line(r) << "\n";
  return r.stuck() ? 1 : 0;
}

int cmd_trace(const std::string& file, const std::string& spec_path,
              std::uint64_t fuel) {
  FunctionSpec spec = spec_or_default(spec_path);
  Exp cur = parse_file(file);
  std::cout << print(cur) << "\n";
  std::uint64_t steps = 0;
  while (steps < fuel && !is_value(cur)) {
    StepOutcome out = step(spec, EvalContext::empty(), cur);
    if (out.is_stuck()) {
      std::cout << "stuck: " << out.rule << "\n";
      return 1;
    }
    if (equal(*out.next, cur)) {
      std::cout << "selfloop@" << steps << "\n";
      return 0;
    }
    cur = *out.next;
    ++steps;
    std::cout << print(cur) << "\n";
  }
  if (is_value(cur))
    std::cout << "value " << print(cur) << " in " << steps << " steps\n";
  else
    std::cout << "fuel-exhausted\n";
  return 0;
}

int cmd_unroll(const std::string& spec_path, const std::string& depth_arg) {
  FunctionSpec spec = load_spec(spec_path);
  UnrollDepth depth = UnrollDepth::omega();
  if (depth_arg != "omega") {
    try {
      depth = UnrollDepth::finite(std::stoull(depth_arg));
    } catch (const std::exception&) {
      throw CliFail{2, "--depth takes a natural number or 'omega'"};
    }
  }
  std::cout << print(unroll(spec, depth)) << "\n";
  return 0;
}

int cmd_of(const std::string& spec_path, std::uint64_t n, const std::string& term_file,
           const std::string& pat_file) {
  FunctionSpec spec = load_spec(spec_path);
  Exp e = parse_file(term_file);
  Exp p = parse_file(pat_file);
  std::cout << (of_check(spec, n, e, p) ? "true" : "false") << "\n";
  return 0;
}

int cmd_compactness(const std::string& spec_path, const std::string& pattern_file,
                    const std::string& ctx_file, std::uint64_t fuel) {
  FunctionSpec spec = load_spec(spec_path);
  Exp p = parse_file(pattern_file);
  EvalContext E = EvalContext::empty();
  if (!ctx_file.empty()) {
    Exp shape = parse_file(ctx_file);
    if (shape.ctxhole_count() != 1)
      throw CliFail{2, ctx_file + ": a context file must contain exactly one _"};
    E = EvalContext(shape);
  }
  Exp whole = plug(E, p);
  {
    TypeResult t = type_of(spec, TypingContext{}, fill(whole, spec, UnrollDepth::omega()));
    if (!t.ok() || t.type() != unit1())
      throw CliFail{1, "the filled program is not a whole program of type unit" +
                           (t.ok() ? " (got " + print(t.type()) + ")"
                                   : ": " + t.error().message)};
  }
  RunResult rw = run(spec, fill(whole, spec, UnrollDepth::omega()), fuel);
  std::cout << "omega: " << run_line(rw) << "\n";
  if (rw.terminated()) {
    RunResult rf = run(spec, fill(whole, spec, UnrollDepth::finite(rw.steps)), fuel);
    std::cout << "finite(" << rw.steps << "): " << run_line(rf) << "\n";
  }
  for (std::uint64_t k : {std::uint64_t{0}, std::uint64_t{1}}) {
    RunResult rk = run(spec, fill(whole, spec, UnrollDepth::finite(k)), fuel);
    std::cout << "backward k=" << k << ": " << run_line(rk) << "\n";
  }
  LemmaReport rep = check_compactness(spec, E, p, fuel);
  if (rep.pass()) {
    std::cout << "verdict: pass (" << rep.cases_run << " checked, "
              << rep.inconclusive << " inconclusive)\n";
    return 0;
  }
  std::cout << "verdict: fail\n";
  for (const Violation& v : rep.violations)
    std::cout << "  expected " << v.expected << ", got " << v.got << "\n";
  return 1;
}

int cmd_fuzz(const CampaignConfig& cc, const std::string& report_path) {
  CampaignResult r = run_campaign(cc);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw CliFail{2, "cannot write " + report_path};
    out << render_report(cc, r);
  }
  std::cout << "mode " << cc.mode << ": " << r.cases.size() << " cases, "
            << r.total.cases_run << " checked, " << r.total.violations.size()
            << " violations, " << r.total.inconclusive << " inconclusive\n";
  for (const Violation& v : r.total.violations) {
    std::cout << "violation:\n" << v.inputs << "\n  expected: " << v.expected
              << "\n  got: " << v.got << "\n";
  }
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for unrolling-based compactness checking"};
  app.require_subcommand(1);

  std::string file, spec_path, pattern_file, ctx_file, depth_arg, report_path;
  std::uint64_t fuel = 100, n = 0;

  auto* check = app.add_subcommand("check", "typecheck a source file");
  check->add_option("file", file)->required();
  check->add_option("--spec", spec_path, "function under study (defaults to identity)");

  auto* runc = app.add_subcommand("run", "run a whole program");
  runc->add_option("file", file)->required();
  runc->add_option("--fuel", fuel)->required();
  runc->add_option("--spec", spec_path);

  auto* trace = app.add_subcommand("trace", "print every state of a run");
  trace->add_option("file", file)->required();
  trace->add_option("--fuel", fuel)->required();
  trace->add_option("--spec", spec_path);

  auto* unrollc = app.add_subcommand("unroll", "print a function unrolling");
  unrollc->add_option("--spec", spec_path)->required();
  unrollc->add_option("--depth", depth_arg, "a natural number or 'omega'")->required();

  auto* ofc = app.add_subcommand("of", "decide the indexed matching relation");
  ofc->add_option("--spec", spec_path)->required();
  ofc->add_option("--n", n)->required();
  ofc->add_option("term", file)->required();
  ofc->add_option("pattern", pattern_file)->required();

  auto* compact = app.add_subcommand("compactness", "check the unrolling biconditional");
  compact->add_option("--spec", spec_path)->required();
  compact->add_option("--pattern", pattern_file)->required();
  compact->add_option("--ctx", ctx_file);
  compact->add_option("--fuel", fuel)->required();

  CampaignConfig cc;
  std::string mode;
  auto* fuzz = app.add_subcommand("fuzz", "run a property campaign");
  fuzz->add_option("--mode", mode, "determinism|safety|bottom|bisim|compactness")
      ->required();
  fuzz->add_option("--seed", cc.seed)->required();
  fuzz->add_option("--count", cc.count)->required();
  fuzz->add_option("--fuel", cc.fuel)->required();
  fuzz->add_option("--size", cc.size)->required();
  fuzz->add_option("--report", report_path, "write a replayable report here");
  fuzz->add_option("--spec", spec_path, "fix one spec instead of the built-in corpus");
  fuzz->add_option("--letcc-weight", cc.letcc_weight);
  fuzz->add_option("--throw-weight", cc.throw_weight);
  fuzz->add_option("--hole-weight", cc.hole_weight);
  fuzz->add_flag("--with-context", cc.with_context,
                 "plug generated patterns into generated contexts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(file, spec_path);
    if (app.got_subcommand(runc)) return cmd_run(file, spec_path, fuel);
    if (app.got_subcommand(trace)) return cmd_trace(file, spec_path, fuel);
    if (app.got_subcommand(unrollc)) return cmd_unroll(spec_path, depth_arg);
    if (app.got_subcommand(ofc)) return cmd_of(spec_path, n, file, pattern_file);
    if (app.got_subcommand(compact))
      return cmd_compactness(spec_path, pattern_file, ctx_file, fuel);
    if (app.got_subcommand(fuzz)) {
      cc.mode = mode;
      if (!spec_path.empty()) cc.fixed_spec = load_spec(spec_path);
      return cmd_fuzz(cc, report_path);
    }
  } catch (const CliFail& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
