// wglfix: fixed points of modalized formulas in the logics wGL_n, with
// proof-certificate output and bounded countermodel search.
//
// Exit codes: 0 success, 1 domain error (bad input formula, failed
// verification, rejected certificate), 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "wgl/depth.hpp"
#include "wgl/derive.hpp"
#include "wgl/formula.hpp"
#include "wgl/kernel.hpp"
#include "wgl/kripke.hpp"
#include "wgl/synth.hpp"

namespace {

using nlohmann::ordered_json;

bool use_color() {
  const char* env = std::getenv("FP_COLOR");
  std::string mode = env ? env : "auto";
  if (mode == "always") return true;
  if (mode == "never") return false;
  return isatty(fileno(stderr)) != 0;
}

// Print a domain error to stderr and return the domain exit code.
int fail(const std::string& message) {
  if (use_color())
    std::cerr << "\x1b[31merror:\x1b[0m " << message << "\n";
  else
    std::cerr << "error: " << message << "\n";
  return 1;
}

// Formula arguments accept inline text, @path (read the file), or "-"
// (read standard input).
std::string read_formula_arg(const std::string& arg) {
  if (arg == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw CLI::ValidationError("--formula", "cannot read file '" + arg.substr(1) + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return arg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::invalid_argument("failed while writing '" + path + "'");
}

std::string read_text_input(const std::string& arg) {
  if (arg == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot read file '" + arg + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Validate a fixed-point variable name: it must parse as a plain variable.
std::string checked_var(const std::string& name) {
  try {
    wgl::Formula f = wgl::parse(name);
    if (f.is_var()) return f.var_name();
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--var", "'" + name + "' is not a variable name");
}

// JSON fields carry the sugar-free form; human-facing text uses the default
// pretty-printer.
std::string plain(const wgl::Formula& f) {
  return wgl::to_text(f, wgl::PrintOptions{false});
}
std::string pretty(const wgl::Formula& f) { return wgl::to_text(f); }

void emit_json(const ordered_json& j) { std::cout << j.dump() << "\n"; }

// ---------------------------------------------------------------------------
// fixpoint

struct FixpointOpts {
  unsigned n = 1;
  std::string var;
  std::string formula;
  std::string method = "auto";
  bool simplify = false;
  bool json = false;
  std::string certificate_out;
  std::string trace_out;
};

int run_fixpoint(const FixpointOpts& opt) {
  wgl::Formula a = wgl::parse(read_formula_arg(opt.formula));
  const bool wants_files = !opt.certificate_out.empty() || !opt.trace_out.empty();

  std::optional<wgl::FixedPointResult> result;
  std::optional<wgl::Formula> shortcut;
  std::string method_used;

  if (opt.method == "shortcut" ||
      (opt.method == "auto" && !wants_files && a.is_box())) {
    if (a.is_box()) shortcut = wgl::simple_fixed_point(a, opt.var, opt.n);
    if (opt.method == "shortcut" && !shortcut)
      return fail("no shortcut fixed point for this input");
  }
  if (shortcut) {
    method_used = "shortcut";
  } else {
    result = wgl::fixed_point(a, opt.var, opt.n,
                              /*want_cert=*/!opt.certificate_out.empty());
    method_used = "loop";
  }

  wgl::Formula fixed = shortcut ? *shortcut : result->fixed_point;
  wgl::Formula shown = opt.simplify ? wgl::simplify(fixed) : fixed;

  if (!opt.trace_out.empty()) write_file(opt.trace_out, wgl::trace_to_json(result->trace));
  if (!opt.certificate_out.empty())
    write_file(opt.certificate_out, wgl::to_json(*result->certificate));

  if (opt.json) {
    ordered_json j;
    j["command"] = "fixpoint";
    j["n"] = opt.n;
    j["var"] = opt.var;
    j["input"] = plain(a);
    j["method"] = method_used;
    j["fixed_point"] = plain(fixed);
    if (opt.simplify) j["simplified"] = plain(shown);
    if (result) {
      ordered_json stages = ordered_json::array();
      for (const auto& st : result->trace.stages)
        stages.push_back({{"label", st.label}, {"formula", plain(st.formula)}});
      j["trace"] = stages;
    }
    if (!opt.trace_out.empty()) j["trace_out"] = opt.trace_out;
    if (!opt.certificate_out.empty()) j["certificate_out"] = opt.certificate_out;
    emit_json(j);
  } else {
    std::cout << pretty(shown) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  unsigned n = 1;
  std::string var;
  std::string formula;
  std::string candidate;
  std::string method = "both";
  unsigned max_worlds = 3;
  bool json = false;
};

int run_verify(const VerifyOpts& opt) {
  wgl::Formula a = wgl::parse(read_formula_arg(opt.formula));
  wgl::Formula cand = wgl::parse(read_formula_arg(opt.candidate));
  if (wgl::atoms(cand).count(opt.var))
    return fail("verify: candidate contains the fixed-point variable '" + opt.var + "'");

  const bool do_cert = opt.method == "cert" || opt.method == "both";
  const bool do_kripke = opt.method == "kripke" || opt.method == "both";

  ordered_json j;
  j["command"] = "verify";
  j["n"] = opt.n;
  j["var"] = opt.var;
  j["formula"] = plain(a);
  j["candidate"] = plain(cand);
  j["method"] = opt.method;

  bool positive = false;
  bool refuted = false;
  std::vector<std::string> lines;

  if (do_cert) {
    std::string verdict;
    wgl::FixedPointResult constructed = wgl::fixed_point(a, opt.var, opt.n, true);
    if (constructed.fixed_point == cand) {
      wgl::CheckReport rep = wgl::check(*constructed.certificate);
      if (!rep.ok)
        return fail("internal error: constructed certificate rejected: " + rep.message);
      verdict = "certificate ok";
      positive = true;
      j["certificate_goal"] = plain(constructed.certificate->goal);
    } else {
      verdict = "no certificate strategy";
    }
    j["cert"] = verdict;
    lines.push_back("cert: " + verdict);
  }

  if (do_kripke) {
    wgl::Formula goal = wgl::Formula::iff(cand, wgl::substitute(a, opt.var, cand));
    std::optional<wgl::Countermodel> cm = wgl::countermodel(goal, opt.n, opt.max_worlds);
    if (cm) {
      refuted = true;
      std::string model_json = wgl::model_to_json(cm->model);
      j["kripke"] = {{"countermodel", ordered_json::parse(model_json)},
                     {"world", cm->world}};
      lines.push_back("kripke: countermodel found at world " + std::to_string(cm->world));
      lines.push_back(model_json.substr(0, model_json.size() - 1));
    } else {
      positive = true;
      j["kripke"] = "no countermodel <= " + std::to_string(opt.max_worlds) + " worlds";
      lines.push_back("kripke: no countermodel <= " + std::to_string(opt.max_worlds) + " worlds");
    }
  }

  const bool verified = positive && !refuted;
  j["verified"] = verified;

  if (opt.json) {
    emit_json(j);
  } else {
    for (const auto& line : lines) std::cout << line << "\n";
    std::cout << (verified ? "verified" : "not verified") << "\n";
  }
  return verified ? 0 : 1;
}

// ---------------------------------------------------------------------------
// check-cert

int run_check_cert(const std::string& file, bool json) {
  wgl::Certificate cert = wgl::certificate_from_json(read_text_input(file));
  wgl::CheckReport rep = wgl::check(cert);

  if (json) {
    ordered_json j;
    j["command"] = "check-cert";
    j["ok"] = rep.ok;
    j["logic_n"] = cert.logic_n;
    j["lines"] = cert.lines.size();
    j["goal"] = plain(cert.goal);
    if (!rep.ok) {
      j["line"] = rep.line;
      j["message"] = rep.message;
    }
    emit_json(j);
    return rep.ok ? 0 : 1;
  }
  if (rep.ok) {
    std::cout << "ok: " << pretty(cert.goal) << "\n";
    return 0;
  }
  std::cout << "rejected at line " << rep.line << ": " << rep.message << "\n";
  return 1;
}

// ---------------------------------------------------------------------------
// depths

int run_depths(const std::string& var, const std::string& formula_arg,
               std::optional<unsigned> mod, bool json) {
  wgl::Formula a = wgl::parse(read_formula_arg(formula_arg));
  std::set<unsigned> depths = wgl::dep(a, var);
  bool modalized = wgl::is_modalized(a, var);
  std::set<unsigned> residues;
  if (mod) residues = wgl::dep_mod(a, var, *mod);

  if (json) {
    ordered_json j;
    j["command"] = "depths";
    j["var"] = var;
    j["formula"] = plain(a);
    j["depths"] = depths;
    j["modalized"] = modalized;
    if (mod) {
      j["mod"] = *mod;
      j["residues"] = residues;
    }
    emit_json(j);
    return 0;
  }

  std::cout << "depths:";
  for (unsigned d : depths) std::cout << " " << d;
  std::cout << "\n";
  if (mod) {
    std::cout << "residues (mod " << *mod << "):";
    for (unsigned r : residues) std::cout << " [" << r << "]_" << *mod;
    std::cout << "\n";
  }
  std::cout << "modalized: " << (modalized ? "yes" : "no") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// countermodel

int run_countermodel(unsigned n, const std::string& formula_arg,
                     unsigned max_worlds, bool json) {
  wgl::Formula a = wgl::parse(read_formula_arg(formula_arg));
  std::optional<wgl::Countermodel> cm = wgl::countermodel(a, n, max_worlds);

  if (json) {
    ordered_json j;
    j["command"] = "countermodel";
    j["n"] = n;
    j["formula"] = plain(a);
    j["max_worlds"] = max_worlds;
    j["found"] = cm.has_value();
    if (cm) {
      j["model"] = ordered_json::parse(wgl::model_to_json(cm->model));
      j["world"] = cm->world;
    }
    emit_json(j);
    return 0;
  }
  if (cm) {
    std::cout << "countermodel found: fails at world " << cm->world << "\n";
    std::cout << wgl::model_to_json(cm->model);
  } else {
    std::cout << "no countermodel <= " << max_worlds << " worlds\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const CLI::Validator at_least_one = CLI::Range(1u, std::numeric_limits<unsigned>::max())
                                          .description("UINT >= 1");
  CLI::App app{"fixed points in the logics wGL_n = K + box(box^n p -> p) -> box p"};
  app.require_subcommand(1);

  FixpointOpts fx;
  CLI::App* fixpoint = app.add_subcommand(
      "fixpoint", "construct the fixed point of a formula modalized in a variable");
  fixpoint->add_option("--n", fx.n, "logic index n (>= 1)")
      ->required()
      ->check(at_least_one);
  fixpoint->add_option("--var", fx.var, "fixed-point variable")->required();
  fixpoint->add_option("--formula", fx.formula,
                       "formula text, @file, or - for stdin")->required();
  fixpoint->add_option("--method", fx.method, "construction method")
      ->check(CLI::IsMember({"auto", "loop", "shortcut"}))
      ->capture_default_str();
  fixpoint->add_flag("--simplify", fx.simplify, "simplify the printed fixed point");
  fixpoint->add_flag("--json", fx.json, "machine-readable output");
  fixpoint->add_option("--certificate-out", fx.certificate_out,
                       "write the equivalence certificate (JSON) to this file");
  fixpoint->add_option("--trace-out", fx.trace_out,
                       "write the construction trace (JSON) to this file");

  VerifyOpts vf;
  CLI::App* verify = app.add_subcommand(
      "verify", "check a candidate fixed point by certificate and/or countermodel search");
  verify->add_option("--n", vf.n, "logic index n (>= 1)")
      ->required()
      ->check(at_least_one);
  verify->add_option("--var", vf.var, "fixed-point variable")->required();
  verify->add_option("--formula", vf.formula, "formula text, @file, or - for stdin")
      ->required();
  verify->add_option("--candidate", vf.candidate, "candidate fixed point")->required();
  verify->add_option("--method", vf.method, "verification method")
      ->check(CLI::IsMember({"cert", "kripke", "both"}))
      ->capture_default_str();
  verify->add_option("--max-worlds", vf.max_worlds, "countermodel search bound (1-5)")
      ->check(CLI::Range(1u, 5u))
      ->capture_default_str();
  verify->add_flag("--json", vf.json, "machine-readable output");

  std::string cert_file;
  bool cc_json = false;
  CLI::App* check_cert =
      app.add_subcommand("check-cert", "validate a proof certificate (JSON)");
  check_cert->add_option("--file", cert_file, "certificate file, or - for stdin")
      ->required();
  check_cert->add_flag("--json", cc_json, "machine-readable output");

  std::string dp_var, dp_formula;
  unsigned dp_mod = 0;
  bool dp_json = false;
  CLI::App* depths =
      app.add_subcommand("depths", "report the modal depths of a variable");
  depths->add_option("--var", dp_var, "variable")->required();
  depths->add_option("--formula", dp_formula, "formula text, @file, or - for stdin")
      ->required();
  CLI::Option* mod_opt =
      depths->add_option("--mod", dp_mod, "also report depth residues modulo this")
          ->check(at_least_one);
  depths->add_flag("--json", dp_json, "machine-readable output");

  unsigned cm_n = 1, cm_max_worlds = 3;
  std::string cm_formula;
  bool cm_json = false;
  CLI::App* counterm = app.add_subcommand(
      "countermodel", "search for a model refuting a formula on validating frames");
  counterm->add_option("--n", cm_n, "logic index n (>= 1)")
      ->required()
      ->check(at_least_one);
  counterm->add_option("--formula", cm_formula, "formula text, @file, or - for stdin")
      ->required();
  counterm->add_option("--max-worlds", cm_max_worlds, "search bound (1-5)")
      ->check(CLI::Range(1u, 5u))
      ->capture_default_str();
  counterm->add_flag("--json", cm_json, "machine-readable output");

  try {
    app.parse(argc, argv);

    if (*fixpoint) {
      fx.var = checked_var(fx.var);
      if (fx.method == "shortcut" && (!fx.trace_out.empty() || !fx.certificate_out.empty()))
        throw CLI::ValidationError(
            "--method", "shortcut produces neither a trace nor a certificate");
      return run_fixpoint(fx);
    }
    if (*verify) {
      vf.var = checked_var(vf.var);
      return run_verify(vf);
    }
    if (*check_cert) return run_check_cert(cert_file, cc_json);
    if (*depths)
      return run_depths(checked_var(dp_var), dp_formula,
                        mod_opt->count() ? std::optional<unsigned>(dp_mod)
                                         : std::nullopt,
                        dp_json);
    if (*counterm) return run_countermodel(cm_n, cm_formula, cm_max_worlds, cm_json);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}
