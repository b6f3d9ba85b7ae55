#include "wgl/synth.hpp"

#include <json.hpp>

#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "wgl/depth.hpp"
#include "wgl/derive.hpp"

namespace wgl {

namespace {

void require_boxed(const Formula& f, const char* who) {
  if (!f.is_box())
    throw std::invalid_argument(std::string(who) +
                                ": input must have an outermost box");
}

void require_n(unsigned n) {
  if (n < 1) throw std::invalid_argument("logic index n must be >= 1");
}

// Variable named prefix<i> not occurring in any of the given formulas.
std::string fresh_var(const std::string& prefix,
                      const std::vector<Formula>& avoid) {
  std::set<std::string> used;
  for (const Formula& f : avoid)
    for (const std::string& name : atoms(f)) used.insert(name);
  for (unsigned i = 0;; ++i) {
    std::string candidate = prefix + std::to_string(i);
    if (!used.count(candidate)) return candidate;
  }
}

bool profile_within(const std::set<unsigned>& residues, unsigned hi) {
  for (unsigned r : residues)
    if (r > hi) return false;
  return true;
}

// One construction round: B_k, its 0-instance B_k', and the consumed prefix
// of the (n-k-1)-shifting sequence of B_k' (elements 0..k+1).
struct Round {
  unsigned k = 0;
  Formula bk;
  Formula bkp;
  std::vector<Formula> elems;
};

// Derivation of f <-> boxed(f) replaying the construction bottom-up:
// the innermost stage is an unfolding at the top fixed point; each round is
// undone by the substitution-sequence argument (Loeb rule) followed by the
// 0-instance argument (another unfolding plus congruence).
Certificate descend_certificate(const Formula& boxed, const std::string& p,
                                unsigned n, const Formula& f,
                                const std::vector<Round>& rounds,
                                const Formula& last_stage) {
  CertBuilder b(n);
  const std::string qv = fresh_var("_q", {boxed, f});
  CertBuilder::LineId line;

  if (!has_var(last_stage, p)) {
    line = b.taut(Formula::iff(f, f));
  } else {
    line = b.unfold(last_stage.inner(), p);
  }

  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it) {
    const Round& r = *it;
    // line: f <-> B_{k+1}(f). First recover f <-> B_k'(f).
    Formula xf = substitute(r.bkp, p, f);
    Formula e = Formula::iff(f, xf);
    std::vector<CertBuilder::LineId> hops;
    for (std::size_t j = 0; j + 1 < r.elems.size(); ++j) {
      unsigned residue = (n - r.k - 1 + static_cast<unsigned>(j)) % n;
      std::vector<OccurrencePath> occs =
          occurrences_by_residue(r.elems[j], p, residue, n);
      if (occs.empty()) continue;  // this step changed nothing
      Formula holed = substitute_at(r.elems[j], occs, Formula::var(qv));
      Formula context = substitute(holed.inner(), p, f);
      hops.push_back(
          b.subst(CertBuilder::SubstKind::Box, context, {qv}, {{f, xf}}));
    }
    if (!hops.empty()) {
      Formula last = substitute(r.elems.back(), p, f);
      CertBuilder::LineId chain = b.taut_chain(
          Formula::implies(boxdot(n, e), Formula::iff(xf, last)), hops);
      CertBuilder::LineId pre =
          b.taut_chain(Formula::implies(boxdot(n, e), e), {chain, line});
      line = b.lob(pre);
    }
    // line: f <-> B_k'(f). Now recover f <-> B_k(f).
    std::vector<OccurrencePath> occs0 = occurrences_by_residue(r.bk, p, 0, n);
    if (!occs0.empty()) {
      Formula holed = substitute_at(r.bk, occs0, Formula::var(qv));
      Formula body = substitute(holed.inner(), p, f);
      CertBuilder::LineId g1 = b.unfold(body, qv);
      CertBuilder::LineId flipped = b.taut_chain(Formula::iff(xf, f), {line});
      CertBuilder::LineId g2 =
          b.congruence(Formula::box(body), qv, flipped);
      line = b.taut_chain(Formula::iff(f, substitute(r.bk, p, f)),
                          {line, g1, g2});
    }
  }

  Formula goal = Formula::iff(f, substitute(boxed, p, f));
  if (b.formula(line) != goal)
    throw std::logic_error("internal synthesis error: certificate drift");
  return b.certificate(goal);
}

std::vector<TraceStage> prefixed(const std::string& prefix,
                                 const std::vector<TraceStage>& stages) {
  std::vector<TraceStage> out;
  out.reserve(stages.size());
  for (const TraceStage& s : stages)
    out.push_back(TraceStage{prefix + s.label, s.formula});
  return out;
}

// The builder is untrusted; re-check its output before handing it out.
void kernel_check(const Certificate& cert) {
  CheckReport report = check(cert);
  if (!report.ok)
    throw std::logic_error("internal synthesis error: certificate rejected: " +
                           report.message);
}

void check_hygiene(const Formula& input, const std::string& p,
                   const Formula& f) {
  if (has_var(f, p))
    throw std::logic_error("internal synthesis error: variable survives in "
                           "the fixed point");
  std::set<std::string> allowed = atoms(input);
  allowed.erase(p);
  for (const std::string& name : atoms(f))
    if (!allowed.count(name))
      throw std::logic_error(
          "internal synthesis error: foreign atom in the fixed point: " +
          name);
}

}  // namespace

std::string trace_to_json(const SynthTrace& trace) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const TraceStage& stage : trace.stages) {
    nlohmann::ordered_json item;
    item["label"] = stage.label;
    item["formula"] = to_text(stage.formula, PrintOptions{false});
    arr.push_back(std::move(item));
  }
  return arr.dump() + "\n";
}

Formula zero_instance(const Formula& boxed, const std::string& p, unsigned n) {
  require_boxed(boxed, "zero_instance");
  require_n(n);
  std::vector<OccurrencePath> occs = occurrences_by_residue(boxed, p, 0, n);
  if (occs.empty()) return boxed;
  return substitute_at(boxed, occs, Formula::verum());
}

std::vector<Formula> shifting_sequence(const Formula& boxed,
                                       const std::string& p, unsigned k,
                                       unsigned n, unsigned count) {
  require_boxed(boxed, "shifting_sequence");
  require_n(n);
  if (count < 1)
    throw std::invalid_argument("shifting_sequence: count must be >= 1");
  std::vector<Formula> elems;
  elems.reserve(count + 1);
  elems.push_back(boxed);
  for (unsigned i = 0; i < count; ++i) {
    unsigned residue = (k + i) % n;
    std::vector<OccurrencePath> occs =
        occurrences_by_residue(elems.back(), p, residue, n);
    if (occs.empty()) {
      elems.push_back(elems.back());
    } else {
      elems.push_back(substitute_at(elems.back(), occs, boxed));
    }
  }
  return elems;
}

FixedPointResult boxed_fixed_point(const Formula& boxed, const std::string& p,
                                   unsigned n, bool want_cert) {
  require_boxed(boxed, "boxed_fixed_point");
  require_n(n);

  FixedPointResult result;
  result.trace.input = boxed;
  result.trace.n = n;
  result.trace.stages.push_back(TraceStage{"B0", boxed});

  if (!has_var(boxed, p)) {
    result.fixed_point = boxed;
    result.trace.stages.push_back(TraceStage{"F", boxed});
    if (want_cert) {
      CertBuilder b(n);
      b.taut(Formula::iff(boxed, boxed));
      result.certificate = b.certificate(Formula::iff(boxed, boxed));
    }
    return result;
  }

  std::vector<Round> rounds;
  Formula stage = boxed;
  for (unsigned k = 0; k + 1 < n; ++k) {
    Round round;
    round.k = k;
    round.bk = stage;
    round.bkp = zero_instance(stage, p, n);
    result.trace.stages.push_back(
        TraceStage{"B" + std::to_string(k) + "'", round.bkp});
    round.elems = shifting_sequence(round.bkp, p, n - k - 1, n, k + 1);
    for (unsigned i = 1; i <= k; ++i)
      result.trace.stages.push_back(TraceStage{
          "C" + std::to_string(k) + "," + std::to_string(i), round.elems[i]});
    stage = round.elems[k + 1];
    result.trace.stages.push_back(
        TraceStage{"B" + std::to_string(k + 1), stage});
    if (!profile_within(dep_mod(stage, p, n), n - k - 2))
      throw std::logic_error(
          "internal synthesis error: stage depth profile violates the loop "
          "invariant");
    rounds.push_back(std::move(round));
  }

  result.fixed_point = substitute(stage, p, Formula::verum());
  result.trace.stages.push_back(TraceStage{"F", result.fixed_point});
  check_hygiene(boxed, p, result.fixed_point);

  if (want_cert) {
    result.certificate =
        descend_certificate(boxed, p, n, result.fixed_point, rounds, stage);
    kernel_check(*result.certificate);
  }
  return result;
}

std::optional<Formula> simple_fixed_point(const Formula& boxed,
                                          const std::string& p, unsigned n) {
  require_boxed(boxed, "simple_fixed_point");
  require_n(n);
  if (!has_var(boxed, p)) return boxed;
  if (n == 1) return substitute(boxed, p, Formula::verum());
  std::set<unsigned> profile = dep_mod(boxed, p, n);
  if (profile == std::set<unsigned>{0})
    return substitute(boxed, p, Formula::verum());
  if (profile.size() == 1)
    return substitute(iterate(boxed, p, n), p, Formula::verum());
  return std::nullopt;
}

Decomposition decompose(const Formula& a, const std::string& p) {
  if (!is_modalized(a, p))
    throw std::invalid_argument("decompose: formula is not modalized in " + p);

  Decomposition out;
  std::unordered_map<Formula, std::size_t, FormulaHash> index;
  std::set<std::string> used = atoms(a);
  unsigned counter = 0;
  auto hole_for = [&](const Formula& part) -> Formula {
    auto it = index.find(part);
    if (it == index.end()) {
      std::string name;
      do {
        name = "_fp" + std::to_string(counter++);
      } while (used.count(name));
      it = index.emplace(part, out.parts.size()).first;
      out.holes.push_back(name);
      out.parts.push_back(part);
    }
    return Formula::var(out.holes[it->second]);
  };

  // Box-free skeleton: abstract each maximal boxed subformula in preorder.
  auto rec = [&](auto&& self, const Formula& f) -> Formula {
    switch (f.kind()) {
      case Formula::Kind::Falsum:
      case Formula::Kind::Var:
        return f;
      case Formula::Kind::Box:
        return hole_for(f);
      case Formula::Kind::Implies: {
        // Sequence the recursion: argument evaluation order is unspecified,
        // and hole numbering must follow leftmost first occurrence.
        Formula left = self(self, f.left());
        Formula right = self(self, f.right());
        return Formula::implies(left, right);
      }
    }
    throw std::logic_error("unreachable");
  };
  out.skeleton = rec(rec, a);
  return out;
}

SimultaneousResult simultaneous_fixed_points(
    const std::vector<Formula>& system, const std::vector<std::string>& vars,
    unsigned n, bool want_cert) {
  require_n(n);
  if (system.empty())
    throw std::invalid_argument("simultaneous_fixed_points: empty system");
  if (system.size() != vars.size())
    throw std::invalid_argument(
        "simultaneous_fixed_points: need exactly one unknown per equation");
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j])
        throw std::invalid_argument(
            "simultaneous_fixed_points: unknowns must be distinct");
  for (const Formula& f : system) require_boxed(f, "simultaneous_fixed_points");

  std::size_t m = system.size();
  SimultaneousResult out;
  if (m == 1) {
    FixedPointResult r = boxed_fixed_point(system[0], vars[0], n, want_cert);
    out.fixed_points.push_back(r.fixed_point);
    if (want_cert) out.certificates.push_back(std::move(*r.certificate));
    out.stages = prefixed("sys1.", r.trace.stages);
    return out;
  }

  // Solve the leading subsystem with the last unknown as a parameter.
  std::vector<Formula> head(system.begin(), system.end() - 1);
  std::vector<std::string> head_vars(vars.begin(), vars.end() - 1);
  SimultaneousResult rec = simultaneous_fixed_points(head, head_vars, n,
                                                     want_cert);

  // Compose the last equation over the parametric solutions and close it.
  Formula composed = substitute_all(system.back(), head_vars,
                                    rec.fixed_points);
  FixedPointResult last =
      boxed_fixed_point(composed, vars.back(), n, want_cert);
  const Formula& f = last.fixed_point;

  out.stages = std::move(rec.stages);
  std::vector<TraceStage> tail =
      prefixed("sys" + std::to_string(m) + ".", last.trace.stages);
  out.stages.insert(out.stages.end(), tail.begin(), tail.end());

  for (std::size_t i = 0; i + 1 < m; ++i) {
    out.fixed_points.push_back(substitute(rec.fixed_points[i], vars.back(), f));
    if (want_cert)
      out.certificates.push_back(
          cert_instantiate(rec.certificates[i], vars.back(), f));
  }
  out.fixed_points.push_back(f);
  if (want_cert) out.certificates.push_back(std::move(*last.certificate));
  return out;
}

FixedPointResult fixed_point(const Formula& a, const std::string& p,
                             unsigned n, bool want_cert) {
  require_n(n);
  if (!is_modalized(a, p))
    throw std::invalid_argument("fixed_point: formula is not modalized in " +
                                p);

  if (a.is_box()) return boxed_fixed_point(a, p, n, want_cert);

  FixedPointResult result;
  result.trace.input = a;
  result.trace.n = n;
  result.trace.stages.push_back(TraceStage{"A", a});

  if (!has_var(a, p)) {
    result.fixed_point = a;
    result.trace.stages.push_back(TraceStage{"F", a});
    if (want_cert) {
      CertBuilder b(n);
      b.taut(Formula::iff(a, a));
      result.certificate = b.certificate(Formula::iff(a, a));
    }
    return result;
  }

  Decomposition dec = decompose(a, p);
  std::vector<Formula> system;
  system.reserve(dec.parts.size());
  for (const Formula& part : dec.parts)
    system.push_back(substitute(part, p, dec.skeleton));

  SimultaneousResult sol =
      simultaneous_fixed_points(system, dec.holes, n, want_cert);

  Formula f = substitute_all(dec.skeleton, dec.holes, sol.fixed_points);
  result.fixed_point = f;
  result.trace.stages.insert(result.trace.stages.end(), sol.stages.begin(),
                             sol.stages.end());
  result.trace.stages.push_back(TraceStage{"F", f});
  check_hygiene(a, p, f);

  if (want_cert) {
    CertBuilder b(n);
    std::vector<CertBuilder::LineId> congruences;
    for (std::size_t i = 0; i < dec.parts.size(); ++i) {
      CertBuilder::LineId eq = b.import_certificate(sol.certificates[i]);
      // Context: skeleton with earlier holes already rewritten to the
      // substituted parts and later holes still holding the solutions.
      Formula context = dec.skeleton;
      for (std::size_t j = 0; j < dec.parts.size(); ++j) {
        if (j == i) continue;
        context = substitute(context, dec.holes[j],
                             j < i ? substitute(dec.parts[j], p, f)
                                   : sol.fixed_points[j]);
      }
      congruences.push_back(b.congruence(context, dec.holes[i], eq));
    }
    Formula goal = Formula::iff(f, substitute(a, p, f));
    b.taut_chain(goal, congruences);
    result.certificate = b.certificate(goal);
    kernel_check(*result.certificate);
  }
  return result;
}

Certificate derive_fixed_point_cert(const Formula& a, const std::string& p,
                                    const FixedPointResult& result,
                                    unsigned n) {
  FixedPointResult fresh = fixed_point(a, p, n, true);
  bool consistent = fresh.fixed_point == result.fixed_point &&
                    fresh.trace.n == result.trace.n &&
                    fresh.trace.stages.size() == result.trace.stages.size();
  for (std::size_t i = 0; consistent && i < fresh.trace.stages.size(); ++i)
    consistent = fresh.trace.stages[i].label == result.trace.stages[i].label &&
                 fresh.trace.stages[i].formula == result.trace.stages[i].formula;
  if (!consistent)
    throw std::invalid_argument(
        "derive_fixed_point_cert: recorded trace is inconsistent with the "
        "deterministic construction for this input");
  return std::move(*fresh.certificate);
}

}  // namespace wgl
