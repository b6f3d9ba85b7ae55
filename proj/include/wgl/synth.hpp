#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgl/formula.hpp"
#include "wgl/kernel.hpp"

namespace wgl {

// One step of a synthesis run: a label like "B0", "B0'", "C1,1", "B2", "F"
// and the formula reached at that step.
struct TraceStage {
  std::string label;
  Formula formula;
};

struct SynthTrace {
  Formula input;
  unsigned n = 1;
  std::vector<TraceStage> stages;  // first = input, last = fixed point
};

// JSON array of {"label", "formula"} with sugar-free formula text;
// deterministic, newline-terminated.
std::string trace_to_json(const SynthTrace& trace);

struct FixedPointResult {
  Formula fixed_point;
  SynthTrace trace;
  // Checkable derivation of fixed_point <-> a(fixed_point), present when
  // requested.
  std::optional<Certificate> certificate;
};

// Replace every occurrence of p in box A whose depth is congruent to
// 0 mod n with true. Throws std::invalid_argument unless boxed is box-rooted.
Formula zero_instance(const Formula& boxed, const std::string& p, unsigned n);

// The k-shifting substitution sequence of box A: element 0 is boxed, and
// element i+1 replaces the occurrences of p at depth congruent to k + i
// (mod n) in element i with boxed. Returns elements 0..count (count >= 1).
std::vector<Formula> shifting_sequence(const Formula& boxed,
                                       const std::string& p, unsigned k,
                                       unsigned n, unsigned count);

// Fixed point of a box-rooted formula: run the staged construction
//   B_0 := boxed;  B_k' := zero_instance(B_k);
//   B_{k+1} := element k+1 of the (n-k-1)-shifting sequence of B_k'
// and return substitute(B_{n-1}, p, true) with the full stage trace. The
// depth profile of each B_k is checked against the loop invariant
// dep_mod(B_k, p, n) within {0..n-k-1} at runtime.
FixedPointResult boxed_fixed_point(const Formula& boxed, const std::string& p,
                                   unsigned n, bool want_cert = false);

// Shortcut fixed points for singleton depth profiles:
//   n = 1 or dep_mod(boxed, p, n) = {0}  ->  boxed[p := true]
//   dep_mod(boxed, p, n) = {i}, 0 < i<n  ->  n-fold composition at true
//   p absent                             ->  boxed itself
// anything else -> nullopt (use boxed_fixed_point).
std::optional<Formula> simple_fixed_point(const Formula& boxed,
                                          const std::string& p, unsigned n);

// Box-free skeleton over fresh hole variables plus the abstracted maximal
// boxed subformulas: substituting parts[i] for holes[i] in skeleton rebuilds
// the input. Identical parts share a hole; holes are numbered by leftmost
// occurrence. Throws std::invalid_argument when a is not modalized in p.
struct Decomposition {
  Formula skeleton;
  std::vector<std::string> holes;
  std::vector<Formula> parts;
};
Decomposition decompose(const Formula& a, const std::string& p);

// Solutions of the system  f_i <-> system[i](f_1, ..., f_m)  where the
// unknowns are vars[i] (one per equation). certificates[i] proves the i-th
// equation when want_cert is set; stages records the inner synthesis runs
// ("sys1." ... prefixes).
struct SimultaneousResult {
  std::vector<Formula> fixed_points;
  std::vector<Certificate> certificates;  // empty unless want_cert
  std::vector<TraceStage> stages;
};
SimultaneousResult simultaneous_fixed_points(const std::vector<Formula>& system,
                                             const std::vector<std::string>& vars,
                                             unsigned n,
                                             bool want_cert = false);

// Fixed point of an arbitrary formula modalized in p: decompose into a
// box-free skeleton over boxed parts, solve the induced system, and apply the
// skeleton to the solutions. Box-rooted inputs run the staged construction
// directly. Certificates are kernel-checked before being returned.
FixedPointResult fixed_point(const Formula& a, const std::string& p,
                             unsigned n, bool want_cert = false);

// Certificate for a previously computed fixed point: re-runs the
// deterministic construction and validates that it reproduces the given
// result (fixed point and trace). Throws std::invalid_argument when the
// recorded result is inconsistent with `a`.
Certificate derive_fixed_point_cert(const Formula& a, const std::string& p,
                                    const FixedPointResult& result,
                                    unsigned n);

}  // namespace wgl
