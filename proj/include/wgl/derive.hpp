#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wgl/formula.hpp"
#include "wgl/kernel.hpp"

namespace wgl {

// Untrusted certificate construction. Every high-level step expands into
// primitive kernel lines (Taut / AxK / AxWGL / MP / Nec); nothing here is
// assumed correct until the kernel re-checks the finished certificate.
//
// Lines are deduplicated by formula content: emitting a formula that is
// already present returns the existing line, which keeps certificate sizes
// roughly proportional to the number of distinct statements derived.
class CertBuilder {
 public:
  using LineId = std::uint32_t;

  explicit CertBuilder(unsigned n);

  unsigned logic_n() const { return n_; }
  std::size_t line_count() const { return lines_.size(); }
  const Formula& formula(LineId id) const;

  // ---- primitive rules -----------------------------------------------------

  // Propositional tautology line. Throws std::logic_error if the formula is
  // not a tautology (catching combinator bugs at emission time).
  LineId taut(const Formula& f);
  LineId ax_k(const Formula& x, const Formula& y);   // box(x->y)->(box x->box y)
  LineId ax_wgl(const Formula& x);                   // box(box^n x->x)->box x
  LineId mp(LineId antecedent, LineId implication);
  LineId nec(LineId premise);

  // ---- derived steps (each expands into primitive lines) --------------------

  // goal follows propositionally from the premise lines: emits the curried
  // tautology premise_1 -> (premise_2 -> ... -> goal) and discharges it.
  LineId taut_chain(const Formula& goal, const std::vector<LineId>& premises);

  // From |- x -> y derive |- box^k x -> box^k y.
  LineId regularity(LineId implication, unsigned k = 1);

  // |- box(x <-> y) -> (box x <-> box y)
  LineId box_iff_over(const Formula& x, const Formula& y);

  // From |- x <-> y derive |- box x <-> box y.
  LineId box_both(LineId equivalence);

  // |- (box x1 & ... & box xk) -> box (x1 & ... & xk)     (k >= 1)
  LineId collect_boxes(const std::vector<Formula>& parts);

  // |- box a -> box^{n+1} a
  LineId trans_step(const Formula& a);

  // From |- x <-> y derive |- C(x) <-> C(y), where C is `context` with the
  // variable `hole` marking the replacement positions.
  LineId congruence(const Formula& context, const std::string& hole,
                    LineId equivalence);

  // From |- (box a & ... & box^n a) -> a derive |- a.
  LineId lob(LineId premise);

  // From |- box^n a -> (a <-> b) derive |- box a <-> box b.
  LineId equiv_box(LineId premise);

  // From |- x -> y derive |- dia x -> dia y.
  LineId dia_mono(LineId implication);

  // |- dia^k x & box^k y -> dia^k (x & y)                 (k >= 1)
  LineId dia_box_merge(unsigned k, const Formula& x, const Formula& y);

  // |- dia^k x <-> ~box^k ~x                              (k >= 1)
  LineId dia_negbox(unsigned k, const Formula& x);

  // Substitution-congruence schemes, graded by the depth profile of the
  // context C (holes are variables; one (A, B) pair per hole):
  //   Plus:      |- bd+_n(E) -> (C(As) <-> C(Bs))
  //   Box:       |- bd_n(E)  -> (box C(As) <-> box C(Bs))
  //   Residue:   |- box^i E  -> (C(A) <-> C(B))   [dep_n(C,hole) = {[i]}, 0<i<n]
  //   Modalized: |- box^n E  -> (C(A) <-> C(B))   [dep_n(C,hole) = {[0]}, modalized]
  // where E is the conjunction of the equivalences A_j <-> B_j,
  // bd_n(E) = box E & ... & box^n E and bd+_n(E) = E & bd_n(E).
  // Residue and Modalized accept exactly one hole.
  enum class SubstKind : std::uint8_t { Plus, Box, Residue, Modalized };
  LineId subst(SubstKind kind, const Formula& context,
               const std::vector<std::string>& holes,
               const std::vector<std::pair<Formula, Formula>>& pairs);

  // |- box U(T) <-> box U(box U(T)), where U(q) = `body`, T = U[q := true],
  // for bodies with dep_n(box body, q) = {[0]_n}.
  LineId unfold(const Formula& body, const std::string& hole);

  // Splice a finished certificate (same n) into this builder; returns the
  // line holding its goal.
  LineId import_certificate(const Certificate& cert);

  // Snapshot as a kernel certificate with the given goal. The goal must have
  // been derived; it is re-appended if it is not already the final line.
  Certificate certificate(const Formula& goal) const;

 private:
  LineId emit(const Formula& f, Rule rule, std::vector<std::uint32_t> premises);

  unsigned n_;
  std::vector<ProofLine> lines_;
  std::unordered_map<Formula, LineId, FormulaHash> index_;
};

// ---------------------------------------------------------------------------
// Standalone certificate producers (library entry points)

// |- box a -> box^{n+1} a
Certificate derive_trans(const Formula& a, unsigned n);

// From a certificate of x -> y, derive box^k x -> box^k y.
Certificate derive_regularity(const Certificate& premise, unsigned k);

// Substitution lemmas; see CertBuilder::subst for the shapes and
// side conditions. Throws std::invalid_argument when the context's depth
// profile violates the side condition (the message reports the profile).
Certificate derive_subst(CertBuilder::SubstKind kind, const Formula& context,
                         const std::vector<std::string>& holes,
                         const std::vector<std::pair<Formula, Formula>>& pairs,
                         unsigned n);

// From a certificate of (box a & ... & box^n a) -> a, derive a.
Certificate derive_lob(const Certificate& premise);

// From a certificate of box^n a -> (a <-> b), derive box a <-> box b.
Certificate derive_equiv_box(const Certificate& premise);

// Uniform substitution of a formula for a variable in every line (and the
// goal). Preserves checkability.
Certificate cert_instantiate(const Certificate& cert, const std::string& var,
                             const Formula& replacement);

// Worked equivalence of the two fixed points of box box ~p over n = 3:
// |- box^2 dia^2 true <-> box^2 dia^2 box^2 false.
Certificate derive_wgl3_two_fixed_points_equal();

}  // namespace wgl
