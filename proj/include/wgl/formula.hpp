#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wgl {

// Modal formulas over the primitive connectives: falsum, implication, box.
// Everything else (true, ~, &, |, <->, dia) is surface syntax that desugars
// on construction and is re-recognized by the printer.
//
// Values are immutable and interned: content-equal formulas share one node,
// so equality is O(1), content hashes are precomputed, and substitution
// results reuse unchanged structure (shared_ptr DAG-as-tree).
class Formula {
 public:
  enum class Kind : std::uint8_t { Falsum, Var, Implies, Box };

  Formula();  // falsum

  static Formula falsum();
  static Formula var(const std::string& name);
  static Formula implies(const Formula& lhs, const Formula& rhs);
  static Formula box(const Formula& inner);

  // Derived connectives (desugar immediately):
  //   true   := false -> false
  //   ~a     := a -> false
  //   a & b  := (a -> (b -> false)) -> false
  //   a | b  := (a -> false) -> b
  //   a <-> b:= ((a -> b) -> ((b -> a) -> false)) -> false
  //   dia a  := box (a -> false) -> false
  static Formula verum();
  static Formula neg(const Formula& a);
  static Formula conj(const Formula& a, const Formula& b);
  static Formula disj(const Formula& a, const Formula& b);
  static Formula iff(const Formula& a, const Formula& b);
  static Formula dia(const Formula& a);

  Kind kind() const;
  const std::string& var_name() const;  // Var only
  Formula left() const;                 // Implies only
  Formula right() const;                // Implies only
  Formula inner() const;                // Box only

  bool is_falsum() const { return kind() == Kind::Falsum; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_implies() const { return kind() == Kind::Implies; }
  bool is_box() const { return kind() == Kind::Box; }

  std::size_t hash() const;
  std::uint64_t tree_size() const;  // node count of the unshared tree

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  // Stable identity of the shared node; content-equal formulas share it, so
  // it is a complete memoization key for the lifetime of any holder.
  const void* id() const;

  struct Node;  // implementation detail, defined in formula.cpp

 private:
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// Sugar recognizers (exact inverse images of the desugarings above).
std::optional<std::pair<Formula, Formula>> match_iff(const Formula& f);
std::optional<std::pair<Formula, Formula>> match_and(const Formula& f);
std::optional<Formula> match_neg(const Formula& f);
std::optional<Formula> match_dia(const Formula& f);
bool is_verum(const Formula& f);

// ---------------------------------------------------------------------------
// Parsing / printing

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParseOptions {
  // Identifiers beginning with '_' are reserved for machine-generated
  // variables; public input rejects them unless this is set.
  bool allow_reserved = false;
};

Formula parse(const std::string& text, const ParseOptions& opts = {});

struct PrintOptions {
  bool sugar = true;  // false: primitive connectives only
};

std::string to_text(const Formula& f, const PrintOptions& opts = {});

// ---------------------------------------------------------------------------
// Structural operations

// One occurrence of a variable: child-selector path from the root plus the
// number of boxes strictly above the occurrence.
struct OccurrencePath {
  enum class Step : std::uint8_t { Left, Right, Inner };
  std::vector<Step> path;
  unsigned depth = 0;

  bool operator==(const OccurrencePath& o) const {
    return depth == o.depth && path == o.path;
  }
  bool operator<(const OccurrencePath& o) const {
    return path != o.path ? path < o.path : depth < o.depth;
  }
};

// Capture-free by construction: variables are the only binders-free atoms.
Formula substitute(const Formula& a, const std::string& p, const Formula& b);

// Sequential substitution a[ps[0]:=bs[0]][ps[1]:=bs[1]]...
Formula substitute_all(const Formula& a, const std::vector<std::string>& ps,
                       const std::vector<Formula>& bs);

// All occurrences of variable p in a, in left-to-right (preorder) order.
std::vector<OccurrencePath> occurrences(const Formula& a, const std::string& p);

// Subformula at a path; throws std::invalid_argument on a dangling path.
Formula formula_at(const Formula& a, const OccurrencePath& occ);

// Replace exactly the listed occurrences by b. Every path must resolve to a
// variable node and all paths must name the same variable.
Formula substitute_at(const Formula& a, const std::vector<OccurrencePath>& occs,
                      const Formula& b);

// box^k a (k = 0 gives a).
Formula box_power(unsigned k, const Formula& a);

// boxdot(k, a)       = box a & box^2 a & ... & box^k a          (k >= 1)
// boxdot(k, a, true) = a & box a & ... & box^k a                (k >= 1)
// Conjunctions associate to the right: x1 & (x2 & (... & xk)).
Formula boxdot(unsigned k, const Formula& a, bool with_self = false);

// iterate(a, p, k) = a[p := a[p := ... a ... ]] with k copies; k = 0 gives p.
Formula iterate(const Formula& a, const std::string& p, unsigned k);

// Right-associated conjunction x1 & (x2 & (... & xk)); requires k >= 1.
Formula conj_chain(const std::vector<Formula>& parts);

// dia^k a (k = 0 gives a).
Formula dia_power(unsigned k, const Formula& a);

std::set<std::string> atoms(const Formula& a);
bool has_var(const Formula& a, const std::string& p);

// One bottom-up pass of the rewrite rules
//   false -> Y   ~> true        X -> true  ~> true      true -> Y ~> Y
//   ~~X          ~> X           box true   ~> true
// (children first, then the rules at the rebuilt node).
Formula simplify(const Formula& a);

}  // namespace wgl
