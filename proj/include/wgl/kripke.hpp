#pragma once

// Finite Kripke models over the primitive modal language, extensional
// frame-level validation of the box(box^n p -> p) -> box p schema, and
// bounded countermodel search. Search results are advisory evidence only;
// theoremhood is asserted exclusively by the proof kernel.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgl/formula.hpp"

namespace wgl {

struct KripkeModel {
  // Worlds are 0 .. worlds-1.
  unsigned worlds = 1;
  // Accessibility relation as ordered pairs (source, target).
  std::vector<std::pair<unsigned, unsigned>> edges;
  // Variable name -> ascending list of worlds where it is true. Variables
  // absent from the map are unvalued; evaluating them is an error.
  std::map<std::string, std::vector<unsigned>> valuation;
};

// Standard satisfaction: falsum never holds, implication is classical, and
// box b holds at w iff b holds at every successor of w.
// Throws std::invalid_argument for an out-of-range world, an edge with an
// out-of-range endpoint, or a variable without a valuation entry.
bool forces(const KripkeModel& m, unsigned world, const Formula& a);

// True iff every valuation of the single schema variable (all 2^worlds
// subsets) satisfies box(box^n p -> p) -> box p at every world. For a
// one-variable schema this extensional check coincides with frame validity.
// Throws std::invalid_argument when worlds == 0 or worlds > bound.
bool frame_validates_wgl(unsigned worlds,
                         const std::vector<std::pair<unsigned, unsigned>>& edges,
                         unsigned n, unsigned bound = 6);

struct Countermodel {
  KripkeModel model;
  unsigned world = 0;  // where the formula fails
};

// Bounded refutation search: enumerate every relation on 1..max_worlds
// worlds (adjacency-bitmask order), keep the frames validating the logic,
// and scan all valuations of atoms(a) for a world falsifying a. Returns the
// first witness in enumeration order (world count, relation, valuation,
// world — all ascending), or absent. Absence is bounded evidence, not proof.
// Requires 1 <= max_worlds <= 5 and |atoms(a)| * max_worlds <= 16.
std::optional<Countermodel> countermodel(const Formula& a, unsigned n,
                                         unsigned max_worlds);

// {"worlds": k, "edges": [[i,j],...], "valuation": {"p": [i,...]}} with a
// trailing newline; edges lexicographic, valuation keys sorted, world lists
// ascending.
std::string model_to_json(const KripkeModel& m);

}  // namespace wgl
