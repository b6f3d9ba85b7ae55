#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wgl/formula.hpp"

namespace wgl {

// Set of modal depths at which variable p occurs in a:
//   dep(p, p)        = {0}
//   dep(a, p)        = {}            for falsum and other variables
//   dep(x -> y, p)   = dep(x, p) ∪ dep(y, p)
//   dep(box x, p)    = {d + 1 : d in dep(x, p)}
std::set<unsigned> dep(const Formula& a, const std::string& p);

// Residues of dep(a, p) modulo n (n >= 1).
std::set<unsigned> dep_mod(const Formula& a, const std::string& p, unsigned n);

// Every occurrence of p lies under at least one box, i.e. 0 is not in dep.
bool is_modalized(const Formula& a, const std::string& p);

// Occurrences of p whose depth is congruent to r modulo n (0 <= r < n),
// in left-to-right order.
std::vector<OccurrencePath> occurrences_by_residue(const Formula& a,
                                                   const std::string& p,
                                                   unsigned r, unsigned n);

// Combined report used by the CLI.
struct DepthProfile {
  std::set<unsigned> depths;
  std::optional<unsigned> modulus;
  std::set<unsigned> residues;  // empty unless modulus is set
  bool modalized = false;
};

DepthProfile depth_profile(const Formula& a, const std::string& p,
                           std::optional<unsigned> modulus = std::nullopt);

}  // namespace wgl
