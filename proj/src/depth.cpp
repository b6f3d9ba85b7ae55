#include "wgl/depth.hpp"

#include <stdexcept>
#include <unordered_map>

namespace wgl {

namespace {

const std::set<unsigned>& dep_memo(const Formula& a, const std::string& p,
                                   std::unordered_map<const void*, std::set<unsigned>>& memo) {
  auto it = memo.find(a.id());
  if (it != memo.end()) return it->second;
  std::set<unsigned> result;
  switch (a.kind()) {
    case Formula::Kind::Falsum:
      break;
    case Formula::Kind::Var:
      if (a.var_name() == p) result.insert(0);
      break;
    case Formula::Kind::Implies: {
      const auto& l = dep_memo(a.left(), p, memo);
      const auto& r = dep_memo(a.right(), p, memo);
      result = l;
      result.insert(r.begin(), r.end());
      break;
    }
    case Formula::Kind::Box:
      for (unsigned d : dep_memo(a.inner(), p, memo)) result.insert(d + 1);
      break;
  }
  return memo.emplace(a.id(), std::move(result)).first->second;
}

}  // namespace

std::set<unsigned> dep(const Formula& a, const std::string& p) {
  std::unordered_map<const void*, std::set<unsigned>> memo;
  return dep_memo(a, p, memo);
}

std::set<unsigned> dep_mod(const Formula& a, const std::string& p, unsigned n) {
  if (n == 0) throw std::invalid_argument("dep_mod requires n >= 1");
  std::set<unsigned> result;
  for (unsigned d : dep(a, p)) result.insert(d % n);
  return result;
}

bool is_modalized(const Formula& a, const std::string& p) {
  return dep(a, p).count(0) == 0;
}

std::vector<OccurrencePath> occurrences_by_residue(const Formula& a,
                                                   const std::string& p,
                                                   unsigned r, unsigned n) {
  if (n == 0) throw std::invalid_argument("occurrences_by_residue requires n >= 1");
  if (r >= n)
    throw std::invalid_argument("occurrences_by_residue requires 0 <= r < n");
  std::vector<OccurrencePath> result;
  for (OccurrencePath& occ : occurrences(a, p))
    if (occ.depth % n == r) result.push_back(std::move(occ));
  return result;
}

DepthProfile depth_profile(const Formula& a, const std::string& p,
                           std::optional<unsigned> modulus) {
  DepthProfile profile;
  profile.depths = dep(a, p);
  profile.modalized = profile.depths.count(0) == 0;
  if (modulus) {
    if (*modulus == 0) throw std::invalid_argument("modulus must be >= 1");
    profile.modulus = modulus;
    for (unsigned d : profile.depths) profile.residues.insert(d % *modulus);
  }
  return profile;
}

}  // namespace wgl
