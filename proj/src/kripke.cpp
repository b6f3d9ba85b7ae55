#include "wgl/kripke.hpp"

#include <json.hpp>

#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace wgl {

namespace {

using Mask = std::uint32_t;

Mask full_mask(unsigned worlds) { return (Mask(1) << worlds) - 1; }

// box X on the frame: the worlds whose successors all lie in X.
Mask box_set(const std::vector<Mask>& succ, Mask x) {
  Mask out = 0;
  for (unsigned w = 0; w < succ.size(); ++w)
    if ((succ[w] & ~x) == 0) out |= Mask(1) << w;
  return out;
}

std::vector<Mask> successor_masks(
    unsigned worlds, const std::vector<std::pair<unsigned, unsigned>>& edges,
    const char* who) {
  std::vector<Mask> succ(worlds, 0);
  for (const auto& [from, to] : edges) {
    if (from >= worlds || to >= worlds)
      throw std::invalid_argument(std::string(who) +
                                  ": edge endpoint out of range");
    succ[from] |= Mask(1) << to;
  }
  return succ;
}

// Set-valued evaluation over the formula DAG, memoized by node identity.
struct Evaluator {
  const std::vector<Mask>& succ;
  Mask full;
  const std::map<std::string, Mask>& valuation;
  std::unordered_map<const void*, Mask> memo;

  Mask eval(const Formula& f) {
    auto it = memo.find(f.id());
    if (it != memo.end()) return it->second;
    Mask out = 0;
    switch (f.kind()) {
      case Formula::Kind::Falsum:
        out = 0;
        break;
      case Formula::Kind::Var: {
        auto v = valuation.find(f.var_name());
        if (v == valuation.end())
          throw std::invalid_argument("forces: no valuation for variable '" +
                                      f.var_name() + "'");
        out = v->second;
        break;
      }
      case Formula::Kind::Implies:
        out = (~eval(f.left()) | eval(f.right())) & full;
        break;
      case Formula::Kind::Box:
        out = box_set(succ, eval(f.inner()));
        break;
    }
    memo.emplace(f.id(), out);
    return out;
  }
};

bool masks_validate_wgl(const std::vector<Mask>& succ, unsigned n) {
  const unsigned worlds = static_cast<unsigned>(succ.size());
  const Mask full = full_mask(worlds);
  for (Mask p = 0; p <= full; ++p) {
    Mask boxn = p;
    for (unsigned i = 0; i < n; ++i) boxn = box_set(succ, boxn);
    Mask antecedent = box_set(succ, (~boxn | p) & full);
    Mask axiom = (~antecedent | box_set(succ, p)) & full;
    if (axiom != full) return false;
  }
  return true;
}

void require_n(unsigned n) {
  if (n < 1) throw std::invalid_argument("logic index n must be >= 1");
}

}  // namespace

bool forces(const KripkeModel& m, unsigned world, const Formula& a) {
  if (m.worlds == 0 || m.worlds > 16)
    throw std::invalid_argument("forces: world count out of range (limit 16)");
  if (world >= m.worlds)
    throw std::invalid_argument("forces: world index out of range");
  std::vector<Mask> succ = successor_masks(m.worlds, m.edges, "forces");
  std::map<std::string, Mask> valuation;
  for (const auto& [name, where] : m.valuation) {
    Mask bits = 0;
    for (unsigned w : where) {
      if (w >= m.worlds)
        throw std::invalid_argument("forces: valuation world out of range");
      bits |= Mask(1) << w;
    }
    valuation[name] = bits;
  }
  Evaluator ev{succ, full_mask(m.worlds), valuation, {}};
  return (ev.eval(a) >> world) & 1;
}

bool frame_validates_wgl(
    unsigned worlds, const std::vector<std::pair<unsigned, unsigned>>& edges,
    unsigned n, unsigned bound) {
  require_n(n);
  if (worlds == 0 || worlds > bound)
    throw std::invalid_argument("frame_validates_wgl: world bound exceeded");
  return masks_validate_wgl(successor_masks(worlds, edges, "frame_validates_wgl"),
                            n);
}

std::optional<Countermodel> countermodel(const Formula& a, unsigned n,
                                         unsigned max_worlds) {
  require_n(n);
  if (max_worlds < 1 || max_worlds > 5)
    throw std::invalid_argument(
        "countermodel: max_worlds must be between 1 and 5");
  std::set<std::string> atom_set = atoms(a);
  std::vector<std::string> names(atom_set.begin(), atom_set.end());
  if (names.size() * max_worlds > 16)
    throw std::invalid_argument(
        "countermodel: too many atoms (|atoms| * max_worlds must be <= 16)");

  for (unsigned k = 1; k <= max_worlds; ++k) {
    const Mask full = full_mask(k);
    const std::uint64_t relations = std::uint64_t(1) << (k * k);
    for (std::uint64_t rel = 0; rel < relations; ++rel) {
      std::vector<Mask> succ(k, 0);
      for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j)
          if ((rel >> (i * k + j)) & 1) succ[i] |= Mask(1) << j;
      if (!masks_validate_wgl(succ, n)) continue;

      const std::uint64_t valuations = std::uint64_t(1)
                                       << (names.size() * k);
      for (std::uint64_t vm = 0; vm < valuations; ++vm) {
        std::map<std::string, Mask> valuation;
        for (std::size_t t = 0; t < names.size(); ++t)
          valuation[names[t]] =
              static_cast<Mask>((vm >> (t * k)) & full);
        Evaluator ev{succ, full, valuation, {}};
        Mask failing = full & ~ev.eval(a);
        if (!failing) continue;

        Countermodel witness;
        witness.model.worlds = k;
        for (unsigned i = 0; i < k; ++i)
          for (unsigned j = 0; j < k; ++j)
            if ((rel >> (i * k + j)) & 1) witness.model.edges.push_back({i, j});
        for (std::size_t t = 0; t < names.size(); ++t) {
          std::vector<unsigned>& where = witness.model.valuation[names[t]];
          for (unsigned w = 0; w < k; ++w)
            if ((valuation[names[t]] >> w) & 1) where.push_back(w);
        }
        unsigned w = 0;
        while (((failing >> w) & 1) == 0) ++w;
        witness.world = w;
        return witness;
      }
    }
  }
  return std::nullopt;
}

std::string model_to_json(const KripkeModel& m) {
  nlohmann::ordered_json doc;
  doc["worlds"] = m.worlds;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [from, to] : m.edges)
    edges.push_back(nlohmann::ordered_json::array({from, to}));
  doc["edges"] = std::move(edges);
  nlohmann::ordered_json valuation = nlohmann::ordered_json::object();
  for (const auto& [name, where] : m.valuation) valuation[name] = where;
  doc["valuation"] = std::move(valuation);
  return doc.dump() + "\n";
}

}  // namespace wgl
