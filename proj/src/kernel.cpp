#include "wgl/kernel.hpp"

#include <json.hpp>

#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace wgl {

// ---------------------------------------------------------------------------
// Tautology checking
//
// The Boolean abstraction maps falsum to the constant, implications to the
// connective, and everything else (variables and boxed formulas) to atoms
// keyed by structural content. The abstracted skeleton is evaluated on all
// assignments with 64 assignments per pass over a CSE'd op array.

namespace {

constexpr int kAtomBudget = 24;

struct Skeleton {
  enum class OpKind : std::uint8_t { False, Atom, Imp };
  struct Op {
    OpKind kind;
    int a = 0;  // atom index / left operand
    int b = 0;  // right operand
  };
  std::vector<Op> ops;
  int root = 0;
  int atom_count = 0;
};

struct SkeletonBuilder {
  Skeleton sk;
  std::unordered_map<const void*, int> by_node;
  std::unordered_map<Formula, int, FormulaHash> atom_ids;
  std::unordered_map<std::uint64_t, int> cse;

  int op(Skeleton::OpKind kind, int a, int b) {
    std::uint64_t key = (static_cast<std::uint64_t>(kind) << 60) |
                        (static_cast<std::uint64_t>(a) << 30) |
                        static_cast<std::uint64_t>(b);
    auto it = cse.find(key);
    if (it != cse.end()) return it->second;
    int id = static_cast<int>(sk.ops.size());
    sk.ops.push_back({kind, a, b});
    cse.emplace(key, id);
    return id;
  }

  int build(const Formula& f) {
    auto it = by_node.find(f.id());
    if (it != by_node.end()) return it->second;
    int result;
    switch (f.kind()) {
      case Formula::Kind::Falsum:
        result = op(Skeleton::OpKind::False, 0, 0);
        break;
      case Formula::Kind::Var:
      case Formula::Kind::Box: {
        auto [pos, inserted] = atom_ids.emplace(f, sk.atom_count);
        if (inserted) ++sk.atom_count;
        result = op(Skeleton::OpKind::Atom, pos->second, 0);
        break;
      }
      case Formula::Kind::Implies: {
        int l = build(f.left());
        int r = build(f.right());
        result = op(Skeleton::OpKind::Imp, l, r);
        break;
      }
      default:
        throw std::logic_error("unreachable");
    }
    by_node.emplace(f.id(), result);
    return result;
  }
};

// Truth-table column of atom k within a 64-assignment chunk, for k < 6.
constexpr std::uint64_t kAtomPattern[6] = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

}  // namespace

TautStatus taut_status(const Formula& f) {
  SkeletonBuilder b;
  b.sk.root = b.build(f);
  const Skeleton& sk = b.sk;
  if (sk.atom_count > kAtomBudget) return TautStatus::BudgetExceeded;

  const unsigned atoms = static_cast<unsigned>(sk.atom_count);
  std::vector<std::uint64_t> val(sk.ops.size());
  const std::uint64_t chunks = atoms > 6 ? (1ULL << (atoms - 6)) : 1;
  const std::uint64_t mask =
      atoms >= 6 ? ~0ULL : (1ULL << (1ULL << atoms)) - 1;

  for (std::uint64_t chunk = 0; chunk < chunks; ++chunk) {
    for (std::size_t i = 0; i < sk.ops.size(); ++i) {
      const Skeleton::Op& op = sk.ops[i];
      switch (op.kind) {
        case Skeleton::OpKind::False:
          val[i] = 0;
          break;
        case Skeleton::OpKind::Atom:
          val[i] = op.a < 6 ? kAtomPattern[op.a]
                            : ((chunk >> (op.a - 6)) & 1 ? ~0ULL : 0);
          break;
        case Skeleton::OpKind::Imp:
          val[i] = ~val[op.a] | val[op.b];
          break;
      }
    }
    if ((val[sk.root] & mask) != mask) return TautStatus::NotTautology;
  }
  return TautStatus::Tautology;
}

// ---------------------------------------------------------------------------
// Certificate checking

namespace {

bool is_axk_instance(const Formula& f) {
  // box(X -> Y) -> (box X -> box Y)
  if (!f.is_implies()) return false;
  const Formula l = f.left();
  const Formula r = f.right();
  if (!l.is_box() || !l.inner().is_implies()) return false;
  if (!r.is_implies() || !r.left().is_box() || !r.right().is_box()) return false;
  return l.inner().left() == r.left().inner() &&
         l.inner().right() == r.right().inner();
}

bool is_axwgl_instance(const Formula& f, unsigned n) {
  // box(box^n X -> X) -> box X
  if (!f.is_implies() || !f.right().is_box()) return false;
  const Formula x = f.right().inner();
  const Formula l = f.left();
  if (!l.is_box() || !l.inner().is_implies()) return false;
  if (l.inner().right() != x) return false;
  // Peel n boxes off the antecedent of the boxed implication.
  Formula cur = l.inner().left();
  for (unsigned i = 0; i < n; ++i) {
    if (!cur.is_box()) return false;
    cur = cur.inner();
  }
  return cur == x;
}

CheckReport fail(std::uint32_t line, std::string message) {
  return CheckReport{false, line, std::move(message)};
}

}  // namespace

CheckReport check(const Certificate& cert) {
  if (cert.logic_n < 1) return fail(0, "logic_n must be >= 1");
  if (cert.lines.empty()) return fail(0, "certificate has no lines");
  for (std::uint32_t i = 0; i < cert.lines.size(); ++i) {
    const ProofLine& line = cert.lines[i];
    const std::string where = "line " + std::to_string(i) + ": ";
    for (std::uint32_t p : line.premises)
      if (p >= i)
        return fail(i, where + "premise index " + std::to_string(p) +
                           " not strictly earlier");
    switch (line.rule) {
      case Rule::Taut: {
        if (!line.premises.empty())
          return fail(i, where + "axiom rule takes no premises");
        switch (taut_status(line.formula)) {
          case TautStatus::Tautology:
            break;
          case TautStatus::NotTautology:
            return fail(i, where + "not a propositional tautology");
          case TautStatus::BudgetExceeded:
            return fail(i, where + "tautology check exceeded the " +
                               std::to_string(kAtomBudget) + "-atom budget");
        }
        break;
      }
      case Rule::AxK:
        if (!line.premises.empty())
          return fail(i, where + "axiom rule takes no premises");
        if (!is_axk_instance(line.formula))
          return fail(i, where +
                             "not an instance of box(X -> Y) -> (box X -> box Y)");
        break;
      case Rule::AxWGL:
        if (!line.premises.empty())
          return fail(i, where + "axiom rule takes no premises");
        if (!is_axwgl_instance(line.formula, cert.logic_n))
          return fail(i, where + "not an instance of box(box^" +
                             std::to_string(cert.logic_n) +
                             " X -> X) -> box X");
        break;
      case Rule::MP: {
        if (line.premises.size() != 2)
          return fail(i, where + "modus ponens takes exactly 2 premises");
        const Formula& ant = cert.lines[line.premises[0]].formula;
        const Formula& imp = cert.lines[line.premises[1]].formula;
        if (!imp.is_implies() || imp.left() != ant ||
            imp.right() != line.formula)
          return fail(i, where + "modus ponens premises do not match");
        break;
      }
      case Rule::Nec: {
        if (line.premises.size() != 1)
          return fail(i, where + "necessitation takes exactly 1 premise");
        const Formula& prem = cert.lines[line.premises[0]].formula;
        if (!line.formula.is_box() || line.formula.inner() != prem)
          return fail(i, where + "necessitation premise mismatch");
        break;
      }
      default:
        return fail(i, where + "unknown rule");
    }
  }
  if (cert.lines.back().formula != cert.goal)
    return fail(static_cast<std::uint32_t>(cert.lines.size() - 1),
                "goal does not match the final line");
  return CheckReport{true, 0, ""};
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Taut: return "taut";
    case Rule::AxK: return "axk";
    case Rule::AxWGL: return "axwgl";
    case Rule::MP: return "mp";
    case Rule::Nec: return "nec";
  }
  throw std::logic_error("unreachable");
}

Rule rule_from_name(const std::string& name) {
  if (name == "taut") return Rule::Taut;
  if (name == "axk") return Rule::AxK;
  if (name == "axwgl") return Rule::AxWGL;
  if (name == "mp") return Rule::MP;
  if (name == "nec") return Rule::Nec;
  throw std::invalid_argument("certificate JSON: unknown rule '" + name + "'");
}

}  // namespace

std::string to_json(const Certificate& cert) {
  nlohmann::ordered_json j;
  j["logic_n"] = cert.logic_n;
  j["goal"] = to_text(cert.goal, {.sugar = false});
  nlohmann::ordered_json lines = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cert.lines.size(); ++i) {
    const ProofLine& line = cert.lines[i];
    nlohmann::ordered_json entry;
    entry["i"] = i;
    entry["f"] = to_text(line.formula, {.sugar = false});
    entry["rule"] = rule_name(line.rule);
    entry["prem"] = line.premises;
    lines.push_back(std::move(entry));
  }
  j["lines"] = std::move(lines);
  return j.dump() + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate JSON: ") + e.what());
  }
  try {
    if (!j.is_object())
      throw std::invalid_argument("certificate JSON: top level must be an object");
    Certificate cert;
    if (!j.contains("logic_n") || !j["logic_n"].is_number_unsigned())
      throw std::invalid_argument(
          "certificate JSON: 'logic_n' must be a non-negative integer");
    cert.logic_n = j["logic_n"].get<unsigned>();
    if (!j.contains("goal") || !j["goal"].is_string())
      throw std::invalid_argument("certificate JSON: 'goal' must be a string");
    cert.goal = parse(j["goal"].get<std::string>(), {.allow_reserved = true});
    if (!j.contains("lines") || !j["lines"].is_array())
      throw std::invalid_argument("certificate JSON: 'lines' must be an array");
    for (std::size_t i = 0; i < j["lines"].size(); ++i) {
      const auto& entry = j["lines"][i];
      if (!entry.is_object())
        throw std::invalid_argument("certificate JSON: line " +
                                    std::to_string(i) + " must be an object");
      if (!entry.contains("i") || !entry["i"].is_number_unsigned() ||
          entry["i"].get<std::size_t>() != i)
        throw std::invalid_argument(
            "certificate JSON: line indices must be contiguous from 0 (line " +
            std::to_string(i) + ")");
      if (!entry.contains("f") || !entry["f"].is_string())
        throw std::invalid_argument("certificate JSON: line " +
                                    std::to_string(i) + " needs a formula 'f'");
      if (!entry.contains("rule") || !entry["rule"].is_string())
        throw std::invalid_argument("certificate JSON: line " +
                                    std::to_string(i) + " needs a 'rule'");
      ProofLine line;
      line.formula =
          parse(entry["f"].get<std::string>(), {.allow_reserved = true});
      line.rule = rule_from_name(entry["rule"].get<std::string>());
      if (entry.contains("prem")) {
        if (!entry["prem"].is_array())
          throw std::invalid_argument("certificate JSON: line " +
                                      std::to_string(i) +
                                      " 'prem' must be an array");
        for (const auto& p : entry["prem"]) {
          if (!p.is_number_unsigned())
            throw std::invalid_argument(
                "certificate JSON: premise indices must be non-negative "
                "integers (line " + std::to_string(i) + ")");
          line.premises.push_back(p.get<std::uint32_t>());
        }
      }
      cert.lines.push_back(std::move(line));
    }
    return cert;
  } catch (const ParseError& e) {
    throw std::invalid_argument(std::string("certificate JSON: ") + e.what());
  }
}

}  // namespace wgl
