#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wgl/formula.hpp"

namespace wgl {

// Hilbert-style proof lines for the logic K + box(box^n X -> X) -> box X.
//
//   Taut  - propositional tautology (decided after Boolean abstraction:
//           maximal boxed subformulas and variables become atoms)
//   AxK   - box(X -> Y) -> (box X -> box Y)
//   AxWGL - box(box^n X -> X) -> box X, with n fixed by the certificate
//   MP    - premises {i, j}: line j is (line i -> this line)
//   Nec   - premise {i}: this line is box(line i)
enum class Rule : std::uint8_t { Taut, AxK, AxWGL, MP, Nec };

struct ProofLine {
  Formula formula;
  Rule rule = Rule::Taut;
  std::vector<std::uint32_t> premises;  // earlier line indices
};

struct Certificate {
  unsigned logic_n = 1;
  Formula goal;
  std::vector<ProofLine> lines;
};

struct CheckReport {
  bool ok = false;
  std::uint32_t line = 0;  // offending line when the error is line-specific
  std::string message;     // empty when ok

  explicit operator bool() const { return ok; }
};

// Validate every line and the goal. Never throws on bad certificates; the
// report carries the first failure.
CheckReport check(const Certificate& cert);

enum class TautStatus : std::uint8_t { Tautology, NotTautology, BudgetExceeded };

// Propositional tautology test on the Boolean abstraction of f. Formulas with
// more than 24 distinct abstracted atoms are refused (BudgetExceeded).
TautStatus taut_status(const Formula& f);

inline bool is_tautology(const Formula& f) {
  return taut_status(f) == TautStatus::Tautology;
}

// JSON round trip. to_json output is deterministic; certificate_from_json
// throws std::invalid_argument on malformed input.
std::string to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

}  // namespace wgl
