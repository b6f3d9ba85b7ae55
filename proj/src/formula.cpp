#include "wgl/formula.hpp"

#include <array>
#include <cstddef>
#include <mutex>
#include <unordered_map>

namespace wgl {

// ---------------------------------------------------------------------------
// Node representation

struct Formula::Node {
  Kind kind;
  std::shared_ptr<const Node> a;  // Implies left / Box inner
  std::shared_ptr<const Node> b;  // Implies right
  std::string name;               // Var
  std::size_t hash = 0;
  std::uint64_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4);
  return h;
}

const std::shared_ptr<const Formula::Node>& falsum_node() {
  static const std::shared_ptr<const Formula::Node> node = [] {
    auto n = std::make_shared<Formula::Node>();
    n->kind = Formula::Kind::Falsum;
    n->hash = 0x62c1570b821fd9ebULL;
    n->size = 1;
    return n;
  }();
  return node;
}

// Nodes are interned: content-equal formulas always share one node, so
// equality is a pointer comparison and memoization by id() is complete.
// Pool entries are weak; dead slots are reclaimed by wholesale sweeps each
// time the pool doubles, keeping it within a constant factor of the live set.
template <class Key, class Hash = std::hash<Key>>
class NodePool {
 public:
  template <class Make>
  std::shared_ptr<const Formula::Node> intern(const Key& key, Make make) {
    std::lock_guard<std::mutex> lock(mu_);
    std::weak_ptr<const Formula::Node>& slot = map_[key];
    if (std::shared_ptr<const Formula::Node> live = slot.lock()) return live;
    std::shared_ptr<const Formula::Node> node = make();
    slot = node;
    if (map_.size() >= sweep_at_) {
      for (auto it = map_.begin(); it != map_.end();)
        it = it->second.expired() ? map_.erase(it) : std::next(it);
      sweep_at_ = std::max<std::size_t>(1024, map_.size() * 2);
    }
    return node;
  }

 private:
  std::mutex mu_;
  std::unordered_map<Key, std::weak_ptr<const Formula::Node>, Hash> map_;
  std::size_t sweep_at_ = 1024;
};

// Composite nodes are keyed by kind and child identity; children are already
// canonical, so this keys content.
struct CompositeKey {
  Formula::Kind kind;
  const Formula::Node* a;
  const Formula::Node* b;
  bool operator==(const CompositeKey&) const = default;
};

struct CompositeKeyHash {
  std::size_t operator()(const CompositeKey& k) const {
    std::size_t h = mix(0x94d049bb133111ebULL, static_cast<std::size_t>(k.kind));
    h = mix(h, reinterpret_cast<std::size_t>(k.a));
    return mix(h, reinterpret_cast<std::size_t>(k.b));
  }
};

// The pools are heap-allocated and never destroyed so formulas owned by
// statics in other translation units stay safe during shutdown.
NodePool<std::string>& var_pool() {
  static NodePool<std::string>* pool = new NodePool<std::string>();
  return *pool;
}

NodePool<CompositeKey, CompositeKeyHash>& composite_pool() {
  static NodePool<CompositeKey, CompositeKeyHash>* pool =
      new NodePool<CompositeKey, CompositeKeyHash>();
  return *pool;
}

}  // namespace

Formula::Formula() : node_(falsum_node()) {}
Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::falsum() { return Formula(); }

Formula Formula::var(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
  return Formula(var_pool().intern(name, [&] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->name = name;
    n->hash = mix(0x9ddfea08eb382d69ULL, std::hash<std::string>{}(name));
    n->size = 1;
    return n;
  }));
}

Formula Formula::implies(const Formula& lhs, const Formula& rhs) {
  CompositeKey key{Kind::Implies, lhs.node_.get(), rhs.node_.get()};
  return Formula(composite_pool().intern(key, [&] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Implies;
    n->a = lhs.node_;
    n->b = rhs.node_;
    n->hash = mix(mix(0x2545f4914f6cdd1dULL, lhs.hash()), rhs.hash());
    n->size = 1 + lhs.tree_size() + rhs.tree_size();
    return n;
  }));
}

Formula Formula::box(const Formula& inner) {
  CompositeKey key{Kind::Box, inner.node_.get(), nullptr};
  return Formula(composite_pool().intern(key, [&] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Box;
    n->a = inner.node_;
    n->hash = mix(0xda942042e4dd58b5ULL, inner.hash());
    n->size = 1 + inner.tree_size();
    return n;
  }));
}

Formula Formula::verum() { return implies(falsum(), falsum()); }
Formula Formula::neg(const Formula& a) { return implies(a, falsum()); }
Formula Formula::conj(const Formula& a, const Formula& b) {
  return implies(implies(a, implies(b, falsum())), falsum());
}
Formula Formula::disj(const Formula& a, const Formula& b) {
  return implies(implies(a, falsum()), b);
}
Formula Formula::iff(const Formula& a, const Formula& b) {
  return implies(implies(implies(a, b), implies(implies(b, a), falsum())),
                 falsum());
}
Formula Formula::dia(const Formula& a) {
  return implies(box(implies(a, falsum())), falsum());
}

Formula::Kind Formula::kind() const { return node_->kind; }

const std::string& Formula::var_name() const {
  if (kind() != Kind::Var) throw std::logic_error("var_name on non-variable");
  return node_->name;
}

Formula Formula::left() const {
  if (kind() != Kind::Implies) throw std::logic_error("left on non-implication");
  return Formula(node_->a);
}

Formula Formula::right() const {
  if (kind() != Kind::Implies) throw std::logic_error("right on non-implication");
  return Formula(node_->b);
}

Formula Formula::inner() const {
  if (kind() != Kind::Box) throw std::logic_error("inner on non-box");
  return Formula(node_->a);
}

std::size_t Formula::hash() const { return node_->hash; }
std::uint64_t Formula::tree_size() const { return node_->size; }
const void* Formula::id() const { return node_.get(); }

bool Formula::operator==(const Formula& other) const {
  // Interned construction makes content equality a pointer comparison.
  return node_.get() == other.node_.get();
}

// ---------------------------------------------------------------------------
// Sugar recognizers

bool is_verum(const Formula& f) {
  return f.is_implies() && f.left().is_falsum() && f.right().is_falsum();
}

std::optional<Formula> match_neg(const Formula& f) {
  if (f.is_implies() && f.right().is_falsum()) return f.left();
  return std::nullopt;
}

std::optional<std::pair<Formula, Formula>> match_and(const Formula& f) {
  // (x -> (y -> false)) -> false
  auto outer = match_neg(f);
  if (!outer || !outer->is_implies()) return std::nullopt;
  auto rhs = match_neg(outer->right());
  if (!rhs) return std::nullopt;
  return std::make_pair(outer->left(), *rhs);
}

std::optional<std::pair<Formula, Formula>> match_iff(const Formula& f) {
  // ((x -> y) -> ((y -> x) -> false)) -> false
  auto parts = match_and(f);
  if (!parts) return std::nullopt;
  const Formula& fwd = parts->first;
  const Formula& bwd = parts->second;
  if (!fwd.is_implies() || !bwd.is_implies()) return std::nullopt;
  if (fwd.left() == bwd.right() && fwd.right() == bwd.left())
    return std::make_pair(fwd.left(), fwd.right());
  return std::nullopt;
}

std::optional<Formula> match_dia(const Formula& f) {
  // box (x -> false) -> false
  auto n = match_neg(f);
  if (!n || !n->is_box()) return std::nullopt;
  auto inner = match_neg(n->inner());
  if (!inner) return std::nullopt;
  return *inner;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok : std::uint8_t {
  End, Ident, False, True, Box, Dia, LParen, RParen, Arrow, Iff, Neg, And, Or
};

struct Token {
  Tok kind;
  std::string text;  // Ident only
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= s_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = s_[pos_];
    if (c == '(') { advance(1); t.kind = Tok::LParen; return t; }
    if (c == ')') { advance(1); t.kind = Tok::RParen; return t; }
    if (c == '~') { advance(1); t.kind = Tok::Neg; return t; }
    if (c == '&') { advance(1); t.kind = Tok::And; return t; }
    if (c == '|') { advance(1); t.kind = Tok::Or; return t; }
    if (c == '-') {
      if (peek(1) == '>') { advance(2); t.kind = Tok::Arrow; return t; }
      fail(t, "expected '->'");
    }
    if (c == '<') {
      if (peek(1) == '-' && peek(2) == '>') { advance(3); t.kind = Tok::Iff; return t; }
      if (peek(1) == '>') { advance(2); t.kind = Tok::Dia; return t; }
      fail(t, "expected '<->' or '<>'");
    }
    if (c == '[') {
      if (peek(1) == ']') { advance(2); t.kind = Tok::Box; return t; }
      fail(t, "expected '[]'");
    }
    if ((c >= 'a' && c <= 'z') || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (islower_digit(s_[pos_]) || s_[pos_] == '_'))
        advance(1);
      t.text = s_.substr(start, pos_ - start);
      if (t.text == "false") t.kind = Tok::False;
      else if (t.text == "true") t.kind = Tok::True;
      else if (t.text == "box") t.kind = Tok::Box;
      else if (t.text == "dia") t.kind = Tok::Dia;
      else t.kind = Tok::Ident;
      return t;
    }
    // Unicode aliases (UTF-8 byte sequences).
    if (try_utf8(t, "\xE2\x96\xA1", Tok::Box)) return t;    // box
    if (try_utf8(t, "\xE2\x97\x87", Tok::Dia)) return t;    // diamond
    if (try_utf8(t, "\xC2\xAC", Tok::Neg)) return t;        // negation sign
    if (try_utf8(t, "\xE2\x88\xA7", Tok::And)) return t;    // wedge
    if (try_utf8(t, "\xE2\x88\xA8", Tok::Or)) return t;     // vee
    if (try_utf8(t, "\xE2\x86\x92", Tok::Arrow)) return t;  // rightwards arrow
    if (try_utf8(t, "\xE2\x86\x94", Tok::Iff)) return t;    // left-right arrow
    if (try_utf8(t, "\xE2\x8A\xA5", Tok::False)) return t;  // up tack
    if (try_utf8(t, "\xE2\x8A\xA4", Tok::True)) return t;   // down tack
    fail(t, "unrecognized character");
  }

 private:
  static bool islower_digit(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  }

  char peek(std::size_t off) const {
    return pos_ + off < s_.size() ? s_[pos_ + off] : '\0';
  }

  bool try_utf8(Token& t, const char* seq, Tok kind) {
    std::size_t len = std::char_traits<char>::length(seq);
    if (s_.compare(pos_, len, seq) == 0) {
      advance(len);
      t.kind = kind;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const Token& t, const std::string& what) {
    throw ParseError(what, t.line, t.column);
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance(1);
      } else {
        break;
      }
    }
  }

  void advance(std::size_t k) {
    pos_ += k;
    col_ += k;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
//
//   formula := iff
//   iff     := imp ('<->' imp)*           left-associative
//   imp     := or ('->' imp)?             right-associative
//   or      := and ('|' and)*             left-associative
//   and     := unary ('&' unary)*         left-associative
//   unary   := ('~' | 'box' | '[]' | 'dia' | '<>') unary | atom
//   atom    := 'false' | 'true' | ident | '(' formula ')'

class Parser {
 public:
  Parser(const std::string& text, const ParseOptions& opts)
      : lex_(text), opts_(opts) {
    shift();
  }

  Formula run() {
    Formula f = parse_iff();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  void shift() { tok_ = lex_.next(); }

  void expect(Tok kind, const std::string& what) {
    if (tok_.kind != kind)
      throw ParseError("expected " + what, tok_.line, tok_.column);
    if (kind != Tok::End) shift();
  }

  Formula parse_iff() {
    Formula l = parse_imp();
    while (tok_.kind == Tok::Iff) {
      shift();
      l = Formula::iff(l, parse_imp());
    }
    return l;
  }

  Formula parse_imp() {
    Formula l = parse_or();
    if (tok_.kind == Tok::Arrow) {
      shift();
      return Formula::implies(l, parse_imp());
    }
    return l;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (tok_.kind == Tok::Or) {
      shift();
      l = Formula::disj(l, parse_and());
    }
    return l;
  }

  Formula parse_and() {
    Formula l = parse_unary();
    while (tok_.kind == Tok::And) {
      shift();
      l = Formula::conj(l, parse_unary());
    }
    return l;
  }

  Formula parse_unary() {
    switch (tok_.kind) {
      case Tok::Neg: shift(); return Formula::neg(parse_unary());
      case Tok::Box: shift(); return Formula::box(parse_unary());
      case Tok::Dia: shift(); return Formula::dia(parse_unary());
      default: return parse_atom();
    }
  }

  Formula parse_atom() {
    switch (tok_.kind) {
      case Tok::False: shift(); return Formula::falsum();
      case Tok::True: shift(); return Formula::verum();
      case Tok::Ident: {
        std::string name = tok_.text;
        if (!opts_.allow_reserved && name[0] == '_')
          throw ParseError("reserved variable name '" + name +
                               "' (identifiers starting with '_' are reserved)",
                           tok_.line, tok_.column);
        shift();
        return Formula::var(name);
      }
      case Tok::LParen: {
        shift();
        Formula f = parse_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        throw ParseError("expected a formula (one of 'false', 'true', an "
                         "identifier, '(', '~', 'box', 'dia')",
                         tok_.line, tok_.column);
    }
  }

  Lexer lex_;
  ParseOptions opts_;
  Token tok_;
};

}  // namespace

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

Formula parse(const std::string& text, const ParseOptions& opts) {
  return Parser(text, opts).run();
}

// ---------------------------------------------------------------------------
// Printer
//
// Precedence: iff = 0 (left), imp = 1 (right), or = 2 (left), and = 3 (left),
// unary = 4, atom = 5. A subterm is parenthesized when its own level is lower
// than the minimum required at its position. Sugar recognition priority inside
// an implication with falsum right-hand side: true, iff, and, dia, neg.

namespace {

enum Prec : int { kIff = 0, kImp = 1, kOr = 2, kAnd = 3, kUnary = 4, kAtom = 5 };

// Level at which this node prints (used for parenthesization decisions).
int prec_of(const Formula& f, bool sugar) {
  switch (f.kind()) {
    case Formula::Kind::Falsum:
    case Formula::Kind::Var:
      return kAtom;
    case Formula::Kind::Box:
      return kUnary;
    case Formula::Kind::Implies:
      break;
  }
  if (sugar) {
    if (is_verum(f)) return kAtom;
    if (match_iff(f)) return kIff;
    if (match_and(f)) return kAnd;
    if (match_dia(f)) return kUnary;
    if (match_neg(f)) return kUnary;
    if (match_neg(f.left()) && !f.right().is_falsum()) return kOr;
  }
  return kImp;
}

void print_rec(std::string& out, const Formula& f, bool sugar);

// Print f as an operand whose position requires at least `minprec`.
void print_operand(std::string& out, const Formula& f, int minprec, bool sugar) {
  if (prec_of(f, sugar) < minprec) {
    out += '(';
    print_rec(out, f, sugar);
    out += ')';
  } else {
    print_rec(out, f, sugar);
  }
}

void print_rec(std::string& out, const Formula& f, bool sugar) {
  switch (f.kind()) {
    case Formula::Kind::Falsum:
      out += "false";
      return;
    case Formula::Kind::Var:
      out += f.var_name();
      return;
    case Formula::Kind::Box:
      out += "box ";
      print_operand(out, f.inner(), kUnary, sugar);
      return;
    case Formula::Kind::Implies:
      break;
  }

  // Implication, possibly sugared.
  if (sugar) {
    if (is_verum(f)) {
      out += "true";
      return;
    }
    if (auto ab = match_iff(f)) {
      // Left-associative: the right operand must bind strictly tighter.
      print_operand(out, ab->first, kIff, sugar);
      out += " <-> ";
      print_operand(out, ab->second, kImp, sugar);
      return;
    }
    if (auto ab = match_and(f)) {
      print_operand(out, ab->first, kAnd, sugar);
      out += " & ";
      print_operand(out, ab->second, kUnary, sugar);
      return;
    }
    if (auto x = match_dia(f)) {
      out += "dia ";
      print_operand(out, *x, kUnary, sugar);
      return;
    }
    if (auto x = match_neg(f)) {
      out += '~';
      print_operand(out, *x, kUnary, sugar);
      return;
    }
    if (auto xl = match_neg(f.left()); xl && !f.right().is_falsum()) {
      // (x -> false) -> r  ==  x | r
      print_operand(out, *xl, kOr, sugar);
      out += " | ";
      print_operand(out, f.right(), kAnd, sugar);
      return;
    }
  }

  // Right-associative: the left operand must bind strictly tighter.
  print_operand(out, f.left(), kOr, sugar);
  out += " -> ";
  print_operand(out, f.right(), kImp, sugar);
}

}  // namespace

std::string to_text(const Formula& f, const PrintOptions& opts) {
  std::string out;
  print_operand(out, f, kIff, opts.sugar);
  return out;
}

// ---------------------------------------------------------------------------
// Structural operations

namespace {

Formula substitute_memo(const Formula& a, const std::string& p, const Formula& b,
                        std::unordered_map<const void*, Formula>& memo) {
  switch (a.kind()) {
    case Formula::Kind::Falsum:
      return a;
    case Formula::Kind::Var:
      return a.var_name() == p ? b : a;
    default:
      break;
  }
  auto it = memo.find(a.id());
  if (it != memo.end()) return it->second;
  Formula result = a.is_box()
      ? Formula::box(substitute_memo(a.inner(), p, b, memo))
      : Formula::implies(substitute_memo(a.left(), p, b, memo),
                         substitute_memo(a.right(), p, b, memo));
  memo.emplace(a.id(), result);
  return result;
}

bool has_var_memo(const Formula& a, const std::string& p,
                  std::unordered_map<const void*, bool>& memo) {
  switch (a.kind()) {
    case Formula::Kind::Falsum:
      return false;
    case Formula::Kind::Var:
      return a.var_name() == p;
    default:
      break;
  }
  auto it = memo.find(a.id());
  if (it != memo.end()) return it->second;
  bool result = a.is_box()
      ? has_var_memo(a.inner(), p, memo)
      : (has_var_memo(a.left(), p, memo) || has_var_memo(a.right(), p, memo));
  memo.emplace(a.id(), result);
  return result;
}

}  // namespace

Formula substitute(const Formula& a, const std::string& p, const Formula& b) {
  std::unordered_map<const void*, Formula> memo;
  return substitute_memo(a, p, b, memo);
}

Formula substitute_all(const Formula& a, const std::vector<std::string>& ps,
                       const std::vector<Formula>& bs) {
  if (ps.size() != bs.size())
    throw std::invalid_argument("substitute_all: name/replacement count mismatch");
  Formula result = a;
  for (std::size_t i = 0; i < ps.size(); ++i)
    result = substitute(result, ps[i], bs[i]);
  return result;
}

bool has_var(const Formula& a, const std::string& p) {
  std::unordered_map<const void*, bool> memo;
  return has_var_memo(a, p, memo);
}

namespace {

void occurrences_rec(const Formula& a, const std::string& p,
                     std::vector<OccurrencePath::Step>& path, unsigned depth,
                     std::vector<OccurrencePath>& out) {
  switch (a.kind()) {
    case Formula::Kind::Falsum:
      return;
    case Formula::Kind::Var:
      if (a.var_name() == p) out.push_back(OccurrencePath{path, depth});
      return;
    case Formula::Kind::Box:
      path.push_back(OccurrencePath::Step::Inner);
      occurrences_rec(a.inner(), p, path, depth + 1, out);
      path.pop_back();
      return;
    case Formula::Kind::Implies:
      path.push_back(OccurrencePath::Step::Left);
      occurrences_rec(a.left(), p, path, depth, out);
      path.back() = OccurrencePath::Step::Right;
      occurrences_rec(a.right(), p, path, depth, out);
      path.pop_back();
      return;
  }
}

}  // namespace

std::vector<OccurrencePath> occurrences(const Formula& a, const std::string& p) {
  std::vector<OccurrencePath> out;
  std::vector<OccurrencePath::Step> path;
  occurrences_rec(a, p, path, 0, out);
  return out;
}

Formula formula_at(const Formula& a, const OccurrencePath& occ) {
  Formula cur = a;
  for (OccurrencePath::Step s : occ.path) {
    switch (s) {
      case OccurrencePath::Step::Left:
        if (!cur.is_implies()) throw std::invalid_argument("path does not fit the formula");
        cur = cur.left();
        break;
      case OccurrencePath::Step::Right:
        if (!cur.is_implies()) throw std::invalid_argument("path does not fit the formula");
        cur = cur.right();
        break;
      case OccurrencePath::Step::Inner:
        if (!cur.is_box()) throw std::invalid_argument("path does not fit the formula");
        cur = cur.inner();
        break;
    }
  }
  return cur;
}

namespace {

// Trie over paths; replacement happens at each marked node.
struct PathTrie {
  bool here = false;
  std::array<std::unique_ptr<PathTrie>, 3> child;
};

Formula substitute_trie(const Formula& a, const PathTrie& t, const Formula& b,
                        const std::string*& seen_var) {
  if (t.here) {
    if (!a.is_var())
      throw std::invalid_argument(
          "substitute_at: path does not resolve to a variable");
    if (seen_var == nullptr)
      seen_var = &a.var_name();
    else if (*seen_var != a.var_name())
      throw std::invalid_argument(
          "substitute_at: paths resolve to different variables ('" + *seen_var +
          "' vs '" + a.var_name() + "')");
    return b;
  }
  auto idx = [](OccurrencePath::Step s) { return static_cast<std::size_t>(s); };
  const PathTrie* l = t.child[idx(OccurrencePath::Step::Left)].get();
  const PathTrie* r = t.child[idx(OccurrencePath::Step::Right)].get();
  const PathTrie* i = t.child[idx(OccurrencePath::Step::Inner)].get();
  if (!l && !r && !i) return a;
  switch (a.kind()) {
    case Formula::Kind::Implies: {
      if (i) throw std::invalid_argument("substitute_at: path does not fit the formula");
      Formula nl = l ? substitute_trie(a.left(), *l, b, seen_var) : a.left();
      Formula nr = r ? substitute_trie(a.right(), *r, b, seen_var) : a.right();
      return Formula::implies(nl, nr);
    }
    case Formula::Kind::Box: {
      if (l || r) throw std::invalid_argument("substitute_at: path does not fit the formula");
      return Formula::box(substitute_trie(a.inner(), *i, b, seen_var));
    }
    default:
      throw std::invalid_argument("substitute_at: path does not fit the formula");
  }
}

}  // namespace

Formula substitute_at(const Formula& a, const std::vector<OccurrencePath>& occs,
                      const Formula& b) {
  if (occs.empty()) return a;
  PathTrie root;
  for (const OccurrencePath& occ : occs) {
    PathTrie* cur = &root;
    for (OccurrencePath::Step s : occ.path) {
      auto& slot = cur->child[static_cast<std::size_t>(s)];
      if (!slot) slot = std::make_unique<PathTrie>();
      cur = slot.get();
    }
    cur->here = true;
  }
  const std::string* seen_var = nullptr;
  return substitute_trie(a, root, b, seen_var);
}

Formula box_power(unsigned k, const Formula& a) {
  Formula result = a;
  for (unsigned i = 0; i < k; ++i) result = Formula::box(result);
  return result;
}

Formula boxdot(unsigned k, const Formula& a, bool with_self) {
  if (k == 0) throw std::invalid_argument("boxdot requires k >= 1");
  Formula result = box_power(k, a);
  for (unsigned i = k; i-- > 1;)
    result = Formula::conj(box_power(i, a), result);
  if (with_self) result = Formula::conj(a, result);
  return result;
}

Formula iterate(const Formula& a, const std::string& p, unsigned k) {
  Formula result = Formula::var(p);
  for (unsigned i = 0; i < k; ++i) result = substitute(a, p, result);
  return result;
}

Formula conj_chain(const std::vector<Formula>& parts) {
  if (parts.empty())
    throw std::invalid_argument("conj_chain requires at least one conjunct");
  Formula result = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;)
    result = Formula::conj(parts[i], result);
  return result;
}

Formula dia_power(unsigned k, const Formula& a) {
  Formula result = a;
  for (unsigned i = 0; i < k; ++i) result = Formula::dia(result);
  return result;
}

namespace {

void atoms_rec(const Formula& a, std::set<std::string>& out,
               std::unordered_map<const void*, bool>& seen) {
  if (seen.count(a.id())) return;
  seen.emplace(a.id(), true);
  switch (a.kind()) {
    case Formula::Kind::Falsum:
      return;
    case Formula::Kind::Var:
      out.insert(a.var_name());
      return;
    case Formula::Kind::Box:
      atoms_rec(a.inner(), out, seen);
      return;
    case Formula::Kind::Implies:
      atoms_rec(a.left(), out, seen);
      atoms_rec(a.right(), out, seen);
      return;
  }
}

Formula simplify_memo(const Formula& a,
                      std::unordered_map<const void*, Formula>& memo) {
  if (a.is_falsum() || a.is_var()) return a;
  auto it = memo.find(a.id());
  if (it != memo.end()) return it->second;
  Formula result = Formula::falsum();
  if (a.is_box()) {
    Formula x = simplify_memo(a.inner(), memo);
    result = is_verum(x) ? Formula::verum() : Formula::box(x);
  } else {
    Formula x = simplify_memo(a.left(), memo);
    Formula y = simplify_memo(a.right(), memo);
    if (x.is_falsum()) {
      result = Formula::verum();  // false -> y  ~>  true
    } else if (is_verum(y)) {
      result = Formula::verum();  // x -> true   ~>  true
    } else if (is_verum(x)) {
      result = y;                 // true -> y   ~>  y
    } else if (y.is_falsum() && x.is_implies() && x.right().is_falsum()) {
      result = x.left();          // ~~z         ~>  z
    } else {
      result = Formula::implies(x, y);
    }
  }
  memo.emplace(a.id(), result);
  return result;
}

}  // namespace

std::set<std::string> atoms(const Formula& a) {
  std::set<std::string> out;
  std::unordered_map<const void*, bool> seen;
  atoms_rec(a, out, seen);
  return out;
}

Formula simplify(const Formula& a) {
  std::unordered_map<const void*, Formula> memo;
  return simplify_memo(a, memo);
}

}  // namespace wgl
