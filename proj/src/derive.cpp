#include "wgl/derive.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wgl/depth.hpp"

namespace wgl {

namespace {

std::string profile_text(const std::set<unsigned>& residues, unsigned n) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (unsigned r : residues) {
    if (!first) out << ", ";
    first = false;
    out << "[" << r << "]_" << n;
  }
  out << "}";
  return out.str();
}

}  // namespace

CertBuilder::CertBuilder(unsigned n) : n_(n) {
  if (n < 1) throw std::invalid_argument("logic index n must be >= 1");
}

const Formula& CertBuilder::formula(LineId id) const {
  return lines_.at(id).formula;
}

CertBuilder::LineId CertBuilder::emit(const Formula& f, Rule rule,
                                      std::vector<std::uint32_t> premises) {
  auto it = index_.find(f);
  if (it != index_.end()) return it->second;
  LineId id = static_cast<LineId>(lines_.size());
  lines_.push_back(ProofLine{f, rule, std::move(premises)});
  index_.emplace(f, id);
  return id;
}

CertBuilder::LineId CertBuilder::taut(const Formula& f) {
  auto it = index_.find(f);
  if (it != index_.end()) return it->second;
  if (taut_status(f) != TautStatus::Tautology)
    throw std::logic_error("internal derivation error: not a tautology: " +
                           to_text(f));
  return emit(f, Rule::Taut, {});
}

CertBuilder::LineId CertBuilder::ax_k(const Formula& x, const Formula& y) {
  Formula f = Formula::implies(
      Formula::box(Formula::implies(x, y)),
      Formula::implies(Formula::box(x), Formula::box(y)));
  return emit(f, Rule::AxK, {});
}

CertBuilder::LineId CertBuilder::ax_wgl(const Formula& x) {
  Formula f = Formula::implies(
      Formula::box(Formula::implies(box_power(n_, x), x)), Formula::box(x));
  return emit(f, Rule::AxWGL, {});
}

CertBuilder::LineId CertBuilder::mp(LineId antecedent, LineId implication) {
  const Formula& imp = formula(implication);
  if (!imp.is_implies() || imp.left() != formula(antecedent))
    throw std::logic_error("internal derivation error: modus ponens mismatch");
  return emit(imp.right(), Rule::MP, {antecedent, implication});
}

CertBuilder::LineId CertBuilder::nec(LineId premise) {
  return emit(Formula::box(formula(premise)), Rule::Nec, {premise});
}

CertBuilder::LineId CertBuilder::taut_chain(
    const Formula& goal, const std::vector<LineId>& premises) {
  Formula curried = goal;
  for (std::size_t i = premises.size(); i-- > 0;)
    curried = Formula::implies(formula(premises[i]), curried);
  LineId line = taut(curried);
  for (LineId p : premises) line = mp(p, line);
  return line;
}

CertBuilder::LineId CertBuilder::regularity(LineId implication, unsigned k) {
  LineId line = implication;
  for (unsigned i = 0; i < k; ++i) {
    Formula f = formula(line);  // copy: emitting below may relocate lines_
    if (!f.is_implies())
      throw std::logic_error("internal derivation error: regularity premise");
    LineId boxed = nec(line);
    line = mp(boxed, ax_k(f.left(), f.right()));
  }
  return line;
}

CertBuilder::LineId CertBuilder::box_iff_over(const Formula& x,
                                              const Formula& y) {
  Formula exy = Formula::iff(x, y);
  LineId fwd = regularity(taut(Formula::implies(exy, Formula::implies(x, y))));
  LineId bwd = regularity(taut(Formula::implies(exy, Formula::implies(y, x))));
  LineId kx = ax_k(x, y);
  LineId ky = ax_k(y, x);
  Formula goal = Formula::implies(
      Formula::box(exy), Formula::iff(Formula::box(x), Formula::box(y)));
  return taut_chain(goal, {fwd, kx, bwd, ky});
}

CertBuilder::LineId CertBuilder::box_both(LineId equivalence) {
  auto xy = match_iff(formula(equivalence));
  if (!xy)
    throw std::logic_error("internal derivation error: box_both premise");
  return mp(nec(equivalence), box_iff_over(xy->first, xy->second));
}

CertBuilder::LineId CertBuilder::collect_boxes(
    const std::vector<Formula>& parts) {
  if (parts.empty())
    throw std::logic_error("internal derivation error: collect_boxes empty");
  if (parts.size() == 1) {
    Formula bx = Formula::box(parts[0]);
    return taut(Formula::implies(bx, bx));
  }
  std::vector<Formula> rest(parts.begin() + 1, parts.end());
  LineId ih = collect_boxes(rest);
  Formula tail = conj_chain(rest);
  Formula whole = Formula::conj(parts[0], tail);
  // box x1 -> box (tail -> whole), then distribute.
  LineId intro = regularity(
      taut(Formula::implies(parts[0], Formula::implies(tail, whole))));
  LineId dist = ax_k(tail, whole);
  std::vector<Formula> boxed;
  boxed.reserve(parts.size());
  for (const Formula& p : parts) boxed.push_back(Formula::box(p));
  Formula goal = Formula::implies(conj_chain(boxed), Formula::box(whole));
  return taut_chain(goal, {intro, ih, dist});
}

CertBuilder::LineId CertBuilder::trans_step(const Formula& a) {
  Formula bna = box_power(n_, a);
  Formula w = Formula::conj(a, bna);
  // a -> ((box^n a & box^2n a) -> (a & box^n a)) is a tautology.
  LineId s1 = taut(Formula::implies(
      a, Formula::implies(Formula::conj(bna, box_power(2 * n_, a)), w)));
  // box^n (a & box^n a) -> box^n a & box^2n a, by projecting under n boxes.
  LineId pr1 = regularity(taut(Formula::implies(w, a)), n_);
  LineId pr2 = regularity(taut(Formula::implies(w, bna)), n_);
  Formula bnw = box_power(n_, w);
  LineId s3 = taut_chain(Formula::implies(a, Formula::implies(bnw, w)),
                         {s1, pr1, pr2});
  LineId s4 = regularity(s3);
  LineId s5 = ax_wgl(w);
  LineId s6 = taut_chain(
      Formula::implies(Formula::box(a), Formula::box(w)), {s4, s5});
  LineId s7 = regularity(taut(Formula::implies(w, bna)));
  return taut_chain(
      Formula::implies(Formula::box(a), box_power(n_ + 1, a)), {s6, s7});
}

namespace {

struct CongruenceCtx {
  CertBuilder& b;
  const std::string& hole;
  Formula x, y;
  CertBuilder::LineId eq;
  std::unordered_map<const void*, CertBuilder::LineId> memo;
};

CertBuilder::LineId congruence_rec(CongruenceCtx& ctx, const Formula& c) {
  if (c.is_var() && c.var_name() == ctx.hole) return ctx.eq;
  if (!has_var(c, ctx.hole)) return ctx.b.taut(Formula::iff(c, c));
  auto it = ctx.memo.find(c.id());
  if (it != ctx.memo.end()) return it->second;
  CertBuilder::LineId result;
  if (c.is_box()) {
    result = ctx.b.box_both(congruence_rec(ctx, c.inner()));
  } else {
    CertBuilder::LineId l = congruence_rec(ctx, c.left());
    CertBuilder::LineId r = congruence_rec(ctx, c.right());
    Formula cx = substitute(c, ctx.hole, ctx.x);
    Formula cy = substitute(c, ctx.hole, ctx.y);
    result = ctx.b.taut_chain(Formula::iff(cx, cy), {l, r});
  }
  ctx.memo.emplace(c.id(), result);
  return result;
}

}  // namespace

CertBuilder::LineId CertBuilder::congruence(const Formula& context,
                                            const std::string& hole,
                                            LineId equivalence) {
  auto xy = match_iff(formula(equivalence));
  if (!xy)
    throw std::logic_error("internal derivation error: congruence premise");
  CongruenceCtx ctx{*this, hole, xy->first, xy->second, equivalence, {}};
  return congruence_rec(ctx, context);
}

CertBuilder::LineId CertBuilder::lob(LineId premise) {
  const Formula& prem = formula(premise);
  if (!prem.is_implies())
    throw std::logic_error("internal derivation error: lob premise");
  Formula a = prem.right();
  if (prem.left() != boxdot(n_, a))
    throw std::logic_error("internal derivation error: lob premise shape");

  Formula bdp = boxdot(n_, a, true);  // a & box a & ... & box^n a
  auto segment = [&](unsigned lo, unsigned hi) {  // box^lo a & ... & box^hi a
    std::vector<Formula> parts;
    for (unsigned i = lo; i <= hi; ++i) parts.push_back(box_power(i, a));
    return parts;
  };

  // Stage k: (box^{k+1} a & ... & box^n a) -> bd+_n a.
  LineId stage = taut_chain(Formula::implies(boxdot(n_, a), bdp), {premise});
  for (unsigned k = 0; k + 1 <= n_ - 1; ++k) {
    // eq1: (box^{k+2} a & ... & box^{n+1} a) -> bd_n a.
    LineId d = regularity(stage);
    LineId cb = collect_boxes(segment(k + 1, n_));
    std::vector<LineId> eq1_premises = {d, cb};
    for (unsigned i = 1; i <= n_; ++i)
      eq1_premises.push_back(
          regularity(taut(Formula::implies(bdp, box_power(i - 1, a)))));
    LineId eq1 = taut_chain(
        Formula::implies(conj_chain(segment(k + 2, n_ + 1)), boxdot(n_, a)),
        eq1_premises);
    // Other branch through the main axiom.
    LineId d1 = taut_chain(
        Formula::implies(conj_chain(segment(k + 1, n_ - 1)),
                         Formula::implies(box_power(n_, a), a)),
        {stage});
    LineId d2 = regularity(d1);
    LineId cb2 = collect_boxes(segment(k + 1, n_ - 1));
    LineId w = ax_wgl(a);
    LineId tr = trans_step(a);
    stage = taut_chain(
        Formula::implies(conj_chain(segment(k + 2, n_)), bdp),
        {eq1, d2, cb2, w, tr, premise});
  }
  // stage is now box^n a -> bd+_n a.
  LineId f1 = taut_chain(Formula::implies(box_power(n_, a), a), {stage});
  LineId f4 = mp(nec(f1), ax_wgl(a));  // |- box a
  std::vector<LineId> have = {premise, f4};
  LineId cur = f4;
  for (unsigned i = 2; i <= n_; ++i) {
    cur = nec(cur);  // |- box^i a
    have.push_back(cur);
  }
  return taut_chain(a, have);
}

CertBuilder::LineId CertBuilder::equiv_box(LineId premise) {
  const Formula& prem = formula(premise);
  if (!prem.is_implies())
    throw std::logic_error("internal derivation error: equiv_box premise");
  auto ab = match_iff(prem.right());
  if (!ab || prem.left() != box_power(n_, ab->first))
    throw std::logic_error("internal derivation error: equiv_box shape");
  const Formula& a = ab->first;
  const Formula& b = ab->second;
  Formula bna = box_power(n_, a);

  LineId e1 = taut_chain(Formula::implies(a, Formula::implies(bna, b)),
                         {premise});
  LineId e2 = regularity(e1);
  LineId e3 = ax_k(bna, b);
  LineId e4 = trans_step(a);
  Formula ba = Formula::box(a);
  Formula bb = Formula::box(b);
  LineId e5 = taut_chain(Formula::implies(ba, bb), {e2, e3, e4});

  LineId e6 = taut_chain(Formula::implies(b, Formula::implies(bna, a)),
                         {premise});
  LineId e7 = regularity(e6);
  LineId e8 = ax_wgl(a);
  LineId e9 = taut_chain(Formula::implies(bb, ba), {e7, e8});
  return taut_chain(Formula::iff(ba, bb), {e5, e9});
}

CertBuilder::LineId CertBuilder::dia_mono(LineId implication) {
  const Formula& f = formula(implication);
  if (!f.is_implies())
    throw std::logic_error("internal derivation error: dia_mono premise");
  const Formula x = f.left();
  const Formula y = f.right();
  LineId contra = taut_chain(
      Formula::implies(Formula::neg(y), Formula::neg(x)), {implication});
  LineId reg = regularity(contra);
  return taut_chain(Formula::implies(Formula::dia(x), Formula::dia(y)), {reg});
}

CertBuilder::LineId CertBuilder::dia_box_merge(unsigned k, const Formula& x,
                                               const Formula& y) {
  if (k == 0)
    throw std::logic_error("internal derivation error: dia_box_merge k=0");
  if (k > 1) {
    LineId ih = dia_box_merge(k - 1, x, y);
    LineId base = dia_box_merge(1, dia_power(k - 1, x), box_power(k - 1, y));
    LineId lifted = dia_mono(ih);
    Formula goal = Formula::implies(
        Formula::conj(dia_power(k, x), box_power(k, y)),
        dia_power(k, Formula::conj(x, y)));
    return taut_chain(goal, {base, lifted});
  }
  Formula xy = Formula::conj(x, y);
  // ~(x & y) -> (y -> ~x), boxed and distributed.
  LineId t = regularity(taut(Formula::implies(
      Formula::neg(xy), Formula::implies(y, Formula::neg(x)))));
  LineId d = ax_k(y, Formula::neg(x));
  Formula goal = Formula::implies(Formula::conj(Formula::dia(x), Formula::box(y)),
                                  Formula::dia(xy));
  return taut_chain(goal, {t, d});
}

CertBuilder::LineId CertBuilder::dia_negbox(unsigned k, const Formula& x) {
  if (k == 0)
    throw std::logic_error("internal derivation error: dia_negbox k=0");
  Formula nb1 = Formula::neg(Formula::box(Formula::neg(x)));
  if (k == 1)
    return taut(Formula::iff(Formula::dia(x), nb1));  // identical trees
  LineId ih = dia_negbox(k - 1, x);
  // dia (dia^{k-1} x) <-> dia (~box^{k-1} ~x), by congruence in a dia context.
  const std::string h = "_cong";
  LineId c1 = congruence(Formula::dia(Formula::var(h)), h, ih);
  // box ~~z <-> box z for z = box^{k-1} ~x.
  Formula z = box_power(k - 1, Formula::neg(x));
  LineId dn = box_both(taut(Formula::iff(Formula::neg(Formula::neg(z)), z)));
  Formula goal =
      Formula::iff(dia_power(k, x), Formula::neg(box_power(k, Formula::neg(x))));
  return taut_chain(goal, {c1, dn});
}

// ---------------------------------------------------------------------------
// Substitution lemmas

namespace {

struct SubstCtx {
  CertBuilder& b;
  unsigned n;
  std::vector<std::string> holes;
  std::vector<std::pair<Formula, Formula>> pairs;
  Formula e;         // conjunction of the equivalences
  Formula bd_e;      // box e & ... & box^n e
  Formula bdp_e;     // e & bd_e
  std::unordered_map<const void*, CertBuilder::LineId> memo_plus;
  // Key: (node, clause code): 0 = residue-0 clause, 1..n-1 = residue-i clause,
  // n = modalized clause.
  std::map<std::pair<const void*, unsigned>, CertBuilder::LineId> memo_clause;

  Formula apply(const Formula& c, bool second) const {
    Formula result = c;
    for (std::size_t j = 0; j < holes.size(); ++j)
      result = substitute(result, holes[j],
                          second ? pairs[j].second : pairs[j].first);
    return result;
  }

  bool any_hole(const Formula& c) const {
    for (const std::string& h : holes)
      if (has_var(c, h)) return true;
    return false;
  }
};

// |- bd+_n(E) -> (C(As) <-> C(Bs))
CertBuilder::LineId subst_plus_rec(SubstCtx& ctx, const Formula& c);

// |- bd_n(E) -> (box C(As) <-> box C(Bs))
CertBuilder::LineId subst_box_core(SubstCtx& ctx, const Formula& c) {
  CertBuilder::LineId ih = subst_plus_rec(ctx, c);
  CertBuilder& b = ctx.b;
  CertBuilder::LineId d = b.regularity(ih);
  CertBuilder::LineId biff =
      b.box_iff_over(ctx.apply(c, false), ctx.apply(c, true));
  std::vector<Formula> layers;
  layers.push_back(ctx.e);
  for (unsigned i = 1; i <= ctx.n; ++i) layers.push_back(box_power(i, ctx.e));
  CertBuilder::LineId cb = b.collect_boxes(layers);
  CertBuilder::LineId tr = b.trans_step(ctx.e);
  Formula goal = Formula::implies(
      ctx.bd_e, Formula::iff(Formula::box(ctx.apply(c, false)),
                             Formula::box(ctx.apply(c, true))));
  return b.taut_chain(goal, {d, biff, cb, tr});
}

CertBuilder::LineId subst_plus_rec(SubstCtx& ctx, const Formula& c) {
  CertBuilder& b = ctx.b;
  if (c.is_var()) {
    for (std::size_t j = 0; j < ctx.holes.size(); ++j)
      if (c.var_name() == ctx.holes[j])
        return b.taut(Formula::implies(
            ctx.bdp_e,
            Formula::iff(ctx.pairs[j].first, ctx.pairs[j].second)));
  }
  if (!ctx.any_hole(c))
    return b.taut(Formula::implies(ctx.bdp_e, Formula::iff(c, c)));
  auto it = ctx.memo_plus.find(c.id());
  if (it != ctx.memo_plus.end()) return it->second;
  CertBuilder::LineId result;
  if (c.is_box()) {
    CertBuilder::LineId core = subst_box_core(ctx, c.inner());
    Formula goal = Formula::implies(
        ctx.bdp_e,
        Formula::iff(ctx.apply(c, false), ctx.apply(c, true)));
    result = b.taut_chain(goal, {core});
  } else {
    CertBuilder::LineId l = subst_plus_rec(ctx, c.left());
    CertBuilder::LineId r = subst_plus_rec(ctx, c.right());
    Formula goal = Formula::implies(
        ctx.bdp_e,
        Formula::iff(ctx.apply(c, false), ctx.apply(c, true)));
    result = b.taut_chain(goal, {l, r});
  }
  ctx.memo_plus.emplace(c.id(), result);
  return result;
}

// Clause codes for the refined recursion.
constexpr unsigned kClauseZero = 0;
// 1..n-1: residue clause for that residue; n: modalized clause.

// Antecedent of each clause.
Formula clause_antecedent(const SubstCtx& ctx, unsigned code) {
  if (code == kClauseZero)
    return Formula::conj(ctx.e, box_power(ctx.n, ctx.e));
  return box_power(code, ctx.e);  // code in 1..n covers both residue and mod
}

CertBuilder::LineId subst_clause_rec(SubstCtx& ctx, const Formula& c,
                                     unsigned code) {
  CertBuilder& b = ctx.b;
  const std::string& hole = ctx.holes[0];
  Formula ante = clause_antecedent(ctx, code);
  if (!has_var(c, hole))
    return b.taut(Formula::implies(ante, Formula::iff(c, c)));
  if (c.is_var()) {
    // Only reachable with dep = {0}, i.e. the residue-0 clause.
    if (code != kClauseZero)
      throw std::logic_error("internal derivation error: clause at hole");
    return b.taut(Formula::implies(ante, Formula::iff(ctx.pairs[0].first,
                                                      ctx.pairs[0].second)));
  }
  auto key = std::make_pair(c.id(), code);
  auto it = ctx.memo_clause.find(key);
  if (it != ctx.memo_clause.end()) return it->second;
  CertBuilder::LineId result;
  if (c.is_implies()) {
    CertBuilder::LineId l = subst_clause_rec(ctx, c.left(), code);
    CertBuilder::LineId r = subst_clause_rec(ctx, c.right(), code);
    Formula goal = Formula::implies(
        ante, Formula::iff(ctx.apply(c, false), ctx.apply(c, true)));
    result = b.taut_chain(goal, {l, r});
  } else {
    // c = box d. Determine this box's residue i from the clause being proved:
    // residue clauses carry their own index; the zero and modalized clauses
    // both live at residue 0.
    unsigned i = (code >= 1 && code <= ctx.n - 1) ? code : 0;
    unsigned j = (i != 0) ? i - 1 : ctx.n - 1;
    Formula dx = ctx.apply(c.inner(), false);
    Formula dy = ctx.apply(c.inner(), true);
    CertBuilder::LineId biff = b.box_iff_over(dx, dy);
    CertBuilder::LineId lifted;
    if (j != 0) {
      CertBuilder::LineId ih = subst_clause_rec(ctx, c.inner(), j);
      CertBuilder::LineId d = b.regularity(ih);
      // box^{j+1} E -> (box D(A) <-> box D(B))
      lifted = b.taut_chain(
          Formula::implies(box_power(j + 1, ctx.e),
                           Formula::iff(Formula::box(dx), Formula::box(dy))),
          {d, biff});
    } else {
      CertBuilder::LineId ih = subst_clause_rec(ctx, c.inner(), kClauseZero);
      CertBuilder::LineId d = b.regularity(ih);
      CertBuilder::LineId cb =
          b.collect_boxes({ctx.e, box_power(ctx.n, ctx.e)});
      CertBuilder::LineId tr = b.trans_step(ctx.e);
      // box E -> (box D(A) <-> box D(B))
      lifted = b.taut_chain(
          Formula::implies(Formula::box(ctx.e),
                           Formula::iff(Formula::box(dx), Formula::box(dy))),
          {d, cb, tr, biff});
    }
    // Weaken to this clause's antecedent. For residue clauses the lifted line
    // already has antecedent box^i E; for the zero clause weaken box^n E (the
    // n >= 2 case) or box E (n = 1) under E & box^n E; the modalized clause
    // keeps box^n E.
    Formula goal = Formula::implies(
        ante, Formula::iff(ctx.apply(c, false), ctx.apply(c, true)));
    result = b.taut_chain(goal, {lifted});
  }
  ctx.memo_clause.emplace(key, result);
  return result;
}

}  // namespace

CertBuilder::LineId CertBuilder::subst(
    SubstKind kind, const Formula& context,
    const std::vector<std::string>& holes,
    const std::vector<std::pair<Formula, Formula>>& pairs) {
  if (holes.empty() || holes.size() != pairs.size())
    throw std::invalid_argument(
        "subst: need one (A, B) pair per hole variable");
  for (std::size_t i = 0; i < holes.size(); ++i)
    for (std::size_t j = i + 1; j < holes.size(); ++j)
      if (holes[i] == holes[j])
        throw std::invalid_argument("subst: hole variables must be distinct");

  SubstCtx ctx{*this, n_, holes, pairs, Formula(), Formula(), Formula(), {}, {}};
  std::vector<Formula> iffs;
  iffs.reserve(pairs.size());
  for (const auto& [a, bf] : pairs) iffs.push_back(Formula::iff(a, bf));
  ctx.e = conj_chain(iffs);
  ctx.bd_e = boxdot(n_, ctx.e);
  ctx.bdp_e = boxdot(n_, ctx.e, true);

  switch (kind) {
    case SubstKind::Plus:
      return subst_plus_rec(ctx, context);
    case SubstKind::Box:
      return subst_box_core(ctx, context);
    case SubstKind::Residue: {
      if (holes.size() != 1)
        throw std::invalid_argument("subst: residue form takes a single hole");
      auto profile = dep_mod(context, holes[0], n_);
      if (profile.size() != 1 || *profile.begin() == 0 ||
          *profile.begin() >= n_)
        throw std::invalid_argument(
            "subst: residue form needs depth profile {[i]_n} with 0 < i < n, "
            "got " + profile_text(profile, n_));
      return subst_clause_rec(ctx, context, *profile.begin());
    }
    case SubstKind::Modalized: {
      if (holes.size() != 1)
        throw std::invalid_argument(
            "subst: modalized form takes a single hole");
      auto profile = dep_mod(context, holes[0], n_);
      if (profile != std::set<unsigned>{0})
        throw std::invalid_argument(
            "subst: modalized form needs depth profile {[0]_n}, got " +
            profile_text(profile, n_));
      if (!is_modalized(context, holes[0]))
        throw std::invalid_argument(
            "subst: modalized form needs the hole under a box everywhere "
            "(depth 0 occurrence present)");
      return subst_clause_rec(ctx, context, n_);
    }
  }
  throw std::logic_error("unreachable");
}

CertBuilder::LineId CertBuilder::unfold(const Formula& body,
                                        const std::string& hole) {
  auto profile = dep_mod(Formula::box(body), hole, n_);
  if (profile != std::set<unsigned>{0})
    throw std::invalid_argument(
        "unfold: need dep profile {[0]_n} for the boxed body, got " +
        profile_text(profile, n_));
  Formula t = substitute(body, hole, Formula::verum());  // U(true)
  Formula ctx_formula = substitute(body, hole, Formula::box(Formula::var(hole)));
  // box^n U(true) -> box^n (true <-> U(true))
  LineId s2 = regularity(
      taut(Formula::implies(t, Formula::iff(Formula::verum(), t))), n_);
  // box^n (true <-> U(true)) -> (U(box true) <-> U(box U(true)))
  LineId s3 = subst(SubstKind::Modalized, ctx_formula, {hole},
                    {{Formula::verum(), t}});
  // U(box true) <-> U(true), from |- box true <-> true.
  LineId vt = taut_chain(
      Formula::iff(Formula::box(Formula::verum()), Formula::verum()),
      {nec(taut(Formula::verum()))});
  LineId s4 = congruence(body, hole, vt);
  // box^n U(true) -> (U(true) <-> U(box U(true)))
  Formula ut = substitute(body, hole, Formula::box(t));
  LineId s5 = taut_chain(
      Formula::implies(box_power(n_, t), Formula::iff(t, ut)),
      {s2, s3, s4});
  return equiv_box(s5);
}

CertBuilder::LineId CertBuilder::import_certificate(const Certificate& cert) {
  if (cert.logic_n != n_)
    throw std::invalid_argument("import_certificate: logic index mismatch");
  if (cert.lines.empty())
    throw std::invalid_argument("import_certificate: empty certificate");
  std::vector<LineId> remap(cert.lines.size());
  LineId last = 0;
  for (std::size_t i = 0; i < cert.lines.size(); ++i) {
    const ProofLine& line = cert.lines[i];
    std::vector<std::uint32_t> prem;
    prem.reserve(line.premises.size());
    for (std::uint32_t p : line.premises) {
      if (p >= i)
        throw std::invalid_argument(
            "import_certificate: forward premise reference");
      prem.push_back(remap[p]);
    }
    last = emit(line.formula, line.rule, std::move(prem));
    remap[i] = last;
  }
  return last;
}

Certificate CertBuilder::certificate(const Formula& goal) const {
  auto it = index_.find(goal);
  if (it == index_.end())
    throw std::logic_error("certificate: goal has not been derived");
  Certificate cert;
  cert.logic_n = n_;
  cert.goal = goal;
  cert.lines = lines_;
  if (cert.lines.back().formula != goal)
    cert.lines.push_back(cert.lines[it->second]);
  return cert;
}

// ---------------------------------------------------------------------------
// Standalone producers

Certificate derive_trans(const Formula& a, unsigned n) {
  CertBuilder b(n);
  b.trans_step(a);
  return b.certificate(
      Formula::implies(Formula::box(a), box_power(n + 1, a)));
}

Certificate derive_regularity(const Certificate& premise, unsigned k) {
  CertBuilder b(premise.logic_n);
  CertBuilder::LineId line = b.import_certificate(premise);
  Formula f = b.formula(line);  // copy: regularity below may relocate lines
  if (!f.is_implies())
    throw std::invalid_argument("derive_regularity: premise goal must be an "
                                "implication");
  line = b.regularity(line, k);
  return b.certificate(Formula::implies(box_power(k, f.left()),
                                        box_power(k, f.right())));
}

Certificate derive_subst(CertBuilder::SubstKind kind, const Formula& context,
                         const std::vector<std::string>& holes,
                         const std::vector<std::pair<Formula, Formula>>& pairs,
                         unsigned n) {
  CertBuilder b(n);
  CertBuilder::LineId line = b.subst(kind, context, holes, pairs);
  return b.certificate(b.formula(line));
}

Certificate derive_lob(const Certificate& premise) {
  CertBuilder b(premise.logic_n);
  CertBuilder::LineId line = b.lob(b.import_certificate(premise));
  return b.certificate(b.formula(line));
}

Certificate derive_equiv_box(const Certificate& premise) {
  CertBuilder b(premise.logic_n);
  CertBuilder::LineId line = b.equiv_box(b.import_certificate(premise));
  return b.certificate(b.formula(line));
}

Certificate cert_instantiate(const Certificate& cert, const std::string& var,
                             const Formula& replacement) {
  Certificate out;
  out.logic_n = cert.logic_n;
  out.goal = substitute(cert.goal, var, replacement);
  out.lines.reserve(cert.lines.size());
  for (const ProofLine& line : cert.lines)
    out.lines.push_back(ProofLine{substitute(line.formula, var, replacement),
                                  line.rule, line.premises});
  return out;
}

// ---------------------------------------------------------------------------
// Worked example: the two fixed points of box box ~p over n = 3 agree.

Certificate derive_wgl3_two_fixed_points_equal() {
  const unsigned n = 3;
  CertBuilder b(n);
  using LineId = CertBuilder::LineId;
  const Formula top = Formula::verum();
  const Formula d2t = dia_power(2, top);                 // dia^2 true
  const Formula lhs = box_power(2, d2t);                 // box^2 dia^2 true
  const Formula bot2 = box_power(2, Formula::falsum());  // box^2 false
  const Formula rhs = box_power(2, dia_power(2, bot2));  // box^2 dia^2 box^2 false

  // (<-) box^2 dia^2 box^2 false -> box^2 dia^2 true.
  LineId easy = b.regularity(
      b.dia_mono(b.dia_mono(b.taut(Formula::implies(bot2, top)))), 2);

  // (->) Refute D = dia^2 true & box^2 dia^2 true & box^3 dia^2 true.
  const Formula d = conj_chain({d2t, box_power(2, d2t), box_power(3, d2t)});

  // Step 1: D -> D & box^5 & box^6.
  LineId tr1 = b.trans_step(Formula::box(d2t));        // box^2 -> box^5
  LineId tr2 = b.trans_step(box_power(2, d2t));        // box^3 -> box^6

  // Step 2: ... -> dia^2 G with G = dia^2 true & box dia^2 true &
  //                                box^3 dia^2 true & box^4 dia^2 true.
  const Formula g = conj_chain({d2t, Formula::box(d2t), box_power(3, d2t),
                                box_power(4, d2t)});
  LineId cb_g = b.collect_boxes({d2t, Formula::box(d2t), box_power(3, d2t),
                                 box_power(4, d2t)});  // ante -> box G
  LineId cb_g2 = b.collect_boxes({Formula::box(d2t), box_power(2, d2t),
                                  box_power(4, d2t), box_power(5, d2t)});
  LineId d_g = b.regularity(cb_g);                     // box ante -> box^2 G
  LineId mg2 = b.dia_box_merge(2, top, g);             // dia^2 T & box^2 G -> dia^2 (T & G)
  LineId mn2 = b.dia_mono(b.dia_mono(b.taut(Formula::implies(
      Formula::conj(top, g), g))));                    // dia^2 (T&G) -> dia^2 G

  // Step 3: G -> dia D.
  LineId cb_d = b.collect_boxes({d2t, box_power(2, d2t), box_power(3, d2t)});
  LineId mg1 = b.dia_box_merge(1, Formula::dia(top), d);
  LineId mn1 = b.dia_mono(b.taut(Formula::implies(
      Formula::conj(Formula::dia(top), d), d)));
  LineId g_to_diad = b.taut_chain(
      Formula::implies(g, Formula::dia(d)), {cb_d, mg1, mn1});

  // Step 4: dia^2 G -> dia^3 D, and the full chain D -> dia^3 D.
  LineId lift = b.dia_mono(b.dia_mono(g_to_diad));
  LineId d_to_d3 = b.taut_chain(
      Formula::implies(d, dia_power(3, d)),
      {tr1, tr2, cb_g2, d_g, mg2, mn2, lift});

  // Step 5: Loeb rule on ~D.
  LineId dn3 = b.dia_negbox(3, d);
  LineId lob_premise = b.taut_chain(
      Formula::implies(boxdot(n, Formula::neg(d)), Formula::neg(d)),
      {d_to_d3, dn3});
  LineId not_d = b.lob(lob_premise);

  // Step 6: ~dia^2 D.
  LineId nn = b.nec(b.nec(not_d));  // box^2 ~D
  LineId dn2 = b.dia_negbox(2, d);
  LineId not_d2 = b.taut_chain(Formula::neg(dia_power(2, d)), {nn, dn2});

  // Step 7: box^2 dia^2 true & dia^2 box^2 dia^2 true -> dia^2 D.
  const Formula w = Formula::conj(d2t, box_power(3, d2t));
  LineId cb_w = b.collect_boxes({d2t, box_power(3, d2t)});  // -> box W
  LineId cb_w2 = b.collect_boxes({Formula::box(d2t), box_power(4, d2t)});
  LineId d_w = b.regularity(cb_w);                          // -> box^2 W
  LineId mg_w = b.dia_box_merge(2, lhs, w);
  LineId mn_w = b.dia_mono(b.dia_mono(b.taut(Formula::implies(
      Formula::conj(lhs, w), d))));
  LineId to_d2d = b.taut_chain(
      Formula::implies(Formula::conj(lhs, dia_power(2, lhs)),
                       dia_power(2, d)),
      {tr1, cb_w2, d_w, mg_w, mn_w});

  // Step 8: box^2 dia^2 true -> ~dia^2 box^2 dia^2 true.
  LineId q1 = b.taut_chain(
      Formula::implies(lhs, Formula::neg(dia_power(2, lhs))), {to_d2d, not_d2});

  // Step 9: normalize to the stated goal.
  //   dia^2 box^2 false <-> ~box^2 dia^2 true
  LineId dn_b = b.dia_negbox(2, bot2);  // dia^2 box^2 false <-> ~box^2 ~box^2 false
  LineId dn_t = b.dia_negbox(2, top);   // dia^2 true <-> ~box^2 ~true
  LineId nt = b.taut(Formula::iff(Formula::neg(top), Formula::falsum()));
  LineId bb_nt = b.box_both(b.box_both(nt));  // box^2 ~true <-> box^2 false
  //   dia^2 true <-> ~box^2 false
  LineId eq_a = b.taut_chain(
      Formula::iff(d2t, Formula::neg(bot2)), {dn_t, bb_nt});
  //   ~box^2 false <-> dia^2 true  boxed twice after negation juggling:
  LineId eq_a_flip = b.taut_chain(
      Formula::iff(Formula::neg(bot2), d2t), {eq_a});
  LineId bb_eq = b.box_both(b.box_both(eq_a_flip));  // box^2 ~box^2 false <-> box^2 dia^2 true
  //   dia^2 box^2 false <-> ~box^2 dia^2 true
  LineId eq_b = b.taut_chain(
      Formula::iff(dia_power(2, bot2), Formula::neg(lhs)), {dn_b, bb_eq});
  LineId eq_b_flip = b.taut_chain(
      Formula::iff(Formula::neg(lhs), dia_power(2, bot2)), {eq_b});
  LineId bb_eq_b = b.box_both(b.box_both(eq_b_flip));
  // box^2 (~box^2 dia^2 true) <-> box^2 dia^2 box^2 false

  LineId dn_lhs = b.dia_negbox(2, lhs);  // dia^2 lhs <-> ~box^2 ~lhs
  LineId forward = b.taut_chain(Formula::implies(lhs, rhs),
                                {q1, dn_lhs, bb_eq_b});
  Formula goal = Formula::iff(lhs, rhs);
  b.taut_chain(goal, {forward, easy});
  return b.certificate(goal);
}

}  // namespace wgl
