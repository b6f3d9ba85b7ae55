// Tests for the fixed-point construction: golden stage lists for the worked
// examples, the documented shortcut table, decomposition, simultaneous
// systems, and kernel-checked certificates for every construction path.

#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "support/gen.hpp"
#include "wgl/depth.hpp"
#include "wgl/kernel.hpp"
#include "wgl/synth.hpp"

using namespace wgl;
using wgl::test::random_modalized;

namespace {

Formula fml(const std::string& text) {
  return parse(text, ParseOptions{true});
}

void require_checks(const Certificate& cert) {
  CheckReport report = check(cert);
  INFO("kernel rejection at line " << report.line << ": " << report.message);
  REQUIRE(report.ok);
}

std::vector<std::string> labels(const SynthTrace& trace) {
  std::vector<std::string> out;
  for (const TraceStage& s : trace.stages) out.push_back(s.label);
  return out;
}

Formula stage(const SynthTrace& trace, const std::string& label) {
  for (const TraceStage& s : trace.stages)
    if (s.label == label) return s.formula;
  FAIL("no stage labeled " << label);
  return Formula::falsum();
}

Formula equation_goal(const Formula& a, const std::string& p,
                      const Formula& f) {
  return Formula::iff(f, substitute(a, p, f));
}

bool box_free(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Falsum:
    case Formula::Kind::Var:
      return true;
    case Formula::Kind::Box:
      return false;
    case Formula::Kind::Implies:
      return box_free(f.left()) && box_free(f.right());
  }
  return false;
}

}  // namespace

TEST_CASE("zero instance replaces exactly the residue-0 occurrences") {
  CHECK(zero_instance(fml("box (p & box p)"), "p", 2) ==
        fml("box (p & box true)"));
  CHECK(zero_instance(fml("box box ~p"), "p", 3) == fml("box box ~p"));
  CHECK(zero_instance(fml("box q"), "p", 2) == fml("box q"));
  // At n = 1 every occurrence sits at residue 0.
  CHECK(zero_instance(fml("box (p & box p)"), "p", 1) ==
        fml("box (true & box true)"));
  CHECK_THROWS_AS(zero_instance(fml("~box p"), "p", 2), std::invalid_argument);
  CHECK_THROWS_AS(zero_instance(fml("box p"), "p", 0), std::invalid_argument);
}

TEST_CASE("shifting sequence follows the residue rotation rule") {
  SECTION("first element is the input itself") {
    Formula b = fml("box (p & box p)");
    auto elems = shifting_sequence(b, "p", 1, 2, 1);
    REQUIRE(elems.size() == 2);
    CHECK(elems[0] == b);
    // Only the depth-1 occurrence sits at residue 1; the depth-2 one stays.
    CHECK(elems[1] == fml("box (box (p & box p) & box p)"));
  }
  SECTION("each step substitutes the base at the rotated residue") {
    // Depth-3 walkthrough: base has occurrences at depths {1, 2}; shifting
    // with k = 2 touches the depth-2 occurrence first.
    Formula base = fml("box (p & (box p & box box true))");
    auto elems = shifting_sequence(base, "p", 2, 3, 1);
    REQUIRE(elems.size() == 2);
    CHECK(elems[1] ==
          fml("box (p & (box box (p & (box p & box box true)) & "
              "box box true))"));
  }
  SECTION("single-residue base composes with itself") {
    Formula base = fml("box (p & (box box (true & (box p & box box true)) & "
                       "box box true))");
    REQUIRE(dep_mod(base, "p", 3) == std::set<unsigned>{1});
    auto elems = shifting_sequence(base, "p", 1, 3, 2);
    REQUIRE(elems.size() == 3);
    CHECK(elems[1] == substitute(base, "p", base));
    CHECK(elems[2] == substitute(base, "p", substitute(base, "p", base)));
  }
  SECTION("absent variable leaves every element equal") {
    Formula b = fml("box (q -> box false)");
    auto elems = shifting_sequence(b, "p", 0, 2, 3);
    REQUIRE(elems.size() == 4);
    for (const Formula& e : elems) CHECK(e == b);
  }
  SECTION("argument validation") {
    CHECK_THROWS_AS(shifting_sequence(fml("p -> box p"), "p", 1, 2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(shifting_sequence(fml("box p"), "p", 1, 2, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("worked example at n = 2 reproduces the stage list") {
  Formula b0 = fml("box (p & box p)");
  FixedPointResult r = boxed_fixed_point(b0, "p", 2, true);

  CHECK(labels(r.trace) == std::vector<std::string>{"B0", "B0'", "B1", "F"});
  CHECK(stage(r.trace, "B0") == b0);
  CHECK(stage(r.trace, "B0'") == fml("box (p & box true)"));
  CHECK(stage(r.trace, "B1") == fml("box (box (p & box true) & box true)"));
  Formula f = fml("box (box (true & box true) & box true)");
  CHECK(stage(r.trace, "F") == f);
  CHECK(r.fixed_point == f);
  CHECK(r.trace.input == b0);
  CHECK(r.trace.n == 2);

  // Each stage is one construction step away from its predecessor.
  CHECK(stage(r.trace, "B0'") == zero_instance(b0, "p", 2));
  CHECK(stage(r.trace, "B1") ==
        shifting_sequence(stage(r.trace, "B0'"), "p", 1, 2, 1)[1]);
  CHECK(f == substitute(stage(r.trace, "B1"), "p", Formula::verum()));

  REQUIRE(r.certificate.has_value());
  require_checks(*r.certificate);
  CHECK(r.certificate->goal == equation_goal(b0, "p", f));
  CHECK(r.certificate->logic_n == 2);
}

TEST_CASE("worked example at n = 3 reproduces the stage list") {
  Formula b0 = fml("box (p & (box p & box box p))");
  FixedPointResult r = boxed_fixed_point(b0, "p", 3, true);

  CHECK(labels(r.trace) == std::vector<std::string>{"B0", "B0'", "B1", "B1'",
                                                    "C1,1", "B2", "F"});
  Formula b0p = fml("box (p & (box p & box box true))");
  Formula b1 = fml("box (p & (box box (p & (box p & box box true)) & "
                   "box box true))");
  Formula b1p = fml("box (p & (box box (true & (box p & box box true)) & "
                    "box box true))");
  Formula c11 = substitute(b1p, "p", b1p);
  Formula b2 = substitute(c11, "p", b1p);
  Formula f = substitute(b2, "p", Formula::verum());

  CHECK(stage(r.trace, "B0") == b0);
  CHECK(stage(r.trace, "B0'") == b0p);
  CHECK(stage(r.trace, "B1") == b1);
  CHECK(stage(r.trace, "B1'") == b1p);
  CHECK(stage(r.trace, "C1,1") == c11);
  CHECK(stage(r.trace, "B2") == b2);
  CHECK(stage(r.trace, "F") == f);
  CHECK(r.fixed_point == f);

  // Loop-invariant spot check at each recorded stage.
  CHECK(dep_mod(b1, "p", 3) == std::set<unsigned>{0, 1});
  CHECK(dep_mod(b1p, "p", 3) == std::set<unsigned>{1});
  CHECK(dep_mod(b2, "p", 3) == std::set<unsigned>{0});

  REQUIRE(r.certificate.has_value());
  require_checks(*r.certificate);
  CHECK(r.certificate->goal == equation_goal(b0, "p", f));
  CHECK(r.certificate->logic_n == 3);
}

TEST_CASE("trace serialization is a JSON array of label/formula pairs") {
  FixedPointResult r = boxed_fixed_point(fml("box (p & box p)"), "p", 2);
  std::string text = trace_to_json(r.trace);
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');

  nlohmann::json doc = nlohmann::json::parse(text);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 4);
  CHECK(doc[0]["label"] == "B0");
  CHECK(doc[3]["label"] == "F");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    REQUIRE(doc[i].is_object());
    REQUIRE(doc[i].size() == 2);
    std::string rendered = doc[i]["formula"].get<std::string>();
    // Sugar-free grammar: primitive connectives only, and it round-trips.
    CHECK(rendered.find('&') == std::string::npos);
    CHECK(rendered.find('~') == std::string::npos);
    CHECK(parse(rendered, ParseOptions{true}) == r.trace.stages[i].formula);
    CHECK(rendered == to_text(r.trace.stages[i].formula, PrintOptions{false}));
  }
}

TEST_CASE("shortcut fixed points follow the documented table") {
  SECTION("single nonzero residue gives the n-fold composition") {
    Formula a = fml("box box ~p");
    REQUIRE(dep_mod(a, "p", 3) == std::set<unsigned>{2});
    auto g = simple_fixed_point(a, "p", 3);
    REQUIRE(g.has_value());
    CHECK(*g == substitute(iterate(a, "p", 3), "p", Formula::verum()));
    CHECK(simplify(*g) == fml("box box ~box box ~box box false"));
  }
  SECTION("residue-zero profile substitutes truth directly") {
    Formula a = fml("box box p");
    REQUIRE(dep_mod(a, "p", 2) == std::set<unsigned>{0});
    auto g = simple_fixed_point(a, "p", 2);
    REQUIRE(g.has_value());
    CHECK(*g == fml("box box true"));
  }
  SECTION("n = 1 always substitutes truth directly") {
    auto g = simple_fixed_point(fml("box (p & box p)"), "p", 1);
    REQUIRE(g.has_value());
    CHECK(*g == fml("box (true & box true)"));
  }
  SECTION("absent variable is its own fixed point") {
    auto g = simple_fixed_point(fml("box q"), "p", 2);
    REQUIRE(g.has_value());
    CHECK(*g == fml("box q"));
  }
  SECTION("mixed residues have no shortcut") {
    CHECK(!simple_fixed_point(fml("box (p & box p)"), "p", 2).has_value());
    CHECK(!simple_fixed_point(fml("box (p & box p)"), "p", 3).has_value());
  }
  SECTION("argument validation") {
    CHECK_THROWS_AS(simple_fixed_point(fml("~p"), "p", 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(simple_fixed_point(fml("box p"), "p", 0),
                    std::invalid_argument);
  }
}

TEST_CASE("shortcut and loop coincide at n = 2 and n = 1") {
  for (const char* text : {"box box p", "box (q -> box box p)"}) {
    Formula a = fml(text);
    auto g = simple_fixed_point(a, "p", 2);
    FixedPointResult r = boxed_fixed_point(a, "p", 2, true);
    REQUIRE(g.has_value());
    CHECK(*g == r.fixed_point);
    require_checks(*r.certificate);
  }
  // n = 1: the loop degenerates to the same direct substitution.
  Formula a = fml("box (p & box p)");
  FixedPointResult r = boxed_fixed_point(a, "p", 1, true);
  CHECK(r.fixed_point == *simple_fixed_point(a, "p", 1));
  CHECK(labels(r.trace) == std::vector<std::string>{"B0", "F"});
  require_checks(*r.certificate);
  CHECK(r.certificate->goal == equation_goal(a, "p", r.fixed_point));
}

TEST_CASE("loop output for a single-residue input is the doubled composition") {
  // The loop and the shortcut may return syntactically different fixed
  // points; for box box ~p at n = 3 the loop composes six copies.
  Formula a = fml("box box ~p");
  FixedPointResult r = boxed_fixed_point(a, "p", 3, true);
  CHECK(r.fixed_point ==
        substitute(iterate(a, "p", 6), "p", Formula::verum()));
  require_checks(*r.certificate);
  CHECK(r.certificate->goal == equation_goal(a, "p", r.fixed_point));
}

TEST_CASE("boxed fixed point handles degenerate inputs") {
  SECTION("absent variable returns the input with a reflexive certificate") {
    Formula a = fml("box (q -> box false)");
    FixedPointResult r = boxed_fixed_point(a, "p", 3, true);
    CHECK(r.fixed_point == a);
    CHECK(labels(r.trace) == std::vector<std::string>{"B0", "F"});
    require_checks(*r.certificate);
    CHECK(r.certificate->goal == Formula::iff(a, a));
  }
  SECTION("argument validation") {
    CHECK_THROWS_AS(boxed_fixed_point(fml("p -> box p"), "p", 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(boxed_fixed_point(fml("box p"), "p", 0),
                    std::invalid_argument);
  }
}

TEST_CASE("decompose abstracts maximal boxed subformulas") {
  SECTION("single part") {
    Decomposition d = decompose(fml("~box p"), "p");
    REQUIRE(d.holes == std::vector<std::string>{"_fp0"});
    REQUIRE(d.parts == std::vector<Formula>{fml("box p")});
    CHECK(d.skeleton == fml("~_fp0"));
  }
  SECTION("two parts in leftmost-first order") {
    Decomposition d = decompose(fml("box p -> box ~p"), "p");
    REQUIRE(d.holes == std::vector<std::string>{"_fp0", "_fp1"});
    REQUIRE(d.parts == std::vector<Formula>{fml("box p"), fml("box ~p")});
    CHECK(d.skeleton == fml("_fp0 -> _fp1"));
  }
  SECTION("no boxes at all") {
    Decomposition d = decompose(fml("q"), "p");
    CHECK(d.holes.empty());
    CHECK(d.parts.empty());
    CHECK(d.skeleton == fml("q"));
  }
  SECTION("identical boxed subformulas share one variable") {
    Decomposition d = decompose(fml("box p -> box p"), "p");
    REQUIRE(d.holes == std::vector<std::string>{"_fp0"});
    CHECK(d.skeleton == fml("_fp0 -> _fp0"));
  }
  SECTION("fresh variables dodge collisions") {
    Decomposition d = decompose(fml("box p -> _fp0"), "p");
    REQUIRE(d.holes == std::vector<std::string>{"_fp1"});
    CHECK(d.skeleton == fml("_fp1 -> _fp0"));
  }
  SECTION("skeleton is box-free and reconstruction is exact") {
    Formula a = fml("(box (p & box q) -> ~box p) -> box (p & box q)");
    Decomposition d = decompose(a, "p");
    CHECK(box_free(d.skeleton));
    CHECK(substitute_all(d.skeleton, d.holes, d.parts) == a);
    // Maximality: nested boxes stay inside their part.
    REQUIRE(d.parts.size() == 2);
    CHECK(d.parts[0] == fml("box (p & box q)"));
    CHECK(d.parts[1] == fml("box p"));
  }
  SECTION("bare occurrence outside all boxes is rejected") {
    CHECK_THROWS_AS(decompose(fml("p -> box p"), "p"), std::invalid_argument);
  }
}

TEST_CASE("simultaneous systems solve by back-substitution") {
  SECTION("one equation coincides with the direct construction") {
    Formula b = fml("box (p1 & box p1)");
    SimultaneousResult s =
        simultaneous_fixed_points({b}, {"p1"}, 2, true);
    FixedPointResult r = boxed_fixed_point(b, "p1", 2, true);
    REQUIRE(s.fixed_points.size() == 1);
    CHECK(s.fixed_points[0] == r.fixed_point);
    REQUIRE(s.stages.size() == r.trace.stages.size());
    CHECK(s.stages[0].label == "sys1.B0");
    require_checks(s.certificates[0]);
  }
  SECTION("coupled pair") {
    std::vector<Formula> system = {fml("box p2"), fml("box ~p1")};
    std::vector<std::string> vars = {"p1", "p2"};
    SimultaneousResult s = simultaneous_fixed_points(system, vars, 2, true);
    REQUIRE(s.fixed_points.size() == 2);
    CHECK(s.fixed_points[0] == fml("box box ~box true"));
    CHECK(s.fixed_points[1] == fml("box ~box true"));
    REQUIRE(s.certificates.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      require_checks(s.certificates[i]);
      CHECK(s.certificates[i].goal ==
            Formula::iff(s.fixed_points[i],
                         substitute_all(system[i], vars, s.fixed_points)));
    }
    for (const Formula& f : s.fixed_points) {
      CHECK(!has_var(f, "p1"));
      CHECK(!has_var(f, "p2"));
    }
    REQUIRE(!s.stages.empty());
    CHECK(s.stages.front().label.rfind("sys1.", 0) == 0);
    CHECK(s.stages.back().label.rfind("sys2.", 0) == 0);
  }
  SECTION("system without its unknowns solves to itself") {
    SimultaneousResult s = simultaneous_fixed_points(
        {fml("box q"), fml("box (r -> box false)")}, {"p1", "p2"}, 3, false);
    CHECK(s.fixed_points ==
          std::vector<Formula>{fml("box q"), fml("box (r -> box false)")});
  }
  SECTION("argument validation") {
    CHECK_THROWS_AS(simultaneous_fixed_points({}, {}, 2, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        simultaneous_fixed_points({fml("box p1")}, {"p1", "p2"}, 2, false),
        std::invalid_argument);
    CHECK_THROWS_AS(simultaneous_fixed_points({fml("box p1"), fml("box p1")},
                                              {"p1", "p1"}, 2, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        simultaneous_fixed_points({fml("~box p1")}, {"p1"}, 2, false),
        std::invalid_argument);
  }
}

TEST_CASE("general fixed points run through decomposition") {
  SECTION("negated box at n = 1") {
    Formula a = fml("~box p");
    FixedPointResult r = fixed_point(a, "p", 1, true);
    CHECK(r.fixed_point == fml("~box ~true"));
    CHECK(simplify(r.fixed_point) == fml("~box false"));
    CHECK(labels(r.trace) ==
          std::vector<std::string>{"A", "sys1.B0", "sys1.F", "F"});
    CHECK(r.trace.stages.front().formula == a);
    CHECK(r.trace.stages.back().formula == r.fixed_point);
    require_checks(*r.certificate);
    CHECK(r.certificate->goal == equation_goal(a, "p", r.fixed_point));
  }
  SECTION("two-part skeleton") {
    Formula a = fml("box p -> box ~p");
    FixedPointResult r = fixed_point(a, "p", 2, true);
    CHECK(!has_var(r.fixed_point, "p"));
    require_checks(*r.certificate);
    CHECK(r.certificate->goal == equation_goal(a, "p", r.fixed_point));
  }
  SECTION("box-rooted inputs dispatch to the plain construction") {
    Formula a = fml("box (p & box p)");
    FixedPointResult direct = boxed_fixed_point(a, "p", 2);
    FixedPointResult via = fixed_point(a, "p", 2);
    CHECK(via.fixed_point == direct.fixed_point);
    CHECK(labels(via.trace) == labels(direct.trace));
  }
  SECTION("absent variable") {
    Formula a = fml("~box q");
    FixedPointResult r = fixed_point(a, "p", 1, true);
    CHECK(r.fixed_point == a);
    CHECK(labels(r.trace) == std::vector<std::string>{"A", "F"});
    require_checks(*r.certificate);
  }
  SECTION("non-modalized inputs are rejected") {
    CHECK_THROWS_AS(fixed_point(fml("p"), "p", 1), std::invalid_argument);
    CHECK_THROWS_AS(fixed_point(fml("p & box p"), "p", 2),
                    std::invalid_argument);
  }
}

TEST_CASE("random construction obeys hygiene and certifies") {
  std::mt19937_64 rng(20260814);
  const std::vector<std::string> pool = {"p", "q"};
  for (int iter = 0; iter < 60; ++iter) {
    unsigned n = 1 + static_cast<unsigned>(iter % 3);
    Formula a = random_modalized(rng, "p", 10, pool);
    INFO("n = " << n << ", input: " << to_text(a));
    FixedPointResult r = fixed_point(a, "p", n, true);
    CHECK(!has_var(r.fixed_point, "p"));
    std::set<std::string> allowed = atoms(a);
    allowed.erase("p");
    for (const std::string& name : atoms(r.fixed_point))
      CHECK(allowed.count(name) == 1);
    REQUIRE(r.certificate.has_value());
    require_checks(*r.certificate);
    CHECK(r.certificate->goal == equation_goal(a, "p", r.fixed_point));
    CHECK(r.trace.stages.front().formula == a);
    CHECK(r.trace.stages.back().formula == r.fixed_point);
  }
}

TEST_CASE("identical runs serialize identically") {
  Formula a = fml("box (p & box p) -> box box ~p");
  FixedPointResult r1 = fixed_point(a, "p", 2, true);
  FixedPointResult r2 = fixed_point(a, "p", 2, true);
  CHECK(trace_to_json(r1.trace) == trace_to_json(r2.trace));
  CHECK(to_json(*r1.certificate) == to_json(*r2.certificate));
}

TEST_CASE("after-the-fact certificates validate the recorded result") {
  Formula a = fml("box (p & (box p & box box p))");
  FixedPointResult r = fixed_point(a, "p", 3, false);
  REQUIRE(!r.certificate.has_value());

  Certificate cert = derive_fixed_point_cert(a, "p", r, 3);
  require_checks(cert);
  CHECK(cert.goal == equation_goal(a, "p", r.fixed_point));

  FixedPointResult tampered = r;
  tampered.fixed_point = Formula::verum();
  CHECK_THROWS_AS(derive_fixed_point_cert(a, "p", tampered, 3),
                  std::invalid_argument);

  FixedPointResult relabeled = r;
  relabeled.trace.stages.front().label = "X0";
  CHECK_THROWS_AS(derive_fixed_point_cert(a, "p", relabeled, 3),
                  std::invalid_argument);

  // Wrong logic index: the trace cannot be reproduced at n = 2.
  CHECK_THROWS_AS(derive_fixed_point_cert(a, "p", r, 2),
                  std::invalid_argument);
}
