#include <doctest.h>

#include "flv/frontend.hpp"
#include "flv/reduction.hpp"

using namespace flv;
using namespace flv::logic;
namespace fe = flv::frontend;
namespace rd = flv::reduction;

namespace {

std::pair<transition_spec, semantics_decl> mini_system() {
    return fe::parse_system(R"(
sort thread
relation (sched thread)
relation (waiting thread)
relation (critical thread)
relation (p)
init true
transition true
)");
}

}  // namespace

TEST_CASE("negate_and_skolemize: ticket-shaped property") {
    auto [spec, sem] = mini_system();
    auto prop = fe::parse_formula_text(
        "(-> (forall ((x thread)) (G (F (sched x))))"
        " (forall ((x thread)) (G (-> (waiting x) (F (critical x))))))",
        spec.sig);
    auto sk = rd::negate_and_skolemize(prop, spec.sig);
    REQUIRE(sk.added_constants.size() == 1);
    // sk(not phi) = (forall x. G F sched(x)) and not G(waiting(x0) -> F critical(x0))
    REQUIRE(sk.formula->kind == connective::land);
    CHECK(sk.formula->children[0]->kind == connective::forall);
    CHECK(sk.formula->children[1]->kind == connective::lnot);
    CHECK(sk.formula->children[1]->children[0]->kind == connective::globally);
    CHECK(free_vars(sk.formula).empty());
}

TEST_CASE("negate_and_skolemize: G p stays untouched") {
    auto [spec, sem] = mini_system();
    auto prop = fe::parse_formula_text("(G p)", spec.sig);
    auto sk = rd::negate_and_skolemize(prop, spec.sig);
    CHECK(sk.added_constants.empty());
    CHECK(sk.formula->kind == connective::lnot);
}

TEST_CASE("negate_and_skolemize: flag disabled leaves negation alone") {
    auto [spec, sem] = mini_system();
    auto prop = fe::parse_formula_text("(forall ((x thread)) (F (sched x)))", spec.sig);
    auto off = rd::negate_and_skolemize(prop, spec.sig, false);
    CHECK(off.formula->kind == connective::lnot);
    CHECK(off.added_constants.empty());
    auto on = rd::negate_and_skolemize(prop, spec.sig, true);
    CHECK(on.added_constants.size() == 1);
    // enabled: not forall becomes exists, then a constant: not F sched(c)
    CHECK(on.formula->kind == connective::lnot);
    CHECK(on.formula->children[0]->kind == connective::eventually);
}

TEST_CASE("closure: forall x. G F sched(x) yields the five-timer list") {
    auto [spec, sem] = mini_system();
    auto psi = fe::parse_formula_text("(forall ((x thread)) (G (F (sched x))))", spec.sig);
    auto cl = rd::closure(psi);
    REQUIRE(cl.size() == 5);
    // children precede parents; root is last here
    CHECK(cl.root == cl.size() - 1);
    CHECK(cl.find(fe::parse_formula_text("(sched x)", spec.sig, {{"x", "thread"}})));
    CHECK(cl.find(fe::parse_formula_text("(F (sched x))", spec.sig, {{"x", "thread"}})));
    CHECK(cl.find(fe::parse_formula_text("(not (F (sched x)))", spec.sig, {{"x", "thread"}})));
    CHECK(cl.find(fe::parse_formula_text("(G (F (sched x)))", spec.sig, {{"x", "thread"}})));
    CHECK(cl.find(psi));
}

TEST_CASE("closure: atomic and shared-subformula dedup") {
    auto [spec, sem] = mini_system();
    auto p = fe::parse_formula_text("p", spec.sig);
    CHECK(rd::closure(p).size() == 1);
    auto twice = fe::parse_formula_text("(and (G p) (G p))", spec.sig);
    auto cl = rd::closure(twice);
    // p, G p, not p (dual), and-node
    CHECK(cl.size() == 4);
}

TEST_CASE("timer_axioms: table rows") {
    auto [spec, sem] = mini_system();
    rd::timer_vocabulary voc;

    auto row_of = [&](const std::string& prop_text, const std::string& psi_text,
                      const std::vector<var_decl>& vars = {}) {
        auto root = fe::parse_formula_text(prop_text, spec.sig);
        auto cl = rd::closure(root);
        auto gamma = rd::timer_axioms(cl);
        auto sig_t = rd::timer_signature(spec.sig, cl);
        sort_check(gamma, sig_t);
        auto psi = fe::parse_formula_text(psi_text, spec.sig, vars);
        return std::pair(cl, psi);
    };

    SUBCASE("atomic R(x): t=0 <-> R(x)") {
        auto [cl, psi] = row_of("(forall ((x thread)) (sched x))", "(sched x)",
                                {{"x", "thread"}});
        const auto* e = cl.find(psi);
        REQUIRE(e);
        CHECK(e->params.size() == 1);
    }
    SUBCASE("G row mentions the dual timer at infinity") {
        auto root = fe::parse_formula_text("(G p)", spec.sig);
        auto cl = rd::closure(root);
        auto gamma = rd::timer_axioms(cl);
        std::string printed = fe::print_formula(gamma);
        const auto* dual = cl.find(fe::parse_formula_text("(not p)", spec.sig));
        REQUIRE(dual);
        CHECK(printed.find(dual->timer) != std::string::npos);
        CHECK(printed.find(voc.inf) != std::string::npos);
    }
    SUBCASE("F row: t=0 <-> t_inner < inf") {
        auto root = fe::parse_formula_text("(F p)", spec.sig);
        auto cl = rd::closure(root);
        auto gamma = rd::timer_axioms(cl);
        std::string printed = fe::print_formula(gamma);
        const auto* inner = cl.find(fe::parse_formula_text("p", spec.sig));
        REQUIRE(inner);
        CHECK(printed.find(inner->timer) != std::string::npos);
    }
    SUBCASE("U row is a one-directional implication in Gamma") {
        auto root = fe::parse_formula_text("(U p (sched x))", spec.sig, {{"x", "thread"}});
        // close it to make a property-like root
        root = mk_forall("x", "thread", root);
        auto cl = rd::closure(root);
        auto gamma = rd::timer_axioms(cl);
        auto sig_t = rd::timer_signature(spec.sig, cl);
        CHECK_NOTHROW(sort_check(gamma, sig_t));
    }
}

TEST_CASE("timer_transition: rows and omission for atoms") {
    auto [spec, sem] = mini_system();
    auto root = fe::parse_formula_text("(F p)", spec.sig);
    auto cl = rd::closure(root);
    auto tau = rd::timer_transition(cl);
    auto sig_t = rd::timer_signature(spec.sig, cl);
    CHECK_NOTHROW(sort_check(tau, sig_t, {true, false}));
    std::string printed = fe::print_formula(tau);
    // the F row mentions the primed F-timer
    const auto* e = cl.find(root);
    REQUIRE(e);
    CHECK(printed.find(e->timer + "'") != std::string::npos);
    // atomic rows omit the biconditional: t_p' appears only in decrease/persist
    const auto* p = cl.find(fe::parse_formula_text("p", spec.sig));
    REQUIRE(p);
}

TEST_CASE("timer_system: single-timer atomic system") {
    auto [spec, sem] = mini_system();
    auto p = fe::parse_formula_text("p", spec.sig);
    auto ts = rd::timer_system(p, spec.sig);
    auto cl = rd::closure(p);
    CHECK(ts.init->kind == connective::equal);
    CHECK_NOTHROW(sort_check(ts.axioms, ts.sig));
    CHECK_NOTHROW(sort_check(ts.trans, ts.sig, {true, false}));
}

TEST_CASE("timer naming is deterministic and collision-checked") {
    auto [spec, sem] = mini_system();
    auto psi = fe::parse_formula_text("(forall ((x thread)) (G (F (sched x))))", spec.sig);
    auto a = rd::closure(psi);
    auto b = rd::closure(psi);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a.at(i).timer == b.at(i).timer);
}

TEST_CASE("product: profile clash is an error") {
    auto [spec1, sem1] = mini_system();
    auto [spec2, sem2] = fe::parse_system(R"(
sort other
relation (p other)
init true
transition true
)");
    CHECK_THROWS_AS((void)rd::product(spec1, spec2), flv_error);
}

TEST_CASE("augment: ticket closure has 13 timers") {
    auto [spec, sem] = fe::parse_system(R"(
sort thread
relation (scheduled thread)
relation (waiting thread)
relation (critical thread)
init true
transition true
)");
    auto prop = fe::parse_formula_text(
        "(-> (forall ((x thread)) (G (F (scheduled x))))"
        " (forall ((x thread)) (G (-> (waiting x) (F (critical x))))))",
        spec.sig);
    auto aug = rd::augment(spec, prop);
    // Independent hand count of sub(sk(not phi)): the conjunction, the
    // fairness side (forall, GF, F, sched, not-F dual), the starvation side
    // (not G, G, imp, waiting, F crit, crit, plus the G-dual not-imp).
    CHECK(aug.closure.size() == 13);
    CHECK(aug.skolem_constants.size() == 1);
    CHECK_NOTHROW(sort_check(aug.combined.axioms, aug.combined.sig));
    CHECK_NOTHROW(sort_check(aug.combined.trans, aug.combined.sig, {true, false}));
    CHECK_NOTHROW(sort_check(aug.combined.init, aug.combined.sig));
}

TEST_CASE("augment: property true pins the root timer") {
    auto [spec, sem] = mini_system();
    auto prop = fe::parse_formula_text("true", spec.sig);
    auto aug = rd::augment(spec, prop);
    // closure of "not true" = {not true, true}
    CHECK(aug.closure.size() == 2);
    CHECK(fe::print_formula(aug.timer_part.init).find("t!") != std::string::npos);
}

TEST_CASE("timer count equals closure size; every timer appears in Gamma and tau") {
    auto [spec, sem] = mini_system();
    auto prop = fe::parse_formula_text("(forall ((x thread)) (G (F (sched x))))", spec.sig);
    auto aug = rd::augment(spec, prop);
    std::string gamma = fe::print_formula(aug.timer_part.axioms);
    std::string tau = fe::print_formula(aug.timer_part.trans);
    for (const auto& e : aug.closure.entries) {
        CHECK(gamma.find(e.timer) != std::string::npos);
        CHECK(tau.find(e.timer) != std::string::npos);
    }
}
