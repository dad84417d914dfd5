#include "flv/frontend.hpp"

#include <algorithm>
#include <sstream>

namespace flv::frontend {

using namespace logic;
using sexpr::node;

namespace {

// ---------------------------------------------------------------------------
// Formula / term parsing

struct infer_error : flv_error {
    using flv_error::flv_error;
};

struct fctx {
    const signature* sig = nullptr;
    bool allow_primed = false;
    bool allow_temporal = false;
    const reduction::sub_closure* closure = nullptr;  // (timer ...) resolution
    std::map<std::string, std::string>* free_sorts = nullptr;  // nullptr: closed only
    std::vector<var_decl> scope;

    std::optional<std::string> scope_sort(const std::string& name) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->name == name) return it->sort;
        return std::nullopt;
    }
};

std::pair<std::string, bool> split_prime(const std::string& tok) {
    if (!tok.empty() && tok.back() == '\'') return {tok.substr(0, tok.size() - 1), true};
    return {tok, false};
}

term_ptr parse_term(const node& n, fctx& cx, const std::string& expected);
formula_ptr parse_formula(const node& n, fctx& cx);

std::string available_timers(const reduction::sub_closure& cl);

term_ptr resolve_timer_form(const node& n, fctx& cx) {
    if (!cx.closure) fail("timer terms are not available in this context", n.span);
    if (n.size() < 2) fail("timer form needs a subformula", n.span);
    // The label's free variables live in their own little scope.
    fctx label_cx = cx;
    label_cx.scope.clear();
    std::map<std::string, std::string> label_free;
    label_cx.free_sorts = &label_free;
    label_cx.allow_primed = false;
    formula_ptr psi = parse_formula(n[1], label_cx);
    const reduction::closure_entry* e = cx.closure->find(psi);
    if (!e)
        fail("no timer for subformula " + print_formula(psi) +
                 "; available timers:\n" + available_timers(*cx.closure),
             n.span);
    if (n.size() - 2 != e->params.size())
        fail("timer for " + print_formula(psi) + " expects " +
                 std::to_string(e->params.size()) + " arguments",
             n.span);
    std::vector<term_ptr> args;
    for (size_t i = 2; i < n.size(); ++i)
        args.push_back(parse_term(n[i], cx, e->params[i - 2].sort));
    return reduction::timer_term(*e, std::move(args));
}

term_ptr parse_term(const node& n, fctx& cx, const std::string& expected) {
    const signature& sig = *cx.sig;
    if (n.atom) {
        auto [name, primed] = split_prime(n.text);
        if (!primed) {
            if (auto s = cx.scope_sort(name)) {
                if (!expected.empty() && *s != expected)
                    fail("variable '" + name + "' has sort '" + *s + "', expected '" +
                             expected + "'",
                         n.span);
                return mk_var(name, *s, n.span);
            }
        }
        if (sig.kind_of(name) == symbol_kind::constant) {
            if (primed && !cx.allow_primed)
                fail("primed symbol '" + n.text + "' outside a transition formula",
                     n.span);
            if (primed && sig.rigid.count(name)) primed = false;
            const auto& prof = sig.functions.at(name);
            if (!expected.empty() && prof.result != expected)
                fail("constant '" + name + "' has sort '" + prof.result +
                         "', expected '" + expected + "'",
                     n.span);
            return mk_const(name, primed, n.span);
        }
        if (primed) fail("unknown symbol '" + n.text + "'", n.span);
        if (cx.free_sorts) {
            auto it = cx.free_sorts->find(name);
            if (it != cx.free_sorts->end()) {
                if (!expected.empty() && it->second != expected)
                    fail("variable '" + name + "' has sort '" + it->second +
                             "', expected '" + expected + "'",
                         n.span);
                return mk_var(name, it->second, n.span);
            }
            if (!expected.empty()) {
                cx.free_sorts->emplace(name, expected);
                return mk_var(name, expected, n.span);
            }
            throw infer_error("cannot infer the sort of '" + name + "'", n.span);
        }
        fail("unknown symbol '" + name + "'", n.span);
    }
    if (n.size() == 0) fail("empty term", n.span);
    std::string head = n.head();
    if (head == "timer") return resolve_timer_form(n, cx);
    auto [name, primed] = split_prime(head);
    auto it = sig.functions.find(name);
    if (it == sig.functions.end() || it->second.args.empty())
        fail("unknown function '" + head + "'", n.span);
    if (primed && !cx.allow_primed)
        fail("primed symbol '" + head + "' outside a transition formula", n.span);
    if (primed && sig.rigid.count(name)) primed = false;
    const auto& prof = it->second;
    if (n.size() - 1 != prof.args.size())
        fail("function '" + name + "' expects " + std::to_string(prof.args.size()) +
                 " arguments, got " + std::to_string(n.size() - 1),
             n.span);
    if (!expected.empty() && prof.result != expected)
        fail("term of sort '" + prof.result + "' where '" + expected + "' was expected",
             n.span);
    std::vector<term_ptr> args;
    for (size_t i = 1; i < n.size(); ++i)
        args.push_back(parse_term(n[i], cx, prof.args[i - 1]));
    return mk_apply(name, std::move(args), primed, n.span);
}

// Parses (= a b) and t!lt sugar, where neither side's sort may be known
// upfront: parse left first, fall back to right when inference stalls.
std::pair<term_ptr, term_ptr> parse_term_pair(const node& n, fctx& cx,
                                              const std::string& expected) {
    std::map<std::string, std::string> saved;
    if (cx.free_sorts) saved = *cx.free_sorts;
    try {
        term_ptr a = parse_term(n[1], cx, expected);
        sort_check_options opt{cx.allow_primed, true};
        std::string sa = sort_check(a, *cx.sig, opt);
        term_ptr b = parse_term(n[2], cx, sa);
        return {a, b};
    } catch (const infer_error&) {
        if (cx.free_sorts) *cx.free_sorts = saved;
        term_ptr b = parse_term(n[2], cx, expected);
        sort_check_options opt{cx.allow_primed, true};
        std::string sb = sort_check(b, *cx.sig, opt);
        term_ptr a = parse_term(n[1], cx, sb);
        return {a, b};
    }
}

formula_ptr parse_quantifier(const node& n, fctx& cx, bool universal) {
    if (n.size() != 3 || n[1].atom)
        fail("expected (" + n.head() + " ((var sort)...) body)", n.span);
    std::vector<var_decl> vars;
    for (const auto& b : n[1].items) {
        if (b.atom || b.size() != 2 || !b[0].atom || !b[1].atom)
            fail("expected (var sort) binder", b.span);
        if (!cx.sig->has_sort(b[1].text)) fail("unknown sort '" + b[1].text + "'", b[1].span);
        vars.push_back({b[0].text, b[1].text});
    }
    if (vars.empty()) fail("empty binder list", n[1].span);
    size_t depth = cx.scope.size();
    for (const auto& v : vars) cx.scope.push_back(v);
    formula_ptr body = parse_formula(n[2], cx);
    cx.scope.resize(depth);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = universal ? mk_forall(it->name, it->sort, body)
                         : mk_exists(it->name, it->sort, body);
    return body;
}

formula_ptr parse_formula(const node& n, fctx& cx) {
    const signature& sig = *cx.sig;
    if (n.atom) {
        if (n.text == "true") return mk_verum();
        if (n.text == "false") return mk_falsum();
        auto [name, primed] = split_prime(n.text);
        auto it = sig.relations.find(name);
        if (it != sig.relations.end() && it->second.empty()) {
            if (primed && !cx.allow_primed)
                fail("primed symbol '" + n.text + "' outside a transition formula",
                     n.span);
            if (primed && sig.rigid.count(name)) primed = false;
            return mk_rel(name, {}, primed, n.span);
        }
        fail("expected a formula, got '" + n.text + "'", n.span);
    }
    if (n.size() == 0) fail("empty formula", n.span);
    std::string head = n.head();
    auto need = [&](size_t k) {
        if (n.size() != k + 1)
            fail("'" + head + "' expects " + std::to_string(k) + " arguments", n.span);
    };
    if (head == "and" || head == "or") {
        if (n.size() < 3) fail("'" + head + "' expects at least 2 arguments", n.span);
        std::vector<formula_ptr> parts;
        for (size_t i = 1; i < n.size(); ++i) parts.push_back(parse_formula(n[i], cx));
        return head == "and" ? mk_and_all(parts) : mk_or_all(parts);
    }
    if (head == "not") {
        need(1);
        return mk_not(parse_formula(n[1], cx));
    }
    if (head == "->") {
        if (n.size() < 3) fail("'->' expects at least 2 arguments", n.span);
        std::vector<formula_ptr> parts;
        for (size_t i = 1; i < n.size(); ++i) parts.push_back(parse_formula(n[i], cx));
        formula_ptr acc = parts.back();
        for (size_t i = parts.size() - 1; i-- > 0;) acc = mk_implies(parts[i], acc);
        return acc;
    }
    if (head == "<->") {
        need(2);
        return mk_iff(parse_formula(n[1], cx), parse_formula(n[2], cx));
    }
    if (head == "=") {
        need(2);
        auto [a, b] = parse_term_pair(n, cx, "");
        return mk_eq(a, b, n.span);
    }
    if (head == "t!lt") {
        need(2);
        const std::string tsort = cx.sig->timer_sort;
        if (tsort.empty()) fail("no timer sort in scope", n.span);
        auto [a, b] = parse_term_pair(n, cx, tsort);
        return reduction::timer_lt(a, b);
    }
    if (head == "forall") return parse_quantifier(n, cx, true);
    if (head == "exists") return parse_quantifier(n, cx, false);
    if (head == "G" || head == "F" || head == "X") {
        if (!cx.allow_temporal)
            fail("temporal operator '" + head + "' is not allowed here", n.span);
        need(1);
        formula_ptr a = parse_formula(n[1], cx);
        if (head == "G") return mk_globally(a);
        if (head == "F") return mk_eventually(a);
        return mk_next(a);
    }
    if (head == "U") {
        if (!cx.allow_temporal) fail("temporal operator 'U' is not allowed here", n.span);
        need(2);
        return mk_until(parse_formula(n[1], cx), parse_formula(n[2], cx));
    }
    auto [name, primed] = split_prime(head);
    auto it = sig.relations.find(name);
    if (it == sig.relations.end()) {
        if (sig.functions.count(name))
            fail("'" + name + "' is a function, not a relation", n.span);
        fail("unknown relation '" + head + "'", n.span);
    }
    if (primed && !cx.allow_primed)
        fail("primed symbol '" + head + "' outside a transition formula", n.span);
    if (primed && sig.rigid.count(name)) primed = false;
    if (n.size() - 1 != it->second.size())
        fail("relation '" + name + "' expects " + std::to_string(it->second.size()) +
                 " arguments, got " + std::to_string(n.size() - 1),
             n.span);
    std::vector<term_ptr> args;
    for (size_t i = 1; i < n.size(); ++i)
        args.push_back(parse_term(n[i], cx, it->second[i - 1]));
    return mk_rel(name, std::move(args), primed, n.span);
}

// ---------------------------------------------------------------------------
// Section scanner

const std::set<std::string> section_keywords = {
    "sort",     "relation", "function",      "constant", "axiom", "init",
    "transition", "property", "invariant",   "ranking",  "finite-approx", "hint"};

struct section {
    std::string keyword;
    source_span span;
    std::vector<node> args;
};

std::vector<section> scan_sections(const std::string& text) {
    std::vector<node> nodes = sexpr::parse_all(text);
    std::vector<section> out;
    size_t i = 0;
    while (i < nodes.size()) {
        const node& n = nodes[i];
        if (!n.atom || !section_keywords.count(n.text))
            fail("expected a section keyword, got '" + (n.atom ? n.text : std::string("(")) +
                     "'",
                 n.span);
        section s{n.text, n.span, {}};
        ++i;
        while (i < nodes.size() &&
               !(nodes[i].atom && section_keywords.count(nodes[i].text)))
            s.args.push_back(nodes[i++]);
        out.push_back(std::move(s));
    }
    return out;
}

int parse_int(const node& n) {
    if (!n.atom) fail("expected an integer", n.span);
    try {
        size_t used = 0;
        int v = std::stoi(n.text, &used);
        if (used != n.text.size()) fail("expected an integer, got '" + n.text + "'", n.span);
        return v;
    } catch (const flv_error&) {
        throw;
    } catch (...) {
        fail("expected an integer, got '" + n.text + "'", n.span);
    }
}

void check_user_name(const node& n) {
    if (!n.atom || !valid_user_name(n.text))
        fail("invalid identifier '" + (n.atom ? n.text : std::string("(...)")) + "'",
             n.span);
}

}  // namespace

// ---------------------------------------------------------------------------
// System files

std::pair<transition_spec, semantics_decl> parse_system(const std::string& text) {
    std::vector<section> sections = scan_sections(text);
    transition_spec spec;
    semantics_decl sem;
    std::map<std::string, source_span> decl_spans;

    // Pass 1: declarations.
    for (const auto& s : sections) {
        if (s.keyword == "sort") {
            if (s.args.empty() || s.args.size() > 2) fail("sort: expected a name", s.span);
            check_user_name(s.args[0]);
            if (auto it = decl_spans.find(s.args[0].text); it != decl_spans.end())
                fail("duplicate sort '" + s.args[0].text + "' (first declared at line " +
                         std::to_string(it->second.line) + ", column " +
                         std::to_string(it->second.col) + ")",
                     s.args[0].span);
            spec.sig.add_sort(s.args[0].text, s.args[0].span);
            decl_spans.emplace(s.args[0].text, s.args[0].span);
            if (s.args.size() == 2) {
                if (!s.args[1].is("finite")) fail("sort: expected 'finite'", s.args[1].span);
                sem.finite_sorts.insert(s.args[0].text);
            }
        } else if (s.keyword == "relation") {
            if (s.args.empty() || s.args.size() > 2 || s.args[0].atom)
                fail("relation: expected (name sort...)", s.span);
            const node& d = s.args[0];
            if (d.size() == 0) fail("relation: expected (name sort...)", d.span);
            check_user_name(d[0]);
            std::vector<std::string> args;
            for (size_t i = 1; i < d.size(); ++i) {
                check_user_name(d[i]);
                args.push_back(d[i].text);
            }
            spec.sig.add_relation(d[0].text, args, d[0].span);
            if (s.args.size() == 2) {
                if (!s.args[1].is("well-founded"))
                    fail("relation: expected 'well-founded'", s.args[1].span);
                if (args.size() != 2 || args[0] != args[1])
                    fail("well-founded flags require a binary relation over one sort",
                         s.args[1].span);
                sem.well_founded_relations.insert(d[0].text);
            }
        } else if (s.keyword == "function") {
            if (s.args.size() != 1 || s.args[0].atom)
                fail("function: expected (name sort... -> sort)", s.span);
            const node& d = s.args[0];
            if (d.size() < 4 || !d[d.size() - 2].is("->"))
                fail("function: expected (name sort... -> sort)", d.span);
            check_user_name(d[0]);
            std::vector<std::string> args;
            for (size_t i = 1; i + 2 < d.size(); ++i) {
                check_user_name(d[i]);
                args.push_back(d[i].text);
            }
            check_user_name(d[d.size() - 1]);
            spec.sig.add_function(d[0].text, args, d[d.size() - 1].text, d[0].span);
        } else if (s.keyword == "constant") {
            if (s.args.size() != 1 || s.args[0].atom || s.args[0].size() != 2)
                fail("constant: expected (name sort)", s.span);
            const node& d = s.args[0];
            check_user_name(d[0]);
            check_user_name(d[1]);
            spec.sig.add_constant(d[0].text, d[1].text, d[0].span);
        }
    }

    // Pass 2: formulas.
    std::vector<formula_ptr> axioms, inits, transitions;
    for (const auto& s : sections) {
        if (s.keyword != "axiom" && s.keyword != "init" && s.keyword != "transition")
            continue;
        if (s.args.size() != 1) fail(s.keyword + ": expected one formula", s.span);
        fctx cx;
        cx.sig = &spec.sig;
        cx.allow_primed = (s.keyword == "transition");
        formula_ptr f = parse_formula(s.args[0], cx);
        if (auto fv = free_vars(f); !fv.empty())
            fail(s.keyword + " formula must be closed; free: '" + fv[0].name + "'",
                 s.args[0].span);
        sort_check(f, spec.sig, {cx.allow_primed, false});
        if (s.keyword == "axiom")
            axioms.push_back(f);
        else if (s.keyword == "init")
            inits.push_back(f);
        else
            transitions.push_back(f);
    }
    for (const auto& s : sections)
        if (s.keyword == "property" || s.keyword == "invariant" || s.keyword == "ranking" ||
            s.keyword == "finite-approx" || s.keyword == "hint")
            fail("'" + s.keyword + "' does not belong in a system file", s.span);

    spec.axioms = axioms.empty() ? mk_verum() : mk_and_all(axioms);
    if (inits.empty()) fail("missing init");
    spec.init = mk_and_all(inits);
    if (transitions.empty()) fail("missing transition");
    spec.trans = mk_and_all(transitions);
    return {std::move(spec), std::move(sem)};
}

// ---------------------------------------------------------------------------
// Property files

formula_ptr parse_property(const std::string& text, const transition_spec& system) {
    std::vector<section> sections = scan_sections(text);
    formula_ptr prop;
    for (const auto& s : sections) {
        if (s.keyword != "property")
            fail("'" + s.keyword + "' does not belong in a property file", s.span);
        if (s.args.size() != 1) fail("property: expected one formula", s.span);
        if (prop) fail("multiple properties", s.span);
        fctx cx;
        cx.sig = &system.sig;
        cx.allow_temporal = true;
        prop = parse_formula(s.args[0], cx);
        if (auto fv = free_vars(prop); !fv.empty())
            fail("property must be closed; free: '" + fv[0].name + "'", s.args[0].span);
        sort_check(prop, system.sig, {false, true});
    }
    if (!prop) fail("missing property");
    return prop;
}

// ---------------------------------------------------------------------------
// Proof files

namespace {

std::string available_timers_impl(const reduction::sub_closure& cl) {
    std::ostringstream os;
    for (const auto& e : cl.entries) os << "  " << print_formula(e.psi) << "\n";
    return os.str();
}

ranking_expr parse_ranking_expr(const node& n, fctx& cx);

std::vector<ranking_expr> parse_ranking_children(const node& n, fctx& cx, size_t from,
                                                 size_t count_min) {
    std::vector<ranking_expr> out;
    for (size_t i = from; i < n.size(); ++i) out.push_back(parse_ranking_expr(n[i], cx));
    if (out.size() < count_min)
        fail("'" + n.head() + "' expects at least " + std::to_string(count_min) +
                 " child rankings",
             n.span);
    return out;
}

std::vector<var_decl> parse_var_names(const node& n) {
    std::vector<var_decl> out;
    if (n.atom) fail("expected a variable list", n.span);
    for (const auto& v : n.items) {
        if (!v.atom) fail("expected a variable name", v.span);
        out.push_back({v.text, ""});  // sorts are resolved when the ranking is built
    }
    if (out.empty()) fail("empty variable list", n.span);
    return out;
}

formula_ptr parse_open_formula(const node& n, fctx& cx) {
    // Ranking formulas may mention parameters as free variables.
    formula_ptr f = parse_formula(n, cx);
    return f;
}

ranking_expr parse_ranking_expr(const node& n, fctx& cx) {
    if (n.atom) fail("expected a ranking constructor, got '" + n.text + "'", n.span);
    std::string head = n.head();
    ranking_expr r;
    r.span = n.span;
    auto need = [&](size_t k) {
        if (n.size() != k + 1)
            fail("'" + head + "' expects " + std::to_string(k) + " arguments", n.span);
    };
    if (head == "Bin") {
        need(1);
        r.ctor = ranking_ctor::bin;
        r.alpha = parse_open_formula(n[1], cx);
        return r;
    }
    if (head == "PW" || head == "Lex") {
        r.ctor = head == "PW" ? ranking_ctor::pw : ranking_ctor::lex;
        r.children = parse_ranking_children(n, cx, 1, 1);
        return r;
    }
    if (head == "Pos") {
        need(2);
        r.ctor = ranking_ctor::pos;
        r.pos_term = parse_term(n[1], cx, "");
        if (!n[2].atom) fail("Pos: expected an order relation name", n[2].span);
        r.ord = n[2].text;
        return r;
    }
    if (head == "Cond") {
        need(2);
        r.ctor = ranking_ctor::cond;
        r.children.push_back(parse_ranking_expr(n[1], cx));
        r.alpha = parse_open_formula(n[2], cx);
        return r;
    }
    if (head == "DomPW") {
        need(2);
        r.ctor = ranking_ctor::dom_pw;
        r.children.push_back(parse_ranking_expr(n[1], cx));
        r.agg_vars = parse_var_names(n[2]);
        return r;
    }
    if (head == "DomLex") {
        need(3);
        r.ctor = ranking_ctor::dom_lex;
        r.children.push_back(parse_ranking_expr(n[1], cx));
        if (!n[2].atom) fail("DomLex: expected a variable", n[2].span);
        r.agg_vars = {{n[2].text, ""}};
        if (!n[3].atom) fail("DomLex: expected an order relation name", n[3].span);
        r.ord = n[3].text;
        return r;
    }
    if (head == "DomPerm") {
        need(3);
        r.ctor = ranking_ctor::dom_perm;
        r.children.push_back(parse_ranking_expr(n[1], cx));
        r.agg_vars = parse_var_names(n[2]);
        r.perm_k = parse_int(n[3]);
        if (r.perm_k < 0) fail("DomPerm: k must be nonnegative", n[3].span);
        return r;
    }
    if (head == "TimerRank") {
        need(2);
        r.ctor = ranking_ctor::timer_rank;
        if (!cx.closure) fail("TimerRank needs the timer closure", n.span);
        fctx label_cx = cx;
        label_cx.scope.clear();
        std::map<std::string, std::string> label_free;
        label_cx.free_sorts = &label_free;
        r.timer_label = parse_formula(n[1], label_cx);
        if (!cx.closure->find(r.timer_label))
            fail("no timer for subformula " + print_formula(r.timer_label) +
                     "; available timers:\n" + available_timers_impl(*cx.closure),
                 n.span);
        r.alpha = parse_open_formula(n[2], cx);
        return r;
    }
    fail("unknown ranking constructor '" + head + "'", n.span);
}

}  // namespace

namespace {
std::string available_timers(const reduction::sub_closure& cl) {
    return available_timers_impl(cl);
}
}  // namespace

proof_script parse_proof(const std::string& text, const reduction::augmented_spec& aug) {
    std::vector<section> sections = scan_sections(text);
    proof_script proof;
    const signature& sig = aug.combined.sig;

    for (const auto& s : sections) {
        if (s.keyword == "invariant") {
            std::string name;
            const node* body = nullptr;
            if (s.args.size() == 1) {
                body = &s.args[0];
            } else if (s.args.size() == 2 && s.args[0].atom) {
                name = s.args[0].text;
                body = &s.args[1];
            } else {
                fail("invariant: expected [name] formula", s.span);
            }
            if (name.empty())
                name = "inv" + std::to_string(proof.invariants.size() + 1);
            for (const auto& [n0, f0] : proof.invariants)
                if (n0 == name) fail("duplicate invariant name '" + name + "'", s.span);
            fctx cx;
            cx.sig = &sig;
            cx.closure = &aug.closure;
            formula_ptr f = parse_formula(*body, cx);
            if (auto fv = free_vars(f); !fv.empty())
                fail("invariant must be closed; free: '" + fv[0].name + "'", body->span);
            sort_check(f, sig);
            proof.invariants.emplace_back(name, f);
        } else if (s.keyword == "ranking") {
            if (s.args.size() != 1) fail("ranking: expected one constructor tree", s.span);
            if (proof.ranking) fail("multiple ranking sections", s.span);
            fctx cx;
            cx.sig = &sig;
            cx.closure = &aug.closure;
            std::map<std::string, std::string> free;
            cx.free_sorts = &free;
            proof.ranking = parse_ranking_expr(s.args[0], cx);
        } else if (s.keyword == "finite-approx") {
            finite_approx fa;
            fa.span = s.span;
            const node* vars = nullptr;
            const node* target = nullptr;
            const node* approx = nullptr;
            for (size_t i = 0; i < s.args.size(); ++i) {
                const node& a = s.args[i];
                if (a.is("m")) {
                    if (i + 1 >= s.args.size()) fail("m: expected an integer", a.span);
                    fa.m = parse_int(s.args[++i]);
                    continue;
                }
                std::string h = a.head();
                if (h == "vars")
                    vars = &a;
                else if (h == "target")
                    target = &a;
                else if (h == "approx")
                    approx = &a;
                else
                    fail("finite-approx: unexpected clause", a.span);
            }
            if (!vars || !target || !approx)
                fail("finite-approx needs (vars ...), (target ...) and (approx ...)",
                     s.span);
            for (size_t i = 1; i < vars->size(); ++i) {
                const node& b = (*vars)[i];
                if (b.atom || b.size() != 2 || !b[0].atom || !b[1].atom)
                    fail("expected (var sort)", b.span);
                if (!sig.has_sort(b[1].text))
                    fail("unknown sort '" + b[1].text + "'", b[1].span);
                fa.vars.push_back({b[0].text, b[1].text});
            }
            if (fa.vars.empty()) fail("finite-approx: empty vars", vars->span);
            if (fa.m < 1 || fa.m > 4)
                fail("finite-approx: m must be between 1 and 4", s.span);
            if (target->size() != 2) fail("target: expected one formula", target->span);
            if (approx->size() != 2) fail("approx: expected one formula", approx->span);
            fctx cx;
            cx.sig = &sig;
            cx.closure = &aug.closure;
            cx.scope = fa.vars;
            fa.target = parse_formula((*target)[1], cx);
            fa.approx = parse_formula((*approx)[1], cx);
            for (const auto* f : {&fa.target, &fa.approx}) {
                sort_check(*f, sig);
                for (const auto& v : free_vars(*f)) {
                    bool known = false;
                    for (const auto& d : fa.vars) known |= (d.name == v.name);
                    if (!known)
                        fail("finite-approx formula mentions undeclared variable '" +
                                 v.name + "'",
                             s.span);
                }
            }
            proof.approximations.push_back(std::move(fa));
        } else if (s.keyword == "hint") {
            vc_hint h;
            h.span = s.span;
            for (const auto& a : s.args) {
                std::string k = a.head();
                if (k == "vc") {
                    if (a.size() != 2 || !a[1].atom) fail("hint: expected (vc id)", a.span);
                    h.vc_id = a[1].text;
                } else if (k == "occurrence") {
                    if (a.size() != 2) fail("hint: expected (occurrence k)", a.span);
                    h.occurrence = parse_int(a[1]);
                } else if (k == "witness") {
                    for (size_t i = 1; i < a.size(); ++i) h.witnesses.push_back(a[i]);
                } else {
                    fail("hint: unexpected clause", a.span);
                }
            }
            if (h.vc_id.empty()) fail("hint: missing (vc id)", s.span);
            if (h.witnesses.empty()) fail("hint: missing witnesses", s.span);
            proof.hints.push_back(std::move(h));
        } else {
            fail("'" + s.keyword + "' does not belong in a proof file", s.span);
        }
    }
    return proof;
}

// ---------------------------------------------------------------------------
// Bundle validation

void validate(const verification_bundle& bundle, const reduction::augmented_spec& aug) {
    for (const auto& r : bundle.semantics.well_founded_relations) {
        auto it = bundle.system.sig.relations.find(r);
        if (it == bundle.system.sig.relations.end())
            fail("well-founded flag on unknown relation '" + r + "'");
        if (it->second.size() != 2 || it->second[0] != it->second[1])
            fail("well-founded flag on non-binary relation '" + r + "'");
    }
    for (const auto& s : bundle.semantics.finite_sorts)
        if (!bundle.system.sig.has_sort(s)) fail("finite flag on unknown sort '" + s + "'");
    if (!bundle.property) fail("bundle has no property");
    // Timer labels were resolved during parsing; re-check ranking tree shape.
    (void)aug;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

node atom(std::string s) {
    node n;
    n.atom = true;
    n.text = std::move(s);
    return n;
}

node list(std::vector<node> items) {
    node n;
    n.items = std::move(items);
    return n;
}

node term_node(const term_ptr& t) {
    switch (t->kind) {
        case term_kind::variable:
            return atom(t->name);
        case term_kind::constant:
            return atom(t->name + (t->primed ? "'" : ""));
        case term_kind::apply: {
            std::vector<node> items{atom(t->name + (t->primed ? "'" : ""))};
            for (const auto& a : t->args) items.push_back(term_node(a));
            return list(std::move(items));
        }
    }
    fail("unreachable");
}

node formula_node(const formula_ptr& f) {
    auto nary = [&](const char* op) {
        std::vector<node> items{atom(op)};
        for (const auto& c : f->children) items.push_back(formula_node(c));
        return list(std::move(items));
    };
    switch (f->kind) {
        case connective::verum: return atom("true");
        case connective::falsum: return atom("false");
        case connective::equal:
            return list({atom("="), term_node(f->terms[0]), term_node(f->terms[1])});
        case connective::relation: {
            std::string name = f->name + (f->primed ? "'" : "");
            if (f->terms.empty()) return atom(name);
            std::vector<node> items{atom(name)};
            for (const auto& t : f->terms) items.push_back(term_node(t));
            return list(std::move(items));
        }
        case connective::lnot: return nary("not");
        case connective::land: return nary("and");
        case connective::lor: return nary("or");
        case connective::implies: return nary("->");
        case connective::globally: return nary("G");
        case connective::eventually: return nary("F");
        case connective::next: return nary("X");
        case connective::until: return nary("U");
        case connective::forall:
        case connective::exists: {
            const char* q = f->kind == connective::forall ? "forall" : "exists";
            node binder = list({list({atom(f->name), atom(f->var_sort)})});
            return list({atom(q), binder, formula_node(f->children[0])});
        }
    }
    fail("unreachable");
}

}  // namespace

std::string print_formula(const formula_ptr& f) { return sexpr::print(formula_node(f)); }
std::string print_term(const term_ptr& t) { return sexpr::print(term_node(t)); }

std::string print_spec(const transition_spec& spec, const semantics_decl& sem) {
    std::ostringstream os;
    for (const auto& s : spec.sig.sorts) {
        os << "sort " << s;
        if (sem.sort_finite(s)) os << " finite";
        os << "\n";
    }
    for (const auto& [name, args] : spec.sig.relations) {
        os << "relation (" << name;
        for (const auto& a : args) os << " " << a;
        os << ")";
        if (sem.relation_well_founded(name)) os << " well-founded";
        os << "\n";
    }
    for (const auto& [name, prof] : spec.sig.functions) {
        if (spec.sig.constants.count(name)) continue;
        os << "function (" << name;
        for (const auto& a : prof.args) os << " " << a;
        os << " -> " << prof.result << ")\n";
    }
    for (const auto& name : spec.sig.constants)
        os << "constant (" << name << " " << spec.sig.functions.at(name).result << ")\n";
    os << "axiom " << print_formula(spec.axioms) << "\n";
    os << "init " << print_formula(spec.init) << "\n";
    os << "transition " << print_formula(spec.trans) << "\n";
    return os.str();
}

std::string print_ranking(const ranking_expr& r) {
    std::vector<node> items;
    switch (r.ctor) {
        case ranking_ctor::bin:
            items = {atom("Bin"), sexpr::parse_all(print_formula(r.alpha))[0]};
            break;
        case ranking_ctor::pw:
        case ranking_ctor::lex: {
            items = {atom(r.ctor == ranking_ctor::pw ? "PW" : "Lex")};
            for (const auto& c : r.children)
                items.push_back(sexpr::parse_all(print_ranking(c))[0]);
            break;
        }
        case ranking_ctor::pos:
            items = {atom("Pos"), sexpr::parse_all(print_term(r.pos_term))[0], atom(r.ord)};
            break;
        case ranking_ctor::cond:
            items = {atom("Cond"), sexpr::parse_all(print_ranking(r.children[0]))[0],
                     sexpr::parse_all(print_formula(r.alpha))[0]};
            break;
        case ranking_ctor::dom_pw:
        case ranking_ctor::dom_perm: {
            items = {atom(r.ctor == ranking_ctor::dom_pw ? "DomPW" : "DomPerm"),
                     sexpr::parse_all(print_ranking(r.children[0]))[0]};
            std::vector<node> vs;
            for (const auto& v : r.agg_vars) vs.push_back(atom(v.name));
            items.push_back(list(std::move(vs)));
            if (r.ctor == ranking_ctor::dom_perm)
                items.push_back(atom(std::to_string(r.perm_k)));
            break;
        }
        case ranking_ctor::dom_lex:
            items = {atom("DomLex"), sexpr::parse_all(print_ranking(r.children[0]))[0],
                     atom(r.agg_vars[0].name), atom(r.ord)};
            break;
        case ranking_ctor::timer_rank:
            items = {atom("TimerRank"), sexpr::parse_all(print_formula(r.timer_label))[0],
                     sexpr::parse_all(print_formula(r.alpha))[0]};
            break;
    }
    return sexpr::print(list(std::move(items)));
}

formula_ptr parse_formula_text(const std::string& text, const signature& sig,
                               const std::vector<var_decl>& vars, bool allow_primed,
                               bool allow_temporal) {
    std::vector<node> nodes = sexpr::parse_all(text);
    if (nodes.size() != 1) fail("expected exactly one formula");
    fctx cx;
    cx.sig = &sig;
    cx.allow_primed = allow_primed;
    cx.allow_temporal = allow_temporal;
    cx.scope = vars;
    formula_ptr f = parse_formula(nodes[0], cx);
    sort_check(f, sig, {allow_primed, allow_temporal});
    return f;
}

term_ptr parse_scoped_term(const node& n, const signature& sig,
                           const std::vector<var_decl>& scope,
                           const std::string& expected_sort) {
    fctx cx;
    cx.sig = &sig;
    cx.scope = scope;
    return parse_term(n, cx, expected_sort);
}

}  // namespace flv::frontend
