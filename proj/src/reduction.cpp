#include "flv/reduction.hpp"

#include <sstream>

namespace flv::reduction {

using namespace logic;

// ---------------------------------------------------------------------------
// Skolemization

namespace {

struct skolemizer {
    signature sig;
    std::vector<std::string> added;
    int counter = 0;

    std::string fresh_constant(const std::string& base, const std::string& sort) {
        std::string name = "sk!" + base + "!" + std::to_string(counter++);
        sig.add_constant(name, sort);
        added.push_back(name);
        return name;
    }

    // Positive position: descend through conjunctions, strip top-level
    // existentials, delegate negations to `push`.
    formula_ptr pos(const formula_ptr& f) {
        switch (f->kind) {
            case connective::land:
                return mk_and(pos(f->children[0]), pos(f->children[1]));
            case connective::exists: {
                std::string c = fresh_constant(f->name, f->var_sort);
                binding b{{f->name, mk_const(c)}};
                return pos(substitute(f->children[0], b));
            }
            case connective::lnot:
                return push(f);
            default:
                return f;
        }
    }

    // `f` is a negation; push it through one connective of the prefix.
    formula_ptr push(const formula_ptr& f) {
        const formula_ptr& inner = f->children[0];
        switch (inner->kind) {
            case connective::lnot:
                return pos(inner->children[0]);
            case connective::implies:
                // not (a -> b)  ~>  a and not b
                return mk_and(pos(inner->children[0]), pos(mk_not(inner->children[1])));
            case connective::forall: {
                std::string c = fresh_constant(inner->name, inner->var_sort);
                binding b{{inner->name, mk_const(c)}};
                return pos(mk_not(substitute(inner->children[0], b)));
            }
            case connective::exists:
                return mk_forall(inner->name, inner->var_sort,
                                 mk_not(inner->children[0]));
            default:
                return f;
        }
    }
};

}  // namespace

skolemize_result negate_and_skolemize(const formula_ptr& property, const signature& sig,
                                      bool enabled) {
    if (!free_vars(property).empty()) fail("property must be closed", property->span);
    formula_ptr negated = mk_not(property);
    if (!enabled) return {negated, {}, sig};
    skolemizer sk{sig, {}, 0};
    formula_ptr out = sk.pos(negated);
    return {out, std::move(sk.added), std::move(sk.sig)};
}

// ---------------------------------------------------------------------------
// Closure

namespace {

std::string slug_of(const formula_ptr& f, int depth = 0) {
    auto join = [](std::initializer_list<std::string> parts) {
        std::string s;
        for (const auto& p : parts) {
            if (p.empty()) continue;
            if (!s.empty()) s += "_";
            s += p;
        }
        return s;
    };
    if (depth >= 3) return "";
    switch (f->kind) {
        case connective::verum: return "true";
        case connective::falsum: return "false";
        case connective::equal: return "eq";
        case connective::relation: return f->name;
        case connective::lnot: return join({"not", slug_of(f->children[0], depth + 1)});
        case connective::land: return "and";
        case connective::lor: return "or";
        case connective::implies: return "impl";
        case connective::forall: return join({"all", slug_of(f->children[0], depth + 1)});
        case connective::exists: return join({"some", slug_of(f->children[0], depth + 1)});
        case connective::globally: return join({"G", slug_of(f->children[0], depth + 1)});
        case connective::eventually:
            return join({"F", slug_of(f->children[0], depth + 1)});
        case connective::next: return join({"X", slug_of(f->children[0], depth + 1)});
        case connective::until: return "U";
    }
    return "";
}

std::string sanitize_slug(std::string s) {
    for (auto& c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) c = '_';
    }
    if (s.size() > 24) s.resize(24);
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s.empty() ? "f" : s;
}

std::string timer_name(const canonical_key& key, const formula_ptr& psi) {
    std::ostringstream os;
    os << "t!" << std::hex;
    std::uint64_t h = stable_hash(key.rendered());
    for (int i = 0; i < 8; ++i) os << ((h >> (60 - 4 * i)) & 0xf);
    os << "!" << sanitize_slug(slug_of(psi));
    return os.str();
}

struct closure_builder {
    sub_closure out;
    std::map<std::string, size_t> index;  // rendered key -> entry position

    size_t add(const formula_ptr& psi) {
        canonical_key key = make_canonical_key(psi);
        std::string r = key.rendered();
        if (auto it = index.find(r); it != index.end()) return it->second;
        // children first
        for (const auto& c : psi->children) add(c);
        if (auto it = index.find(r); it != index.end()) return it->second;
        closure_entry e;
        e.psi = psi;
        e.params = free_vars(psi);
        e.key = std::move(key);
        e.timer = timer_name(e.key, psi);
        out.entries.push_back(std::move(e));
        size_t at = out.entries.size() - 1;
        index.emplace(r, at);
        if (psi->kind == connective::globally) add(mk_not(psi->children[0]));
        return at;
    }
};

}  // namespace

const closure_entry* sub_closure::find(const formula_ptr& psi) const {
    return find_key(make_canonical_key(psi));
}

const closure_entry* sub_closure::find_key(const canonical_key& k) const {
    std::string r = k.rendered();
    for (const auto& e : entries)
        if (e.key.rendered() == r) return &e;
    return nullptr;
}

sub_closure closure(const formula_ptr& psi) {
    closure_builder b;
    b.out.root = b.add(psi);
    return b.out;
}

// ---------------------------------------------------------------------------
// Signature extension

signature timer_signature(const signature& base, const sub_closure& cl,
                          const timer_vocabulary& voc) {
    signature sig = base;
    if (!sig.timer_sort.empty()) fail("signature already has a timer sort");
    sig.add_sort(voc.sort);
    sig.timer_sort = voc.sort;
    sig.add_relation(voc.le, {voc.sort, voc.sort});
    sig.add_constant(voc.zero, voc.sort);
    sig.add_constant(voc.inf, voc.sort);
    sig.add_function(voc.pred, {voc.sort}, voc.sort);
    sig.rigid.insert(voc.le);
    sig.rigid.insert(voc.zero);
    sig.rigid.insert(voc.inf);
    sig.rigid.insert(voc.pred);
    std::set<std::string> names;
    for (const auto& e : cl.entries) {
        if (!names.insert(e.timer).second)
            fail("timer name collision: '" + e.timer + "'");
        std::vector<std::string> args;
        for (const auto& v : e.params) args.push_back(v.sort);
        if (args.empty())
            sig.add_constant(e.timer, voc.sort);
        else
            sig.add_function(e.timer, std::move(args), voc.sort);
    }
    return sig;
}

// ---------------------------------------------------------------------------
// Gamma and tau

term_ptr timer_term(const closure_entry& e, std::vector<term_ptr> args, bool primed) {
    if (args.empty())
        for (const auto& v : e.params) args.push_back(mk_var(v.name, v.sort));
    if (args.size() != e.params.size()) fail("timer '" + e.timer + "' arity mismatch");
    if (args.empty()) return mk_const(e.timer, primed);
    return mk_apply(e.timer, std::move(args), primed);
}

formula_ptr timer_le(term_ptr a, term_ptr b, const timer_vocabulary& voc) {
    return mk_rel(voc.le, {std::move(a), std::move(b)});
}

formula_ptr timer_lt(term_ptr a, term_ptr b, const timer_vocabulary& voc) {
    return mk_and(timer_le(a, b, voc), mk_not(mk_eq(a, b)));
}

namespace {

formula_ptr close_universally(formula_ptr f, const std::vector<var_decl>& vars) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        f = mk_forall(it->name, it->sort, f);
    return f;
}

struct row_builder {
    const sub_closure& cl;
    const timer_vocabulary& voc;

    term_ptr zero() const { return mk_const(voc.zero); }
    term_ptr inf() const { return mk_const(voc.inf); }

    const closure_entry& entry_of(const formula_ptr& psi) const {
        const closure_entry* e = cl.find(psi);
        if (!e) fail("closure is missing a subformula");
        return *e;
    }

    formula_ptr at_zero(const formula_ptr& psi, bool primed = false) const {
        return mk_eq(timer_term(entry_of(psi), {}, primed), zero());
    }

    // Gamma row: the axiom body A_psi, or nullptr when the table has none.
    formula_ptr axiom_body(const formula_ptr& psi) const {
        switch (psi->kind) {
            case connective::verum:
            case connective::falsum:
            case connective::equal:
            case connective::relation:
                return psi;
            case connective::lnot:
                return mk_not(at_zero(psi->children[0]));
            case connective::land:
                return mk_and(at_zero(psi->children[0]), at_zero(psi->children[1]));
            case connective::lor:
                return mk_or(at_zero(psi->children[0]), at_zero(psi->children[1]));
            case connective::implies:
                return mk_implies(at_zero(psi->children[0]), at_zero(psi->children[1]));
            case connective::forall:
                return mk_forall(psi->name, psi->var_sort, at_zero(psi->children[0]));
            case connective::exists:
                return mk_exists(psi->name, psi->var_sort, at_zero(psi->children[0]));
            case connective::eventually: {
                const auto& inner = entry_of(psi->children[0]);
                return timer_lt(timer_term(inner), inf(), voc);
            }
            case connective::globally: {
                const auto& dual = entry_of(mk_not(psi->children[0]));
                return mk_eq(timer_term(dual), inf());
            }
            case connective::next:
                return nullptr;
            case connective::until:
                return nullptr;  // handled as an implication, see gamma_for
        }
        return nullptr;
    }

    formula_ptr gamma_for(const closure_entry& e) const {
        std::vector<formula_ptr> parts;
        term_ptr t = timer_term(e);
        if (e.psi->kind == connective::until) {
            // t_{chi U rho} = 0 -> t_rho < inf
            const auto& rho = entry_of(e.psi->children[1]);
            parts.push_back(mk_implies(mk_eq(t, zero()),
                                       timer_lt(timer_term(rho), inf(), voc)));
        } else if (formula_ptr body = axiom_body(e.psi)) {
            parts.push_back(mk_iff(mk_eq(t, zero()), body));
        }
        // range axiom: 0 <= t \/ t = inf
        parts.push_back(mk_or(timer_le(zero(), t, voc), mk_eq(t, inf())));
        return close_universally(mk_and_all(parts), e.params);
    }

    // tau row: the two-state body B_psi, or nullptr when the table has none.
    formula_ptr transition_body(const formula_ptr& psi) const {
        switch (psi->kind) {
            case connective::eventually:
                return mk_or(at_zero(psi->children[0]), at_zero(psi, true));
            case connective::globally:
                return mk_and(at_zero(psi->children[0]), at_zero(psi, true));
            case connective::next:
                return at_zero(psi->children[0], true);
            case connective::until: {
                const formula_ptr& chi = psi->children[0];
                const formula_ptr& rho = psi->children[1];
                return mk_or(at_zero(rho), mk_and(at_zero(chi), at_zero(psi, true)));
            }
            default:
                return nullptr;
        }
    }

    formula_ptr tau_for(const closure_entry& e) const {
        term_ptr t = timer_term(e);
        term_ptr t_next = timer_term(e, {}, true);
        formula_ptr decrease = mk_implies(
            mk_and(timer_lt(zero(), t, voc), timer_lt(t, inf(), voc)),
            mk_eq(t_next, mk_apply(voc.pred, {t})));
        formula_ptr persist =
            mk_implies(mk_eq(t, inf()), mk_eq(t_next, inf()));
        formula_ptr body = mk_and(decrease, persist);
        if (formula_ptr b = transition_body(e.psi))
            body = mk_and(body, mk_iff(mk_eq(t, zero()), b));
        return close_universally(body, e.params);
    }
};

}  // namespace

formula_ptr timer_axioms(const sub_closure& cl, const timer_vocabulary& voc) {
    row_builder rb{cl, voc};
    std::vector<formula_ptr> parts;
    for (const auto& e : cl.entries) parts.push_back(rb.gamma_for(e));
    return mk_and_all(parts);
}

formula_ptr timer_transition(const sub_closure& cl, const timer_vocabulary& voc) {
    row_builder rb{cl, voc};
    std::vector<formula_ptr> parts;
    for (const auto& e : cl.entries) parts.push_back(rb.tau_for(e));
    return mk_and_all(parts);
}

transition_spec timer_system(const formula_ptr& psi, const signature& base,
                             const timer_vocabulary& voc) {
    sub_closure cl = closure(psi);
    transition_spec ts;
    ts.sig = timer_signature(base, cl, voc);
    ts.axioms = timer_axioms(cl, voc);
    ts.init = mk_eq(timer_term(cl.at(cl.root)), mk_const(voc.zero));
    ts.trans = timer_transition(cl, voc);
    return ts;
}

transition_spec product(const transition_spec& a, const transition_spec& b) {
    transition_spec out;
    out.sig = signature::merge(a.sig, b.sig);
    out.axioms = mk_and(a.axioms, b.axioms);
    out.init = mk_and(a.init, b.init);
    out.trans = mk_and(a.trans, b.trans);
    return out;
}

augmented_spec augment(const transition_spec& system, const formula_ptr& property,
                       bool skolemize) {
    augmented_spec out;
    skolemize_result sk = negate_and_skolemize(property, system.sig, skolemize);
    out.skolemized = sk.formula;
    out.skolem_constants = sk.added_constants;
    out.user = system;
    out.user.sig = sk.sig;  // user system plus skolem constants
    out.closure = closure(sk.formula);
    out.timer_part.sig = timer_signature(sk.sig, out.closure, out.vocab);
    out.timer_part.axioms = timer_axioms(out.closure, out.vocab);
    out.timer_part.init =
        mk_eq(timer_term(out.closure.at(out.closure.root)), mk_const(out.vocab.zero));
    out.timer_part.trans = timer_transition(out.closure, out.vocab);
    out.combined = product(out.user, out.timer_part);
    return out;
}

}  // namespace flv::reduction
