#include "flv/logic.hpp"

#include <algorithm>
#include <sstream>

namespace flv {

void fail(const std::string& msg, source_span where) {
    if (where.known()) {
        std::ostringstream os;
        os << msg << " (line " << where.line << ", column " << where.col << ")";
        throw flv_error(os.str(), where);
    }
    throw flv_error(msg, where);
}

namespace logic {

bool valid_user_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    char c0 = name[0];
    return !(c0 >= '0' && c0 <= '9');
}

// ---------------------------------------------------------------------------
// Signature

bool signature::has_sort(const std::string& s) const {
    return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
}

symbol_kind signature::kind_of(const std::string& name) const {
    if (relations.count(name)) return symbol_kind::relation;
    if (functions.count(name))
        return constants.count(name) ? symbol_kind::constant : symbol_kind::function;
    if (has_sort(name)) return symbol_kind::sort;
    return symbol_kind::none;
}

static void check_fresh(const signature& sig, const std::string& name, source_span sp) {
    if (sig.kind_of(name) != symbol_kind::none)
        fail("redeclaration of symbol '" + name + "'", sp);
}

void signature::add_sort(const std::string& name, source_span sp) {
    if (has_sort(name)) fail("duplicate sort '" + name + "'", sp);
    if (kind_of(name) != symbol_kind::none)
        fail("sort name '" + name + "' clashes with an existing symbol", sp);
    sorts.push_back(name);
}

void signature::add_relation(const std::string& name, std::vector<std::string> args,
                             source_span sp) {
    check_fresh(*this, name, sp);
    for (const auto& s : args)
        if (!has_sort(s)) fail("unknown sort '" + s + "' in relation '" + name + "'", sp);
    relations.emplace(name, std::move(args));
}

void signature::add_function(const std::string& name, std::vector<std::string> args,
                             std::string result, source_span sp) {
    check_fresh(*this, name, sp);
    for (const auto& s : args)
        if (!has_sort(s)) fail("unknown sort '" + s + "' in function '" + name + "'", sp);
    if (!has_sort(result)) fail("unknown sort '" + result + "' in function '" + name + "'", sp);
    functions.emplace(name, function_profile{std::move(args), std::move(result)});
}

void signature::add_constant(const std::string& name, std::string sort, source_span sp) {
    check_fresh(*this, name, sp);
    if (!has_sort(sort)) fail("unknown sort '" + sort + "' in constant '" + name + "'", sp);
    functions.emplace(name, function_profile{{}, std::move(sort)});
    constants.insert(name);
}

signature signature::merge(const signature& a, const signature& b) {
    signature out = a;
    for (const auto& s : b.sorts)
        if (!out.has_sort(s)) out.sorts.push_back(s);
    for (const auto& [name, args] : b.relations) {
        auto it = out.relations.find(name);
        if (it == out.relations.end()) {
            if (out.kind_of(name) != symbol_kind::none)
                fail("conflicting declarations for symbol '" + name + "'");
            out.relations.emplace(name, args);
        } else if (it->second != args) {
            fail("conflicting profiles for relation '" + name + "'");
        }
    }
    for (const auto& [name, prof] : b.functions) {
        auto it = out.functions.find(name);
        if (it == out.functions.end()) {
            if (out.kind_of(name) != symbol_kind::none)
                fail("conflicting declarations for symbol '" + name + "'");
            out.functions.emplace(name, prof);
        } else if (it->second.args != prof.args || it->second.result != prof.result) {
            fail("conflicting profiles for function '" + name + "'");
        }
    }
    for (const auto& c : b.constants) out.constants.insert(c);
    for (const auto& r : b.rigid) out.rigid.insert(r);
    if (out.timer_sort.empty())
        out.timer_sort = b.timer_sort;
    else if (!b.timer_sort.empty() && b.timer_sort != out.timer_sort)
        fail("two distinct timer sorts in signature merge");
    return out;
}

// ---------------------------------------------------------------------------
// Construction

term_ptr mk_var(std::string name, std::string sort, source_span sp) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::variable;
    t->name = std::move(name);
    t->var_sort = std::move(sort);
    t->span = sp;
    return t;
}

term_ptr mk_const(std::string name, bool primed, source_span sp) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::constant;
    t->name = std::move(name);
    t->primed = primed;
    t->span = sp;
    return t;
}

term_ptr mk_apply(std::string fn, std::vector<term_ptr> args, bool primed, source_span sp) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::apply;
    t->name = std::move(fn);
    t->primed = primed;
    t->args = std::move(args);
    t->span = sp;
    return t;
}

static formula_ptr mk0(connective c) {
    auto f = std::make_shared<formula>();
    f->kind = c;
    return f;
}

formula_ptr mk_verum() { return mk0(connective::verum); }
formula_ptr mk_falsum() { return mk0(connective::falsum); }

formula_ptr mk_eq(term_ptr a, term_ptr b, source_span sp) {
    auto f = mk0(connective::equal);
    auto* m = const_cast<formula*>(f.get());
    m->terms = {std::move(a), std::move(b)};
    m->span = sp;
    return f;
}

formula_ptr mk_rel(std::string name, std::vector<term_ptr> args, bool primed,
                   source_span sp) {
    auto f = mk0(connective::relation);
    auto* m = const_cast<formula*>(f.get());
    m->name = std::move(name);
    m->primed = primed;
    m->terms = std::move(args);
    m->span = sp;
    return f;
}

static formula_ptr mk1(connective c, formula_ptr a) {
    auto f = mk0(c);
    const_cast<formula*>(f.get())->children = {std::move(a)};
    return f;
}

static formula_ptr mk2(connective c, formula_ptr a, formula_ptr b) {
    auto f = mk0(c);
    const_cast<formula*>(f.get())->children = {std::move(a), std::move(b)};
    return f;
}

formula_ptr mk_not(formula_ptr a) { return mk1(connective::lnot, std::move(a)); }
formula_ptr mk_and(formula_ptr a, formula_ptr b) {
    return mk2(connective::land, std::move(a), std::move(b));
}
formula_ptr mk_or(formula_ptr a, formula_ptr b) {
    return mk2(connective::lor, std::move(a), std::move(b));
}
formula_ptr mk_implies(formula_ptr a, formula_ptr b) {
    return mk2(connective::implies, std::move(a), std::move(b));
}
formula_ptr mk_iff(formula_ptr a, formula_ptr b) {
    return mk_and(mk_implies(a, b), mk_implies(b, a));
}

static formula_ptr mk_quant(connective c, std::string var, std::string sort,
                            formula_ptr body) {
    auto f = mk0(c);
    auto* m = const_cast<formula*>(f.get());
    m->name = std::move(var);
    m->var_sort = std::move(sort);
    m->children = {std::move(body)};
    return f;
}

formula_ptr mk_forall(std::string var, std::string sort, formula_ptr body) {
    return mk_quant(connective::forall, std::move(var), std::move(sort), std::move(body));
}
formula_ptr mk_exists(std::string var, std::string sort, formula_ptr body) {
    return mk_quant(connective::exists, std::move(var), std::move(sort), std::move(body));
}
formula_ptr mk_globally(formula_ptr a) { return mk1(connective::globally, std::move(a)); }
formula_ptr mk_eventually(formula_ptr a) {
    return mk1(connective::eventually, std::move(a));
}
formula_ptr mk_next(formula_ptr a) { return mk1(connective::next, std::move(a)); }
formula_ptr mk_until(formula_ptr lhs, formula_ptr rhs) {
    return mk2(connective::until, std::move(lhs), std::move(rhs));
}

formula_ptr mk_and_all(const std::vector<formula_ptr>& fs) {
    if (fs.empty()) fail("empty conjunction");
    formula_ptr acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
    return acc;
}

formula_ptr mk_or_all(const std::vector<formula_ptr>& fs) {
    if (fs.empty()) fail("empty disjunction");
    formula_ptr acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = mk_or(acc, fs[i]);
    return acc;
}

bool is_quantifier(connective c) {
    return c == connective::forall || c == connective::exists;
}

bool is_temporal(connective c) {
    return c == connective::globally || c == connective::eventually ||
           c == connective::next || c == connective::until;
}

bool is_atomic(const formula& f) {
    return f.kind == connective::equal || f.kind == connective::relation ||
           f.kind == connective::verum || f.kind == connective::falsum;
}

bool first_order(const formula_ptr& f) {
    if (is_temporal(f->kind)) return false;
    for (const auto& c : f->children)
        if (!first_order(c)) return false;
    return true;
}

bool mentions_primed(const term_ptr& t) {
    if (t->kind != term_kind::variable && t->primed) return true;
    for (const auto& a : t->args)
        if (mentions_primed(a)) return true;
    return false;
}

bool mentions_primed(const formula_ptr& f) {
    if (f->kind == connective::relation && f->primed) return true;
    for (const auto& t : f->terms)
        if (mentions_primed(t)) return true;
    for (const auto& c : f->children)
        if (mentions_primed(c)) return true;
    return false;
}

bool equal(const term_ptr& a, const term_ptr& b) {
    if (a->kind != b->kind || a->name != b->name || a->primed != b->primed) return false;
    if (a->kind == term_kind::variable && a->var_sort != b->var_sort) return false;
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    return true;
}

bool equal(const formula_ptr& a, const formula_ptr& b) {
    if (a->kind != b->kind || a->name != b->name || a->primed != b->primed ||
        a->var_sort != b->var_sort)
        return false;
    if (a->terms.size() != b->terms.size() || a->children.size() != b->children.size())
        return false;
    for (size_t i = 0; i < a->terms.size(); ++i)
        if (!equal(a->terms[i], b->terms[i])) return false;
    for (size_t i = 0; i < a->children.size(); ++i)
        if (!equal(a->children[i], b->children[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Free variables

static void free_vars_term(const term_ptr& t, std::set<std::string>& bound,
                           std::vector<var_decl>& out, std::set<std::string>& seen) {
    if (t->kind == term_kind::variable) {
        if (!bound.count(t->name) && !seen.count(t->name)) {
            seen.insert(t->name);
            out.push_back({t->name, t->var_sort});
        }
        return;
    }
    for (const auto& a : t->args) free_vars_term(a, bound, out, seen);
}

static void free_vars_rec(const formula_ptr& f, std::set<std::string>& bound,
                          std::vector<var_decl>& out, std::set<std::string>& seen) {
    for (const auto& t : f->terms) free_vars_term(t, bound, out, seen);
    if (is_quantifier(f->kind)) {
        bool was_bound = bound.count(f->name) > 0;
        bound.insert(f->name);
        free_vars_rec(f->children[0], bound, out, seen);
        if (!was_bound) bound.erase(f->name);
        return;
    }
    for (const auto& c : f->children) free_vars_rec(c, bound, out, seen);
}

std::vector<var_decl> free_vars(const formula_ptr& f) {
    std::set<std::string> bound, seen;
    std::vector<var_decl> out;
    free_vars_rec(f, bound, out, seen);
    return out;
}

std::vector<var_decl> free_vars(const term_ptr& t) {
    std::set<std::string> bound, seen;
    std::vector<var_decl> out;
    free_vars_term(t, bound, out, seen);
    return out;
}

// ---------------------------------------------------------------------------
// Priming

static term_ptr prime_term(const term_ptr& t, const signature& sig) {
    switch (t->kind) {
        case term_kind::variable:
            return t;
        case term_kind::constant:
            if (sig.rigid.count(t->name)) return t;
            return mk_const(t->name, true, t->span);
        case term_kind::apply: {
            std::vector<term_ptr> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(prime_term(a, sig));
            bool primed = sig.rigid.count(t->name) == 0;
            return mk_apply(t->name, std::move(args), primed, t->span);
        }
    }
    fail("unreachable");
}

term_ptr prime(const term_ptr& t, const signature& sig) {
    if (mentions_primed(t)) fail("prime: input already mentions primed symbols", t->span);
    return prime_term(t, sig);
}

static formula_ptr prime_rec(const formula_ptr& f, const signature& sig) {
    auto g = std::make_shared<formula>(*f);
    if (f->kind == connective::relation && !sig.rigid.count(f->name)) g->primed = true;
    for (auto& t : g->terms) t = prime_term(t, sig);
    for (auto& c : g->children) c = prime_rec(c, sig);
    return g;
}

formula_ptr prime(const formula_ptr& f, const signature& sig) {
    if (mentions_primed(f)) fail("prime: input already mentions primed symbols", f->span);
    return prime_rec(f, sig);
}

// ---------------------------------------------------------------------------
// Substitution

static std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    for (int i = 0;; ++i) {
        std::string cand = base + "!" + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

static term_ptr subst_term(const term_ptr& t, const binding& b) {
    if (t->kind == term_kind::variable) {
        auto it = b.find(t->name);
        return it != b.end() ? it->second : t;
    }
    if (t->args.empty()) return t;
    std::vector<term_ptr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(subst_term(a, b));
    return mk_apply(t->name, std::move(args), t->primed, t->span);
}

term_ptr substitute(const term_ptr& t, const binding& b) { return subst_term(t, b); }

static void collect_names(const term_ptr& t, std::set<std::string>& out) {
    if (t->kind == term_kind::variable) out.insert(t->name);
    for (const auto& a : t->args) collect_names(a, out);
}

formula_ptr substitute(const formula_ptr& f, const binding& b) {
    if (b.empty()) return f;
    if (is_quantifier(f->kind)) {
        binding inner = b;
        inner.erase(f->name);
        // Rename the bound variable when a substituted term would capture it.
        std::set<std::string> incoming;
        for (const auto& [v, t] : inner) {
            (void)v;
            collect_names(t, incoming);
        }
        std::string bound = f->name;
        formula_ptr body = f->children[0];
        if (incoming.count(bound)) {
            std::set<std::string> avoid = incoming;
            for (const auto& [v, t] : inner) avoid.insert(v);
            for (const auto& fv : free_vars(body)) avoid.insert(fv.name);
            std::string renamed = fresh_name(bound, avoid);
            binding rn{{bound, mk_var(renamed, f->var_sort)}};
            body = substitute(body, rn);
            bound = renamed;
        }
        if (inner.empty()) {
            if (bound == f->name) return f;
            return mk_quant(f->kind, bound, f->var_sort, body);
        }
        return mk_quant(f->kind, bound, f->var_sort, substitute(body, inner));
    }
    auto g = std::make_shared<formula>(*f);
    for (auto& t : g->terms) t = subst_term(t, b);
    for (auto& c : g->children) c = substitute(c, b);
    return g;
}

formula_ptr rename_free(const formula_ptr& f, const std::map<std::string, var_decl>& m) {
    binding b;
    for (const auto& [from, to] : m) b.emplace(from, mk_var(to.name, to.sort));
    return substitute(f, b);
}

// ---------------------------------------------------------------------------
// Canonical keys

namespace {

struct canon_printer {
    std::vector<std::string> bound_stack;
    std::ostringstream os;

    std::optional<int> bound_index(const std::string& name) const {
        for (int i = static_cast<int>(bound_stack.size()) - 1; i >= 0; --i)
            if (bound_stack[static_cast<size_t>(i)] == name) return i;
        return std::nullopt;
    }

    void print(const term_ptr& t) {
        switch (t->kind) {
            case term_kind::variable:
                if (auto ix = bound_index(t->name))
                    os << "%" << *ix;
                else
                    os << t->name;
                return;
            case term_kind::constant:
                os << t->name << (t->primed ? "'" : "");
                return;
            case term_kind::apply:
                os << "(" << t->name << (t->primed ? "'" : "");
                for (const auto& a : t->args) {
                    os << " ";
                    print(a);
                }
                os << ")";
                return;
        }
    }

    void print(const formula_ptr& f) {
        switch (f->kind) {
            case connective::verum: os << "true"; return;
            case connective::falsum: os << "false"; return;
            case connective::equal:
                os << "(= ";
                print(f->terms[0]);
                os << " ";
                print(f->terms[1]);
                os << ")";
                return;
            case connective::relation:
                if (f->terms.empty()) {
                    os << f->name << (f->primed ? "'" : "");
                    return;
                }
                os << "(" << f->name << (f->primed ? "'" : "");
                for (const auto& t : f->terms) {
                    os << " ";
                    print(t);
                }
                os << ")";
                return;
            case connective::lnot: op("not", f); return;
            case connective::land: op("and", f); return;
            case connective::lor: op("or", f); return;
            case connective::implies: op("->", f); return;
            case connective::globally: op("G", f); return;
            case connective::eventually: op("F", f); return;
            case connective::next: op("X", f); return;
            case connective::until: op("U", f); return;
            case connective::forall: quant("forall", f); return;
            case connective::exists: quant("exists", f); return;
        }
    }

    void op(const char* name, const formula_ptr& f) {
        os << "(" << name;
        for (const auto& c : f->children) {
            os << " ";
            print(c);
        }
        os << ")";
    }

    void quant(const char* name, const formula_ptr& f) {
        os << "(" << name << " %" << bound_stack.size() << ":" << f->var_sort << " ";
        bound_stack.push_back(f->name);
        print(f->children[0]);
        bound_stack.pop_back();
        os << ")";
    }
};

}  // namespace

std::string canonical_key::rendered() const {
    std::ostringstream os;
    os << text << "|";
    for (const auto& v : free_list) os << v.name << ":" << v.sort << ";";
    return os.str();
}

canonical_key make_canonical_key(const formula_ptr& f) {
    canon_printer p;
    p.print(f);
    return canonical_key{p.os.str(), free_vars(f)};
}

std::uint64_t stable_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Sort checking

namespace {

struct sort_checker {
    const signature& sig;
    const sort_check_options& opt;
    std::map<std::string, std::string> scope;  // bound variables

    std::string check(const term_ptr& t) {
        switch (t->kind) {
            case term_kind::variable: {
                auto it = scope.find(t->name);
                if (it != scope.end()) {
                    if (!t->var_sort.empty() && t->var_sort != it->second)
                        fail("variable '" + t->name + "' used at sort '" + t->var_sort +
                                 "' but bound at sort '" + it->second + "'",
                             t->span);
                    return it->second;
                }
                if (t->var_sort.empty())
                    fail("variable '" + t->name + "' has no sort", t->span);
                if (!sig.has_sort(t->var_sort))
                    fail("unknown sort '" + t->var_sort + "'", t->span);
                return t->var_sort;
            }
            case term_kind::constant: {
                check_prime(t->primed, t->span);
                auto it = sig.functions.find(t->name);
                if (it == sig.functions.end() || !it->second.args.empty())
                    fail("unknown constant '" + t->name + "'", t->span);
                return it->second.result;
            }
            case term_kind::apply: {
                check_prime(t->primed, t->span);
                auto it = sig.functions.find(t->name);
                if (it == sig.functions.end())
                    fail("unknown function '" + t->name + "'", t->span);
                const auto& prof = it->second;
                if (prof.args.size() != t->args.size())
                    fail("function '" + t->name + "' expects " +
                             std::to_string(prof.args.size()) + " arguments, got " +
                             std::to_string(t->args.size()),
                         t->span);
                for (size_t i = 0; i < t->args.size(); ++i) {
                    std::string got = check(t->args[i]);
                    if (got != prof.args[i])
                        fail("argument " + std::to_string(i + 1) + " of '" + t->name +
                                 "' has sort '" + got + "', expected '" + prof.args[i] + "'",
                             t->args[i]->span);
                }
                return prof.result;
            }
        }
        fail("unreachable");
    }

    void check_prime(bool primed, source_span sp) {
        if (primed && !opt.allow_primed)
            fail("primed symbol outside a transition formula", sp);
    }

    void check(const formula_ptr& f) {
        switch (f->kind) {
            case connective::verum:
            case connective::falsum:
                return;
            case connective::equal: {
                std::string a = check(f->terms[0]);
                std::string b = check(f->terms[1]);
                if (a != b)
                    fail("equality between sorts '" + a + "' and '" + b + "'", f->span);
                return;
            }
            case connective::relation: {
                check_prime(f->primed, f->span);
                auto it = sig.relations.find(f->name);
                if (it == sig.relations.end())
                    fail("unknown relation '" + f->name + "'", f->span);
                if (it->second.size() != f->terms.size())
                    fail("relation '" + f->name + "' expects " +
                             std::to_string(it->second.size()) + " arguments, got " +
                             std::to_string(f->terms.size()),
                         f->span);
                for (size_t i = 0; i < f->terms.size(); ++i) {
                    std::string got = check(f->terms[i]);
                    if (got != it->second[i])
                        fail("argument " + std::to_string(i + 1) + " of '" + f->name +
                                 "' has sort '" + got + "', expected '" + it->second[i] +
                                 "'",
                             f->terms[i]->span);
                }
                return;
            }
            case connective::forall:
            case connective::exists: {
                if (!sig.has_sort(f->var_sort))
                    fail("unknown sort '" + f->var_sort + "' in quantifier", f->span);
                auto saved = scope.find(f->name) != scope.end()
                                 ? std::optional<std::string>(scope[f->name])
                                 : std::nullopt;
                scope[f->name] = f->var_sort;
                check(f->children[0]);
                if (saved)
                    scope[f->name] = *saved;
                else
                    scope.erase(f->name);
                return;
            }
            default: {
                if (is_temporal(f->kind) && !opt.allow_temporal)
                    fail("temporal operator in a first-order context", f->span);
                for (const auto& c : f->children) check(c);
                return;
            }
        }
    }
};

}  // namespace

void sort_check(const formula_ptr& f, const signature& sig, const sort_check_options& opt) {
    sort_checker sc{sig, opt, {}};
    sc.check(f);
}

std::string sort_check(const term_ptr& t, const signature& sig,
                       const sort_check_options& opt) {
    sort_checker sc{sig, opt, {}};
    return sc.check(t);
}

}  // namespace logic
}  // namespace flv
