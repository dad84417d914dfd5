#pragma once

// Many-sorted first-order and FO-LTL syntax: signatures, terms, formulas,
// priming, substitution, sort checking and canonical subformula identity.
// All values are immutable after construction and safe to share across
// threads.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace flv {

struct source_span {
    int line = 0;
    int col = 0;
    bool known() const { return line > 0; }
};

// User-facing error with an optional source location.
class flv_error : public std::runtime_error {
public:
    explicit flv_error(std::string msg, source_span where = {})
        : std::runtime_error(std::move(msg)), span(where) {}
    source_span span;
};

[[noreturn]] void fail(const std::string& msg, source_span where = {});

namespace logic {

// Names generated by the tool contain '!', which is rejected in user
// declarations, so generated symbols can never collide with user symbols.
bool valid_user_name(const std::string& name);

// ---------------------------------------------------------------------------
// Signature

struct function_profile {
    std::vector<std::string> args;  // argument sorts; empty for constants
    std::string result;
};

enum class symbol_kind { relation, function, constant, sort, none };

struct signature {
    std::vector<std::string> sorts;  // declaration order
    std::map<std::string, std::vector<std::string>> relations;
    std::map<std::string, function_profile> functions;  // includes constants (0-ary)
    std::set<std::string> constants;  // subset of `functions` declared as constants
    std::set<std::string> rigid;      // symbols prime() leaves unchanged
    std::string timer_sort;           // empty until the timer reduction runs

    bool has_sort(const std::string& s) const;
    symbol_kind kind_of(const std::string& name) const;

    void add_sort(const std::string& name, source_span sp = {});
    void add_relation(const std::string& name, std::vector<std::string> args,
                      source_span sp = {});
    void add_function(const std::string& name, std::vector<std::string> args,
                      std::string result, source_span sp = {});
    void add_constant(const std::string& name, std::string sort, source_span sp = {});

    // Union of two signatures; shared symbols must have identical profiles.
    static signature merge(const signature& a, const signature& b);
};

// Per-sort / per-relation intended-semantics declarations.
struct semantics_decl {
    std::set<std::string> finite_sorts;
    std::set<std::string> well_founded_relations;

    bool sort_finite(const std::string& s) const { return finite_sorts.count(s) > 0; }
    bool relation_well_founded(const std::string& r) const {
        return well_founded_relations.count(r) > 0;
    }
};

// ---------------------------------------------------------------------------
// Terms

struct term;
struct formula;
using term_ptr = std::shared_ptr<const term>;

enum class term_kind { variable, constant, apply };

struct term {
    term_kind kind;
    std::string name;           // variable name, constant name or function name
    bool primed = false;        // constants and applications only
    std::string var_sort;       // variables only
    std::vector<term_ptr> args; // applications only
    source_span span;
};

term_ptr mk_var(std::string name, std::string sort, source_span sp = {});
term_ptr mk_const(std::string name, bool primed = false, source_span sp = {});
term_ptr mk_apply(std::string fn, std::vector<term_ptr> args, bool primed = false,
                  source_span sp = {});

// ---------------------------------------------------------------------------
// Formulas.  One AST covers plain first-order formulas and FO-LTL; operations
// that require a first-order (or single-state) formula check and reject
// temporal (or primed) nodes.

enum class connective {
    verum,
    falsum,
    equal,
    relation,
    lnot,
    land,
    lor,
    implies,
    forall,
    exists,
    globally,    // G
    eventually,  // F
    next,        // X
    until,       // U (strong): children[0] U children[1]
};

struct formula;
using formula_ptr = std::shared_ptr<const formula>;

struct formula {
    connective kind;
    std::string name;   // relation name or bound-variable name
    bool primed = false;
    std::string var_sort;  // quantifiers only
    std::vector<term_ptr> terms;      // equal (2) / relation args
    std::vector<formula_ptr> children;
    source_span span;
};

formula_ptr mk_verum();
formula_ptr mk_falsum();
formula_ptr mk_eq(term_ptr a, term_ptr b, source_span sp = {});
formula_ptr mk_rel(std::string name, std::vector<term_ptr> args, bool primed = false,
                   source_span sp = {});
formula_ptr mk_not(formula_ptr a);
formula_ptr mk_and(formula_ptr a, formula_ptr b);
formula_ptr mk_or(formula_ptr a, formula_ptr b);
formula_ptr mk_implies(formula_ptr a, formula_ptr b);
formula_ptr mk_iff(formula_ptr a, formula_ptr b);  // sugar: (a -> b) and (b -> a)
formula_ptr mk_forall(std::string var, std::string sort, formula_ptr body);
formula_ptr mk_exists(std::string var, std::string sort, formula_ptr body);
formula_ptr mk_globally(formula_ptr a);
formula_ptr mk_eventually(formula_ptr a);
formula_ptr mk_next(formula_ptr a);
formula_ptr mk_until(formula_ptr lhs, formula_ptr rhs);

// Left-associated conjunction/disjunction of a nonempty list.
formula_ptr mk_and_all(const std::vector<formula_ptr>& fs);
formula_ptr mk_or_all(const std::vector<formula_ptr>& fs);

bool is_quantifier(connective c);
bool is_temporal(connective c);
bool is_atomic(const formula& f);
// True when the formula contains no temporal operator.
bool first_order(const formula_ptr& f);
// True when the formula mentions a primed symbol.
bool mentions_primed(const formula_ptr& f);
bool mentions_primed(const term_ptr& t);

// Structural equality (names, sorts, primes; spans ignored).
bool equal(const term_ptr& a, const term_ptr& b);
bool equal(const formula_ptr& a, const formula_ptr& b);

// ---------------------------------------------------------------------------
// Operations

struct var_decl {
    std::string name;
    std::string sort;
    bool operator==(const var_decl& o) const { return name == o.name && sort == o.sort; }
    bool operator<(const var_decl& o) const {
        return name != o.name ? name < o.name : sort < o.sort;
    }
};

// Free variables in first-occurrence order, each exactly once.
std::vector<var_decl> free_vars(const formula_ptr& f);
std::vector<var_decl> free_vars(const term_ptr& t);

// Replace every non-rigid signature symbol by its primed copy.  Rejects
// input that already mentions primed symbols.
formula_ptr prime(const formula_ptr& f, const signature& sig);
term_ptr prime(const term_ptr& t, const signature& sig);

// Capture-avoiding simultaneous substitution of free variables.
using binding = std::map<std::string, term_ptr>;
formula_ptr substitute(const formula_ptr& f, const binding& b);
term_ptr substitute(const term_ptr& t, const binding& b);

// Rename free variables (a substitution by variables; capture-avoiding).
formula_ptr rename_free(const formula_ptr& f, const std::map<std::string, var_decl>& m);

// ---------------------------------------------------------------------------
// Canonical identity.  Bound variables are canonicalized positionally; free
// variables keep their source names and are listed in first-occurrence order.

struct canonical_key {
    std::string text;                 // printed body with positional bound vars
    std::vector<var_decl> free_list;  // appended to `text` when rendering

    std::string rendered() const;
    bool operator==(const canonical_key& o) const { return rendered() == o.rendered(); }
    bool operator<(const canonical_key& o) const { return rendered() < o.rendered(); }
};

canonical_key make_canonical_key(const formula_ptr& f);

// Stable 64-bit FNV-1a hash of the rendered key.
std::uint64_t stable_hash(const std::string& s);

// ---------------------------------------------------------------------------
// Sort checking

struct sort_check_options {
    bool allow_primed = false;    // two-state (transition) context
    bool allow_temporal = false;  // FO-LTL context
};

// Checks well-sortedness against the signature and returns the sort of a
// term.  Formulas return no sort; errors carry the offending span.
void sort_check(const formula_ptr& f, const signature& sig,
                const sort_check_options& opt = {});
std::string sort_check(const term_ptr& t, const signature& sig,
                       const sort_check_options& opt = {});

// ---------------------------------------------------------------------------
// Transition systems: (axioms, init, transition) over one signature.  Axioms
// and init are closed single-state formulas, the transition formula is a
// closed formula over the doubled signature.

struct transition_spec {
    signature sig;
    formula_ptr axioms;  // verum when the system declares none
    formula_ptr init;
    formula_ptr trans;
};

}  // namespace logic
}  // namespace flv
