#pragma once

// The timer reduction: builds the timer transition system of the (skolemized)
// negated property and its product with the user system.  The product system
// terminates exactly when the user system satisfies the property, which is
// what the ranking machinery then proves.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flv/logic.hpp"

namespace flv::reduction {

using logic::formula_ptr;
using logic::term_ptr;

// Names of the timer vocabulary added to the signature.  All of them use '!'
// and therefore cannot collide with user symbols.
struct timer_vocabulary {
    std::string sort = "t!T";
    std::string le = "t!le";      // binary relation on the timer sort
    std::string zero = "t!zero";  // constant 0
    std::string inf = "t!inf";    // constant infinity
    std::string pred = "t!pred";  // predecessor function
};

struct closure_entry {
    formula_ptr psi;
    logic::canonical_key key;
    std::vector<logic::var_decl> params;  // free variables of psi, in order
    std::string timer;                    // generated timer symbol name
};

// The subformula closure: every subformula of the root, plus the negation of
// the body of every G subformula.  Children precede parents; no two entries
// share a canonical key.
struct sub_closure {
    std::vector<closure_entry> entries;
    size_t root = 0;

    const closure_entry* find(const formula_ptr& psi) const;
    const closure_entry* find_key(const logic::canonical_key& k) const;
    const closure_entry& at(size_t i) const { return entries[i]; }
    size_t size() const { return entries.size(); }
};

struct skolemize_result {
    formula_ptr formula;
    std::vector<std::string> added_constants;  // names, in introduction order
    logic::signature sig;                      // input signature + constants
};

// Negates a closed temporal property and replaces its outermost existential
// quantifiers by fresh constants.  Negation is pushed only through the
// top-level prefix of quantifiers, double negations and implications; the
// temporal body is left untouched.  When `enabled` is false the result is
// plainly not(property).
skolemize_result negate_and_skolemize(const formula_ptr& property,
                                      const logic::signature& sig, bool enabled = true);

sub_closure closure(const formula_ptr& psi);

// Signature extension: timer sort, {<=, 0, inf, -1} vocabulary and one timer
// function per closure entry.
logic::signature timer_signature(const logic::signature& base, const sub_closure& cl,
                                 const timer_vocabulary& voc = {});

// The axiom formula Gamma: one biconditional row per entry (an implication
// for U; no row for X), each conjoined with the range axiom
// forall xs. 0 <= t(xs) \/ t(xs) = inf.
formula_ptr timer_axioms(const sub_closure& cl, const timer_vocabulary& voc = {});

// The two-state timer transition formula: per entry the decrease clause, the
// infinity-persistence clause and, for F/G/X/U, the zero biconditional.
formula_ptr timer_transition(const sub_closure& cl, const timer_vocabulary& voc = {});

// The timer transition system of psi: (Gamma, t_psi = 0, tau_t).
logic::transition_spec timer_system(const formula_ptr& psi, const logic::signature& base,
                                    const timer_vocabulary& voc = {});

// Componentwise product; signatures are merged (conflicting profiles for a
// shared symbol are an error).
logic::transition_spec product(const logic::transition_spec& a,
                               const logic::transition_spec& b);

struct augmented_spec {
    logic::transition_spec combined;  // product of user system and timer system
    logic::transition_spec user;      // original user system (unchanged)
    logic::transition_spec timer_part;
    sub_closure closure;
    timer_vocabulary vocab;
    formula_ptr skolemized;  // sk(not property)
    std::vector<std::string> skolem_constants;
};

augmented_spec augment(const logic::transition_spec& system, const formula_ptr& property,
                       bool skolemize = true);

// Helpers shared with ranking/vc construction --------------------------------

// t_entry(args) as a term; args defaults to the entry's own parameters.
term_ptr timer_term(const closure_entry& e, std::vector<term_ptr> args = {},
                    bool primed = false);

// a <= b, a < b (as le and not-equal), a = b over the timer sort.
formula_ptr timer_le(term_ptr a, term_ptr b, const timer_vocabulary& voc = {});
formula_ptr timer_lt(term_ptr a, term_ptr b, const timer_vocabulary& voc = {});

}  // namespace flv::reduction
