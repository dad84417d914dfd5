#pragma once

// Textual frontend: parses system, property and proof files into checked
// ASTs, and prints formulas/specs back in the same grammar.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flv/logic.hpp"
#include "flv/reduction.hpp"
#include "flv/sexpr.hpp"

namespace flv::frontend {

using logic::formula_ptr;
using logic::term_ptr;

// ---------------------------------------------------------------------------
// Proof script

enum class ranking_ctor { bin, pw, lex, pos, cond, dom_pw, dom_lex, dom_perm, timer_rank };

struct ranking_expr {
    ranking_ctor ctor;
    std::vector<ranking_expr> children;
    formula_ptr alpha;     // bin, cond, timer_rank
    term_ptr pos_term;     // pos
    std::string ord;       // pos / dom_lex order relation; "t!lt" for the timer order
    std::vector<logic::var_decl> agg_vars;  // dom_pw / dom_perm / dom_lex (single)
    int perm_k = 0;        // dom_perm
    formula_ptr timer_label;  // timer_rank
    source_span span;
};

struct finite_approx {
    std::vector<logic::var_decl> vars;  // aggregate variables then parameters
    formula_ptr target;
    formula_ptr approx;
    int m = 1;
    source_span span;
};

struct vc_hint {
    std::string vc_id;
    int occurrence = 0;  // index of the targeted existential block
    // Witness terms stay unparsed until hint application, where the target
    // block supplies the expected sorts and variable scope.
    std::vector<sexpr::node> witnesses;
    source_span span;
};

struct proof_script {
    std::vector<std::pair<std::string, formula_ptr>> invariants;  // named conjuncts
    std::optional<ranking_expr> ranking;
    std::vector<finite_approx> approximations;
    std::vector<vc_hint> hints;
};

struct verification_bundle {
    logic::transition_spec system;
    logic::semantics_decl semantics;
    formula_ptr property;
    proof_script proof;
};

// ---------------------------------------------------------------------------
// Parsing

std::pair<logic::transition_spec, logic::semantics_decl> parse_system(
    const std::string& text);

formula_ptr parse_property(const std::string& text, const logic::transition_spec& system);

// Proof files mention timer symbols, so parsing needs the augmented system.
proof_script parse_proof(const std::string& text, const reduction::augmented_spec& aug);

// Cross-checks the assembled bundle (timer labels resolve, approximation
// shapes are well-formed, semantics flags are sane).
void validate(const verification_bundle& bundle, const reduction::augmented_spec& aug);

// ---------------------------------------------------------------------------
// Printing (parse . print is the identity on ASTs)

std::string print_formula(const formula_ptr& f);
std::string print_term(const term_ptr& t);

// Pretty-prints a full spec in the system-file grammar, deterministically.
std::string print_spec(const logic::transition_spec& spec,
                       const logic::semantics_decl& sem = {});

std::string print_ranking(const ranking_expr& r);

// Parses a single formula in the context of a signature (used by tests and
// by the oracle CLI).  Free variables are rejected unless `vars` names them.
formula_ptr parse_formula_text(const std::string& text, const logic::signature& sig,
                               const std::vector<logic::var_decl>& vars = {},
                               bool allow_primed = false, bool allow_temporal = true);

// Parses one term against a known variable scope and expected sort; used for
// hint witnesses.
term_ptr parse_scoped_term(const sexpr::node& n, const logic::signature& sig,
                           const std::vector<logic::var_decl>& scope,
                           const std::string& expected_sort);

}  // namespace flv::frontend
