#pragma once

// Minimal s-expression reader/printer.  Tokens are atoms (bare or |quoted|)
// or parenthesized lists; `;` starts a line comment.

#include <string>
#include <vector>

#include "flv/logic.hpp"

namespace flv::sexpr {

struct node {
    bool atom = false;
    std::string text;          // atoms only
    std::vector<node> items;   // lists only
    source_span span;

    bool is(const std::string& s) const { return atom && text == s; }
    // head symbol of a list, or "" when not a list starting with an atom
    std::string head() const {
        return !atom && !items.empty() && items[0].atom ? items[0].text : std::string{};
    }
    size_t size() const { return items.size(); }
    const node& operator[](size_t i) const { return items[i]; }
};

// Parses a whole document into a list of top-level nodes.
std::vector<node> parse_all(const std::string& text);

std::string print(const node& n);

}  // namespace flv::sexpr
