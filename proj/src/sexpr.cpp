#include "flv/sexpr.hpp"

#include <sstream>

namespace flv::sexpr {

namespace {

struct lexer {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    source_span here() const { return {line, col}; }

    void advance() {
        if (pos < text.size() && text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    node next() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input", here());
        source_span sp = here();
        char c = text[pos];
        if (c == '(') {
            advance();
            node n;
            n.span = sp;
            while (true) {
                skip_ws();
                if (pos >= text.size()) fail("unclosed '('", sp);
                if (text[pos] == ')') {
                    advance();
                    return n;
                }
                n.items.push_back(next());
            }
        }
        if (c == ')') fail("unexpected ')'", sp);
        if (c == '|') {
            advance();
            std::string s;
            while (pos < text.size() && text[pos] != '|') {
                s.push_back(text[pos]);
                advance();
            }
            if (pos >= text.size()) fail("unclosed '|'", sp);
            advance();
            node n;
            n.atom = true;
            n.text = std::move(s);
            n.span = sp;
            return n;
        }
        if (c == '"') {
            advance();
            std::string s = "\"";
            while (pos < text.size() && text[pos] != '"') {
                s.push_back(text[pos]);
                advance();
            }
            if (pos >= text.size()) fail("unclosed '\"'", sp);
            advance();
            s.push_back('"');
            node n;
            n.atom = true;
            n.text = std::move(s);
            n.span = sp;
            return n;
        }
        std::string s;
        while (pos < text.size()) {
            char d = text[pos];
            if (d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == '(' || d == ')' ||
                d == ';')
                break;
            s.push_back(d);
            advance();
        }
        node n;
        n.atom = true;
        n.text = std::move(s);
        n.span = sp;
        return n;
    }
};

bool needs_quoting(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s)
        if (c == ' ' || c == '(' || c == ')' || c == ';' || c == '|' || c == '\n')
            return true;
    return false;
}

void print_rec(const node& n, std::ostringstream& os) {
    if (n.atom) {
        if (needs_quoting(n.text))
            os << "|" << n.text << "|";
        else
            os << n.text;
        return;
    }
    os << "(";
    for (size_t i = 0; i < n.items.size(); ++i) {
        if (i) os << " ";
        print_rec(n.items[i], os);
    }
    os << ")";
}

}  // namespace

std::vector<node> parse_all(const std::string& text) {
    lexer lx{text};
    std::vector<node> out;
    while (!lx.eof()) out.push_back(lx.next());
    return out;
}

std::string print(const node& n) {
    std::ostringstream os;
    print_rec(n, os);
    return os.str();
}

}  // namespace flv::sexpr
