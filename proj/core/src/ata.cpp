#include "atab/ata.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace atab {

namespace {

bool clause_less(const Clause& a, const Clause& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

/// Sort clauses (size first, then lexicographic), drop duplicates, and
/// drop every clause that contains another clause as a subset: with the
/// size ordering a subsuming clause always sorts before its victims.
void reduce(std::vector<Clause>& cs) {
    std::sort(cs.begin(), cs.end(), clause_less);
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    std::vector<Clause> kept;
    for (const Clause& c : cs) {
        bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
            return std::includes(c.begin(), c.end(), k.begin(), k.end());
        });
        if (!subsumed) kept.push_back(c);
    }
    cs = std::move(kept);
}

}  // namespace

Formula formula_and(const Formula& a, const Formula& b) {
    Formula out;
    out.clauses.reserve(a.clauses.size() * b.clauses.size());
    for (const Clause& ca : a.clauses)
        for (const Clause& cb : b.clauses) {
            Clause merged;
            std::set_union(ca.begin(), ca.end(), cb.begin(), cb.end(),
                           std::back_inserter(merged));
            out.clauses.push_back(std::move(merged));
        }
    reduce(out.clauses);
    return out;
}

Formula formula_or(const Formula& a, const Formula& b) {
    Formula out;
    out.clauses = a.clauses;
    out.clauses.insert(out.clauses.end(), b.clauses.begin(), b.clauses.end());
    reduce(out.clauses);
    return out;
}

std::string formula_to_string(const Formula& f) {
    if (f.is_false()) return "false";
    if (f.is_true()) return "true";
    std::string out;
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        if (i) out += " \\/ ";
        for (std::size_t j = 0; j < f.clauses[i].size(); ++j) {
            if (j) out += " /\\ ";
            out += '(' + std::to_string(f.clauses[i][j].child) + ',' +
                   f.clauses[i][j].state + ')';
        }
    }
    return out;
}

const Formula& Ata::rule(const std::string& state, const std::string& sym) const {
    static const Formula kFalse;
    auto it = delta.find({state, sym});
    return it == delta.end() ? kFalse : it->second;
}

void Ata::set_rule(const std::string& state, const std::string& sym, Formula f) {
    if (f.is_false())
        delta.erase({state, sym});
    else
        delta[{state, sym}] = std::move(f);
}

void Ata::validate() const {
    if (!states.count(start))
        throw std::invalid_argument("start state '" + start + "' not declared");
    for (const auto& [key, f] : delta) {
        const auto& [state, sym] = key;
        if (!states.count(state))
            throw std::invalid_argument("rule for undeclared state '" + state + "'");
        auto a = alphabet.find(sym);
        if (a == alphabet.end())
            throw std::invalid_argument("rule for unknown symbol '" + sym + "'");
        for (const Clause& c : f.clauses)
            for (const Atom& at : c) {
                if (!states.count(at.state))
                    throw std::invalid_argument("atom references undeclared state '" +
                                                at.state + "'");
                if (at.child < 1 || at.child > a->second)
                    throw std::invalid_argument(
                        "atom child index " + std::to_string(at.child) +
                        " out of range for symbol '" + sym + "'");
            }
    }
}

namespace {

/// Flat view of a tree for evaluation; unlike TreeIndex this accepts br.
struct EvalIndex {
    std::vector<const Node*> nodes;
    std::vector<std::vector<int>> children;
    std::vector<NodeAddress> addresses;

    void add(const Node& n, const NodeAddress& a) {
        int id = static_cast<int>(nodes.size());
        nodes.push_back(&n);
        children.emplace_back();
        addresses.push_back(a);
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            NodeAddress ca = a;
            ca.push_back(static_cast<int>(i) + 1);
            children[id].push_back(static_cast<int>(nodes.size()));
            add(n.children[i], ca);
        }
    }
};

}  // namespace

Verdict evaluate(const Ata& a, const Node& t) {
    EvalIndex ix;
    ix.add(t, {});
    for (const Node* n : ix.nodes) {
        auto it = a.alphabet.find(symbol_name(*n));
        if (it == a.alphabet.end() ||
            it->second != static_cast<int>(n->children.size()))
            throw std::invalid_argument("symbol '" + symbol_name(*n) +
                                        "' (arity " +
                                        std::to_string(n->children.size()) +
                                        ") not in alphabet");
    }

    std::map<std::string, int> state_index;
    int si = 0;
    for (const std::string& q : a.states) state_index[q] = si++;
    const int ns = si, nn = static_cast<int>(ix.nodes.size());
    std::vector<signed char> memo(static_cast<std::size_t>(ns) * nn, -1);

    std::vector<const std::string*> names(ns);
    for (const auto& [q, i] : state_index) names[i] = &q;

    auto eval = [&](auto&& self, int q, int node) -> bool {
        signed char& slot = memo[static_cast<std::size_t>(q) * nn + node];
        if (slot >= 0) return slot != 0;
        const Node& n = *ix.nodes[node];
        const Formula& f = a.rule(*names[q], symbol_name(n));
        bool ok = false;
        for (const Clause& c : f.clauses) {
            bool all = true;
            for (const Atom& at : c) {
                int child = ix.children[node][at.child - 1];
                if (!self(self, state_index.at(at.state), child)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                ok = true;
                break;
            }
        }
        slot = ok ? 1 : 0;
        return ok;
    };

    Verdict v;
    auto sit = state_index.find(a.start);
    if (sit == state_index.end())
        throw std::invalid_argument("start state '" + a.start + "' not declared");
    v.accepted = eval(eval, sit->second, 0);
    v.witness.emplace();
    for (int q = 0; q < ns; ++q)
        for (int node = 0; node < nn; ++node) {
            signed char slot = memo[static_cast<std::size_t>(q) * nn + node];
            if (slot >= 0)
                (*v.witness)[{ix.addresses[node], *names[q]}] = slot != 0;
        }
    return v;
}

namespace {

Ata combine(const Ata& a, const Ata& b, bool conjunction) {
    if (a.alphabet != b.alphabet)
        throw std::invalid_argument("alphabet mismatch between automata");
    Ata r;
    r.alphabet = a.alphabet;
    r.states = a.states;
    r.delta = a.delta;
    for (const std::string& q : b.states) {
        if (r.states.count(q)) {
            for (const auto& [sym, arity] : r.alphabet)
                if (!(a.rule(q, sym) == b.rule(q, sym)))
                    throw std::logic_error("shared state '" + q +
                                           "' has conflicting rules");
            continue;
        }
        r.states.insert(q);
        for (const auto& [sym, arity] : r.alphabet)
            r.set_rule(q, sym, b.rule(q, sym));
    }
    std::string fresh = conjunction ? "qand" : "qor";
    while (r.states.count(fresh)) fresh += 'x';
    r.states.insert(fresh);
    for (const auto& [sym, arity] : r.alphabet) {
        Formula f = conjunction ? formula_and(a.rule(a.start, sym), b.rule(b.start, sym))
                                : formula_or(a.rule(a.start, sym), b.rule(b.start, sym));
        r.set_rule(fresh, sym, std::move(f));
    }
    r.start = fresh;
    return r;
}

}  // namespace

Ata conjoin(const Ata& a, const Ata& b) { return combine(a, b, true); }

Ata disjoin(const Ata& a, const Ata& b) { return combine(a, b, false); }

Ata lift_over_br(const Ata& a) {
    if (a.alphabet.count("br"))
        throw std::invalid_argument("alphabet already contains br");
    Ata r = a;
    r.alphabet["br"] = 2;
    std::string fresh = "qbr";
    while (r.states.count(fresh)) fresh += 'x';
    r.states.insert(fresh);
    for (const auto& [sym, arity] : a.alphabet)
        r.set_rule(fresh, sym, a.rule(a.start, sym));
    r.set_rule(fresh, "br",
               formula_and(Formula::atom(1, a.start), Formula::atom(2, fresh)));
    r.start = fresh;
    return r;
}

std::string serialize(const Ata& a) {
    std::ostringstream out;
    out << "alphabet:\n";
    for (const auto& [sym, arity] : a.alphabet) out << sym << ' ' << arity << '\n';
    out << "states:";
    for (const std::string& q : a.states) out << ' ' << q;
    out << '\n';
    out << "start: " << a.start << '\n';
    out << "rules:\n";
    for (const std::string& q : a.states)
        for (const auto& [sym, arity] : a.alphabet)
            out << q << ' ' << sym << " -> " << formula_to_string(a.rule(q, sym))
                << '\n';
    return out.str();
}

namespace {

/// Token stream over one rule's right-hand side.
struct FormulaLexer {
    const std::string& text;
    std::size_t pos = 0;
    int line;

    FormulaLexer(const std::string& t, int ln) : text(t), line(ln) {}

    std::string next() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos >= text.size()) return "";
        char c = text[pos];
        if (c == '(' || c == ')' || c == ',') {
            ++pos;
            return std::string(1, c);
        }
        if (c == '/' || c == '\\') {
            if (pos + 1 < text.size() &&
                ((c == '/' && text[pos + 1] == '\\') ||
                 (c == '\\' && text[pos + 1] == '/'))) {
                pos += 2;
                return c == '/' ? "/\\" : "\\/";
            }
            throw ParseError("stray '" + std::string(1, c) + "' in formula", line,
                             static_cast<int>(pos) + 1);
        }
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                text[pos] == '_' || text[pos] == '$'))
            ++pos;
        if (pos == start)
            throw ParseError("unexpected character '" + std::string(1, c) +
                                 "' in formula",
                             line, static_cast<int>(pos) + 1);
        return text.substr(start, pos - start);
    }

    std::string peek() {
        std::size_t save = pos;
        std::string t = next();
        pos = save;
        return t;
    }

    void expect(const std::string& t) {
        std::string got = next();
        if (got != t)
            throw ParseError("expected '" + t + "', found '" + got + "'", line,
                             static_cast<int>(pos) + 1);
    }
};

bool is_integer(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Formula parse_or(FormulaLexer& lx);

Formula parse_primary(FormulaLexer& lx) {
    std::string t = lx.next();
    if (t == "true") return Formula::f_true();
    if (t == "false") return Formula::f_false();
    if (t == "(") {
        std::string first = lx.peek();
        if (is_integer(first)) {
            lx.next();
            lx.expect(",");
            std::string state = lx.next();
            if (state.empty() || is_integer(state))
                throw ParseError("expected state name in atom", lx.line,
                                 static_cast<int>(lx.pos) + 1);
            lx.expect(")");
            return Formula::atom(std::stoi(first), state);
        }
        Formula inner = parse_or(lx);
        lx.expect(")");
        return inner;
    }
    throw ParseError("expected formula, found '" + t + "'", lx.line,
                     static_cast<int>(lx.pos) + 1);
}

Formula parse_and(FormulaLexer& lx) {
    Formula f = parse_primary(lx);
    while (lx.peek() == "/\\") {
        lx.next();
        f = formula_and(f, parse_primary(lx));
    }
    return f;
}

Formula parse_or(FormulaLexer& lx) {
    Formula f = parse_and(lx);
    while (lx.peek() == "\\/") {
        lx.next();
        f = formula_or(f, parse_and(lx));
    }
    return f;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Ata parse_ata(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, raw)) {
            ++line_no;
            out = strip(raw);
            if (!out.empty()) return true;
        }
        return false;
    };

    Ata a;
    std::string line;
    if (!next_line(line) || line != "alphabet:")
        throw ParseError("expected 'alphabet:' header", line_no, 1);

    bool saw_states = false;
    while (next_line(line)) {
        if (line.rfind("states:", 0) == 0) {
            saw_states = true;
            std::istringstream ls(line.substr(7));
            std::string q;
            while (ls >> q) a.states.insert(q);
            break;
        }
        std::istringstream ls(line);
        std::string sym;
        int arity;
        if (!(ls >> sym >> arity) || arity < 0 || !(ls >> std::ws).eof())
            throw ParseError("expected 'symbol arity' line", line_no, 1);
        if (a.alphabet.count(sym))
            throw ParseError("duplicate alphabet symbol '" + sym + "'", line_no, 1);
        a.alphabet[sym] = arity;
    }
    if (!saw_states) throw ParseError("expected 'states:' line", line_no, 1);
    if (a.states.empty()) throw ParseError("empty state set", line_no, 1);

    if (!next_line(line) || line.rfind("start:", 0) != 0)
        throw ParseError("expected 'start:' line", line_no, 1);
    a.start = strip(line.substr(6));
    if (a.start.empty()) throw ParseError("missing start state", line_no, 1);

    if (!next_line(line) || line != "rules:")
        throw ParseError("expected 'rules:' line", line_no, 1);

    while (next_line(line)) {
        std::size_t arrow = line.find("->");
        if (arrow == std::string::npos)
            throw ParseError("rule line missing '->'", line_no, 1);
        std::istringstream head(line.substr(0, arrow));
        std::string state, sym, extra;
        if (!(head >> state >> sym) || (head >> extra))
            throw ParseError("rule head must be 'state symbol'", line_no, 1);
        if (!a.states.count(state))
            throw ParseError("rule for undeclared state '" + state + "'", line_no, 1);
        if (!a.alphabet.count(sym))
            throw ParseError("rule for unknown symbol '" + sym + "'", line_no, 1);
        std::string rhs = line.substr(arrow + 2);
        FormulaLexer lx(rhs, line_no);
        Formula f = parse_or(lx);
        if (!lx.peek().empty())
            throw ParseError("trailing input after formula", line_no,
                             static_cast<int>(lx.pos) + 1);
        a.set_rule(state, sym, std::move(f));
    }

    try {
        a.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, 1);
    }
    return a;
}

}  // namespace atab
