#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atab/tree.hpp"

namespace atab {

/// One conjunct of a transition formula: "child `child` is accepted from
/// `state`". Child indices are 1-based, matching node addresses.
struct Atom {
    int child = 1;
    std::string state;
    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using Clause = std::vector<Atom>;

/// Positive boolean formula kept in canonical disjunctive normal form:
/// no clauses is false, a single empty clause is true. Atoms within a
/// clause are sorted and deduplicated; clauses are sorted by size then
/// lexicographically, and any clause subsumed by a subset clause is
/// dropped. Two equivalent formulas built through formula_and/formula_or
/// therefore compare equal structurally.
struct Formula {
    std::vector<Clause> clauses;

    static Formula f_false() { return {}; }
    static Formula f_true() { return {{Clause{}}}; }
    static Formula atom(int child, const std::string& state) {
        return {{Clause{Atom{child, state}}}};
    }

    bool is_false() const { return clauses.empty(); }
    bool is_true() const { return clauses.size() == 1 && clauses[0].empty(); }

    friend bool operator==(const Formula&, const Formula&) = default;
};

Formula formula_and(const Formula& a, const Formula& b);
Formula formula_or(const Formula& a, const Formula& b);
std::string formula_to_string(const Formula& f);

/// Result of running an automaton on a tree. The witness, when present,
/// is the full evaluation table: for every (node, state) pair the run
/// touched, whether that state accepts the subtree at that node.
struct Verdict {
    bool accepted = false;
    std::optional<std::map<std::pair<NodeAddress, std::string>, bool>> witness;
};

/// Alternating tree automaton over a ranked alphabet. The transition map
/// is total by convention: a (state, symbol) pair absent from delta means
/// false, and serialization writes every pair out explicitly.
struct Ata {
    RankedAlphabet alphabet;
    std::set<std::string> states;
    std::string start;
    std::map<std::pair<std::string, std::string>, Formula> delta;

    /// Stored formula, or a shared false for pairs never set.
    const Formula& rule(const std::string& state, const std::string& sym) const;
    void set_rule(const std::string& state, const std::string& sym, Formula f);

    /// Throws std::invalid_argument on a dangling start state, a rule for
    /// an unknown state/symbol, an atom naming an unknown state, or an
    /// atom's child index exceeding its symbol's arity.
    void validate() const;
};

/// Evaluates the automaton on a finite tree, memoized per (state, node).
/// Throws std::invalid_argument when the tree uses a symbol that is not
/// in the alphabet (name and arity must both match).
Verdict evaluate(const Ata& a, const Node& t);

/// Fresh-start conjunction/disjunction: the result accepts exactly when
/// both/either input accepts. States are unioned; a name collision is
/// only tolerated when both automata give the state identical rules.
Ata conjoin(const Ata& a, const Ata& b);
Ata disjoin(const Ata& a, const Ata& b);

/// Extends an automaton over br-joined forests: the new start state walks
/// the right-nested br spine and requires acceptance of every constituent.
Ata lift_over_br(const Ata& a);

std::string serialize(const Ata& a);
Ata parse_ata(const std::string& text);

}  // namespace atab
