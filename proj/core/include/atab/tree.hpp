// tree.hpp -- action trees over spawn/join/lock alphabets
//
// An action tree records the concurrency-relevant actions of a program run:
// thread creation (sp), joining (jo), lock acquisition/release (acqN/relN),
// named check points (lab X), termination ($) and silent stopping (bot).
// Forests glue several trees together with the binary br symbol.

#ifndef ATAB_TREE_HPP
#define ATAB_TREE_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace atab {

/// Node kinds of an action tree. Arities: Spawn 2, Join 1, Acquire 1,
/// Release 1, Terminate 0, Stop 0, Br 2. Label is 1 in source trees and 0 in
/// cropped trees (a cropped label marks the exact point being checked).
enum class Kind {
    Spawn,
    Join,
    Acquire,
    Release,
    Label,
    Terminate,  // $
    Stop,       // bot: the thread stops without terminating
    Br,         // forest glue; never below a non-Br node
};

/// Path of 1-based child indices from the root; empty = root.
using NodeAddress = std::vector<int>;

/// Renders an address as "1.2.1"; the root renders as "e".
std::string address_to_string(const NodeAddress& a);

/// A finite action tree. Value semantics; immutable by convention after
/// construction.
struct Node {
    Kind kind = Kind::Terminate;
    int lock = 0;        ///< for Acquire/Release: lock id in [1..k]
    std::string label;   ///< for Label: the label id
    std::vector<Node> children;

    bool operator==(const Node& other) const;
    bool operator!=(const Node& other) const { return !(*this == other); }
};

Node spawn(Node left, Node right);
Node join(Node child);
Node acquire(int lock, Node child);
Node release(int lock, Node child);
Node label_leaf(std::string name);
Node label_over(std::string name, Node child);
Node terminate_leaf();
Node stop_leaf();
Node br(Node left, Node right);

/// Map symbol-name -> arity. Symbol names are single tokens: "sp", "jo",
/// "br", "$", "bot", "acq1".."acqK", "rel1".."relK", and "lab" + label id.
using RankedAlphabet = std::map<std::string, int>;

/// Whether label nodes are expected to be leaves (cropped trees) or to carry
/// the thread continuation (source trees). The parser accepts both arities;
/// the mode is recorded so callers can validate inputs against it.
enum class LabelMode { Source, Cropped };

/// The input triple of a check: lock count, label universe, and the label
/// pairs whose joint reachability is asked about.
struct CheckConfig {
    int lock_count = 0;
    std::vector<std::string> labels;
    std::vector<std::pair<std::string, std::string>> pairs;
    LabelMode label_mode = LabelMode::Source;

    /// Throws std::invalid_argument if a pair references an unknown label or
    /// lock_count is negative.
    void validate() const;
    bool has_label(const std::string& l) const;

    /// The ranked alphabet for this configuration (labels arity 0).
    /// with_br additionally declares br:2 for forest evaluation.
    RankedAlphabet alphabet(bool with_br = false) const;
};

/// Parse error with 1-based position information.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& what, int line, int column);
};

/// Parses the parenthesized prefix grammar
///   tree := "(" sym tree* ")"
///   sym  := "sp" | "jo" | "br" | "$" | "bot" | "acq" INT | "rel" INT | "lab" IDENT
/// (whitespace-insensitive). Lock ids must be within config.lock_count and
/// labels within config.labels. Labels accept 0 or 1 children; in
/// LabelMode::Cropped a label with a child is rejected.
Node parse_tree(const std::string& text, const CheckConfig& config);

/// Canonical text form; parse_tree(serialize_tree(t)) == t.
std::string serialize_tree(const Node& t);

/// Appends the canonical text form to out (no allocation beyond growth).
void serialize_tree(const Node& t, std::string& out);

/// Token name of a node's symbol ("sp", "acq2", "labA", ...).
std::string symbol_name(const Node& n);

/// Resolves an address; throws std::out_of_range if it does not resolve.
const Node& node_at(const Node& t, const NodeAddress& a);

/// True iff a's path is a (proper or equal) prefix of b's path. Both
/// addresses must resolve in t.
bool descendant(const Node& t, const NodeAddress& a, const NodeAddress& b);

/// One entry per leaf: the leaf's address (its path from the root is the
/// full branch). A thread corresponds to exactly one leaf: it starts at the
/// root or at a spawn's second child and follows first children at spawns.
std::vector<NodeAddress> threads(const Node& t);

/// Projects a branch (sequence of node kinds along a thread's own spine) to
/// its Acquire/Release actions.
std::vector<Kind> locking_sequence(const std::vector<Kind>& branch);

/// True iff every thread's own locking sequence is a well-bracketed prefix:
/// a lock is never acquired while held and only the most recently acquired
/// lock may be released.
bool is_lock_well_formed(const Node& t, int lock_count);

/// Lock-well-formed, and every thread ending in `$` holds no locks there.
/// (Nothing can follow a `$` structurally: it has arity 0.) Threads ending
/// in bot or a label may hold locks -- those are final acquisitions.
bool is_join_lock_well_formed(const Node& t, int lock_count);

/// True iff t contains a Br node anywhere.
bool contains_br(const Node& t);

/// Number of nodes.
std::size_t node_count(const Node& t);

// ---------------------------------------------------------------------------
// Indexed view used by the oracle and the croppers: preorder ids, parents,
// and the thread structure (which thread owns each node).

struct TreeIndex {
    const Node* root;
    std::vector<const Node*> nodes;       ///< by preorder id
    std::vector<NodeAddress> addresses;   ///< by preorder id
    std::vector<int> parent;              ///< preorder id or -1 for the root
    std::vector<std::vector<int>> children;  ///< preorder ids
    std::vector<int> thread_of;           ///< owning thread per node
    std::vector<std::vector<int>> thread_spine;  ///< own nodes per thread, root-to-leaf order
    std::vector<int> thread_start;        ///< first node of each thread
    std::vector<int> thread_leaf;         ///< leaf node of each thread

    explicit TreeIndex(const Node& t);
    int id_of(const NodeAddress& a) const;
};

}  // namespace atab

#endif  // ATAB_TREE_HPP
