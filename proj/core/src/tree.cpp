#include "atab/tree.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace atab {

std::string address_to_string(const NodeAddress& a) {
    if (a.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(a[i]);
    }
    return out;
}

bool Node::operator==(const Node& other) const {
    if (kind != other.kind || lock != other.lock || label != other.label ||
        children.size() != other.children.size())
        return false;
    for (std::size_t i = 0; i < children.size(); ++i)
        if (children[i] != other.children[i]) return false;
    return true;
}

Node spawn(Node left, Node right) {
    Node n;
    n.kind = Kind::Spawn;
    n.children.push_back(std::move(left));
    n.children.push_back(std::move(right));
    return n;
}

Node join(Node child) {
    Node n;
    n.kind = Kind::Join;
    n.children.push_back(std::move(child));
    return n;
}

Node acquire(int lock, Node child) {
    Node n;
    n.kind = Kind::Acquire;
    n.lock = lock;
    n.children.push_back(std::move(child));
    return n;
}

Node release(int lock, Node child) {
    Node n;
    n.kind = Kind::Release;
    n.lock = lock;
    n.children.push_back(std::move(child));
    return n;
}

Node label_leaf(std::string name) {
    Node n;
    n.kind = Kind::Label;
    n.label = std::move(name);
    return n;
}

Node label_over(std::string name, Node child) {
    Node n = label_leaf(std::move(name));
    n.children.push_back(std::move(child));
    return n;
}

Node terminate_leaf() {
    Node n;
    n.kind = Kind::Terminate;
    return n;
}

Node stop_leaf() {
    Node n;
    n.kind = Kind::Stop;
    return n;
}

Node br(Node left, Node right) {
    Node n;
    n.kind = Kind::Br;
    n.children.push_back(std::move(left));
    n.children.push_back(std::move(right));
    return n;
}

void CheckConfig::validate() const {
    if (lock_count < 0)
        throw std::invalid_argument("lock count must be non-negative");
    for (const auto& l : labels)
        if (l.empty()) throw std::invalid_argument("empty label id");
    for (const auto& [a, b] : pairs) {
        if (!has_label(a))
            throw std::invalid_argument("pair references unknown label: " + a);
        if (!has_label(b))
            throw std::invalid_argument("pair references unknown label: " + b);
    }
}

bool CheckConfig::has_label(const std::string& l) const {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
}

RankedAlphabet CheckConfig::alphabet(bool with_br) const {
    RankedAlphabet sigma;
    sigma["sp"] = 2;
    sigma["jo"] = 1;
    sigma["$"] = 0;
    sigma["bot"] = 0;
    for (int i = 1; i <= lock_count; ++i) {
        sigma["acq" + std::to_string(i)] = 1;
        sigma["rel" + std::to_string(i)] = 1;
    }
    for (const auto& l : labels) sigma["lab" + l] = 0;
    if (with_br) sigma["br"] = 2;
    return sigma;
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(what + " at line " + std::to_string(line) +
                         ", column " + std::to_string(column)),
      line(line),
      column(column) {}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;
    int column = 1;

    explicit Cursor(const std::string& t) : text(t) {}

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++pos;
    }

    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, column);
    }

    void expect(char c) {
        if (done() || peek() != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }

    /// Maximal run of symbol characters (letters, digits, '_', '$').
    std::string atom() {
        std::string out;
        while (!done()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
                out += c;
                advance();
            } else {
                break;
            }
        }
        if (out.empty()) fail("expected a symbol");
        return out;
    }
};

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Node parse_node(Cursor& cur, const CheckConfig& config) {
    cur.skip_ws();
    int line = cur.line, column = cur.column;
    cur.expect('(');
    cur.skip_ws();
    std::string sym = cur.atom();

    Node n;
    int arity_min = 0, arity_max = 0;
    if (sym == "sp") {
        n.kind = Kind::Spawn;
        arity_min = arity_max = 2;
    } else if (sym == "jo") {
        n.kind = Kind::Join;
        arity_min = arity_max = 1;
    } else if (sym == "br") {
        n.kind = Kind::Br;
        arity_min = arity_max = 2;
    } else if (sym == "$") {
        n.kind = Kind::Terminate;
    } else if (sym == "bot") {
        n.kind = Kind::Stop;
    } else if (sym == "acq" || sym == "rel" ||
               ((sym.rfind("acq", 0) == 0 || sym.rfind("rel", 0) == 0) &&
                all_digits(sym.substr(3)))) {
        n.kind = sym.rfind("acq", 0) == 0 ? Kind::Acquire : Kind::Release;
        std::string digits = sym.substr(3);
        if (digits.empty()) {  // "acq 1" with whitespace between token parts
            cur.skip_ws();
            digits = cur.atom();
            if (!all_digits(digits))
                throw ParseError("expected a lock id after '" + sym + "'", line, column);
        }
        n.lock = std::stoi(digits);
        if (n.lock < 1 || n.lock > config.lock_count)
            throw ParseError("unknown lock id " + digits + " (configured locks: 1.." +
                                 std::to_string(config.lock_count) + ")",
                             line, column);
        arity_min = arity_max = 1;
    } else if (sym == "lab" || sym.rfind("lab", 0) == 0) {
        n.kind = Kind::Label;
        std::string id = sym.substr(3);
        if (id.empty()) {
            cur.skip_ws();
            if (cur.done() || cur.peek() == '(' || cur.peek() == ')')
                throw ParseError("expected a label id after 'lab'", line, column);
            id = cur.atom();
        }
        if (!config.has_label(id))
            throw ParseError("unknown label id '" + id + "'", line, column);
        n.label = id;
        arity_min = 0;
        arity_max = config.label_mode == LabelMode::Cropped ? 0 : 1;
    } else {
        throw ParseError("unknown symbol '" + sym + "'", line, column);
    }

    cur.skip_ws();
    while (!cur.done() && cur.peek() == '(') {
        n.children.push_back(parse_node(cur, config));
        cur.skip_ws();
    }
    if (cur.done()) cur.fail("unbalanced parentheses");
    cur.expect(')');

    int arity = static_cast<int>(n.children.size());
    if (arity < arity_min || arity > arity_max) {
        std::ostringstream msg;
        msg << "symbol '" << sym << "' takes ";
        if (arity_min == arity_max)
            msg << arity_min;
        else
            msg << arity_min << " or " << arity_max;
        msg << " children, got " << arity;
        throw ParseError(msg.str(), line, column);
    }
    return n;
}

void serialize_into(const Node& n, std::string& out) {
    out += '(';
    if (n.kind == Kind::Label) {
        out += "lab ";
        out += n.label;
    } else {
        out += symbol_name(n);
    }
    for (const Node& c : n.children) {
        out += ' ';
        serialize_into(c, out);
    }
    out += ')';
}

}  // namespace

Node parse_tree(const std::string& text, const CheckConfig& config) {
    Cursor cur(text);
    Node root = parse_node(cur, config);
    cur.skip_ws();
    if (!cur.done()) cur.fail("trailing input after tree");
    return root;
}

std::string symbol_name(const Node& n) {
    switch (n.kind) {
        case Kind::Spawn: return "sp";
        case Kind::Join: return "jo";
        case Kind::Acquire: return "acq" + std::to_string(n.lock);
        case Kind::Release: return "rel" + std::to_string(n.lock);
        case Kind::Label: return "lab" + n.label;
        case Kind::Terminate: return "$";
        case Kind::Stop: return "bot";
        case Kind::Br: return "br";
    }
    return "?";
}

std::string serialize_tree(const Node& t) {
    std::string out;
    serialize_into(t, out);
    return out;
}

void serialize_tree(const Node& t, std::string& out) {
    serialize_into(t, out);
}

const Node& node_at(const Node& t, const NodeAddress& a) {
    const Node* n = &t;
    for (int step : a) {
        if (step < 1 || static_cast<std::size_t>(step) > n->children.size())
            throw std::out_of_range("address " + address_to_string(a) +
                                    " does not resolve in the tree");
        n = &n->children[step - 1];
    }
    return *n;
}

bool descendant(const Node& t, const NodeAddress& a, const NodeAddress& b) {
    node_at(t, a);
    node_at(t, b);
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

namespace {

void collect_leaves(const Node& n, NodeAddress& path, std::vector<NodeAddress>& out) {
    if (n.children.empty()) {
        out.push_back(path);
        return;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        path.push_back(static_cast<int>(i + 1));
        collect_leaves(n.children[i], path, out);
        path.pop_back();
    }
}

}  // namespace

std::vector<NodeAddress> threads(const Node& t) {
    std::vector<NodeAddress> out;
    NodeAddress path;
    collect_leaves(t, path, out);
    return out;
}

std::vector<Kind> locking_sequence(const std::vector<Kind>& branch) {
    std::vector<Kind> out;
    for (Kind k : branch)
        if (k == Kind::Acquire || k == Kind::Release) out.push_back(k);
    return out;
}

namespace {

/// Runs the bracket check over one thread's own spine. Returns false on a
/// violation; otherwise leaves the final stack in `stack`.
bool thread_bracket_check(const TreeIndex& ix, int thread, std::vector<int>& stack) {
    stack.clear();
    for (int id : ix.thread_spine[thread]) {
        const Node& n = *ix.nodes[id];
        if (n.kind == Kind::Acquire) {
            if (std::find(stack.begin(), stack.end(), n.lock) != stack.end())
                return false;  // reacquired while held
            stack.push_back(n.lock);
        } else if (n.kind == Kind::Release) {
            if (stack.empty() || stack.back() != n.lock) return false;  // not nested
            stack.pop_back();
        }
    }
    return true;
}

}  // namespace

bool is_lock_well_formed(const Node& t, int lock_count) {
    TreeIndex ix(t);
    std::vector<int> stack;
    for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
        if (!thread_bracket_check(ix, static_cast<int>(th), stack)) return false;
        for (int l : stack)
            if (l < 1 || l > lock_count) return false;
    }
    return true;
}

bool is_join_lock_well_formed(const Node& t, int lock_count) {
    TreeIndex ix(t);
    std::vector<int> stack;
    for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
        if (!thread_bracket_check(ix, static_cast<int>(th), stack)) return false;
        for (int l : stack)
            if (l < 1 || l > lock_count) return false;
        const Node& leaf = *ix.nodes[ix.thread_leaf[th]];
        if (leaf.kind == Kind::Terminate && !stack.empty()) return false;
    }
    return true;
}

bool contains_br(const Node& t) {
    if (t.kind == Kind::Br) return true;
    for (const Node& c : t.children)
        if (contains_br(c)) return true;
    return false;
}

std::size_t node_count(const Node& t) {
    std::size_t n = 1;
    for (const Node& c : t.children) n += node_count(c);
    return n;
}

namespace {

void index_walk(const Node& n, int parent, NodeAddress& path, TreeIndex& ix) {
    int id = static_cast<int>(ix.nodes.size());
    ix.nodes.push_back(&n);
    ix.addresses.push_back(path);
    ix.parent.push_back(parent);
    ix.children.emplace_back();
    if (parent >= 0) ix.children[parent].push_back(id);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        path.push_back(static_cast<int>(i + 1));
        index_walk(n.children[i], id, path, ix);
        path.pop_back();
    }
}

}  // namespace

TreeIndex::TreeIndex(const Node& t) : root(&t) {
    if (contains_br(t))
        throw std::invalid_argument("thread index is only defined for br-free trees");
    NodeAddress path;
    index_walk(t, -1, path, *this);
    thread_of.assign(nodes.size(), -1);

    // A thread starts at the root or at a spawn's second child and follows
    // first children everywhere else (spawns continue the same thread on
    // child 1).
    std::vector<int> starts;
    starts.push_back(0);
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (nodes[id]->kind == Kind::Spawn) starts.push_back(children[id][1]);
    std::sort(starts.begin(), starts.end());

    for (int start : starts) {
        int th = static_cast<int>(thread_spine.size());
        thread_start.push_back(start);
        thread_spine.emplace_back();
        int cur = start;
        while (true) {
            thread_of[cur] = th;
            thread_spine[th].push_back(cur);
            if (nodes[cur]->children.empty()) break;
            cur = children[cur][0];
        }
        thread_leaf.push_back(thread_spine[th].back());
    }
}

int TreeIndex::id_of(const NodeAddress& a) const {
    for (std::size_t id = 0; id < addresses.size(); ++id)
        if (addresses[id] == a) return static_cast<int>(id);
    throw std::out_of_range("address " + address_to_string(a) + " not in tree");
}

}  // namespace atab
