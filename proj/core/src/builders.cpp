#include "atab/builders.hpp"

#include <stdexcept>

namespace atab {

namespace {

Formula at(int child, const std::string& q) { return Formula::atom(child, q); }

std::string acq_sym(int i) { return "acq" + std::to_string(i); }
std::string rel_sym(int i) { return "rel" + std::to_string(i); }
std::string lab_sym(const std::string& l) { return "lab" + l; }

/// Shared scaffolding: the cropped alphabet of the configuration plus row
/// helpers. The convention throughout: a "pass" row keeps the state on the
/// thread spine, and rows not set default to false.
struct WidgetBuilder {
    Ata a;
    int k;
    std::vector<std::string> labels;

    explicit WidgetBuilder(const CheckConfig& cfg)
        : k(cfg.lock_count), labels(cfg.labels) {
        cfg.validate();
        a.alphabet = cfg.alphabet(false);
    }

    void state(const std::string& q) { a.states.insert(q); }
    void rule(const std::string& q, const std::string& sym, Formula f) {
        a.set_rule(q, sym, std::move(f));
    }

    /// jo and every acquire/release continue in the same state.
    void pass_operators(const std::string& q) {
        rule(q, "jo", at(1, q));
        for (int i = 1; i <= k; ++i) {
            rule(q, acq_sym(i), at(1, q));
            rule(q, rel_sym(i), at(1, q));
        }
    }

    void terminals_true(const std::string& q) {
        rule(q, "$", Formula::f_true());
        rule(q, "bot", Formula::f_true());
        for (const std::string& l : labels) rule(q, lab_sym(l), Formula::f_true());
    }

    Ata finish(const std::string& start) {
        a.start = start;
        a.validate();
        return std::move(a);
    }
};

void check_lock(int x, const CheckConfig& cfg) {
    if (x < 1 || x > cfg.lock_count)
        throw std::invalid_argument("lock " + std::to_string(x) + " out of range");
}

/// The "parent thread reaches a join" helper state used by both the child
/// termination and join-lock widgets; rows are identical so the automata
/// can share the state when combined.
void add_join_ahead_state(WidgetBuilder& b) {
    const std::string q = "qb_jo";
    b.state(q);
    b.pass_operators(q);
    b.rule(q, "jo", Formula::f_true());
    b.rule(q, "sp", at(1, q));
}

/// qfa_i: the current thread ends holding lock i (no release of i ahead on
/// its own spine; spawned subtrees are irrelevant).
void add_final_hold_states(WidgetBuilder& b) {
    for (int i = 1; i <= b.k; ++i) {
        std::string q = "qfa_" + std::to_string(i);
        b.state(q);
        b.pass_operators(q);
        b.rule(q, rel_sym(i), Formula::f_false());
        b.rule(q, "sp", at(1, q));
        b.terminals_true(q);
    }
}

/// qacq_i: somewhere in this subtree lock i is acquired.
void add_acquire_below_states(WidgetBuilder& b) {
    for (int i = 1; i <= b.k; ++i) {
        std::string q = "qacq_" + std::to_string(i);
        b.state(q);
        b.pass_operators(q);
        b.rule(q, acq_sym(i), Formula::f_true());
        b.rule(q, "sp", formula_or(at(1, q), at(2, q)));
    }
}

std::string dep_state(int a, int b) {
    return "qdep_" + std::to_string(a) + "_" + std::to_string(b);
}

/// qdep_a_b: below here, lock a is finally acquired with lock b wanted
/// later — directly, or through a chain of final acquisitions of
/// intermediate locks. The direct clause sorts before the indirect ones.
void add_dependency_states(WidgetBuilder& b, int target) {
    for (int a = 1; a <= b.k; ++a) {
        std::string q = dep_state(a, target);
        b.state(q);
        b.pass_operators(q);
        b.rule(q, "sp", formula_or(at(1, q), at(2, q)));
        Formula f = at(1, q);
        f = formula_or(f, formula_and(at(1, "qfa_" + std::to_string(a)),
                                      at(1, "qacq_" + std::to_string(target))));
        for (int z = 1; z <= b.k; ++z) {
            if (z == a || z == target) continue;
            f = formula_or(f, formula_and(formula_and(at(1, "qfa_" + std::to_string(a)),
                                                      at(1, "qacq_" + std::to_string(z))),
                                          at(1, dep_state(z, target))));
        }
        b.rule(q, acq_sym(a), std::move(f));
    }
}

/// Union of states and rules; a shared state name is only accepted when
/// both sides give it identical rules.
void merge_into(Ata& into, const Ata& from) {
    for (const std::string& q : from.states) {
        if (into.states.count(q)) {
            for (const auto& [sym, arity] : into.alphabet)
                if (!(into.rule(q, sym) == from.rule(q, sym)))
                    throw std::logic_error("widget state '" + q +
                                           "' has conflicting rules");
            continue;
        }
        into.states.insert(q);
        for (const auto& [sym, arity] : into.alphabet)
            into.set_rule(q, sym, from.rule(q, sym));
    }
}

}  // namespace

Ata build_final_acq(int x, const CheckConfig& config) {
    check_lock(x, config);
    WidgetBuilder b(config);
    std::string qr = "qr_" + std::to_string(x), qa = "qa_" + std::to_string(x);
    b.state(qr);
    b.state(qa);

    b.pass_operators(qr);
    b.rule(qr, acq_sym(x), at(1, qa));
    b.rule(qr, rel_sym(x), Formula::f_false());
    b.rule(qr, "sp", formula_and(at(1, qr), at(2, qr)));

    b.pass_operators(qa);
    b.rule(qa, acq_sym(x), Formula::f_false());
    b.rule(qa, rel_sym(x), at(1, qr));
    b.rule(qa, "sp", formula_and(at(1, qa), at(2, qr)));
    b.terminals_true(qa);

    return b.finish(qr);
}

Ata build_spawn_pair(const CheckConfig& config) {
    WidgetBuilder b(config);
    b.state("q2");
    b.state("q1");

    b.pass_operators("q2");
    b.rule("q2", "sp",
           formula_or(formula_or(at(1, "q2"), at(2, "q2")),
                      formula_and(at(1, "q1"), at(2, "q1"))));

    b.pass_operators("q1");
    b.rule("q1", "sp", formula_and(at(1, "q1"), at(2, "q1")));
    b.terminals_true("q1");

    return b.finish("q2");
}

Ata build_dfa(int x, const CheckConfig& config) {
    check_lock(x, config);
    WidgetBuilder b(config);
    std::string s = std::to_string(x);
    std::string qr2 = "qr2_" + s, qa2 = "qa2_" + s, qr1 = "qr1_" + s, qa1 = "qa1_" + s;
    for (const std::string& q : {qr2, qa2, qr1, qa1}) b.state(q);

    b.pass_operators(qr2);
    b.rule(qr2, acq_sym(x), at(1, qa2));
    b.rule(qr2, rel_sym(x), Formula::f_false());
    b.rule(qr2, "sp",
           formula_or(formula_or(at(1, qr2), at(2, qr2)),
                      formula_and(at(1, qr1), at(2, qr1))));

    b.pass_operators(qa2);
    b.rule(qa2, acq_sym(x), Formula::f_false());
    b.rule(qa2, rel_sym(x), at(1, qr2));
    b.rule(qa2, "sp",
           formula_or(formula_or(at(1, qa2), at(2, qr2)),
                      formula_and(at(1, qa1), at(2, qr1))));

    b.pass_operators(qr1);
    b.rule(qr1, acq_sym(x), at(1, qa1));
    b.rule(qr1, rel_sym(x), Formula::f_false());
    b.rule(qr1, "sp", formula_or(at(1, qr1), at(2, qr1)));

    b.pass_operators(qa1);
    b.rule(qa1, acq_sym(x), Formula::f_false());
    b.rule(qa1, rel_sym(x), at(1, qr1));
    b.rule(qa1, "sp", formula_or(at(1, qa1), at(2, qr1)));
    b.terminals_true(qa1);

    return b.finish(qr2);
}

Ata build_child_term(const CheckConfig& config) {
    WidgetBuilder b(config);
    b.state("qb0");
    b.state("qb_bot");
    add_join_ahead_state(b);

    b.pass_operators("qb0");
    b.rule("qb0", "sp",
           formula_or(formula_or(at(1, "qb0"), at(2, "qb0")),
                      formula_and(at(1, "qb_jo"), at(2, "qb_bot"))));

    // qb_bot: some thread of this subtree never terminates.
    b.pass_operators("qb_bot");
    b.rule("qb_bot", "sp", formula_or(at(1, "qb_bot"), at(2, "qb_bot")));
    b.rule("qb_bot", "bot", Formula::f_true());
    for (const std::string& l : b.labels) b.rule("qb_bot", lab_sym(l), Formula::f_true());

    return b.finish("qb0");
}

Ata build_join_lock(int x, const CheckConfig& config) {
    check_lock(x, config);
    WidgetBuilder b(config);
    std::string s = std::to_string(x);
    std::string qjlr = "qjlr_" + s, qjla = "qjla_" + s;
    std::string qbkeep = "qbkeep_" + s, qbuse = "qbuse_" + s;
    for (const std::string& q : {qjlr, qjla, qbkeep, qbuse}) b.state(q);
    add_join_ahead_state(b);

    b.pass_operators(qjlr);
    b.rule(qjlr, acq_sym(x), at(1, qjla));
    b.rule(qjlr, rel_sym(x), Formula::f_false());
    b.rule(qjlr, "sp", formula_or(at(1, qjlr), at(2, qjlr)));

    b.pass_operators(qjla);
    b.rule(qjla, acq_sym(x), Formula::f_false());
    b.rule(qjla, rel_sym(x), at(1, qjlr));
    b.rule(qjla, "sp",
           formula_or(formula_or(at(1, qjla), at(2, qjlr)),
                      formula_and(at(1, qbkeep), at(2, qbuse))));

    // qbkeep: the spawning thread reaches a join with x still held.
    b.pass_operators(qbkeep);
    b.rule(qbkeep, "jo", Formula::f_true());
    b.rule(qbkeep, rel_sym(x), Formula::f_false());
    b.rule(qbkeep, "sp", at(1, qbkeep));

    // qbuse: the spawned subtree needs x, with every further spawned
    // generation guarded by a join on its parent's spine.
    b.pass_operators(qbuse);
    b.rule(qbuse, acq_sym(x), Formula::f_true());
    b.rule(qbuse, rel_sym(x), Formula::f_false());
    b.rule(qbuse, "sp",
           formula_or(at(1, qbuse), formula_and(at(1, "qb_jo"), at(2, qbuse))));

    return b.finish(qjlr);
}

Ata build_depends_on(int x, int y, const CheckConfig& config) {
    check_lock(x, config);
    check_lock(y, config);
    WidgetBuilder b(config);
    add_final_hold_states(b);
    add_acquire_below_states(b);
    add_dependency_states(b, y);
    return b.finish(dep_state(x, y));
}

Ata build_cycle_check(const CheckConfig& config) {
    if (config.lock_count < 1)
        throw std::invalid_argument("cycle check requires at least one lock");
    WidgetBuilder b(config);
    add_final_hold_states(b);
    add_acquire_below_states(b);
    for (int y = 1; y <= b.k; ++y) add_dependency_states(b, y);

    const std::string q = "qcyc";
    b.state(q);
    b.pass_operators(q);

    Formula sp = formula_or(at(1, q), at(2, q));
    for (int x = 1; x <= b.k; ++x)
        for (int y = 1; y <= b.k; ++y) {
            if (x == y) continue;
            sp = formula_or(sp, formula_and(at(1, dep_state(x, y)),
                                            at(2, dep_state(y, x))));
        }
    b.rule(q, "sp", std::move(sp));

    for (int w = 1; w <= b.k; ++w) {
        Formula f = at(1, q);
        f = formula_or(f, formula_and(at(1, "qfa_" + std::to_string(w)),
                                      at(1, "qacq_" + std::to_string(w))));
        for (int z = 1; z <= b.k; ++z) {
            if (z == w) continue;
            f = formula_or(f, formula_and(formula_and(at(1, "qfa_" + std::to_string(w)),
                                                      at(1, "qacq_" + std::to_string(z))),
                                          at(1, dep_state(z, w))));
        }
        b.rule(q, acq_sym(w), std::move(f));
    }

    return b.finish(q);
}

Ata build_pair_reach(const std::string& l1, const std::string& l2,
                     const CheckConfig& config) {
    if (!config.has_label(l1))
        throw std::invalid_argument("unknown label '" + l1 + "'");
    if (!config.has_label(l2))
        throw std::invalid_argument("unknown label '" + l2 + "'");
    WidgetBuilder b(config);
    std::string qpr = "qpr_" + l1 + "_" + l2;
    std::string qf1 = "qfree_" + l1, qf2 = "qfree_" + l2;
    b.state(qpr);
    b.state(qf1);
    b.state(qf2);

    for (const std::string& qf : {qf1, qf2}) {
        std::string l = qf.substr(6);
        b.pass_operators(qf);
        b.rule(qf, "sp", formula_and(at(1, qf), at(2, qf)));
        b.terminals_true(qf);
        b.rule(qf, lab_sym(l), Formula::f_false());
    }

    b.pass_operators(qpr);
    b.terminals_true(qpr);
    // At each spawn: neither side-assignment of the two labels may be
    // jointly realized, and both children must themselves be free of a
    // separating spawn.
    Formula guard = formula_and(formula_or(at(1, qf1), at(2, qf2)),
                                formula_or(at(1, qf2), at(2, qf1)));
    b.rule(qpr, "sp",
           formula_and(formula_and(at(1, qpr), at(2, qpr)), std::move(guard)));

    return b.finish(qpr);
}

Ata build_full(const CheckConfig& config) {
    config.validate();
    std::vector<Ata> deadlock;
    if (config.lock_count >= 1) deadlock.push_back(build_cycle_check(config));
    for (int x = 1; x <= config.lock_count; ++x) {
        deadlock.push_back(build_join_lock(x, config));
        deadlock.push_back(build_dfa(x, config));
    }
    deadlock.push_back(build_child_term(config));
    std::vector<Ata> reach;
    for (const auto& [l1, l2] : config.pairs)
        reach.push_back(build_pair_reach(l1, l2, config));

    Ata full;
    full.alphabet = config.alphabet(false);
    for (const Ata& w : deadlock) merge_into(full, w);
    for (const Ata& w : reach) merge_into(full, w);

    full.states.insert("qfull");
    for (const auto& [sym, arity] : full.alphabet) {
        Formula dead = Formula::f_false();
        for (const Ata& w : deadlock) dead = formula_or(dead, w.rule(w.start, sym));
        Formula pr = Formula::f_true();
        for (const Ata& w : reach) pr = formula_and(pr, w.rule(w.start, sym));
        full.set_rule("qfull", sym, formula_or(std::move(dead), std::move(pr)));
    }
    full.start = "qfull";
    full.validate();
    return lift_over_br(full);
}

WidgetId parse_widget_id(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        std::size_t colon = text.find(':', begin);
        if (colon == std::string::npos) {
            parts.push_back(text.substr(begin));
            break;
        }
        parts.push_back(text.substr(begin, colon - begin));
        begin = colon + 1;
    }

    auto want = [&](std::size_t n) {
        if (parts.size() != n)
            throw std::invalid_argument("bad widget id '" + text + "'");
    };
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad lock number '" + s + "' in widget id");
        }
    };

    WidgetId id;
    const std::string& head = parts[0];
    if (head == "full") {
        want(1);
        id.kind = WidgetId::Kind::Full;
    } else if (head == "spawnpair") {
        want(1);
        id.kind = WidgetId::Kind::SpawnPair;
    } else if (head == "childterm") {
        want(1);
        id.kind = WidgetId::Kind::ChildTerm;
    } else if (head == "cycle") {
        want(1);
        id.kind = WidgetId::Kind::CycleCheck;
    } else if (head == "finalacq") {
        want(2);
        id.kind = WidgetId::Kind::FinalAcq;
        id.x = num(parts[1]);
    } else if (head == "dfa") {
        want(2);
        id.kind = WidgetId::Kind::DoubleFinalAcq;
        id.x = num(parts[1]);
    } else if (head == "joinlock") {
        want(2);
        id.kind = WidgetId::Kind::JoinLock;
        id.x = num(parts[1]);
    } else if (head == "depends") {
        want(3);
        id.kind = WidgetId::Kind::DependsOn;
        id.x = num(parts[1]);
        id.y = num(parts[2]);
    } else if (head == "pairreach") {
        want(3);
        id.kind = WidgetId::Kind::PairReach;
        id.l1 = parts[1];
        id.l2 = parts[2];
    } else {
        throw std::invalid_argument("unknown widget '" + text + "'");
    }
    return id;
}

std::string widget_id_to_string(const WidgetId& id) {
    switch (id.kind) {
        case WidgetId::Kind::Full: return "full";
        case WidgetId::Kind::SpawnPair: return "spawnpair";
        case WidgetId::Kind::ChildTerm: return "childterm";
        case WidgetId::Kind::CycleCheck: return "cycle";
        case WidgetId::Kind::FinalAcq: return "finalacq:" + std::to_string(id.x);
        case WidgetId::Kind::DoubleFinalAcq: return "dfa:" + std::to_string(id.x);
        case WidgetId::Kind::JoinLock: return "joinlock:" + std::to_string(id.x);
        case WidgetId::Kind::DependsOn:
            return "depends:" + std::to_string(id.x) + ":" + std::to_string(id.y);
        case WidgetId::Kind::PairReach: return "pairreach:" + id.l1 + ":" + id.l2;
    }
    throw std::logic_error("unhandled widget kind");
}

Ata build_widget(const WidgetId& id, const CheckConfig& config) {
    switch (id.kind) {
        case WidgetId::Kind::Full: return build_full(config);
        case WidgetId::Kind::SpawnPair: return build_spawn_pair(config);
        case WidgetId::Kind::ChildTerm: return build_child_term(config);
        case WidgetId::Kind::CycleCheck: return build_cycle_check(config);
        case WidgetId::Kind::FinalAcq: return build_final_acq(id.x, config);
        case WidgetId::Kind::DoubleFinalAcq: return build_dfa(id.x, config);
        case WidgetId::Kind::JoinLock: return build_join_lock(id.x, config);
        case WidgetId::Kind::DependsOn: return build_depends_on(id.x, id.y, config);
        case WidgetId::Kind::PairReach:
            return build_pair_reach(id.l1, id.l2, config);
    }
    throw std::logic_error("unhandled widget kind");
}

}  // namespace atab
