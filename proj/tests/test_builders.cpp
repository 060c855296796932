#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "atab/ata.hpp"
#include "atab/builders.hpp"
#include "atab/diff.hpp"
#include "atab/forest.hpp"
#include "atab/oracle.hpp"
#include "atab/tree.hpp"

using namespace atab;

namespace {

CheckConfig make_config(int k, std::vector<std::string> labels = {},
                        std::vector<std::pair<std::string, std::string>> pairs = {}) {
    CheckConfig cfg;
    cfg.lock_count = k;
    cfg.labels = std::move(labels);
    cfg.pairs = std::move(pairs);
    return cfg;
}

bool accepts(const Ata& a, const Node& t) { return evaluate(a, t).accepted; }

const Node kJoinLockTree =
    acquire(1, spawn(join(release(1, terminate_leaf())),
                     acquire(1, release(1, terminate_leaf()))));

const Node kSiblingCycle =
    spawn(acquire(1, acquire(2, release(2, stop_leaf()))),
          acquire(2, acquire(1, release(1, stop_leaf()))));

const Node kHandover =
    spawn(acquire(1, acquire(2, release(2, release(1, terminate_leaf())))),
          acquire(2, acquire(1, release(1, release(2, terminate_leaf())))));

}  // namespace

TEST_SUITE("builders") {

TEST_CASE("widget ids have a stable text form") {
    for (const char* spelling :
         {"full", "spawnpair", "childterm", "cycle", "finalacq:1", "dfa:2",
          "joinlock:1", "depends:1:2", "pairreach:A:B"}) {
        CAPTURE(spelling);
        CHECK(widget_id_to_string(parse_widget_id(spelling)) == spelling);
    }
    CHECK_THROWS_AS(parse_widget_id("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(parse_widget_id("dfa"), std::invalid_argument);
    CHECK_THROWS_AS(parse_widget_id("dfa:zero"), std::invalid_argument);
    CHECK_THROWS_AS(parse_widget_id("depends:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_widget_id(""), std::invalid_argument);

    CheckConfig cfg = make_config(2, {"A", "B"});
    CHECK(serialize(build_widget(parse_widget_id("dfa:1"), cfg)) ==
          serialize(build_dfa(1, cfg)));
    CHECK(serialize(build_widget(parse_widget_id("pairreach:A:B"), cfg)) ==
          serialize(build_pair_reach("A", "B", cfg)));
}

TEST_CASE("every widget validates and survives a text round trip") {
    CheckConfig cfg = make_config(2, {"A", "B"}, {{"A", "B"}, {"A", "A"}});
    std::vector<Ata> widgets = {
        build_final_acq(1, cfg),  build_final_acq(2, cfg),
        build_spawn_pair(cfg),    build_dfa(1, cfg),
        build_dfa(2, cfg),        build_child_term(cfg),
        build_join_lock(1, cfg),  build_join_lock(2, cfg),
        build_depends_on(1, 2, cfg), build_depends_on(2, 1, cfg),
        build_cycle_check(cfg),   build_pair_reach("A", "B", cfg),
        build_pair_reach("A", "A", cfg), build_full(cfg),
    };
    for (const Ata& w : widgets) {
        CHECK_NOTHROW(w.validate());
        std::string text = serialize(w);
        Ata back = parse_ata(text);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("final acquisition requires every thread to keep the lock") {
    CheckConfig cfg = make_config(1);
    Ata fa = build_final_acq(1, cfg);
    CHECK(accepts(fa, acquire(1, stop_leaf())));
    CHECK_FALSE(accepts(fa, acquire(1, release(1, terminate_leaf()))));
    CHECK_FALSE(accepts(fa, terminate_leaf()));
    CHECK(accepts(fa, spawn(acquire(1, stop_leaf()), acquire(1, stop_leaf()))));
    // one thread never performs its own acquisition
    CHECK_FALSE(accepts(fa, spawn(acquire(1, stop_leaf()), terminate_leaf())));
    CHECK_FALSE(accepts(fa, acquire(1, spawn(stop_leaf(), terminate_leaf()))));
    // releasing after the acquire cancels it
    CHECK_FALSE(accepts(fa, acquire(1, spawn(release(1, terminate_leaf()),
                                             acquire(1, stop_leaf())))));
    // a spawned thread may contribute its own acquisition
    CHECK(accepts(fa, acquire(1, spawn(stop_leaf(), acquire(1, stop_leaf())))));
}

TEST_CASE("spawn presence is detected anywhere") {
    CheckConfig cfg = make_config(1);
    Ata sp2 = build_spawn_pair(cfg);
    CHECK(accepts(sp2, spawn(terminate_leaf(), terminate_leaf())));
    CHECK(accepts(sp2, acquire(1, spawn(stop_leaf(), stop_leaf()))));
    CHECK_FALSE(accepts(sp2, terminate_leaf()));
    CHECK_FALSE(accepts(sp2, acquire(1, release(1, terminate_leaf()))));
}

TEST_CASE("double final acquisition needs two separated keepers") {
    CheckConfig cfg = make_config(1, {"A"});
    Ata dfa = build_dfa(1, cfg);
    CHECK(accepts(dfa, spawn(acquire(1, stop_leaf()), acquire(1, stop_leaf()))));
    CHECK(accepts(dfa, spawn(acquire(1, label_leaf("A")),
                             acquire(1, label_leaf("A")))));
    // a third clean thread does not disturb the pair
    CHECK(accepts(dfa, spawn(acquire(1, stop_leaf()),
                             spawn(acquire(1, stop_leaf()), terminate_leaf()))));
    CHECK_FALSE(accepts(dfa, spawn(acquire(1, release(1, terminate_leaf())),
                                   acquire(1, stop_leaf()))));
    CHECK_FALSE(accepts(dfa, acquire(1, stop_leaf())));
    // both keepers on one branch do not count: the holds are nested, not
    // separated by a spawn
    CHECK_FALSE(accepts(dfa, acquire(1, spawn(stop_leaf(), stop_leaf()))));
}

TEST_CASE("child termination finds a join over a stuck subtree") {
    CheckConfig cfg = make_config(0, {"A"});
    Ata ct = build_child_term(cfg);
    CHECK(accepts(ct, spawn(join(terminate_leaf()), stop_leaf())));
    CHECK(accepts(ct, spawn(join(terminate_leaf()), label_leaf("A"))));
    // the stuck thread may be spawned deeper inside the joined subtree
    CHECK(accepts(ct, spawn(join(terminate_leaf()),
                            spawn(terminate_leaf(), stop_leaf()))));
    CHECK_FALSE(accepts(ct, spawn(join(terminate_leaf()),
                                  spawn(terminate_leaf(), terminate_leaf()))));
    // no join waiting on the stuck thread
    CHECK_FALSE(accepts(ct, spawn(terminate_leaf(), stop_leaf())));
    CHECK_FALSE(accepts(ct, spawn(stop_leaf(),
                                  spawn(join(terminate_leaf()), terminate_leaf()))));
}

TEST_CASE("join-lock detects joining while holding a needed lock") {
    CheckConfig cfg = make_config(2);
    Ata jl = build_join_lock(1, cfg);
    CHECK(accepts(jl, kJoinLockTree));
    // releasing before the join defuses it
    CHECK_FALSE(accepts(jl, acquire(1, spawn(release(1, join(terminate_leaf())),
                                             acquire(1, release(1, terminate_leaf()))))));
    // the spawned thread never needs the lock
    CHECK_FALSE(accepts(jl, acquire(1, spawn(join(release(1, terminate_leaf())),
                                             terminate_leaf()))));
    CHECK_FALSE(accepts(jl, kHandover));
}

TEST_CASE("dependency tracking is directional") {
    CheckConfig cfg = make_config(2);
    Node nested = acquire(1, acquire(2, release(2, stop_leaf())));
    CHECK(accepts(build_depends_on(1, 2, cfg), nested));
    CHECK_FALSE(accepts(build_depends_on(2, 1, cfg), nested));
    // the later acquisition may happen in a spawned thread
    Node spawned = acquire(1, spawn(stop_leaf(), acquire(2, stop_leaf())));
    CHECK(accepts(build_depends_on(1, 2, cfg), spawned));
    // releasing the first lock breaks the dependence
    Node released = acquire(1, release(1, acquire(2, stop_leaf())));
    CHECK_FALSE(accepts(build_depends_on(1, 2, cfg), released));
}

TEST_CASE("cycle detection covers self, nested and sibling shapes") {
    CheckConfig cfg = make_config(2);
    Ata cyc = build_cycle_check(cfg);
    // a lock re-acquired below its own final hold can never be granted
    CHECK(accepts(cyc, acquire(1, spawn(stop_leaf(), acquire(1, stop_leaf())))));
    CHECK(accepts(cyc, kSiblingCycle));
    CHECK_FALSE(accepts(cyc, kHandover));
    CHECK_FALSE(accepts(cyc, acquire(1, release(1, terminate_leaf()))));
    CHECK_FALSE(accepts(cyc, acquire(1, acquire(2, release(2, stop_leaf())))));
}

TEST_CASE("pair reachability ignores locks and looks for separated labels") {
    CheckConfig cfg = make_config(1, {"A", "B"});
    Ata ab = build_pair_reach("A", "B", cfg);
    CHECK_FALSE(accepts(ab, spawn(label_leaf("A"), label_leaf("B"))));
    CHECK_FALSE(accepts(ab, spawn(label_leaf("A"), spawn(label_leaf("B"), stop_leaf()))));
    CHECK(accepts(ab, spawn(label_leaf("A"), terminate_leaf())));  // no B at all
    // locks guard the labels, but this widget does not care
    CHECK_FALSE(accepts(ab, spawn(acquire(1, label_leaf("A")),
                                  acquire(1, label_leaf("B")))));

    Ata aa = build_pair_reach("A", "A", cfg);
    CHECK_FALSE(accepts(aa, spawn(label_leaf("A"), label_leaf("A"))));
    CHECK_FALSE(accepts(aa, spawn(label_leaf("A"), spawn(stop_leaf(), label_leaf("A")))));
    CHECK(accepts(aa, spawn(label_leaf("A"), stop_leaf())));
    CHECK(accepts(aa, spawn(label_leaf("B"), label_leaf("B"))));
}

TEST_CASE("combination refuses conflicting shared states") {
    Ata a, b;
    a.alphabet = b.alphabet = {{"$", 0}};
    a.states = b.states = {"q"};
    a.start = b.start = "q";
    a.set_rule("q", "$", Formula::f_true());
    CHECK_THROWS_AS(conjoin(a, b), std::logic_error);
    // identical rules merge fine
    b.set_rule("q", "$", Formula::f_true());
    CHECK_NOTHROW(conjoin(a, b));
}

TEST_CASE("the full automaton accepts exactly the safe constituents") {
    CheckConfig cfg = make_config(1, {"P"}, {{"P", "P"}});
    Ata full = build_full(cfg);
    CHECK(full.alphabet.count("br") == 1);

    Node reachable = spawn(label_leaf("P"), label_leaf("P"));
    CHECK_FALSE(accepts(full, reachable));
    Node guarded = spawn(acquire(1, label_leaf("P")), acquire(1, label_leaf("P")));
    CHECK(accepts(full, guarded));

    CHECK(accepts(full, br_join({guarded, guarded})));
    CHECK_FALSE(accepts(full, br_join({guarded, reachable})));
}

TEST_CASE("with no pairs configured the full automaton accepts everything") {
    CheckConfig cfg = make_config(1);
    Ata full = build_full(cfg);
    CHECK(accepts(full, terminate_leaf()));
    CHECK(accepts(full, spawn(terminate_leaf(), terminate_leaf())));
    CHECK(accepts(full, acquire(1, release(1, terminate_leaf()))));
}

TEST_CASE("widget verdicts match the scheduling oracle on small trees") {
    CheckConfig cfg = make_config(2, {"A"});
    Ata dfa1 = build_dfa(1, cfg), dfa2 = build_dfa(2, cfg);
    Ata ct = build_child_term(cfg);
    Ata jl1 = build_join_lock(1, cfg), jl2 = build_join_lock(2, cfg);
    for_each_source_tree(cfg, 6, [&](const Node& t) {
        TreeIndex ix(t);
        for (const Node* n : ix.nodes)
            if (n->kind == Kind::Label && !n->children.empty()) return;
        CAPTURE(serialize_tree(t));
        CHECK(accepts(dfa1, t) ==
              oracle_property(t, 2, Property::DoubleFinalAcquisition, 1));
        CHECK(accepts(dfa2, t) ==
              oracle_property(t, 2, Property::DoubleFinalAcquisition, 2));
        CHECK(accepts(ct, t) == oracle_property(t, 2, Property::ChildTermination));
        CHECK(accepts(jl1, t) == oracle_property(t, 2, Property::JoinLock, 1));
        CHECK(accepts(jl2, t) == oracle_property(t, 2, Property::JoinLock, 2));
    });
}

TEST_CASE("a quick cross-validation run finds no disagreements") {
    CheckConfig cfg = make_config(2, {"A"}, {{"A", "A"}});
    std::ostringstream log;
    DiffResult r = oracle_diff(cfg, 6, log);
    CHECK(r.disagreements == 0);
    CHECK(r.trees > 0);
    CHECK(r.first_disagreement.empty());
    CHECK(log.str().find("0 disagreements") != std::string::npos);
}

}  // TEST_SUITE
