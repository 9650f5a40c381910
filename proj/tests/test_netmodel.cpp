#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oapsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace oapsim;

TEST_CASE("fig1 topology structure") {
    Topology t = Topology::fig1();
    CHECK(t.size() == 5);
    CHECK(t.name(t.source()) == "N1");
    CHECK(t.hop(t.id_of("N1")) == 0);
    CHECK(t.hop(t.id_of("N2")) == 1);
    CHECK(t.hop(t.id_of("N3")) == 1);
    CHECK(t.hop(t.id_of("N4")) == 2);
    CHECK(t.hop(t.id_of("N5")) == 2);
    CHECK(t.max_hop() == 2);
    // N1 reaches hop 2 only through the relays.
    CHECK(t.distance(t.id_of("N1"), t.id_of("N4")) == 2);
    CHECK(t.distance(t.id_of("N4"), t.id_of("N1")) == 2);
    CHECK(t.distance(t.id_of("N2"), t.id_of("N3")) == 1);
    auto hop1 = t.nodes_at_hop(1);
    CHECK(hop1.size() == 2);
}

TEST_CASE("line and grid generators") {
    Topology l2 = Topology::line(2);
    CHECK(l2.size() == 2);
    CHECK(l2.hop(1) == 1);

    Topology l5 = Topology::line(5);
    for (std::uint32_t i = 0; i < 5; ++i) CHECK(l5.hop(i) == i);

    Topology g = Topology::grid(10, 10);
    CHECK(g.size() == 100);
    CHECK(g.max_hop() == 18); // opposite corner of a 10x10 4-neighbor grid
}

TEST_CASE("generator references parse") {
    CHECK(Topology::from_name_or_file("fig1").size() == 5);
    CHECK(Topology::from_name_or_file("line(8)").size() == 8);
    CHECK(Topology::from_name_or_file("grid(3x4)").size() == 12);
}

TEST_CASE("topology document parsing") {
    Topology t = Topology::parse(
        "node a\nnode b\nnode c\nsource a\n"
        "default_erasure 0.25\n"
        "link a b\nlink b c erasure=0.5\n");
    CHECK(t.size() == 3);
    CHECK(t.hop(t.id_of("c")) == 2);
    CHECK(t.document_default_erasure() == 0.25);
    bool found = false;
    for (const auto& l : t.out(t.id_of("b")))
        if (l.to == t.id_of("c")) {
            CHECK(l.erasure == 0.5);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("malformed documents throw") {
    CHECK_THROWS_AS(Topology::parse("node a\n"), std::runtime_error); // no source
    CHECK_THROWS_AS(Topology::parse("node a\nsource a\nlink a b\n"),
                    std::runtime_error); // unknown node
    CHECK_THROWS_AS(Topology::parse("node a\nnode b\nsource a\n"),
                    std::runtime_error); // b unreachable
    CHECK_THROWS_AS(Topology::parse("node a\nsource a\nfrobnicate\n"),
                    std::runtime_error);
}

TEST_CASE("delivery at erasure extremes") {
    Topology t = Topology::fig1();
    ChannelConfig cfg;
    Rng rng(1);

    cfg.default_erasure = 0.0;
    auto rx = broadcast(t, cfg, {t.source(), 0, 1}, rng);
    std::sort(rx.begin(), rx.end());
    CHECK(rx == std::vector<NodeId>{t.id_of("N2"), t.id_of("N3")});

    cfg.default_erasure = 1.0;
    CHECK(broadcast(t, cfg, {t.source(), 0, 1}, rng).empty());
}

TEST_CASE("same-slot transmitters never hear each other") {
    Topology t = Topology::fig1();
    ChannelConfig cfg; // erasure 0
    Rng rng(2);
    std::vector<Transmission> txs = {{t.id_of("N2"), 5, 1}, {t.id_of("N3"), 5, 1}};
    auto per_tx = deliver_slot(t, cfg, txs, {}, rng);
    REQUIRE(per_tx.size() == 2);
    for (const auto& receivers : per_tx) {
        for (NodeId r : receivers) {
            CHECK(r != t.id_of("N2"));
            CHECK(r != t.id_of("N3"));
        }
    }
    // N4 and N5 neighbor both relays and still receive.
    CHECK(std::count(per_tx[0].begin(), per_tx[0].end(), t.id_of("N4")) == 1);
}

TEST_CASE("scripted drops key on the sender transmission ordinal") {
    Topology t = Topology::fig1();
    ChannelConfig cfg;
    Rng rng(3);
    std::vector<ScriptedDrop> script = {{t.source(), 2, t.id_of("N2")}};

    auto rx1 = broadcast(t, cfg, {t.source(), 0, 1}, rng);
    CHECK(std::count(rx1.begin(), rx1.end(), t.id_of("N2")) == 1);
    auto rx2 = deliver_slot(t, cfg, {{t.source(), 1, 2}}, script, rng)[0];
    CHECK(std::count(rx2.begin(), rx2.end(), t.id_of("N2")) == 0);
    CHECK(std::count(rx2.begin(), rx2.end(), t.id_of("N3")) == 1);
}

TEST_CASE("erasure rate is statistically honored") {
    Topology t = Topology::line(2);
    ChannelConfig cfg;
    cfg.default_erasure = 0.3;
    Rng rng(4);
    int delivered = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
        if (!broadcast(t, cfg, {0, static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(i + 1)}, rng).empty())
            ++delivered;
    double rate = static_cast<double>(delivered) / n;
    CHECK(std::abs(rate - 0.7) < 0.01);
}

TEST_CASE("per-link erasure overrides the defaults") {
    Topology t = Topology::parse(
        "node a\nnode b\nsource a\nlink a b erasure=1.0\n");
    ChannelConfig cfg;
    cfg.default_erasure = 0.0;
    Rng rng(5);
    CHECK(broadcast(t, cfg, {0, 0, 1}, rng).empty());

    Topology t2 = Topology::parse(
        "node a\nnode b\nsource a\ndefault_erasure 1.0\nlink a b\n");
    // Document default beats the channel config default.
    CHECK(broadcast(t2, cfg, {0, 0, 1}, rng).empty());
}

TEST_CASE("collision model None ignores concurrency") {
    Topology t = Topology::fig1();
    ChannelConfig cfg; // None, erasure 0
    Rng rng(6);
    std::vector<Transmission> txs = {{t.id_of("N1"), 0, 1}, {t.id_of("N4"), 0, 1}};
    auto per_tx = deliver_slot(t, cfg, txs, {}, rng);
    // N2 hears N1 regardless of N4 transmitting in range.
    CHECK(std::count(per_tx[0].begin(), per_tx[0].end(), t.id_of("N2")) == 1);
}

TEST_CASE("Bernoulli collisions add per-contender loss") {
    Topology t = Topology::fig1();
    ChannelConfig cfg;
    cfg.collision = {CollisionModel::Kind::Bernoulli, 1.0};
    Rng rng(7);
    // Alone: p=1 per extra contender, but zero contenders, so delivery is clean.
    CHECK_FALSE(broadcast(t, cfg, {t.source(), 0, 1}, rng).empty());
    // Two audible concurrent senders: everything at N4/N5 collides.
    std::vector<Transmission> txs = {{t.id_of("N2"), 1, 1}, {t.id_of("N3"), 1, 1}};
    auto per_tx = deliver_slot(t, cfg, txs, {}, rng);
    CHECK(per_tx[0].empty());
    CHECK(per_tx[1].empty());
}

TEST_CASE("erasure failure threshold") {
    CHECK(erasure_failure_threshold(1) == doctest::Approx(0.0));
    CHECK(erasure_failure_threshold(3) == doctest::Approx(2.0 / 3.0));
    CHECK(erasure_failure_threshold(4) == doctest::Approx(0.75));
}
