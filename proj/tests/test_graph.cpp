#include "fixtures.hpp"

#include "amc/graph.hpp"

#include <doctest.h>

using namespace amc;
using fixtures::Builder;

namespace {

auto hbHolds(const ExecutionGraph &g, EventId a, EventId b) -> bool
{
	EventIndex idx(g);
	return happensBefore(g, idx).test(idx.index(a), idx.index(b));
}

} // namespace

TEST_CASE("a graph starts with its init writes")
{
	ExecutionGraph g({0}, 1);
	CHECK(g.numEvents() == 1);
	CHECK((g.label(EventId::init(0)).kind == EventKind::Init));
	CHECK((g.mo(0) == std::vector<EventId>{EventId::init(0)}));
	CHECK_FALSE(g.check().has_value());
}

TEST_CASE("graph a is built event by event")
{
	auto g = fixtures::graphA(false);
	CHECK_FALSE(g.check().has_value());
	REQUIRE(g.threadSize(0) == 3);
	REQUIRE(g.threadSize(1) == 5);
	CHECK(g.numEvents() == 10);

	auto l = [&](int t, int i) { return g.label({t, i}); };
	CHECK(l(0, 0).kind == EventKind::Write);
	CHECK(l(0, 0).writtenValue() == 1);
	CHECK(l(0, 1).mode == Mode::Rel);
	CHECK(l(0, 1).loc == fixtures::kQ);
	CHECK(l(0, 2).readValue == 0);
	CHECK((l(0, 2).rfSource == EventId{1, 3}));
	for (int i = 0; i < 2; ++i) {
		CHECK(l(1, i).mode == Mode::Acq);
		CHECK((l(1, i).rfSource == EventId::init(fixtures::kQ)));
		CHECK(l(1, i).readValue == 0);
	}
	CHECK((l(1, 2).rfSource == EventId{0, 1}));
	CHECK(l(1, 2).readValue == 1);
	CHECK(l(1, 4).readValue == 0);
	CHECK((g.mo(fixtures::kLocked) == std::vector<EventId>{EventId::init(0), {0, 0}, {1, 3}}));
	CHECK((g.mo(fixtures::kQ) == std::vector<EventId>{EventId::init(1), {0, 1}}));
}

TEST_CASE("add_event rejects index gaps and duplicates")
{
	Builder b({0}, 1);
	b.write(0, 0, 1);
	CHECK_THROWS_AS(b.g.addEvent({0, 2}, EventLabel::makeFence(Mode::Rlx)), GraphError);
	CHECK_THROWS_AS(b.g.addEvent({0, 0}, EventLabel::makeFence(Mode::Rlx)), GraphError);
}

TEST_CASE("graphs are persistent values")
{
	Builder b({0}, 1);
	auto before = b.g;
	b.write(0, 0, 1);
	CHECK(before.threadSize(0) == 0);
	CHECK(b.g.threadSize(0) == 1);
}

TEST_CASE("set_rf updates the read value")
{
	Builder b({0, 0}, 1);
	auto r = b.read(0, fixtures::kQ, EventId::init(fixtures::kQ), Mode::Acq);
	CHECK(b.g.label(r).rf == RfState::From);
	CHECK(b.g.label(r).readValue == 0);

	auto bottom = b.g.setRf(r, std::nullopt);
	CHECK(bottom.label(r).rf == RfState::Bottom);

	auto w = b.write(0, fixtures::kQ, 4);
	auto r2 = b.read(0, fixtures::kQ, w);
	CHECK(b.g.label(r2).readValue == 4);
}

TEST_CASE("set_rf rejects a location mismatch and a non-write source")
{
	Builder b({0, 0}, 1);
	auto wq = b.write(0, fixtures::kQ, 1);
	auto rl = b.read(0, fixtures::kLocked, EventId::init(fixtures::kLocked));
	CHECK_THROWS_AS(b.g.setRf(rl, wq), GraphError);
	auto f = b.fence(0);
	CHECK_THROWS_AS(b.g.setRf(rl, f), GraphError);
	CHECK_THROWS_AS(b.g.setRf(f, EventId::init(0)), GraphError);
}

TEST_CASE("a rel write read by an acq read orders the writer before the reader's successors")
{
	/* bob_next written with rel by Alice, read with acq by Bob, who then
	   writes alice_locked */
	Builder b({0, 0}, 2);
	auto init = b.write(0, 0, 1);
	auto link = b.write(0, 1, 1, Mode::Rel);
	auto rd = b.read(1, 1, link, Mode::Acq);
	auto unlock = b.write(1, 0, 0);
	CHECK(hbHolds(b.g, link, unlock));
	CHECK(hbHolds(b.g, init, unlock));
	CHECK(hbHolds(b.g, link, rd));
}

TEST_CASE("without rel/acq there is no hb between the two writes to locked")
{
	Builder b({0, 0}, 2);
	auto init = b.write(0, 0, 1);
	auto link = b.write(0, 1, 1);
	b.read(1, 1, link);
	auto unlock = b.write(1, 0, 0);
	CHECK_FALSE(hbHolds(b.g, init, unlock));
	CHECK_FALSE(hbHolds(b.g, unlock, init));
}

TEST_CASE("fences route synchronisation")
{
	Builder b({0, 0}, 2);
	auto data = b.write(0, 0, 1);
	b.fence(0, Mode::Rel);
	auto flag = b.write(0, 1, 1);
	b.read(1, 1, flag);
	b.fence(1, Mode::Acq);
	auto use = b.read(1, 0, data);
	CHECK(hbHolds(b.g, data, use));
}

TEST_CASE("hb of a single thread equals po")
{
	Builder b({0}, 1);
	b.write(0, 0, 1);
	b.read(0, 0, EventId{0, 0});
	b.fence(0);
	EventIndex idx(b.g);
	auto hb = happensBefore(b.g, idx);
	auto po = idx.po();
	for (std::size_t i = 0; i < idx.size(); ++i)
		for (std::size_t j = 0; j < idx.size(); ++j) {
			if (idx.id(i).isInit())
				continue;
			CHECK(hb.test(i, j) == po.test(i, j));
		}
	CHECK(hb.irreflexive());
}

TEST_CASE("hb is a strict partial order on graph a")
{
	auto g = fixtures::graphA(true);
	auto hb = happensBefore(g);
	CHECK(hb.irreflexive());
	auto c = hb;
	c.close();
	for (std::size_t i = 0; i < hb.size(); ++i)
		for (std::size_t j = 0; j < hb.size(); ++j)
			CHECK(c.test(i, j) == hb.test(i, j));
}

TEST_CASE("canonical keys")
{
	auto a = fixtures::graphA(true);
	auto copy = a;
	CHECK(canonicalKey(a) == canonicalKey(copy));
	CHECK(canonicalKey(fixtures::graphOne()) != canonicalKey(fixtures::graphTwo()));

	auto retargeted = a.setRf({1, 0}, EventId{0, 1});
	CHECK(canonicalKey(retargeted) != canonicalKey(a));
	CHECK(digest(canonicalKey(a)) == digest(canonicalKey(copy)));
}

TEST_CASE("the text dump round-trips")
{
	for (const auto &g : {fixtures::graphA(true), fixtures::graphB(true), fixtures::graphOne()}) {
		GraphNames names;
		auto text = dumpGraph(g, names);
		auto [back, backNames] = parseGraphDump(text);
		CHECK(back == g);
		CHECK(dumpGraph(back, backNames) == text);
	}
}

TEST_CASE("captions use the figure vocabulary")
{
	auto g = fixtures::graphA(false);
	GraphNames names{{"l", "q"}, {"T1", "T2"}};
	CHECK(eventCaption(g, {0, 1}, names) == "W^rel_T1(q,1)");
	CHECK(eventCaption(g, {0, 0}, names) == "W_T1(l,1)");
	CHECK(eventCaption(g, {1, 2}, names) == "R^acq_T2(q,1)");
	auto bottom = g.setRf({0, 2}, std::nullopt);
	CHECK(eventCaption(bottom, {0, 2}, names).find("⚡") != std::string::npos);
	auto dot = toDot(g, names);
	CHECK(dot.find("digraph") != std::string::npos);
	CHECK(dot.find("rf") != std::string::npos);
	CHECK(dot.find("mo") != std::string::npos);
}
