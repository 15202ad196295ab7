#include "fixtures.hpp"

#include "amc/explorer.hpp"

#include <doctest.h>

#include <set>

using namespace amc;
using fixtures::Builder;

TEST_CASE("pick_thread takes the lowest index")
{
	CHECK(pickThread({0, 1}) == 0);
	CHECK(pickThread({1}) == 1);
	CHECK(pickThread({2, 1}) == 1);
}

TEST_CASE("a new write revisits a ⊥ read")
{
	Builder b({0}, 2);
	auto w1 = b.write(0, 0, 1);
	b.read(0, 0, w1);
	b.fence(0);
	auto blocked = b.read(0, 0, std::nullopt);
	auto w2 = b.write(1, 0, 0);
	auto revs = calcRevisits(b.g, w2);
	bool resolved = false;
	for (const auto &h : revs) {
		CHECK_FALSE(h.check().has_value());
		if (h.contains(blocked) && h.label(blocked).rf == RfState::From && h.label(blocked).rfSource == w2)
			resolved = true;
	}
	CHECK(resolved);
}

TEST_CASE("a write with no readers has no revisits")
{
	Builder b({0, 0}, 2);
	b.read(0, 1, EventId::init(1));
	auto w = b.write(1, 0, 1);
	CHECK(calcRevisits(b.g, w).empty());
}

TEST_CASE("a read the new write depends on is not revisited")
{
	/* T1: r = x; y = r.  T2: s = y; x = 1, where s read T1's write */
	const LocId x = 0, y = 1;
	Builder b({0, 0}, 2);
	auto rx = b.read(0, x, EventId::init(x));
	auto wy = b.write(0, y, 0);
	b.read(1, y, wy);
	auto wx = b.write(1, x, 1);
	for (const auto &h : calcRevisits(b.g, wx))
		CHECK_FALSE((h.contains(rx) && h.label(rx).rfSource == wx));
	auto porf = porfPrefix(b.g, wx);
	CHECK(porf[0] == 2);
	CHECK(porf[1] == 2);
}

TEST_CASE("revisit graphs keep the read's and the write's causal prefixes")
{
	auto p = parseSurface("shared x = 0;"
			      "thread A { regs r = 0; r = x; store_rlx(x, 5); }"
			      "thread B { store_rlx(x, 1); }");
	Builder b({0}, 2);
	auto r = b.read(0, 0, EventId::init(0));
	b.write(0, 0, 5);
	auto w = b.write(1, 0, 1);
	auto revs = calcRevisits(b.g, w);
	REQUIRE_FALSE(revs.empty());
	for (const auto &h : revs) {
		CHECK(h.threadSize(0) == 1);
		CHECK((h.label(r).rfSource == w));
		CHECK(consProgram(p, h).consistentWithProgram);
	}
}

TEST_CASE("explorer verdicts on the partial MCS lock")
{
	CHECK(explore(fixtures::caseProgram("mcs-partial")).kind == VerdictKind::Success);
	auto rlx = explore(fixtures::caseProgram("mcs-partial-rlx"));
	CHECK(rlx.kind == VerdictKind::ATViolation);
	REQUIRE(rlx.graph.has_value());
	REQUIRE(rlx.event.has_value());
	CHECK(rlx.graph->label(*rlx.event).rf == RfState::Bottom);
}

TEST_CASE("the q-removed program explores exactly two complete graphs")
{
	ExploreOptions o;
	o.collectComplete = true;
	o.allViolations = true;
	auto v = explore(fixtures::caseProgram("mcs-partial-noq"), o);
	CHECK(v.kind == VerdictKind::ATViolation);
	REQUIRE(v.complete.size() == 2);
	std::set<std::string> got, want{canonicalKey(fixtures::graphOne()), canonicalKey(fixtures::graphTwo())};
	for (const auto &g : v.complete)
		got.insert(canonicalKey(fixtures::stripBookkeeping(g)));
	CHECK(got == want);
}

TEST_CASE("every explored graph is consistent, not wasteful and unique")
{
	for (const char *name : {"mcs-partial", "ttas", "sb", "mcs-partial-rlx"}) {
		CAPTURE(name);
		auto p = fixtures::caseProgram(name);
		std::set<std::string> keys;
		std::size_t dup = 0;
		ExploreOptions o;
		o.allViolations = true;
		o.onExplored = [&](const ExecutionGraph &g, const ReplayOutcome &r) {
			CHECK(r.consistentWithProgram);
			CHECK(consRamm(g));
			CHECK_FALSE(isWasteful(p, g));
			dup += keys.insert(canonicalKey(g)).second ? 0 : 1;
		};
		auto v = explore(p, o);
		CHECK(dup == 0);
		CHECK(v.stats.explored == keys.size());
		for (const auto &c : v.violations) {
			CHECK(consRamm(c.graph));
			CHECK(consProgram(p, c.graph).consistentWithProgram);
		}
	}
}

TEST_CASE("all-violations collects distinct counterexamples")
{
	ExploreOptions o;
	o.allViolations = true;
	auto v = explore(fixtures::caseProgram("sb"), o);
	CHECK(v.kind == VerdictKind::SafetyViolation);
	REQUIRE_FALSE(v.violations.empty());
	std::set<std::string> keys;
	for (const auto &c : v.violations)
		keys.insert(canonicalKey(c.graph));
	CHECK(keys.size() == v.violations.size());

	o.model = ModelKind::Sc;
	CHECK(explore(fixtures::caseProgram("sb"), o).kind == VerdictKind::Success);
}

TEST_CASE("hitting a cap is inconclusive, never success")
{
	ExploreOptions o;
	o.maxGraphs = 3;
	auto v = explore(fixtures::caseProgram("ttas"), o);
	CHECK(v.kind == VerdictKind::Inconclusive);
	CHECK_FALSE(v.note.empty());
}

TEST_CASE("exploration is deterministic")
{
	auto a = explore(fixtures::caseProgram("huawei-mcs-bug"));
	auto b = explore(fixtures::caseProgram("huawei-mcs-bug"));
	CHECK(a.kind == b.kind);
	CHECK(a.stats.explored == b.stats.explored);
	REQUIRE(a.graph.has_value());
	CHECK(canonicalKey(*a.graph) == canonicalKey(*b.graph));
}
