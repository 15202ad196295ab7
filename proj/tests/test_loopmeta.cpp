#include "fixtures.hpp"

#include "amc/explorer.hpp"
#include "amc/loopmeta.hpp"

#include <doctest.h>

#include <algorithm>

using namespace amc;
using fixtures::Builder;

namespace {

auto noq() -> Program { return fixtures::caseProgram("mcs-partial-noq"); }

/* T1 spins on its own write of locked; T2's write is placed by MO2 */
auto spinGraph(std::size_t ownReads, bool t2First) -> Builder
{
	Builder b({0}, 2);
	if (t2First)
		b.write(1, 0, 0);
	auto w1 = b.write(0, 0, 1);
	if (!t2First)
		b.write(1, 0, 0);
	for (std::size_t i = 0; i < ownReads; ++i) {
		b.read(0, 0, w1);
		b.fence(0);
	}
	return b;
}

const char *kTtas = "shared lock = 0;"
		    "thread T { regs l = 0, old = 0;"
		    "  do { l = load_rlx(lock);"
		    "       if (l == 0) { old = cas_acq(lock, 0, 1); } else { old = 1; } }"
		    "  await_while(old != 0); }";

} // namespace

TEST_CASE("T2 in graph a runs three iterations of its await, two failed")
{
	auto p = fixtures::caseProgram("mcs-partial");
	auto tr = replayThread(p, fixtures::graphA(true), 1);
	auto its = iterations(p, 1, tr);
	REQUIRE(its.size() == 3);
	CHECK(its[0].failed);
	CHECK(its[1].failed);
	CHECK_FALSE(its[2].failed);
	for (const auto &it : its) {
		CHECK(it.len == 1);
		CHECK(it.end == it.start + it.len);
		CHECK(it.awaitIndex == 1);
	}
	CHECK(its[1].start == its[0].end + 1);
}

TEST_CASE("a trace without awaits has no iterations")
{
	auto p = parseSurface("shared x = 0; thread T { regs r = 0; r = x; store_rlx(x, r + 1); }");
	Builder b({0}, 1);
	b.read(0, 0, EventId::init(0));
	b.write(0, 0, 1);
	CHECK(iterations(p, 0, replayThread(p, b.g, 0)).empty());
}

TEST_CASE("a TTAS await on a free lock exits in its first iteration")
{
	auto p = parseSurface(kTtas);
	ExploreOptions o;
	o.collectComplete = true;
	auto v = explore(p, o);
	REQUIRE(v.kind == VerdictKind::Success);
	REQUIRE(v.complete.size() == 1);
	auto its = iterations(p, 0, replayThread(p, v.complete[0], 0));
	REQUIRE(its.size() == 1);
	CHECK_FALSE(its[0].failed);
}

TEST_CASE("reading the own write twice in the await is wasteful")
{
	auto b = spinGraph(2, false);
	auto w = wastefulWitness(noq(), b.g);
	REQUIRE(w.has_value());
	CHECK(w->thread == 0);
	CHECK(w->q == 0);
}

TEST_CASE("the two complete graphs of the q-removed program are not wasteful")
{
	auto one = spinGraph(1, false);
	one.read(0, 0, EventId{1, 0});
	one.fence(0);
	auto two = Builder({0}, 2);
	two.write(0, 0, 1);
	auto w2 = two.write(1, 0, 0);
	two.read(0, 0, w2);
	two.fence(0);
	for (const auto *g : {&one.g, &two.g}) {
		auto r = consProgram(noq(), *g);
		CHECK(r.consistentWithProgram);
		CHECK(r.runnable.empty());
		CHECK_FALSE(isWasteful(noq(), *g));
	}
}

TEST_CASE("a graph without failed iterations is not wasteful")
{
	auto p = fixtures::caseProgram("mcs-partial");
	Builder b({0, 0}, 2);
	b.write(0, fixtures::kLocked, 1);
	auto wq = b.write(0, fixtures::kQ, 1, Mode::Rel);
	b.read(1, fixtures::kQ, wq, Mode::Acq);
	b.fence(1);
	auto w0 = b.write(1, fixtures::kLocked, 0);
	b.read(1, fixtures::kLocked, w0);
	b.fence(1);
	b.read(0, fixtures::kLocked, w0);
	b.fence(0);
	REQUIRE(consProgram(p, b.g).consistentWithProgram);
	CHECK_FALSE(isWasteful(p, b.g));
	CHECK_FALSE(isWasteful(noq(), ExecutionGraph({0}, 2)));
}

TEST_CASE("register reads-from follows the last assignment")
{
	auto p = parseSurface("shared x = 0; thread T { regs r1 = 0; r1 = x; assert(r1 == 0); }");
	Builder b({0}, 1);
	b.read(0, 0, EventId::init(0));
	b.fence(0);
	auto tr = replayThread(p, b.g, 0);
	auto rrf = registerReadsFrom(p, 0, tr);
	CHECK(std::find(rrf.begin(), rrf.end(), std::pair<std::size_t, std::size_t>{0, 1}) != rrf.end());
	CHECK(visible(tr, 0, 1) == std::vector<RegId>{0});

	auto q = parseSurface("shared x = 0; thread T { regs r1 = 0; r1 = x; r1 = x; assert(r1 == 0); }");
	Builder c({0}, 1);
	c.read(0, 0, EventId::init(0));
	c.read(0, 0, EventId::init(0));
	c.fence(0);
	auto tq = replayThread(q, c.g, 0);
	auto rq = registerReadsFrom(q, 0, tq);
	CHECK(std::find(rq.begin(), rq.end(), std::pair<std::size_t, std::size_t>{0, 2}) == rq.end());
	CHECK(std::find(rq.begin(), rq.end(), std::pair<std::size_t, std::size_t>{1, 2}) != rq.end());
	CHECK(visible(tq, 0, 2).empty());
}

TEST_CASE("a decrement carried across await iterations violates bounded effect")
{
	auto p = parseSurface("shared lock = 1;"
			      "thread T { regs d = 2, r = 0;"
			      "  do { d = d - 1; r = load_acq(lock); } await_while(r == 1); }"
			      "thread U { store_rel(lock, 0); }");
	Builder b({1}, 2);
	b.read(0, 0, EventId::init(0), Mode::Acq);
	b.fence(0);
	auto w = b.write(1, 0, 0, Mode::Rel);
	b.read(0, 0, w, Mode::Acq);
	b.fence(0);
	auto vs = boundedEffectCheck(p, b.g);
	REQUIRE_FALSE(vs.empty());
	CHECK(vs[0].thread == 0);
	CHECK(vs[0].q == 0);
	CHECK(vs[0].target.has_value());
	CHECK(explore(p).kind == VerdictKind::FragmentError);
}

TEST_CASE("writes of a shared counter inside failed iterations violate bounded effect")
{
	auto p = parseSurface("shared d = 0;"
			      "thread T { regs t = 0; store_rlx(d, 2);"
			      "  do { t = load_rlx(d); store_rlx(d, t - 1); } await_while(t != 0); }");
	auto v = explore(p);
	CHECK(v.kind == VerdictKind::FragmentError);
	REQUIRE_FALSE(v.fragment.empty());
	CHECK_FALSE(v.fragment[0].target.has_value());
}

TEST_CASE("an await that resets its register each iteration respects bounded effect")
{
	auto p = parseSurface("shared lock = 1;"
			      "thread T { regs d = 0, r = 0;"
			      "  do { d = 2; r = load_acq(lock); } await_while(r == 1); assert(d == 2); }"
			      "thread U { store_rel(lock, 0); }");
	std::size_t checked = 0;
	ExploreOptions o;
	o.onExplored = [&](const ExecutionGraph &g, const ReplayOutcome &r) {
		CHECK(boundedEffectCheck(p, r).empty());
		CHECK(boundedEffectCheck(p, g).empty());
		++checked;
	};
	CHECK(explore(p, o).kind == VerdictKind::Success);
	CHECK(checked > 0);
}

TEST_CASE("a pure polling await respects bounded effect")
{
	CHECK(boundedEffectCheck(fixtures::caseProgram("mcs-partial"), fixtures::graphA(true)).empty());
}

TEST_CASE("stagnancy")
{
	/* T2's write is mo-before T1's, T1 already read its own write once and
	   then blocks */
	auto beta = spinGraph(1, true);
	beta.read(0, 0, std::nullopt);
	CHECK(consProgram(noq(), beta.g).runnable.empty());
	CHECK(isStagnant(noq(), beta.g, ModelKind::Ramm));

	auto other = spinGraph(1, false);
	other.read(0, 0, std::nullopt);
	CHECK_FALSE(isStagnant(noq(), other.g, ModelKind::Ramm));

	auto done = spinGraph(1, false);
	done.read(0, 0, EventId{1, 0});
	done.fence(0);
	CHECK_FALSE(isStagnant(noq(), done.g, ModelKind::Ramm));
}
