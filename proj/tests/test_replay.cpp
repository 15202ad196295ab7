#include "fixtures.hpp"

#include "amc/replay.hpp"

#include <doctest.h>

using namespace amc;
using fixtures::Builder;

TEST_CASE("a step emits the event for the current state and reads update registers")
{
	auto p = parseSurface("shared x = 0;"
			      "thread T1 { regs r1 = 5; store_rlx(x, r1); r1 = load_rlx(x); }"
			      "thread T2 { store_rlx(x, 8); }");
	Builder b({0}, 2);
	b.write(0, 0, 5);
	auto w8 = b.write(1, 0, 8);
	b.read(0, 0, w8);

	auto tr = replayThread(p, b.g, 0);
	REQUIRE(tr.steps == 2);
	CHECK(tr.reason == StopReason::Finished);
	CHECK(tr.states[0] == std::vector<Value>{5});
	CHECK(tr.events[0].kind == EventKind::Write);
	CHECK(tr.events[0].writtenValue() == 5);
	CHECK(tr.states[1] == tr.states[0]);
	CHECK(tr.readResults[1] == 8);
	CHECK(tr.states[2] == std::vector<Value>{8});
	CHECK(tr.positions.size() == tr.states.size());
	CHECK(tr.events.size() + 1 == tr.states.size());
}

TEST_CASE("a ⊥ read leaves the thread stuck in its last state")
{
	auto p = fixtures::caseProgram("mcs-partial");
	Builder b({0, 0}, 2);
	b.write(0, fixtures::kLocked, 1);
	b.write(0, fixtures::kQ, 1, Mode::Rel);
	b.read(0, fixtures::kLocked, std::nullopt);

	auto out = consProgram(p, b.g);
	CHECK(out.consistentWithProgram);
	const auto &tr = out.traces[0];
	CHECK(tr.reason == StopReason::BottomRead);
	CHECK(tr.steps == 3);
	CHECK(tr.states[3] == tr.states[2]);
	CHECK_FALSE(tr.readResults[2].has_value());
	CHECK(out.runnable == std::vector<std::size_t>{1});
}

TEST_CASE("graph a replays against the partial MCS lock with both threads done")
{
	auto p = fixtures::caseProgram("mcs-partial");
	auto out = consProgram(p, fixtures::graphA(true));
	CHECK(out.consistentWithProgram);
	CHECK_FALSE(out.mismatch.has_value());
	CHECK(out.runnable.empty());
	for (const auto &tr : out.traces)
		CHECK(tr.reason == StopReason::Finished);
}

TEST_CASE("graph b ends with T2's error event and T1 still polling")
{
	auto p = fixtures::caseProgram("mcs-partial");
	auto out = consProgram(p, fixtures::graphB(true));
	CHECK(out.consistentWithProgram);
	CHECK(out.traces[1].reason == StopReason::Finished);
	CHECK(out.traces[1].events.back().kind == EventKind::Error);
	CHECK(out.traces[0].reason == StopReason::AwaitingEvent);
	CHECK(out.runnable == std::vector<std::size_t>{0});
}

TEST_CASE("a tampered read value shows up as a mismatch")
{
	auto p = fixtures::caseProgram("mcs-partial");
	auto g = fixtures::graphA(true).setRf({1, 0}, EventId{0, 1});
	auto out = consProgram(p, g);
	CHECK_FALSE(out.consistentWithProgram);
	REQUIRE(out.mismatch.has_value());
	CHECK(out.mismatch->thread == 1);
	CHECK(out.mismatch->index == 2);
	CHECK(out.mismatch->expected.kind == EventKind::Write);
}

TEST_CASE("superfluous events are inconsistent with the program")
{
	auto p = fixtures::caseProgram("mcs-partial");
	Builder b({0, 0}, 2);
	b.g = fixtures::graphA(true);
	b.fence(1);
	CHECK_FALSE(consProgram(p, b.g).consistentWithProgram);
}

TEST_CASE("the init-only graph is consistent with every thread runnable")
{
	auto p = fixtures::caseProgram("mcs-partial");
	ExecutionGraph g({0, 0}, 2);
	auto out = consProgram(p, g);
	CHECK(out.consistentWithProgram);
	CHECK(out.runnable == std::vector<std::size_t>{0, 1});
	for (const auto &tr : out.traces) {
		CHECK(tr.reason == StopReason::AwaitingEvent);
		REQUIRE(tr.next.has_value());
		CHECK(tr.steps == 0);
	}
	CHECK(out.traces[0].next->kind == EventKind::Write);
	CHECK(out.traces[1].next->kind == EventKind::Read);
	CHECK(out.traces[1].next->mode == Mode::Acq);
}

TEST_CASE("replay is a pure function of its inputs")
{
	auto p = fixtures::caseProgram("mcs-partial");
	auto g = fixtures::graphA(true);
	auto a = replayThread(p, g, 1);
	auto b = replayThread(p, g, 1);
	CHECK(a.states == b.states);
	CHECK(a.positions == b.positions);
	CHECK(a.events == b.events);
}
