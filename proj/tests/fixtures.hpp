/*
 * Hand-built execution graphs and small helpers shared by the test
 * binaries.
 */

#ifndef AMC_TESTS_FIXTURES_HPP
#define AMC_TESTS_FIXTURES_HPP

#include "amc/corpus.hpp"
#include "amc/graph.hpp"
#include "amc/surface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace amc::fixtures {

/* Appends events thread by thread through the persistent graph API */
struct Builder {
	ExecutionGraph g;

	Builder(std::vector<Value> init, std::size_t threads) : g(std::move(init), threads) {}

	auto next(int t) const -> EventId { return EventId{t, static_cast<int>(g.threadSize(t))}; }

	auto write(int t, LocId loc, Value v, Mode m = Mode::Rlx,
		   std::optional<std::size_t> moPos = std::nullopt) -> EventId
	{
		auto id = next(t);
		g = g.addEvent(id, EventLabel::makeWrite(loc, m, v), moPos);
		return id;
	}
	/* SRC nullopt is ⊥ */
	auto read(int t, LocId loc, std::optional<EventId> src, Mode m = Mode::Rlx) -> EventId
	{
		auto id = next(t);
		g = g.addEvent(id, EventLabel::makeRead(loc, m));
		g = g.setRf(id, src);
		return id;
	}
	auto fence(int t, Mode m = Mode::Rlx) -> EventId
	{
		auto id = next(t);
		g = g.addEvent(id, EventLabel::makeFence(m));
		return id;
	}
	auto error(int t) -> EventId
	{
		auto id = next(t);
		g = g.addEvent(id, EventLabel::makeError());
		return id;
	}
};

inline constexpr LocId kLocked = 0;
inline constexpr LocId kQ = 1;

/*
 * Graph a of the partial MCS lock: T2 fails twice on q, then hands the
 * lock over and both threads read 0 from T2's write. With FENCES the
 * F^rlx events emitted by await steps and the assert step are included,
 * so the graph replays against the mcs-partial program.
 */
inline auto graphA(bool fences, Mode qWrite = Mode::Rel, Mode qRead = Mode::Acq) -> ExecutionGraph
{
	Builder b({0, 0}, 2);
	auto wl1 = b.write(0, kLocked, 1);
	auto wq = b.write(0, kQ, 1, qWrite);
	b.read(1, kQ, EventId::init(kQ), qRead);
	if (fences)
		b.fence(1);
	b.read(1, kQ, EventId::init(kQ), qRead);
	if (fences)
		b.fence(1);
	b.read(1, kQ, wq, qRead);
	if (fences)
		b.fence(1);
	auto wl0 = b.write(1, kLocked, 0);
	b.read(1, kLocked, wl0);
	if (fences)
		b.fence(1);
	b.read(0, kLocked, wl0);
	if (fences)
		b.fence(0);
	(void)wl1;
	return b.g;
}

/*
 * Graph b: T2's write of locked is mo-before T1's, T1 keeps reading its
 * own write and T2's assert read sees 1.
 */
inline auto graphB(bool fences, Mode qWrite = Mode::Rel, Mode qRead = Mode::Acq) -> ExecutionGraph
{
	Builder b({0, 0}, 2);
	auto wl1 = b.write(0, kLocked, 1);
	auto wq = b.write(0, kQ, 1, qWrite);
	b.read(0, kLocked, wl1);
	if (fences)
		b.fence(0);
	b.read(1, kQ, EventId::init(kQ), qRead);
	if (fences)
		b.fence(1);
	b.read(1, kQ, EventId::init(kQ), qRead);
	if (fences)
		b.fence(1);
	b.read(1, kQ, wq, qRead);
	if (fences)
		b.fence(1);
	b.write(1, kLocked, 0, Mode::Rlx, 1);
	b.read(1, kLocked, wl1);
	if (fences)
		b.error(1);
	return b.g;
}

/* Complete graphs of the q-removed program, without bookkeeping fences */
inline auto graphOne() -> ExecutionGraph
{
	Builder b({0}, 2);
	auto w1 = b.write(0, 0, 1);
	b.read(0, 0, w1);
	auto w2 = b.write(1, 0, 0);
	b.read(0, 0, w2);
	return b.g;
}

inline auto graphTwo() -> ExecutionGraph
{
	Builder b({0}, 2);
	b.write(0, 0, 1);
	auto w2 = b.write(1, 0, 0);
	b.read(0, 0, w2);
	return b.g;
}

/* The same graph with every rlx fence removed and indices renumbered */
inline auto stripBookkeeping(const ExecutionGraph &g) -> ExecutionGraph
{
	std::vector<std::vector<int>> remap(g.numThreads());
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		int n = 0;
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			const auto &l = g.label({static_cast<int>(t), static_cast<int>(i)});
			bool drop = l.kind == EventKind::Fence && l.mode == Mode::Rlx;
			remap[t].push_back(drop ? -1 : n++);
		}
	}
	auto map = [&](EventId id) {
		return id.isInit() ? id : EventId{id.thread, remap[id.thread][id.index]};
	};
	std::vector<Value> init;
	for (LocId l = 0; l < g.numLocations(); ++l)
		init.push_back(g.initValue(l));
	ExecutionGraph out(init, g.numThreads());
	for (std::size_t t = 0; t < g.numThreads(); ++t)
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			if (remap[t][i] < 0)
				continue;
			auto l = g.label(id);
			if (l.rf == RfState::From)
				l.rfSource = map(l.rfSource);
			out.appendEventRaw(map(id), l);
		}
	for (LocId l = 0; l < g.numLocations(); ++l) {
		std::vector<EventId> order;
		for (auto w : g.mo(l))
			order.push_back(map(w));
		out.setMoRaw(l, order);
	}
	return out;
}

inline auto caseProgram(const std::string &name) -> Program { return findCase(name)->program(); }

} // namespace amc::fixtures

#endif /* AMC_TESTS_FIXTURES_HPP */
