#include "fixtures.hpp"

#include "amc/memmodel.hpp"

#include <doctest.h>

#include <random>

using namespace amc;
using fixtures::Builder;

namespace {

/*
 * Random graph over two locations. Events are added in a random
 * interleaving so rf sources always exist; mo positions are random.
 * With ALLRLX every mode is rlx but the shape is the same as without.
 */
auto randomGraph(std::uint32_t seed, bool allRlx) -> ExecutionGraph
{
	std::mt19937 rng(seed);
	auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
	const std::size_t threads = 2 + pick(2);
	Builder b({0, 0}, threads);
	std::vector<std::size_t> left(threads);
	for (auto &n : left)
		n = 1 + pick(3);
	const Mode modes[] = {Mode::Rlx, Mode::Rel, Mode::Acq, Mode::Sc};
	for (;;) {
		std::vector<int> open;
		for (std::size_t t = 0; t < threads; ++t)
			if (left[t] > 0)
				open.push_back(static_cast<int>(t));
		if (open.empty())
			break;
		int t = open[pick(open.size())];
		--left[t];
		LocId loc = static_cast<LocId>(pick(2));
		Mode m = modes[pick(4)];
		Mode used = allRlx ? Mode::Rlx : m;
		const auto &mo = b.g.mo(loc);
		switch (pick(4)) {
		case 0:
			b.write(t, loc, static_cast<Value>(1 + pick(3)), used == Mode::Acq ? Mode::Rlx : used,
				1 + pick(mo.size()));
			break;
		case 1:
			b.read(t, loc, mo[pick(mo.size())], used == Mode::Rel ? Mode::Rlx : used);
			break;
		case 2: {
			auto id = b.next(t);
			auto src = mo[pick(mo.size())];
			b.g = b.g.addEvent(id, EventLabel::makeUpdate(loc, RmwKind::FetchAdd, used, used, 1, 0));
			b.g = b.g.setRf(id, src);
			break;
		}
		default:
			b.fence(t, used);
			break;
		}
	}
	return b.g;
}

auto sbGraph() -> ExecutionGraph
{
	Builder b({0, 0}, 2);
	b.write(0, 0, 1);
	b.read(0, 1, EventId::init(1));
	b.write(1, 1, 1);
	b.read(1, 0, EventId::init(0));
	return b.g;
}

/* Bob increments x and hands the lock to Alice, whose increment still
   reads the initial x */
auto handoverGraph(Mode unlock, Mode spin) -> ExecutionGraph
{
	const LocId x = 0, locked = 1;
	Builder b({0, 1}, 2);
	b.read(1, x, EventId::init(x));
	b.write(1, x, 1);
	auto rel = b.write(1, locked, 0, unlock);
	b.read(0, locked, rel, spin);
	b.read(0, x, EventId::init(x));
	return b.g;
}

} // namespace

TEST_CASE("store buffering is forbidden under sc and allowed under ramm")
{
	auto g = sbGraph();
	CHECK_FALSE(consSc(g));
	CHECK_FALSE(consScBruteForce(g));
	CHECK(consRamm(g));
}

TEST_CASE("a thread reading its own last write is sc")
{
	Builder b({0}, 1);
	auto w = b.write(0, 0, 3);
	b.read(0, 0, w);
	CHECK(consSc(b.g));
	CHECK(consRamm(b.g));
}

TEST_CASE("a lock handover whose next increment reads the initial value")
{
	CHECK_FALSE(consSc(handoverGraph(Mode::Rlx, Mode::Rlx)));
	CHECK_FALSE(consScBruteForce(handoverGraph(Mode::Rlx, Mode::Rlx)));
	CHECK(consRamm(handoverGraph(Mode::Rlx, Mode::Rlx)));
	CHECK(consRamm(handoverGraph(Mode::Rel, Mode::Rlx)));
	CHECK_FALSE(consRamm(handoverGraph(Mode::Rel, Mode::Acq)));
}

TEST_CASE("graph a is consistent, graph b only without rel/acq on q")
{
	CHECK(consRamm(fixtures::graphA(false)));
	CHECK(consRamm(fixtures::graphA(true)));

	auto b = checkRamm(fixtures::graphB(false));
	CHECK_FALSE(b.ok());
	CHECK_FALSE(b.immPath);
	CHECK_FALSE(consRamm(fixtures::graphB(true)));

	CHECK(consRamm(fixtures::graphB(false, Mode::Rlx, Mode::Rlx)));
	CHECK(consRamm(fixtures::graphB(true, Mode::Rlx, Mode::Rlx)));
	CHECK(consRamm(fixtures::graphB(false, Mode::Rel, Mode::Rlx)));
	CHECK_FALSE(consSc(fixtures::graphB(false, Mode::Rlx, Mode::Rlx)));
}

TEST_CASE("a ⊥ read constrains nothing")
{
	Builder b({0}, 2);
	auto w = b.write(0, 0, 1);
	b.read(0, 0, w);
	b.read(0, 0, std::nullopt);
	CHECK(consRamm(b.g));
	CHECK(consSc(b.g));
}

TEST_CASE("update atomicity")
{
	Builder b({0}, 2);
	auto id0 = b.next(0);
	b.g = b.g.addEvent(id0, EventLabel::makeUpdate(0, RmwKind::FetchAdd, Mode::Rlx, Mode::Rlx, 1, 0));
	b.g = b.g.setRf(id0, EventId::init(0));
	auto id1 = b.next(1);
	b.g = b.g.addEvent(id1, EventLabel::makeUpdate(0, RmwKind::FetchAdd, Mode::Rlx, Mode::Rlx, 1, 0));
	b.g = b.g.setRf(id1, EventId::init(0));
	auto rep = checkRamm(b.g);
	CHECK_FALSE(rep.atomicity);
	CHECK_FALSE(consSc(b.g));
}

TEST_CASE("sc implies ramm, and the acyclicity check agrees with brute force")
{
	int consistentSc = 0;
	for (std::uint32_t seed = 1; seed <= 400; ++seed) {
		auto g = randomGraph(seed, false);
		CAPTURE(seed);
		bool sc = consSc(g);
		CHECK(sc == consScBruteForce(g));
		if (sc) {
			++consistentSc;
			CHECK(consRamm(g));
		}
	}
	CHECK(consistentSc > 20);
}

TEST_CASE("weakening modes never breaks ramm consistency")
{
	for (std::uint32_t seed = 1; seed <= 400; ++seed) {
		CAPTURE(seed);
		if (consRamm(randomGraph(seed, false)))
			CHECK(consRamm(randomGraph(seed, true)));
	}
}

TEST_CASE("ramm consistency is closed under removing unread last events")
{
	for (std::uint32_t seed = 1; seed <= 300; ++seed) {
		auto g = randomGraph(seed, false);
		if (!consRamm(g))
			continue;
		for (std::size_t t = 0; t < g.numThreads(); ++t) {
			if (g.threadSize(t) == 0)
				continue;
			EventId last{static_cast<int>(t), static_cast<int>(g.threadSize(t) - 1)};
			bool read = false;
			for (auto e : g.events())
				read |= g.label(e).isReadType() && g.label(e).rf == RfState::From &&
					g.label(e).rfSource == last;
			if (read)
				continue;
			std::vector<std::size_t> keep;
			for (std::size_t u = 0; u < g.numThreads(); ++u)
				keep.push_back(g.threadSize(u) - (u == t ? 1 : 0));
			auto h = g;
			h.truncate(keep);
			CAPTURE(seed);
			CHECK(consRamm(h));
		}
	}
}
