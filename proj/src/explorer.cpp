/*
 * amc -- Await Model Checking for weak memory programs.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "amc/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace amc {

auto verdictName(VerdictKind k) -> std::string_view
{
	switch (k) {
	case VerdictKind::Success:
		return "success";
	case VerdictKind::SafetyViolation:
		return "safety-violation";
	case VerdictKind::ATViolation:
		return "at-violation";
	case VerdictKind::FragmentError:
		return "fragment-error";
	case VerdictKind::Inconclusive:
		return "inconclusive";
	}
	return "?";
}

auto pickThread(const std::vector<std::size_t> &runnable) -> std::size_t
{
	if (runnable.empty())
		throw std::invalid_argument("pickThread: no runnable thread");
	return *std::ranges::min_element(runnable);
}

namespace {

/* Extends KEEP until it is closed under po and rf; SKIP's rf is not followed */
void closePorf(const ExecutionGraph &g, std::vector<std::size_t> &keep,
	       std::optional<EventId> skip = std::nullopt)
{
	bool changed = true;
	while (changed) {
		changed = false;
		for (std::size_t t = 0; t < keep.size(); ++t)
			for (std::size_t i = 0; i < keep[t]; ++i) {
				EventId id{static_cast<int>(t), static_cast<int>(i)};
				if (skip && *skip == id)
					continue;
				const auto &l = g.label(id);
				if (!l.isReadType() || l.rf != RfState::From || l.rfSource.isInit())
					continue;
				auto &k = keep[l.rfSource.thread];
				const auto need = static_cast<std::size_t>(l.rfSource.index) + 1;
				if (k < need) {
					k = need;
					changed = true;
				}
			}
	}
}

} // namespace

auto porfPrefix(const ExecutionGraph &g, EventId id) -> std::vector<std::size_t>
{
	std::vector<std::size_t> keep(g.numThreads(), 0);
	keep[id.thread] = static_cast<std::size_t>(id.index) + 1;
	closePorf(g, keep);
	return keep;
}

auto calcRevisits(const ExecutionGraph &g, EventId w) -> std::vector<ExecutionGraph>
{
	std::vector<ExecutionGraph> out;
	const auto &wl = g.label(w);
	const LocId loc = wl.loc;
	const auto pw = porfPrefix(g, w);
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId r{static_cast<int>(t), static_cast<int>(i)};
			const auto &rl = g.label(r);
			if (r == w || !rl.isReadType() || rl.loc != loc)
				continue;
			/* r must not be a cause of w */
			if (pw[t] > i)
				continue;
			if (rl.rf == RfState::From && rl.rfSource == w)
				continue;

			std::vector<std::size_t> keep(g.numThreads(), 0);
			keep[t] = i + 1;
			for (std::size_t u = 0; u < keep.size(); ++u)
				keep[u] = std::max(keep[u], pw[u]);
			closePorf(g, keep, r);

			ExecutionGraph h = g;
			h.truncate(keep);
			if (wl.kind == EventKind::Update) {
				h.assignRf(r, w);
				out.push_back(std::move(h));
				continue;
			}
			h.eraseMo(w);
			for (std::size_t pos = 1; pos <= h.mo(loc).size(); ++pos) {
				ExecutionGraph placed = h;
				placed.insertMo(loc, pos, w);
				placed.assignRf(r, w);
				out.push_back(std::move(placed));
			}
		}
	}
	return out;
}

auto checkBounds(const Program &p, const ExecutionGraph &g, const ReplayOutcome &r) -> BoundReport
{
	BoundReport rep;
	std::size_t writes = 0;
	for (std::size_t t = 0; t < g.numThreads(); ++t)
		for (std::size_t i = 0; i < g.threadSize(t); ++i)
			writes += g.label(EventId{static_cast<int>(t), static_cast<int>(i)}).isWriteType();
	rep.writesOk = writes <= p.totalLength();

	for (std::size_t t = 0; t < r.traces.size(); ++t) {
		const auto &tr = r.traces[t];
		auto its = iterations(p, t, tr);
		std::size_t q = 0;
		while (q < its.size()) {
			/* One await instance: consecutive iterations of one await */
			std::size_t e = q;
			while (e + 1 < its.size() && its[e].failed && its[e + 1].awaitIndex == its[q].awaitIndex &&
			       its[e + 1].start == its[e].end + 1)
				++e;
			std::set<LocId> polled;
			std::size_t failed = 0;
			for (std::size_t j = q; j <= e; ++j) {
				failed += its[j].failed;
				for (std::size_t s = its[j].start; s <= its[j].end; ++s)
					if (tr.events[s].isReadType())
						polled.insert(tr.events[s].loc);
			}
			std::size_t n = 0;
			for (auto l : polled)
				n += g.mo(l).size();
			/* An instance still spinning may sit one iteration above the bound */
			const bool exited = !its[e].failed;
			const std::size_t bound = exited ? (n == 0 ? 0 : n - 1) : n;
			if (failed > bound)
				rep.iterationsOk = false;
			q = e + 1;
		}
	}
	return rep;
}

namespace {

using Clock = std::chrono::steady_clock;

class Explorer {
public:
	Explorer(const Program &p, const ExploreOptions &o) : p_(p), o_(o) {}

	auto run() -> Verdict
	{
		const auto started = Clock::now();
		stack_.emplace_back(p_.sharedInit, p_.threads.size());
		while (!stack_.empty()) {
			if (v_.stats.popped >= o_.maxGraphs)
				return inconclusive("graph cap reached");
			if ((v_.stats.popped & 63U) == 0 &&
			    std::chrono::duration<double>(Clock::now() - started).count() > o_.maxSeconds)
				return inconclusive("time cap reached");
			ExecutionGraph g = std::move(stack_.back());
			stack_.pop_back();
			++v_.stats.popped;
			if (visit(g))
				return std::move(v_);
		}
		if (!v_.violations.empty()) {
			const auto &first = v_.violations.front();
			v_.kind = first.kind;
			v_.graph = first.graph;
			v_.event = first.event;
		}
		return std::move(v_);
	}

private:
	auto inconclusive(std::string why) -> Verdict
	{
		v_.kind = VerdictKind::Inconclusive;
		v_.note = std::move(why);
		return std::move(v_);
	}

	void push(ExecutionGraph &&g)
	{
		stack_.push_back(std::move(g));
		v_.stats.maxStackDepth = std::max<std::uint64_t>(v_.stats.maxStackDepth, stack_.size());
	}

	/* Returns true when the search must stop with the current verdict */
	auto report(VerdictKind kind, const ExecutionGraph &g, EventId ev) -> bool
	{
		if (!o_.allViolations) {
			v_.kind = kind;
			v_.graph = g;
			v_.event = ev;
			return true;
		}
		if (violationKeys_.insert(digest(g.key())).second)
			v_.violations.push_back({kind, g, ev});
		return false;
	}

	auto visit(const ExecutionGraph &g) -> bool
	{
		if (!seen_.insert(digest(g.key())).second) {
			++v_.stats.duplicatesSkipped;
			return false;
		}
		if (!consistent(g, o_.model)) {
			++v_.stats.filteredInconsistent;
			return false;
		}
		auto r = consProgram(p_, g);
		if (!r.consistentWithProgram) {
			++v_.stats.filteredInconsistent;
			return false;
		}
		if (o_.filterWasteful && wastefulWitness(p_, r)) {
			++v_.stats.filteredWasteful;
			return false;
		}
		++v_.stats.explored;

		auto bounds = checkBounds(p_, g, r);
		v_.stats.writeBoundViolations += !bounds.writesOk;
		v_.stats.iterationBoundViolations += !bounds.iterationsOk;

		auto be = boundedEffectCheck(p_, r);
		if (!be.empty()) {
			v_.kind = VerdictKind::FragmentError;
			v_.fragment = std::move(be);
			v_.graph = g;
			v_.note = "program violates the Bounded-Effect principle";
			return true;
		}
		if (o_.onExplored)
			o_.onExplored(g, r);

		if (r.runnable.empty())
			return finalGraph(g, r);

		if (o_.maxThreadEvents != 0) {
			for (std::size_t t = 0; t < g.numThreads(); ++t)
				if (g.threadSize(t) >= o_.maxThreadEvents) {
					++v_.stats.depthPruned;
					return false;
				}
		}
		return extend(g, r);
	}

	auto finalGraph(const ExecutionGraph &g, const ReplayOutcome &r) -> bool
	{
		for (std::size_t t = 0; t < r.traces.size(); ++t) {
			if (r.traces[t].reason != StopReason::BottomRead)
				continue;
			if (!isStagnant(p_, g, o_.model))
				return false;
			EventId rd{static_cast<int>(t), static_cast<int>(r.traces[t].steps - 1)};
			return report(VerdictKind::ATViolation, g, rd);
		}
		++v_.stats.completeGraphs;
		if (o_.collectComplete)
			v_.complete.push_back(g);
		return false;
	}

	auto extend(const ExecutionGraph &g, const ReplayOutcome &r) -> bool
	{
		const std::size_t t = pickThread(r.runnable);
		const auto &tr = r.traces[t];
		const EventId id{static_cast<int>(t), static_cast<int>(tr.steps)};
		const EventLabel &lab = *tr.next;

		switch (lab.kind) {
		case EventKind::Error:
			return report(VerdictKind::SafetyViolation, g.addEvent(id, lab), id);
		case EventKind::Fence:
			push(g.addEvent(id, lab));
			return false;
		case EventKind::Read:
		case EventKind::Update:
			extendRead(g, t, tr, id, lab);
			return false;
		case EventKind::Write:
			extendWrite(g, id, lab);
			return false;
		case EventKind::Init:
			break;
		}
		throw std::logic_error("unexpected init event in a thread");
	}

	/*
	 * Pushed so that ⊥ is tried last and the mo-earliest source first;
	 * this only affects which counterexample is found first.
	 */
	void extendRead(const ExecutionGraph &g, std::size_t t, const ThreadTrace &tr, EventId id,
			const EventLabel &lab)
	{
		if (enclosingAwait(p_.threads[t], tr.positions[tr.steps])) {
			EventLabel bot = lab;
			bot.rf = RfState::Bottom;
			push(g.addEvent(id, bot));
		}
		const auto &mo = g.mo(lab.loc);
		for (auto it = mo.rbegin(); it != mo.rend(); ++it) {
			EventLabel rd = lab;
			rd.rf = RfState::From;
			rd.rfSource = *it;
			ExecutionGraph h = g.addEvent(id, rd);
			if (h.label(id).updateSucceeded())
				for (auto &rv : calcRevisits(h, id))
					push(std::move(rv));
			push(std::move(h));
		}
	}

	void extendWrite(const ExecutionGraph &g, EventId id, const EventLabel &lab)
	{
		for (auto &rv : calcRevisits(g.addEvent(id, lab), id))
			push(std::move(rv));
		for (std::size_t pos = 1; pos <= g.mo(lab.loc).size(); ++pos)
			push(g.addEvent(id, lab, pos));
	}

	const Program &p_;
	const ExploreOptions &o_;
	Verdict v_;
	std::vector<ExecutionGraph> stack_;
	std::unordered_set<GraphDigest, GraphDigestHash> seen_;
	std::unordered_set<GraphDigest, GraphDigestHash> violationKeys_;
};

} // namespace

auto explore(const Program &p, const ExploreOptions &opts) -> Verdict
{
	if (auto d = validate(p); !d.empty())
		throw std::invalid_argument("invalid program: " + d.front().thread + ":" +
					    std::to_string(d.front().index) + ": " + d.front().message);
	if (opts.bePrecheck) {
		ExploreOptions pre;
		pre.model = ModelKind::Sc;
		pre.maxGraphs = std::min<std::uint64_t>(opts.maxGraphs, 20000);
		pre.maxSeconds = std::min(opts.maxSeconds, 30.0);
		pre.allViolations = true;
		pre.bePrecheck = false;
		pre.maxThreadEvents = opts.maxThreadEvents;
		auto pv = explore(p, pre);
		if (pv.kind == VerdictKind::FragmentError) {
			pv.note = "Bounded-Effect violation found on an SC execution";
			pv.violations.clear();
			return pv;
		}
	}
	return Explorer(p, opts).run();
}

} // namespace amc
