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

#include "amc/loopmeta.hpp"

#include <algorithm>

namespace amc {

auto iterations(const Program &p, std::size_t thread, const ThreadTrace &tr) -> std::vector<Iteration>
{
	const auto &body = p.threads[thread].body;
	std::vector<Iteration> out;
	for (std::size_t t = 0; t < tr.steps; ++t) {
		const auto k = tr.positions[t];
		const auto *aw = std::get_if<Await>(&body[k]);
		if (aw == nullptr)
			continue;
		Iteration it;
		it.end = t;
		it.len = aw->jump;
		it.start = t - aw->jump;
		it.failed = aw->cond.eval(tr.states[t]) != 0;
		it.awaitIndex = k;
		out.push_back(it);
	}
	return out;
}

namespace {

auto sameRf(const EventLabel &a, const EventLabel &b) -> bool
{
	return a.isReadType() && b.isReadType() && a.rf == RfState::From && b.rf == RfState::From &&
	       a.rfSource == b.rfSource;
}

auto repeatsReads(const ThreadTrace &tr, const Iteration &it) -> bool
{
	const std::size_t next = it.end + 1;
	if (next >= tr.steps)
		return false;
	for (std::size_t m = 0; m < it.len; ++m) {
		const auto &e = tr.events[it.start + m];
		if (!e.isReadType())
			continue;
		if (next + m >= tr.steps || !sameRf(e, tr.events[next + m]))
			return false;
	}
	return true;
}

} // namespace

auto wastefulWitness(const Program &p, const ReplayOutcome &r) -> std::optional<WastefulWitness>
{
	for (std::size_t t = 0; t < r.traces.size(); ++t) {
		const auto &tr = r.traces[t];
		auto its = iterations(p, t, tr);
		for (std::size_t q = 0; q < its.size(); ++q)
			if (its[q].failed && repeatsReads(tr, its[q]))
				return WastefulWitness{t, q};
	}
	return std::nullopt;
}

auto wastefulWitness(const Program &p, const ExecutionGraph &g) -> std::optional<WastefulWitness>
{
	return wastefulWitness(p, consProgram(p, g));
}

auto isWasteful(const Program &p, const ExecutionGraph &g) -> bool
{
	return wastefulWitness(p, g).has_value();
}

auto statementRegisters(const Statement &s) -> std::vector<RegId>
{
	std::vector<RegId> out;
	if (const auto *aw = std::get_if<Await>(&s)) {
		aw->cond.collectRegisters(out);
	} else {
		const auto &st = std::get<Step>(s);
		for (const auto &c : st.event.cases) {
			c.guard.collectRegisters(out);
			c.tpl.value.collectRegisters(out);
			c.tpl.expected.collectRegisters(out);
		}
		for (const auto &c : st.update.cases) {
			c.guard.collectRegisters(out);
			for (const auto &a : c.assigns)
				a.value.collectRegisters(out);
		}
	}
	std::ranges::sort(out);
	auto dup = std::ranges::unique(out);
	out.erase(dup.begin(), dup.end());
	return out;
}

auto visible(const ThreadTrace &tr, std::size_t t, std::size_t u) -> std::vector<RegId>
{
	std::vector<RegId> vis = tr.updated[t];
	for (std::size_t s = t + 1; s < u && s < tr.steps; ++s)
		std::erase_if(vis, [&](RegId r) { return std::ranges::count(tr.updated[s], r) > 0; });
	return vis;
}

namespace {

auto intersects(const std::vector<RegId> &sorted, const std::vector<RegId> &regs) -> bool
{
	return std::ranges::any_of(regs, [&](RegId r) { return std::ranges::binary_search(sorted, r); });
}

/* rrf edges leaving step t, scanning forward while anything stays visible */
template <typename F>
void edgesFrom(const ThreadTrace &tr, const std::vector<std::vector<RegId>> &reads, std::size_t t,
	       F &&emit)
{
	std::vector<RegId> vis = tr.updated[t];
	for (std::size_t u = t + 1; u < tr.steps && !vis.empty(); ++u) {
		if (intersects(reads[tr.positions[u]], vis))
			emit(u);
		std::erase_if(vis, [&](RegId r) { return std::ranges::count(tr.updated[u], r) > 0; });
	}
}

auto readsPerStatement(const Thread &th) -> std::vector<std::vector<RegId>>
{
	std::vector<std::vector<RegId>> out;
	out.reserve(th.body.size());
	for (const auto &s : th.body)
		out.push_back(statementRegisters(s));
	return out;
}

} // namespace

auto registerReadsFrom(const Program &p, std::size_t thread, const ThreadTrace &tr)
	-> std::vector<std::pair<std::size_t, std::size_t>>
{
	auto reads = readsPerStatement(p.threads[thread]);
	std::vector<std::pair<std::size_t, std::size_t>> out;
	for (std::size_t t = 0; t < tr.steps; ++t)
		edgesFrom(tr, reads, t, [&](std::size_t u) { out.emplace_back(t, u); });
	return out;
}

auto boundedEffectCheck(const Program &p, const ReplayOutcome &r) -> std::vector<BeViolation>
{
	std::vector<BeViolation> out;
	for (std::size_t t = 0; t < r.traces.size(); ++t) {
		const auto &tr = r.traces[t];
		auto its = iterations(p, t, tr);
		if (std::ranges::none_of(its, &Iteration::failed))
			continue;
		auto reads = readsPerStatement(p.threads[t]);
		for (std::size_t q = 0; q < its.size(); ++q) {
			const auto &it = its[q];
			if (!it.failed)
				continue;
			for (std::size_t s = it.start; s < it.end; ++s) {
				if (tr.events[s].isWriteType())
					out.push_back({t, q, s, std::nullopt, "write in a failed iteration"});
				/* The await step itself may read the body's registers. */
				edgesFrom(tr, reads, s, [&](std::size_t u) {
					if (u > it.end)
						out.push_back({t, q, s, u,
						               "register value escapes a failed iteration"});
				});
			}
		}
	}
	return out;
}

auto boundedEffectCheck(const Program &p, const ExecutionGraph &g) -> std::vector<BeViolation>
{
	return boundedEffectCheck(p, consProgram(p, g));
}

namespace {

struct StagnancyProbe {
	const Program &p;
	ModelKind model;
	std::size_t thread;
	/* Step of the ⊥ read; progress means an await step after it */
	std::size_t from;

	auto admissible(const ExecutionGraph &h) const -> bool
	{
		return consistent(h, model) && !isWasteful(p, h);
	}

	auto progressed(const ThreadTrace &tr) const -> bool
	{
		if (tr.reason == StopReason::Finished)
			return true;
		const auto &body = p.threads[thread].body;
		for (std::size_t u = from + 1; u < tr.steps; ++u)
			if (isAwait(body[tr.positions[u]]) || tr.events[u].kind == EventKind::Error)
				return true;
		return false;
	}

	auto extend(const ExecutionGraph &h) const -> bool
	{
		auto tr = replayThread(p, h, thread);
		if (progressed(tr))
			return true;
		if (tr.reason != StopReason::AwaitingEvent || !tr.next)
			return false;
		EventId id{static_cast<int>(thread), static_cast<int>(tr.steps)};
		const EventLabel &lab = *tr.next;
		if (lab.kind == EventKind::Error)
			return true;
		auto tryGraph = [&](ExecutionGraph &&next) {
			return admissible(next) && extend(next);
		};
		if (lab.isReadType()) {
			for (const auto &w : h.mo(lab.loc)) {
				EventLabel rd = lab;
				rd.rf = RfState::From;
				rd.rfSource = w;
				ExecutionGraph next = h;
				next.appendEvent(id, rd, std::nullopt);
				if (tryGraph(std::move(next)))
					return true;
			}
			return false;
		}
		if (lab.kind == EventKind::Write) {
			for (std::size_t pos = 1; pos <= h.mo(lab.loc).size(); ++pos) {
				ExecutionGraph next = h;
				next.appendEvent(id, lab, pos);
				if (tryGraph(std::move(next)))
					return true;
			}
			return false;
		}
		ExecutionGraph next = h;
		next.appendEvent(id, lab, std::nullopt);
		return tryGraph(std::move(next));
	}
};

} // namespace

auto isStagnant(const Program &p, const ExecutionGraph &g, ModelKind m) -> bool
{
	auto r = consProgram(p, g);
	if (!r.consistentWithProgram || !r.runnable.empty())
		return false;
	bool blocked = false;
	for (std::size_t t = 0; t < r.traces.size(); ++t) {
		const auto &tr = r.traces[t];
		if (tr.reason != StopReason::BottomRead)
			continue;
		blocked = true;
		const std::size_t s = tr.steps - 1;
		EventId rd{static_cast<int>(t), static_cast<int>(s)};
		StagnancyProbe probe{p, m, t, s};
		const auto loc = g.label(rd).loc;
		for (const auto &w : g.mo(loc)) {
			ExecutionGraph h = g;
			h.assignRf(rd, w);
			if (probe.admissible(h) && probe.extend(h))
				return false;
		}
	}
	return blocked;
}

} // namespace amc
