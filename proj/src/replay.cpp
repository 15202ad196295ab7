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

#include "amc/replay.hpp"

namespace amc {

auto instantiate(const EventTemplate &tpl, std::span<const Value> regs) -> EventLabel
{
	switch (tpl.kind) {
	case TemplateKind::Read:
		return EventLabel::makeRead(tpl.loc, tpl.mode);
	case TemplateKind::Write:
		return EventLabel::makeWrite(tpl.loc, tpl.mode, tpl.value.eval(regs));
	case TemplateKind::Update:
		return EventLabel::makeUpdate(tpl.loc, tpl.rmw, tpl.mode, tpl.failMode,
					      tpl.value.eval(regs), tpl.expected.eval(regs));
	case TemplateKind::Fence:
		return EventLabel::makeFence(tpl.mode);
	case TemplateKind::Error:
		return EventLabel::makeError();
	case TemplateKind::Nop:
		return EventLabel::makeFence(Mode::Rlx);
	}
	return EventLabel::makeFence(Mode::Rlx);
}

auto replayThread(const Program &p, const ExecutionGraph &g, std::size_t thread) -> ThreadTrace
{
	const auto &th = p.threads[thread];
	ThreadTrace tr;
	tr.states.push_back(th.initialRegisters);
	tr.positions.push_back(0);

	for (std::size_t t = 0;; ++t) {
		const std::size_t k = tr.positions.back();
		if (k >= th.body.size()) {
			tr.steps = t;
			tr.reason = StopReason::Finished;
			return tr;
		}
		const auto &sigma = tr.states.back();
		const auto &stmt = th.body[k];
		const auto *aw = std::get_if<Await>(&stmt);
		const EventTemplate *tpl = nullptr;
		EventLabel gen;
		if (aw != nullptr) {
			gen = EventLabel::makeFence(Mode::Rlx);
		} else {
			tpl = std::get<Step>(stmt).event.select(sigma);
			gen = tpl ? instantiate(*tpl, sigma) : EventLabel::makeFence(Mode::Rlx);
		}

		EventId id{static_cast<int>(thread), static_cast<int>(t)};
		if (!g.contains(id)) {
			tr.steps = t;
			tr.reason = StopReason::AwaitingEvent;
			tr.next = gen;
			return tr;
		}
		const auto &actual = g.label(id);
		if (!actual.sameShape(gen)) {
			tr.steps = t;
			tr.reason = StopReason::Mismatch;
			tr.next = gen;
			return tr;
		}

		tr.events.push_back(actual);
		if (aw != nullptr) {
			tr.readResults.emplace_back();
			tr.updated.emplace_back();
			tr.states.push_back(sigma);
			tr.positions.push_back(aw->cond.eval(sigma) != 0 ? k - aw->jump : k + 1);
			continue;
		}

		std::optional<Value> v;
		if (actual.isReadType()) {
			if (actual.rf != RfState::From) {
				tr.readResults.emplace_back();
				tr.updated.emplace_back();
				tr.states.push_back(sigma);
				tr.positions.push_back(k + 1);
				tr.steps = t + 1;
				tr.reason = StopReason::BottomRead;
				return tr;
			}
			v = actual.readValue;
		}
		tr.readResults.push_back(v);

		std::vector<Value> nextState = sigma;
		std::vector<RegId> dom;
		if (const auto *uc = std::get<Step>(stmt).update.select(sigma)) {
			for (const auto &a : uc->assigns) {
				nextState[a.reg] = a.value.eval(sigma, v);
				dom.push_back(a.reg);
			}
		}
		tr.updated.push_back(std::move(dom));
		tr.states.push_back(std::move(nextState));
		tr.positions.push_back(k + 1);
	}
}

auto consProgram(const Program &p, const ExecutionGraph &g) -> ReplayOutcome
{
	ReplayOutcome out;
	if (g.numThreads() != p.threads.size()) {
		out.consistentWithProgram = false;
		return out;
	}
	for (std::size_t t = 0; t < p.threads.size(); ++t) {
		auto tr = replayThread(p, g, t);
		if (tr.reason == StopReason::Mismatch && !out.mismatch) {
			EventId id{static_cast<int>(t), static_cast<int>(tr.steps)};
			out.mismatch = ReplayMismatch{t, tr.steps, *tr.next, g.label(id),
						      "graph event differs from the generated one"};
		}
		if (tr.reason != StopReason::Mismatch && g.threadSize(t) > tr.steps && !out.mismatch) {
			EventId id{static_cast<int>(t), static_cast<int>(tr.steps)};
			out.mismatch = ReplayMismatch{t, tr.steps, EventLabel::makeFence(Mode::Rlx),
						      g.label(id), "superfluous event"};
		}
		if (tr.reason == StopReason::AwaitingEvent)
			out.runnable.push_back(t);
		out.traces.push_back(std::move(tr));
	}
	out.consistentWithProgram = !out.mismatch.has_value();
	if (!out.consistentWithProgram)
		out.runnable.clear();
	return out;
}

} // namespace amc
