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

#ifndef AMC_REPLAY_HPP
#define AMC_REPLAY_HPP

#include "amc/graph.hpp"
#include "amc/lang.hpp"

#include <optional>
#include <vector>

namespace amc {

enum class StopReason : std::uint8_t {
	/** Control left the program text */
	Finished,
	/** The graph has no event for the next step */
	AwaitingEvent,
	/** The last step was a read with ⊥ (or unset) rf */
	BottomRead,
	/** The graph's event differs from the generated one */
	Mismatch,
};

/** Local execution of one thread against a graph. */
struct ThreadTrace {
	/** σ(0..N) */
	std::vector<std::vector<Value>> states;
	/** k(0..N) */
	std::vector<std::size_t> positions;
	/** e(0..N-1), taken from the graph so reads carry their rf */
	std::vector<EventLabel> events;
	/** v(0..N-1) */
	std::vector<std::optional<Value>> readResults;
	/** Dom(δ(t)) */
	std::vector<std::vector<RegId>> updated;
	std::size_t steps = 0;
	StopReason reason = StopReason::Finished;
	/** Event the thread would generate next (AwaitingEvent or Mismatch) */
	std::optional<EventLabel> next;
};

struct ReplayMismatch {
	std::size_t thread = 0;
	std::size_t index = 0;
	EventLabel expected;
	std::optional<EventLabel> actual;
	std::string what;
};

struct ReplayOutcome {
	std::vector<ThreadTrace> traces;
	bool consistentWithProgram = true;
	std::optional<ReplayMismatch> mismatch;
	/** 𝒯_G in thread order */
	std::vector<std::size_t> runnable;
};

/** Label produced by template TPL in register state REGS */
auto instantiate(const EventTemplate &tpl, std::span<const Value> regs) -> EventLabel;

auto replayThread(const Program &p, const ExecutionGraph &g, std::size_t thread) -> ThreadTrace;

/** cons^P(G) together with every thread's trace and 𝒯_G */
auto consProgram(const Program &p, const ExecutionGraph &g) -> ReplayOutcome;

} // namespace amc

#endif /* AMC_REPLAY_HPP */
