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

#ifndef AMC_EXPLORER_HPP
#define AMC_EXPLORER_HPP

#include "amc/loopmeta.hpp"
#include "amc/memmodel.hpp"
#include "amc/replay.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace amc {

struct ExploreOptions {
	ModelKind model = ModelKind::Ramm;
	std::uint64_t maxGraphs = 1000000;
	double maxSeconds = 300.0;
	/** Keep searching after a counterexample and collect all of them */
	bool allViolations = false;
	/** Off only for experiments: the search may then diverge */
	bool filterWasteful = true;
	/** Run the Bounded-Effect check on SC executions before exploring */
	bool bePrecheck = true;
	/** Do not extend graphs where a thread has this many events (0: no limit) */
	std::size_t maxThreadEvents = 0;
	/** Keep every complete graph in the verdict */
	bool collectComplete = false;
	/** Called for every graph that passes the consistency and waste filters */
	std::function<void(const ExecutionGraph &, const ReplayOutcome &)> onExplored;
};

enum class VerdictKind : std::uint8_t {
	Success,
	SafetyViolation,
	ATViolation,
	FragmentError,
	Inconclusive,
};

auto verdictName(VerdictKind k) -> std::string_view;

struct SearchStats {
	std::uint64_t popped = 0;
	/** Popped graphs that are consistent and not wasteful */
	std::uint64_t explored = 0;
	std::uint64_t filteredInconsistent = 0;
	std::uint64_t filteredWasteful = 0;
	std::uint64_t duplicatesSkipped = 0;
	std::uint64_t maxStackDepth = 0;
	/** Explored graphs where every thread terminated */
	std::uint64_t completeGraphs = 0;
	/** Explored graphs not extended because of maxThreadEvents */
	std::uint64_t depthPruned = 0;
	std::uint64_t writeBoundViolations = 0;
	std::uint64_t iterationBoundViolations = 0;
};

struct Counterexample {
	VerdictKind kind = VerdictKind::SafetyViolation;
	ExecutionGraph graph;
	EventId event;
};

struct Verdict {
	VerdictKind kind = VerdictKind::Success;
	SearchStats stats;
	/** Counterexample graph for safety and AT violations */
	std::optional<ExecutionGraph> graph;
	/** The error event or the blocked ⊥ read */
	std::optional<EventId> event;
	std::vector<BeViolation> fragment;
	/** Why the result is inconclusive, or other remarks */
	std::string note;
	/** Every distinct counterexample when allViolations is set */
	std::vector<Counterexample> violations;
	std::vector<ExecutionGraph> complete;
};

auto explore(const Program &p, const ExploreOptions &opts = {}) -> Verdict;

/** Lowest thread index; REQUIRES a non-empty set */
auto pickThread(const std::vector<std::size_t> &runnable) -> std::size_t;

/** Per-thread prefix lengths of the po ∪ rf predecessors of ID, inclusive */
auto porfPrefix(const ExecutionGraph &g, EventId id) -> std::vector<std::size_t>;

/*
 * Graphs obtained by making an existing read of W's location read from W,
 * restricted to the causal prefixes of that read and of W. Plain writes are
 * tried at every mo position of the restricted graph.
 */
auto calcRevisits(const ExecutionGraph &g, EventId w) -> std::vector<ExecutionGraph>;

/** Post-hoc bound checks on one explored graph */
struct BoundReport {
	bool writesOk = true;
	bool iterationsOk = true;
};
auto checkBounds(const Program &p, const ExecutionGraph &g, const ReplayOutcome &r) -> BoundReport;

} // namespace amc

#endif /* AMC_EXPLORER_HPP */
