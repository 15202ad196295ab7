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

#ifndef AMC_LOOPMETA_HPP
#define AMC_LOOPMETA_HPP

#include "amc/memmodel.hpp"
#include "amc/replay.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amc {

/** One executed await iteration, as step numbers of a thread trace */
struct Iteration {
	std::size_t start = 0;
	/** Step executing the await statement */
	std::size_t end = 0;
	std::size_t len = 0;
	bool failed = false;
	/** Program index of the await */
	std::size_t awaitIndex = 0;
};

/** Completed iterations (end < N) in execution order */
auto iterations(const Program &p, std::size_t thread, const ThreadTrace &tr) -> std::vector<Iteration>;

struct WastefulWitness {
	std::size_t thread = 0;
	/** Index into the thread's iteration table */
	std::size_t q = 0;
};

/*
 * W(G): a failed iteration whose reads have the same rf sources as the
 * corresponding reads of the next iteration. The next iteration need not
 * be complete, only its reads.
 */
auto wastefulWitness(const Program &p, const ReplayOutcome &r) -> std::optional<WastefulWitness>;
auto wastefulWitness(const Program &p, const ExecutionGraph &g) -> std::optional<WastefulWitness>;
auto isWasteful(const Program &p, const ExecutionGraph &g) -> bool;

/** Registers the statement reads (guards, templates, assignments or condition) */
auto statementRegisters(const Statement &s) -> std::vector<RegId>;

/** vis(t,u): registers assigned in step t and not reassigned in (t,u) */
auto visible(const ThreadTrace &tr, std::size_t t, std::size_t u) -> std::vector<RegId>;

/** (t,u) pairs with u > t whose statement at u reads a register of vis(t,u) */
auto registerReadsFrom(const Program &p, std::size_t thread, const ThreadTrace &tr)
	-> std::vector<std::pair<std::size_t, std::size_t>>;

struct BeViolation {
	std::size_t thread = 0;
	std::size_t q = 0;
	std::size_t step = 0;
	/** rrf target, absent for a write inside a failed iteration */
	std::optional<std::size_t> target;
	std::string what;
};

/** BE(G) violations of the failed iterations present in the graph */
auto boundedEffectCheck(const Program &p, const ReplayOutcome &r) -> std::vector<BeViolation>;
auto boundedEffectCheck(const Program &p, const ExecutionGraph &g) -> std::vector<BeViolation>;

/*
 * A final graph (no runnable thread) where some thread blocks on a ⊥ read
 * inside an await and no blocked thread can get past its current iteration
 * by reading existing writes without making the graph inconsistent or
 * wasteful.
 */
auto isStagnant(const Program &p, const ExecutionGraph &g, ModelKind m) -> bool;

} // namespace amc

#endif /* AMC_LOOPMETA_HPP */
