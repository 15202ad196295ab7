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

#ifndef AMC_MEMMODEL_HPP
#define AMC_MEMMODEL_HPP

#include "amc/graph.hpp"

#include <optional>
#include <string_view>

namespace amc {

enum class ModelKind : std::uint8_t { Sc, Ramm };

auto modelName(ModelKind m) -> std::string_view;
auto parseModel(std::string_view s) -> std::optional<ModelKind>;

/*
 * Sequential consistency: po ∪ rf ∪ mo ∪ fr acyclic plus RMW atomicity.
 * ⊥ reads constrain nothing.
 */
auto consSc(const ExecutionGraph &g) -> bool;

/** Reference check by enumerating interleavings; exponential, for tests */
auto consScBruteForce(const ExecutionGraph &g) -> bool;

/** Which RAmm axioms hold */
struct RammReport {
	bool coherence = true;
	bool atomicity = true;
	bool hbIrreflexive = true;
	bool psc = true;
	bool immPath = true;

	auto ok() const -> bool { return coherence && atomicity && hbIrreflexive && psc && immPath; }
};

auto checkRamm(const ExecutionGraph &g) -> RammReport;
auto consRamm(const ExecutionGraph &g) -> bool;

auto consistent(const ExecutionGraph &g, ModelKind m) -> bool;

} // namespace amc

#endif /* AMC_MEMMODEL_HPP */
