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

#ifndef AMC_OPTIMIZER_HPP
#define AMC_OPTIMIZER_HPP

#include "amc/explorer.hpp"
#include "amc/lang.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace amc {

/* One mode slot of an atomic template. */
struct SiteSlot {
	std::size_t thread = 0;
	std::size_t statement = 0;
	std::size_t eventCase = 0;
	/** The failure mode of a CAS */
	bool failSlot = false;
};

/*
 * A barrier site. Templates sharing an @name form one site, so a lock
 * function used by several threads gets one mode. Unnamed templates are
 * called "Thread.statement.case"; a CAS adds "<id>.fail".
 */
struct BarrierSite {
	std::string id;
	std::vector<SiteSlot> slots;
	TemplateKind kind = TemplateKind::Read;
	/** Modes the slot may take, weakest first */
	std::vector<Mode> domain;
	Mode initial = Mode::Rlx;
	bool frozen = false;
};

/** Sites in program order of their first slot; throws on unknown pins */
auto barrierSites(const Program &p, const std::vector<std::string> &extraPins = {})
	-> std::vector<BarrierSite>;

/** Modes indexed like the site vector */
using ModeAssignment = std::vector<Mode>;

auto initialAssignment(const std::vector<BarrierSite> &sites) -> ModeAssignment;

auto applyAssignment(const Program &p, const std::vector<BarrierSite> &sites, const ModeAssignment &a)
	-> Program;

/** Pointwise order over the mode lattice */
auto assignmentLeq(const ModeAssignment &a, const ModeAssignment &b) -> bool;

/** The modes directly below M in the lattice, restricted to DOMAIN */
auto oneStepWeaker(Mode m, const std::vector<Mode> &domain) -> std::vector<Mode>;

/** "site=mode ..." over all sites */
auto assignmentKey(const std::vector<BarrierSite> &sites, const ModeAssignment &a) -> std::string;

struct ModeCounts {
	std::size_t acq = 0;
	std::size_t rel = 0;
	std::size_t sc = 0;

	auto operator==(const ModeCounts &) const -> bool = default;
};

auto countModes(const ModeAssignment &a) -> ModeCounts;

enum class Strategy : std::uint8_t { Greedy, Exhaustive };

auto parseStrategy(std::string_view s) -> std::optional<Strategy>;

struct AuditEntry {
	std::string key;
	VerdictKind verdict = VerdictKind::Success;
	/** check, probe or pruned */
	std::string action;
};

enum class OptimizeStatus : std::uint8_t {
	Ok,
	/** The starting modes already fail */
	InitialFails,
	/** Even all-sc fails */
	UnverifiableAtSc,
};

struct OptimizeOptions {
	Strategy strategy = Strategy::Greedy;
	ExploreOptions explore;
	std::vector<std::string> pins;
	/** Upper bound on assignments enumerated by the exhaustive strategy */
	std::size_t maxAssignments = 4096;
};

struct OptimizeResult {
	OptimizeStatus status = OptimizeStatus::Ok;
	std::vector<BarrierSite> sites;
	ModeAssignment initial;
	/** Greedy: one entry; exhaustive: every minimal verified assignment */
	std::vector<ModeAssignment> results;
	std::vector<AuditEntry> audit;
	/** Sites whose probes hit a resource cap */
	std::vector<std::string> flagged;
};

auto optimize(const Program &p, const OptimizeOptions &opts) -> OptimizeResult;

/** Table with one column per result plus an acq/rel/sc summary */
auto formatOptimizeReport(const OptimizeResult &r) -> std::string;

} // namespace amc

#endif /* AMC_OPTIMIZER_HPP */
