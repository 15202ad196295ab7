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

#ifndef AMC_GRAPH_HPP
#define AMC_GRAPH_HPP

#include "amc/lang.hpp"
#include "amc/relation.hpp"

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amc {

/** Event identifier. Init writes use thread -1 and the location as index. */
struct EventId {
	int thread = -1;
	int index = 0;

	static auto init(LocId loc) -> EventId { return {-1, static_cast<int>(loc)}; }
	auto isInit() const -> bool { return thread < 0; }

	friend auto operator<=>(const EventId &, const EventId &) = default;
};

auto toString(EventId id) -> std::string;

enum class EventKind : std::uint8_t { Init, Read, Write, Update, Fence, Error };

/** Reads-from state of a read-typed event */
enum class RfState : std::uint8_t { Unset, Bottom, From };

struct EventLabel {
	EventKind kind = EventKind::Fence;
	LocId loc = 0;
	Mode mode = Mode::Rlx;
	Mode failMode = Mode::Rlx;
	RmwKind rmw = RmwKind::Xchg;
	/** Written value (Init, Write) or RMW operand / CAS desired value */
	Value value = 0;
	Value expected = 0;
	RfState rf = RfState::Unset;
	EventId rfSource;
	/** Value returned by the read part; meaningful iff rf == From */
	Value readValue = 0;

	static auto makeInit(LocId loc, Value v) -> EventLabel;
	static auto makeRead(LocId loc, Mode m) -> EventLabel;
	static auto makeWrite(LocId loc, Mode m, Value v) -> EventLabel;
	static auto makeUpdate(LocId loc, RmwKind k, Mode m, Mode fail, Value operand,
			       Value expected) -> EventLabel;
	static auto makeFence(Mode m) -> EventLabel;
	static auto makeError() -> EventLabel;

	auto isReadType() const -> bool
	{
		return kind == EventKind::Read || kind == EventKind::Update;
	}
	auto isAccess() const -> bool { return kind != EventKind::Fence && kind != EventKind::Error; }
	/** True for an update whose read part makes it succeed */
	auto updateSucceeded() const -> bool;
	/** Init, plain writes and successful updates */
	auto isWriteType() const -> bool;
	auto writtenValue() const -> Value;
	/** Mode in force: a failed CAS uses its failure mode */
	auto effectiveMode() const -> Mode;
	auto hasReleaseWrite() const -> bool;
	auto hasAcquireRead() const -> bool;
	auto isReleaseFence() const -> bool;
	auto isAcquireFence() const -> bool;
	auto isSc() const -> bool;

	/** Equality of the program-determined part, ignoring rf */
	auto sameShape(const EventLabel &o) const -> bool;

	friend auto operator==(const EventLabel &, const EventLabel &) -> bool = default;
};

class GraphError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/*
 * Execution graph: per-thread event sequences (po is the index order),
 * one init write per location, rf stored on the reading event, and an
 * explicit modification order per location starting with the init write.
 */
class ExecutionGraph {
public:
	ExecutionGraph() = default;
	ExecutionGraph(std::vector<Value> initValues, std::size_t threads);

	auto numLocations() const -> std::size_t { return init_.size(); }
	auto numThreads() const -> std::size_t { return threads_.size(); }
	auto threadSize(std::size_t t) const -> std::size_t { return threads_[t].size(); }
	auto initValue(LocId loc) const -> Value { return init_[loc]; }

	auto contains(EventId id) const -> bool;
	auto label(EventId id) const -> const EventLabel &;
	auto mo(LocId loc) const -> const std::vector<EventId> & { return mo_[loc]; }
	/** Position of a write in its location's mo, or nullopt */
	auto moIndex(EventId id) const -> std::optional<std::size_t>;

	/** Init writes in location order, then threads in order */
	auto events() const -> std::vector<EventId>;
	auto numEvents() const -> std::size_t;
	/** Write-typed events on LOC in mo order */
	auto writesTo(LocId loc) const -> const std::vector<EventId> & { return mo_[loc]; }

	/*
	 * Persistent operations. addEvent requires id.index == threadSize;
	 * write-typed labels are inserted at MOPOS (default: mo-maximal).
	 */
	auto addEvent(EventId id, const EventLabel &lab,
		      std::optional<std::size_t> moPos = std::nullopt) const -> ExecutionGraph;
	/** SRC nullopt means ⊥. Updates move their write part right after SRC. */
	auto setRf(EventId read, std::optional<EventId> src) const -> ExecutionGraph;

	/* In-place variants used by the explorer */
	void appendEvent(EventId id, const EventLabel &lab, std::optional<std::size_t> moPos);
	void assignRf(EventId read, std::optional<EventId> src);
	void insertMo(LocId loc, std::size_t pos, EventId id);
	void eraseMo(EventId id);
	/** Unchecked construction, used by the dump parser before check() */
	void appendEventRaw(EventId id, const EventLabel &lab);
	void setMoRaw(LocId loc, std::vector<EventId> order);
	/** Keeps the first KEEP[t] events of each thread */
	void truncate(const std::vector<std::size_t> &keep);

	/** Structural invariants; returns a description of the first violation */
	auto check() const -> std::optional<std::string>;

	/** Canonical serialisation, equal iff events, rf and mo are equal */
	auto key() const -> std::string;

	friend auto operator==(const ExecutionGraph &, const ExecutionGraph &) -> bool = default;

private:
	auto mutableLabel(EventId id) -> EventLabel &;

	std::vector<Value> init_;
	std::vector<EventLabel> initLabels_;
	std::vector<std::vector<EventLabel>> threads_;
	std::vector<std::vector<EventId>> mo_;
};

/** 128-bit digest of a canonical key */
struct GraphDigest {
	std::uint64_t lo = 0;
	std::uint64_t hi = 0;
	friend auto operator==(const GraphDigest &, const GraphDigest &) -> bool = default;
};
struct GraphDigestHash {
	auto operator()(const GraphDigest &d) const -> std::size_t
	{
		return static_cast<std::size_t>(d.lo ^ (d.hi * 0x9e3779b97f4a7c15ULL));
	}
};
auto digest(const std::string &key) -> GraphDigest;
inline auto canonicalKey(const ExecutionGraph &g) -> std::string { return g.key(); }

/*
 * Dense numbering of a graph's events (init writes first) and the basic
 * relations over it. hb follows the fence-aware sw rule.
 */
class EventIndex {
public:
	explicit EventIndex(const ExecutionGraph &g);

	auto size() const -> std::size_t { return ids_.size(); }
	auto id(std::size_t i) const -> EventId { return ids_[i]; }
	auto index(EventId id) const -> std::size_t;
	auto label(std::size_t i) const -> const EventLabel & { return g_->label(ids_[i]); }

	auto po() const -> Relation;
	auto rf() const -> Relation;
	auto mo() const -> Relation;
	auto fr() const -> Relation;
	auto sw() const -> Relation;

private:
	const ExecutionGraph *g_;
	std::vector<EventId> ids_;
	std::vector<std::size_t> threadBase_;
};

/** Transitive closure of po ∪ sw, with init writes before everything */
auto happensBefore(const ExecutionGraph &g) -> Relation;
auto happensBefore(const ExecutionGraph &g, const EventIndex &idx) -> Relation;

/** Names used when printing; missing names fall back to indices */
struct GraphNames {
	std::vector<std::string> locations;
	std::vector<std::string> threads;

	auto location(LocId l) const -> std::string;
	auto thread(int t) const -> std::string;
};

auto namesOf(const Program &p) -> GraphNames;

/** Line-based text dump */
auto dumpGraph(const ExecutionGraph &g, const GraphNames &names) -> std::string;
/** Parses dumpGraph output; throws GraphError */
auto parseGraphDump(const std::string &text) -> std::pair<ExecutionGraph, GraphNames>;
/** Graphviz rendering with figure-style labels */
auto toDot(const ExecutionGraph &g, const GraphNames &names) -> std::string;
/** Figure-style label such as W^rel_T1(q,1) */
auto eventCaption(const ExecutionGraph &g, EventId id, const GraphNames &names) -> std::string;

} // namespace amc

#endif /* AMC_GRAPH_HPP */
