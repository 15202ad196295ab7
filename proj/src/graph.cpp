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

#include "amc/graph.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace amc {

auto toString(EventId id) -> std::string
{
	if (id.isInit())
		return "init:" + std::to_string(id.index);
	return std::to_string(id.thread) + ":" + std::to_string(id.index);
}

/* ---------------------------------------------------------- EventLabel */

auto EventLabel::makeInit(LocId loc, Value v) -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Init;
	l.loc = loc;
	l.value = v;
	return l;
}

auto EventLabel::makeRead(LocId loc, Mode m) -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Read;
	l.loc = loc;
	l.mode = m;
	return l;
}

auto EventLabel::makeWrite(LocId loc, Mode m, Value v) -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Write;
	l.loc = loc;
	l.mode = m;
	l.value = v;
	return l;
}

auto EventLabel::makeUpdate(LocId loc, RmwKind k, Mode m, Mode fail, Value operand,
			    Value expected) -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Update;
	l.loc = loc;
	l.rmw = k;
	l.mode = m;
	l.failMode = k == RmwKind::Cas ? fail : m;
	l.value = operand;
	l.expected = k == RmwKind::Cas ? expected : 0;
	return l;
}

auto EventLabel::makeFence(Mode m) -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Fence;
	l.mode = m;
	return l;
}

auto EventLabel::makeError() -> EventLabel
{
	EventLabel l;
	l.kind = EventKind::Error;
	return l;
}

auto EventLabel::updateSucceeded() const -> bool
{
	return kind == EventKind::Update && rf == RfState::From &&
	       rmwResult(rmw, readValue, value, expected).has_value();
}

auto EventLabel::isWriteType() const -> bool
{
	return kind == EventKind::Init || kind == EventKind::Write || updateSucceeded();
}

auto EventLabel::writtenValue() const -> Value
{
	if (kind == EventKind::Update)
		return rmwResult(rmw, readValue, value, expected).value_or(readValue);
	return value;
}

auto EventLabel::effectiveMode() const -> Mode
{
	if (kind == EventKind::Update && rf == RfState::From && !updateSucceeded())
		return failMode;
	return mode;
}

auto EventLabel::hasReleaseWrite() const -> bool
{
	if (kind == EventKind::Write)
		return isReleaseMode(mode);
	return updateSucceeded() && isReleaseMode(mode);
}

auto EventLabel::hasAcquireRead() const -> bool
{
	return isReadType() && isAcquireMode(effectiveMode());
}

auto EventLabel::isReleaseFence() const -> bool
{
	return kind == EventKind::Fence && isReleaseMode(mode);
}

auto EventLabel::isAcquireFence() const -> bool
{
	return kind == EventKind::Fence && isAcquireMode(mode);
}

auto EventLabel::isSc() const -> bool
{
	if (kind == EventKind::Init || kind == EventKind::Error)
		return false;
	return effectiveMode() == Mode::Sc;
}

auto EventLabel::sameShape(const EventLabel &o) const -> bool
{
	if (kind != o.kind)
		return false;
	switch (kind) {
	case EventKind::Init:
		return loc == o.loc && value == o.value;
	case EventKind::Read:
		return loc == o.loc && mode == o.mode;
	case EventKind::Write:
		return loc == o.loc && mode == o.mode && value == o.value;
	case EventKind::Update:
		return loc == o.loc && mode == o.mode && failMode == o.failMode && rmw == o.rmw &&
		       value == o.value && expected == o.expected;
	case EventKind::Fence:
		return mode == o.mode;
	case EventKind::Error:
		return true;
	}
	return false;
}

/* ------------------------------------------------------ ExecutionGraph */

ExecutionGraph::ExecutionGraph(std::vector<Value> initValues, std::size_t threads)
	: init_(std::move(initValues)), threads_(threads), mo_(init_.size())
{
	for (LocId l = 0; l < init_.size(); ++l) {
		mo_[l].push_back(EventId::init(l));
		initLabels_.push_back(EventLabel::makeInit(l, init_[l]));
	}
}

auto ExecutionGraph::contains(EventId id) const -> bool
{
	if (id.isInit())
		return id.index >= 0 && static_cast<std::size_t>(id.index) < init_.size();
	return id.thread >= 0 && static_cast<std::size_t>(id.thread) < threads_.size() &&
	       id.index >= 0 && static_cast<std::size_t>(id.index) < threads_[id.thread].size();
}

auto ExecutionGraph::label(EventId id) const -> const EventLabel &
{
	if (id.isInit()) {
		if (!contains(id))
			throw GraphError("no such event " + toString(id));
		return initLabels_[id.index];
	}
	if (!contains(id))
		throw GraphError("no such event " + toString(id));
	return threads_[id.thread][id.index];
}

auto ExecutionGraph::mutableLabel(EventId id) -> EventLabel &
{
	if (id.isInit() || !contains(id))
		throw GraphError("event not mutable " + toString(id));
	return threads_[id.thread][id.index];
}

auto ExecutionGraph::moIndex(EventId id) const -> std::optional<std::size_t>
{
	LocId loc = id.isInit() ? static_cast<LocId>(id.index) : label(id).loc;
	if (loc >= mo_.size())
		return std::nullopt;
	const auto &m = mo_[loc];
	auto it = std::find(m.begin(), m.end(), id);
	if (it == m.end())
		return std::nullopt;
	return static_cast<std::size_t>(it - m.begin());
}

auto ExecutionGraph::events() const -> std::vector<EventId>
{
	std::vector<EventId> out;
	out.reserve(numEvents());
	for (LocId l = 0; l < init_.size(); ++l)
		out.push_back(EventId::init(l));
	for (std::size_t t = 0; t < threads_.size(); ++t)
		for (std::size_t i = 0; i < threads_[t].size(); ++i)
			out.push_back({static_cast<int>(t), static_cast<int>(i)});
	return out;
}

auto ExecutionGraph::numEvents() const -> std::size_t
{
	std::size_t n = init_.size();
	for (const auto &t : threads_)
		n += t.size();
	return n;
}

void ExecutionGraph::appendEvent(EventId id, const EventLabel &lab, std::optional<std::size_t> moPos)
{
	if (id.isInit() || static_cast<std::size_t>(id.thread) >= threads_.size())
		throw GraphError("bad thread in " + toString(id));
	auto &th = threads_[id.thread];
	if (static_cast<std::size_t>(id.index) < th.size())
		throw GraphError("duplicate event " + toString(id));
	if (static_cast<std::size_t>(id.index) != th.size())
		throw GraphError("index gap at " + toString(id));
	if (lab.kind == EventKind::Init)
		throw GraphError("init events cannot be added to threads");
	if (lab.isAccess() && lab.loc >= init_.size())
		throw GraphError("unknown location in " + toString(id));
	EventLabel stored = lab;
	if (lab.isReadType() && lab.rf == RfState::From) {
		if (!contains(lab.rfSource) || !label(lab.rfSource).isWriteType() ||
		    label(lab.rfSource).loc != lab.loc)
			throw GraphError("bad rf source for " + toString(id));
		stored.readValue = label(lab.rfSource).writtenValue();
	}
	th.push_back(stored);
	if (stored.isWriteType()) {
		std::size_t pos = mo_[lab.loc].size();
		if (moPos)
			pos = *moPos;
		else if (stored.kind == EventKind::Update)
			pos = *moIndex(stored.rfSource) + 1;
		if (pos == 0 || pos > mo_[lab.loc].size()) {
			th.pop_back();
			throw GraphError("bad mo position for " + toString(id));
		}
		mo_[lab.loc].insert(mo_[lab.loc].begin() + static_cast<std::ptrdiff_t>(pos), id);
	}
}

auto ExecutionGraph::addEvent(EventId id, const EventLabel &lab, std::optional<std::size_t> moPos) const
	-> ExecutionGraph
{
	ExecutionGraph g = *this;
	g.appendEvent(id, lab, moPos);
	return g;
}

void ExecutionGraph::assignRf(EventId read, std::optional<EventId> src)
{
	auto &lab = mutableLabel(read);
	if (!lab.isReadType())
		throw GraphError("rf target is not a read: " + toString(read));
	if (src) {
		if (!contains(*src))
			throw GraphError("rf source missing: " + toString(*src));
		const auto &w = label(*src);
		if (!w.isWriteType())
			throw GraphError("rf source is not a write: " + toString(*src));
		if (w.loc != lab.loc)
			throw GraphError("rf location mismatch at " + toString(read));
		if (*src == read)
			throw GraphError("event cannot read from itself");
	}
	if (lab.kind == EventKind::Update)
		eraseMo(read);
	if (src) {
		Value v = label(*src).writtenValue();
		lab.rf = RfState::From;
		lab.rfSource = *src;
		lab.readValue = v;
	} else {
		lab.rf = RfState::Bottom;
		lab.rfSource = EventId{};
		lab.readValue = 0;
	}
	if (lab.updateSucceeded()) {
		auto pos = *moIndex(*src) + 1;
		mo_[lab.loc].insert(mo_[lab.loc].begin() + static_cast<std::ptrdiff_t>(pos), read);
	}
}

auto ExecutionGraph::setRf(EventId read, std::optional<EventId> src) const -> ExecutionGraph
{
	ExecutionGraph g = *this;
	g.assignRf(read, src);
	return g;
}

void ExecutionGraph::appendEventRaw(EventId id, const EventLabel &lab)
{
	threads_.at(id.thread).push_back(lab);
}

void ExecutionGraph::setMoRaw(LocId loc, std::vector<EventId> order)
{
	mo_.at(loc) = std::move(order);
}

void ExecutionGraph::insertMo(LocId loc, std::size_t pos, EventId id)
{
	if (pos == 0 || pos > mo_[loc].size())
		throw GraphError("bad mo position");
	mo_[loc].insert(mo_[loc].begin() + static_cast<std::ptrdiff_t>(pos), id);
}

void ExecutionGraph::eraseMo(EventId id)
{
	for (auto &m : mo_) {
		auto it = std::find(m.begin(), m.end(), id);
		if (it != m.end()) {
			m.erase(it);
			return;
		}
	}
}

void ExecutionGraph::truncate(const std::vector<std::size_t> &keep)
{
	for (std::size_t t = 0; t < threads_.size(); ++t)
		if (keep[t] < threads_[t].size())
			threads_[t].resize(keep[t]);
	for (auto &m : mo_)
		std::erase_if(m, [&](EventId id) {
			return !id.isInit() &&
			       static_cast<std::size_t>(id.index) >= threads_[id.thread].size();
		});
}

auto ExecutionGraph::check() const -> std::optional<std::string>
{
	for (LocId l = 0; l < mo_.size(); ++l) {
		const auto &m = mo_[l];
		if (m.empty() || m.front() != EventId::init(l))
			return "mo of location " + std::to_string(l) + " does not start at init";
		for (std::size_t i = 0; i < m.size(); ++i) {
			if (!contains(m[i]))
				return "mo refers to missing event " + toString(m[i]);
			const auto &w = label(m[i]);
			if (!w.isWriteType() || w.loc != l)
				return "mo holds a non-write " + toString(m[i]);
			for (std::size_t j = i + 1; j < m.size(); ++j)
				if (m[i] == m[j])
					return "mo repeats " + toString(m[i]);
		}
	}
	for (std::size_t t = 0; t < threads_.size(); ++t) {
		for (std::size_t i = 0; i < threads_[t].size(); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			const auto &lab = threads_[t][i];
			if (lab.isAccess() && lab.loc >= init_.size())
				return "unknown location at " + toString(id);
			if (lab.isWriteType() && !moIndex(id))
				return "write missing from mo: " + toString(id);
			if (!lab.isReadType() || lab.rf != RfState::From)
				continue;
			if (!contains(lab.rfSource))
				return "rf source missing for " + toString(id);
			const auto &w = label(lab.rfSource);
			if (!w.isWriteType() || w.loc != lab.loc)
				return "bad rf source for " + toString(id);
			if (w.writtenValue() != lab.readValue)
				return "read value mismatch at " + toString(id);
		}
	}
	return std::nullopt;
}

namespace {

void keyEvent(std::string &out, const EventLabel &l)
{
	out += static_cast<char>('a' + static_cast<int>(l.kind));
	out += std::to_string(l.loc);
	out += static_cast<char>('0' + static_cast<int>(l.mode));
	out += static_cast<char>('0' + static_cast<int>(l.failMode));
	out += static_cast<char>('0' + static_cast<int>(l.rmw));
	out += std::to_string(l.value);
	out += ',';
	out += std::to_string(l.expected);
	switch (l.rf) {
	case RfState::Unset:
		out += 'u';
		break;
	case RfState::Bottom:
		out += 'b';
		break;
	case RfState::From:
		out += 'f';
		out += toString(l.rfSource);
		break;
	}
	out += ';';
}

} // namespace

auto ExecutionGraph::key() const -> std::string
{
	std::string out;
	out.reserve(32 * numEvents());
	for (auto v : init_) {
		out += std::to_string(v);
		out += ',';
	}
	out += '|';
	for (const auto &th : threads_) {
		for (const auto &l : th)
			keyEvent(out, l);
		out += '|';
	}
	for (const auto &m : mo_) {
		for (auto id : m) {
			out += toString(id);
			out += ' ';
		}
		out += '|';
	}
	return out;
}

auto digest(const std::string &key) -> GraphDigest
{
	std::uint64_t a = 0xcbf29ce484222325ULL;
	std::uint64_t b = 0x84222325cbf29ce4ULL;
	for (unsigned char c : key) {
		a = (a ^ c) * 0x100000001b3ULL;
		b = (b + c) * 0x9e3779b97f4a7c15ULL;
		b ^= b >> 29;
	}
	return {a, b ^ key.size()};
}

/* ---------------------------------------------------------- EventIndex */

EventIndex::EventIndex(const ExecutionGraph &g) : g_(&g), ids_(g.events())
{
	std::size_t base = g.numLocations();
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		threadBase_.push_back(base);
		base += g.threadSize(t);
	}
}

auto EventIndex::index(EventId id) const -> std::size_t
{
	if (id.isInit())
		return static_cast<std::size_t>(id.index);
	return threadBase_[id.thread] + static_cast<std::size_t>(id.index);
}

auto EventIndex::po() const -> Relation
{
	Relation r(size());
	for (std::size_t t = 0; t < g_->numThreads(); ++t) {
		auto n = g_->threadSize(t);
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t j = i + 1; j < n; ++j)
				r.set(threadBase_[t] + i, threadBase_[t] + j);
	}
	return r;
}

auto EventIndex::rf() const -> Relation
{
	Relation r(size());
	for (std::size_t i = 0; i < size(); ++i) {
		const auto &l = label(i);
		if (l.isReadType() && l.rf == RfState::From)
			r.set(index(l.rfSource), i);
	}
	return r;
}

auto EventIndex::mo() const -> Relation
{
	Relation r(size());
	for (LocId l = 0; l < g_->numLocations(); ++l) {
		const auto &m = g_->mo(l);
		for (std::size_t i = 0; i < m.size(); ++i)
			for (std::size_t j = i + 1; j < m.size(); ++j)
				r.set(index(m[i]), index(m[j]));
	}
	return r;
}

auto EventIndex::fr() const -> Relation
{
	Relation r(size());
	for (std::size_t i = 0; i < size(); ++i) {
		const auto &l = label(i);
		if (!l.isReadType() || l.rf != RfState::From)
			continue;
		const auto &m = g_->mo(l.loc);
		auto pos = g_->moIndex(l.rfSource);
		if (!pos)
			continue;
		for (std::size_t j = *pos + 1; j < m.size(); ++j)
			if (m[j] != ids_[i])
				r.set(i, index(m[j]));
	}
	return r;
}

auto EventIndex::sw() const -> Relation
{
	Relation r(size());
	for (std::size_t i = 0; i < size(); ++i) {
		const auto &rd = label(i);
		if (!rd.isReadType() || rd.rf != RfState::From || rd.rfSource.isInit())
			continue;
		const EventId w = rd.rfSource;
		std::optional<std::size_t> from;
		if (g_->label(w).hasReleaseWrite()) {
			from = index(w);
		} else {
			for (int k = w.index - 1; k >= 0; --k) {
				EventId f{w.thread, k};
				if (g_->label(f).isReleaseFence()) {
					from = index(f);
					break;
				}
			}
		}
		if (!from)
			continue;
		const EventId rid = ids_[i];
		std::optional<std::size_t> to;
		if (rd.hasAcquireRead()) {
			to = i;
		} else {
			auto n = static_cast<int>(g_->threadSize(rid.thread));
			for (int k = rid.index + 1; k < n; ++k) {
				EventId f{rid.thread, k};
				if (g_->label(f).isAcquireFence()) {
					to = index(f);
					break;
				}
			}
		}
		if (to)
			r.set(*from, *to);
	}
	return r;
}

auto happensBefore(const ExecutionGraph &g, const EventIndex &idx) -> Relation
{
	Relation hb = idx.po();
	hb.unite(idx.sw());
	for (std::size_t l = 0; l < g.numLocations(); ++l)
		for (std::size_t j = g.numLocations(); j < idx.size(); ++j)
			hb.set(l, j);
	hb.close();
	return hb;
}

auto happensBefore(const ExecutionGraph &g) -> Relation
{
	EventIndex idx(g);
	return happensBefore(g, idx);
}

/* ------------------------------------------------------------ printing */

auto GraphNames::location(LocId l) const -> std::string
{
	return l < locations.size() ? locations[l] : "l" + std::to_string(l);
}

auto GraphNames::thread(int t) const -> std::string
{
	return t >= 0 && static_cast<std::size_t>(t) < threads.size() ? threads[t]
								      : "T" + std::to_string(t);
}

auto namesOf(const Program &p) -> GraphNames
{
	GraphNames n;
	n.locations = p.locations;
	for (const auto &t : p.threads)
		n.threads.push_back(t.name);
	return n;
}

namespace {

auto idText(EventId id, const GraphNames &names) -> std::string
{
	if (id.isInit())
		return "init:" + names.location(id.index);
	return std::to_string(id.thread) + ":" + std::to_string(id.index);
}

auto kindWord(EventKind k) -> std::string_view
{
	switch (k) {
	case EventKind::Init:
		return "init";
	case EventKind::Read:
		return "read";
	case EventKind::Write:
		return "write";
	case EventKind::Update:
		return "update";
	case EventKind::Fence:
		return "fence";
	case EventKind::Error:
		return "error";
	}
	return "?";
}

} // namespace

auto dumpGraph(const ExecutionGraph &g, const GraphNames &names) -> std::string
{
	std::ostringstream os;
	os << "amc-graph v1\n";
	for (LocId l = 0; l < g.numLocations(); ++l)
		os << "location " << names.location(l) << " " << g.initValue(l) << "\n";
	for (std::size_t t = 0; t < g.numThreads(); ++t)
		os << "thread " << names.thread(static_cast<int>(t)) << "\n";
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			const auto &l = g.label(id);
			os << "event " << t << " " << i << " " << kindWord(l.kind);
			switch (l.kind) {
			case EventKind::Read:
				os << " " << names.location(l.loc) << " " << modeName(l.mode);
				break;
			case EventKind::Write:
				os << " " << names.location(l.loc) << " " << modeName(l.mode) << " "
				   << l.value;
				break;
			case EventKind::Update:
				os << " " << rmwName(l.rmw) << " " << names.location(l.loc) << " "
				   << modeName(l.mode) << " " << modeName(l.failMode) << " " << l.value
				   << " " << l.expected;
				break;
			case EventKind::Fence:
				os << " " << modeName(l.mode);
				break;
			default:
				break;
			}
			if (l.isReadType()) {
				os << " rf ";
				if (l.rf == RfState::From)
					os << idText(l.rfSource, names);
				else
					os << (l.rf == RfState::Bottom ? "bot" : "unset");
			}
			os << "\n";
		}
	}
	for (LocId l = 0; l < g.numLocations(); ++l) {
		os << "mo " << names.location(l);
		for (auto id : g.mo(l))
			os << " " << idText(id, names);
		os << "\n";
	}
	os << "end\n";
	return os.str();
}

auto parseGraphDump(const std::string &text) -> std::pair<ExecutionGraph, GraphNames>
{
	std::istringstream in(text);
	std::string line;
	GraphNames names;
	std::vector<Value> inits;
	struct Pending {
		EventId id;
		EventLabel lab;
		std::string src;
	};
	std::vector<Pending> events;
	std::vector<std::vector<std::string>> mos;
	bool header = false, ended = false;

	auto fail = [](const std::string &m) -> GraphError { return GraphError("graph dump: " + m); };
	auto locOf = [&](const std::string &n) -> LocId {
		for (LocId i = 0; i < names.locations.size(); ++i)
			if (names.locations[i] == n)
				return i;
		throw fail("unknown location " + n);
	};
	auto modeOf = [&](const std::string &s) {
		auto m = parseMode(s);
		if (!m)
			throw fail("bad mode " + s);
		return *m;
	};

	while (std::getline(in, line)) {
		if (line.empty())
			continue;
		std::istringstream ls(line);
		std::string w;
		ls >> w;
		if (!header) {
			std::string v;
			ls >> v;
			if (w != "amc-graph" || v != "v1")
				throw fail("missing header");
			header = true;
			continue;
		}
		if (w == "location") {
			std::string n;
			Value v = 0;
			if (!(ls >> n >> v))
				throw fail("bad location line");
			names.locations.push_back(n);
			inits.push_back(v);
		} else if (w == "thread") {
			std::string n;
			ls >> n;
			names.threads.push_back(n);
		} else if (w == "event") {
			Pending p;
			std::string kind;
			if (!(ls >> p.id.thread >> p.id.index >> kind))
				throw fail("bad event line");
			std::string a, b, c;
			if (kind == "read") {
				ls >> a >> b;
				p.lab = EventLabel::makeRead(locOf(a), modeOf(b));
			} else if (kind == "write") {
				Value v = 0;
				ls >> a >> b >> v;
				p.lab = EventLabel::makeWrite(locOf(a), modeOf(b), v);
			} else if (kind == "update") {
				std::string rmw, loc, m, f;
				Value op = 0, ex = 0;
				ls >> rmw >> loc >> m >> f >> op >> ex;
				RmwKind k = RmwKind::Xchg;
				if (rmw == "cas")
					k = RmwKind::Cas;
				else if (rmw == "faa")
					k = RmwKind::FetchAdd;
				else if (rmw == "or")
					k = RmwKind::FetchOr;
				else if (rmw != "xchg")
					throw fail("bad rmw " + rmw);
				p.lab = EventLabel::makeUpdate(locOf(loc), k, modeOf(m), modeOf(f), op, ex);
			} else if (kind == "fence") {
				ls >> a;
				p.lab = EventLabel::makeFence(modeOf(a));
			} else if (kind == "error") {
				p.lab = EventLabel::makeError();
			} else {
				throw fail("bad event kind " + kind);
			}
			if (p.lab.isReadType()) {
				std::string rfw;
				if (!(ls >> rfw >> p.src) || rfw != "rf")
					throw fail("read without rf");
			}
			events.push_back(p);
		} else if (w == "mo") {
			std::vector<std::string> ids;
			std::string s;
			while (ls >> s)
				ids.push_back(s);
			mos.push_back(ids);
		} else if (w == "end") {
			ended = true;
			break;
		} else {
			throw fail("unknown line " + w);
		}
	}
	if (!header || !ended)
		throw fail("truncated dump");

	auto parseId = [&](const std::string &s) -> EventId {
		if (s.rfind("init:", 0) == 0)
			return EventId::init(locOf(s.substr(5)));
		auto colon = s.find(':');
		if (colon == std::string::npos)
			throw fail("bad event id " + s);
		return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
	};

	ExecutionGraph g(inits, names.threads.size());
	std::vector<std::vector<EventLabel>> per(names.threads.size());
	for (auto &p : events) {
		if (p.id.thread < 0 || static_cast<std::size_t>(p.id.thread) >= per.size())
			throw fail("event thread out of range");
		if (p.lab.isReadType()) {
			if (p.src == "bot") {
				p.lab.rf = RfState::Bottom;
			} else if (p.src != "unset") {
				p.lab.rf = RfState::From;
				p.lab.rfSource = parseId(p.src);
			}
		}
		auto &th = per[p.id.thread];
		if (static_cast<std::size_t>(p.id.index) != th.size())
			throw fail("event index gap");
		th.push_back(p.lab);
	}
	/* Read values are resolved once all events are known. */
	auto lookup = [&](EventId id) -> const EventLabel * {
		if (id.isInit())
			return nullptr;
		if (static_cast<std::size_t>(id.thread) >= per.size() ||
		    static_cast<std::size_t>(id.index) >= per[id.thread].size())
			throw fail("rf source missing " + toString(id));
		return &per[id.thread][id.index];
	};
	for (int round = 0; round < 64; ++round) {
		bool changed = false;
		for (auto &th : per)
			for (auto &l : th) {
				if (!l.isReadType() || l.rf != RfState::From)
					continue;
				const auto *w = lookup(l.rfSource);
				Value v = w ? w->writtenValue() : inits.at(l.rfSource.index);
				if (v != l.readValue) {
					l.readValue = v;
					changed = true;
				}
			}
		if (!changed)
			break;
	}
	ExecutionGraph out(inits, names.threads.size());
	for (std::size_t t = 0; t < per.size(); ++t)
		for (std::size_t i = 0; i < per[t].size(); ++i)
			out.appendEventRaw({static_cast<int>(t), static_cast<int>(i)}, per[t][i]);
	if (mos.size() != inits.size())
		throw fail("mo lines do not match locations");
	for (const auto &m : mos) {
		if (m.empty())
			throw fail("empty mo line");
		LocId loc = locOf(m[0]);
		std::vector<EventId> order;
		for (std::size_t i = 1; i < m.size(); ++i)
			order.push_back(parseId(m[i]));
		out.setMoRaw(loc, order);
	}
	if (auto err = out.check())
		throw fail(*err);
	return {out, names};
}

auto eventCaption(const ExecutionGraph &g, EventId id, const GraphNames &names) -> std::string
{
	const auto &l = g.label(id);
	auto sup = [](Mode m) -> std::string {
		return m == Mode::Rlx ? "" : "^" + std::string(modeName(m));
	};
	std::string who = id.isInit() ? "init" : names.thread(id.thread);
	std::string loc = names.location(l.loc);
	auto rv = [&]() -> std::string {
		if (l.rf == RfState::From)
			return std::to_string(l.readValue);
		return "⚡";
	};
	switch (l.kind) {
	case EventKind::Init:
		return "W_init(" + loc + "," + std::to_string(l.value) + ")";
	case EventKind::Read:
		return "R" + sup(l.mode) + "_" + who + "(" + loc + "," + rv() + ")";
	case EventKind::Write:
		return "W" + sup(l.mode) + "_" + who + "(" + loc + "," + std::to_string(l.value) + ")";
	case EventKind::Update:
		if (l.rf == RfState::From && !l.updateSucceeded())
			return "R" + sup(l.failMode) + "_" + who + "(" + loc + "," + rv() + ")";
		return "U" + sup(l.mode) + "_" + who + "(" + loc + "," + rv() + "→" +
		       (l.rf == RfState::From ? std::to_string(l.writtenValue()) : "?") + ")";
	case EventKind::Fence:
		return "F" + sup(l.mode) + "_" + who;
	case EventKind::Error:
		return "E_" + who;
	}
	return "?";
}

auto toDot(const ExecutionGraph &g, const GraphNames &names) -> std::string
{
	std::ostringstream os;
	auto node = [&](EventId id) {
		return id.isInit() ? "init_" + std::to_string(id.index)
				   : "e" + std::to_string(id.thread) + "_" + std::to_string(id.index);
	};
	os << "digraph execution {\n  rankdir=TB;\n  node [shape=box, fontname=\"Helvetica\"];\n";
	os << "  { rank=same;";
	for (LocId l = 0; l < g.numLocations(); ++l)
		os << " " << node(EventId::init(l)) << ";";
	os << " }\n";
	for (LocId l = 0; l < g.numLocations(); ++l)
		os << "  " << node(EventId::init(l)) << " [label=\"" << eventCaption(g, EventId::init(l), names)
		   << "\"];\n";
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		os << "  subgraph cluster_" << t << " {\n    label=\"" << names.thread(static_cast<int>(t))
		   << "\";\n";
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			const auto &l = g.label(id);
			os << "    " << node(id) << " [label=\"" << eventCaption(g, id, names) << "\"";
			if (l.kind == EventKind::Error || (l.isReadType() && l.rf == RfState::Bottom))
				os << ", color=red";
			os << "];\n";
		}
		os << "  }\n";
	}
	for (std::size_t t = 0; t < g.numThreads(); ++t)
		for (std::size_t i = 0; i + 1 < g.threadSize(t); ++i)
			os << "  " << node({static_cast<int>(t), static_cast<int>(i)}) << " -> "
			   << node({static_cast<int>(t), static_cast<int>(i + 1)})
			   << " [label=\"po\", color=blue, fontcolor=blue];\n";
	for (auto id : g.events()) {
		const auto &l = g.label(id);
		if (l.isReadType() && l.rf == RfState::From)
			os << "  " << node(l.rfSource) << " -> " << node(id)
			   << " [label=\"rf\", color=darkgreen, fontcolor=darkgreen, constraint=false];\n";
	}
	for (LocId l = 0; l < g.numLocations(); ++l) {
		const auto &m = g.mo(l);
		for (std::size_t i = 0; i + 1 < m.size(); ++i)
			os << "  " << node(m[i]) << " -> " << node(m[i + 1])
			   << " [label=\"mo\", color=orange, fontcolor=orange, constraint=false];\n";
	}
	os << "}\n";
	return os.str();
}

} // namespace amc
