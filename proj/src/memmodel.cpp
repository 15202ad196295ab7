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

#include "amc/memmodel.hpp"

#include <map>
#include <set>

namespace amc {

auto modelName(ModelKind m) -> std::string_view
{
	return m == ModelKind::Sc ? "sc" : "ramm";
}

auto parseModel(std::string_view s) -> std::optional<ModelKind>
{
	if (s == "sc")
		return ModelKind::Sc;
	if (s == "ramm")
		return ModelKind::Ramm;
	return std::nullopt;
}

namespace {

auto atomicityHolds(const ExecutionGraph &g) -> bool
{
	for (std::size_t t = 0; t < g.numThreads(); ++t)
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			const auto &l = g.label(id);
			if (!l.updateSucceeded())
				continue;
			auto pu = g.moIndex(id);
			auto pw = g.moIndex(l.rfSource);
			if (!pu || !pw || *pu != *pw + 1)
				return false;
		}
	return true;
}

} // namespace

auto consSc(const ExecutionGraph &g) -> bool
{
	if (!atomicityHolds(g))
		return false;
	EventIndex idx(g);
	Relation r = idx.po();
	r.unite(idx.rf());
	r.unite(idx.mo());
	r.unite(idx.fr());
	for (std::size_t l = 0; l < g.numLocations(); ++l)
		for (std::size_t j = g.numLocations(); j < idx.size(); ++j)
			r.set(l, j);
	return r.acyclic();
}

auto consScBruteForce(const ExecutionGraph &g) -> bool
{
	const std::size_t nt = g.numThreads();
	std::set<std::vector<std::size_t>> dead;

	/* Position vector determines how far each mo has been consumed. */
	auto step = [&](auto &&self, std::vector<std::size_t> &pos, std::vector<std::size_t> &moDone)
		-> bool {
		bool done = true;
		for (std::size_t t = 0; t < nt; ++t)
			done &= pos[t] == g.threadSize(t);
		if (done)
			return true;
		if (dead.contains(pos))
			return false;
		for (std::size_t t = 0; t < nt; ++t) {
			if (pos[t] == g.threadSize(t))
				continue;
			EventId id{static_cast<int>(t), static_cast<int>(pos[t])};
			const auto &l = g.label(id);
			if (l.isReadType() && l.rf == RfState::From) {
				/* Must read the latest write executed so far */
				const auto &m = g.mo(l.loc);
				if (m[moDone[l.loc] - 1] != l.rfSource)
					continue;
			}
			bool writes = l.isWriteType();
			if (writes) {
				const auto &m = g.mo(l.loc);
				if (moDone[l.loc] >= m.size() || m[moDone[l.loc]] != id)
					continue;
				++moDone[l.loc];
			}
			++pos[t];
			bool ok = self(self, pos, moDone);
			--pos[t];
			if (writes)
				--moDone[l.loc];
			if (ok)
				return true;
		}
		dead.insert(pos);
		return false;
	};

	std::vector<std::size_t> pos(nt, 0);
	std::vector<std::size_t> moDone(g.numLocations(), 1);
	return step(step, pos, moDone);
}

auto checkRamm(const ExecutionGraph &g) -> RammReport
{
	RammReport rep;
	rep.atomicity = atomicityHolds(g);

	EventIndex idx(g);
	const auto n = idx.size();
	Relation hb = happensBefore(g, idx);
	rep.hbIrreflexive = hb.irreflexive();

	Relation rf = idx.rf();
	Relation mo = idx.mo();
	Relation fr = idx.fr();

	/* (a) per-location coherence */
	Relation coh = mo;
	coh.unite(rf);
	coh.unite(fr);
	for (std::size_t i = 0; i < n; ++i) {
		const auto &li = idx.label(i);
		if (!li.isAccess())
			continue;
		for (std::size_t j = 0; j < n; ++j) {
			if (i == j || !hb.test(i, j))
				continue;
			const auto &lj = idx.label(j);
			if (lj.isAccess() && lj.loc == li.loc)
				coh.set(i, j);
		}
	}
	rep.coherence = coh.acyclic();

	/* (d) sc events ordered by hb ∪ hb?;eco;hb? */
	std::vector<std::size_t> sc;
	for (std::size_t i = 0; i < n; ++i)
		if (idx.label(i).isSc())
			sc.push_back(i);
	if (sc.size() > 1) {
		Relation eco = rf;
		eco.unite(mo);
		eco.unite(fr);
		eco.close();
		Relation hbq = hb.reflexive();
		Relation p = hbq.compose(eco).compose(hbq);
		p.unite(hb);
		Relation s(sc.size());
		for (std::size_t a = 0; a < sc.size(); ++a)
			for (std::size_t b = 0; b < sc.size(); ++b)
				if (p.test(sc[a], sc[b]))
					s.set(a, b);
		rep.psc = s.acyclic();
	}

	/* (e) no cycle po ; [W^rel] ; rf ; [R^acq] ; po ; mo */
	for (std::size_t i = 0; i < n && rep.immPath; ++i) {
		const auto &rd = idx.label(i);
		if (!rd.isReadType() || rd.rf != RfState::From || !rd.hasAcquireRead())
			continue;
		const EventId w = rd.rfSource;
		if (w.isInit() || !g.label(w).hasReleaseWrite())
			continue;
		const EventId r = idx.id(i);
		for (int a = 0; a < w.index && rep.immPath; ++a) {
			EventId ea{w.thread, a};
			const auto &la = g.label(ea);
			if (!la.isWriteType())
				continue;
			auto pa = g.moIndex(ea);
			for (int b = r.index + 1; b < static_cast<int>(g.threadSize(r.thread)); ++b) {
				EventId eb{r.thread, b};
				const auto &lb = g.label(eb);
				if (!lb.isWriteType() || lb.loc != la.loc)
					continue;
				auto pb = g.moIndex(eb);
				if (pa && pb && *pb < *pa) {
					rep.immPath = false;
					break;
				}
			}
		}
	}
	return rep;
}

auto consRamm(const ExecutionGraph &g) -> bool
{
	return checkRamm(g).ok();
}

auto consistent(const ExecutionGraph &g, ModelKind m) -> bool
{
	return m == ModelKind::Sc ? consSc(g) : consRamm(g);
}

} // namespace amc
