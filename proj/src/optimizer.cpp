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

#include "amc/optimizer.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace amc {

namespace {

auto strength(Mode m) -> int
{
	switch (m) {
	case Mode::Rlx:
		return 0;
	case Mode::Rel:
	case Mode::Acq:
		return 1;
	case Mode::Sc:
		return 2;
	}
	return 0;
}

auto domainFor(TemplateKind k, bool failSlot) -> std::vector<Mode>
{
	if (failSlot || k == TemplateKind::Read)
		return {Mode::Rlx, Mode::Acq, Mode::Sc};
	if (k == TemplateKind::Write)
		return {Mode::Rlx, Mode::Rel, Mode::Sc};
	return {Mode::Rlx, Mode::Rel, Mode::Acq, Mode::Sc};
}

auto slotTemplate(Program &p, const SiteSlot &s) -> EventTemplate &
{
	return std::get<Step>(p.threads[s.thread].body[s.statement]).event.cases[s.eventCase].tpl;
}

} // namespace

auto barrierSites(const Program &p, const std::vector<std::string> &extraPins) -> std::vector<BarrierSite>
{
	std::vector<BarrierSite> sites;
	std::unordered_map<std::string, std::size_t> byId;
	auto add = [&](std::string id, TemplateKind kind, SiteSlot slot, Mode mode) {
		auto it = byId.find(id);
		if (it == byId.end()) {
			BarrierSite s;
			s.id = id;
			s.kind = kind;
			s.domain = domainFor(kind, slot.failSlot);
			s.initial = mode;
			s.slots.push_back(slot);
			byId.emplace(std::move(id), sites.size());
			sites.push_back(std::move(s));
			return;
		}
		auto &s = sites[it->second];
		if (s.kind != kind || s.slots.front().failSlot != slot.failSlot)
			throw std::invalid_argument("site '" + s.id + "' labels operations of different kinds");
		if (s.initial != mode)
			throw std::invalid_argument("site '" + s.id + "' is used with different modes");
		s.slots.push_back(slot);
	};
	for (std::size_t t = 0; t < p.threads.size(); ++t) {
		const auto &th = p.threads[t];
		for (std::size_t k = 0; k < th.body.size(); ++k) {
			const auto *st = std::get_if<Step>(&th.body[k]);
			if (st == nullptr)
				continue;
			for (std::size_t c = 0; c < st->event.cases.size(); ++c) {
				const auto &tpl = st->event.cases[c].tpl;
				if (!tpl.isMemoryAccess() && tpl.kind != TemplateKind::Fence)
					continue;
				std::string id = !tpl.site.empty() ? tpl.site
								    : th.name + "." + std::to_string(k) + "." +
									      std::to_string(c);
				add(id, tpl.kind, {t, k, c, false}, tpl.mode);
				if (tpl.kind == TemplateKind::Update && tpl.rmw == RmwKind::Cas)
					add(id + ".fail", tpl.kind, {t, k, c, true}, tpl.failMode);
			}
		}
	}
	auto pin = [&](const std::string &id) {
		auto it = byId.find(id);
		if (it == byId.end())
			throw std::invalid_argument("unknown site '" + id + "'");
		sites[it->second].frozen = true;
		/* Pinning a CAS pins both of its slots. */
		if (auto f = byId.find(id + ".fail"); f != byId.end())
			sites[f->second].frozen = true;
	};
	for (const auto &id : p.pinnedSites)
		pin(id);
	for (const auto &id : extraPins)
		pin(id);
	return sites;
}

auto initialAssignment(const std::vector<BarrierSite> &sites) -> ModeAssignment
{
	ModeAssignment a;
	a.reserve(sites.size());
	for (const auto &s : sites)
		a.push_back(s.initial);
	return a;
}

auto applyAssignment(const Program &p, const std::vector<BarrierSite> &sites, const ModeAssignment &a)
	-> Program
{
	Program out = p;
	for (std::size_t i = 0; i < sites.size(); ++i) {
		for (const auto &slot : sites[i].slots) {
			auto &tpl = slotTemplate(out, slot);
			if (slot.failSlot) {
				tpl.failMode = a[i];
				continue;
			}
			tpl.mode = a[i];
			if (tpl.kind == TemplateKind::Update && tpl.rmw != RmwKind::Cas)
				tpl.failMode = a[i];
		}
	}
	return out;
}

auto assignmentLeq(const ModeAssignment &a, const ModeAssignment &b) -> bool
{
	for (std::size_t i = 0; i < a.size(); ++i)
		if (!modeLeq(a[i], b[i]))
			return false;
	return true;
}

auto oneStepWeaker(Mode m, const std::vector<Mode> &domain) -> std::vector<Mode>
{
	std::vector<Mode> below;
	for (Mode d : domain)
		if (d != m && modeLeq(d, m))
			below.push_back(d);
	/* keep only the maximal ones */
	std::vector<Mode> out;
	for (Mode d : below)
		if (std::ranges::none_of(below, [&](Mode e) { return e != d && modeLeq(d, e); }))
			out.push_back(d);
	return out;
}

auto assignmentKey(const std::vector<BarrierSite> &sites, const ModeAssignment &a) -> std::string
{
	std::string key;
	for (std::size_t i = 0; i < sites.size(); ++i) {
		if (i != 0)
			key += ' ';
		key += sites[i].id;
		key += '=';
		key += modeName(a[i]);
	}
	return key;
}

auto countModes(const ModeAssignment &a) -> ModeCounts
{
	ModeCounts c;
	for (Mode m : a) {
		if (m == Mode::Acq)
			++c.acq;
		else if (m == Mode::Rel)
			++c.rel;
		else if (m == Mode::Sc)
			++c.sc;
	}
	return c;
}

auto parseStrategy(std::string_view s) -> std::optional<Strategy>
{
	if (s == "greedy" || s == "greedy-descend")
		return Strategy::Greedy;
	if (s == "exhaustive")
		return Strategy::Exhaustive;
	return std::nullopt;
}

namespace {

class Optimizer {
public:
	Optimizer(const Program &p, const OptimizeOptions &opts) : p_(p), opts_(opts)
	{
		res_.sites = barrierSites(p, opts.pins);
		res_.initial = initialAssignment(res_.sites);
	}

	auto run() -> OptimizeResult
	{
		if (verdict(res_.initial, "check") != VerdictKind::Success) {
			ModeAssignment allSc = res_.initial;
			for (std::size_t i = 0; i < allSc.size(); ++i)
				if (!res_.sites[i].frozen)
					allSc[i] = Mode::Sc;
			res_.status = verdict(allSc, "check") == VerdictKind::Success
					      ? OptimizeStatus::InitialFails
					      : OptimizeStatus::UnverifiableAtSc;
			return std::move(res_);
		}
		if (opts_.strategy == Strategy::Greedy)
			greedy();
		else
			exhaustive();
		for (const auto &r : res_.results)
			verdict(r, "recheck");
		return std::move(res_);
	}

private:
	auto verdict(const ModeAssignment &a, const char *action) -> VerdictKind
	{
		auto key = assignmentKey(res_.sites, a);
		auto it = cache_.find(key);
		VerdictKind v;
		if (it != cache_.end()) {
			v = it->second;
		} else {
			v = explore(applyAssignment(p_, res_.sites, a), opts_.explore).kind;
			cache_.emplace(key, v);
		}
		res_.audit.push_back({key, v, action});
		return v;
	}

	void flag(std::size_t site)
	{
		const auto &id = res_.sites[site].id;
		if (std::ranges::find(res_.flagged, id) == res_.flagged.end())
			res_.flagged.push_back(id);
	}

	auto siteOrder(const ModeAssignment &a) const -> std::vector<std::size_t>
	{
		std::vector<std::size_t> order;
		for (std::size_t i = 0; i < res_.sites.size(); ++i)
			if (!res_.sites[i].frozen)
				order.push_back(i);
		std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) {
			const auto &sx = res_.sites[x].slots.front();
			const auto &sy = res_.sites[y].slots.front();
			return std::tuple(-strength(a[x]), sx.thread, sx.statement, sx.eventCase, sx.failSlot) <
			       std::tuple(-strength(a[y]), sy.thread, sy.statement, sy.eventCase, sy.failSlot);
		});
		return order;
	}

	/* Descends one site; true if its mode changed */
	auto descend(ModeAssignment &cur, std::size_t i) -> bool
	{
		const auto &site = res_.sites[i];
		std::vector<Mode> cands;
		for (Mode m : site.domain)
			if (m != cur[i] && modeLeq(m, cur[i]))
				cands.push_back(m);
		std::ranges::stable_sort(cands, [](Mode a, Mode b) { return strength(a) > strength(b); });
		std::vector<Mode> failed;
		std::optional<Mode> best;
		for (Mode m : cands) {
			ModeAssignment probe = cur;
			probe[i] = m;
			if (std::ranges::any_of(failed, [&](Mode f) { return modeLeq(m, f); })) {
				res_.audit.push_back({assignmentKey(res_.sites, probe), VerdictKind::SafetyViolation,
						      "pruned"});
				continue;
			}
			auto v = verdict(probe, "check");
			if (v == VerdictKind::Success) {
				if (!best || strength(m) < strength(*best))
					best = m;
			} else {
				if (v == VerdictKind::Inconclusive)
					flag(i);
				failed.push_back(m);
			}
		}
		if (!best)
			return false;
		cur[i] = *best;
		return true;
	}

	void greedy()
	{
		ModeAssignment cur = res_.initial;
		for (;;) {
			bool changed = false;
			for (std::size_t i : siteOrder(cur))
				changed = descend(cur, i) || changed;
			if (changed)
				continue;
			/* Maximality probes; monotonicity is not taken for granted. */
			for (std::size_t i : siteOrder(cur)) {
				for (Mode m : oneStepWeaker(cur[i], res_.sites[i].domain)) {
					ModeAssignment probe = cur;
					probe[i] = m;
					if (verdict(probe, "probe") == VerdictKind::Success) {
						cur = probe;
						changed = true;
						break;
					}
				}
				if (changed)
					break;
			}
			if (!changed)
				break;
		}
		res_.results.push_back(cur);
	}

	void exhaustive()
	{
		std::vector<std::size_t> free;
		std::size_t total = 1;
		for (std::size_t i = 0; i < res_.sites.size(); ++i) {
			if (res_.sites[i].frozen)
				continue;
			free.push_back(i);
			total *= res_.sites[i].domain.size();
			if (total > opts_.maxAssignments)
				throw std::invalid_argument("too many assignments for the exhaustive strategy");
		}
		std::vector<ModeAssignment> ok;
		std::vector<std::size_t> digit(free.size(), 0);
		for (std::size_t n = 0; n < total; ++n) {
			ModeAssignment a = res_.initial;
			for (std::size_t j = 0; j < free.size(); ++j)
				a[free[j]] = res_.sites[free[j]].domain[digit[j]];
			auto v = verdict(a, "check");
			if (v == VerdictKind::Success)
				ok.push_back(a);
			else if (v == VerdictKind::Inconclusive)
				for (std::size_t i : free)
					flag(i);
			for (std::size_t j = free.size(); j-- > 0;) {
				if (++digit[j] < res_.sites[free[j]].domain.size())
					break;
				digit[j] = 0;
			}
		}
		for (const auto &a : ok) {
			bool minimal = std::ranges::none_of(ok, [&](const ModeAssignment &b) {
				return b != a && assignmentLeq(b, a);
			});
			if (minimal)
				res_.results.push_back(a);
		}
	}

	const Program &p_;
	const OptimizeOptions &opts_;
	OptimizeResult res_;
	std::unordered_map<std::string, VerdictKind> cache_;
};

} // namespace

auto optimize(const Program &p, const OptimizeOptions &opts) -> OptimizeResult
{
	return Optimizer(p, opts).run();
}

auto formatOptimizeReport(const OptimizeResult &r) -> std::string
{
	std::ostringstream os;
	switch (r.status) {
	case OptimizeStatus::InitialFails:
		os << "initial modes do not verify; nothing to relax\n";
		return os.str();
	case OptimizeStatus::UnverifiableAtSc:
		os << "unverifiable at sc\n";
		return os.str();
	case OptimizeStatus::Ok:
		break;
	}
	std::size_t width = 4;
	for (const auto &s : r.sites)
		width = std::max(width, s.id.size());
	os << std::left << std::setw(static_cast<int>(width)) << "site" << "  initial";
	for (std::size_t k = 0; k < r.results.size(); ++k)
		os << "  result" << (r.results.size() > 1 ? std::to_string(k + 1) : std::string(" "));
	os << '\n';
	for (std::size_t i = 0; i < r.sites.size(); ++i) {
		os << std::setw(static_cast<int>(width)) << r.sites[i].id << "  " << std::setw(7)
		   << modeName(r.initial[i]);
		for (const auto &a : r.results)
			os << "  " << std::setw(7) << modeName(a[i]);
		if (r.sites[i].frozen)
			os << "  (pinned)";
		os << '\n';
	}
	os << '\n' << std::setw(12) << "" << std::right << std::setw(5) << "acq" << std::setw(5) << "rel"
	   << std::setw(5) << "sc" << '\n';
	auto row = [&](const std::string &name, const ModeAssignment &a) {
		auto c = countModes(a);
		os << std::left << std::setw(12) << name << std::right << std::setw(5) << c.acq << std::setw(5)
		   << c.rel << std::setw(5) << c.sc << '\n';
	};
	row("initial", r.initial);
	for (std::size_t k = 0; k < r.results.size(); ++k)
		row("result" + (r.results.size() > 1 ? std::to_string(k + 1) : std::string()), r.results[k]);
	if (!r.flagged.empty()) {
		os << "\ncap reached while probing:";
		for (const auto &f : r.flagged)
			os << ' ' << f;
		os << '\n';
	}
	os << "\nchecked assignments: " << r.audit.size() << '\n';
	return os.str();
}

} // namespace amc
