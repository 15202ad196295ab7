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

#include "amc/report.hpp"

#include <json.hpp>

#include <sstream>

namespace amc {

auto parseOutputFormat(std::string_view s) -> std::optional<OutputFormat>
{
	if (s == "text")
		return OutputFormat::Text;
	if (s == "structured")
		return OutputFormat::Structured;
	if (s == "graph-file")
		return OutputFormat::GraphFile;
	return std::nullopt;
}

auto describeGraph(const ExecutionGraph &g, const GraphNames &names) -> std::string
{
	std::ostringstream os;
	auto ref = [&](EventId id) {
		return id.isInit() ? "init(" + names.location(static_cast<LocId>(id.index)) + ")"
				   : names.thread(id.thread) + "#" + std::to_string(id.index);
	};
	for (std::size_t t = 0; t < g.numThreads(); ++t) {
		os << "  " << names.thread(static_cast<int>(t)) << ":\n";
		for (std::size_t i = 0; i < g.threadSize(t); ++i) {
			EventId id{static_cast<int>(t), static_cast<int>(i)};
			const auto &l = g.label(id);
			os << "    #" << i << "  " << eventCaption(g, id, names);
			if (l.isReadType()) {
				if (l.rf == RfState::From)
					os << "  rf <- " << ref(l.rfSource);
				else
					os << "  rf <- ⊥";
			}
			os << '\n';
		}
	}
	for (LocId l = 0; l < g.numLocations(); ++l) {
		os << "  mo " << names.location(l) << ":";
		for (std::size_t i = 0; i < g.mo(l).size(); ++i)
			os << (i == 0 ? " " : " -> ") << ref(g.mo(l)[i]);
		os << '\n';
	}
	return os.str();
}

namespace {

auto statsJson(const SearchStats &s) -> nlohmann::ordered_json
{
	return {{"popped", s.popped},
		{"explored", s.explored},
		{"filtered_inconsistent", s.filteredInconsistent},
		{"filtered_wasteful", s.filteredWasteful},
		{"duplicates", s.duplicatesSkipped},
		{"max_stack", s.maxStackDepth},
		{"complete", s.completeGraphs},
		{"depth_pruned", s.depthPruned},
		{"write_bound_violations", s.writeBoundViolations},
		{"iteration_bound_violations", s.iterationBoundViolations}};
}

auto headline(const Verdict &v) -> std::string
{
	switch (v.kind) {
	case VerdictKind::Success:
		return "no safety or await-termination violation";
	case VerdictKind::SafetyViolation:
		return "assertion failure reachable";
	case VerdictKind::ATViolation:
		return "an await can spin forever";
	case VerdictKind::FragmentError:
		return "program violates the bounded-effect condition";
	case VerdictKind::Inconclusive:
		return v.note;
	}
	return {};
}

auto fragmentLines(const Program &p, const Verdict &v) -> std::vector<std::string>
{
	std::vector<std::string> out;
	for (const auto &f : v.fragment) {
		std::ostringstream os;
		os << p.threads[f.thread].name << ": iteration " << f.q << ", step " << f.step;
		if (f.target)
			os << " -> step " << *f.target;
		os << ": " << f.what;
		out.push_back(os.str());
	}
	return out;
}

} // namespace

auto formatVerdict(const Program &p, const Verdict &v, ModelKind m, OutputFormat f) -> std::string
{
	const auto names = namesOf(p);
	if (f == OutputFormat::GraphFile)
		return v.graph ? toDot(*v.graph, names) : std::string("digraph execution {\n}\n");
	if (f == OutputFormat::Structured) {
		nlohmann::ordered_json j;
		j["verdict"] = std::string(verdictName(v.kind));
		j["model"] = std::string(modelName(m));
		j["stats"] = statsJson(v.stats);
		if (!v.note.empty())
			j["note"] = v.note;
		if (v.event && v.graph)
			j["event"] = {{"thread", names.thread(v.event->thread)},
				      {"index", v.event->index},
				      {"caption", eventCaption(*v.graph, *v.event, names)}};
		if (v.graph)
			j["graph"] = dumpGraph(*v.graph, names);
		if (!v.fragment.empty())
			j["fragment"] = fragmentLines(p, v);
		if (v.violations.size() > 1) {
			auto arr = nlohmann::ordered_json::array();
			for (const auto &c : v.violations)
				arr.push_back({{"kind", std::string(verdictName(c.kind))},
					       {"graph", dumpGraph(c.graph, names)}});
			j["violations"] = arr;
		}
		return j.dump(2) + "\n";
	}
	std::ostringstream os;
	os << "verdict: " << verdictName(v.kind) << " (" << modelName(m) << ")\n";
	os << "  " << headline(v) << '\n';
	os << "graphs: " << v.stats.explored << " explored, " << v.stats.popped << " popped, "
	   << v.stats.filteredInconsistent << " inconsistent, " << v.stats.filteredWasteful << " wasteful, "
	   << v.stats.duplicatesSkipped << " duplicates, " << v.stats.completeGraphs << " complete\n";
	for (const auto &line : fragmentLines(p, v))
		os << "  " << line << '\n';
	if (v.graph) {
		os << "counterexample";
		if (v.event)
			os << " at " << eventCaption(*v.graph, *v.event, names);
		os << ":\n" << describeGraph(*v.graph, names);
	}
	if (v.violations.size() > 1)
		os << "distinct counterexamples: " << v.violations.size() << '\n';
	return os.str();
}

} // namespace amc
