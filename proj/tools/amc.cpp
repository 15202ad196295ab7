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

#include "amc/corpus.hpp"
#include "amc/optimizer.hpp"
#include "amc/report.hpp"
#include "amc/surface.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace amc;

enum Exit : int { Ok = 0, Violation = 1, Usage = 2, Inconclusive = 3 };

struct Common {
	std::string model = "ramm";
	std::uint64_t maxGraphs = 1000000;
	double maxSeconds = 300.0;
	std::string format = "text";
};

void envDefaults(Common &c)
{
	if (const char *g = std::getenv("AMC_MAX_GRAPHS"))
		c.maxGraphs = std::strtoull(g, nullptr, 10);
	if (const char *s = std::getenv("AMC_MAX_SECONDS"))
		c.maxSeconds = std::strtod(s, nullptr);
}

void addCaps(CLI::App *cmd, Common &c)
{
	cmd->add_option("--max-graphs", c.maxGraphs, "Stop after this many popped graphs")
		->check(CLI::PositiveNumber);
	cmd->add_option("--max-seconds", c.maxSeconds, "Wall-clock limit per search")
		->check(CLI::PositiveNumber);
}

auto exploreOptions(const Common &c, ModelKind m) -> ExploreOptions
{
	ExploreOptions o;
	o.model = m;
	o.maxGraphs = c.maxGraphs;
	o.maxSeconds = c.maxSeconds;
	return o;
}

auto exitFor(VerdictKind k) -> int
{
	switch (k) {
	case VerdictKind::Success:
		return Ok;
	case VerdictKind::SafetyViolation:
	case VerdictKind::ATViolation:
		return Violation;
	case VerdictKind::FragmentError:
		return Usage;
	case VerdictKind::Inconclusive:
		return Inconclusive;
	}
	return Usage;
}

auto readFile(const std::string &path) -> std::string
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot read " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

auto loadChecked(const std::string &path) -> Program
{
	Program p = loadProgram(path);
	auto diags = validate(p);
	if (!diags.empty()) {
		std::ostringstream os;
		for (const auto &d : diags)
			os << d.message << '\n';
		throw std::invalid_argument(os.str());
	}
	return p;
}

auto runCheck(const std::string &path, const Common &c, bool all, const std::string &saveGraph) -> int
{
	Program p = loadChecked(path);
	auto model = *parseModel(c.model);
	auto opts = exploreOptions(c, model);
	opts.allViolations = all;
	Verdict v = explore(p, opts);
	std::cout << formatVerdict(p, v, model, *parseOutputFormat(c.format));
	if (!saveGraph.empty() && v.graph) {
		std::ofstream out(saveGraph);
		out << dumpGraph(*v.graph, namesOf(p));
	}
	return exitFor(v.kind);
}

auto runCorpus(const Common &c, const std::string &dir, const std::string &writeDir) -> int
{
	if (!writeDir.empty()) {
		std::filesystem::create_directories(writeDir);
		for (const auto &cs : builtinCases())
			std::ofstream(std::filesystem::path(writeDir) / cs.file) << cs.source;
		std::ofstream(std::filesystem::path(writeDir) / "index.txt") << corpusIndex();
		std::cout << "wrote " << builtinCases().size() << " cases to " << writeDir << '\n';
		return Ok;
	}
	std::vector<ModelKind> models;
	if (c.model == "both")
		models = {ModelKind::Sc, ModelKind::Ramm};
	else
		models = {*parseModel(c.model)};
	int failures = 0;
	std::cout << std::left << std::setw(20) << "case" << std::setw(6) << "model" << std::setw(18)
		  << "expected" << std::setw(18) << "got" << "result\n";
	for (const auto &cs : builtinCases()) {
		Program p = dir.empty() ? cs.program()
					: loadProgram((std::filesystem::path(dir) / cs.file).string());
		for (auto m : models) {
			auto v = explore(p, exploreOptions(c, m));
			auto expect = cs.expected(m);
			bool ok = !expect || *expect == v.kind;
			failures += ok ? 0 : 1;
			std::cout << std::setw(20) << cs.name << std::setw(6) << modelName(m) << std::setw(18)
				  << (expect ? verdictName(*expect) : "-") << std::setw(18) << verdictName(v.kind)
				  << (ok ? "ok" : "MISMATCH") << '\n';
		}
	}
	std::cout << (failures == 0 ? "all cases match\n" : std::to_string(failures) + " mismatch(es)\n");
	return failures == 0 ? Ok : Violation;
}

auto runOptimize(const std::string &path, const Common &c, const std::string &strategy,
		 const std::vector<std::string> &pins) -> int
{
	Program p = loadChecked(path);
	OptimizeOptions o;
	o.strategy = *parseStrategy(strategy);
	o.explore = exploreOptions(c, *parseModel(c.model));
	o.pins = pins;
	auto r = optimize(p, o);
	if (c.format == "structured") {
		nlohmann::ordered_json j;
		j["status"] = r.status == OptimizeStatus::Ok             ? "ok"
			      : r.status == OptimizeStatus::InitialFails ? "initial-fails"
									 : "unverifiable-at-sc";
		auto results = nlohmann::ordered_json::array();
		for (const auto &a : r.results) {
			nlohmann::ordered_json modes;
			for (std::size_t i = 0; i < r.sites.size(); ++i)
				modes[r.sites[i].id] = std::string(modeName(a[i]));
			auto cnt = countModes(a);
			results.push_back({{"modes", modes}, {"acq", cnt.acq}, {"rel", cnt.rel}, {"sc", cnt.sc}});
		}
		j["results"] = results;
		auto audit = nlohmann::ordered_json::array();
		for (const auto &e : r.audit)
			audit.push_back({{"assignment", e.key},
					 {"verdict", std::string(verdictName(e.verdict))},
					 {"action", e.action}});
		j["audit"] = audit;
		j["flagged"] = r.flagged;
		std::cout << j.dump(2) << '\n';
	} else {
		std::cout << formatOptimizeReport(r);
	}
	if (r.status != OptimizeStatus::Ok)
		return Violation;
	return r.flagged.empty() ? Ok : Inconclusive;
}

auto runDumpGraph(const std::string &path, const std::string &format) -> int
{
	std::string text = readFile(path);
	auto first = text.find_first_not_of(" \t\r\n");
	if (first != std::string::npos && text[first] == '{') {
		auto j = nlohmann::json::parse(text);
		if (!j.contains("graph"))
			throw std::invalid_argument(path + " holds no graph");
		text = j["graph"].get<std::string>();
	}
	auto [g, names] = parseGraphDump(text);
	if (format == "text")
		std::cout << describeGraph(g, names);
	else
		std::cout << toDot(g, names);
	return Ok;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"amc: stateless model checking of await loops under weak memory"};
	app.require_subcommand(1);
	Common common;
	envDefaults(common);
	const std::vector<std::string> formats = {"text", "structured", "graph-file"};

	std::string input;
	bool all = false;
	std::string saveGraph;
	auto *check = app.add_subcommand("check", "Explore a program and report its verdict");
	check->add_option("file", input, "Program file")->required();
	check->add_option("--model", common.model, "Memory model")
		->check(CLI::IsMember({"sc", "ramm"}));
	check->add_flag("--all-violations", all, "Collect every distinct counterexample");
	check->add_option("--format", common.format, "Output format")->check(CLI::IsMember(formats));
	check->add_option("--save-graph", saveGraph, "Write the counterexample as a graph dump");
	addCaps(check, common);

	std::string dir;
	std::string writeDir;
	auto *corpus = app.add_subcommand("corpus", "Run the built-in cases against their expected verdicts");
	corpus->add_option("--model", common.model, "sc, ramm or both")
		->check(CLI::IsMember({"sc", "ramm", "both"}));
	corpus->add_option("--dir", dir, "Read the case files from this directory");
	corpus->add_option("--write", writeDir, "Write the case files and index, then exit");
	addCaps(corpus, common);

	std::string strategy = "greedy";
	std::vector<std::string> pins;
	auto *opt = app.add_subcommand("optimize", "Relax barrier modes while the program verifies");
	opt->add_option("file", input, "Program file")->required();
	opt->add_option("--model", common.model, "Memory model")->check(CLI::IsMember({"sc", "ramm"}));
	opt->add_option("--strategy", strategy, "greedy or exhaustive")
		->check(CLI::IsMember({"greedy", "greedy-descend", "exhaustive"}));
	opt->add_option("--pin", pins, "Keep this site's mode")->take_all();
	opt->add_option("--format", common.format, "text or structured")
		->check(CLI::IsMember({"text", "structured"}));
	addCaps(opt, common);

	std::string graphFormat = "graph-file";
	auto *dump = app.add_subcommand("dump-graph", "Render a stored counterexample");
	dump->add_option("file", input, "Graph dump or structured check output")->required();
	dump->add_option("--format", graphFormat, "graph-file (Graphviz) or text")
		->check(CLI::IsMember({"graph-file", "text"}));

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return Usage;
	}
	if (corpus->parsed() && common.model == "ramm" && corpus->count("--model") == 0)
		common.model = "both";

	try {
		if (check->parsed())
			return runCheck(input, common, all, saveGraph);
		if (corpus->parsed())
			return runCorpus(common, dir, writeDir);
		if (opt->parsed())
			return runOptimize(input, common, strategy, pins);
		return runDumpGraph(input, graphFormat);
	} catch (const ParseError &e) {
		std::cerr << input << ":" << e.what() << '\n';
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
	}
	return Usage;
}
