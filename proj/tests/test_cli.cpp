#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
	int code = -1;
	std::string out;
};

auto run(const std::string &args) -> Run
{
	std::string cmd = std::string(AMC_BINARY) + " " + args + " 2>&1";
	Run r;
	FILE *f = popen(cmd.c_str(), "r");
	REQUIRE(f != nullptr);
	std::array<char, 4096> buf{};
	std::size_t n = 0;
	while ((n = fread(buf.data(), 1, buf.size(), f)) > 0)
		r.out.append(buf.data(), n);
	int st = pclose(f);
	r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
	return r;
}

auto casePath(const std::string &file) -> std::string { return std::string(AMC_SOURCE_DIR) + "/cases/" + file; }

} // namespace

TEST_CASE("check exits 0 on success")
{
	auto r = run("check " + casePath("mcs_partial.toy") + " --model ramm");
	CHECK(r.code == 0);
}

TEST_CASE("check exits 1 and prints the AT counterexample")
{
	auto r = run("check " + casePath("dpdk_mcs_bug.toy") + " --model ramm");
	CHECK(r.code == 1);
	CHECK(r.out.find("at-violation") != std::string::npos);
	CHECK(r.out.find("⚡") != std::string::npos);
}

TEST_CASE("check exits 2 on a missing file or bad arguments")
{
	CHECK(run("check missing.toy").code == 2);
	CHECK(run("check " + casePath("sb.toy") + " --model tso").code == 2);
	CHECK(run("frobnicate").code == 2);
}

TEST_CASE("check exits 3 when a cap is hit")
{
	CHECK(run("check " + casePath("ttas.toy") + " --max-graphs 2").code == 3);
}

TEST_CASE("structured output is byte-identical across runs")
{
	auto a = run("check " + casePath("huawei_mcs_bug.toy") + " --format structured");
	auto b = run("check " + casePath("huawei_mcs_bug.toy") + " --format structured");
	CHECK(a.code == 1);
	CHECK(a.out == b.out);
	CHECK(a.out.find("\"verdict\"") != std::string::npos);
}

TEST_CASE("a saved counterexample can be rendered again")
{
	std::string path = std::string(AMC_BINARY_DIR) + "/cli_test_graph.txt";
	auto r = run("check " + casePath("sb.toy") + " --save-graph " + path);
	CHECK(r.code == 1);
	auto d = run("dump-graph " + path);
	CHECK(d.code == 0);
	CHECK(d.out.find("digraph") != std::string::npos);
	std::remove(path.c_str());
}

TEST_CASE("optimize and corpus subcommands")
{
	auto o = run("optimize " + casePath("mcs_partial_sc.toy") + " --strategy exhaustive");
	CHECK(o.code == 0);
	CHECK(o.out.find("wq") != std::string::npos);
	auto c = run("corpus --model ramm --dir " + std::string(AMC_SOURCE_DIR) + "/cases");
	CHECK(c.code == 0);
}
