#include "amc/corpus.hpp"
#include "amc/surface.hpp"

#include <doctest.h>

using namespace amc;

namespace {

auto onlyThread(const std::string &src) -> Thread { return parseSurface(src).threads.at(0); }

auto stepAt(const Thread &t, std::size_t k) -> const Step & { return std::get<Step>(t.body.at(k)); }

auto hasMessage(const std::vector<Diagnostic> &ds, const std::string &m) -> bool
{
	for (const auto &d : ds)
		if (d.message == m)
			return true;
	return false;
}

auto readStep(LocId loc, RegId into) -> Step
{
	Step s;
	EventTemplate tpl;
	tpl.kind = TemplateKind::Read;
	tpl.loc = loc;
	s.event.cases.push_back({Expr::constant(1), tpl});
	s.update.cases.push_back({Expr::constant(1), {{into, Expr::readResult()}}});
	return s;
}

auto oneThread(std::vector<Statement> body) -> Program
{
	Program p;
	p.locations = {"x"};
	p.sharedInit = {0};
	Thread t;
	t.name = "T";
	t.registers = {"r"};
	t.initialRegisters = {0};
	t.body = std::move(body);
	p.threads.push_back(t);
	return p;
}

} // namespace

TEST_CASE("a plain load becomes one read step assigning the read result")
{
	auto t = onlyThread("shared y = 0; thread T { regs r1 = 0; r1 = y; }");
	REQUIRE(t.body.size() == 1);
	const auto &s = stepAt(t, 0);
	REQUIRE(s.event.cases.size() == 1);
	CHECK(s.event.cases[0].guard.isTrue());
	CHECK(s.event.cases[0].tpl.kind == TemplateKind::Read);
	CHECK(s.event.cases[0].tpl.mode == Mode::Rlx);
	REQUIRE(s.update.cases.size() == 1);
	REQUIRE(s.update.cases[0].assigns.size() == 1);
	CHECK(s.update.cases[0].assigns[0].reg == *t.findRegister("r1"));
	CHECK(s.update.cases[0].assigns[0].value == Expr::readResult());
}

TEST_CASE("a constant-bound for loop unrolls into one write per iteration")
{
	auto t = onlyThread("shared x = 0; thread T { regs r1 = 0; for (r1 = 0; r1 < 3; r1++) { x = r1; } }");
	auto r1 = *t.findRegister("r1");
	REQUIRE(t.body.size() == 3);
	std::vector<Value> regs{0};
	for (std::size_t k = 0; k < 3; ++k) {
		const auto &s = stepAt(t, k);
		const auto *tpl = s.event.select(regs);
		REQUIRE(tpl != nullptr);
		CHECK(tpl->kind == TemplateKind::Write);
		CHECK(tpl->value.eval(regs) == static_cast<Value>(k));
		const auto *u = s.update.select(regs);
		REQUIRE(u != nullptr);
		REQUIRE(u->assigns.size() == 1);
		CHECK(u->assigns[0].reg == r1);
		regs[r1] = u->assigns[0].value.eval(regs);
	}
	CHECK(regs[r1] == 3);
}

TEST_CASE("do-await-while becomes the body, the condition read and an await")
{
	auto t = onlyThread("shared x = 0, y = 0; thread T { regs r1 = 0; do { r1 = y; } await_while(x == 1); }");
	REQUIRE(t.body.size() == 3);
	auto p = parseSurface("shared x = 0, y = 0; thread T { regs r1 = 0; do { r1 = y; } await_while(x == 1); }");
	CHECK(stepAt(t, 0).event.cases[0].tpl.loc == *p.findLocation("y"));
	const auto &condRead = stepAt(t, 1);
	CHECK(condRead.event.cases[0].tpl.kind == TemplateKind::Read);
	CHECK(condRead.event.cases[0].tpl.loc == *p.findLocation("x"));
	auto r2 = condRead.update.cases[0].assigns.at(0).reg;
	CHECK(r2 != *t.findRegister("r1"));
	const auto &aw = std::get<Await>(t.body[2]);
	CHECK(aw.jump == 2);
	std::vector<Value> regs(t.registers.size(), 0);
	regs[r2] = 1;
	CHECK(aw.cond.eval(regs) == 1);
	regs[r2] = 0;
	CHECK(aw.cond.eval(regs) == 0);
}

TEST_CASE("if/else turns into guarded cases of one step")
{
	auto t = onlyThread(
		"shared x = 0; thread T { regs r = 0; r = x; if (r == 0) { store_rel(x, 1); } else { fence_sc; } }");
	REQUIRE(t.body.size() == 2);
	const auto &s = stepAt(t, 1);
	std::vector<Value> regs{0};
	CHECK(s.event.select(regs)->kind == TemplateKind::Write);
	CHECK(s.event.select(regs)->mode == Mode::Rel);
	regs[0] = 7;
	CHECK(s.event.select(regs)->kind == TemplateKind::Fence);
	CHECK(s.event.select(regs)->mode == Mode::Sc);
}

TEST_CASE("assert lowers to a step that emits an error when the condition fails")
{
	auto t = onlyThread("shared x = 0; thread T { regs r = 0; r = x; assert(r == 1); }");
	const auto &s = stepAt(t, 1);
	std::vector<Value> regs{0};
	CHECK(s.event.select(regs)->kind == TemplateKind::Error);
	regs[0] = 1;
	CHECK(s.event.select(regs)->kind == TemplateKind::Nop);
}

TEST_CASE("surface errors are reported with a position")
{
	CHECK_THROWS_AS(parseSurface("shared x = 0; thread T { while (x) { } }"), ParseError);
	CHECK_THROWS_AS(parseSurface("shared x = 0; thread T { regs r = 0; for (r = 0; r < x; r++) { } }"),
			ParseError);
	CHECK_THROWS_AS(parseSurface("shared x = 0; thread T { regs r = 0; do { do { r = x; } "
				     "await_while(r == 0); } await_while(r == 1); }"),
			ParseError);
	CHECK_THROWS_AS(parseSurface("shared x = 0; thread T { store_acq(x, 1); }"), ParseError);
	CHECK_THROWS_AS(parseSurface("shared x = 0; thread T { regs r = 0; r = load_rel(x); }"), ParseError);
	try {
		parseSurface("shared x = 0;\nthread T {\n  bogus;\n}");
		FAIL("expected a parse error");
	} catch (const ParseError &e) {
		CHECK(e.line == 3);
	}
}

TEST_CASE("validate flags an await that jumps before the start")
{
	Await aw;
	aw.jump = 5;
	aw.cond = Expr::reg(0);
	auto p = oneThread({readStep(0, 0), readStep(0, 0), aw});
	auto ds = validate(p);
	REQUIRE(ds.size() >= 1);
	CHECK(hasMessage(ds, "await jumps before program start"));
	CHECK(ds[0].thread == "T");
	CHECK(ds[0].index == 2);
}

TEST_CASE("validate flags nested awaits")
{
	Await inner{1, Expr::reg(0)};
	Await outer{3, Expr::reg(0)};
	auto p = oneThread({readStep(0, 0), readStep(0, 0), inner, outer});
	CHECK(hasMessage(validate(p), "nested await"));
}

TEST_CASE("validate accepts the lowered partial MCS lock and every corpus program")
{
	CHECK(validate(findCase("mcs-partial")->program()).empty());
	for (const auto &c : builtinCases()) {
		CAPTURE(c.name);
		CHECK(validate(c.program()).empty());
	}
}

TEST_CASE("validate flags undeclared locations and missing initial registers")
{
	auto p = oneThread({readStep(3, 0)});
	CHECK(hasMessage(validate(p), "access to an undeclared location"));
	p = oneThread({readStep(0, 0)});
	p.threads[0].initialRegisters.clear();
	CHECK(hasMessage(validate(p), "initial register state is incomplete"));
}

TEST_CASE("printing and re-parsing gives an equal program")
{
	for (const auto &c : builtinCases()) {
		CAPTURE(c.name);
		auto p = c.program();
		auto text = printCore(p);
		auto back = parseProgram(text);
		CHECK(back == p);
		CHECK(printCore(back) == text);
	}
}

TEST_CASE("lowering is deterministic")
{
	for (const auto &c : builtinCases())
		CHECK(parseSurface(c.source) == parseSurface(c.source));
}

TEST_CASE("the mode lattice orders rlx below rel and acq, both below sc")
{
	CHECK(modeLeq(Mode::Rlx, Mode::Rel));
	CHECK(modeLeq(Mode::Rlx, Mode::Acq));
	CHECK(modeLeq(Mode::Rel, Mode::Sc));
	CHECK(modeLeq(Mode::Acq, Mode::Sc));
	CHECK_FALSE(modeLeq(Mode::Rel, Mode::Acq));
	CHECK_FALSE(modeLeq(Mode::Acq, Mode::Rel));
	CHECK_FALSE(modeLeq(Mode::Sc, Mode::Rlx));
}

TEST_CASE("rmw results")
{
	CHECK(rmwResult(RmwKind::Xchg, 3, 9, 0) == 9);
	CHECK(rmwResult(RmwKind::FetchAdd, 3, 2, 0) == 5);
	CHECK(rmwResult(RmwKind::FetchOr, 4, 1, 0) == 5);
	CHECK(rmwResult(RmwKind::Cas, 0, 1, 0) == 1);
	CHECK_FALSE(rmwResult(RmwKind::Cas, 2, 1, 0).has_value());
}
