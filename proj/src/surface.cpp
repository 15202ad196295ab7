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

#include "amc/surface.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace amc {

ParseError::ParseError(std::size_t l, std::size_t c, const std::string &msg)
	: std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l),
	  column(c)
{
}

namespace {

/* ---------------------------------------------------------------- lexer */

enum class Tok : std::uint8_t { Ident, Number, Sym, End };

struct Token {
	Tok kind = Tok::End;
	std::string text;
	Value num = 0;
	std::size_t line = 1;
	std::size_t col = 1;
};

auto isIdentStart(char c) -> bool
{
	return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

auto isIdentChar(char c) -> bool
{
	return isIdentStart(c) || (c >= '0' && c <= '9') || c == '.';
}

auto tokenize(std::string_view s) -> std::vector<Token>
{
	static const char *const twoChar[] = {"->", ":=", "==", "!=", "<=", ">=", "&&", "||", "++", "$v"};
	std::vector<Token> out;
	std::size_t line = 1;
	std::size_t col = 1;
	std::size_t i = 0;
	auto advance = [&](std::size_t n) {
		for (std::size_t k = 0; k < n; ++k, ++i) {
			if (s[i] == '\n') {
				++line;
				col = 1;
			} else {
				++col;
			}
		}
	};
	while (i < s.size()) {
		const char c = s[i];
		if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
			advance(1);
			continue;
		}
		if (s.substr(i, 2) == "//" || c == '#') {
			while (i < s.size() && s[i] != '\n')
				advance(1);
			continue;
		}
		if (s.substr(i, 2) == "/*") {
			auto end = s.find("*/", i + 2);
			if (end == std::string_view::npos)
				throw ParseError(line, col, "unterminated comment");
			advance(end + 2 - i);
			continue;
		}
		Token t;
		t.line = line;
		t.col = col;
		if (isIdentStart(c)) {
			std::size_t j = i;
			while (j < s.size() && isIdentChar(s[j]))
				++j;
			t.kind = Tok::Ident;
			t.text = std::string(s.substr(i, j - i));
			advance(j - i);
			out.push_back(std::move(t));
			continue;
		}
		if (c >= '0' && c <= '9') {
			std::size_t j = i;
			while (j < s.size() && s[j] >= '0' && s[j] <= '9')
				++j;
			t.kind = Tok::Number;
			t.text = std::string(s.substr(i, j - i));
			auto [p, ec] = std::from_chars(s.data() + i, s.data() + j, t.num);
			if (ec != std::errc{})
				throw ParseError(line, col, "integer literal out of range");
			advance(j - i);
			out.push_back(std::move(t));
			continue;
		}
		t.kind = Tok::Sym;
		for (const char *two : twoChar) {
			if (s.substr(i, 2) == two) {
				t.text = two;
				break;
			}
		}
		if (t.text.empty()) {
			if (std::string_view("{}();,=<>+-*!@|").find(c) == std::string_view::npos)
				throw ParseError(line, col, std::string("unexpected character '") + c + "'");
			t.text = std::string(1, c);
		}
		advance(t.text.size());
		out.push_back(std::move(t));
	}
	Token end;
	end.line = line;
	end.col = col;
	out.push_back(end);
	return out;
}

class Cursor {
public:
	explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

	auto peek(std::size_t ahead = 0) const -> const Token &
	{
		return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
	}
	auto next() -> const Token &
	{
		const Token &t = peek();
		if (pos_ < toks_.size() - 1)
			++pos_;
		return t;
	}
	auto isSym(std::string_view s, std::size_t ahead = 0) const -> bool
	{
		return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
	}
	auto isWord(std::string_view s) const -> bool
	{
		return peek().kind == Tok::Ident && peek().text == s;
	}
	auto accept(std::string_view s) -> bool
	{
		if (!isSym(s))
			return false;
		next();
		return true;
	}
	void expect(std::string_view s)
	{
		if (!accept(s))
			fail("expected '" + std::string(s) + "'");
	}
	auto ident(std::string_view what = "identifier") -> std::string
	{
		if (peek().kind != Tok::Ident)
			fail("expected " + std::string(what));
		return next().text;
	}
	auto number() -> Value
	{
		bool neg = accept("-");
		if (peek().kind != Tok::Number)
			fail("expected integer");
		Value v = next().num;
		return neg ? -v : v;
	}
	[[noreturn]] void fail(const std::string &msg) const
	{
		const auto &t = peek();
		throw ParseError(t.line, t.col,
				 msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
	}

private:
	std::vector<Token> toks_;
	std::size_t pos_ = 0;
};

/* ------------------------------------------------------- atomic op names */

enum class AtomicOp : std::uint8_t { Load, Store, Xchg, Faa, Or, Cas, Fence };

struct AtomicName {
	AtomicOp op = AtomicOp::Load;
	Mode mode = Mode::Rlx;
	std::optional<Mode> failMode;
};

/* load_acq, cas_rel_rlx, xchg_acq_rel (the combined mode is treated as sc) */
auto parseAtomicName(std::string_view s) -> std::optional<AtomicName>
{
	static const std::pair<std::string_view, AtomicOp> ops[] = {
		{"load_", AtomicOp::Load}, {"store_", AtomicOp::Store}, {"xchg_", AtomicOp::Xchg},
		{"faa_", AtomicOp::Faa},   {"or_", AtomicOp::Or},       {"cas_", AtomicOp::Cas},
		{"fence_", AtomicOp::Fence},
	};
	for (const auto &[prefix, op] : ops) {
		if (!s.starts_with(prefix))
			continue;
		auto rest = s.substr(prefix.size());
		AtomicName n;
		n.op = op;
		if (rest.starts_with("acq_rel")) {
			n.mode = Mode::Sc;
			rest.remove_prefix(7);
		} else {
			auto us = rest.find('_');
			auto m = parseMode(rest.substr(0, us));
			if (!m)
				return std::nullopt;
			n.mode = *m;
			rest = us == std::string_view::npos ? std::string_view{} : rest.substr(us);
		}
		if (!rest.empty()) {
			if (op != AtomicOp::Cas || rest.front() != '_')
				return std::nullopt;
			auto f = parseMode(rest.substr(1));
			if (!f)
				return std::nullopt;
			n.failMode = f;
		}
		return n;
	}
	return std::nullopt;
}

auto defaultFailMode(Mode m) -> Mode
{
	switch (m) {
	case Mode::Rel:
		return Mode::Rlx;
	default:
		return m;
	}
}

/* ----------------------------------------------------------- surface AST */

struct SExpr {
	enum class K : std::uint8_t { Num, Name, Not, Neg, Bin, Call } k = K::Num;
	Value num = 0;
	/* Name, or the callee of a Call, or the operator of a Bin */
	std::string name;
	std::vector<std::unique_ptr<SExpr>> args;
	std::string site;
	std::size_t line = 0;
	std::size_t col = 0;
};
using SExprP = std::unique_ptr<SExpr>;

struct SStmt {
	enum class K : std::uint8_t { Assign, Call, Assert, If, For, Await } k = K::Assign;
	std::string name;
	SExprP expr;
	SExprP from;
	SExprP to;
	bool inclusive = false;
	std::vector<SStmt> body;
	std::vector<SStmt> orelse;
	std::string site;
	std::size_t line = 0;
	std::size_t col = 0;
};

struct SThread {
	std::string name;
	std::vector<std::pair<std::string, Value>> regs;
	std::vector<SStmt> body;
	std::size_t line = 0;
	std::size_t col = 0;
};

struct SProgram {
	std::vector<std::pair<std::string, Value>> shared;
	std::vector<std::string> pins;
	std::vector<SThread> threads;
};

/* -------------------------------------------------------- surface parser */

class SurfaceParser {
public:
	explicit SurfaceParser(std::string_view text) : c_(tokenize(text)) {}

	auto parse() -> SProgram
	{
		SProgram p;
		while (c_.peek().kind != Tok::End) {
			if (c_.isWord("shared")) {
				c_.next();
				do {
					auto n = c_.ident("location name");
					c_.expect("=");
					p.shared.emplace_back(n, c_.number());
				} while (c_.accept(","));
				c_.expect(";");
			} else if (c_.isWord("pin")) {
				c_.next();
				do
					p.pins.push_back(c_.ident("site name"));
				while (c_.accept(","));
				c_.expect(";");
			} else if (c_.isWord("thread")) {
				p.threads.push_back(thread());
			} else {
				c_.fail("expected 'shared', 'pin' or 'thread'");
			}
		}
		return p;
	}

private:
	auto thread() -> SThread
	{
		SThread t;
		t.line = c_.peek().line;
		t.col = c_.peek().col;
		c_.next();
		t.name = c_.ident("thread name");
		c_.expect("{");
		while (c_.isWord("regs")) {
			c_.next();
			do {
				auto n = c_.ident("register name");
				if (!c_.accept("="))
					c_.fail("registers need an initial value");
				t.regs.emplace_back(n, c_.number());
			} while (c_.accept(","));
			c_.expect(";");
		}
		while (!c_.isSym("}")) {
			if (c_.peek().kind == Tok::End)
				c_.fail("unterminated thread");
			t.body.push_back(statement());
		}
		c_.expect("}");
		return t;
	}

	auto block() -> std::vector<SStmt>
	{
		std::vector<SStmt> out;
		if (!c_.accept("{")) {
			out.push_back(statement());
			return out;
		}
		while (!c_.accept("}")) {
			if (c_.peek().kind == Tok::End)
				c_.fail("unterminated block");
			out.push_back(statement());
		}
		return out;
	}

	auto statement() -> SStmt
	{
		SStmt s;
		s.line = c_.peek().line;
		s.col = c_.peek().col;
		if (c_.peek().kind != Tok::Ident)
			c_.fail("expected a statement");
		const std::string word = c_.peek().text;
		if (word == "while" || word == "goto")
			c_.fail("unbounded loops are not supported; use do { } await_while");
		if (word == "if") {
			c_.next();
			s.k = SStmt::K::If;
			c_.expect("(");
			s.expr = expr();
			c_.expect(")");
			s.body = block();
			if (c_.isWord("else")) {
				c_.next();
				s.orelse = block();
			}
			return s;
		}
		if (word == "for") {
			c_.next();
			s.k = SStmt::K::For;
			c_.expect("(");
			s.name = c_.ident("loop register");
			c_.expect("=");
			s.from = expr();
			c_.expect(";");
			if (c_.ident("loop register") != s.name)
				c_.fail("loop condition must test the loop register");
			if (c_.accept("<="))
				s.inclusive = true;
			else
				c_.expect("<");
			s.to = expr();
			c_.expect(";");
			if (c_.ident("loop register") != s.name)
				c_.fail("loop increment must step the loop register");
			c_.expect("++");
			c_.expect(")");
			s.body = block();
			return s;
		}
		if (word == "do") {
			c_.next();
			s.k = SStmt::K::Await;
			s.body = block();
			if (!c_.isWord("await_while"))
				c_.fail("expected 'await_while' after do block");
			c_.next();
			c_.expect("(");
			s.expr = expr();
			c_.expect(")");
			c_.expect(";");
			return s;
		}
		if (word == "await_while") {
			c_.next();
			s.k = SStmt::K::Await;
			c_.expect("(");
			s.expr = expr();
			c_.expect(")");
			c_.expect(";");
			return s;
		}
		if (word == "assert") {
			c_.next();
			s.k = SStmt::K::Assert;
			c_.expect("(");
			s.expr = expr();
			c_.expect(")");
			c_.expect(";");
			return s;
		}
		if (auto an = parseAtomicName(word)) {
			s.k = SStmt::K::Call;
			s.expr = primary();
			c_.expect(";");
			return s;
		}
		s.k = SStmt::K::Assign;
		s.name = c_.ident();
		c_.expect("=");
		s.expr = expr();
		if (c_.accept("@"))
			s.site = c_.ident("site name");
		c_.expect(";");
		return s;
	}

	auto node(SExpr::K k) -> SExprP
	{
		auto e = std::make_unique<SExpr>();
		e->k = k;
		e->line = c_.peek().line;
		e->col = c_.peek().col;
		return e;
	}

	auto bin(std::string op, SExprP a, SExprP b) -> SExprP
	{
		auto e = std::make_unique<SExpr>();
		e->k = SExpr::K::Bin;
		e->name = std::move(op);
		e->line = a->line;
		e->col = a->col;
		e->args.push_back(std::move(a));
		e->args.push_back(std::move(b));
		return e;
	}

	auto expr() -> SExprP { return orExpr(); }

	auto orExpr() -> SExprP
	{
		auto a = andExpr();
		while (c_.accept("||"))
			a = bin("||", std::move(a), andExpr());
		return a;
	}
	auto andExpr() -> SExprP
	{
		auto a = eqExpr();
		while (c_.accept("&&"))
			a = bin("&&", std::move(a), eqExpr());
		return a;
	}
	auto eqExpr() -> SExprP
	{
		auto a = relExpr();
		for (;;) {
			if (c_.accept("=="))
				a = bin("==", std::move(a), relExpr());
			else if (c_.accept("!="))
				a = bin("!=", std::move(a), relExpr());
			else
				return a;
		}
	}
	auto relExpr() -> SExprP
	{
		auto a = addExpr();
		for (;;) {
			std::string op;
			for (const char *s : {"<=", ">=", "<", ">"})
				if (c_.isSym(s))
					op = s;
			if (op.empty())
				return a;
			c_.next();
			a = bin(op, std::move(a), addExpr());
		}
	}
	auto addExpr() -> SExprP
	{
		auto a = mulExpr();
		for (;;) {
			if (c_.accept("+"))
				a = bin("+", std::move(a), mulExpr());
			else if (c_.accept("-"))
				a = bin("-", std::move(a), mulExpr());
			else
				return a;
		}
	}
	auto mulExpr() -> SExprP
	{
		auto a = unaryExpr();
		while (c_.accept("*"))
			a = bin("*", std::move(a), unaryExpr());
		return a;
	}
	auto unaryExpr() -> SExprP
	{
		if (c_.isSym("!") || c_.isSym("-")) {
			auto e = node(c_.isSym("!") ? SExpr::K::Not : SExpr::K::Neg);
			c_.next();
			e->args.push_back(unaryExpr());
			return e;
		}
		return primary();
	}
	auto primary() -> SExprP
	{
		if (c_.accept("(")) {
			auto e = expr();
			c_.expect(")");
			return e;
		}
		if (c_.peek().kind == Tok::Number) {
			auto e = node(SExpr::K::Num);
			e->num = c_.next().num;
			return e;
		}
		if (c_.isWord("true") || c_.isWord("false")) {
			auto e = node(SExpr::K::Num);
			e->num = c_.next().text == "true" ? 1 : 0;
			return e;
		}
		if (c_.peek().kind != Tok::Ident)
			c_.fail("expected an expression");
		const std::string name = c_.peek().text;
		if (parseAtomicName(name)) {
			auto e = node(SExpr::K::Call);
			e->name = c_.next().text;
			if (c_.accept("(")) {
				if (!c_.isSym(")")) {
					do
						e->args.push_back(expr());
					while (c_.accept(","));
				}
				c_.expect(")");
			}
			if (c_.accept("@"))
				e->site = c_.ident("site name");
			return e;
		}
		auto e = node(SExpr::K::Name);
		e->name = c_.next().text;
		if (c_.isSym("("))
			c_.fail("unknown operation '" + name + "'");
		return e;
	}

	Cursor c_;
};

/* ------------------------------------------------------------- lowering */

auto substituteRegs(const Expr &e, const std::map<RegId, Expr> &m) -> Expr
{
	switch (e.op()) {
	case Expr::Op::Const:
	case Expr::Op::ReadResult:
		return e;
	case Expr::Op::Reg: {
		auto it = m.find(e.regId());
		return it == m.end() ? e : it->second;
	}
	case Expr::Op::Not:
		return Expr::unary(Expr::Op::Not, substituteRegs(e.lhs(), m));
	default:
		return Expr::binary(e.op(), substituteRegs(e.lhs(), m), substituteRegs(e.rhs(), m));
	}
}

auto assignMap(const std::vector<Assignment> &as) -> std::map<RegId, Expr>
{
	std::map<RegId, Expr> m;
	for (const auto &a : as)
		m[a.reg] = a.value;
	return m;
}

/* Folding builder used by the lowering only; the core parser keeps shapes. */
auto fold(Expr::Op op, Expr a, Expr b) -> Expr
{
	if (op == Expr::Op::And)
		return Expr::logicalAnd(std::move(a), std::move(b));
	auto e = Expr::binary(op, std::move(a), std::move(b));
	if (e.lhs().isConst() && e.rhs().isConst())
		return Expr::constant(e.eval({}));
	return e;
}

auto isFallbackEvent(const EventCase &c) -> bool
{
	return c.guard.isTrue() && c.tpl.kind == TemplateKind::Nop;
}

auto isFallbackUpdate(const UpdateCase &c) -> bool
{
	return c.guard.isTrue() && c.assigns.empty();
}

/* Registers a statement list may assign */
void assignedNames(const std::vector<SStmt> &body, std::set<std::string> &out)
{
	for (const auto &s : body) {
		if (s.k == SStmt::K::Assign || s.k == SStmt::K::For)
			out.insert(s.name);
		assignedNames(s.body, out);
		assignedNames(s.orelse, out);
	}
}

auto containsAwait(const std::vector<SStmt> &body) -> bool
{
	for (const auto &s : body)
		if (s.k == SStmt::K::Await || containsAwait(s.body) || containsAwait(s.orelse))
			return true;
	return false;
}

class ThreadLowerer {
public:
	ThreadLowerer(const Program &prog, const SThread &st) : prog_(prog)
	{
		th_.name = st.name;
		for (const auto &[n, v] : st.regs) {
			if (th_.findRegister(n))
				throw ParseError(st.line, st.col, "register '" + n + "' declared twice");
			if (prog_.findLocation(n))
				throw ParseError(st.line, st.col,
						 "register '" + n + "' shadows a shared location");
			th_.registers.push_back(n);
			th_.initialRegisters.push_back(v);
		}
		assigned_.assign(th_.registers.size(), false);
	}

	auto lower(const std::vector<SStmt> &body) -> Thread
	{
		lowerBlock(body);
		th_.body = std::move(out_);
		return std::move(th_);
	}

private:
	[[noreturn]] static void fail(std::size_t line, std::size_t col, const std::string &msg)
	{
		throw ParseError(line, col, msg);
	}

	auto newReg(std::string_view prefix) -> RegId
	{
		std::string n;
		do
			n = std::string(prefix) + std::to_string(fresh_++);
		while (th_.findRegister(n));
		th_.registers.push_back(n);
		th_.initialRegisters.push_back(0);
		assigned_.push_back(false);
		return static_cast<RegId>(th_.registers.size() - 1);
	}

	auto location(const SExpr &e) const -> LocId
	{
		if (e.k != SExpr::K::Name)
			fail(e.line, e.col, "expected a shared location");
		auto l = prog_.findLocation(e.name);
		if (!l)
			fail(e.line, e.col, "unknown shared location '" + e.name + "'");
		return *l;
	}

	/* -------------------------------------------------- step emission */

	auto makeStep(EventTemplate tpl, std::vector<Assignment> assigns) const -> Step
	{
		Step s;
		s.event.cases.push_back({guard_, std::move(tpl)});
		if (!guard_.isTrue())
			s.event.cases.push_back({Expr::constant(1), EventTemplate{}});
		s.update.cases.push_back({guard_, std::move(assigns)});
		if (!guard_.isTrue())
			s.update.cases.push_back({Expr::constant(1), {}});
		return s;
	}

	static void composeBackward(Step &prev, const std::vector<Assignment> &nop)
	{
		for (auto &c : prev.update.cases) {
			auto m = assignMap(c.assigns);
			std::vector<Assignment> merged;
			for (const auto &a : c.assigns)
				if (std::ranges::none_of(nop, [&](const Assignment &b) { return b.reg == a.reg; }))
					merged.push_back(a);
			for (const auto &b : nop)
				merged.push_back({b.reg, substituteRegs(b.value, m)});
			c.assigns = std::move(merged);
		}
	}

	static auto composeForward(const std::vector<Assignment> &nop, Step s) -> Step
	{
		auto m = assignMap(nop);
		for (auto &c : s.event.cases) {
			c.guard = substituteRegs(c.guard, m);
			c.tpl.value = substituteRegs(c.tpl.value, m);
			c.tpl.expected = substituteRegs(c.tpl.expected, m);
		}
		for (auto &c : s.update.cases) {
			c.guard = substituteRegs(c.guard, m);
			for (auto &a : c.assigns)
				a.value = substituteRegs(a.value, m);
			for (const auto &b : nop)
				if (std::ranges::none_of(c.assigns, [&](const Assignment &a) { return a.reg == b.reg; }))
					c.assigns.push_back(b);
		}
		return s;
	}

	static auto pureNopAssigns(const Statement &st) -> std::optional<std::vector<Assignment>>
	{
		const auto *s = std::get_if<Step>(&st);
		if (s == nullptr || s->event.cases.size() != 1 || s->update.cases.size() != 1)
			return std::nullopt;
		if (!s->event.cases[0].guard.isTrue() || s->event.cases[0].tpl.kind != TemplateKind::Nop ||
		    !s->update.cases[0].guard.isTrue())
			return std::nullopt;
		return s->update.cases[0].assigns;
	}

	/* Appends a step, merging unconditional register-only steps with neighbours */
	void push(Step s)
	{
		if (auto nop = pureNopAssigns(s)) {
			if (out_.size() > segStart_ && std::holds_alternative<Step>(out_.back())) {
				composeBackward(std::get<Step>(out_.back()), *nop);
				return;
			}
			out_.emplace_back(std::move(s));
			pendingForward_ = true;
			return;
		}
		if (pendingForward_ && out_.size() > segStart_) {
			auto nop = *pureNopAssigns(out_.back());
			out_.pop_back();
			s = composeForward(nop, std::move(s));
		}
		pendingForward_ = false;
		out_.emplace_back(std::move(s));
	}

	void pushAwait(Await a)
	{
		out_.emplace_back(std::move(a));
		pendingForward_ = false;
		segStart_ = out_.size();
	}

	void markAssigned(RegId r) { assigned_[r] = true; }

	/* --------------------------------------------------- expressions */

	auto countAccesses(const SExpr &e) const -> std::size_t
	{
		std::size_t n = 0;
		if (e.k == SExpr::K::Call)
			n = 1;
		if (e.k == SExpr::K::Name && !th_.findRegister(e.name))
			n = 1;
		for (std::size_t i = 0; i < e.args.size(); ++i) {
			/* the first argument of a call names a location */
			if (e.k == SExpr::K::Call && i == 0)
				continue;
			n += countAccesses(*e.args[i]);
		}
		return n;
	}

	auto callTemplate(const SExpr &e, const std::vector<Expr> &args) const -> EventTemplate
	{
		auto an = *parseAtomicName(e.name);
		EventTemplate t;
		t.mode = an.mode;
		t.site = e.site;
		auto arity = [&](std::size_t n) {
			if (e.args.size() != n)
				fail(e.line, e.col, e.name + " expects " + std::to_string(n) + " argument(s)");
		};
		switch (an.op) {
		case AtomicOp::Load:
			arity(1);
			if (an.mode == Mode::Rel)
				fail(e.line, e.col, "loads cannot have release mode");
			t.kind = TemplateKind::Read;
			t.loc = location(*e.args[0]);
			break;
		case AtomicOp::Xchg:
		case AtomicOp::Faa:
		case AtomicOp::Or:
			arity(2);
			t.kind = TemplateKind::Update;
			t.rmw = an.op == AtomicOp::Xchg ? RmwKind::Xchg
				: an.op == AtomicOp::Faa ? RmwKind::FetchAdd
							  : RmwKind::FetchOr;
			t.loc = location(*e.args[0]);
			t.failMode = t.mode;
			t.value = args[0];
			break;
		case AtomicOp::Cas:
			arity(3);
			t.kind = TemplateKind::Update;
			t.rmw = RmwKind::Cas;
			t.loc = location(*e.args[0]);
			t.failMode = an.failMode.value_or(defaultFailMode(an.mode));
			if (t.failMode == Mode::Rel)
				fail(e.line, e.col, "a failed CAS cannot have release mode");
			t.expected = args[0];
			t.value = args[1];
			break;
		case AtomicOp::Store:
		case AtomicOp::Fence:
			fail(e.line, e.col, e.name + " has no value");
		}
		return t;
	}

	/*
	 * Lowers E, emitting one step per shared access. With INLINE the last
	 * access is returned instead of emitted and its value appears as $v.
	 */
	auto lowerExpr(const SExpr &e, bool inlineLast, std::optional<EventTemplate> &pending) -> Expr
	{
		remaining_ = countAccesses(e);
		inline_ = inlineLast;
		return lowerRec(e, pending);
	}

	auto access(EventTemplate tpl, std::optional<EventTemplate> &pending) -> Expr
	{
		if (--remaining_ == 0 && inline_) {
			pending = std::move(tpl);
			return Expr::readResult();
		}
		RegId t = newReg("_t");
		markAssigned(t);
		push(makeStep(std::move(tpl), {{t, Expr::readResult()}}));
		return Expr::reg(t);
	}

	auto lowerRec(const SExpr &e, std::optional<EventTemplate> &pending) -> Expr
	{
		switch (e.k) {
		case SExpr::K::Num:
			return Expr::constant(e.num);
		case SExpr::K::Name: {
			if (auto r = th_.findRegister(e.name))
				return Expr::reg(*r);
			EventTemplate t;
			t.kind = TemplateKind::Read;
			t.loc = location(e);
			return access(std::move(t), pending);
		}
		case SExpr::K::Not:
			return Expr::logicalNot(lowerRec(*e.args[0], pending));
		case SExpr::K::Neg:
			return fold(Expr::Op::Sub, Expr::constant(0), lowerRec(*e.args[0], pending));
		case SExpr::K::Call: {
			std::vector<Expr> args;
			for (std::size_t i = 1; i < e.args.size(); ++i)
				args.push_back(lowerRec(*e.args[i], pending));
			return access(callTemplate(e, args), pending);
		}
		case SExpr::K::Bin:
			break;
		}
		Expr a = lowerRec(*e.args[0], pending);
		Expr b = lowerRec(*e.args[1], pending);
		const auto &op = e.name;
		if (op == "+")
			return fold(Expr::Op::Add, a, b);
		if (op == "-")
			return fold(Expr::Op::Sub, a, b);
		if (op == "*")
			return fold(Expr::Op::Mul, a, b);
		if (op == "==")
			return fold(Expr::Op::Eq, a, b);
		if (op == "!=")
			return fold(Expr::Op::Ne, a, b);
		if (op == "<")
			return fold(Expr::Op::Lt, a, b);
		if (op == ">")
			return fold(Expr::Op::Lt, b, a);
		if (op == "<=")
			return Expr::logicalNot(fold(Expr::Op::Lt, b, a));
		if (op == ">=")
			return Expr::logicalNot(fold(Expr::Op::Lt, a, b));
		if (op == "&&")
			return fold(Expr::Op::And, a, b);
		return fold(Expr::Op::Or, a, b);
	}

	auto constantOf(const SExpr &e) -> Value
	{
		std::optional<EventTemplate> pending;
		if (countAccesses(e) != 0)
			fail(e.line, e.col, "loop bounds must be constants");
		Expr x = lowerRec(e, pending);
		if (!x.isConst())
			fail(e.line, e.col, "loop bounds must be constants");
		return x.constValue();
	}

	/* ---------------------------------------------------- statements */

	void lowerBlock(const std::vector<SStmt> &body)
	{
		for (const auto &s : body)
			lowerStmt(s);
	}

	void assignRegister(RegId r, const SExpr &rhs)
	{
		std::optional<EventTemplate> pending;
		Expr v = lowerExpr(rhs, true, pending);
		if (!pending && v.isConst() && !assigned_[r] && depth_ == 0 && guard_.isTrue() &&
		    v.constValue() == th_.initialRegisters[r])
			return;
		markAssigned(r);
		push(makeStep(pending.value_or(EventTemplate{}), {{r, v}}));
	}

	void lowerStmt(const SStmt &s)
	{
		switch (s.k) {
		case SStmt::K::Assign: {
			if (auto r = th_.findRegister(s.name)) {
				if (!s.site.empty())
					fail(s.line, s.col, "register assignments have no site");
				assignRegister(*r, *s.expr);
				return;
			}
			std::optional<EventTemplate> pending;
			SExpr target;
			target.k = SExpr::K::Name;
			target.name = s.name;
			target.line = s.line;
			target.col = s.col;
			EventTemplate t;
			t.kind = TemplateKind::Write;
			t.loc = location(target);
			t.site = s.site;
			t.value = lowerExpr(*s.expr, false, pending);
			push(makeStep(std::move(t), {}));
			return;
		}
		case SStmt::K::Call:
			lowerCallStmt(*s.expr);
			return;
		case SStmt::K::Assert: {
			std::optional<EventTemplate> pending;
			Expr cond = lowerExpr(*s.expr, false, pending);
			Step st;
			EventTemplate err;
			err.kind = TemplateKind::Error;
			st.event.cases.push_back({Expr::logicalAnd(guard_, Expr::logicalNot(cond)), err});
			st.event.cases.push_back({Expr::constant(1), EventTemplate{}});
			st.update.cases.push_back({Expr::constant(1), {}});
			push(std::move(st));
			return;
		}
		case SStmt::K::If:
			lowerIf(s);
			return;
		case SStmt::K::For: {
			auto r = th_.findRegister(s.name);
			if (!r)
				fail(s.line, s.col, "undeclared loop register '" + s.name + "'");
			Value lo = constantOf(*s.from);
			Value hi = constantOf(*s.to) + (s.inclusive ? 1 : 0);
			if (hi - lo > 4096)
				fail(s.line, s.col, "loop bound too large to unroll");
			assignRegister(*r, *s.from);
			SExpr inc;
			inc.k = SExpr::K::Bin;
			inc.name = "+";
			auto lhs = std::make_unique<SExpr>();
			lhs->k = SExpr::K::Name;
			lhs->name = s.name;
			auto one = std::make_unique<SExpr>();
			one->num = 1;
			inc.args.push_back(std::move(lhs));
			inc.args.push_back(std::move(one));
			for (Value i = lo; i < hi; ++i) {
				lowerBlock(s.body);
				assignRegister(*r, inc);
			}
			return;
		}
		case SStmt::K::Await:
			lowerAwait(s);
			return;
		}
	}

	void lowerCallStmt(const SExpr &call)
	{
		auto an = *parseAtomicName(call.name);
		if (an.op == AtomicOp::Fence) {
			if (!call.args.empty())
				fail(call.line, call.col, "fences take no arguments");
			EventTemplate t;
			t.kind = TemplateKind::Fence;
			t.mode = an.mode;
			t.site = call.site;
			push(makeStep(std::move(t), {}));
			return;
		}
		if (an.op == AtomicOp::Store) {
			if (call.args.size() != 2)
				fail(call.line, call.col, call.name + " expects 2 arguments");
			if (an.mode == Mode::Acq)
				fail(call.line, call.col, "stores cannot have acquire mode");
			std::optional<EventTemplate> pending;
			EventTemplate t;
			t.kind = TemplateKind::Write;
			t.mode = an.mode;
			t.loc = location(*call.args[0]);
			t.site = call.site;
			t.value = lowerExpr(*call.args[1], false, pending);
			push(makeStep(std::move(t), {}));
			return;
		}
		std::optional<EventTemplate> pending;
		lowerExpr(call, true, pending);
		push(makeStep(std::move(*pending), {}));
	}

	void lowerIf(const SStmt &s)
	{
		std::optional<EventTemplate> pending;
		Expr cond = lowerExpr(*s.expr, false, pending);
		if (cond.isConst()) {
			lowerBlock(cond.constValue() != 0 ? s.body : s.orelse);
			return;
		}
		std::set<std::string> written;
		assignedNames(s.body, written);
		assignedNames(s.orelse, written);
		std::vector<RegId> used;
		cond.collectRegisters(used);
		if (std::ranges::any_of(used, [&](RegId r) { return written.contains(th_.registers[r]); })) {
			RegId b = newReg("_b");
			markAssigned(b);
			push(makeStep(EventTemplate{}, {{b, cond}}));
			cond = Expr::reg(b);
		}

		const bool awaits = containsAwait(s.body) || containsAwait(s.orelse);
		auto thenOut = lowerBranch(s.body, Expr::logicalAnd(guard_, cond));
		auto elseOut = lowerBranch(s.orelse, Expr::logicalAnd(guard_, Expr::logicalNot(cond)));
		if (awaits) {
			for (auto *part : {&thenOut, &elseOut})
				for (auto &st : *part)
					append(std::move(st));
			return;
		}
		const auto n = std::max(thenOut.size(), elseOut.size());
		for (std::size_t i = 0; i < n; ++i) {
			Step merged;
			for (auto *part : {&thenOut, &elseOut}) {
				if (i >= part->size())
					continue;
				const auto &st = std::get<Step>((*part)[i]);
				for (const auto &c : st.event.cases)
					if (!isFallbackEvent(c))
						merged.event.cases.push_back(c);
				for (const auto &c : st.update.cases)
					if (!isFallbackUpdate(c))
						merged.update.cases.push_back(c);
			}
			merged.event.cases.push_back({Expr::constant(1), EventTemplate{}});
			merged.update.cases.push_back({Expr::constant(1), {}});
			append(std::move(merged));
		}
	}

	/* Appends an already guarded statement without merging it away */
	void append(Statement st)
	{
		if (auto *aw = std::get_if<Await>(&st)) {
			pushAwait(std::move(*aw));
			return;
		}
		auto &s = std::get<Step>(st);
		if (pendingForward_ && out_.size() > segStart_) {
			auto nop = *pureNopAssigns(out_.back());
			out_.pop_back();
			s = composeForward(nop, std::move(s));
		}
		pendingForward_ = false;
		out_.emplace_back(std::move(s));
	}

	auto lowerBranch(const std::vector<SStmt> &body, Expr guard) -> std::vector<Statement>
	{
		auto savedOut = std::move(out_);
		auto savedSeg = segStart_;
		auto savedPending = pendingForward_;
		auto savedGuard = guard_;
		out_.clear();
		segStart_ = 0;
		pendingForward_ = false;
		guard_ = std::move(guard);
		++depth_;
		lowerBlock(body);
		--depth_;
		auto result = std::move(out_);
		out_ = std::move(savedOut);
		segStart_ = savedSeg;
		pendingForward_ = savedPending;
		guard_ = std::move(savedGuard);
		return result;
	}

	void lowerAwait(const SStmt &s)
	{
		if (inAwait_)
			fail(s.line, s.col, "nested await");
		inAwait_ = true;
		++depth_;
		/* The body starts a fresh segment so nothing merges across the loop head. */
		pendingForward_ = false;
		segStart_ = out_.size();
		const auto start = out_.size();
		lowerBlock(s.body);
		std::optional<EventTemplate> pending;
		Expr cond = lowerExpr(*s.expr, false, pending);
		--depth_;
		inAwait_ = false;
		Await a;
		a.jump = static_cast<std::uint32_t>(out_.size() - start);
		a.cond = Expr::logicalAnd(guard_, cond);
		if (a.jump == 0)
			fail(s.line, s.col, "await polls no shared location");
		pushAwait(std::move(a));
	}

	const Program &prog_;
	Thread th_;
	std::vector<Statement> out_;
	std::vector<bool> assigned_;
	Expr guard_ = Expr::constant(1);
	std::size_t segStart_ = 0;
	bool pendingForward_ = false;
	bool inAwait_ = false;
	/* Nesting inside branches and awaits; initial-value elision needs 0 */
	int depth_ = 0;
	std::size_t fresh_ = 0;
	std::size_t remaining_ = 0;
	bool inline_ = false;
};

auto lowerProgram(const SProgram &sp) -> Program
{
	Program p;
	for (const auto &[n, v] : sp.shared) {
		if (p.findLocation(n))
			throw ParseError(0, 0, "shared location '" + n + "' declared twice");
		p.locations.push_back(n);
		p.sharedInit.push_back(v);
	}
	p.pinnedSites = sp.pins;
	for (const auto &st : sp.threads) {
		for (const auto &t : p.threads)
			if (t.name == st.name)
				throw ParseError(st.line, st.col, "thread '" + st.name + "' declared twice");
		p.threads.push_back(ThreadLowerer(p, st).lower(st.body));
	}
	return p;
}

/* ----------------------------------------------------------- core parser */

class CoreParser {
public:
	explicit CoreParser(std::string_view text) : c_(tokenize(text)) {}

	auto parse() -> Program
	{
		Program p;
		if (!c_.isWord("core"))
			c_.fail("expected 'core'");
		c_.next();
		while (c_.peek().kind != Tok::End) {
			if (c_.isWord("shared")) {
				c_.next();
				p.locations.push_back(c_.ident("location name"));
				c_.expect("=");
				p.sharedInit.push_back(c_.number());
				c_.expect(";");
			} else if (c_.isWord("pin")) {
				c_.next();
				do
					p.pinnedSites.push_back(c_.ident("site name"));
				while (c_.accept(","));
				c_.expect(";");
			} else if (c_.isWord("thread")) {
				c_.next();
				p.threads.push_back(thread(p));
			} else {
				c_.fail("expected 'shared', 'pin' or 'thread'");
			}
		}
		return p;
	}

private:
	auto thread(const Program &p) -> Thread
	{
		Thread t;
		t.name = c_.ident("thread name");
		c_.expect("(");
		if (!c_.isSym(")")) {
			do {
				t.registers.push_back(c_.ident("register name"));
				c_.expect("=");
				t.initialRegisters.push_back(c_.number());
			} while (c_.accept(","));
		}
		c_.expect(")");
		c_.expect("{");
		while (!c_.accept("}")) {
			if (c_.isWord("await")) {
				c_.next();
				Await a;
				a.jump = static_cast<std::uint32_t>(c_.number());
				a.cond = expr(t);
				c_.expect(";");
				t.body.emplace_back(std::move(a));
			} else if (c_.isWord("step")) {
				c_.next();
				t.body.emplace_back(step(p, t));
			} else {
				c_.fail("expected 'step' or 'await'");
			}
		}
		return t;
	}

	auto step(const Program &p, const Thread &t) -> Step
	{
		Step s;
		c_.expect("{");
		do {
			EventCase ec;
			ec.guard = expr(t);
			c_.expect("->");
			ec.tpl = tpl(p, t);
			s.event.cases.push_back(std::move(ec));
		} while (c_.accept("|"));
		c_.expect("}");
		c_.expect("{");
		do {
			UpdateCase uc;
			uc.guard = expr(t);
			c_.expect("->");
			if (!c_.isSym("|") && !c_.isSym("}")) {
				do {
					auto name = c_.ident("register");
					auto r = t.findRegister(name);
					if (!r)
						c_.fail("unknown register '" + name + "'");
					c_.expect(":=");
					uc.assigns.push_back({*r, expr(t)});
				} while (c_.accept(","));
			}
			s.update.cases.push_back(std::move(uc));
		} while (c_.accept("|"));
		c_.expect("}");
		return s;
	}

	auto tpl(const Program &p, const Thread &t) -> EventTemplate
	{
		EventTemplate e;
		const std::string word = c_.ident("event template");
		auto loc = [&] {
			auto n = c_.ident("location");
			auto l = p.findLocation(n);
			if (!l)
				c_.fail("unknown location '" + n + "'");
			return *l;
		};
		auto modeOf = [&](std::string_view s) {
			auto m = parseMode(s);
			if (!m)
				c_.fail("bad mode in '" + word + "'");
			return *m;
		};
		if (word == "nop") {
			e.kind = TemplateKind::Nop;
		} else if (word == "error") {
			e.kind = TemplateKind::Error;
		} else if (word.starts_with("fence_")) {
			e.kind = TemplateKind::Fence;
			e.mode = modeOf(word.substr(6));
		} else if (word.starts_with("read_")) {
			e.kind = TemplateKind::Read;
			e.mode = modeOf(word.substr(5));
			c_.expect("(");
			e.loc = loc();
			c_.expect(")");
		} else if (word.starts_with("write_")) {
			e.kind = TemplateKind::Write;
			e.mode = modeOf(word.substr(6));
			c_.expect("(");
			e.loc = loc();
			c_.expect(",");
			e.value = expr(t);
			c_.expect(")");
		} else if (word.starts_with("cas_")) {
			auto rest = std::string_view(word).substr(4);
			auto us = rest.find('_');
			if (us == std::string_view::npos)
				c_.fail("cas needs success and failure modes");
			e.kind = TemplateKind::Update;
			e.rmw = RmwKind::Cas;
			e.mode = modeOf(rest.substr(0, us));
			e.failMode = modeOf(rest.substr(us + 1));
			c_.expect("(");
			e.loc = loc();
			c_.expect(",");
			e.expected = expr(t);
			c_.expect(",");
			e.value = expr(t);
			c_.expect(")");
		} else {
			auto us = word.find('_');
			auto name = word.substr(0, us);
			e.kind = TemplateKind::Update;
			if (name == "xchg")
				e.rmw = RmwKind::Xchg;
			else if (name == "faa")
				e.rmw = RmwKind::FetchAdd;
			else if (name == "or")
				e.rmw = RmwKind::FetchOr;
			else
				c_.fail("unknown event template '" + word + "'");
			if (us == std::string::npos)
				c_.fail("missing mode in '" + word + "'");
			e.mode = modeOf(word.substr(us + 1));
			e.failMode = e.mode;
			c_.expect("(");
			e.loc = loc();
			c_.expect(",");
			e.value = expr(t);
			c_.expect(")");
		}
		if (c_.accept("@"))
			e.site = c_.ident("site name");
		return e;
	}

	/* Printed expressions are fully parenthesised; shapes are kept as read. */
	auto expr(const Thread &t) -> Expr
	{
		if (c_.accept("!"))
			return Expr::unary(Expr::Op::Not, expr(t));
		if (c_.accept("$v"))
			return Expr::readResult();
		if (c_.peek().kind == Tok::Number || c_.isSym("-"))
			return Expr::constant(c_.number());
		if (c_.accept("(")) {
			Expr a = expr(t);
			static const std::pair<std::string_view, Expr::Op> ops[] = {
				{"+", Expr::Op::Add}, {"-", Expr::Op::Sub}, {"*", Expr::Op::Mul},
				{"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<", Expr::Op::Lt},
				{"&&", Expr::Op::And}, {"||", Expr::Op::Or},
			};
			for (const auto &[sym, op] : ops) {
				if (c_.accept(sym)) {
					Expr b = expr(t);
					c_.expect(")");
					return Expr::binary(op, std::move(a), std::move(b));
				}
			}
			c_.expect(")");
			return a;
		}
		auto name = c_.ident("expression");
		auto r = t.findRegister(name);
		if (!r)
			c_.fail("unknown register '" + name + "'");
		return Expr::reg(*r);
	}

	Cursor c_;
};

} // namespace

auto parseSurface(std::string_view text) -> Program
{
	return lowerProgram(SurfaceParser(text).parse());
}

auto parseCore(std::string_view text) -> Program
{
	return CoreParser(text).parse();
}

auto parseProgram(std::string_view text) -> Program
{
	auto toks = tokenize(text);
	if (toks.front().kind == Tok::Ident && toks.front().text == "core")
		return parseCore(text);
	return parseSurface(text);
}

auto loadProgram(const std::string &path) -> Program
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot read " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return parseProgram(ss.str());
}

} // namespace amc
