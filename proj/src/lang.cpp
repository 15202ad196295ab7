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

#include "amc/lang.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace amc {

auto modeName(Mode m) -> std::string_view
{
	switch (m) {
	case Mode::Rlx:
		return "rlx";
	case Mode::Rel:
		return "rel";
	case Mode::Acq:
		return "acq";
	case Mode::Sc:
		return "sc";
	}
	return "?";
}

auto parseMode(std::string_view s) -> std::optional<Mode>
{
	if (s == "rlx")
		return Mode::Rlx;
	if (s == "rel")
		return Mode::Rel;
	if (s == "acq")
		return Mode::Acq;
	if (s == "sc")
		return Mode::Sc;
	return std::nullopt;
}

auto modeLeq(Mode a, Mode b) -> bool
{
	if (a == b || a == Mode::Rlx || b == Mode::Sc)
		return true;
	return false;
}

auto rmwName(RmwKind k) -> std::string_view
{
	switch (k) {
	case RmwKind::Xchg:
		return "xchg";
	case RmwKind::Cas:
		return "cas";
	case RmwKind::FetchAdd:
		return "faa";
	case RmwKind::FetchOr:
		return "or";
	}
	return "?";
}

auto rmwResult(RmwKind k, Value old, Value operand, Value expected) -> std::optional<Value>
{
	switch (k) {
	case RmwKind::Xchg:
		return operand;
	case RmwKind::Cas:
		if (old != expected)
			return std::nullopt;
		return operand;
	case RmwKind::FetchAdd:
		return static_cast<Value>(static_cast<std::uint64_t>(old) +
					  static_cast<std::uint64_t>(operand));
	case RmwKind::FetchOr:
		return old | operand;
	}
	return std::nullopt;
}

/* ---------------------------------------------------------------- Expr */

struct Expr::Node {
	Op op = Op::Const;
	Value value = 0;
	RegId reg = 0;
	Expr lhs;
	Expr rhs;
};

Expr::Expr() = default;

auto Expr::node() const -> const Node &
{
	static const Node zero{};
	return node_ ? *node_ : zero;
}

auto Expr::constant(Value v) -> Expr
{
	auto n = std::make_shared<Node>();
	n->op = Op::Const;
	n->value = v;
	return Expr(std::move(n));
}

auto Expr::reg(RegId r) -> Expr
{
	auto n = std::make_shared<Node>();
	n->op = Op::Reg;
	n->reg = r;
	return Expr(std::move(n));
}

auto Expr::readResult() -> Expr
{
	auto n = std::make_shared<Node>();
	n->op = Op::ReadResult;
	return Expr(std::move(n));
}

auto Expr::unary(Op op, Expr arg) -> Expr
{
	assert(op == Op::Not);
	auto n = std::make_shared<Node>();
	n->op = op;
	n->lhs = std::move(arg);
	return Expr(std::move(n));
}

auto Expr::binary(Op op, Expr lhs, Expr rhs) -> Expr
{
	assert(op != Op::Const && op != Op::Reg && op != Op::ReadResult && op != Op::Not);
	auto n = std::make_shared<Node>();
	n->op = op;
	n->lhs = std::move(lhs);
	n->rhs = std::move(rhs);
	return Expr(std::move(n));
}

auto Expr::logicalAnd(Expr a, Expr b) -> Expr
{
	if (a.isConst())
		return a.constValue() != 0 ? b : a;
	if (b.isTrue())
		return a;
	return binary(Op::And, std::move(a), std::move(b));
}

auto Expr::logicalNot(Expr a) -> Expr
{
	if (a.isConst())
		return constant(a.constValue() == 0 ? 1 : 0);
	if (a.op() == Op::Not)
		return binary(Op::Ne, a.lhs(), constant(0));
	return unary(Op::Not, std::move(a));
}

auto Expr::op() const -> Op { return node().op; }
auto Expr::constValue() const -> Value { return node().value; }
auto Expr::regId() const -> RegId { return node().reg; }
auto Expr::lhs() const -> const Expr & { return node().lhs; }
auto Expr::rhs() const -> const Expr & { return node().rhs; }

auto Expr::eval(std::span<const Value> regs, std::optional<Value> readResult) const -> Value
{
	const auto &n = node();
	switch (n.op) {
	case Op::Const:
		return n.value;
	case Op::Reg:
		return n.reg < regs.size() ? regs[n.reg] : 0;
	case Op::ReadResult:
		return readResult.value_or(0);
	case Op::Not:
		return n.lhs.eval(regs, readResult) == 0 ? 1 : 0;
	case Op::And:
		return (n.lhs.eval(regs, readResult) != 0 && n.rhs.eval(regs, readResult) != 0) ? 1
												 : 0;
	case Op::Or:
		return (n.lhs.eval(regs, readResult) != 0 || n.rhs.eval(regs, readResult) != 0) ? 1
												 : 0;
	default:
		break;
	}
	auto a = static_cast<std::uint64_t>(n.lhs.eval(regs, readResult));
	auto b = static_cast<std::uint64_t>(n.rhs.eval(regs, readResult));
	switch (n.op) {
	case Op::Add:
		return static_cast<Value>(a + b);
	case Op::Sub:
		return static_cast<Value>(a - b);
	case Op::Mul:
		return static_cast<Value>(a * b);
	case Op::Eq:
		return a == b ? 1 : 0;
	case Op::Ne:
		return a != b ? 1 : 0;
	case Op::Lt:
		return static_cast<Value>(a) < static_cast<Value>(b) ? 1 : 0;
	default:
		break;
	}
	return 0;
}

void Expr::collectRegisters(std::vector<RegId> &out) const
{
	switch (op()) {
	case Op::Const:
	case Op::ReadResult:
		return;
	case Op::Reg:
		if (std::find(out.begin(), out.end(), regId()) == out.end())
			out.push_back(regId());
		return;
	case Op::Not:
		lhs().collectRegisters(out);
		return;
	default:
		lhs().collectRegisters(out);
		rhs().collectRegisters(out);
	}
}

auto Expr::usesReadResult() const -> bool
{
	switch (op()) {
	case Op::Const:
	case Op::Reg:
		return false;
	case Op::ReadResult:
		return true;
	case Op::Not:
		return lhs().usesReadResult();
	default:
		return lhs().usesReadResult() || rhs().usesReadResult();
	}
}

auto Expr::substitute(RegId r, const Expr &replacement) const -> Expr
{
	switch (op()) {
	case Op::Const:
	case Op::ReadResult:
		return *this;
	case Op::Reg:
		return regId() == r ? replacement : *this;
	case Op::Not:
		return unary(Op::Not, lhs().substitute(r, replacement));
	default:
		return binary(op(), lhs().substitute(r, replacement), rhs().substitute(r, replacement));
	}
}

auto Expr::substituteReadResult(const Expr &replacement) const -> Expr
{
	switch (op()) {
	case Op::Const:
	case Op::Reg:
		return *this;
	case Op::ReadResult:
		return replacement;
	case Op::Not:
		return unary(Op::Not, lhs().substituteReadResult(replacement));
	default:
		return binary(op(), lhs().substituteReadResult(replacement),
			      rhs().substituteReadResult(replacement));
	}
}

auto operator==(const Expr &a, const Expr &b) -> bool
{
	if (a.node_ == b.node_)
		return true;
	if (a.op() != b.op())
		return false;
	switch (a.op()) {
	case Expr::Op::Const:
		return a.constValue() == b.constValue();
	case Expr::Op::Reg:
		return a.regId() == b.regId();
	case Expr::Op::ReadResult:
		return true;
	case Expr::Op::Not:
		return a.lhs() == b.lhs();
	default:
		return a.lhs() == b.lhs() && a.rhs() == b.rhs();
	}
}

auto opSymbol(Expr::Op op) -> std::string_view
{
	switch (op) {
	case Expr::Op::Add:
		return "+";
	case Expr::Op::Sub:
		return "-";
	case Expr::Op::Mul:
		return "*";
	case Expr::Op::Eq:
		return "==";
	case Expr::Op::Ne:
		return "!=";
	case Expr::Op::Lt:
		return "<";
	case Expr::Op::And:
		return "&&";
	case Expr::Op::Or:
		return "||";
	case Expr::Op::Not:
		return "!";
	default:
		return "?";
	}
}

/* ---------------------------------------------------------- statements */

auto GuardedEvent::select(std::span<const Value> regs) const -> const EventTemplate *
{
	for (const auto &c : cases)
		if (c.guard.eval(regs) != 0)
			return &c.tpl;
	return nullptr;
}

auto GuardedUpdate::select(std::span<const Value> regs) const -> const UpdateCase *
{
	for (const auto &c : cases)
		if (c.guard.eval(regs) != 0)
			return &c;
	return nullptr;
}

auto Thread::findRegister(std::string_view n) const -> std::optional<RegId>
{
	for (RegId i = 0; i < registers.size(); ++i)
		if (registers[i] == n)
			return i;
	return std::nullopt;
}

auto Program::findLocation(std::string_view n) const -> std::optional<LocId>
{
	for (LocId i = 0; i < locations.size(); ++i)
		if (locations[i] == n)
			return i;
	return std::nullopt;
}

auto Program::totalLength() const -> std::size_t
{
	std::size_t n = 0;
	for (const auto &t : threads)
		n += t.body.size();
	return n;
}

auto enclosingAwait(const Thread &thread, std::size_t k) -> std::optional<std::size_t>
{
	for (std::size_t j = k + 1; j < thread.body.size(); ++j) {
		if (const auto *aw = std::get_if<Await>(&thread.body[j])) {
			if (j - aw->jump <= k)
				return j;
			return std::nullopt;
		}
	}
	return std::nullopt;
}

/* ---------------------------------------------------------- validation */

namespace {

void checkExprRegs(const Expr &e, std::size_t nregs, bool allowReadResult, const Thread &t,
		   std::size_t k, std::vector<Diagnostic> &out)
{
	std::vector<RegId> regs;
	e.collectRegisters(regs);
	for (auto r : regs)
		if (r >= nregs)
			out.push_back({t.name, k, "reference to undeclared register"});
	if (!allowReadResult && e.usesReadResult())
		out.push_back({t.name, k, "read result used outside a state transformer"});
}

} // namespace

auto validate(const Program &program) -> std::vector<Diagnostic>
{
	std::vector<Diagnostic> out;
	if (program.sharedInit.size() != program.locations.size())
		out.push_back({"", 0, "shared initialisation does not cover every location"});

	for (const auto &t : program.threads) {
		const auto nregs = t.registers.size();
		if (t.initialRegisters.size() != nregs)
			out.push_back({t.name, 0, "initial register state is incomplete"});
		for (std::size_t k = 0; k < t.body.size(); ++k) {
			const auto &stmt = t.body[k];
			if (const auto *aw = std::get_if<Await>(&stmt)) {
				if (aw->jump > k) {
					out.push_back({t.name, k, "await jumps before program start"});
				} else {
					for (auto j = k - aw->jump; j < k; ++j)
						if (isAwait(t.body[j]))
							out.push_back({t.name, k, "nested await"});
				}
				checkExprRegs(aw->cond, nregs, false, t, k, out);
				continue;
			}
			const auto &step = std::get<Step>(stmt);
			if (step.event.cases.empty() || !step.event.cases.back().guard.isTrue())
				out.push_back({t.name, k, "event generator guards are not exhaustive"});
			if (step.update.cases.empty() || !step.update.cases.back().guard.isTrue())
				out.push_back({t.name, k, "state transformer guards are not exhaustive"});
			for (const auto &c : step.event.cases) {
				checkExprRegs(c.guard, nregs, false, t, k, out);
				checkExprRegs(c.tpl.value, nregs, false, t, k, out);
				checkExprRegs(c.tpl.expected, nregs, false, t, k, out);
				if (c.tpl.isMemoryAccess() && c.tpl.loc >= program.locations.size())
					out.push_back({t.name, k, "access to an undeclared location"});
			}
			for (const auto &c : step.update.cases) {
				checkExprRegs(c.guard, nregs, false, t, k, out);
				std::vector<RegId> seen;
				for (const auto &a : c.assigns) {
					if (std::find(seen.begin(), seen.end(), a.reg) != seen.end())
						out.push_back({t.name, k, "register assigned twice in one case"});
					seen.push_back(a.reg);
					if (a.reg >= nregs)
						out.push_back({t.name, k, "assignment to undeclared register"});
					checkExprRegs(a.value, nregs, true, t, k, out);
				}
			}
		}
		for (std::size_t k = 0; k < t.body.size(); ++k) {
			const auto *aw = std::get_if<Await>(&t.body[k]);
			if (aw == nullptr || aw->jump > k)
				continue;
			bool polls = false;
			for (auto j = k - aw->jump; j < k; ++j) {
				const auto *st = std::get_if<Step>(&t.body[j]);
				if (st == nullptr)
					continue;
				for (const auto &c : st->event.cases)
					polls |= c.tpl.kind == TemplateKind::Read ||
						 c.tpl.kind == TemplateKind::Update;
			}
			if (!polls)
				out.push_back({t.name, k, "await polls no shared location"});
		}
	}
	return out;
}

/* ------------------------------------------------------------ printing */

auto printExpr(const Expr &e, std::span<const std::string> registers) -> std::string
{
	switch (e.op()) {
	case Expr::Op::Const:
		return std::to_string(e.constValue());
	case Expr::Op::Reg:
		return e.regId() < registers.size() ? registers[e.regId()]
						    : "%" + std::to_string(e.regId());
	case Expr::Op::ReadResult:
		return "$v";
	case Expr::Op::Not:
		return "!" + printExpr(e.lhs(), registers);
	default:
		return "(" + printExpr(e.lhs(), registers) + " " + std::string(opSymbol(e.op())) +
		       " " + printExpr(e.rhs(), registers) + ")";
	}
}

namespace {

auto printTemplate(const EventTemplate &t, const Program &p, std::span<const std::string> regs)
	-> std::string
{
	std::ostringstream os;
	auto loc = [&] { return t.loc < p.locations.size() ? p.locations[t.loc] : "?"; };
	switch (t.kind) {
	case TemplateKind::Read:
		os << "read_" << modeName(t.mode) << "(" << loc() << ")";
		break;
	case TemplateKind::Write:
		os << "write_" << modeName(t.mode) << "(" << loc() << ", " << printExpr(t.value, regs)
		   << ")";
		break;
	case TemplateKind::Update:
		if (t.rmw == RmwKind::Cas) {
			os << "cas_" << modeName(t.mode) << "_" << modeName(t.failMode) << "(" << loc()
			   << ", " << printExpr(t.expected, regs) << ", " << printExpr(t.value, regs)
			   << ")";
		} else {
			os << rmwName(t.rmw) << "_" << modeName(t.mode) << "(" << loc() << ", "
			   << printExpr(t.value, regs) << ")";
		}
		break;
	case TemplateKind::Fence:
		os << "fence_" << modeName(t.mode);
		break;
	case TemplateKind::Error:
		os << "error";
		break;
	case TemplateKind::Nop:
		os << "nop";
		break;
	}
	if (!t.site.empty())
		os << " @" << t.site;
	return os.str();
}

} // namespace

auto printCore(const Program &p) -> std::string
{
	std::ostringstream os;
	os << "core\n";
	for (std::size_t i = 0; i < p.locations.size(); ++i)
		os << "shared " << p.locations[i] << " = " << p.sharedInit[i] << ";\n";
	if (!p.pinnedSites.empty()) {
		os << "pin ";
		for (std::size_t i = 0; i < p.pinnedSites.size(); ++i)
			os << (i ? ", " : "") << p.pinnedSites[i];
		os << ";\n";
	}
	for (const auto &t : p.threads) {
		os << "thread " << t.name << " (";
		for (std::size_t r = 0; r < t.registers.size(); ++r)
			os << (r ? ", " : "") << t.registers[r] << " = " << t.initialRegisters[r];
		os << ") {\n";
		for (const auto &stmt : t.body) {
			if (const auto *aw = std::get_if<Await>(&stmt)) {
				os << "  await " << aw->jump << " " << printExpr(aw->cond, t.registers)
				   << ";\n";
				continue;
			}
			const auto &st = std::get<Step>(stmt);
			os << "  step {";
			for (std::size_t c = 0; c < st.event.cases.size(); ++c) {
				const auto &ec = st.event.cases[c];
				os << (c ? " | " : " ") << printExpr(ec.guard, t.registers) << " -> "
				   << printTemplate(ec.tpl, p, t.registers);
			}
			os << " } {";
			for (std::size_t c = 0; c < st.update.cases.size(); ++c) {
				const auto &uc = st.update.cases[c];
				os << (c ? " | " : " ") << printExpr(uc.guard, t.registers) << " ->";
				for (std::size_t a = 0; a < uc.assigns.size(); ++a)
					os << (a ? ", " : " ") << t.registers[uc.assigns[a].reg]
					   << " := " << printExpr(uc.assigns[a].value, t.registers);
			}
			os << " }\n";
		}
		os << "}\n";
	}
	return os.str();
}

} // namespace amc
