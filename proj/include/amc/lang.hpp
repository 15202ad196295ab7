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

#ifndef AMC_LANG_HPP
#define AMC_LANG_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace amc {

using Value = std::int64_t;
using RegId = std::uint32_t;
using LocId = std::uint32_t;

/** Barrier modes. rel and acq are incomparable; rlx is bottom and sc top. */
enum class Mode : std::uint8_t { Rlx, Rel, Acq, Sc };

auto modeName(Mode m) -> std::string_view;
auto parseMode(std::string_view s) -> std::optional<Mode>;

/** Partial order of the mode lattice */
auto modeLeq(Mode a, Mode b) -> bool;
inline auto isReleaseMode(Mode m) -> bool { return m == Mode::Rel || m == Mode::Sc; }
inline auto isAcquireMode(Mode m) -> bool { return m == Mode::Acq || m == Mode::Sc; }

/*
 * Pure first-order expressions over a thread's registers and, inside
 * state transformers only, the result of the step's read.
 * Nodes are shared and immutable; copying an Expr is cheap.
 */
class Expr {
public:
	enum class Op : std::uint8_t {
		Const,
		Reg,
		ReadResult,
		Not,
		Add,
		Sub,
		Mul,
		Eq,
		Ne,
		Lt,
		And,
		Or,
	};

	Expr();

	static auto constant(Value v) -> Expr;
	static auto reg(RegId r) -> Expr;
	static auto readResult() -> Expr;
	static auto unary(Op op, Expr arg) -> Expr;
	static auto binary(Op op, Expr lhs, Expr rhs) -> Expr;

	/* Builders with light constant folding, used by the lowering */
	static auto logicalAnd(Expr a, Expr b) -> Expr;
	static auto logicalNot(Expr a) -> Expr;

	auto op() const -> Op;
	auto constValue() const -> Value;
	auto regId() const -> RegId;
	auto lhs() const -> const Expr &;
	auto rhs() const -> const Expr &;

	auto isConst() const -> bool { return op() == Op::Const; }
	auto isTrue() const -> bool { return isConst() && constValue() != 0; }

	/** Evaluates the expression; comparisons and logic produce 0 or 1 */
	auto eval(std::span<const Value> regs, std::optional<Value> readResult = std::nullopt) const
		-> Value;

	/** Adds every register occurring in the expression to OUT */
	void collectRegisters(std::vector<RegId> &out) const;
	auto usesReadResult() const -> bool;

	/** Replaces register R by REPLACEMENT */
	auto substitute(RegId r, const Expr &replacement) const -> Expr;
	/** Replaces the read result by REPLACEMENT */
	auto substituteReadResult(const Expr &replacement) const -> Expr;

	friend auto operator==(const Expr &a, const Expr &b) -> bool;

private:
	struct Node;
	explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	/* A default-constructed Expr has no node and reads as the constant 0 */
	auto node() const -> const Node &;

	std::shared_ptr<const Node> node_;
};

auto opSymbol(Expr::Op op) -> std::string_view;

enum class TemplateKind : std::uint8_t { Read, Write, Update, Fence, Error, Nop };
enum class RmwKind : std::uint8_t { Xchg, Cas, FetchAdd, FetchOr };

auto rmwName(RmwKind k) -> std::string_view;

/** Value written by an RMW of kind K that read OLD. Nullopt for a failed CAS. */
auto rmwResult(RmwKind k, Value old, Value operand, Value expected) -> std::optional<Value>;

/** Event produced by one case of a step's event generator. */
struct EventTemplate {
	TemplateKind kind = TemplateKind::Nop;
	LocId loc = 0;
	Mode mode = Mode::Rlx;
	/** Mode of a failed CAS, which degenerates to a read */
	Mode failMode = Mode::Rlx;
	RmwKind rmw = RmwKind::Xchg;
	/** Written value, RMW operand, or CAS desired value */
	Expr value;
	/** CAS expected value */
	Expr expected;
	/** Optimizer site label; empty means the site is identified by position */
	std::string site;

	auto isMemoryAccess() const -> bool
	{
		return kind == TemplateKind::Read || kind == TemplateKind::Write ||
		       kind == TemplateKind::Update;
	}

	friend auto operator==(const EventTemplate &, const EventTemplate &) -> bool = default;
};

struct EventCase {
	Expr guard;
	EventTemplate tpl;

	friend auto operator==(const EventCase &, const EventCase &) -> bool = default;
};

struct Assignment {
	RegId reg = 0;
	Expr value;

	friend auto operator==(const Assignment &, const Assignment &) -> bool = default;
};

struct UpdateCase {
	Expr guard;
	std::vector<Assignment> assigns;

	friend auto operator==(const UpdateCase &, const UpdateCase &) -> bool = default;
};

/** Event generator: the first case whose guard holds fires */
struct GuardedEvent {
	std::vector<EventCase> cases;

	auto select(std::span<const Value> regs) const -> const EventTemplate *;

	friend auto operator==(const GuardedEvent &, const GuardedEvent &) -> bool = default;
};

/** State transformer: the first case whose guard holds fires */
struct GuardedUpdate {
	std::vector<UpdateCase> cases;

	auto select(std::span<const Value> regs) const -> const UpdateCase *;

	friend auto operator==(const GuardedUpdate &, const GuardedUpdate &) -> bool = default;
};

struct Step {
	GuardedEvent event;
	GuardedUpdate update;

	friend auto operator==(const Step &, const Step &) -> bool = default;
};

/** Jumps back JUMP statements while COND holds, otherwise falls through */
struct Await {
	std::uint32_t jump = 0;
	Expr cond;

	friend auto operator==(const Await &, const Await &) -> bool = default;
};

using Statement = std::variant<Step, Await>;

inline auto isAwait(const Statement &s) -> bool { return std::holds_alternative<Await>(s); }

struct Thread {
	std::string name;
	std::vector<std::string> registers;
	std::vector<Value> initialRegisters;
	std::vector<Statement> body;

	auto findRegister(std::string_view name) const -> std::optional<RegId>;

	friend auto operator==(const Thread &, const Thread &) -> bool = default;
};

struct Program {
	std::vector<std::string> locations;
	std::vector<Value> sharedInit;
	std::vector<Thread> threads;
	/** Optimizer sites that must keep their mode */
	std::vector<std::string> pinnedSites;

	auto findLocation(std::string_view name) const -> std::optional<LocId>;
	/** Sum of the program text lengths of all threads */
	auto totalLength() const -> std::size_t;

	friend auto operator==(const Program &, const Program &) -> bool = default;
};

/** Statement index K of THREAD lies in the body of the await at the returned index */
auto enclosingAwait(const Thread &thread, std::size_t k) -> std::optional<std::size_t>;

struct Diagnostic {
	std::string thread;
	std::size_t index = 0;
	std::string message;
};

/** Checks the structural invariants of a core program */
auto validate(const Program &program) -> std::vector<Diagnostic>;

/** Stable textual form of a core program; parseCore() reads it back. */
auto printCore(const Program &program) -> std::string;
auto printExpr(const Expr &e, std::span<const std::string> registers) -> std::string;

} // namespace amc

#endif /* AMC_LANG_HPP */
