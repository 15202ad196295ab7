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
#include "amc/surface.hpp"

#include <sstream>
#include <stdexcept>

namespace amc {

namespace {

const char *const mcsPartial = R"(// Partial MCS lock: T1 enqueues and waits for the hand-over, T2 passes
// the lock once it has seen q = 1.
shared locked = 0, q = 0;

thread T1 {
  regs r = 0;
  locked = 1 @lock_init;
  store_rel(q, 1) @wq;
  do {
    r = load_rlx(locked) @lock_poll;
  } await_while(r == 1);
}

thread T2 {
  regs s = 0;
  do {
    s = load_acq(q) @rq;
  } await_while(s == 0);
  locked = 0 @handover;
  assert(load_rlx(locked) @lock_check == 0);
}
)";

const char *const mcsPartialRlx = R"(// Partial MCS lock with relaxed accesses to q: T1 can spin forever.
shared locked = 0, q = 0;

thread T1 {
  regs r = 0;
  locked = 1 @lock_init;
  store_rlx(q, 1) @wq;
  do {
    r = load_rlx(locked) @lock_poll;
  } await_while(r == 1);
}

thread T2 {
  regs s = 0;
  do {
    s = load_rlx(q) @rq;
  } await_while(s == 0);
  locked = 0 @handover;
  assert(load_rlx(locked) @lock_check == 0);
}
)";

const char *const mcsPartialSc = R"(// Partial MCS lock with sc accesses to q; everything else is pinned,
// so the optimizer only tunes the two q sites.
shared locked = 0, q = 0;
pin lock_init, lock_poll, handover, lock_check;

thread T1 {
  regs r = 0;
  locked = 1 @lock_init;
  store_sc(q, 1) @wq;
  do {
    r = load_rlx(locked) @lock_poll;
  } await_while(r == 1);
}

thread T2 {
  regs s = 0;
  do {
    s = load_sc(q) @rq;
  } await_while(s == 0);
  locked = 0 @handover;
  assert(load_rlx(locked) @lock_check == 0);
}
)";

const char *const mcsPartialNoQ = R"(// Partial MCS lock with every access to q removed.
shared locked = 0;

thread T1 {
  regs r = 0;
  locked = 1;
  do {
    r = locked;
  } await_while(r == 1);
}

thread T2 {
  locked = 0;
}
)";

const char *const dpdkTemplate = R"(// DPDK MCS lock: Alice enqueues behind Bob, who holds the lock and
// releases it. Nodes are flattened; ids are 0 = NULL, 1 = alice, 2 = bob.
shared alice_locked = 0, alice_next = 0, bob_next = 0, tail = 2;

thread Alice {
  regs prev = 0, r = 0;
  store_rlx(alice_locked, 1) @init_locked;
  store_rlx(alice_next, 0) @init_next;
  prev = xchg_acq_rel(tail, 1) @swap_tail;
  if (prev != 0) {
    store_$LINK(bob_next, 1) @link;
    fence_acq_rel @store_load;
    do {
      r = load_acq(alice_locked) @spin;
    } await_while(r != 0);
  }
}

thread Bob {
  regs n = 0;
  do {
    n = load_$READ(bob_next) @read_next;
  } await_while(n == 0);
  store_rel(alice_locked, 0) @handover;
}
)";

const char *const huaweiTemplate = R"(// MCS lock of a commercial OS: Alice enqueues behind Bob, who is in the
// critical section x++ and then releases. Check waits for both and tests
// for a lost update. Ids are 0 = NULL, 1 = alice, 2 = bob.
shared alice_next = 0, alice_spin = 0, bob_next = 0, tail = 2, x = 0;
shared done_a = 0, done_b = 0;

thread Alice {
  regs prev = 0, s = 0, r = 0;
  store_rlx(alice_next, 0) @init_next;
  store_rlx(alice_spin, 1) @init_spin;
  fence_sc @wmb;
  prev = xchg_acq(tail, 1) @swap_tail;
  if (prev != 0) {
    store_rlx(bob_next, 1) @link;
    fence_sc @mb;
    do {
      s = load_$SPIN(alice_spin) @spin;
    } await_while(s != 0);
  }
  r = x;
  x = r + 1;
  store_rel(done_a, 1);
}

thread Bob {
  regs r = 0, n = 0, old = 0;
  r = x;
  x = r + 1;
  n = load_rlx(bob_next) @read_next;
  if (n == 0) {
    old = cas_sc(tail, 2, 0) @unlink;
    if (old != 2) {
      do {
        n = load_rlx(bob_next) @wait_next;
      } await_while(n == 0);
    }
  }
  if (n != 0) {
    fence_sc @release_mb;
    store_rlx(alice_spin, 0) @handover;
  }
  store_rel(done_b, 1);
}

thread Check {
  regs a = 0, b = 0;
  do {
    a = load_acq(done_a);
  } await_while(a == 0);
  do {
    b = load_acq(done_b);
  } await_while(b == 0);
  assert(x == 2);
}
)";

const char *const storeBuffering = R"(// Store buffering. Check fails iff both loads missed the other store.
shared x = 0, y = 0, d1 = 0, d2 = 0;

thread T1 {
  regs a = 0;
  x = 1;
  a = y;
  store_rel(d1, a + 1);
}

thread T2 {
  regs b = 0;
  y = 1;
  b = x;
  store_rel(d2, b + 1);
}

thread Check {
  regs u = 0, v = 0;
  do {
    u = load_acq(d1);
  } await_while(u == 0);
  do {
    v = load_acq(d2);
  } await_while(v == 0);
  assert(u + v > 2);
}
)";

const char *const qspinFast = R"(// Approximate qspinlock: only the cmpxchg fast path and a cmpxchg spin
// as slow path; no pending bit and no queue. The cmpxchg wrapper adds an
// sc fence on success like the kernel primitive.
shared val = 0, x = 0;
pin cs_load, cs_store, cs_check;

thread T0 {
  regs old = 0, s = 0;
  old = cas_acq(val, 0, 1) @fast_cmpxchg;
  if (old == 0) {
    fence_sc @cmpxchg_fence;
  }
  if (old != 0) {
    do {
      old = cas_acq(val, 0, 1) @slow_cmpxchg;
    } await_while(old != 0);
  }
  s = load_rlx(x) @cs_load;
  store_rlx(x, s + 1) @cs_store;
  assert(load_rlx(x) @cs_check == s + 1);
  store_rel(val, 0) @unlock;
}

thread T1 {
  regs old = 0, s = 0;
  old = cas_acq(val, 0, 1) @fast_cmpxchg;
  if (old == 0) {
    fence_sc @cmpxchg_fence;
  }
  if (old != 0) {
    do {
      old = cas_acq(val, 0, 1) @slow_cmpxchg;
    } await_while(old != 0);
  }
  s = load_rlx(x) @cs_load;
  store_rlx(x, s + 1) @cs_store;
  assert(load_rlx(x) @cs_check == s + 1);
  store_rel(val, 0) @unlock;
}
)";

auto replaceAll(std::string s, std::string_view from, std::string_view to) -> std::string
{
	for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
		s.replace(pos, from.size(), to);
	return s;
}

struct LockText {
	std::string shared;
	std::string regs;
	std::string lock;
	std::string unlock;
};

auto lockText(const std::string &primitive) -> LockText
{
	if (primitive == "ttas")
		return {"lock = 0", "l = 0, old = 0",
			"    do {\n"
			"      l = load_rlx(lock) @ttas_poll;\n"
			"      if (l == 0) {\n"
			"        old = cas_acq(lock, 0, 1) @ttas_grab;\n"
			"      } else {\n"
			"        old = 1;\n"
			"      }\n"
			"    } await_while(old != 0);\n",
			"    store_rel(lock, 0) @ttas_release;\n"};
	if (primitive == "cas")
		return {"lock = 0", "old = 0",
			"    do {\n"
			"      old = cas_acq(lock, 0, 1) @cas_grab;\n"
			"    } await_while(old != 0);\n",
			"    store_rel(lock, 0) @cas_release;\n"};
	if (primitive == "ticket")
		return {"next = 0, owner = 0", "t = 0, o = 0",
			"    t = faa_rlx(next, 1) @ticket_take;\n"
			"    do {\n"
			"      o = load_acq(owner) @ticket_wait;\n"
			"    } await_while(o != t);\n",
			"    store_rel(owner, t + 1) @ticket_release;\n"};
	throw std::invalid_argument("unknown primitive '" + primitive + "'");
}

auto makeCases() -> std::vector<CorpusCase>
{
	using V = VerdictKind;
	std::vector<CorpusCase> out;
	auto add = [&](std::string name, std::string source, std::string summary, V sc, V ramm) {
		CorpusCase c;
		c.file = replaceAll(name, "-", "_") + ".toy";
		c.name = std::move(name);
		c.source = std::move(source);
		c.summary = std::move(summary);
		c.expectSc = sc;
		c.expectRamm = ramm;
		out.push_back(std::move(c));
	};
	add("mcs-partial", mcsPartial, "partial MCS hand-over, rel/acq on q", V::Success, V::Success);
	add("mcs-partial-rlx", mcsPartialRlx, "partial MCS hand-over, rlx on q", V::Success,
	    V::ATViolation);
	add("mcs-partial-sc", mcsPartialSc, "partial MCS hand-over, sc on q, other sites pinned",
	    V::Success, V::Success);
	add("mcs-partial-noq", mcsPartialNoQ, "partial MCS hand-over without q", V::ATViolation,
	    V::ATViolation);
	add("ttas", generateClient({"ttas", 2, 1, {}}), "TTAS lock, 2 threads", V::Success, V::Success);
	add("ticket", generateClient({"ticket", 2, 1, {}}), "ticket lock, 2 threads", V::Success,
	    V::Success);
	add("cas-lock", generateClient({"cas", 2, 1, {}}), "CAS spinlock, 2 threads", V::Success,
	    V::Success);
	add("dpdk-mcs-bug",
	    replaceAll(replaceAll(dpdkTemplate, "$LINK", "rlx"), "$READ", "rlx"),
	    "DPDK MCS lock, relaxed link store", V::Success, V::ATViolation);
	add("dpdk-mcs-fixed",
	    replaceAll(replaceAll(dpdkTemplate, "$LINK", "rel"), "$READ", "acq"),
	    "DPDK MCS lock, rel link store and acq read", V::Success, V::Success);
	add("huawei-mcs-bug", replaceAll(huaweiTemplate, "$SPIN", "rlx"),
	    "commercial MCS lock, relaxed spin", V::Success, V::SafetyViolation);
	add("huawei-mcs-fixed", replaceAll(huaweiTemplate, "$SPIN", "acq"),
	    "commercial MCS lock, acq spin", V::Success, V::Success);
	add("sb", storeBuffering, "store buffering litmus", V::Success, V::SafetyViolation);
	add("qspinlock-fast", qspinFast, "approximate qspinlock fast path", V::Success, V::Success);
	return out;
}

} // namespace

auto knownPrimitives() -> std::vector<std::string>
{
	return {"cas", "mcs-partial", "ticket", "ttas"};
}

auto generateClient(const ClientSpec &spec) -> std::string
{
	if (spec.primitive == "mcs-partial") {
		if (spec.acquisitions == 0)
			return "shared locked = 0, q = 0;\n\nthread T1 {\n}\n\nthread T2 {\n}\n";
		if (spec.threads != 2 || spec.acquisitions != 1)
			throw std::invalid_argument("mcs-partial has two fixed roles and one hand-over");
		return mcsPartial;
	}
	const auto lt = lockText(spec.primitive);
	std::ostringstream os;
	os << "// " << spec.primitive << " lock client: " << spec.threads << " thread(s), "
	   << spec.acquisitions << " acquisition(s) each\n";
	os << "shared " << lt.shared << ", x = 0;\n";
	const bool defaultCs = spec.criticalSection.empty();
	/* A final observer catches lost updates that no thread can see locally. */
	const bool observer = defaultCs && spec.acquisitions > 0;
	if (observer) {
		for (std::size_t t = 0; t < spec.threads; ++t)
			os << "shared done" << t << " = 0;\n";
		os << "pin cs_load, cs_store, cs_check, cs_done, cs_wait, cs_final;\n";
	}
	for (std::size_t t = 0; t < spec.threads; ++t) {
		os << "\nthread T" << t << " {\n";
		if (spec.acquisitions == 0) {
			os << "}\n";
			continue;
		}
		os << "  regs i = 0, " << lt.regs << (defaultCs ? ", s = 0" : "") << ";\n";
		os << "  for (i = 0; i < " << spec.acquisitions << "; i++) {\n";
		os << lt.lock;
		if (defaultCs) {
			os << "    s = load_rlx(x) @cs_load;\n"
			      "    store_rlx(x, s + 1) @cs_store;\n"
			      "    assert(load_rlx(x) @cs_check == s + 1);\n";
		} else {
			os << "    " << spec.criticalSection << "\n";
		}
		os << lt.unlock;
		os << "  }\n";
		if (observer)
			os << "  store_rel(done" << t << ", 1) @cs_done;\n";
		os << "}\n";
	}
	if (observer) {
		os << "\nthread Check {\n  regs v = 0;\n";
		for (std::size_t t = 0; t < spec.threads; ++t)
			os << "  do {\n    v = load_acq(done" << t << ") @cs_wait;\n  } await_while(v == 0);\n";
		os << "  assert(load_rlx(x) @cs_final == " << spec.threads * spec.acquisitions << ");\n}\n";
	}
	return os.str();
}

auto CorpusCase::program() const -> Program
{
	return parseSurface(source);
}

auto builtinCases() -> const std::vector<CorpusCase> &
{
	static const std::vector<CorpusCase> cases = makeCases();
	return cases;
}

auto findCase(std::string_view name) -> const CorpusCase *
{
	for (const auto &c : builtinCases())
		if (c.name == name || c.file == name)
			return &c;
	return nullptr;
}

auto corpusIndex() -> std::string
{
	std::ostringstream os;
	os << "# name file expected-sc expected-ramm\n";
	for (const auto &c : builtinCases())
		os << c.name << ' ' << c.file << ' ' << verdictName(*c.expectSc) << ' '
		   << verdictName(*c.expectRamm) << '\n';
	return os.str();
}

} // namespace amc
