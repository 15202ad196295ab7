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

#ifndef AMC_CORPUS_HPP
#define AMC_CORPUS_HPP

#include "amc/explorer.hpp"
#include "amc/lang.hpp"

#include <optional>
#include <string>
#include <vector>

namespace amc {

struct ClientSpec {
	/** ttas, tas, ticket or mcs-partial */
	std::string primitive = "ttas";
	std::size_t threads = 2;
	std::size_t acquisitions = 1;
	/* Surface statements run while holding the lock. Empty means the
	   default counter increment checked against a local snapshot. */
	std::string criticalSection;
};

/** Throws std::invalid_argument for an unknown primitive */
auto generateClient(const ClientSpec &spec) -> std::string;

auto knownPrimitives() -> std::vector<std::string>;

struct CorpusCase {
	std::string name;
	/** File name below cases/ */
	std::string file;
	std::string source;
	std::string summary;
	std::optional<VerdictKind> expectSc;
	std::optional<VerdictKind> expectRamm;

	auto expected(ModelKind m) const -> std::optional<VerdictKind>
	{
		return m == ModelKind::Sc ? expectSc : expectRamm;
	}
	auto program() const -> Program;
};

auto builtinCases() -> const std::vector<CorpusCase> &;

auto findCase(std::string_view name) -> const CorpusCase *;

/** Contents of cases/index.txt */
auto corpusIndex() -> std::string;

} // namespace amc

#endif /* AMC_CORPUS_HPP */
