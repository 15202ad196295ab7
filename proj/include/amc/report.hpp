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

#ifndef AMC_REPORT_HPP
#define AMC_REPORT_HPP

#include "amc/explorer.hpp"

#include <string>

namespace amc {

enum class OutputFormat : std::uint8_t { Text, Structured, GraphFile };

auto parseOutputFormat(std::string_view s) -> std::optional<OutputFormat>;

/** Per-thread listing with figure-style captions, rf sources and mo */
auto describeGraph(const ExecutionGraph &g, const GraphNames &names) -> std::string;

/* Rendering of a check result. Contains no timings, so equal runs give
   equal bytes. */
auto formatVerdict(const Program &p, const Verdict &v, ModelKind m, OutputFormat f) -> std::string;

} // namespace amc

#endif /* AMC_REPORT_HPP */
