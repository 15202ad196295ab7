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

#ifndef AMC_SURFACE_HPP
#define AMC_SURFACE_HPP

#include "amc/lang.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace amc {

class ParseError : public std::runtime_error {
public:
	ParseError(std::size_t line, std::size_t column, const std::string &msg);

	std::size_t line;
	std::size_t column;
};

/*
 * Structured dialect:
 *
 *   shared x = 0, y = 0;
 *   pin some_site;
 *   thread T1 {
 *     regs r = 0;
 *     store_rel(x, 1) @wx;
 *     do { r = load_acq(y); } await_while(r == 0);
 *     if (r == 1) { x = 2; } else { fence_sc; }
 *     for (i = 0; i < 2; i++) { faa_rlx(y, 1); }
 *     assert(r != 0);
 *   }
 *
 * Shared names inside expressions are relaxed loads. Every atomic
 * operation becomes one step; if/else turns into guarded cases and
 * bounded for-loops are unrolled.
 */
auto parseSurface(std::string_view text) -> Program;

/** Reads the output of printCore() */
auto parseCore(std::string_view text) -> Program;

/** Core form if the text starts with the word "core", surface otherwise */
auto parseProgram(std::string_view text) -> Program;

/** Reads and parses a file; throws std::runtime_error if it cannot be read */
auto loadProgram(const std::string &path) -> Program;

} // namespace amc

#endif /* AMC_SURFACE_HPP */
