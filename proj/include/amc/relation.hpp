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

#ifndef AMC_RELATION_HPP
#define AMC_RELATION_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace amc {

/*
 * Binary relation over {0..n-1} stored as a dense bit matrix.
 * Graphs handled here have at most a few hundred events.
 */
class Relation {
public:
	Relation() = default;
	explicit Relation(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

	auto size() const -> std::size_t { return n_; }

	void set(std::size_t a, std::size_t b) { bits_[a * words_ + b / 64] |= bit(b); }
	auto test(std::size_t a, std::size_t b) const -> bool
	{
		return (bits_[a * words_ + b / 64] & bit(b)) != 0;
	}

	/** this |= other */
	void unite(const Relation &other)
	{
		for (std::size_t i = 0; i < bits_.size(); ++i)
			bits_[i] |= other.bits_[i];
	}

	/** Row A |= row B */
	void orRow(std::size_t a, std::size_t b)
	{
		auto *ra = &bits_[a * words_];
		const auto *rb = &bits_[b * words_];
		for (std::size_t w = 0; w < words_; ++w)
			ra[w] |= rb[w];
	}

	/** Transitive closure (Warshall, row-parallel) */
	void close()
	{
		for (std::size_t k = 0; k < n_; ++k)
			for (std::size_t i = 0; i < n_; ++i)
				if (test(i, k))
					orRow(i, k);
	}

	auto irreflexive() const -> bool
	{
		for (std::size_t i = 0; i < n_; ++i)
			if (test(i, i))
				return false;
		return true;
	}

	/** Acyclicity test on a copy */
	auto acyclic() const -> bool
	{
		Relation c = *this;
		c.close();
		return c.irreflexive();
	}

	/** this ; other */
	auto compose(const Relation &other) const -> Relation
	{
		Relation r(n_);
		for (std::size_t i = 0; i < n_; ++i)
			for (std::size_t k = 0; k < n_; ++k)
				if (test(i, k)) {
					auto *ri = &r.bits_[i * words_];
					const auto *rk = &other.bits_[k * words_];
					for (std::size_t w = 0; w < words_; ++w)
						ri[w] |= rk[w];
				}
		return r;
	}

	/** this ∪ id */
	auto reflexive() const -> Relation
	{
		Relation r = *this;
		for (std::size_t i = 0; i < n_; ++i)
			r.set(i, i);
		return r;
	}

private:
	static auto bit(std::size_t b) -> std::uint64_t { return std::uint64_t{1} << (b % 64); }

	std::size_t n_ = 0;
	std::size_t words_ = 0;
	std::vector<std::uint64_t> bits_;
};

} // namespace amc

#endif /* AMC_RELATION_HPP */
