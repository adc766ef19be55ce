/*
 *  Copyright (C) 2026  The kbrevise authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 */

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kbr/structure.hpp"

namespace kbr::rules {

/**
 * Ground rule sets and their least-fixpoint semantics.
 *
 * Variables are numbered 1..varCount as in the extended CNF; a literal is a
 * signed variable, DIMACS style. A rule is head <- conjunction of literals
 * (an empty body is a fact). A variable is "defined" once it is declared or
 * heads a rule; every other variable occurring in a body is "open".
 *
 * Defined variables get their values from the rules alone: stratum by
 * stratum, a defined atom is true exactly when the least fixpoint of its
 * stratum derives it. Rule sets where recursion runs through negation are
 * rejected with a witness cycle instead of being given a made-up meaning.
 */

using Lit = int;

inline int litVar(Lit l) { return l < 0 ? -l : l; }
inline bool litPos(Lit l) { return l > 0; }

struct GroundRule {
	int head = 0;
	std::vector<Lit> body;
};

struct StratificationReport {
	bool stratified = true;
	int strataCount = 0;
	// Stratum per variable; -1 for variables that are not defined.
	std::vector<int> stratumOf;
	// On failure: defined variables along a dependency cycle that crosses
	// at least one negation, in cycle order.
	std::vector<int> witnessCycle;
};

class GroundRuleSet {
public:
	explicit GroundRuleSet(int varCount);
	GroundRuleSet(const GroundRuleSet& other);
	GroundRuleSet& operator=(const GroundRuleSet& other);
	GroundRuleSet(GroundRuleSet&&) noexcept;
	GroundRuleSet& operator=(GroundRuleSet&&) noexcept;
	~GroundRuleSet();

	void declareDefined(int var);
	void add(int head, std::vector<Lit> body);

	int varCount() const { return _varCount; }
	const std::vector<GroundRule>& rules() const { return _rules; }
	bool isDefined(int var) const { return _defined[var] != 0; }
	std::vector<int> definedVars() const;
	std::vector<int> openVars() const;

	// Strata such that positive dependencies stay within or below their
	// head's stratum and negative dependencies point strictly below.
	const StratificationReport& stratify() const;

	// Extends `values` (indexed by variable, entry 0 unused) with the least
	// fixpoint per stratum. Open variables must be two-valued; defined
	// entries are ignored on input and overwritten.
	std::vector<Truth> evaluate(std::vector<Truth> values) const;

	// True iff the defined part of a total assignment equals evaluate() of
	// its open part.
	bool checkDefined(const std::vector<Truth>& total) const;

	// nullopt when checkDefined holds. Otherwise a clause (over the rule
	// set's variables) that every rule-respecting assignment satisfies and
	// the given assignment falsifies, ready for conflict learning.
	std::optional<std::vector<Lit>> stableConflict(const std::vector<Truth>& total) const;

private:
	struct Cache;

	const Cache& cache() const;
	void runStratum(const Cache& c, int s, std::vector<Truth>& vals,
			std::vector<int>* order, std::vector<int>* firedBy) const;
	void requireStratified(const Cache& c) const;
	void requireOpenCovered(const std::vector<Truth>& values) const;

	int _varCount;
	std::vector<GroundRule> _rules;
	std::vector<char> _defined;
	mutable std::unique_ptr<Cache> _cache;
};

}  // namespace kbr::rules
