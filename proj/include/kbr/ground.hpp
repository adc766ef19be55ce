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

#include <optional>

#include "kbr/ast.hpp"
#include "kbr/ecnf.hpp"

namespace kbr::ground {

struct GroundOptions {
	// Budget for instantiating set expressions, in ground literals. The
	// default comes from KBREVISE_SIZE_CAP when that is set.
	long long sizeCap;

	GroundOptions();
};

/**
 * A grounded optimization objective: minimize offset plus the summed weights
 * of the true literals. Weights are positive by normalization; set instances
 * whose condition folds to a constant move into the offset.
 */
struct Objective {
	std::vector<std::pair<ecnf::Lit, long long>> items;
	long long offset = 0;
};

/**
 * Grounds a typechecked theory against a structure. The result's total
 * assignments, projected onto the atom variables, are exactly the models of
 * the theory that extend the structure. Atoms the structure decides are
 * folded away where that is sound; atoms a definition forces keep their
 * variables so that every model stays well-founded.
 *
 * Throws on arithmetic faults while folding, on sort escapes, when a set
 * expression exceeds the size cap, and when a definition's ground rules
 * recurse through negation.
 */
ecnf::Ecnf ground(const lang::Theory& theory, const ThreeValuedStructure& s,
		const GroundOptions& opt = GroundOptions());

/**
 * Like ground(), but also grounds a standalone card or sum aggregate term
 * into `objective`, over the returned Ecnf's variables. Condition formulas
 * that do not reduce to a literal get an auxiliary pinned to them by
 * equivalence clauses. Rejects min, max and prod objectives.
 */
ecnf::Ecnf ground(const lang::Theory& theory, const lang::AggregateTerm& objective,
		const ThreeValuedStructure& s, Objective& out,
		const GroundOptions& opt = GroundOptions());

/**
 * Extends the structure with every atom value that follows from the theory
 * by unit-propagation-strength reasoning: unit propagation over the ground
 * clauses and rule completions, plus outright evaluation of definitions
 * whose open atoms are all decided. Returns nullopt when that reasoning
 * finds a contradiction. Monotone and idempotent; every model of the theory
 * extending the input also extends the output.
 */
std::optional<ThreeValuedStructure> propagate(const lang::Theory& theory,
		const ThreeValuedStructure& s, const GroundOptions& opt = GroundOptions());

} // namespace kbr::ground
