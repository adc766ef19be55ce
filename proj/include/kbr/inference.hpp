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

#include <map>
#include <optional>
#include <vector>

#include "kbr/ast.hpp"
#include "kbr/ground.hpp"
#include "kbr/solver.hpp"

namespace kbr::infer {

/**
 * The four inferences over a typechecked theory. Unsatisfiable outcomes are
 * ordinary nullopt returns; malformed inputs raise KbError. One call builds
 * one grounding and runs one single-threaded solver, so independent calls may
 * run concurrently.
 */

struct Options {
	bool propagate = true; // run theory propagation before grounding
	ground::GroundOptions ground;
	solver::SolverOptions solver;
};

/** Sizes of the grounding a call solved, for reporting. */
struct GroundSizes {
	int vars = 0;
	long long clauses = 0;
	int rules = 0;
	int cards = 0;
};

GroundSizes sizesOf(const ecnf::Ecnf& e);

/**
 * True iff the model satisfies every sentence under direct evaluation and
 * gives every definition's predicates exactly their least-fixpoint values.
 */
bool modelCheck(const lang::Theory& theory, const Model& model);

struct Expansion {
	Model model;
	GroundSizes sizes;
	solver::SolverStats stats;
};

/** A model of the theory extending the structure, or nullopt. */
std::optional<Expansion> modelExpand(const lang::Theory& theory,
		const ThreeValuedStructure& s, const Options& opt = Options());

struct Optimum {
	Model model;
	long long value = 0;
	GroundSizes sizes;
	solver::SolverStats stats;
};

/**
 * A model extending the structure that minimizes the card or sum aggregate
 * term, or nullopt when no model exists. Rejects min, max and prod terms.
 * The term is typechecked here; pass it as parsed.
 */
std::optional<Optimum> optimize(const lang::Theory& theory, const ThreeValuedStructure& s,
		const lang::AggregateTerm& objective, const Options& opt = Options());

/** Per-atom revision cost; atoms absent from the map cost defaultWeight. */
struct CostFunction {
	std::map<DomainAtom, long long> weight;
	long long defaultWeight = 1;

	long long of(const DomainAtom& atom) const {
		auto it = weight.find(atom);
		return it == weight.end() ? defaultWeight : it->second;
	}
};

/**
 * What to revise: the atoms of C must flip, the atoms of G must keep their
 * value, and the change to everything else is minimized, counted (no cost
 * function) or weighted (cost function present). Data-predicate atoms are
 * fixed by construction and may appear in neither set.
 */
struct RevisionProblem {
	std::vector<DomainAtom> changes;     // C
	std::vector<DomainAtom> limitations; // G
	std::optional<CostFunction> cost;    // engaged for the weighted criterion
	bool verifyModel = true;
};

/** One changed atom of a revision, with its direction. */
struct AtomChange {
	DomainAtom atom;
	bool from = false;
	bool to = false;

	bool operator==(const AtomChange&) const = default;
};

struct Revision {
	Model model;                        // the revised model
	std::vector<AtomChange> additional; // S: changed atoms outside C, atom order
	long long metric = 0;               // summed weights over S
	GroundSizes sizes;
	solver::SolverStats stats;
};

/**
 * A model of the theory in which every atom of C has the opposite of its
 * value in `model`, every atom of G keeps its value, and the additional
 * changes have minimal weight. nullopt when no such model exists. Raises
 * KbError(Input) when C and G overlap, mention data-predicate atoms or atoms
 * outside their sorts, when a cost weight is below one, and when `model`
 * fails modelCheck (unless verifyModel is off).
 */
std::optional<Revision> revise(const lang::Theory& theory, const Model& model,
		const RevisionProblem& problem, const Options& opt = Options());

} // namespace kbr::infer
