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

#include <iosfwd>
#include <string>
#include <vector>

#include "kbr/rules.hpp"
#include "kbr/structure.hpp"

namespace kbr::ecnf {

/**
 * Extended CNF: clauses plus native rule groups and linear constraints.
 *
 * Variables are numbered from 1. The first atomVars variables stand for the
 * vocabulary's ground atoms in their dense order (atom index + 1); every
 * variable above that is an auxiliary introduced while grounding, in
 * creation order. Literals are signed variables, DIMACS style.
 */

using Lit = int;

enum class BodyKind { Conj, Disj };

/** One rule of a group: head holds iff the body does, under least-fixpoint
 *  semantics taken over the whole group. */
struct EcnfRule {
	int head = 0;
	BodyKind kind = BodyKind::Conj;
	std::vector<Lit> body;
};

/** The ground rules of one source definition. Heads are distinct; an empty
 *  disjunctive body means the head is never derivable. */
struct RuleGroup {
	std::vector<EcnfRule> rules;
};

/**
 * A linear constraint over literals, optionally shielded by a guard literal:
 * the constraint states guard-or-(sum of the weights of the true literals
 * cmp bound). Weights are positive; a guard of 0 means no guard.
 */
struct Constraint {
	Lit guard = 0;
	std::vector<Lit> lits;
	std::vector<long long> weights;
	long long bound = 0;
	bool geq = true; // sum >= bound when true, sum <= bound otherwise

	bool cardinality() const {
		for (long long w : weights) {
			if (w != 1) return false;
		}
		return true;
	}
};

struct Ecnf {
	VocabularyPtr voc;
	int varCount = 0;
	int atomVars = 0;
	std::vector<std::vector<Lit>> clauses;
	std::vector<RuleGroup> groups;
	std::vector<Constraint> constraints;
	std::vector<std::string> auxNote; // per auxiliary variable, what it stands for

	int atomVar(int atomIdx) const { return atomIdx + 1; }

	int newAux(std::string note) {
		auxNote.push_back(std::move(note));
		return ++varCount;
	}

	bool isAtomVar(int var) const { return var >= 1 && var <= atomVars; }

	/** Human-readable meaning of a variable: atom text or auxiliary note. */
	std::string note(int var) const;

	int ruleCount() const {
		int n = 0;
		for (const RuleGroup& g : groups) n += (int)g.rules.size();
		return n;
	}
};

/** The group's rules as a plain ground rule set over the Ecnf's variables. */
rules::GroundRuleSet toRuleSet(const Ecnf& e, const RuleGroup& g);

/** Clauses entailed by the group: each head is true iff some rule body is. */
std::vector<std::vector<Lit>> completionClauses(const RuleGroup& g);

bool clauseHolds(const std::vector<Lit>& clause, const std::vector<Truth>& values);
bool constraintHolds(const Constraint& c, const std::vector<Truth>& values);

/**
 * True iff the total assignment (indexed by variable, entry 0 unused)
 * satisfies every clause and constraint and gives every rule group's defined
 * variables exactly their least-fixpoint values.
 */
bool checkEcnf(const Ecnf& e, const std::vector<Truth>& total);

/** Text dump: header, provenance comments, clauses, rules and constraints. */
void dumpEcnf(const Ecnf& e, std::ostream& out);
std::string dumpEcnf(const Ecnf& e);

} // namespace kbr::ecnf
