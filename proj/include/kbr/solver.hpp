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

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kbr/ecnf.hpp"
#include "kbr/rules.hpp"

namespace kbr::solver {

using ecnf::Lit;

struct SolverOptions {
	std::uint64_t seed = 1;
	int randomPercent = 2; // share of branching decisions taken at random
};

struct SolverStats {
	std::uint64_t decisions = 0;
	std::uint64_t conflicts = 0;
	std::uint64_t propagations = 0;
	std::uint64_t restarts = 0;
	std::uint64_t stableConflicts = 0;
};

/** A sum of positive weights over literals, to be minimized. */
struct Objective {
	std::vector<std::pair<Lit, long long>> items;

	long long valueUnder(const std::vector<Truth>& total) const;
};

struct OptResult {
	std::vector<Truth> model;
	long long value = 0;
	SolverStats stats;
};

/**
 * Conflict-driven search over an extended CNF. Clauses use two watched
 * literals; linear constraints a counting propagator with lazily built
 * reasons; rule groups contribute their completion clauses eagerly and a
 * stable-model check at every total assignment, whose conflict clauses are
 * learned like any other. Runs are deterministic for a fixed seed.
 *
 * The solver may be re-solved after adding clauses or constraints; learned
 * clauses are kept, which is sound because additions only shrink the set of
 * models.
 */
class Solver {
public:
	explicit Solver(const ecnf::Ecnf& e, SolverOptions opt = SolverOptions());

	/** True when a model extending the assumptions exists. */
	bool solve(const std::vector<Lit>& assumptions = {});

	/** The satisfying assignment found by the last successful solve(),
	 *  indexed by variable; entry 0 is unused. */
	const std::vector<Truth>& model() const { return _model; }

	void addClause(std::vector<Lit> clause);

	/** Adds a guarded linear constraint; weights must be positive. */
	void addConstraint(const ecnf::Constraint& c);

	int varCount() const { return _n; }
	const SolverStats& stats() const { return _stats; }

private:
	enum class RKind : signed char { None, Clause, Constraint };
	struct Reason {
		RKind kind = RKind::None;
		int idx = 0;
	};
	struct LinCon {
		Lit guard = 0;
		bool geq = true;
		long long bound = 0;
		// Sorted by weight, largest first.
		std::vector<std::pair<long long, Lit>> items;
		// geq: total weight of members not yet false; leq: of members true.
		long long counter = 0;
	};
	struct CWatch {
		int con = 0;
		long long delta = 0;
	};

	signed char value(Lit l) const {
		signed char a = _assign[l < 0 ? -l : l];
		return l < 0 ? (signed char)-a : a;
	}
	static int enc(Lit l) { return l < 0 ? -2 * l + 1 : 2 * l; }
	int decisionLevel() const { return (int)_trailLim.size(); }

	void enqueue(Lit p, Reason r);
	void cancelUntil(int level);
	bool propagate();
	bool propagateClauses(Lit p);
	bool checkCon(int ci);
	void markDirty(int ci);
	void conflictFromCon(int ci);
	bool resolveConflict();
	std::vector<Lit> reasonFor(int var) const;
	void analyze(std::vector<Lit>& learnt, int& backjump);
	void learn(std::vector<Lit> learnt, int backjump);
	void bump(int var);
	void decayActivity();
	Lit pickBranch();
	std::uint64_t nextRand();
	bool addClauseInternal(std::vector<Lit> clause);
	void addConstraintInternal(const ecnf::Constraint& c);
	void attachWatches(int ci);
	bool stableCheck();

	int _n = 0;
	SolverOptions _opt;
	SolverStats _stats;
	bool _unsat = false;

	std::vector<std::vector<Lit>> _clauses;
	std::vector<std::vector<int>> _watches; // by encoded literal
	std::vector<LinCon> _cons;
	std::vector<std::vector<CWatch>> _cwatch; // by encoded literal
	std::vector<rules::GroundRuleSet> _groups;

	std::vector<signed char> _assign; // by var: 0 open, 1 true, -1 false
	std::vector<int> _level;
	std::vector<int> _trailPos;
	std::vector<Reason> _reason;
	std::vector<signed char> _applied; // by var: constraint counters updated
	std::vector<Lit> _trail;
	std::vector<int> _trailLim;
	size_t _qhead = 0;
	int _assigned = 0;
	std::vector<Lit> _confl; // falsified clause driving the current conflict

	std::vector<int> _dirty; // constraints to recheck after backtracking
	std::vector<signed char> _inDirty;

	std::vector<double> _activity;
	double _actInc = 1.0;
	std::vector<signed char> _phase; // saved polarity, initially false
	std::vector<signed char> _seen;  // analyze scratch

	std::uint64_t _rng = 1;
	std::vector<Truth> _model;
};

/**
 * Minimizes the objective over the models of the ecnf that satisfy the
 * assumptions, by linear descent: solve, then demand a strictly smaller
 * value, until unsatisfiable. Every intermediate incumbent is feasible.
 * Returns nothing when no model satisfies the assumptions at all.
 */
std::optional<OptResult> minimize(const ecnf::Ecnf& e, const Objective& obj,
		const std::vector<Lit>& assumptions = {}, SolverOptions opt = SolverOptions());

} // namespace kbr::solver
