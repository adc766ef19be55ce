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

#include "kbr/inference.hpp"

#include <set>
#include <string>
#include <utility>

#include "kbr/evaluate.hpp"
#include "kbr/typecheck.hpp"

namespace kbr::infer {

namespace {

Model projectModel(const ecnf::Ecnf& e, const std::vector<Truth>& total) {
	ThreeValuedStructure s(e.voc);
	for (int idx = 0; idx < e.voc->atomCount(); ++idx) {
		s.set(idx, total[e.atomVar(idx)]);
	}
	return Model(std::move(s));
}

/** The structure to ground from: the input itself, or its propagation. A
 *  nullopt means no model extends the input at all. */
std::optional<ThreeValuedStructure> groundBase(const lang::Theory& theory,
		const ThreeValuedStructure& s, const Options& opt) {
	if (!opt.propagate) return s;
	return ground::propagate(theory, s, opt.ground);
}

bool isData(const Vocabulary& voc, int atomIdx) {
	return voc.pred(voc.predOfAtom(atomIdx)).kind == PredKind::Data;
}

} // namespace

GroundSizes sizesOf(const ecnf::Ecnf& e) {
	GroundSizes z;
	z.vars = e.varCount;
	z.clauses = (long long)e.clauses.size();
	z.rules = e.ruleCount();
	z.cards = (int)e.constraints.size();
	return z;
}

bool modelCheck(const lang::Theory& theory, const Model& model) {
	if (!lang::evalSentences(theory, model)) return false;
	if (theory.definitions.empty()) return true;
	// Grounding the definitions against a total structure computes each least
	// fixpoint outright and compares it with the model, leaving an empty
	// clause exactly when some defined atom disagrees.
	lang::Theory defs;
	defs.name = theory.name;
	defs.definitions = theory.definitions;
	ecnf::Ecnf e = ground::ground(defs, model.structure());
	for (const auto& clause : e.clauses) {
		if (clause.empty()) return false;
	}
	return true;
}

std::optional<Expansion> modelExpand(const lang::Theory& theory,
		const ThreeValuedStructure& s, const Options& opt) {
	std::optional<ThreeValuedStructure> base = groundBase(theory, s, opt);
	if (!base) return std::nullopt;
	ecnf::Ecnf e = ground::ground(theory, *base, opt.ground);
	solver::Solver solver(e, opt.solver);
	if (!solver.solve()) return std::nullopt;
	return Expansion{projectModel(e, solver.model()), sizesOf(e), solver.stats()};
}

std::optional<Optimum> optimize(const lang::Theory& theory, const ThreeValuedStructure& s,
		const lang::AggregateTerm& objective, const Options& opt) {
	if (objective.fun != lang::AggFun::Card && objective.fun != lang::AggFun::Sum) {
		throw inputError("objective must be a card or sum aggregate", objective.loc);
	}
	lang::AggregateTerm obj = objective;
	lang::typecheckAggTerm(s.voc(), obj);
	std::optional<ThreeValuedStructure> base = groundBase(theory, s, opt);
	if (!base) return std::nullopt;
	ground::Objective linear;
	ecnf::Ecnf e = ground::ground(theory, obj, *base, linear, opt.ground);
	solver::Objective items;
	items.items = linear.items;
	auto r = solver::minimize(e, items, {}, opt.solver);
	if (!r) return std::nullopt;
	return Optimum{projectModel(e, r->model), r->value + linear.offset, sizesOf(e), r->stats};
}

std::optional<Revision> revise(const lang::Theory& theory, const Model& model,
		const RevisionProblem& problem, const Options& opt) {
	const Vocabulary& voc = model.voc();

	auto resolve = [&](const DomainAtom& atom, const char* which) {
		if (atom.pred < 0 || atom.pred >= voc.predCount()) {
			throw inputError(std::string(which) + " atom names an unknown predicate");
		}
		auto idx = voc.atomIndex(atom);
		if (!idx) {
			throw inputError(std::string(which) + " atom " + voc.atomText(atom)
					+ " lies outside the vocabulary's sorts");
		}
		if (voc.pred(atom.pred).kind == PredKind::Data) {
			throw inputError(std::string(which) + " atom " + voc.atomText(atom)
					+ " has a data predicate; data atoms are fixed");
		}
		return *idx;
	};

	std::set<int> cSet;
	std::set<int> gSet;
	for (const DomainAtom& a : problem.changes) cSet.insert(resolve(a, "changes"));
	for (const DomainAtom& a : problem.limitations) {
		int idx = resolve(a, "limitations");
		if (cSet.count(idx)) {
			throw inputError("atom " + voc.atomText(idx)
					+ " appears in both the changes and the limitations");
		}
		gSet.insert(idx);
	}
	if (problem.cost) {
		if (problem.cost->defaultWeight < 1) throw inputError("cost weights must be at least one");
		for (const auto& [atom, w] : problem.cost->weight) {
			if (w < 1) {
				throw inputError("cost weight for " + voc.atomText(atom)
						+ " must be at least one");
			}
			if (!voc.atomIndex(atom)) {
				throw inputError("cost atom " + voc.atomText(atom)
						+ " lies outside the vocabulary's sorts");
			}
		}
	}
	if (problem.verifyModel && !modelCheck(theory, model)) {
		throw inputError("the given interpretation is not a model of the theory");
	}

	// Ground once, with the data atoms fixed and every search atom open.
	ThreeValuedStructure open(model.vocPtr());
	for (int idx = 0; idx < voc.atomCount(); ++idx) {
		if (isData(voc, idx)) open.set(idx, model.structure().value(idx));
	}
	std::optional<ThreeValuedStructure> base = groundBase(theory, open, opt);
	if (!base) return std::nullopt;
	ecnf::Ecnf e = ground::ground(theory, *base, opt.ground);

	std::vector<ecnf::Lit> assumptions;
	for (int idx : cSet) {
		assumptions.push_back(model.holds(idx) ? -e.atomVar(idx) : e.atomVar(idx));
	}
	for (int idx : gSet) {
		assumptions.push_back(model.holds(idx) ? e.atomVar(idx) : -e.atomVar(idx));
	}

	// Minimize the weighted flips of the remaining search atoms.
	solver::Objective obj;
	for (int idx = 0; idx < voc.atomCount(); ++idx) {
		if (isData(voc, idx) || cSet.count(idx) || gSet.count(idx)) continue;
		long long w = problem.cost ? problem.cost->of(voc.atomAt(idx)) : 1;
		obj.items.emplace_back(model.holds(idx) ? -e.atomVar(idx) : e.atomVar(idx), w);
	}

	auto r = solver::minimize(e, obj, assumptions, opt.solver);
	if (!r) return std::nullopt;

	Revision rev{projectModel(e, r->model), {}, r->value, sizesOf(e), r->stats};
	for (int idx = 0; idx < voc.atomCount(); ++idx) {
		if (cSet.count(idx)) continue;
		bool before = model.holds(idx);
		bool after = rev.model.holds(idx);
		if (before != after) rev.additional.push_back({voc.atomAt(idx), before, after});
	}
	return rev;
}

} // namespace kbr::infer
