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

#include "kbr/ast.hpp"

namespace kbr::lang {

/**
 * Direct evaluation of formulas over a total structure. Handles the full
 * language including sugar (counting quantifiers, => and <=>), so it serves
 * as the semantic reference for the rewriting and grounding passes.
 *
 * Connectives evaluate left to right with short-circuiting; aggregate and
 * counting sets always instantiate completely. Arithmetic faults (division
 * by zero, overflow, values outside a declared sort in an atom argument,
 * prod over a non-positive weight) raise KbError(Eval).
 */
class Evaluator {
public:
	explicit Evaluator(const Model& model) : _m(model), _voc(model.voc()) {}

	/** Evaluates a closed, type-checked formula. */
	bool sentence(const Formula& f);

	/** Value of a standalone aggregate term; empty min/max raises. */
	long long aggregate(const AggregateTerm& agg);

private:
	const Model& _m;
	const Vocabulary& _voc;
	std::vector<std::pair<std::string, DomainElement>> _env;

	const DomainElement& lookup(const std::string& name, SourceLoc loc) const;
	DomainElement term(const Term& t);
	long long numeric(const Term& t);
	bool formula(const Formula& f);

	struct AggWork {
		long long count = 0;
		std::vector<long long> weights;
	};
	void collect(AggFun fun, const std::vector<TypedVar>& vars, size_t i, const Formula& cond,
			const Term& weight, AggWork& work);
	bool aggCmp(const Formula& f);
};

/** True iff all sentences of the theory hold in the model (definitions aside). */
bool evalSentences(const Theory& theory, const Model& model);

} // namespace kbr::lang
