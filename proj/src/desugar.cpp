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

#include "kbr/desugar.hpp"

namespace kbr::lang {

namespace {

CmpOp negateCmp(CmpOp op) {
	switch (op) {
	case CmpOp::Eq: return CmpOp::Neq;
	case CmpOp::Neq: return CmpOp::Eq;
	case CmpOp::Lt: return CmpOp::Geq;
	case CmpOp::Leq: return CmpOp::Gt;
	case CmpOp::Gt: return CmpOp::Leq;
	case CmpOp::Geq: return CmpOp::Lt;
	}
	return op;
}

Term shiftBound(const Term& bound, long long delta) {
	if (bound.kind == TermKind::Constant && bound.value.isNumber()) {
		Term t = Term::constant(DomainElement::number(bound.value.number() + delta), bound.loc);
		t.sort = -2;
		return t;
	}
	Term one = Term::constant(DomainElement::number(1), bound.loc);
	one.sort = -2;
	Term t = Term::arith(delta > 0 ? ArithOp::Add : ArithOp::Sub, {bound, std::move(one)}, bound.loc);
	t.sort = -2;
	return t;
}

Formula nnf(const Formula& f, bool positive);

// (agg cmp bound) under the given polarity, with cmp already one of the
// parser's operators; emits only =, =< and >=
Formula normalizeAggCmp(const Formula& f, CmpOp op, bool positive) {
	Formula cond = nnf(f.children[0], true);
	auto make = [&](CmpOp o, Term bound) {
		return Formula::aggcmp(f.agg, f.setVars, cond, f.weight, o, std::move(bound), f.loc);
	};
	switch (op) {
	case CmpOp::Lt:
		return positive ? make(CmpOp::Leq, shiftBound(f.bound, -1)) : make(CmpOp::Geq, f.bound);
	case CmpOp::Gt:
		return positive ? make(CmpOp::Geq, shiftBound(f.bound, +1)) : make(CmpOp::Leq, f.bound);
	case CmpOp::Leq:
		return positive ? make(CmpOp::Leq, f.bound) : make(CmpOp::Geq, shiftBound(f.bound, +1));
	case CmpOp::Geq:
		return positive ? make(CmpOp::Geq, f.bound) : make(CmpOp::Leq, shiftBound(f.bound, -1));
	case CmpOp::Eq:
		if (positive) return make(CmpOp::Eq, f.bound);
		return Formula::connect(FKind::Or,
				{make(CmpOp::Leq, shiftBound(f.bound, -1)), make(CmpOp::Geq, shiftBound(f.bound, +1))},
				f.loc);
	case CmpOp::Neq:
		return normalizeAggCmp(f, CmpOp::Eq, !positive);
	}
	return make(CmpOp::Eq, f.bound);
}

Formula nnf(const Formula& f, bool positive) {
	switch (f.kind) {
	case FKind::BoolConst:
		return Formula::boolConst(positive == f.boolval, f.loc);
	case FKind::Atom:
		return positive ? f : Formula::negate(f, f.loc);
	case FKind::Cmp: {
		Formula out = f;
		if (!positive) out.cmp = negateCmp(f.cmp);
		return out;
	}
	case FKind::Not:
		return nnf(f.children[0], !positive);
	case FKind::And:
	case FKind::Or: {
		bool isAnd = (f.kind == FKind::And) == positive;
		return Formula::connect(isAnd ? FKind::And : FKind::Or,
				{nnf(f.children[0], positive), nnf(f.children[1], positive)}, f.loc);
	}
	case FKind::Implies: {
		if (positive) {
			return Formula::connect(FKind::Or,
					{nnf(f.children[0], false), nnf(f.children[1], true)}, f.loc);
		}
		return Formula::connect(FKind::And,
				{nnf(f.children[0], true), nnf(f.children[1], false)}, f.loc);
	}
	case FKind::Equiv: {
		const Formula& a = f.children[0];
		const Formula& b = f.children[1];
		if (positive) {
			return Formula::connect(FKind::And,
					{Formula::connect(FKind::Or, {nnf(a, false), nnf(b, true)}, f.loc),
							Formula::connect(FKind::Or, {nnf(b, false), nnf(a, true)}, f.loc)},
					f.loc);
		}
		return Formula::connect(FKind::And,
				{Formula::connect(FKind::Or, {nnf(a, true), nnf(b, true)}, f.loc),
						Formula::connect(FKind::Or, {nnf(a, false), nnf(b, false)}, f.loc)},
				f.loc);
	}
	case FKind::Forall:
	case FKind::Exists: {
		bool isForall = (f.kind == FKind::Forall) == positive;
		return Formula::quantify(isForall ? FKind::Forall : FKind::Exists, f.boundVar,
				nnf(f.children[0], positive), f.loc);
	}
	case FKind::CountQ: {
		Formula card = Formula::aggcmp(AggFun::Card, {f.boundVar}, f.children[0],
				Term::constant(DomainElement::number(1), f.loc), CmpOp::Eq,
				Term::constant(DomainElement::number(f.count), f.loc), f.loc);
		card.weight.sort = -2;
		card.bound.sort = -2;
		CmpOp op = CmpOp::Eq;
		switch (f.countKind) {
		case CountKind::Exactly: op = CmpOp::Eq; break;
		case CountKind::AtLeast: op = CmpOp::Geq; break;
		case CountKind::AtMost: op = CmpOp::Leq; break;
		}
		return normalizeAggCmp(card, op, positive);
	}
	case FKind::AggCmp:
		return normalizeAggCmp(f, f.cmp, positive);
	}
	return f;
}

} // namespace

Formula desugarFormula(const Formula& f) {
	return nnf(f, true);
}

Theory desugarTheory(const Theory& theory) {
	Theory out;
	out.name = theory.name;
	out.sentences.reserve(theory.sentences.size());
	for (const Formula& s : theory.sentences) out.sentences.push_back(desugarFormula(s));
	out.definitions.reserve(theory.definitions.size());
	for (const Definition& def : theory.definitions) {
		Definition d;
		d.loc = def.loc;
		d.definedPreds = def.definedPreds;
		d.rules.reserve(def.rules.size());
		for (const Rule& r : def.rules) {
			Rule rule;
			rule.vars = r.vars;
			rule.head = r.head;
			rule.body = desugarFormula(r.body);
			rule.loc = r.loc;
			d.rules.push_back(std::move(rule));
		}
		out.definitions.push_back(std::move(d));
	}
	return out;
}

} // namespace kbr::lang
