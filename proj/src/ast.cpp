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

#include "kbr/ast.hpp"

namespace kbr::lang {

Term Term::variable(std::string name, SourceLoc l) {
	Term t;
	t.kind = TermKind::Variable;
	t.var = std::move(name);
	t.loc = l;
	return t;
}

Term Term::constant(DomainElement e, SourceLoc l) {
	Term t;
	t.kind = TermKind::Constant;
	t.value = std::move(e);
	t.loc = l;
	return t;
}

Term Term::arith(ArithOp op, std::vector<Term> args, SourceLoc l) {
	Term t;
	t.kind = TermKind::Arith;
	t.op = op;
	t.args = std::move(args);
	t.loc = l;
	return t;
}

bool equalTerm(const Term& a, const Term& b) {
	if (a.kind != b.kind) return false;
	switch (a.kind) {
	case TermKind::Variable:
		return a.var == b.var;
	case TermKind::Constant:
		return a.value == b.value;
	case TermKind::Arith:
		if (a.op != b.op || a.args.size() != b.args.size()) return false;
		for (size_t i = 0; i < a.args.size(); ++i) {
			if (!equalTerm(a.args[i], b.args[i])) return false;
		}
		return true;
	}
	return false;
}

static bool equalTypedVar(const TypedVar& a, const TypedVar& b) {
	return a.name == b.name && a.sortName == b.sortName;
}

Formula Formula::boolConst(bool v, SourceLoc l) {
	Formula f;
	f.kind = FKind::BoolConst;
	f.boolval = v;
	f.loc = l;
	return f;
}

Formula Formula::atom(std::string pred, PredId id, std::vector<Term> args, SourceLoc l) {
	Formula f;
	f.kind = FKind::Atom;
	f.pred = std::move(pred);
	f.predId = id;
	f.args = std::move(args);
	f.loc = l;
	return f;
}

Formula Formula::cmpf(CmpOp op, Term lhs, Term rhs, SourceLoc l) {
	Formula f;
	f.kind = FKind::Cmp;
	f.cmp = op;
	f.args = {std::move(lhs), std::move(rhs)};
	f.loc = l;
	return f;
}

Formula Formula::connect(FKind kind, std::vector<Formula> children, SourceLoc l) {
	Formula f;
	f.kind = kind;
	f.children = std::move(children);
	f.loc = l;
	return f;
}

Formula Formula::negate(Formula g, SourceLoc l) {
	Formula f;
	f.kind = FKind::Not;
	f.children.push_back(std::move(g));
	f.loc = l;
	return f;
}

Formula Formula::quantify(FKind kind, TypedVar v, Formula body, SourceLoc l) {
	Formula f;
	f.kind = kind;
	f.boundVar = std::move(v);
	f.children.push_back(std::move(body));
	f.loc = l;
	return f;
}

Formula Formula::countq(CountKind ck, long long k, TypedVar v, Formula body, SourceLoc l) {
	Formula f;
	f.kind = FKind::CountQ;
	f.countKind = ck;
	f.count = k;
	f.boundVar = std::move(v);
	f.children.push_back(std::move(body));
	f.loc = l;
	return f;
}

Formula Formula::aggcmp(AggFun agg, std::vector<TypedVar> vars, Formula cond, Term weight,
		CmpOp cmp, Term bound, SourceLoc l) {
	Formula f;
	f.kind = FKind::AggCmp;
	f.agg = agg;
	f.setVars = std::move(vars);
	f.children.push_back(std::move(cond));
	f.weight = std::move(weight);
	f.cmp = cmp;
	f.bound = std::move(bound);
	f.loc = l;
	return f;
}

bool equalFormula(const Formula& a, const Formula& b) {
	if (a.kind != b.kind) return false;
	switch (a.kind) {
	case FKind::BoolConst:
		return a.boolval == b.boolval;
	case FKind::Atom:
		if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
		for (size_t i = 0; i < a.args.size(); ++i) {
			if (!equalTerm(a.args[i], b.args[i])) return false;
		}
		return true;
	case FKind::Cmp:
		return a.cmp == b.cmp && equalTerm(a.args[0], b.args[0]) && equalTerm(a.args[1], b.args[1]);
	case FKind::Not:
	case FKind::And:
	case FKind::Or:
	case FKind::Implies:
	case FKind::Equiv:
		break;
	case FKind::Forall:
	case FKind::Exists:
		if (!equalTypedVar(a.boundVar, b.boundVar)) return false;
		break;
	case FKind::CountQ:
		if (!equalTypedVar(a.boundVar, b.boundVar)) return false;
		if (a.countKind != b.countKind || a.count != b.count) return false;
		break;
	case FKind::AggCmp:
		if (a.agg != b.agg || a.cmp != b.cmp) return false;
		if (a.setVars.size() != b.setVars.size()) return false;
		for (size_t i = 0; i < a.setVars.size(); ++i) {
			if (!equalTypedVar(a.setVars[i], b.setVars[i])) return false;
		}
		if (!equalTerm(a.weight, b.weight) || !equalTerm(a.bound, b.bound)) return false;
		break;
	}
	if (a.children.size() != b.children.size()) return false;
	for (size_t i = 0; i < a.children.size(); ++i) {
		if (!equalFormula(a.children[i], b.children[i])) return false;
	}
	return true;
}

bool equalTheory(const Theory& a, const Theory& b) {
	if (a.sentences.size() != b.sentences.size()) return false;
	for (size_t i = 0; i < a.sentences.size(); ++i) {
		if (!equalFormula(a.sentences[i], b.sentences[i])) return false;
	}
	if (a.definitions.size() != b.definitions.size()) return false;
	for (size_t i = 0; i < a.definitions.size(); ++i) {
		const Definition& da = a.definitions[i];
		const Definition& db = b.definitions[i];
		if (da.rules.size() != db.rules.size()) return false;
		for (size_t j = 0; j < da.rules.size(); ++j) {
			const Rule& ra = da.rules[j];
			const Rule& rb = db.rules[j];
			if (ra.vars.size() != rb.vars.size()) return false;
			for (size_t k = 0; k < ra.vars.size(); ++k) {
				if (!equalTypedVar(ra.vars[k], rb.vars[k])) return false;
			}
			if (!equalFormula(ra.head, rb.head) || !equalFormula(ra.body, rb.body)) return false;
		}
	}
	return true;
}

void collectFreeVars(const Term& t, const std::set<std::string>& bound, std::set<std::string>& out) {
	switch (t.kind) {
	case TermKind::Variable:
		if (!bound.count(t.var)) out.insert(t.var);
		break;
	case TermKind::Constant:
		break;
	case TermKind::Arith:
		for (const Term& a : t.args) collectFreeVars(a, bound, out);
		break;
	}
}

void collectFreeVars(const Formula& f, std::set<std::string> bound, std::set<std::string>& out) {
	switch (f.kind) {
	case FKind::BoolConst:
		return;
	case FKind::Atom:
	case FKind::Cmp:
		for (const Term& t : f.args) collectFreeVars(t, bound, out);
		return;
	case FKind::Not:
	case FKind::And:
	case FKind::Or:
	case FKind::Implies:
	case FKind::Equiv:
		for (const Formula& c : f.children) collectFreeVars(c, bound, out);
		return;
	case FKind::Forall:
	case FKind::Exists:
	case FKind::CountQ:
		bound.insert(f.boundVar.name);
		collectFreeVars(f.children[0], bound, out);
		return;
	case FKind::AggCmp: {
		collectFreeVars(f.bound, bound, out);
		std::set<std::string> inner = bound;
		for (const TypedVar& v : f.setVars) inner.insert(v.name);
		collectFreeVars(f.children[0], inner, out);
		collectFreeVars(f.weight, inner, out);
		return;
	}
	}
}

} // namespace kbr::lang
