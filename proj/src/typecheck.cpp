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

#include "kbr/typecheck.hpp"

#include <algorithm>
#include <set>

namespace kbr::lang {

namespace {

constexpr SortId kIntExpr = -2; // sort tag for integer expressions

class Checker {
public:
	explicit Checker(const Vocabulary& voc) : _voc(voc) {}

	void checkTheory(Theory& theory);
	void checkAggTerm(AggregateTerm& agg);

private:
	const Vocabulary& _voc;
	std::vector<TypedVar*> _scope;
	bool _changed = false;

	TypedVar* find(const std::string& name) {
		for (auto it = _scope.rbegin(); it != _scope.rend(); ++it) {
			if ((*it)->name == name) return *it;
		}
		return nullptr;
	}

	void bindDeclared(TypedVar& v) {
		if (!v.sortName.empty() && v.sort < 0) {
			auto sid = _voc.sortId(v.sortName);
			if (!sid) throw typeError("unknown sort '" + v.sortName + "'", v.loc);
			v.sort = *sid;
		}
	}

	void assign(TypedVar& v, SortId sort, SourceLoc loc) {
		if (v.sort < 0) {
			v.sort = sort;
			_changed = true;
			return;
		}
		if (v.sort == sort) return;
		throw typeError("variable '" + v.name + "' is used both as " + _voc.sort(v.sort).name
						+ " and as " + _voc.sort(sort).name,
				loc);
	}

	bool numericSort(SortId s) const { return s == kIntExpr || (s >= 0 && _voc.sort(s).numeric); }

	// Returns the sort currently known for a term: a SortId, kIntExpr for
	// integer expressions, or -1 when not known yet.
	SortId termSort(const Term& t) {
		switch (t.kind) {
		case TermKind::Variable: {
			TypedVar* v = find(t.var);
			return v ? v->sort : -1;
		}
		case TermKind::Constant: {
			if (t.value.isNumber()) return kIntExpr;
			const auto& sorts = _voc.sortsOfSymbol(t.value.symbol());
			return sorts.size() == 1 ? sorts[0] : -1;
		}
		case TermKind::Arith:
			return kIntExpr;
		}
		return -1;
	}

	// inference pass: propagates sorts into unannotated variables
	void inferTerm(Term& t, SortId expected) {
		switch (t.kind) {
		case TermKind::Variable: {
			TypedVar* v = find(t.var);
			if (v && expected >= 0) assign(*v, expected, t.loc);
			break;
		}
		case TermKind::Constant:
			break;
		case TermKind::Arith:
			for (Term& a : t.args) inferTerm(a, -1);
			break;
		}
	}

	void inferFormula(Formula& f) {
		switch (f.kind) {
		case FKind::BoolConst:
			break;
		case FKind::Atom: {
			const Predicate& pred = _voc.pred(f.predId);
			for (size_t i = 0; i < f.args.size(); ++i) inferTerm(f.args[i], pred.argSorts[i]);
			break;
		}
		case FKind::Cmp: {
			inferTerm(f.args[0], -1);
			inferTerm(f.args[1], -1);
			if (f.cmp == CmpOp::Eq || f.cmp == CmpOp::Neq) {
				// propagate across equality when one side is known and symbolic
				SortId a = termSort(f.args[0]);
				SortId b = termSort(f.args[1]);
				if (a >= 0 && b < 0) inferTerm(f.args[1], a);
				if (b >= 0 && a < 0) inferTerm(f.args[0], b);
			}
			break;
		}
		case FKind::Not:
		case FKind::And:
		case FKind::Or:
		case FKind::Implies:
		case FKind::Equiv:
			for (Formula& c : f.children) inferFormula(c);
			break;
		case FKind::Forall:
		case FKind::Exists:
		case FKind::CountQ:
			bindDeclared(f.boundVar);
			_scope.push_back(&f.boundVar);
			inferFormula(f.children[0]);
			_scope.pop_back();
			break;
		case FKind::AggCmp: {
			size_t mark = _scope.size();
			for (TypedVar& v : f.setVars) {
				bindDeclared(v);
				_scope.push_back(&v);
			}
			inferFormula(f.children[0]);
			inferTerm(f.weight, -1);
			_scope.resize(mark);
			inferTerm(f.bound, -1);
			break;
		}
		}
	}

	// validation pass: all sorts known, membership and numeric rules hold;
	// also writes the final sort tag into every term
	void checkTerm(Term& t, SortId expected) {
		switch (t.kind) {
		case TermKind::Variable: {
			TypedVar* v = find(t.var);
			if (!v) throw typeError("unbound variable '" + t.var + "'", t.loc);
			if (v->sort < 0) {
				throw typeError("cannot infer a sort for variable '" + v->name
								+ "'; annotate it as " + v->name + " [Sort]",
						v->loc.known() ? v->loc : t.loc);
			}
			if (expected >= 0 && v->sort != expected) {
				throw typeError("variable '" + t.var + "' has sort " + _voc.sort(v->sort).name
								+ " but " + _voc.sort(expected).name + " is required here",
						t.loc);
			}
			if (expected == kIntExpr && !numericSort(v->sort)) {
				throw typeError("variable '" + t.var + "' has symbolic sort "
								+ _voc.sort(v->sort).name + " but an integer is required here",
						t.loc);
			}
			t.sort = v->sort;
			break;
		}
		case TermKind::Constant: {
			if (expected >= 0) {
				if (!_voc.elementIndex(expected, t.value)) {
					throw typeError("'" + t.value.text() + "' is not an element of sort "
									+ _voc.sort(expected).name,
							t.loc);
				}
				t.sort = expected;
				break;
			}
			if (t.value.isNumber()) {
				t.sort = kIntExpr;
				break;
			}
			const auto& sorts = _voc.sortsOfSymbol(t.value.symbol());
			if (expected == kIntExpr) {
				throw typeError("'" + t.value.text() + "' is symbolic but an integer is required here",
						t.loc);
			}
			if (sorts.size() != 1) {
				throw typeError("'" + t.value.text() + "' belongs to several sorts; this position cannot pick one",
						t.loc);
			}
			t.sort = sorts[0];
			break;
		}
		case TermKind::Arith:
			for (Term& a : t.args) checkTerm(a, kIntExpr);
			if (expected >= 0 && !_voc.sort(expected).numeric) {
				throw typeError("arithmetic cannot produce an element of symbolic sort "
								+ _voc.sort(expected).name,
						t.loc);
			}
			t.sort = kIntExpr;
			break;
		}
	}

	void checkNumericTerm(Term& t) {
		checkTerm(t, -1);
		if (!numericSort(t.sort)) {
			throw typeError("expected an integer term, got sort " + sortName(t.sort), t.loc);
		}
	}

	void checkFormula(Formula& f) {
		switch (f.kind) {
		case FKind::BoolConst:
			break;
		case FKind::Atom: {
			const Predicate& pred = _voc.pred(f.predId);
			for (size_t i = 0; i < f.args.size(); ++i) checkTerm(f.args[i], pred.argSorts[i]);
			break;
		}
		case FKind::Cmp: {
			if (f.cmp == CmpOp::Eq || f.cmp == CmpOp::Neq) {
				// a known symbolic side lends its sort to a constant that
				// belongs to several sorts
				SortId a0 = termSort(f.args[0]);
				SortId b0 = termSort(f.args[1]);
				if (a0 >= 0 && b0 == -1 && !numericSort(a0)) {
					checkTerm(f.args[0], -1);
					checkTerm(f.args[1], a0);
				} else if (b0 >= 0 && a0 == -1 && !numericSort(b0)) {
					checkTerm(f.args[1], -1);
					checkTerm(f.args[0], b0);
				} else {
					checkTerm(f.args[0], -1);
					checkTerm(f.args[1], -1);
				}
				SortId a = f.args[0].sort;
				SortId b = f.args[1].sort;
				bool bothNumeric = numericSort(a) && numericSort(b);
				if (!bothNumeric && a != b) {
					throw typeError("cannot compare sort " + sortName(a) + " with sort " + sortName(b),
							f.loc);
				}
			} else {
				checkNumericTerm(f.args[0]);
				checkNumericTerm(f.args[1]);
			}
			break;
		}
		case FKind::Not:
		case FKind::And:
		case FKind::Or:
		case FKind::Implies:
		case FKind::Equiv:
			for (Formula& c : f.children) checkFormula(c);
			break;
		case FKind::Forall:
		case FKind::Exists:
		case FKind::CountQ:
			requireKnown(f.boundVar);
			_scope.push_back(&f.boundVar);
			checkFormula(f.children[0]);
			_scope.pop_back();
			break;
		case FKind::AggCmp: {
			size_t mark = _scope.size();
			for (TypedVar& v : f.setVars) {
				requireKnown(v);
				_scope.push_back(&v);
			}
			checkFormula(f.children[0]);
			if (f.agg != AggFun::Card) {
				checkWeightVars(f.weight, f.setVars);
				checkNumericTerm(f.weight);
			}
			_scope.resize(mark);
			checkNumericTerm(f.bound);
			break;
		}
		}
	}

	std::string sortName(SortId s) const {
		return s == kIntExpr ? "int" : (s >= 0 ? _voc.sort(s).name : "?");
	}

	void requireKnown(const TypedVar& v) {
		if (v.sort < 0) {
			throw typeError("cannot infer a sort for variable '" + v.name + "'; annotate it as "
							+ v.name + " [Sort]",
					v.loc);
		}
	}

	void checkWeightVars(const Term& weight, const std::vector<TypedVar>& setVars) {
		std::set<std::string> names;
		collectFreeVars(weight, {}, names);
		for (const std::string& n : names) {
			bool inSet = std::any_of(setVars.begin(), setVars.end(),
					[&](const TypedVar& v) { return v.name == n; });
			if (!inSet) {
				throw typeError("weight term uses variable '" + n
								+ "', which is not bound by the set expression",
						weight.loc);
			}
		}
	}

	// predicates mentioned anywhere below a formula node
	static void collectPreds(const Formula& f, std::set<PredId>& out) {
		if (f.kind == FKind::Atom) out.insert(f.predId);
		for (const Formula& c : f.children) collectPreds(c, out);
	}

	void checkNoAggOverOwnDefinition(const Formula& f, const std::set<PredId>& defined) {
		if (f.kind == FKind::AggCmp || f.kind == FKind::CountQ) {
			std::set<PredId> used;
			collectPreds(f, used);
			for (PredId p : used) {
				if (defined.count(p)) {
					throw typeError("aggregate over predicate '" + _voc.pred(p).name
									+ "', which is defined in the same definition",
							f.loc);
				}
			}
		}
		for (const Formula& c : f.children) checkNoAggOverOwnDefinition(c, defined);
	}

	void checkDefinition(Definition& def, std::set<PredId>& definedSomewhere);
};

void Checker::checkDefinition(Definition& def, std::set<PredId>& definedSomewhere) {
	std::set<PredId> defined;
	for (const Rule& rule : def.rules) defined.insert(rule.head.predId);
	for (PredId p : defined) {
		if (_voc.pred(p).kind != PredKind::Search) {
			throw typeError("data predicate '" + _voc.pred(p).name + "' cannot be defined by rules",
					def.loc);
		}
		if (!definedSomewhere.insert(p).second) {
			throw typeError("predicate '" + _voc.pred(p).name + "' is defined in two definitions",
					def.loc);
		}
	}
	def.definedPreds.assign(defined.begin(), defined.end());

	for (Rule& rule : def.rules) {
		size_t mark = _scope.size();
		for (TypedVar& v : rule.vars) {
			bindDeclared(v);
			_scope.push_back(&v);
		}
		do {
			_changed = false;
			inferFormula(rule.head);
			inferFormula(rule.body);
		} while (_changed);
		checkFormula(rule.head);
		checkFormula(rule.body);
		checkNoAggOverOwnDefinition(rule.body, defined);
		_scope.resize(mark);
	}
}

void Checker::checkTheory(Theory& theory) {
	for (Formula& sentence : theory.sentences) {
		std::set<std::string> free;
		collectFreeVars(sentence, {}, free);
		if (!free.empty()) {
			throw typeError("sentence has unbound variable '" + *free.begin() + "'", sentence.loc);
		}
		do {
			_changed = false;
			inferFormula(sentence);
		} while (_changed);
		checkFormula(sentence);
	}
	std::set<PredId> definedSomewhere;
	for (Definition& def : theory.definitions) checkDefinition(def, definedSomewhere);
}

void Checker::checkAggTerm(AggregateTerm& agg) {
	std::set<std::string> free;
	collectFreeVars(agg.condition, {}, free);
	std::set<std::string> weightFree;
	collectFreeVars(agg.weight, {}, weightFree);
	free.insert(weightFree.begin(), weightFree.end());
	for (const std::string& n : free) {
		bool bound = std::any_of(agg.vars.begin(), agg.vars.end(),
				[&](const TypedVar& v) { return v.name == n; });
		if (!bound) throw typeError("unbound variable '" + n + "' in aggregate term", agg.loc);
	}

	size_t mark = _scope.size();
	for (TypedVar& v : agg.vars) {
		bindDeclared(v);
		_scope.push_back(&v);
	}
	do {
		_changed = false;
		inferFormula(agg.condition);
		inferTerm(agg.weight, -1);
	} while (_changed);
	checkFormula(agg.condition);
	if (agg.fun != AggFun::Card) {
		checkWeightVars(agg.weight, agg.vars);
		checkNumericTerm(agg.weight);
	}
	_scope.resize(mark);
}

} // namespace

void typecheck(const Vocabulary& voc, Theory& theory) {
	Checker checker(voc);
	checker.checkTheory(theory);
}

void typecheckAggTerm(const Vocabulary& voc, AggregateTerm& agg) {
	Checker checker(voc);
	checker.checkAggTerm(agg);
}

} // namespace kbr::lang
