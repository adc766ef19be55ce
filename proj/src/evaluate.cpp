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

#include "kbr/evaluate.hpp"

#include <algorithm>
#include <limits>

namespace kbr::lang {

namespace {

long long addChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_add_overflow(a, b, &r)) throw evalError("integer overflow", loc);
	return r;
}

long long subChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_sub_overflow(a, b, &r)) throw evalError("integer overflow", loc);
	return r;
}

long long mulChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_mul_overflow(a, b, &r)) throw evalError("integer overflow", loc);
	return r;
}

long long divChecked(long long a, long long b, SourceLoc loc) {
	if (b == 0) throw evalError("division by zero", loc);
	if (a == std::numeric_limits<long long>::min() && b == -1) throw evalError("integer overflow", loc);
	return a / b; // truncates toward zero
}

long long modChecked(long long a, long long b, SourceLoc loc) {
	if (b == 0) throw evalError("division by zero", loc);
	if (a == std::numeric_limits<long long>::min() && b == -1) throw evalError("integer overflow", loc);
	return a % b; // sign follows the dividend
}

long long absChecked(long long a, SourceLoc loc) {
	if (a == std::numeric_limits<long long>::min()) throw evalError("integer overflow", loc);
	return a < 0 ? -a : a;
}

bool cmpNumbers(CmpOp op, long long a, long long b) {
	switch (op) {
	case CmpOp::Eq: return a == b;
	case CmpOp::Neq: return a != b;
	case CmpOp::Lt: return a < b;
	case CmpOp::Leq: return a <= b;
	case CmpOp::Gt: return a > b;
	case CmpOp::Geq: return a >= b;
	}
	return false;
}

} // namespace

const DomainElement& Evaluator::lookup(const std::string& name, SourceLoc loc) const {
	for (auto it = _env.rbegin(); it != _env.rend(); ++it) {
		if (it->first == name) return it->second;
	}
	throw evalError("unbound variable '" + name + "'", loc);
}

DomainElement Evaluator::term(const Term& t) {
	switch (t.kind) {
	case TermKind::Variable:
		return lookup(t.var, t.loc);
	case TermKind::Constant:
		return t.value;
	case TermKind::Arith:
		break;
	}
	switch (t.op) {
	case ArithOp::Add: return DomainElement::number(addChecked(numeric(t.args[0]), numeric(t.args[1]), t.loc));
	case ArithOp::Sub: return DomainElement::number(subChecked(numeric(t.args[0]), numeric(t.args[1]), t.loc));
	case ArithOp::Mul: return DomainElement::number(mulChecked(numeric(t.args[0]), numeric(t.args[1]), t.loc));
	case ArithOp::Div: return DomainElement::number(divChecked(numeric(t.args[0]), numeric(t.args[1]), t.loc));
	case ArithOp::Mod: return DomainElement::number(modChecked(numeric(t.args[0]), numeric(t.args[1]), t.loc));
	case ArithOp::Neg: return DomainElement::number(subChecked(0, numeric(t.args[0]), t.loc));
	case ArithOp::Abs: return DomainElement::number(absChecked(numeric(t.args[0]), t.loc));
	}
	throw evalError("malformed term", t.loc);
}

long long Evaluator::numeric(const Term& t) {
	DomainElement v = term(t);
	if (!v.isNumber()) throw evalError("'" + v.text() + "' is not an integer", t.loc);
	return v.number();
}

bool Evaluator::formula(const Formula& f) {
	switch (f.kind) {
	case FKind::BoolConst:
		return f.boolval;
	case FKind::Atom: {
		DomainAtom atom;
		atom.pred = f.predId;
		atom.args.reserve(f.args.size());
		for (const Term& arg : f.args) atom.args.push_back(term(arg));
		auto idx = _voc.atomIndex(atom);
		if (!idx) {
			throw evalError("atom " + _voc.atomText(atom) + " uses a value outside the declared argument sort",
					f.loc);
		}
		return _m.holds(*idx);
	}
	case FKind::Cmp: {
		if (f.cmp == CmpOp::Eq || f.cmp == CmpOp::Neq) {
			DomainElement a = term(f.args[0]);
			DomainElement b = term(f.args[1]);
			return (f.cmp == CmpOp::Eq) == (a == b);
		}
		return cmpNumbers(f.cmp, numeric(f.args[0]), numeric(f.args[1]));
	}
	case FKind::Not:
		return !formula(f.children[0]);
	case FKind::And:
		return formula(f.children[0]) && formula(f.children[1]);
	case FKind::Or:
		return formula(f.children[0]) || formula(f.children[1]);
	case FKind::Implies:
		return !formula(f.children[0]) || formula(f.children[1]);
	case FKind::Equiv:
		return formula(f.children[0]) == formula(f.children[1]);
	case FKind::Forall:
	case FKind::Exists: {
		bool isForall = f.kind == FKind::Forall;
		const Sort& sort = _voc.sort(f.boundVar.sort);
		_env.emplace_back(f.boundVar.name, DomainElement::number(0));
		bool result = isForall;
		for (const DomainElement& e : sort.elements) {
			_env.back().second = e;
			if (formula(f.children[0]) != isForall) {
				result = !isForall;
				break;
			}
		}
		_env.pop_back();
		return result;
	}
	case FKind::CountQ: {
		const Sort& sort = _voc.sort(f.boundVar.sort);
		long long n = 0;
		_env.emplace_back(f.boundVar.name, DomainElement::number(0));
		for (const DomainElement& e : sort.elements) {
			_env.back().second = e;
			if (formula(f.children[0])) ++n;
		}
		_env.pop_back();
		switch (f.countKind) {
		case CountKind::Exactly: return n == f.count;
		case CountKind::AtLeast: return n >= f.count;
		case CountKind::AtMost: return n <= f.count;
		}
		return false;
	}
	case FKind::AggCmp:
		return aggCmp(f);
	}
	return false;
}

void Evaluator::collect(AggFun fun, const std::vector<TypedVar>& vars, size_t i,
		const Formula& cond, const Term& weight, AggWork& work) {
	if (i == vars.size()) {
		if (!formula(cond)) return;
		++work.count;
		if (fun != AggFun::Card) work.weights.push_back(numeric(weight));
		return;
	}
	const Sort& sort = _voc.sort(vars[i].sort);
	_env.emplace_back(vars[i].name, DomainElement::number(0));
	for (const DomainElement& e : sort.elements) {
		_env.back().second = e;
		collect(fun, vars, i + 1, cond, weight, work);
	}
	_env.pop_back();
}

bool Evaluator::aggCmp(const Formula& f) {
	AggWork work;
	collect(f.agg, f.setVars, 0, f.children[0], f.weight, work);
	long long bound = numeric(f.bound);

	switch (f.agg) {
	case AggFun::Card:
		return cmpNumbers(f.cmp, work.count, bound);
	case AggFun::Sum: {
		long long total = 0;
		for (long long w : work.weights) total = addChecked(total, w, f.loc);
		return cmpNumbers(f.cmp, total, bound);
	}
	case AggFun::Prod: {
		long long total = 1;
		for (long long w : work.weights) {
			if (w <= 0) throw evalError("prod needs positive weights, got " + std::to_string(w), f.loc);
			total = mulChecked(total, w, f.loc);
		}
		return cmpNumbers(f.cmp, total, bound);
	}
	case AggFun::Min: {
		if (work.weights.empty()) {
			// min of the empty set is plus infinity
			switch (f.cmp) {
			case CmpOp::Eq: return false;
			case CmpOp::Neq: return true;
			case CmpOp::Lt:
			case CmpOp::Leq: return false;
			case CmpOp::Gt:
			case CmpOp::Geq: return true;
			}
		}
		return cmpNumbers(f.cmp, *std::min_element(work.weights.begin(), work.weights.end()), bound);
	}
	case AggFun::Max: {
		if (work.weights.empty()) {
			// max of the empty set is minus infinity
			switch (f.cmp) {
			case CmpOp::Eq: return false;
			case CmpOp::Neq: return true;
			case CmpOp::Lt:
			case CmpOp::Leq: return true;
			case CmpOp::Gt:
			case CmpOp::Geq: return false;
			}
		}
		return cmpNumbers(f.cmp, *std::max_element(work.weights.begin(), work.weights.end()), bound);
	}
	}
	return false;
}

bool Evaluator::sentence(const Formula& f) {
	_env.clear();
	return formula(f);
}

long long Evaluator::aggregate(const AggregateTerm& agg) {
	_env.clear();
	AggWork work;
	collect(agg.fun, agg.vars, 0, agg.condition, agg.weight, work);
	switch (agg.fun) {
	case AggFun::Card:
		return work.count;
	case AggFun::Sum: {
		long long total = 0;
		for (long long w : work.weights) total = addChecked(total, w, agg.loc);
		return total;
	}
	case AggFun::Prod: {
		long long total = 1;
		for (long long w : work.weights) {
			if (w <= 0) throw evalError("prod needs positive weights, got " + std::to_string(w), agg.loc);
			total = mulChecked(total, w, agg.loc);
		}
		return total;
	}
	case AggFun::Min:
		if (work.weights.empty()) throw evalError("min of an empty set", agg.loc);
		return *std::min_element(work.weights.begin(), work.weights.end());
	case AggFun::Max:
		if (work.weights.empty()) throw evalError("max of an empty set", agg.loc);
		return *std::max_element(work.weights.begin(), work.weights.end());
	}
	throw evalError("malformed aggregate", agg.loc);
}

bool evalSentences(const Theory& theory, const Model& model) {
	Evaluator ev(model);
	for (const Formula& s : theory.sentences) {
		if (!ev.sentence(s)) return false;
	}
	return true;
}

} // namespace kbr::lang
