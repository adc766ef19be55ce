// Copyright (C) 2026 The kbrevise authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference semantics for tests, written as directly as possible from the
// definitions and kept independent of the production grounder and fixpoint
// engine. Deliberately naive: enumerate, substitute, iterate to a fixpoint.

#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kbr/ast.hpp"
#include "kbr/desugar.hpp"
#include "kbr/evaluate.hpp"
#include "kbr/structure.hpp"
#include "kbr/vocabulary.hpp"

namespace kbrtest {

using namespace kbr;
using namespace kbr::lang;

// Calls fn(Model) for every total structure extending base. Unknown atoms are
// flipped in atom index order, lowest index varying fastest.
inline void forEachTotalExtension(const ThreeValuedStructure& base,
		const std::function<void(const Model&)>& fn) {
	std::vector<int> open;
	for (int i = 0; i < base.voc().atomCount(); i++)
		if (base.value(i) == Truth::Unknown)
			open.push_back(i);
	if (open.size() > 24)
		throw std::runtime_error("forEachTotalExtension: too many open atoms");
	unsigned long long total = 1ull << open.size();
	for (unsigned long long mask = 0; mask < total; mask++) {
		ThreeValuedStructure s = base;
		for (size_t k = 0; k < open.size(); k++)
			s.set(open[k], (mask >> k) & 1 ? Truth::True : Truth::False);
		fn(Model(s));
	}
}

// Evaluates desugared rule bodies for the reduct construction: positive
// occurrences of defined atoms read from `cur`, negative occurrences from the
// candidate model itself, everything else from the open interpretation.
class ReductEval {
public:
	ReductEval(const Model& m, const std::set<int>& definedPreds,
			const std::vector<char>& cur)
		: _m(m), _voc(m.structure().voc()), _defined(definedPreds), _cur(cur) {}

	bool body(const Formula& f, std::vector<std::pair<std::string, DomainElement>>& env) {
		_env = &env;
		return eval(f);
	}

private:
	const Model& _m;
	const Vocabulary& _voc;
	const std::set<int>& _defined;
	const std::vector<char>& _cur;
	std::vector<std::pair<std::string, DomainElement>>* _env = nullptr;

	DomainElement term(const Term& t) {
		switch (t.kind) {
		case TermKind::Variable:
			for (auto it = _env->rbegin(); it != _env->rend(); ++it)
				if (it->first == t.var)
					return it->second;
			throw std::runtime_error("oracle: unbound variable " + t.var);
		case TermKind::Constant:
			return t.value;
		case TermKind::Arith: {
			if (t.op == ArithOp::Neg)
				return DomainElement::number(-term(t.args[0]).number());
			if (t.op == ArithOp::Abs) {
				long long v = term(t.args[0]).number();
				return DomainElement::number(v < 0 ? -v : v);
			}
			long long a = term(t.args[0]).number();
			long long b = term(t.args[1]).number();
			switch (t.op) {
			case ArithOp::Add: return DomainElement::number(a + b);
			case ArithOp::Sub: return DomainElement::number(a - b);
			case ArithOp::Mul: return DomainElement::number(a * b);
			case ArithOp::Div:
				if (b == 0)
					throw std::runtime_error("oracle: division by zero");
				return DomainElement::number(a / b);
			case ArithOp::Mod:
				if (b == 0)
					throw std::runtime_error("oracle: division by zero");
				return DomainElement::number(a % b);
			default: throw std::runtime_error("oracle: bad arith");
			}
		}
		}
		throw std::runtime_error("oracle: bad term");
	}

	bool atomValue(int idx, bool positive) {
		PredId p = _voc.predOfAtom(idx);
		if (_defined.count(p))
			return positive ? _cur[idx] != 0 : _m.holds(idx);
		return _m.holds(idx);
	}

	bool atom(const Formula& f, bool positive) {
		std::vector<DomainElement> args;
		for (const Term& t : f.args)
			args.push_back(term(t));
		auto idx = _voc.atomIndex(DomainAtom{f.predId, std::move(args)});
		if (!idx)
			throw std::runtime_error("oracle: atom argument outside sort");
		bool v = atomValue(*idx, positive);
		return positive ? v : !v;
	}

	bool cmp(const Formula& f) {
		DomainElement a = term(f.args[0]);
		DomainElement b = term(f.args[1]);
		if (f.cmp == CmpOp::Eq)
			return a == b;
		if (f.cmp == CmpOp::Neq)
			return !(a == b);
		long long x = a.number(), y = b.number();
		switch (f.cmp) {
		case CmpOp::Lt: return x < y;
		case CmpOp::Leq: return x <= y;
		case CmpOp::Gt: return x > y;
		case CmpOp::Geq: return x >= y;
		default: return false;
		}
	}

	bool quant(const Formula& f, bool isForall) {
		const Sort& sort = _voc.sort(f.boundVar.sort);
		for (const DomainElement& e : sort.elements) {
			_env->push_back({f.boundVar.name, e});
			bool v = eval(f.children[0]);
			_env->pop_back();
			if (v != isForall)
				return !isForall;
		}
		return isForall;
	}

	void collect(const Formula& f, size_t i, std::vector<long long>& weights) {
		if (i == f.setVars.size()) {
			if (!eval(f.children[0]))
				return;
			weights.push_back(f.agg == AggFun::Card ? 1 : term(f.weight).number());
			return;
		}
		const Sort& sort = _voc.sort(f.setVars[i].sort);
		for (const DomainElement& e : sort.elements) {
			_env->push_back({f.setVars[i].name, e});
			collect(f, i + 1, weights);
			_env->pop_back();
		}
	}

	bool aggCmp(const Formula& f) {
		std::vector<long long> ws;
		collect(f, 0, ws);
		long long bound = term(f.bound).number();
		bool empty = ws.empty();
		long long v = 0;
		switch (f.agg) {
		case AggFun::Card:
			v = (long long)ws.size();
			break;
		case AggFun::Sum:
			for (long long w : ws)
				v += w;
			break;
		case AggFun::Prod:
			v = 1;
			for (long long w : ws) {
				if (w <= 0)
					throw std::runtime_error("oracle: prod needs positive weights");
				v *= w;
			}
			break;
		case AggFun::Min:
			if (empty)
				return f.cmp == CmpOp::Geq;  // +inf: only >= bound holds
			v = *std::min_element(ws.begin(), ws.end());
			break;
		case AggFun::Max:
			if (empty)
				return f.cmp == CmpOp::Leq;  // -inf: only =< bound holds
			v = *std::max_element(ws.begin(), ws.end());
			break;
		}
		switch (f.cmp) {
		case CmpOp::Eq: return v == bound;
		case CmpOp::Leq: return v <= bound;
		case CmpOp::Geq: return v >= bound;
		default: throw std::runtime_error("oracle: non-normalized aggregate cmp");
		}
	}

	bool eval(const Formula& f) {
		switch (f.kind) {
		case FKind::BoolConst: return f.boolval;
		case FKind::Atom: return atom(f, true);
		case FKind::Not:
			if (f.children[0].kind != FKind::Atom)
				throw std::runtime_error("oracle: body not in negation normal form");
			return atom(f.children[0], false);
		case FKind::Cmp: return cmp(f);
		case FKind::And:
			return eval(f.children[0]) && eval(f.children[1]);
		case FKind::Or:
			return eval(f.children[0]) || eval(f.children[1]);
		case FKind::Forall: return quant(f, true);
		case FKind::Exists: return quant(f, false);
		case FKind::AggCmp: return aggCmp(f);
		default:
			throw std::runtime_error("oracle: body not desugared");
		}
	}
};

// Checks whether the defined predicates of `def` hold in `m` exactly as the
// definition mandates: the defined part must equal the least fixpoint of the
// rule operator on the reduct of the definition with respect to m. Expects a
// desugared definition (rule bodies in negation normal form, core aggregates).
inline bool oracleCheckDefinition(const Definition& def, const Model& m) {
	const Vocabulary& voc = m.structure().voc();
	std::set<int> definedPreds(def.definedPreds.begin(), def.definedPreds.end());
	std::vector<char> cur(voc.atomCount(), 0);
	ReductEval ev(m, definedPreds, cur);

	auto fireRules = [&]() {
		bool changed = false;
		for (const Rule& r : def.rules) {
			std::vector<std::pair<std::string, DomainElement>> env;
			std::function<void(size_t)> loop = [&](size_t i) {
				if (i == r.vars.size()) {
					if (!ev.body(r.body, env))
						return;
					std::vector<DomainElement> args;
					for (const Term& t : r.head.args) {
						if (t.kind == TermKind::Constant) {
							args.push_back(t.value);
							continue;
						}
						bool found = false;
						for (auto it = env.rbegin(); it != env.rend(); ++it)
							if (it->first == t.var) {
								args.push_back(it->second);
								found = true;
								break;
							}
						if (!found)
							throw std::runtime_error("oracle: unbound head variable");
					}
					auto idx = voc.atomIndex(DomainAtom{r.head.predId, std::move(args)});
					if (!idx)
						throw std::runtime_error("oracle: head atom outside sort");
					if (!cur[*idx]) {
						cur[*idx] = 1;
						changed = true;
					}
					return;
				}
				const Sort& sort = voc.sort(r.vars[i].sort);
				for (const DomainElement& e : sort.elements) {
					env.push_back({r.vars[i].name, e});
					loop(i + 1);
					env.pop_back();
				}
			};
			loop(0);
		}
		return changed;
	};

	while (fireRules()) {
	}

	for (int i = 0; i < voc.atomCount(); i++)
		if (definedPreds.count(voc.predOfAtom(i)))
			if ((cur[i] != 0) != m.holds(i))
				return false;
	return true;
}

// True iff m satisfies every sentence and every definition of the desugared
// theory. Sentences are checked with the direct evaluator; definitions with
// the reduct fixpoint above.
inline bool oracleHolds(const Theory& desugared, const Model& m) {
	Evaluator ev(m);
	for (const Formula& s : desugared.sentences)
		if (!ev.sentence(s))
			return false;
	for (const Definition& d : desugared.definitions)
		if (!oracleCheckDefinition(d, m))
			return false;
	return true;
}

// Enumerates every model of the desugared theory extending base.
inline std::vector<ThreeValuedStructure> oracleModels(const Theory& desugared,
		const ThreeValuedStructure& base) {
	std::vector<ThreeValuedStructure> out;
	forEachTotalExtension(base, [&](const Model& m) {
		if (oracleHolds(desugared, m))
			out.push_back(m.structure());
	});
	return out;
}

}  // namespace kbrtest

// Appended below the first-order oracles: reference semantics for ground rule
// sets. Plain naive iteration per stratum, sharing only the strata with the
// engine under test.
#include "kbr/rules.hpp"

namespace kbrtest {

inline std::vector<kbr::Truth> naiveEvaluate(const kbr::rules::GroundRuleSet& rs,
		std::vector<kbr::Truth> values) {
	const auto& rep = rs.stratify();
	if (!rep.stratified)
		throw std::runtime_error("oracle: rule set not stratified");
	for (int s = 0; s < rep.strataCount; s++) {
		for (int v = 1; v <= rs.varCount(); v++)
			if (rs.isDefined(v) && rep.stratumOf[v] == s)
				values[v] = kbr::Truth::False;
		bool changed = true;
		while (changed) {
			changed = false;
			for (const auto& r : rs.rules()) {
				if (rep.stratumOf[r.head] != s || values[r.head] == kbr::Truth::True)
					continue;
				bool fires = true;
				for (int l : r.body)
					if ((values[kbr::rules::litVar(l)] == kbr::Truth::True) != kbr::rules::litPos(l)) {
						fires = false;
						break;
					}
				if (fires) {
					values[r.head] = kbr::Truth::True;
					changed = true;
				}
			}
		}
	}
	return values;
}

}  // namespace kbrtest
