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

#include "kbr/ground.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "kbr/desugar.hpp"

namespace kbr::ground {

namespace {

using namespace kbr::lang;
using ecnf::Lit;

long long addChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_add_overflow(a, b, &r)) throw groundError("integer overflow", loc);
	return r;
}

long long subChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_sub_overflow(a, b, &r)) throw groundError("integer overflow", loc);
	return r;
}

long long mulChecked(long long a, long long b, SourceLoc loc) {
	long long r;
	if (__builtin_mul_overflow(a, b, &r)) throw groundError("integer overflow", loc);
	return r;
}

long long divChecked(long long a, long long b, SourceLoc loc) {
	if (b == 0) throw groundError("division by zero", loc);
	if (a == std::numeric_limits<long long>::min() && b == -1) throw groundError("integer overflow", loc);
	return a / b; // truncates toward zero
}

long long modChecked(long long a, long long b, SourceLoc loc) {
	if (b == 0) throw groundError("division by zero", loc);
	if (a == std::numeric_limits<long long>::min() && b == -1) throw groundError("integer overflow", loc);
	return a % b; // sign follows the dividend
}

long long absChecked(long long a, SourceLoc loc) {
	if (a == std::numeric_limits<long long>::min()) throw groundError("integer overflow", loc);
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

/** A linear sum-of-true-literals comparison, already normalized to positive
 *  weights and freed of trivially true or false cases. */
struct AggC {
	std::vector<Lit> lits;
	std::vector<long long> weights;
	long long target = 0;
	CmpOp cmp = CmpOp::Geq; // Geq, Leq or Eq
};

/** A grounded formula: a constant, a literal, a connective over grounded
 *  parts, or a linear constraint that still needs lowering. */
struct GF {
	enum class K { Const, Leaf, And, Or, Agg };
	K k = K::Const;
	bool cval = false;
	Lit lit = 0;
	std::vector<GF> kids;
	AggC agg;

	static GF constant(bool v) {
		GF g;
		g.k = K::Const;
		g.cval = v;
		return g;
	}
	static GF leaf(Lit l) {
		GF g;
		g.k = K::Leaf;
		g.lit = l;
		return g;
	}
	bool isConst(bool v) const { return k == K::Const && cval == v; }
};

/** Conjunction or disjunction of already-simplified parts; constants among
 *  the parts must have been folded away by the caller. */
GF mkConn(bool isAnd, std::vector<GF> kids) {
	if (kids.empty()) return GF::constant(isAnd);
	if (kids.size() == 1) return std::move(kids[0]);
	GF g;
	g.k = isAnd ? GF::K::And : GF::K::Or;
	g.kids = std::move(kids);
	return g;
}

/** Folds a constant part into a connective under construction. Returns true
 *  when the connective's value is decided and grounding can stop early. */
bool foldConnConst(bool isAnd, bool value) {
	return value != isAnd;
}

class Grounder {
public:
	Grounder(const Theory& theory, const ThreeValuedStructure& s, const GroundOptions& opt)
			: _theory(desugarTheory(theory)), _overlay(s), _voc(s.voc()), _opt(opt) {
		_e.voc = s.vocPtr();
		_e.varCount = _e.atomVars = _voc.atomCount();
	}

	void run();

	/** Grounds a card or sum objective against the final overlay; run() first.
	 *  Negative instance weights flip their literal and move into the offset,
	 *  so the returned weights are positive. */
	Objective groundObjective(const AggregateTerm& agg) {
		if (agg.fun != AggFun::Card && agg.fun != AggFun::Sum) {
			throw groundError("objective must be a card or sum aggregate", agg.loc);
		}
		Formula f = Formula::aggcmp(agg.fun, agg.vars, desugarFormula(agg.condition), agg.weight,
				CmpOp::Geq, Term::constant(DomainElement::number(0)), agg.loc);
		AggItems items;
		_env.clear();
		collect(f, 0, items);
		Objective out;
		for (long long w : items.certain) out.offset = addChecked(out.offset, w, agg.loc);
		for (auto& [w, l] : items.open) {
			if (w == 0) continue;
			if (w < 0) {
				out.offset = addChecked(out.offset, w, agg.loc);
				out.items.emplace_back(-l, -w);
			} else {
				out.items.emplace_back(l, w);
			}
		}
		return out;
	}

	ecnf::Ecnf takeEcnf() { return std::move(_e); }
	const ThreeValuedStructure& overlay() const { return _overlay; }
	bool unsat() const { return _unsat; }
	const std::vector<char>& groupDefined() const { return _groupDefined; }

private:
	Theory _theory;
	ThreeValuedStructure _overlay;
	const Vocabulary& _voc;
	GroundOptions _opt;
	ecnf::Ecnf _e;
	bool _unsat = false;
	long long _used = 0;

	std::vector<std::pair<std::string, DomainElement>> _env;
	const std::set<PredId>* _noFold = nullptr; // preds of the definition being grounded

	// Rule sink: body auxiliaries go to the Ecnf group being built, or, while
	// evaluating a decided definition, to a throwaway local rule buffer.
	ecnf::RuleGroup* _group = nullptr;
	std::vector<std::pair<int, std::vector<Lit>>>* _strictRules = nullptr;
	int* _strictAux = nullptr;

	std::vector<char> _evaluated;
	std::vector<char> _groupDefined;

	// ---- budget ----

	void bump(long long n = 1) {
		_used += n;
		if (_used > _opt.sizeCap) {
			throw groundError("set expression exceeds the size cap of "
					+ std::to_string(_opt.sizeCap) + " ground literals");
		}
	}

	// ---- term folding ----

	const DomainElement& lookup(const std::string& name, SourceLoc loc) const {
		for (auto it = _env.rbegin(); it != _env.rend(); ++it) {
			if (it->first == name) return it->second;
		}
		throw groundError("unbound variable '" + name + "'", loc);
	}

	DomainElement term(const Term& t) {
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
		throw groundError("malformed term", t.loc);
	}

	long long numeric(const Term& t) {
		DomainElement v = term(t);
		if (!v.isNumber()) throw groundError("'" + v.text() + "' is not an integer", t.loc);
		return v.number();
	}

	// ---- formula grounding ----

	GF atomValue(const Formula& f, bool negated) {
		DomainAtom atom;
		atom.pred = f.predId;
		atom.args.reserve(f.args.size());
		for (const Term& arg : f.args) atom.args.push_back(term(arg));
		auto idx = _voc.atomIndex(atom);
		if (!idx) {
			throw groundError("atom " + _voc.atomText(atom)
					+ " uses a value outside the declared argument sort", f.loc);
		}
		if (_overlay.twoValued(*idx) && !(_noFold && _noFold->count(f.predId))) {
			bool v = _overlay.value(*idx) == Truth::True;
			return GF::constant(negated ? !v : v);
		}
		Lit l = _e.atomVar(*idx);
		return GF::leaf(negated ? -l : l);
	}

	bool cmpValue(const Formula& f) {
		if (f.cmp == CmpOp::Eq || f.cmp == CmpOp::Neq) {
			DomainElement a = term(f.args[0]);
			DomainElement b = term(f.args[1]);
			return (f.cmp == CmpOp::Eq) == (a == b);
		}
		return cmpNumbers(f.cmp, numeric(f.args[0]), numeric(f.args[1]));
	}

	void flattenInto(bool isAnd, GF g, std::vector<GF>& kids) {
		GF::K kind = isAnd ? GF::K::And : GF::K::Or;
		if (g.k == kind) {
			for (GF& kid : g.kids) kids.push_back(std::move(kid));
		} else {
			kids.push_back(std::move(g));
		}
	}

	GF formula(const Formula& f) {
		switch (f.kind) {
		case FKind::BoolConst:
			return GF::constant(f.boolval);
		case FKind::Atom:
			return atomValue(f, false);
		case FKind::Cmp:
			return GF::constant(cmpValue(f));
		case FKind::Not:
			if (f.children[0].kind != FKind::Atom) {
				throw groundError("grounder expects negation normal form", f.loc);
			}
			return atomValue(f.children[0], true);
		case FKind::And:
		case FKind::Or: {
			bool isAnd = f.kind == FKind::And;
			std::vector<GF> kids;
			for (const Formula& child : f.children) {
				GF g = formula(child);
				if (g.k == GF::K::Const) {
					if (foldConnConst(isAnd, g.cval)) return g;
					continue;
				}
				flattenInto(isAnd, std::move(g), kids);
			}
			return mkConn(isAnd, std::move(kids));
		}
		case FKind::Forall:
		case FKind::Exists: {
			bool isAnd = f.kind == FKind::Forall;
			const Sort& sort = _voc.sort(f.boundVar.sort);
			std::vector<GF> kids;
			_env.emplace_back(f.boundVar.name, DomainElement::number(0));
			for (const DomainElement& e : sort.elements) {
				_env.back().second = e;
				GF g = formula(f.children[0]);
				if (g.k == GF::K::Const) {
					if (foldConnConst(isAnd, g.cval)) {
						_env.pop_back();
						return g;
					}
					continue;
				}
				flattenInto(isAnd, std::move(g), kids);
			}
			_env.pop_back();
			return mkConn(isAnd, std::move(kids));
		}
		case FKind::AggCmp:
			return aggValue(f);
		case FKind::CountQ:
		case FKind::Implies:
		case FKind::Equiv:
			break;
		}
		throw groundError("grounder expects a desugared formula", f.loc);
	}

	// ---- aggregates ----

	struct AggItems {
		std::vector<std::pair<long long, Lit>> open; // weight, literal
		std::vector<long long> certain;              // weights of decided members
	};

	void collect(const Formula& f, size_t i, AggItems& items) {
		if (i == f.setVars.size()) {
			bump();
			GF c = formula(f.children[0]);
			if (c.isConst(false)) return;
			long long w = f.agg == AggFun::Card ? 1 : numeric(f.weight);
			if (c.k == GF::K::Const) {
				items.certain.push_back(w);
			} else if (c.k == GF::K::Leaf) {
				items.open.emplace_back(w, c.lit);
			} else {
				items.open.emplace_back(w, tseitinEquiv(c, "cond"));
			}
			return;
		}
		const Sort& sort = _voc.sort(f.setVars[i].sort);
		_env.emplace_back(f.setVars[i].name, DomainElement::number(0));
		for (const DomainElement& e : sort.elements) {
			_env.back().second = e;
			collect(f, i + 1, items);
		}
		_env.pop_back();
	}

	/** Normalizes a sum comparison to positive weights and folds the trivial
	 *  outcomes; target and weights must already be overflow-checked. */
	GF mkAgg(std::vector<std::pair<long long, Lit>> items, long long target, CmpOp cmp,
			SourceLoc loc) {
		AggC a;
		a.cmp = cmp;
		a.target = target;
		long long total = 0;
		for (auto& [w, l] : items) {
			if (w == 0) continue;
			if (w < 0) {
				a.target = subChecked(a.target, w, loc);
				a.weights.push_back(-w);
				a.lits.push_back(-l);
			} else {
				a.weights.push_back(w);
				a.lits.push_back(l);
			}
			total = addChecked(total, a.weights.back(), loc);
		}
		switch (cmp) {
		case CmpOp::Geq:
			if (a.target <= 0) return GF::constant(true);
			if (a.target > total) return GF::constant(false);
			break;
		case CmpOp::Leq:
			if (a.target < 0) return GF::constant(false);
			if (a.target >= total) return GF::constant(true);
			break;
		case CmpOp::Eq:
			if (a.target < 0 || a.target > total) return GF::constant(false);
			if (a.lits.empty()) return GF::constant(a.target == 0);
			break;
		default:
			throw groundError("grounder expects a desugared comparison", loc);
		}
		GF g;
		g.k = GF::K::Agg;
		g.agg = std::move(a);
		return g;
	}

	GF andParts(GF a, GF b) {
		if (a.isConst(false)) return a;
		if (b.isConst(false)) return b;
		std::vector<GF> kids;
		if (a.k != GF::K::Const) flattenInto(true, std::move(a), kids);
		if (b.k != GF::K::Const) flattenInto(true, std::move(b), kids);
		return mkConn(true, std::move(kids));
	}

	GF aggValue(const Formula& f) {
		AggItems items;
		collect(f, 0, items);
		long long b = numeric(f.bound);
		SourceLoc loc = f.loc;

		switch (f.agg) {
		case AggFun::Card:
		case AggFun::Sum: {
			long long base = 0;
			for (long long w : items.certain) base = addChecked(base, w, loc);
			return mkAgg(std::move(items.open), subChecked(b, base, loc), f.cmp, loc);
		}
		case AggFun::Min: {
			// min >= k: nothing below k may be in; min <= k: something at or
			// below k must be in. The empty set has min plus infinity.
			bool hasCertain = !items.certain.empty();
			long long certainMin =
					hasCertain ? *std::min_element(items.certain.begin(), items.certain.end()) : 0;
			auto geqPart = [&](long long k) {
				if (hasCertain && certainMin < k) return GF::constant(false);
				std::vector<GF> kids;
				for (auto& [w, l] : items.open) {
					if (w < k) kids.push_back(GF::leaf(-l));
				}
				return mkConn(true, std::move(kids));
			};
			auto leqPart = [&](long long k) {
				if (hasCertain && certainMin <= k) return GF::constant(true);
				std::vector<GF> kids;
				for (auto& [w, l] : items.open) {
					if (w <= k) kids.push_back(GF::leaf(l));
				}
				return mkConn(false, std::move(kids));
			};
			if (f.cmp == CmpOp::Geq) return geqPart(b);
			if (f.cmp == CmpOp::Leq) return leqPart(b);
			return andParts(geqPart(b), leqPart(b));
		}
		case AggFun::Max: {
			bool hasCertain = !items.certain.empty();
			long long certainMax =
					hasCertain ? *std::max_element(items.certain.begin(), items.certain.end()) : 0;
			auto leqPart = [&](long long k) {
				if (hasCertain && certainMax > k) return GF::constant(false);
				std::vector<GF> kids;
				for (auto& [w, l] : items.open) {
					if (w > k) kids.push_back(GF::leaf(-l));
				}
				return mkConn(true, std::move(kids));
			};
			auto geqPart = [&](long long k) {
				if (hasCertain && certainMax >= k) return GF::constant(true);
				std::vector<GF> kids;
				for (auto& [w, l] : items.open) {
					if (w >= k) kids.push_back(GF::leaf(l));
				}
				return mkConn(false, std::move(kids));
			};
			if (f.cmp == CmpOp::Geq) return geqPart(b);
			if (f.cmp == CmpOp::Leq) return leqPart(b);
			return andParts(leqPart(b), geqPart(b));
		}
		case AggFun::Prod:
			return prodValue(std::move(items), b, f.cmp, loc);
		}
		throw groundError("malformed aggregate", loc);
	}

	/**
	 * Product comparison over positive weights, by a deterministic scan over
	 * the distinct partial products. Products are clamped just above the
	 * bound, which no comparison outcome can distinguish from the real value.
	 */
	GF prodValue(AggItems items, long long b, CmpOp cmp, SourceLoc loc) {
		long long base = 1;
		for (long long w : items.certain) {
			if (w <= 0) throw groundError("prod needs positive weights, got " + std::to_string(w), loc);
			base = mulChecked(base, w, loc);
		}
		for (const auto& item : items.open) {
			if (item.first <= 0) {
				throw groundError("prod needs positive weights, got " + std::to_string(item.first), loc);
			}
		}
		if (b <= 1) {
			// every product of positive weights is at least one
			if (cmp == CmpOp::Geq) return GF::constant(true);
			if (b < 1) return GF::constant(false);
		}
		std::vector<std::pair<long long, Lit>> factors;
		for (auto& [w, l] : items.open) {
			if (w != 1) factors.emplace_back(w, l);
		}
		if (factors.empty()) return GF::constant(cmpNumbers(cmp, base, b));

		const long long clamp = b == std::numeric_limits<long long>::max() ? b : b + 1;
		auto clampMul = [&](long long v, long long w) {
			long long r;
			if (v >= clamp || __builtin_mul_overflow(v, w, &r) || r > clamp) return clamp;
			return r;
		};

		// One state per reachable product value; 0 stands for "always here".
		std::map<long long, Lit> states;
		states[std::min(base, clamp)] = 0;
		for (auto& [w, l] : factors) {
			bump((long long)states.size());
			std::map<long long, std::vector<Lit>> next;
			auto edge = [&](Lit from, Lit via) {
				if (from == 0) return via;
				Lit d = _e.newAux("prod");
				pushClause({-d, from});
				pushClause({-d, via});
				pushClause({d, -from, -via});
				return d;
			};
			for (auto& [v, s] : states) {
				next[clampMul(v, w)].push_back(edge(s, l));
				next[v].push_back(edge(s, -l));
			}
			states.clear();
			for (auto& [v, in] : next) {
				if (in.size() == 1) {
					states[v] = in[0];
					continue;
				}
				Lit t = _e.newAux("prod");
				std::vector<Lit> fwd{-t};
				for (Lit l2 : in) {
					pushClause({t, -l2});
					fwd.push_back(l2);
				}
				pushClause(std::move(fwd));
				states[v] = t;
			}
		}
		std::vector<GF> hit;
		size_t total = states.size();
		for (auto& [v, s] : states) {
			if (cmpNumbers(cmp, v, b)) hit.push_back(GF::leaf(s));
		}
		if (hit.size() == total) return GF::constant(true);
		return mkConn(false, std::move(hit));
	}

	// ---- clause-level lowering ----

	void pushClause(std::vector<Lit> c) {
		std::set<Lit> seen;
		std::vector<Lit> out;
		for (Lit l : c) {
			if (seen.count(-l)) return; // tautology
			if (seen.insert(l).second) out.push_back(l);
		}
		_e.clauses.push_back(std::move(out));
	}

	void emitAgg(const AggC& a, Lit guard) {
		auto one = [&](bool geq, long long bound) {
			ecnf::Constraint c;
			c.guard = guard;
			c.lits = a.lits;
			c.weights = a.weights;
			c.bound = bound;
			c.geq = geq;
			_e.constraints.push_back(std::move(c));
		};
		if (a.cmp == CmpOp::Eq) {
			one(true, a.target);
			one(false, a.target);
		} else {
			one(a.cmp == CmpOp::Geq, a.target);
		}
	}

	GF negGF(const GF& g) {
		switch (g.k) {
		case GF::K::Const:
			return GF::constant(!g.cval);
		case GF::K::Leaf:
			return GF::leaf(-g.lit);
		case GF::K::And:
		case GF::K::Or: {
			std::vector<GF> kids;
			kids.reserve(g.kids.size());
			for (const GF& kid : g.kids) kids.push_back(negGF(kid));
			return mkConn(g.k == GF::K::Or, std::move(kids));
		}
		case GF::K::Agg: {
			auto items = [&]() {
				std::vector<std::pair<long long, Lit>> v;
				for (size_t i = 0; i < g.agg.lits.size(); ++i) {
					v.emplace_back(g.agg.weights[i], g.agg.lits[i]);
				}
				return v;
			};
			SourceLoc loc;
			switch (g.agg.cmp) {
			case CmpOp::Geq:
				return mkAgg(items(), g.agg.target - 1, CmpOp::Leq, loc);
			case CmpOp::Leq:
				return mkAgg(items(), g.agg.target + 1, CmpOp::Geq, loc);
			default: {
				GF below = mkAgg(items(), g.agg.target - 1, CmpOp::Leq, loc);
				GF above = mkAgg(items(), g.agg.target + 1, CmpOp::Geq, loc);
				if (below.isConst(false)) return above;
				if (above.isConst(false)) return below;
				std::vector<GF> kids;
				kids.push_back(std::move(below));
				kids.push_back(std::move(above));
				return mkConn(false, std::move(kids));
			}
			}
		}
		}
		return GF::constant(false);
	}

	/** Emits the clauses of (prefix or d1 or ... or dk) for disjuncts kids. */
	void emitOrClause(std::vector<Lit> prefix, const std::vector<GF>& kids) {
		for (const GF& kid : kids) {
			switch (kid.k) {
			case GF::K::Const:
				if (kid.cval) return; // satisfied outright
				break;
			case GF::K::Leaf:
				prefix.push_back(kid.lit);
				break;
			case GF::K::And:
				prefix.push_back(tseitinImpl(kid, "and"));
				break;
			case GF::K::Or:
				for (const GF& sub : kid.kids) prefix.push_back(leafOfOr(sub));
				break;
			case GF::K::Agg: {
				Lit t = _e.newAux("agg");
				emitAgg(kid.agg, -t);
				prefix.push_back(t);
				break;
			}
			}
		}
		pushClause(std::move(prefix));
	}

	Lit leafOfOr(const GF& g) {
		switch (g.k) {
		case GF::K::Leaf:
			return g.lit;
		case GF::K::And:
			return tseitinImpl(g, "and");
		case GF::K::Agg: {
			Lit t = _e.newAux("agg");
			emitAgg(g.agg, -t);
			return t;
		}
		default:
			throw groundError("malformed ground formula");
		}
	}

	/** Clauses of (-t or g): t implies the grounded formula. */
	void emitImpl(Lit t, const GF& g) {
		switch (g.k) {
		case GF::K::Const:
			if (!g.cval) pushClause({-t});
			return;
		case GF::K::Leaf:
			pushClause({-t, g.lit});
			return;
		case GF::K::And:
			for (const GF& kid : g.kids) emitImpl(t, kid);
			return;
		case GF::K::Or:
			emitOrClause({-t}, g.kids);
			return;
		case GF::K::Agg:
			emitAgg(g.agg, -t);
			return;
		}
	}

	Lit tseitinImpl(const GF& g, const char* note) {
		Lit t = _e.newAux(note);
		emitImpl(t, g);
		return t;
	}

	Lit tseitinEquiv(const GF& g, const char* note) {
		Lit t = _e.newAux(note);
		emitImpl(t, g);
		emitImpl(-t, negGF(g));
		return t;
	}

	/** Asserts a grounded sentence. */
	void emitTrue(const GF& g) {
		switch (g.k) {
		case GF::K::Const:
			if (!g.cval) pushClause({});
			return;
		case GF::K::Leaf:
			pushClause({g.lit});
			return;
		case GF::K::And:
			for (const GF& kid : g.kids) emitTrue(kid);
			return;
		case GF::K::Or:
			emitOrClause({}, g.kids);
			return;
		case GF::K::Agg:
			emitAgg(g.agg, 0);
			return;
		}
	}

	// ---- rule bodies ----

	int sinkAux(const char* note) {
		if (_strictAux) return ++*_strictAux;
		return _e.newAux(note);
	}

	void sinkRule(int head, ecnf::BodyKind kind, std::vector<Lit> body) {
		if (_strictRules) {
			if (kind == ecnf::BodyKind::Conj) {
				_strictRules->emplace_back(head, std::move(body));
			} else {
				for (Lit l : body) _strictRules->emplace_back(head, std::vector<Lit>{l});
			}
			return;
		}
		_group->rules.push_back({head, kind, std::move(body)});
	}

	struct BodyVal {
		enum class K { False, True, Lits } k = K::True;
		std::vector<Lit> lits;

		static BodyVal constant(bool v) {
			BodyVal b;
			b.k = v ? K::True : K::False;
			return b;
		}
		static BodyVal of(std::vector<Lit> lits) {
			BodyVal b;
			b.k = K::Lits;
			b.lits = std::move(lits);
			return b;
		}
	};

	BodyVal bodyLeaf(GF g) {
		switch (g.k) {
		case GF::K::Const:
			return BodyVal::constant(g.cval);
		case GF::K::Leaf:
			return BodyVal::of({g.lit});
		default:
			// aggregate values are opaque open literals to the rules
			if (_strictRules) throw groundError("malformed ground formula");
			return BodyVal::of({tseitinEquiv(g, "agg")});
		}
	}

	BodyVal bodyConj(const Formula& f) {
		switch (f.kind) {
		case FKind::BoolConst:
			return BodyVal::constant(f.boolval);
		case FKind::Cmp:
			return BodyVal::constant(cmpValue(f));
		case FKind::Atom:
			return bodyLeaf(atomValue(f, false));
		case FKind::Not:
			if (f.children[0].kind != FKind::Atom) {
				throw groundError("grounder expects negation normal form", f.loc);
			}
			return bodyLeaf(atomValue(f.children[0], true));
		case FKind::And: {
			std::vector<Lit> lits;
			for (const Formula& child : f.children) {
				BodyVal b = bodyConj(child);
				if (b.k == BodyVal::K::False) return b;
				for (Lit l : b.lits) lits.push_back(l);
			}
			return BodyVal::of(std::move(lits));
		}
		case FKind::Forall: {
			const Sort& sort = _voc.sort(f.boundVar.sort);
			std::vector<Lit> lits;
			_env.emplace_back(f.boundVar.name, DomainElement::number(0));
			for (const DomainElement& e : sort.elements) {
				_env.back().second = e;
				BodyVal b = bodyConj(f.children[0]);
				if (b.k == BodyVal::K::False) {
					_env.pop_back();
					return b;
				}
				for (Lit l : b.lits) lits.push_back(l);
			}
			_env.pop_back();
			return BodyVal::of(std::move(lits));
		}
		case FKind::Or:
		case FKind::Exists: {
			std::vector<std::vector<Lit>> parts;
			auto takePart = [&](BodyVal b) {
				if (b.k == BodyVal::K::True) return true;
				if (b.k == BodyVal::K::Lits) parts.push_back(std::move(b.lits));
				return false;
			};
			if (f.kind == FKind::Or) {
				for (const Formula& child : f.children) {
					if (takePart(bodyConj(child))) return BodyVal::constant(true);
				}
			} else {
				const Sort& sort = _voc.sort(f.boundVar.sort);
				_env.emplace_back(f.boundVar.name, DomainElement::number(0));
				for (const DomainElement& e : sort.elements) {
					_env.back().second = e;
					if (takePart(bodyConj(f.children[0]))) {
						_env.pop_back();
						return BodyVal::constant(true);
					}
				}
				_env.pop_back();
			}
			if (parts.empty()) return BodyVal::constant(false);
			if (parts.size() == 1) return BodyVal::of(std::move(parts[0]));
			std::vector<Lit> options;
			for (std::vector<Lit>& part : parts) {
				if (part.size() == 1) {
					options.push_back(part[0]);
					continue;
				}
				int c = sinkAux("body");
				sinkRule(c, ecnf::BodyKind::Conj, std::move(part));
				options.push_back(c);
			}
			int a = sinkAux("or");
			sinkRule(a, ecnf::BodyKind::Disj, std::move(options));
			return BodyVal::of({a});
		}
		case FKind::AggCmp:
			return bodyLeaf(aggValue(f));
		case FKind::CountQ:
		case FKind::Implies:
		case FKind::Equiv:
			break;
		}
		throw groundError("grounder expects a desugared formula", f.loc);
	}

	// ---- definitions ----

	int headAtom(const Formula& head) {
		DomainAtom atom;
		atom.pred = head.predId;
		atom.args.reserve(head.args.size());
		for (const Term& arg : head.args) atom.args.push_back(term(arg));
		auto idx = _voc.atomIndex(atom);
		if (!idx) {
			throw groundError("atom " + _voc.atomText(atom)
					+ " uses a value outside the declared argument sort", head.loc);
		}
		return *idx;
	}

	template <typename Fn>
	void forEachInstance(const Rule& rule, size_t i, Fn&& fn) {
		if (i == rule.vars.size()) {
			fn();
			return;
		}
		const Sort& sort = _voc.sort(rule.vars[i].sort);
		_env.emplace_back(rule.vars[i].name, DomainElement::number(0));
		for (const DomainElement& e : sort.elements) {
			_env.back().second = e;
			forEachInstance(rule, i + 1, fn);
		}
		_env.pop_back();
	}

	static std::set<PredId> ownPreds(const Definition& def) {
		return std::set<PredId>(def.definedPreds.begin(), def.definedPreds.end());
	}

	void collectPreds(const Formula& f, std::set<PredId>& out) const {
		if (f.kind == FKind::Atom) out.insert(f.predId);
		for (const Formula& child : f.children) collectPreds(child, out);
	}

	/** True when every non-defined predicate the definition reads is fully
	 *  decided, so its defined atoms follow outright from the rules. */
	bool definitionEvaluable(const Definition& def) const {
		std::set<PredId> own(def.definedPreds.begin(), def.definedPreds.end());
		std::set<PredId> read;
		for (const Rule& rule : def.rules) collectPreds(rule.body, read);
		for (PredId p : read) {
			if (own.count(p)) continue;
			int off = _voc.atomOffset(p);
			for (int t = 0; t < _voc.tupleCount(p); ++t) {
				if (!_overlay.twoValued(off + t)) return false;
			}
		}
		return true;
	}

	std::string cycleText(const std::vector<int>& cycle) const {
		std::string text;
		for (int v : cycle) {
			if (!text.empty()) text += " -> ";
			text += _e.isAtomVar(v) ? _voc.atomText(v - 1) : "aux";
		}
		if (!cycle.empty()) {
			text += " -> ";
			text += _e.isAtomVar(cycle[0]) ? _voc.atomText(cycle[0] - 1) : "aux";
		}
		return text;
	}

	void requireStratifiedGroup(const rules::GroundRuleSet& rs, SourceLoc loc) const {
		const rules::StratificationReport& rep = rs.stratify();
		if (rep.stratified) return;
		throw inputError("definition is not stratified: recursion through negation on cycle "
				+ cycleText(rep.witnessCycle), loc);
	}

	/** Computes a decided definition outright and merges the result into the
	 *  overlay structure, so its atoms fold away like any other decided atom. */
	void evaluateDefinition(const Definition& def) {
		std::set<PredId> own = ownPreds(def);
		std::vector<std::pair<int, std::vector<Lit>>> localRules;
		int auxCounter = _voc.atomCount();
		_noFold = &own;
		_strictRules = &localRules;
		_strictAux = &auxCounter;
		for (const Rule& rule : def.rules) {
			_env.clear();
			forEachInstance(rule, 0, [&] {
				int idx = headAtom(rule.head);
				BodyVal b = bodyConj(rule.body);
				if (b.k == BodyVal::K::False) return;
				localRules.emplace_back(_e.atomVar(idx), std::move(b.lits));
			});
		}
		_noFold = nullptr;
		_strictRules = nullptr;
		_strictAux = nullptr;

		rules::GroundRuleSet rs(auxCounter);
		for (PredId p : def.definedPreds) {
			int off = _voc.atomOffset(p);
			for (int t = 0; t < _voc.tupleCount(p); ++t) rs.declareDefined(_e.atomVar(off + t));
		}
		for (auto& [head, body] : localRules) rs.add(head, std::move(body));
		requireStratifiedGroup(rs, def.loc);
		std::vector<Truth> vals = rs.evaluate(std::vector<Truth>(auxCounter + 1, Truth::Unknown));
		for (PredId p : def.definedPreds) {
			int off = _voc.atomOffset(p);
			for (int t = 0; t < _voc.tupleCount(p); ++t) {
				int idx = off + t;
				Truth v = vals[_e.atomVar(idx)];
				if (_overlay.twoValued(idx) && _overlay.value(idx) != v) {
					_unsat = true;
					return;
				}
				_overlay.set(idx, v);
			}
		}
	}

	void groundDefinition(const Definition& def) {
		std::set<PredId> own = ownPreds(def);
		ecnf::RuleGroup group;
		_noFold = &own;
		_group = &group;
		std::map<int, std::vector<std::vector<Lit>>> bodiesByHead;
		for (const Rule& rule : def.rules) {
			_env.clear();
			forEachInstance(rule, 0, [&] {
				int idx = headAtom(rule.head);
				BodyVal b = bodyConj(rule.body);
				if (b.k == BodyVal::K::False) return;
				bodiesByHead[idx].push_back(std::move(b.lits));
			});
		}
		for (PredId p : def.definedPreds) {
			int off = _voc.atomOffset(p);
			for (int t = 0; t < _voc.tupleCount(p); ++t) {
				int idx = off + t;
				int head = _e.atomVar(idx);
				auto it = bodiesByHead.find(idx);
				if (it == bodiesByHead.end()) {
					group.rules.push_back({head, ecnf::BodyKind::Disj, {}});
					continue;
				}
				std::vector<std::vector<Lit>>& bodies = it->second;
				bool fact = false;
				for (const std::vector<Lit>& body : bodies) fact = fact || body.empty();
				if (fact) {
					group.rules.push_back({head, ecnf::BodyKind::Conj, {}});
					continue;
				}
				if (bodies.size() == 1) {
					group.rules.push_back({head, ecnf::BodyKind::Conj, std::move(bodies[0])});
					continue;
				}
				std::vector<Lit> options;
				for (std::vector<Lit>& body : bodies) {
					if (body.size() == 1) {
						options.push_back(body[0]);
						continue;
					}
					int c = _e.newAux("body");
					group.rules.push_back({c, ecnf::BodyKind::Conj, std::move(body)});
					options.push_back(c);
				}
				group.rules.push_back({head, ecnf::BodyKind::Disj, std::move(options)});
			}
		}
		_noFold = nullptr;
		_group = nullptr;
		requireStratifiedGroup(ecnf::toRuleSet(_e, group), def.loc);
		_e.groups.push_back(std::move(group));
	}
};

void Grounder::run() {
	size_t defCount = _theory.definitions.size();
	_evaluated.assign(defCount, 0);
	_groupDefined.assign(_voc.atomCount(), 0);

	// Definitions whose inputs are decided are computed outright; doing
	// so may decide another definition's inputs, so iterate.
	bool changed = true;
	while (changed && !_unsat) {
		changed = false;
		for (size_t i = 0; i < defCount; ++i) {
			if (_evaluated[i] || !definitionEvaluable(_theory.definitions[i])) continue;
			evaluateDefinition(_theory.definitions[i]);
			_evaluated[i] = 1;
			changed = true;
			if (_unsat) break;
		}
	}
	if (_unsat) {
		_e.clauses.push_back({});
		return;
	}
	for (size_t i = 0; i < defCount; ++i) {
		if (_evaluated[i]) continue;
		for (PredId p : _theory.definitions[i].definedPreds) {
			int off = _voc.atomOffset(p);
			for (int t = 0; t < _voc.tupleCount(p); ++t) _groupDefined[off + t] = 1;
		}
	}
	// Every decided atom is pinned by a unit clause, so the ground theory
	// stands on its own: total assignments project exactly onto the models
	// extending the structure. For a still-ruled atom the unit is moreover
	// a real constraint, since the rules must both respect the value and
	// derive it.
	for (int idx = 0; idx < _voc.atomCount(); ++idx) {
		if (!_overlay.twoValued(idx)) continue;
		Lit l = _e.atomVar(idx);
		pushClause({_overlay.value(idx) == Truth::True ? l : -l});
	}
	for (size_t i = 0; i < defCount; ++i) {
		if (!_evaluated[i]) groundDefinition(_theory.definitions[i]);
	}
	for (const Formula& s : _theory.sentences) {
		_env.clear();
		emitTrue(formula(s));
	}
}

std::optional<std::vector<Truth>> unitPropagate(int varCount,
		const std::vector<std::vector<Lit>>& clauses) {
	std::vector<Truth> values(varCount + 1, Truth::Unknown);
	auto litTrue = [&](Lit l) {
		Truth v = values[rules::litVar(l)];
		return l > 0 ? v == Truth::True : v == Truth::False;
	};
	auto litFalse = [&](Lit l) {
		Truth v = values[rules::litVar(l)];
		return l > 0 ? v == Truth::False : v == Truth::True;
	};
	bool changed = true;
	while (changed) {
		changed = false;
		for (const std::vector<Lit>& cl : clauses) {
			Lit last = 0;
			int unknown = 0;
			bool sat = false;
			for (Lit l : cl) {
				if (litTrue(l)) {
					sat = true;
					break;
				}
				if (!litFalse(l)) {
					++unknown;
					last = l;
				}
			}
			if (sat) continue;
			if (unknown == 0) return std::nullopt;
			if (unknown == 1) {
				values[rules::litVar(last)] = last > 0 ? Truth::True : Truth::False;
				changed = true;
			}
		}
	}
	return values;
}

} // namespace

GroundOptions::GroundOptions() : sizeCap(1000000) {
	const char* env = std::getenv("KBREVISE_SIZE_CAP");
	if (!env || !*env) return;
	char* end = nullptr;
	long long cap = std::strtoll(env, &end, 10);
	if (end == nullptr || *end != '\0' || cap <= 0) {
		throw inputError("KBREVISE_SIZE_CAP must be a positive integer");
	}
	sizeCap = cap;
}

ecnf::Ecnf ground(const lang::Theory& theory, const ThreeValuedStructure& s,
		const GroundOptions& opt) {
	Grounder g(theory, s, opt);
	g.run();
	return g.takeEcnf();
}

ecnf::Ecnf ground(const lang::Theory& theory, const lang::AggregateTerm& objective,
		const ThreeValuedStructure& s, Objective& out, const GroundOptions& opt) {
	Grounder g(theory, s, opt);
	g.run();
	out = g.groundObjective(objective);
	return g.takeEcnf();
}

std::optional<ThreeValuedStructure> propagate(const lang::Theory& theory,
		const ThreeValuedStructure& s, const GroundOptions& opt) {
	ThreeValuedStructure cur = s;
	for (;;) {
		Grounder g(theory, cur, opt);
		g.run();
		if (g.unsat()) return std::nullopt;
		ecnf::Ecnf e = g.takeEcnf();
		std::vector<std::vector<Lit>> clauses = e.clauses;
		for (const ecnf::RuleGroup& group : e.groups) {
			for (std::vector<Lit>& cl : ecnf::completionClauses(group)) {
				clauses.push_back(std::move(cl));
			}
		}
		auto values = unitPropagate(e.varCount, clauses);
		if (!values) return std::nullopt;
		ThreeValuedStructure next = g.overlay();
		for (int idx = 0; idx < (int)g.groupDefined().size(); ++idx) {
			if (next.twoValued(idx) || g.groupDefined()[idx]) continue;
			Truth v = (*values)[e.atomVar(idx)];
			if (v != Truth::Unknown) next.set(idx, v);
		}
		if (next == cur) return next;
		cur = next;
	}
}

} // namespace kbr::ground
