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

#include "kbr/solver.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace kbr::solver {

namespace {

int litVar(Lit l) {
	return l < 0 ? -l : l;
}

// Luby restart sequence 1 1 2 1 1 2 4 ..., zero-based.
std::uint64_t luby(std::uint64_t x) {
	std::uint64_t size = 1;
	int seq = 0;
	while (size < x + 1) {
		seq++;
		size = 2 * size + 1;
	}
	while (size - 1 != x) {
		size = (size - 1) / 2;
		seq--;
		x %= size;
	}
	return std::uint64_t(1) << seq;
}

} // namespace

Solver::Solver(const ecnf::Ecnf& e, SolverOptions opt) : _n(e.varCount), _opt(opt) {
	_assign.assign(_n + 1, 0);
	_level.assign(_n + 1, 0);
	_trailPos.assign(_n + 1, 0);
	_reason.assign(_n + 1, Reason{});
	_applied.assign(_n + 1, 0);
	_activity.assign(_n + 1, 0.0);
	_phase.assign(_n + 1, 0);
	_seen.assign(_n + 1, 0);
	_watches.assign(2 * _n + 2, {});
	_cwatch.assign(2 * _n + 2, {});
	_model.assign(_n + 1, Truth::Unknown);
	_rng = opt.seed != 0 ? opt.seed : 0x9e3779b97f4a7c15ull;
	for (const auto& cl : e.clauses) {
		addClauseInternal(cl);
	}
	for (const auto& g : e.groups) {
		for (auto& cl : ecnf::completionClauses(g)) {
			addClauseInternal(std::move(cl));
		}
		_groups.push_back(ecnf::toRuleSet(e, g));
	}
	for (const auto& c : e.constraints) {
		addConstraintInternal(c);
	}
}

void Solver::addClause(std::vector<Lit> clause) {
	cancelUntil(0);
	addClauseInternal(std::move(clause));
}

void Solver::addConstraint(const ecnf::Constraint& c) {
	cancelUntil(0);
	addConstraintInternal(c);
}

bool Solver::addClauseInternal(std::vector<Lit> c) {
	if (_unsat) return false;
	std::sort(c.begin(), c.end(), [](Lit a, Lit b) {
		int va = litVar(a);
		int vb = litVar(b);
		return va != vb ? va < vb : a < b;
	});
	std::vector<Lit> out;
	Lit last = 0;
	for (Lit q : c) {
		if (q == last) continue;
		if (last != 0 && q == -last) return true; // tautology
		last = q;
		if (_assign[litVar(q)] != 0) {
			// Only level-0 values exist when clauses are added.
			if (value(q) > 0) return true;
			continue;
		}
		out.push_back(q);
	}
	if (out.empty()) {
		_unsat = true;
		return false;
	}
	if (out.size() == 1) {
		enqueue(out[0], Reason{});
		return true;
	}
	int ci = (int)_clauses.size();
	_watches[enc(out[0])].push_back(ci);
	_watches[enc(out[1])].push_back(ci);
	_clauses.push_back(std::move(out));
	return true;
}

void Solver::addConstraintInternal(const ecnf::Constraint& con) {
	if (_unsat) return;
	std::map<Lit, long long> merged;
	for (size_t i = 0; i < con.lits.size(); ++i) {
		if (con.weights[i] <= 0) {
			throw std::invalid_argument("constraint weights must be positive");
		}
		merged[con.lits[i]] += con.weights[i];
	}
	LinCon c;
	c.guard = con.guard;
	c.geq = con.geq;
	c.bound = con.bound;
	long long total = 0;
	for (const auto& [l, w] : merged) {
		c.items.push_back({w, l});
		total += w;
	}
	std::sort(c.items.begin(), c.items.end(), [](const auto& a, const auto& b) {
		return a.first != b.first ? a.first > b.first : a.second < b.second;
	});
	if (c.geq && c.bound <= 0) return;      // trivially true
	if (!c.geq && c.bound >= total) return; // trivially true
	// Counters cover the processed part of the trail only; pending
	// literals contribute when propagation reaches them.
	c.counter = 0;
	for (const auto& [w, l] : c.items) {
		int v = litVar(l);
		bool processed = _assign[v] != 0 && _trailPos[v] < (int)_qhead;
		if (c.geq) {
			if (!(processed && value(l) < 0)) c.counter += w;
		} else {
			if (processed && value(l) > 0) c.counter += w;
		}
	}
	int ci = (int)_cons.size();
	_cons.push_back(std::move(c));
	_inDirty.push_back(0);
	attachWatches(ci);
	markDirty(ci);
}

void Solver::attachWatches(int ci) {
	const LinCon& c = _cons[ci];
	for (const auto& [w, l] : c.items) {
		// The zero-delta entry wakes no counter update; it exists so the
		// constraint is rechecked when backtracking unassigns the literal.
		if (c.geq) {
			_cwatch[enc(-l)].push_back({ci, -w});
			_cwatch[enc(l)].push_back({ci, 0});
		} else {
			_cwatch[enc(l)].push_back({ci, w});
			_cwatch[enc(-l)].push_back({ci, 0});
		}
	}
	if (c.guard != 0) {
		_cwatch[enc(c.guard)].push_back({ci, 0});
		_cwatch[enc(-c.guard)].push_back({ci, 0});
	}
}

void Solver::markDirty(int ci) {
	if (!_inDirty[ci]) {
		_inDirty[ci] = 1;
		_dirty.push_back(ci);
	}
}

void Solver::enqueue(Lit p, Reason r) {
	int v = litVar(p);
	_assign[v] = p > 0 ? 1 : -1;
	_level[v] = decisionLevel();
	_reason[v] = r;
	_trailPos[v] = (int)_trail.size();
	_trail.push_back(p);
	++_assigned;
}

void Solver::cancelUntil(int level) {
	if (decisionLevel() <= level) return;
	size_t lim = (size_t)_trailLim[level];
	for (size_t i = _trail.size(); i-- > lim;) {
		Lit p = _trail[i];
		int v = litVar(p);
		const auto& ws = _cwatch[enc(p)];
		if (!ws.empty()) {
			if (_applied[v]) {
				for (const CWatch& cw : ws) _cons[cw.con].counter -= cw.delta;
			}
			for (const CWatch& cw : ws) markDirty(cw.con);
		}
		_applied[v] = 0;
		_phase[v] = _assign[v];
		_assign[v] = 0;
		_reason[v] = Reason{};
		--_assigned;
	}
	_trail.resize(lim);
	_trailLim.resize(level);
	_qhead = lim;
}

bool Solver::propagate() {
	while (!_dirty.empty() || _qhead < _trail.size()) {
		if (!_dirty.empty()) {
			int ci = _dirty.back();
			_dirty.pop_back();
			_inDirty[ci] = 0;
			if (!checkCon(ci)) return false;
			continue;
		}
		Lit p = _trail[_qhead++];
		_stats.propagations++;
		const auto& ws = _cwatch[enc(p)];
		for (const CWatch& cw : ws) _cons[cw.con].counter += cw.delta;
		_applied[litVar(p)] = 1;
		if (!propagateClauses(p)) return false;
		for (const CWatch& cw : ws) {
			if (!checkCon(cw.con)) return false;
		}
	}
	return true;
}

bool Solver::propagateClauses(Lit p) {
	Lit fl = -p;
	std::vector<int>& ws = _watches[enc(fl)];
	size_t i = 0;
	size_t j = 0;
	while (i < ws.size()) {
		int ci = ws[i++];
		std::vector<Lit>& c = _clauses[ci];
		if (c[0] == fl) std::swap(c[0], c[1]);
		if (value(c[0]) > 0) {
			ws[j++] = ci;
			continue;
		}
		bool moved = false;
		for (size_t k = 2; k < c.size(); ++k) {
			if (value(c[k]) >= 0) {
				std::swap(c[1], c[k]);
				_watches[enc(c[1])].push_back(ci);
				moved = true;
				break;
			}
		}
		if (moved) continue;
		ws[j++] = ci;
		if (value(c[0]) < 0) {
			_confl = c;
			while (i < ws.size()) ws[j++] = ws[i++];
			ws.resize(j);
			return false;
		}
		enqueue(c[0], Reason{RKind::Clause, ci});
	}
	ws.resize(j);
	return true;
}

bool Solver::checkCon(int ci) {
	LinCon& c = _cons[ci];
	signed char gv = c.guard != 0 ? value(c.guard) : (signed char)-1;
	if (gv > 0) return true; // satisfied through the guard
	if (c.geq) {
		long long slack = c.counter - c.bound;
		if (slack < 0) {
			if (c.guard != 0 && gv == 0) {
				enqueue(c.guard, Reason{RKind::Constraint, ci});
				return true;
			}
			conflictFromCon(ci);
			return false;
		}
		if (c.guard != 0 && gv == 0) return true;
		for (const auto& [w, l] : c.items) {
			if (w <= slack) break;
			if (value(l) == 0) enqueue(l, Reason{RKind::Constraint, ci});
		}
	} else {
		long long room = c.bound - c.counter;
		if (room < 0) {
			if (c.guard != 0 && gv == 0) {
				enqueue(c.guard, Reason{RKind::Constraint, ci});
				return true;
			}
			conflictFromCon(ci);
			return false;
		}
		if (c.guard != 0 && gv == 0) return true;
		for (const auto& [w, l] : c.items) {
			if (w <= room) break;
			if (value(l) == 0) enqueue(-l, Reason{RKind::Constraint, ci});
		}
	}
	return true;
}

void Solver::conflictFromCon(int ci) {
	const LinCon& c = _cons[ci];
	_confl.clear();
	if (c.guard != 0) _confl.push_back(c.guard);
	for (const auto& [w, l] : c.items) {
		(void)w;
		if (c.geq ? value(l) < 0 : value(l) > 0) _confl.push_back(c.geq ? l : -l);
	}
}

std::vector<Lit> Solver::reasonFor(int v) const {
	const Reason& r = _reason[v];
	if (r.kind == RKind::Clause) return _clauses[r.idx];
	const LinCon& c = _cons[r.idx];
	Lit implied = _assign[v] > 0 ? v : -v;
	int pos = _trailPos[v];
	std::vector<Lit> out{implied};
	// Premises are the literals assigned before the implication fired.
	if (c.guard != 0 && litVar(c.guard) != v && value(c.guard) < 0 &&
	    _trailPos[litVar(c.guard)] < pos) {
		out.push_back(c.guard);
	}
	for (const auto& [w, l] : c.items) {
		(void)w;
		int lv = litVar(l);
		if (lv == v || _trailPos[lv] >= pos) continue;
		if (c.geq) {
			if (value(l) < 0) out.push_back(l);
		} else {
			if (value(l) > 0) out.push_back(-l);
		}
	}
	return out;
}

void Solver::analyze(std::vector<Lit>& out, int& backjump) {
	out.clear();
	out.push_back(0); // slot for the asserting literal
	std::vector<int> toClear;
	std::vector<Lit> reasonBuf;
	const std::vector<Lit>* rc = &_confl;
	int pathC = 0;
	Lit p = 0;
	size_t idx = _trail.size();
	for (;;) {
		for (Lit q : *rc) {
			if (q == p) continue;
			int v = litVar(q);
			if (_seen[v] || _level[v] == 0) continue;
			_seen[v] = 1;
			toClear.push_back(v);
			bump(v);
			if (_level[v] == decisionLevel()) {
				pathC++;
			} else {
				out.push_back(q);
			}
		}
		while (!_seen[litVar(_trail[--idx])]) {}
		p = _trail[idx];
		_seen[litVar(p)] = 0;
		pathC--;
		if (pathC == 0) break;
		// The reason lists the implied literal itself; the q == p test
		// skips it during resolution.
		reasonBuf = reasonFor(litVar(p));
		rc = &reasonBuf;
	}
	out[0] = -p;
	if (out.size() == 1) {
		backjump = 0;
	} else {
		size_t maxI = 1;
		for (size_t i = 2; i < out.size(); ++i) {
			if (_level[litVar(out[i])] > _level[litVar(out[maxI])]) maxI = i;
		}
		std::swap(out[1], out[maxI]);
		backjump = _level[litVar(out[1])];
	}
	for (int v : toClear) _seen[v] = 0;
}

void Solver::learn(std::vector<Lit> learnt, int backjump) {
	cancelUntil(backjump);
	if (learnt.size() == 1) {
		enqueue(learnt[0], Reason{});
		return;
	}
	int ci = (int)_clauses.size();
	_watches[enc(learnt[0])].push_back(ci);
	_watches[enc(learnt[1])].push_back(ci);
	Lit first = learnt[0];
	_clauses.push_back(std::move(learnt));
	enqueue(first, Reason{RKind::Clause, ci});
}

bool Solver::resolveConflict() {
	_stats.conflicts++;
	int clvl = 0;
	for (Lit q : _confl) clvl = std::max(clvl, _level[litVar(q)]);
	if (clvl == 0) {
		_unsat = true;
		return false;
	}
	// Stable-model conflicts can sit below the current decision level;
	// analysis needs the conflict at the top of the trail.
	cancelUntil(clvl);
	std::vector<Lit> learnt;
	int backjump = 0;
	analyze(learnt, backjump);
	learn(std::move(learnt), backjump);
	decayActivity();
	return true;
}

void Solver::bump(int v) {
	if ((_activity[v] += _actInc) > 1e100) {
		for (int u = 1; u <= _n; ++u) _activity[u] *= 1e-100;
		_actInc *= 1e-100;
	}
}

void Solver::decayActivity() {
	_actInc /= 0.95;
}

std::uint64_t Solver::nextRand() {
	_rng ^= _rng << 13;
	_rng ^= _rng >> 7;
	_rng ^= _rng << 17;
	return _rng;
}

Lit Solver::pickBranch() {
	int v = 0;
	if (_opt.randomPercent > 0 && (int)(nextRand() % 100) < _opt.randomPercent) {
		int k = (int)(nextRand() % (std::uint64_t)(_n - _assigned));
		for (int u = 1; u <= _n; ++u) {
			if (_assign[u] == 0 && k-- == 0) {
				v = u;
				break;
			}
		}
	}
	if (v == 0) {
		double best = -1.0;
		for (int u = 1; u <= _n; ++u) {
			if (_assign[u] == 0 && _activity[u] > best) {
				best = _activity[u];
				v = u;
			}
		}
	}
	return _phase[v] > 0 ? v : -v;
}

bool Solver::stableCheck() {
	if (_groups.empty()) return true;
	std::vector<Truth> vals(_n + 1, Truth::Unknown);
	for (int v = 1; v <= _n; ++v) {
		vals[v] = _assign[v] > 0 ? Truth::True : Truth::False;
	}
	for (const auto& g : _groups) {
		auto bad = g.stableConflict(vals);
		if (bad) {
			_stats.stableConflicts++;
			_confl = std::move(*bad);
			return false;
		}
	}
	return true;
}

bool Solver::solve(const std::vector<Lit>& assumptions) {
	if (_unsat) return false;
	for (Lit a : assumptions) {
		if (a == 0 || litVar(a) > _n) {
			throw std::invalid_argument("assumption out of range");
		}
	}
	cancelUntil(0);
	std::uint64_t sinceRestart = 0;
	std::uint64_t restarts = 0;
	for (;;) {
		if (!propagate()) {
			if (!resolveConflict()) return false;
			sinceRestart++;
			continue;
		}
		// Walk the assumptions before declaring any assignment total, so
		// a model is only ever reported below all assumption levels.
		if (decisionLevel() < (int)assumptions.size()) {
			Lit a = assumptions[decisionLevel()];
			signed char av = value(a);
			if (av < 0) return false; // assumption already refuted
			_trailLim.push_back((int)_trail.size());
			if (av == 0) enqueue(a, Reason{});
			continue;
		}
		if (_assigned == _n) {
			if (stableCheck()) {
				for (int v = 1; v <= _n; ++v) {
					_model[v] = _assign[v] > 0 ? Truth::True : Truth::False;
				}
				return true;
			}
			if (!resolveConflict()) return false;
			sinceRestart++;
			continue;
		}
		if (sinceRestart >= 64 * luby(restarts)) {
			restarts++;
			_stats.restarts++;
			sinceRestart = 0;
			cancelUntil(0);
			continue;
		}
		_stats.decisions++;
		_trailLim.push_back((int)_trail.size());
		enqueue(pickBranch(), Reason{});
	}
}

long long Objective::valueUnder(const std::vector<Truth>& total) const {
	long long v = 0;
	for (const auto& [l, w] : items) {
		Truth t = total[litVar(l)];
		if (l > 0 ? t == Truth::True : t == Truth::False) v += w;
	}
	return v;
}

std::optional<OptResult> minimize(const ecnf::Ecnf& e, const Objective& obj,
		const std::vector<Lit>& assumptions, SolverOptions opt) {
	for (const auto& [l, w] : obj.items) {
		if (w <= 0) throw std::invalid_argument("objective weights must be positive");
		if (l == 0 || litVar(l) > e.varCount) {
			throw std::invalid_argument("objective literal out of range");
		}
	}
	Solver s(e, opt);
	if (!s.solve(assumptions)) return std::nullopt;
	OptResult best;
	best.model = s.model();
	best.value = obj.valueUnder(best.model);
	while (best.value > 0) {
		ecnf::Constraint tighter;
		tighter.geq = false;
		tighter.bound = best.value - 1;
		for (const auto& [l, w] : obj.items) {
			tighter.lits.push_back(l);
			tighter.weights.push_back(w);
		}
		s.addConstraint(tighter);
		if (!s.solve(assumptions)) break;
		best.model = s.model();
		best.value = obj.valueUnder(best.model);
	}
	best.stats = s.stats();
	return best;
}

} // namespace kbr::solver
