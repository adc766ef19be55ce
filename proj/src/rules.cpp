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

#include "kbr/rules.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "kbr/error.hpp"

namespace kbr::rules {

struct GroundRuleSet::Cache {
	StratificationReport report;
	// Rule indices grouped by the stratum of their head.
	std::vector<std::vector<int>> rulesByStratum;
	// Defined variables grouped by stratum.
	std::vector<std::vector<int>> varsByStratum;
	// watch[v]: rules with a positive body literal on v and a head in the
	// same stratum as v; drives semi-naive re-firing.
	std::vector<std::vector<int>> watch;
};

GroundRuleSet::GroundRuleSet(int varCount)
	: _varCount(varCount), _defined(varCount + 1, 0) {
	if (varCount < 0)
		throw groundError("negative variable count");
}

GroundRuleSet::GroundRuleSet(const GroundRuleSet& other)
	: _varCount(other._varCount), _rules(other._rules), _defined(other._defined) {}

GroundRuleSet& GroundRuleSet::operator=(const GroundRuleSet& other) {
	_varCount = other._varCount;
	_rules = other._rules;
	_defined = other._defined;
	_cache.reset();
	return *this;
}

GroundRuleSet::GroundRuleSet(GroundRuleSet&&) noexcept = default;
GroundRuleSet& GroundRuleSet::operator=(GroundRuleSet&&) noexcept = default;
GroundRuleSet::~GroundRuleSet() = default;

void GroundRuleSet::declareDefined(int var) {
	if (var < 1 || var > _varCount)
		throw groundError("defined variable out of range");
	_defined[var] = 1;
	_cache.reset();
}

void GroundRuleSet::add(int head, std::vector<Lit> body) {
	if (head < 1 || head > _varCount)
		throw groundError("rule head out of range");
	for (Lit l : body)
		if (l == 0 || litVar(l) > _varCount)
			throw groundError("rule body literal out of range");
	_defined[head] = 1;
	_rules.push_back(GroundRule{head, std::move(body)});
	_cache.reset();
}

std::vector<int> GroundRuleSet::definedVars() const {
	std::vector<int> out;
	for (int v = 1; v <= _varCount; v++)
		if (_defined[v])
			out.push_back(v);
	return out;
}

std::vector<int> GroundRuleSet::openVars() const {
	std::vector<char> seen(_varCount + 1, 0);
	for (const GroundRule& r : _rules)
		for (Lit l : r.body)
			if (!_defined[litVar(l)])
				seen[litVar(l)] = 1;
	std::vector<int> out;
	for (int v = 1; v <= _varCount; v++)
		if (seen[v])
			out.push_back(v);
	return out;
}

namespace {

// Tarjan's algorithm, iterative. Components come out dependencies-first.
struct SccFinder {
	const std::vector<std::vector<std::pair<int, bool>>>& adj;
	std::vector<int> index, low, comp;
	std::vector<char> onStack;
	std::vector<int> stack;
	int counter = 0, comps = 0;

	explicit SccFinder(const std::vector<std::vector<std::pair<int, bool>>>& a)
		: adj(a), index(a.size(), -1), low(a.size(), 0), comp(a.size(), -1),
		  onStack(a.size(), 0) {}

	void run(int start) {
		struct Frame {
			int v;
			size_t edge;
		};
		std::vector<Frame> frames{{start, 0}};
		index[start] = low[start] = counter++;
		stack.push_back(start);
		onStack[start] = 1;
		while (!frames.empty()) {
			Frame& f = frames.back();
			if (f.edge < adj[f.v].size()) {
				int w = adj[f.v][f.edge++].first;
				if (index[w] == -1) {
					index[w] = low[w] = counter++;
					stack.push_back(w);
					onStack[w] = 1;
					frames.push_back(Frame{w, 0});
				} else if (onStack[w]) {
					low[f.v] = std::min(low[f.v], index[w]);
				}
			} else {
				if (low[f.v] == index[f.v]) {
					while (true) {
						int w = stack.back();
						stack.pop_back();
						onStack[w] = 0;
						comp[w] = comps;
						if (w == f.v)
							break;
					}
					comps++;
				}
				int done = f.v;
				frames.pop_back();
				if (!frames.empty())
					low[frames.back().v] = std::min(low[frames.back().v], low[done]);
			}
		}
	}
};

}  // namespace

const StratificationReport& GroundRuleSet::stratify() const {
	return cache().report;
}

const GroundRuleSet::Cache& GroundRuleSet::cache() const {
	if (_cache)
		return *_cache;
	auto c = std::make_unique<Cache>();
	StratificationReport& rep = c->report;
	rep.stratumOf.assign(_varCount + 1, -1);

	// Dense node ids for defined variables.
	std::vector<int> nodeOf(_varCount + 1, -1);
	std::vector<int> varOfNode;
	for (int v = 1; v <= _varCount; v++)
		if (_defined[v]) {
			nodeOf[v] = (int)varOfNode.size();
			varOfNode.push_back(v);
		}
	int n = (int)varOfNode.size();

	// head -> defined body variable, negative flag on the edge.
	std::vector<std::vector<std::pair<int, bool>>> adj(n);
	for (const GroundRule& r : _rules)
		for (Lit l : r.body)
			if (_defined[litVar(l)])
				adj[nodeOf[r.head]].push_back({nodeOf[litVar(l)], !litPos(l)});

	SccFinder scc(adj);
	for (int v = 0; v < n; v++)
		if (scc.index[v] == -1)
			scc.run(v);

	// Components are numbered dependencies-first; sweeping them in that order
	// sees every dependency's final stratum before assigning the dependent's.
	std::vector<std::vector<int>> nodesByComp(scc.comps);
	for (int u = 0; u < n; u++)
		nodesByComp[scc.comp[u]].push_back(u);
	std::vector<int> compStratum(scc.comps, 0);
	int negU = -1, negV = -1;
	for (int cid = 0; cid < scc.comps && negU == -1; cid++)
		for (int u : nodesByComp[cid]) {
			for (auto [w, neg] : adj[u]) {
				if (scc.comp[w] == cid) {
					if (neg) {
						negU = u;
						negV = w;
						break;
					}
					continue;
				}
				compStratum[cid] = std::max(compStratum[cid],
						compStratum[scc.comp[w]] + (neg ? 1 : 0));
			}
			if (negU != -1)
				break;
		}

	if (negU != -1) {
		rep.stratified = false;
		// Cycle: negU -> negV, then a positive-graph path negV ..> negU
		// inside the component, found by breadth-first search.
		std::vector<int> prev(n, -1);
		std::vector<int> queue{negV};
		prev[negV] = negV;
		for (size_t qi = 0; qi < queue.size(); qi++) {
			int u = queue[qi];
			if (u == negU)
				break;
			for (auto [w, neg] : adj[u]) {
				(void)neg;
				if (scc.comp[w] == scc.comp[negU] && prev[w] == -1) {
					prev[w] = u;
					queue.push_back(w);
				}
			}
		}
		std::vector<int> path;
		for (int u = negU; u != negV; u = prev[u])
			path.push_back(varOfNode[u]);
		path.push_back(varOfNode[negV]);
		std::reverse(path.begin(), path.end());
		// path = [negV, ..., negU]; cycle order starts at the rule head.
		std::rotate(path.begin(), path.end() - 1, path.end());
		rep.witnessCycle = path;
		_cache = std::move(c);
		return *_cache;
	}

	int strata = 0;
	for (int v = 0; v < n; v++) {
		rep.stratumOf[varOfNode[v]] = compStratum[scc.comp[v]];
		strata = std::max(strata, compStratum[scc.comp[v]] + 1);
	}
	rep.strataCount = n == 0 ? 0 : strata;

	c->rulesByStratum.assign(rep.strataCount, {});
	c->varsByStratum.assign(rep.strataCount, {});
	c->watch.assign(_varCount + 1, {});
	for (int v = 1; v <= _varCount; v++)
		if (_defined[v])
			c->varsByStratum[rep.stratumOf[v]].push_back(v);
	for (size_t i = 0; i < _rules.size(); i++) {
		int s = rep.stratumOf[_rules[i].head];
		c->rulesByStratum[s].push_back((int)i);
		for (Lit l : _rules[i].body)
			if (litPos(l) && _defined[l] && rep.stratumOf[l] == s)
				c->watch[l].push_back((int)i);
	}
	_cache = std::move(c);
	return *_cache;
}

void GroundRuleSet::requireStratified(const Cache& c) const {
	if (c.report.stratified)
		return;
	std::string msg = "rule set is not stratified: recursion through negation on cycle";
	for (int v : c.report.witnessCycle)
		msg += " " + std::to_string(v);
	throw groundError(msg);
}

void GroundRuleSet::requireOpenCovered(const std::vector<Truth>& values) const {
	if ((int)values.size() != _varCount + 1)
		throw groundError("assignment has the wrong variable count");
	for (int v : openVars())
		if (values[v] == Truth::Unknown)
			throw groundError("open atom " + std::to_string(v) + " is not two-valued");
}

void GroundRuleSet::runStratum(const Cache& c, int s, std::vector<Truth>& vals,
		std::vector<int>* order, std::vector<int>* firedBy) const {
	for (int v : c.varsByStratum[s])
		vals[v] = Truth::False;

	auto bodyTrue = [&](const GroundRule& r) {
		for (Lit l : r.body) {
			Truth t = vals[litVar(l)];
			if ((t == Truth::True) != litPos(l))
				return false;
		}
		return true;
	};
	std::vector<int> delta;
	auto tryFire = [&](int ri) {
		const GroundRule& r = _rules[ri];
		if (vals[r.head] == Truth::True || !bodyTrue(r))
			return;
		vals[r.head] = Truth::True;
		delta.push_back(r.head);
		if (order)
			order->push_back(r.head);
		if (firedBy)
			(*firedBy)[r.head] = ri;
	};

	for (int ri : c.rulesByStratum[s])
		tryFire(ri);

	std::vector<int> front;
	std::vector<int> stamp(_rules.size(), -1);
	int round = 0;
	while (!delta.empty()) {
		front.swap(delta);
		delta.clear();
		std::vector<int> candidates;
		for (int v : front)
			for (int ri : c.watch[v])
				if (stamp[ri] != round) {
					stamp[ri] = round;
					candidates.push_back(ri);
				}
		round++;
		for (int ri : candidates)
			tryFire(ri);
	}
}

std::vector<Truth> GroundRuleSet::evaluate(std::vector<Truth> values) const {
	const Cache& c = cache();
	requireStratified(c);
	requireOpenCovered(values);
	for (int s = 0; s < c.report.strataCount; s++)
		runStratum(c, s, values, nullptr, nullptr);
	return values;
}

bool GroundRuleSet::checkDefined(const std::vector<Truth>& total) const {
	const Cache& c = cache();
	requireStratified(c);
	requireOpenCovered(total);
	for (int v : definedVars())
		if (total[v] == Truth::Unknown)
			throw groundError("defined atom " + std::to_string(v) + " is not two-valued");
	std::vector<Truth> lfp = evaluate(total);
	for (int v : definedVars())
		if (lfp[v] != total[v])
			return false;
	return true;
}

std::optional<std::vector<Lit>> GroundRuleSet::stableConflict(
		const std::vector<Truth>& total) const {
	const Cache& c = cache();
	requireStratified(c);
	requireOpenCovered(total);
	for (int v : definedVars())
		if (total[v] == Truth::Unknown)
			throw groundError("defined atom " + std::to_string(v) + " is not two-valued");

	std::vector<Truth> vals = total;
	std::vector<int> firedBy(_varCount + 1, -1);
	for (int s = 0; s < c.report.strataCount; s++) {
		std::vector<int> order;
		runStratum(c, s, vals, &order, &firedBy);

		std::vector<int> unfounded;
		for (int v : c.varsByStratum[s])
			if (total[v] == Truth::True && vals[v] == Truth::False)
				unfounded.push_back(v);

		if (!unfounded.empty()) {
			// Loop clause: either some unfounded atom is false, or a rule
			// body that does not lean on the unfounded set supports one.
			std::set<int> inU(unfounded.begin(), unfounded.end());
			std::vector<Lit> clause;
			for (int v : unfounded)
				clause.push_back(-v);
			for (int ri : c.rulesByStratum[s]) {
				const GroundRule& r = _rules[ri];
				if (!inU.count(r.head))
					continue;
				bool internal = false;
				for (Lit l : r.body)
					if (litPos(l) && inU.count(l)) {
						internal = true;
						break;
					}
				if (internal)
					continue;
				Lit falseLit = 0;
				for (Lit l : r.body)
					if ((total[litVar(l)] == Truth::True) != litPos(l)) {
						falseLit = l;
						break;
					}
				if (falseLit == 0)
					throw groundError("unfounded set has a satisfied external body");
				clause.push_back(falseLit);
			}
			std::set<Lit> dedup;
			std::vector<Lit> out;
			for (Lit l : clause)
				if (dedup.insert(l).second)
					out.push_back(l);
			return out;
		}

		for (int v : order) {
			if (total[v] != Truth::False)
				continue;
			// First derived atom the assignment got wrong: its firing rule's
			// body is true under the assignment, so body -> head is falsified.
			const GroundRule& r = _rules[firedBy[v]];
			std::vector<Lit> clause{v};
			std::set<Lit> dedup{v};
			for (Lit l : r.body)
				if (dedup.insert(-l).second)
					clause.push_back(-l);
			return clause;
		}
	}
	return std::nullopt;
}

}  // namespace kbr::rules
