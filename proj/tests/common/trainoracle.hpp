// Copyright (C) 2026 The kbrevise authors
// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive route enumeration for the train corpus. Reads the rail data
// straight off a total structure and recomputes the minimal revision metric
// by brute force over per-train segment subsets, independently of the
// grounder, the solver and the revision engine.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kbr/structure.hpp"
#include "kbr/vocabulary.hpp"

namespace kbrtest {

using namespace kbr;

struct RailOracleResult {
	bool sat = false;
	long long metric = 0;
	// True when every optimal revision leaves the given train untouched.
	bool allOptimaAvoidOther = true;
};

namespace raildetail {

struct Route {
	uint32_t edges = 0;   // bit per track index
	uint32_t visited = 0; // bit per node index
};

} // namespace raildetail

// Minimal revision metric for the train corpus: enumerate all pairs of valid
// routes, keep those that flip every atom of `changes` and hold every atom of
// `fixed`, and take the cheapest weighted difference to `m` outside `changes`.
// `otherTrain` names the train whose atoms the optima are checked against.
inline RailOracleResult railReviseOracle(const Model& m,
		const std::vector<DomainAtom>& changes, const std::vector<DomainAtom>& fixed,
		const std::map<DomainAtom, long long>& weights, const std::string& otherTrain) {
	const Vocabulary& voc = m.voc();
	PredId useP = *voc.predId("use");
	PredId visitsP = *voc.predId("visits");
	PredId trackP = *voc.predId("track");
	PredId startP = *voc.predId("start");
	PredId atP = *voc.predId("at");
	PredId platformP = *voc.predId("platform");
	PredId goalP = *voc.predId("goal");

	const Sort& trainSort = voc.sort(voc.pred(useP).argSorts[0]);
	const Sort& nodeSort = voc.sort(voc.pred(useP).argSorts[1]);
	const Sort& stationSort = voc.sort(voc.pred(goalP).argSorts[1]);
	int nTrains = (int)trainSort.elements.size();
	int nNodes = (int)nodeSort.elements.size();
	int nStations = (int)stationSort.elements.size();

	auto holds = [&](PredId p, std::vector<DomainElement> args) {
		return m.holds(*voc.atomIndex(DomainAtom{p, std::move(args)}));
	};
	auto node = [&](int i) { return nodeSort.elements[i]; };
	auto train = [&](int i) { return trainSort.elements[i]; };

	std::vector<std::pair<int, int>> tracks;
	for (int a = 0; a < nNodes; a++)
		for (int b = 0; b < nNodes; b++)
			if (holds(trackP, {node(a), node(b)})) tracks.push_back({a, b});
	if (tracks.size() > 20) throw std::runtime_error("railReviseOracle: too many tracks");

	std::vector<int> startOf(nTrains, -1);
	for (int t = 0; t < nTrains; t++)
		for (int n = 0; n < nNodes; n++)
			if (holds(startP, {train(t), node(n)})) startOf[t] = n;

	uint32_t platforms = 0;
	for (int n = 0; n < nNodes; n++)
		if (holds(platformP, {node(n)})) platforms |= 1u << n;

	// stationNodes[s] = platform nodes of station s
	std::vector<uint32_t> stationNodes(nStations, 0);
	for (int n = 0; n < nNodes; n++)
		for (int s = 0; s < nStations; s++)
			if (holds(atP, {node(n), stationSort.elements[s]})) stationNodes[s] |= 1u << n;

	std::vector<std::vector<int>> goalsOf(nTrains);
	for (int t = 0; t < nTrains; t++)
		for (int s = 0; s < nStations; s++)
			if (holds(goalP, {train(t), stationSort.elements[s]})) goalsOf[t].push_back(s);

	// All valid routes per train: every used segment lies on the part of the
	// net the train reaches from its start, and every goal station is hit.
	std::vector<std::vector<raildetail::Route>> routes(nTrains);
	for (int t = 0; t < nTrains; t++) {
		for (uint32_t mask = 0; mask < (1u << tracks.size()); mask++) {
			uint32_t visited = 1u << startOf[t];
			bool grew = true;
			while (grew) {
				grew = false;
				for (size_t k = 0; k < tracks.size(); k++) {
					if (!(mask & (1u << k))) continue;
					uint32_t va = 1u << tracks[k].first;
					uint32_t vb = 1u << tracks[k].second;
					uint32_t add = ((visited & va) ? vb : 0) | ((visited & vb) ? va : 0);
					if (add & ~visited) {
						visited |= add;
						grew = true;
					}
				}
			}
			bool ok = true;
			for (size_t k = 0; ok && k < tracks.size(); k++) {
				if (!(mask & (1u << k))) continue;
				if (!(visited & (1u << tracks[k].first)) || !(visited & (1u << tracks[k].second)))
					ok = false;
			}
			for (int s : goalsOf[t])
				if (ok && !(stationNodes[s] & visited)) ok = false;
			if (ok) routes[t].push_back({mask, visited});
		}
	}
	if (nTrains != 2) throw std::runtime_error("railReviseOracle: expects two trains");

	// Candidate value of an arbitrary atom under a route pair.
	auto valueOf = [&](const DomainAtom& atom, const raildetail::Route* r) -> bool {
		if (atom.pred == useP) {
			int t = (int)*voc.elementIndex(voc.pred(useP).argSorts[0], atom.args[0]);
			int a = (int)*voc.elementIndex(voc.pred(useP).argSorts[1], atom.args[1]);
			int b = (int)*voc.elementIndex(voc.pred(useP).argSorts[2], atom.args[2]);
			for (size_t k = 0; k < tracks.size(); k++)
				if (tracks[k].first == a && tracks[k].second == b) return r[t].edges & (1u << k);
			return false;
		}
		if (atom.pred == visitsP) {
			int t = (int)*voc.elementIndex(voc.pred(visitsP).argSorts[0], atom.args[0]);
			int n = (int)*voc.elementIndex(voc.pred(visitsP).argSorts[1], atom.args[1]);
			return r[t].visited & (1u << n);
		}
		return m.holds(*voc.atomIndex(atom));
	};
	auto weightOf = [&](const DomainAtom& atom) -> long long {
		auto it = weights.find(atom);
		return it == weights.end() ? 1 : it->second;
	};
	std::set<DomainAtom> inC(changes.begin(), changes.end());
	int otherIdx = (int)*voc.elementIndex(voc.pred(useP).argSorts[0], DomainElement::symbol(otherTrain));

	RailOracleResult best;
	for (const auto& r0 : routes[0]) {
		for (const auto& r1 : routes[1]) {
			if (r0.visited & r1.visited & platforms) continue;
			raildetail::Route pair[2] = {r0, r1};
			bool ok = true;
			for (const auto& c : changes)
				if (valueOf(c, pair) == m.holds(*voc.atomIndex(c))) ok = false;
			for (const auto& g : fixed)
				if (valueOf(g, pair) != m.holds(*voc.atomIndex(g))) ok = false;
			if (!ok) continue;

			long long metric = 0;
			bool touchesOther = false;
			for (int t = 0; t < nTrains; t++) {
				for (size_t k = 0; k < tracks.size(); k++) {
					DomainAtom a{useP, {train(t), node(tracks[k].first), node(tracks[k].second)}};
					if (inC.count(a)) continue;
					if (bool(pair[t].edges & (1u << k)) != m.holds(*voc.atomIndex(a))) {
						metric += weightOf(a);
						if (t == otherIdx) touchesOther = true;
					}
				}
				for (int n = 0; n < nNodes; n++) {
					DomainAtom a{visitsP, {train(t), node(n)}};
					if (inC.count(a)) continue;
					if (bool(pair[t].visited & (1u << n)) != m.holds(*voc.atomIndex(a))) {
						metric += weightOf(a);
						if (t == otherIdx) touchesOther = true;
					}
				}
			}
			if (!best.sat || metric < best.metric) {
				best.sat = true;
				best.metric = metric;
				best.allOptimaAvoidOther = !touchesOther;
			} else if (metric == best.metric && touchesOther) {
				best.allOptimaAvoidOther = false;
			}
		}
	}
	return best;
}

} // namespace kbrtest
