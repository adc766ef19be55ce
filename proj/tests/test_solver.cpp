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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "common/generators.hpp"
#include "common/oracles.hpp"
#include "common/testutil.hpp"
#include "kbr/ground.hpp"
#include "kbr/pretty.hpp"
#include "kbr/solver.hpp"

using namespace kbr;
using namespace kbr::lang;
using ecnf::Lit;
using solver::Solver;
using kbrtest::parseChecked;

namespace {

const char* kGenVoc = R"(
vocabulary V {
	type T = {a, b};
	type N = {0..2};
	pred p(T);
	pred q(N);
	pred r;
}
)";

ecnf::Ecnf groundText(const std::string& text) {
	KbFile kb = parseChecked(text);
	return ground::ground(kb.theory, kb.structure);
}

/** An ecnf over plain variables, without a vocabulary behind it. */
ecnf::Ecnf bareEcnf(int vars) {
	ecnf::Ecnf e;
	e.varCount = vars;
	e.atomVars = vars;
	return e;
}

ecnf::Constraint mkCon(Lit guard, bool geq, long long bound,
		std::initializer_list<Lit> lits, std::initializer_list<long long> weights) {
	ecnf::Constraint c;
	c.guard = guard;
	c.geq = geq;
	c.bound = bound;
	c.lits = lits;
	c.weights = weights;
	return c;
}

/** Every total assignment satisfying the ecnf, projected onto the atoms. */
std::set<std::vector<Truth>> bruteModels(const ecnf::Ecnf& e) {
	REQUIRE(e.varCount <= 20);
	std::set<std::vector<Truth>> out;
	std::vector<Truth> total(e.varCount + 1, Truth::Unknown);
	for (unsigned long long mask = 0; mask < (1ull << e.varCount); ++mask) {
		for (int v = 1; v <= e.varCount; ++v) {
			total[v] = (mask >> (v - 1)) & 1 ? Truth::True : Truth::False;
		}
		if (!ecnf::checkEcnf(e, total)) continue;
		out.insert(std::vector<Truth>(total.begin() + 1, total.begin() + 1 + e.atomVars));
	}
	return out;
}

/** All models found by the solver, projected onto the atoms, via blocking
 *  clauses over the full assignment. */
std::set<std::vector<Truth>> solveAll(const ecnf::Ecnf& e, std::uint64_t seed = 1) {
	REQUIRE(e.varCount <= 16);
	Solver s(e, solver::SolverOptions{seed, 2});
	std::set<std::vector<Truth>> out;
	unsigned long long rounds = 0;
	while (s.solve()) {
		REQUIRE(++rounds <= (1ull << e.varCount));
		const std::vector<Truth>& m = s.model();
		out.insert(std::vector<Truth>(m.begin() + 1, m.begin() + 1 + e.atomVars));
		std::vector<Lit> block;
		for (int v = 1; v <= e.varCount; ++v) {
			block.push_back(m[v] == Truth::True ? -v : v);
		}
		s.addClause(std::move(block));
	}
	return out;
}

std::set<std::vector<Truth>> asSet(const std::vector<ThreeValuedStructure>& models) {
	std::set<std::vector<Truth>> out;
	for (const ThreeValuedStructure& m : models) {
		std::vector<Truth> row;
		for (int i = 0; i < m.voc().atomCount(); ++i) row.push_back(m.value(i));
		out.insert(std::move(row));
	}
	return out;
}

std::set<std::vector<Truth>> oracleSet(const Theory& theory, const ThreeValuedStructure& base) {
	return asSet(kbrtest::oracleModels(desugarTheory(theory), base));
}

/** Frozen expectation rows: 1 for true, 0 for false, one entry per atom. */
std::set<std::vector<Truth>> rows(std::initializer_list<std::vector<int>> bits) {
	std::set<std::vector<Truth>> out;
	for (const std::vector<int>& r : bits) {
		std::vector<Truth> row;
		for (int b : r) row.push_back(b ? Truth::True : Truth::False);
		out.insert(std::move(row));
	}
	return out;
}

/** Random clauses, linear constraints and a stratified rule group. */
ecnf::Ecnf randomEcnf(std::mt19937_64& rng) {
	int n = 4 + (int)kbrtest::pick(rng, 6);
	ecnf::Ecnf e = bareEcnf(n);
	auto randLit = [&] {
		int v = 1 + (int)kbrtest::pick(rng, (size_t)n);
		return kbrtest::chance(rng, 50) ? v : -v;
	};
	size_t nClauses = kbrtest::pick(rng, (size_t)n);
	for (size_t i = 0; i < nClauses; ++i) {
		std::vector<Lit> cl;
		size_t len = 1 + kbrtest::pick(rng, 3);
		for (size_t j = 0; j < len; ++j) cl.push_back(randLit());
		e.clauses.push_back(std::move(cl));
	}
	if (kbrtest::chance(rng, 60)) {
		// One rule per head; negation only on open variables keeps the
		// group stratified while leaving positive loops in.
		ecnf::RuleGroup g;
		std::set<int> defined;
		size_t heads = 1 + kbrtest::pick(rng, (size_t)(n / 2));
		while (defined.size() < heads) defined.insert(1 + (int)kbrtest::pick(rng, (size_t)n));
		for (int h : defined) {
			ecnf::EcnfRule r;
			r.head = h;
			r.kind = kbrtest::chance(rng, 50) ? ecnf::BodyKind::Conj : ecnf::BodyKind::Disj;
			size_t len = 1 + kbrtest::pick(rng, 3);
			for (size_t j = 0; j < len; ++j) {
				int v = 1 + (int)kbrtest::pick(rng, (size_t)n);
				bool neg = !defined.count(v) && kbrtest::chance(rng, 40);
				r.body.push_back(neg ? -v : v);
			}
			g.rules.push_back(std::move(r));
		}
		e.groups.push_back(std::move(g));
	}
	size_t nCons = kbrtest::pick(rng, 3);
	for (size_t i = 0; i < nCons; ++i) {
		ecnf::Constraint c;
		size_t len = 1 + kbrtest::pick(rng, 3);
		long long total = 0;
		for (size_t j = 0; j < len; ++j) {
			c.lits.push_back(randLit());
			c.weights.push_back(1 + (long long)kbrtest::pick(rng, 4));
			total += c.weights.back();
		}
		c.geq = kbrtest::chance(rng, 50);
		c.bound = (long long)kbrtest::pick(rng, (size_t)total + 2);
		if (kbrtest::chance(rng, 35)) c.guard = randLit();
		e.constraints.push_back(std::move(c));
	}
	return e;
}

} // namespace

TEST_CASE("unit propagation closes a horn chain without deciding") {
	ecnf::Ecnf e = bareEcnf(3);
	e.clauses = {{1}, {-1, 2}, {-2, 3}};
	Solver s(e);
	REQUIRE(s.solve());
	CHECK(s.model()[1] == Truth::True);
	CHECK(s.model()[2] == Truth::True);
	CHECK(s.model()[3] == Truth::True);
	CHECK(s.stats().decisions == 0);
	CHECK(s.solve()); // solving again succeeds
}

TEST_CASE("contradictions stay unsatisfiable") {
	SUBCASE("conflicting units") {
		ecnf::Ecnf e = bareEcnf(1);
		e.clauses = {{1}, {-1}};
		Solver s(e);
		CHECK(!s.solve());
		CHECK(!s.solve());
	}
	SUBCASE("the empty clause") {
		ecnf::Ecnf e = bareEcnf(2);
		e.clauses = {{}};
		Solver s(e);
		CHECK(!s.solve());
	}
	SUBCASE("learned units survive between calls") {
		ecnf::Ecnf e = bareEcnf(2);
		e.clauses = {{1, 2}};
		Solver s(e);
		REQUIRE(s.solve());
		s.addClause({-1});
		s.addClause({-2});
		CHECK(!s.solve());
	}
}

TEST_CASE("clause search agrees with brute force on a crafted instance") {
	ecnf::Ecnf e = bareEcnf(3);
	e.clauses = {{1, 2}, {-1, 3}, {-2, -3, 1}};
	CHECK(solveAll(e) == bruteModels(e));
	CHECK(solveAll(e) == rows({{0, 1, 0}, {1, 0, 1}, {1, 1, 1}}));
}

TEST_CASE("weighted propagation forces heavy literals") {
	// Duplicate literals merge: 2*1 + 3*1 + 4*2 >= 5 needs variable 1.
	ecnf::Ecnf e = bareEcnf(2);
	e.constraints = {mkCon(0, true, 5, {1, 1, 2}, {2, 3, 4})};
	Solver s(e);
	REQUIRE(s.solve());
	CHECK(s.model()[1] == Truth::True);
	CHECK(s.stats().decisions <= 1);
	CHECK(solveAll(e) == rows({{1, 0}, {1, 1}}));
}

TEST_CASE("guards absorb violated constraints") {
	ecnf::Ecnf e = bareEcnf(3);
	e.constraints = {mkCon(3, true, 2, {1, 2}, {1, 1})};
	SUBCASE("a false guard enforces the sum") {
		Solver s(e);
		REQUIRE(s.solve({-3}));
		CHECK(s.model()[1] == Truth::True);
		CHECK(s.model()[2] == Truth::True);
	}
	SUBCASE("a true guard frees the sum") {
		Solver s(e);
		REQUIRE(s.solve({3, -1}));
		CHECK(s.model()[1] == Truth::False);
	}
	SUBCASE("an unsatisfiable sum implies its guard") {
		e.clauses = {{-1}, {-2}};
		Solver s(e);
		REQUIRE(s.solve());
		CHECK(s.model()[3] == Truth::True);
		CHECK(s.stats().decisions == 0);
	}
}

TEST_CASE("upper bounds cap the true weight") {
	ecnf::Ecnf e = bareEcnf(3);
	e.constraints = {mkCon(0, false, 3, {1, 2, 3}, {2, 2, 2})};
	CHECK(solveAll(e) == bruteModels(e));
	CHECK(solveAll(e) == rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
}

TEST_CASE("positive loops need external support") {
	// d(a)=1 d(b)=2 u(a)=3 u(b)=4.
	ecnf::Ecnf e = groundText(R"(
vocabulary V {
	type T = {a, b};
	pred d(T);
	pred u(T);
}
theory G : V {
	{ u(x) <- d(x) & u(x). }
}
)");
	SUBCASE("the completion alone would accept self-support") {
		Solver s(e);
		REQUIRE(!s.solve({3}));
		CHECK(s.stats().stableConflicts >= 1);
	}
	SUBCASE("all models leave the loop false") {
		CHECK(solveAll(e)
				== rows({{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}}));
	}
}

TEST_CASE("recursion through an existential stays founded") {
	KbFile kb = parseChecked(R"(
vocabulary V {
	type T = {a, b};
	pred d(T);
	pred v(T);
	pred u(T);
}
theory G : V {
	{ u(x) <- (? y : u(y) & d(y)) | v(x). }
}
)");
	ecnf::Ecnf e = ground::ground(kb.theory, kb.structure);
	CHECK(solveAll(e) == oracleSet(kb.theory, kb.structure));
}

TEST_CASE("random ecnf instances match brute force") {
	std::mt19937_64 rng(7);
	for (int iter = 0; iter < 150; ++iter) {
		CAPTURE(iter);
		ecnf::Ecnf e = randomEcnf(rng);
		CHECK(solveAll(e, 100 + iter) == bruteModels(e));
	}
}

TEST_CASE("assumptions restrict the search like clauses") {
	ecnf::Ecnf e = bareEcnf(3);
	e.clauses = {{1, 2}, {-2, 3}};
	Solver s(e);
	for (Lit a1 : {1, -1}) {
		for (Lit a2 : {2, -2}) {
			CAPTURE(a1);
			CAPTURE(a2);
			ecnf::Ecnf restricted = e;
			restricted.clauses.push_back({a1});
			restricted.clauses.push_back({a2});
			bool want = !bruteModels(restricted).empty();
			CHECK(s.solve({a1, a2}) == want);
			if (want) {
				CHECK(s.model()[a1 < 0 ? -a1 : a1] == (a1 > 0 ? Truth::True : Truth::False));
				CHECK(s.model()[a2 < 0 ? -a2 : a2] == (a2 > 0 ? Truth::True : Truth::False));
			}
		}
	}
	CHECK(s.solve()); // assumptions leave no trace
}

TEST_CASE("solving is deterministic for a seed") {
	ecnf::Ecnf e = groundText(std::string(kGenVoc)
			+ "theory G : V { card{ x : q(x) } >= 1. ~r | p(a). }");
	std::vector<Truth> first;
	for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
		Solver s(e, solver::SolverOptions{seed, 2});
		Solver t(e, solver::SolverOptions{seed, 2});
		REQUIRE(s.solve());
		REQUIRE(t.solve());
		CHECK(s.model() == t.model());
		std::vector<Truth> total = s.model();
		CHECK(ecnf::checkEcnf(e, total));
	}
}

TEST_CASE("a minimization descent reaches the optimum") {
	SUBCASE("a covering clause keeps the count at one") {
		ecnf::Ecnf e = bareEcnf(3);
		e.clauses = {{1, 2, 3}};
		solver::Objective obj;
		obj.items = {{1, 1}, {2, 1}, {3, 1}};
		auto r = solver::minimize(e, obj);
		REQUIRE(r.has_value());
		CHECK(r->value == 1);
	}
	SUBCASE("an unconstrained objective falls to zero") {
		ecnf::Ecnf e = bareEcnf(1);
		solver::Objective obj;
		obj.items = {{1, 1}};
		auto r = solver::minimize(e, obj);
		REQUIRE(r.has_value());
		CHECK(r->value == 0);
		CHECK(r->model[1] == Truth::False);
	}
	SUBCASE("a grounded cardinality bound is met exactly") {
		ecnf::Ecnf e = groundText(std::string(kGenVoc)
				+ "theory G : V { card{ x : q(x) } >= 1. }");
		solver::Objective obj;
		for (int v = 1; v <= e.atomVars; ++v) obj.items.push_back({v, 1});
		auto r = solver::minimize(e, obj);
		REQUIRE(r.has_value());
		CHECK(r->value == 1);
		CHECK(ecnf::checkEcnf(e, r->model));
	}
	SUBCASE("assumptions raise the achievable floor") {
		ecnf::Ecnf e = bareEcnf(2);
		e.clauses = {{1, 2}};
		solver::Objective obj;
		obj.items = {{1, 3}, {2, 1}};
		auto r = solver::minimize(e, obj, {-2});
		REQUIRE(r.has_value());
		CHECK(r->value == 3);
		CHECK(!solver::minimize(e, obj, {-1, -2}).has_value());
	}
}

TEST_CASE("minimization matches the brute-force optimum") {
	std::mt19937_64 rng(11);
	for (int iter = 0; iter < 80; ++iter) {
		CAPTURE(iter);
		ecnf::Ecnf e = randomEcnf(rng);
		solver::Objective obj;
		size_t len = 1 + kbrtest::pick(rng, (size_t)e.varCount);
		for (size_t j = 0; j < len; ++j) {
			int v = 1 + (int)kbrtest::pick(rng, (size_t)e.varCount);
			obj.items.push_back({kbrtest::chance(rng, 50) ? v : -v,
					1 + (long long)kbrtest::pick(rng, 3)});
		}
		// Exhaustive reference minimum.
		std::optional<long long> want;
		std::vector<Truth> total(e.varCount + 1, Truth::Unknown);
		for (unsigned long long mask = 0; mask < (1ull << e.varCount); ++mask) {
			for (int v = 1; v <= e.varCount; ++v) {
				total[v] = (mask >> (v - 1)) & 1 ? Truth::True : Truth::False;
			}
			if (!ecnf::checkEcnf(e, total)) continue;
			long long val = obj.valueUnder(total);
			if (!want || val < *want) want = val;
		}
		auto got = solver::minimize(e, obj, {}, solver::SolverOptions{(std::uint64_t)iter + 1, 2});
		REQUIRE(got.has_value() == want.has_value());
		if (want) {
			CHECK(got->value == *want);
			CHECK(ecnf::checkEcnf(e, got->model));
			CHECK(obj.valueUnder(got->model) == got->value);
		}
	}
}

TEST_CASE("rule groups enforce foundedness in hand-built form") {
	SUBCASE("a self-loop with a forcing clause is unsatisfiable") {
		ecnf::Ecnf e = bareEcnf(1);
		ecnf::RuleGroup g;
		g.rules.push_back({1, ecnf::BodyKind::Conj, {1}});
		e.groups.push_back(g);
		e.clauses = {{1}};
		Solver s(e);
		CHECK(!s.solve());
		CHECK(s.stats().stableConflicts >= 1);
	}
	SUBCASE("an open support literal founds the loop") {
		// p <- q | r. q <- p. with r forced true.
		ecnf::Ecnf e = bareEcnf(3);
		ecnf::RuleGroup g;
		g.rules.push_back({1, ecnf::BodyKind::Disj, {2, 3}});
		g.rules.push_back({2, ecnf::BodyKind::Conj, {1}});
		e.groups.push_back(g);
		e.clauses = {{3}};
		CHECK(solveAll(e) == rows({{1, 1, 1}}));
	}
	SUBCASE("acyclic rules never trigger loop learning") {
		std::mt19937_64 rng(21);
		for (int iter = 0; iter < 40; ++iter) {
			CAPTURE(iter);
			int n = 4 + (int)kbrtest::pick(rng, 5);
			ecnf::Ecnf e = bareEcnf(n);
			ecnf::RuleGroup g;
			// Bodies only mention strictly smaller variables: acyclic.
			for (int h = 2; h <= n; ++h) {
				if (!kbrtest::chance(rng, 60)) continue;
				ecnf::EcnfRule r;
				r.head = h;
				r.kind = kbrtest::chance(rng, 50) ? ecnf::BodyKind::Conj : ecnf::BodyKind::Disj;
				size_t len = 1 + kbrtest::pick(rng, 2);
				for (size_t j = 0; j < len; ++j) {
					int v = 1 + (int)kbrtest::pick(rng, (size_t)(h - 1));
					r.body.push_back(kbrtest::chance(rng, 70) ? v : -v);
				}
				g.rules.push_back(std::move(r));
			}
			if (g.rules.empty()) continue;
			e.groups.push_back(std::move(g));
			Solver s(e);
			unsigned long long rounds = 0;
			while (s.solve()) {
				REQUIRE(++rounds <= (1ull << n));
				std::vector<Lit> block;
				for (int v = 1; v <= n; ++v) {
					block.push_back(s.model()[v] == Truth::True ? -v : v);
				}
				s.addClause(std::move(block));
			}
			CHECK(s.stats().stableConflicts == 0);
		}
	}
}

TEST_CASE("unsatisfiability under assumptions is monotone") {
	std::mt19937_64 rng(31);
	int unsatSeen = 0;
	for (int iter = 0; iter < 120 && unsatSeen < 25; ++iter) {
		ecnf::Ecnf e = randomEcnf(rng);
		std::vector<Lit> assumps;
		for (int j = 0; j < 3; ++j) {
			int v = 1 + (int)kbrtest::pick(rng, (size_t)e.varCount);
			assumps.push_back(kbrtest::chance(rng, 50) ? v : -v);
		}
		Solver s(e);
		if (s.solve(assumps)) continue;
		++unsatSeen;
		CAPTURE(iter);
		std::vector<Lit> more = assumps;
		int v = 1 + (int)kbrtest::pick(rng, (size_t)e.varCount);
		more.push_back(kbrtest::chance(rng, 50) ? v : -v);
		CHECK(!s.solve(more));
	}
	CHECK(unsatSeen >= 10);
}

TEST_CASE("pigeonhole instances are refuted") {
	// Four pigeons, three holes; variable for pigeon i in hole j is 3i+j+1.
	auto pv = [](int i, int j) { return 3 * i + j + 1; };
	SUBCASE("as pure clauses") {
		ecnf::Ecnf e = bareEcnf(12);
		for (int i = 0; i < 4; ++i) {
			e.clauses.push_back({pv(i, 0), pv(i, 1), pv(i, 2)});
		}
		for (int j = 0; j < 3; ++j) {
			for (int i = 0; i < 4; ++i) {
				for (int k = i + 1; k < 4; ++k) {
					e.clauses.push_back({-pv(i, j), -pv(k, j)});
				}
			}
		}
		Solver s(e);
		CHECK(!s.solve());
		CHECK(s.stats().conflicts >= 1);
	}
	SUBCASE("as linear constraints") {
		ecnf::Ecnf e = bareEcnf(12);
		for (int i = 0; i < 4; ++i) {
			e.constraints.push_back(mkCon(0, true, 1,
					{pv(i, 0), pv(i, 1), pv(i, 2)}, {1, 1, 1}));
		}
		for (int j = 0; j < 3; ++j) {
			e.constraints.push_back(mkCon(0, false, 1,
					{pv(0, j), pv(1, j), pv(2, j), pv(3, j)}, {1, 1, 1, 1}));
		}
		Solver s(e);
		CHECK(!s.solve());
	}
}

TEST_CASE("solving random sentences matches the enumeration oracle") {
	std::mt19937_64 rng(2027);
	KbFile base = parseKb(kGenVoc);
	kbrtest::SentenceGen gen(*base.voc);
	int ran = 0;
	for (int iter = 0; iter < 80; ++iter) {
		Formula f = gen.sentence(rng);
		std::string text = std::string(kGenVoc) + "theory G : V { " + printFormula(f) + ". }";
		CAPTURE(iter);
		CAPTURE(printFormula(f));
		KbFile kb = parseChecked(text);
		ThreeValuedStructure s(kb.voc);
		for (int i = 0; i < kb.voc->atomCount(); ++i) {
			if (kbrtest::chance(rng, 40)) {
				s.set(i, kbrtest::chance(rng, 50) ? Truth::True : Truth::False);
			}
		}
		ecnf::Ecnf e = ground::ground(kb.theory, s);
		if (e.varCount > 13) continue;
		++ran;
		CHECK(solveAll(e, 10 + iter) == oracleSet(kb.theory, s));
	}
	CHECK(ran >= 40);
}

TEST_CASE("solving random definitions matches the enumeration oracle") {
	const char* kDefVoc = R"(
vocabulary V {
	type T = {a, b};
	pred u(T);
	pred v(T);
	pred w;
	pred d(T);
}
)";
	const char* templates[] = {
			"{ u(x) <- d(x) & u(x). }",
			"{ u(x) <- v(x) & d(x). v(x) <- u(x). }",
			"{ u(x) <- (? y : u(y) & d(y)) | v(x). }",
			"{ w <- ? x : u(x). u(x) <- d(x) & ~v(x). }",
			"{ u(x) <- v(x). v(x) <- u(x). } ? x : d(x).",
	};
	for (size_t ti = 0; ti < sizeof(templates) / sizeof(templates[0]); ++ti) {
		std::mt19937_64 rng(500 + ti);
		KbFile kb = parseChecked(std::string(kDefVoc) + "theory G : V { "
				+ std::string(templates[ti]) + " }");
		for (int rep = 0; rep < 6; ++rep) {
			CAPTURE(ti);
			CAPTURE(rep);
			ThreeValuedStructure s(kb.voc);
			for (int i = 0; i < kb.voc->atomCount(); ++i) {
				if (kbrtest::chance(rng, 35)) {
					s.set(i, kbrtest::chance(rng, 50) ? Truth::True : Truth::False);
				}
			}
			std::vector<ThreeValuedStructure> models =
					kbrtest::oracleModels(desugarTheory(kb.theory), s);
			auto e = ground::ground(kb.theory, s);
			REQUIRE(e.varCount <= 16);
			CHECK(solveAll(e, 40 + rep) == asSet(models));
		}
	}
}
