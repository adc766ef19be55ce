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

#include "kbr/ecnf.hpp"

#include <ostream>
#include <sstream>

namespace kbr::ecnf {

std::string Ecnf::note(int var) const {
	if (isAtomVar(var)) return voc->atomText(var - 1);
	if (var > atomVars && var <= varCount) return auxNote[var - atomVars - 1];
	return "?";
}

rules::GroundRuleSet toRuleSet(const Ecnf& e, const RuleGroup& g) {
	rules::GroundRuleSet rs(e.varCount);
	for (const EcnfRule& r : g.rules) {
		rs.declareDefined(r.head);
		if (r.kind == BodyKind::Conj) {
			rs.add(r.head, r.body);
		} else {
			for (Lit l : r.body) rs.add(r.head, {l});
		}
	}
	return rs;
}

std::vector<std::vector<Lit>> completionClauses(const RuleGroup& g) {
	std::vector<std::vector<Lit>> out;
	for (const EcnfRule& r : g.rules) {
		if (r.kind == BodyKind::Conj) {
			std::vector<Lit> back{r.head};
			for (Lit l : r.body) {
				out.push_back({-r.head, l});
				back.push_back(-l);
			}
			out.push_back(std::move(back));
		} else {
			std::vector<Lit> fwd{-r.head};
			for (Lit l : r.body) {
				out.push_back({r.head, -l});
				fwd.push_back(l);
			}
			out.push_back(std::move(fwd));
		}
	}
	return out;
}

namespace {

bool litTrue(Lit l, const std::vector<Truth>& values) {
	Truth v = values[rules::litVar(l)];
	return l > 0 ? v == Truth::True : v == Truth::False;
}

} // namespace

bool clauseHolds(const std::vector<Lit>& clause, const std::vector<Truth>& values) {
	for (Lit l : clause) {
		if (litTrue(l, values)) return true;
	}
	return false;
}

bool constraintHolds(const Constraint& c, const std::vector<Truth>& values) {
	if (c.guard != 0 && litTrue(c.guard, values)) return true;
	long long sum = 0;
	for (size_t i = 0; i < c.lits.size(); ++i) {
		if (litTrue(c.lits[i], values)) sum += c.weights[i];
	}
	return c.geq ? sum >= c.bound : sum <= c.bound;
}

bool checkEcnf(const Ecnf& e, const std::vector<Truth>& total) {
	if ((int)total.size() != e.varCount + 1) {
		throw groundError("assignment does not cover every variable");
	}
	for (int v = 1; v <= e.varCount; ++v) {
		if (total[v] == Truth::Unknown) {
			throw groundError("assignment leaves variable " + std::to_string(v) + " unknown");
		}
	}
	for (const std::vector<Lit>& cl : e.clauses) {
		if (!clauseHolds(cl, total)) return false;
	}
	for (const Constraint& c : e.constraints) {
		if (!constraintHolds(c, total)) return false;
	}
	for (const RuleGroup& g : e.groups) {
		if (!toRuleSet(e, g).checkDefined(total)) return false;
	}
	return true;
}

void dumpEcnf(const Ecnf& e, std::ostream& out) {
	out << "p ecnf " << e.varCount << ' ' << e.clauses.size() << ' ' << e.ruleCount() << ' '
			<< e.constraints.size() << '\n';
	for (int v = 1; v <= e.atomVars; ++v) {
		out << "c# atom " << v << ' ' << e.voc->atomText(v - 1) << '\n';
	}
	for (int v = e.atomVars + 1; v <= e.varCount; ++v) {
		out << "c# aux " << v << ' ' << e.auxNote[v - e.atomVars - 1] << '\n';
	}
	for (const std::vector<Lit>& cl : e.clauses) {
		for (Lit l : cl) out << l << ' ';
		out << "0\n";
	}
	for (size_t gi = 0; gi < e.groups.size(); ++gi) {
		out << "c# group " << gi << '\n';
		for (const EcnfRule& r : e.groups[gi].rules) {
			out << "r " << r.head << (r.kind == BodyKind::Conj ? " conj" : " disj");
			for (Lit l : r.body) out << ' ' << l;
			out << " 0\n";
		}
	}
	for (const Constraint& c : e.constraints) {
		bool card = c.cardinality();
		out << (card ? "c" : "w");
		if (c.guard != 0) out << "g " << c.guard;
		out << ' ' << c.bound << ' ' << (c.geq ? ">=" : "<=");
		for (size_t i = 0; i < c.lits.size(); ++i) {
			if (card) {
				out << ' ' << c.lits[i];
			} else {
				out << ' ' << c.weights[i] << ' ' << c.lits[i];
			}
		}
		out << " 0\n";
	}
}

std::string dumpEcnf(const Ecnf& e) {
	std::ostringstream out;
	dumpEcnf(e, out);
	return out.str();
}

} // namespace kbr::ecnf
