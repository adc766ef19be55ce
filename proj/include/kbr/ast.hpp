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

#pragma once

#include <set>
#include <string>
#include <vector>

#include "kbr/structure.hpp"

namespace kbr::lang {

enum class TermKind { Variable, Constant, Arith };
enum class ArithOp { Add, Sub, Mul, Div, Mod, Neg, Abs };

struct Term {
	TermKind kind = TermKind::Constant;
	std::string var;                                  // Variable
	DomainElement value = DomainElement::number(0);   // Constant
	ArithOp op = ArithOp::Add;                        // Arith
	std::vector<Term> args;                           // Arith operands
	SortId sort = -1;            // filled by typecheck; -2 marks an integer expression
	SourceLoc loc;

	static Term variable(std::string name, SourceLoc l = {});
	static Term constant(DomainElement e, SourceLoc l = {});
	static Term arith(ArithOp op, std::vector<Term> args, SourceLoc l = {});
};

bool equalTerm(const Term& a, const Term& b); // structural, ignores source locations

struct TypedVar {
	std::string name;
	std::string sortName; // empty when the sort is to be inferred
	SortId sort = -1;
	SourceLoc loc;
};

enum class FKind {
	BoolConst, // boolval
	Atom,      // pred/predId + args
	Cmp,       // cmp over args[0], args[1]
	Not, And, Or, Implies, Equiv, // children
	Forall, Exists,               // boundVar, children[0]
	CountQ,                       // boundVar, countKind, count, children[0]
	AggCmp                        // agg{setVars : children[0] : weight} cmp bound
};

enum class CmpOp { Eq, Neq, Lt, Leq, Gt, Geq };
enum class CountKind { Exactly, AtLeast, AtMost };
enum class AggFun { Card, Sum, Min, Max, Prod };

struct Formula {
	FKind kind = FKind::BoolConst;
	bool boolval = false;

	std::string pred;
	PredId predId = -1;
	std::vector<Term> args; // Atom arguments or Cmp operands

	CmpOp cmp = CmpOp::Eq;

	std::vector<Formula> children;

	TypedVar boundVar;       // Forall / Exists / CountQ
	CountKind countKind = CountKind::Exactly;
	long long count = 0;

	AggFun agg = AggFun::Card;         // AggCmp
	std::vector<TypedVar> setVars;     // AggCmp set expression binders
	Term weight;                       // AggCmp weight term (constant 1 for card)
	Term bound;                        // AggCmp right-hand side

	SourceLoc loc;

	static Formula boolConst(bool v, SourceLoc l = {});
	static Formula atom(std::string pred, PredId id, std::vector<Term> args, SourceLoc l = {});
	static Formula cmpf(CmpOp op, Term lhs, Term rhs, SourceLoc l = {});
	static Formula connect(FKind kind, std::vector<Formula> children, SourceLoc l = {});
	static Formula negate(Formula f, SourceLoc l = {});
	static Formula quantify(FKind kind, TypedVar v, Formula body, SourceLoc l = {});
	static Formula countq(CountKind ck, long long k, TypedVar v, Formula body, SourceLoc l = {});
	static Formula aggcmp(AggFun agg, std::vector<TypedVar> vars, Formula cond, Term weight,
			CmpOp cmp, Term bound, SourceLoc l = {});
};

bool equalFormula(const Formula& a, const Formula& b);

/** A standalone aggregate term, as used for optimization objectives. */
struct AggregateTerm {
	AggFun fun = AggFun::Card;
	std::vector<TypedVar> vars;
	Formula condition;
	Term weight;
	SourceLoc loc;
};

struct Rule {
	std::vector<TypedVar> vars; // rule scope (explicit plus inferred)
	Formula head;               // FKind::Atom; arguments are variables or constants
	Formula body;
	SourceLoc loc;
};

struct Definition {
	std::vector<Rule> rules;
	std::vector<PredId> definedPreds; // filled by typecheck
	SourceLoc loc;
};

struct Theory {
	std::string name;
	std::vector<Formula> sentences;
	std::vector<Definition> definitions;
};

bool equalTheory(const Theory& a, const Theory& b);

/** The three blocks of a knowledge-base file. */
struct KbFile {
	VocabularyPtr voc;
	Theory theory;
	ThreeValuedStructure structure;
	std::string structureName;
	bool structureTotal = false;
};

void collectFreeVars(const Term& t, const std::set<std::string>& bound, std::set<std::string>& out);
void collectFreeVars(const Formula& f, std::set<std::string> bound, std::set<std::string>& out);

} // namespace kbr::lang
