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

#include "kbr/parser.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "kbr/lexer.hpp"

namespace kbr::lang {

namespace {

bool isReserved(const std::string& w) {
	static const std::set<std::string> words = {
			"vocabulary", "theory", "structure", "type", "pred", "data", "total",
			"true", "false", "card", "sum", "min", "max", "prod", "abs"};
	return words.count(w) > 0;
}

std::optional<AggFun> aggFunOf(const std::string& w) {
	if (w == "card") return AggFun::Card;
	if (w == "sum") return AggFun::Sum;
	if (w == "min") return AggFun::Min;
	if (w == "max") return AggFun::Max;
	if (w == "prod") return AggFun::Prod;
	return std::nullopt;
}

std::optional<CmpOp> cmpOpOf(Tok k) {
	switch (k) {
	case Tok::Eq: return CmpOp::Eq;
	case Tok::Neq: return CmpOp::Neq;
	case Tok::Lt: return CmpOp::Lt;
	case Tok::Leq: return CmpOp::Leq;
	case Tok::Gt: return CmpOp::Gt;
	case Tok::Geq: return CmpOp::Geq;
	default: return std::nullopt;
	}
}

CmpOp flipCmp(CmpOp op) {
	switch (op) {
	case CmpOp::Lt: return CmpOp::Gt;
	case CmpOp::Leq: return CmpOp::Geq;
	case CmpOp::Gt: return CmpOp::Lt;
	case CmpOp::Geq: return CmpOp::Leq;
	default: return op; // Eq, Neq are symmetric
	}
}

class Parser {
public:
	explicit Parser(const std::string& text) : _toks(lex(text)) {}

	KbFile parseKbFile();
	ParsedStructure parseStructureOnly(VocabularyPtr voc);
	AggregateTerm parseAggTermOnly(VocabularyPtr voc);

private:
	std::vector<Token> _toks;
	size_t _pos = 0;
	VocabularyPtr _voc;
	std::vector<std::string> _scope;              // bound variables, innermost last
	std::vector<std::string>* _implicit = nullptr; // collects rule-level variables

	const Token& peek(size_t ahead = 0) const {
		size_t i = _pos + ahead;
		return i < _toks.size() ? _toks[i] : _toks.back();
	}
	bool at(Tok k) const { return peek().kind == k; }
	bool atWord(const char* w) const { return at(Tok::Ident) && peek().text == w; }
	Token advance() { return _toks[_pos < _toks.size() - 1 ? _pos++ : _pos]; }

	[[noreturn]] void fail(const std::string& msg, SourceLoc loc) const {
		throw parseError(msg, loc);
	}
	[[noreturn]] void fail(const std::string& msg) const { fail(msg, peek().loc); }

	Token expect(Tok k, const std::string& what) {
		if (!at(k)) fail("expected " + what + ", got '" + describe(peek()) + "'");
		return advance();
	}
	void expectWord(const char* w) {
		if (!atWord(w)) fail(std::string("expected '") + w + "', got '" + describe(peek()) + "'");
		advance();
	}
	static std::string describe(const Token& t) {
		if (t.kind == Tok::End) return "end of input";
		return t.text;
	}

	void checkDeclName(const Token& t) const {
		if (isReserved(t.text)) fail("'" + t.text + "' is a reserved word", t.loc);
	}
	bool boundInScope(const std::string& name) const {
		return std::find(_scope.rbegin(), _scope.rend(), name) != _scope.rend();
	}

	// blocks
	void parseVocabularyBlock();
	void parseTheoryBlock(Theory& out);
	void parseStructureBlock(ThreeValuedStructure& st, std::string& name, bool& total);

	// vocabulary declarations
	void parseTypeDecl(Vocabulary& voc);
	void parseTypeItem(Sort& sort);
	void parsePredDecl(Vocabulary& voc);
	long long parseSignedInt();
	DomainElement parseElementToken();

	// theory items
	Definition parseDefinition();
	Rule parseRule();
	std::vector<TypedVar> parseBinders();

	// formulas (loosest to tightest: <=> then =>/<= then | then & then unary)
	Formula parseFormula() { return parseEquiv(); }
	Formula parseEquiv();
	Formula parseImplication();
	Formula parseOr();
	Formula parseAnd();
	Formula parseUnary();
	Formula parseQuantified();
	Formula parsePrimary();
	Formula parseAtom();
	Formula parseCmpFrom(Term lhs);
	AggregateTerm parseAggTerm();
	bool parenStartsTerm() const;

	// terms
	Term parseTerm() { return parseAddSub(); }
	Term parseAddSub();
	Term parseMulDiv();
	Term parseTermAtom();
	Term resolveIdentTerm(const Token& t);

	// structure entries
	void parseStructureEntry(ThreeValuedStructure& st, bool& total, std::vector<PredId>& totalPreds);
	void parseTupleEntry(ThreeValuedStructure& st, PredId pid, Truth val);
	void setAtom(ThreeValuedStructure& st, int atomIdx, Truth val, SourceLoc loc) const;
};

KbFile Parser::parseKbFile() {
	parseVocabularyBlock();
	KbFile out;
	out.voc = _voc;
	out.theory.name = "";
	out.structure = ThreeValuedStructure(_voc);
	if (atWord("theory")) parseTheoryBlock(out.theory);
	if (atWord("structure")) {
		parseStructureBlock(out.structure, out.structureName, out.structureTotal);
	}
	if (!at(Tok::End)) fail("unexpected content after the last block");
	return out;
}

ParsedStructure Parser::parseStructureOnly(VocabularyPtr voc) {
	_voc = std::move(voc);
	ParsedStructure out;
	out.structure = ThreeValuedStructure(_voc);
	parseStructureBlock(out.structure, out.name, out.total);
	if (!at(Tok::End)) fail("unexpected content after the structure block");
	return out;
}

AggregateTerm Parser::parseAggTermOnly(VocabularyPtr voc) {
	_voc = std::move(voc);
	if (!at(Tok::Ident) || !aggFunOf(peek().text)) {
		fail("expected an aggregate term such as sum{ x : p(x) : x }");
	}
	AggregateTerm out = parseAggTerm();
	if (!at(Tok::End)) fail("unexpected content after the aggregate term");
	return out;
}

void Parser::parseVocabularyBlock() {
	expectWord("vocabulary");
	Token name = expect(Tok::Ident, "vocabulary name");
	checkDeclName(name);
	auto voc = std::make_shared<Vocabulary>(name.text);
	expect(Tok::LBrace, "'{'");
	while (!at(Tok::RBrace)) {
		if (atWord("type")) {
			parseTypeDecl(*voc);
		} else if (atWord("pred") || at(Tok::LBracket)) {
			parsePredDecl(*voc);
		} else {
			fail("expected a 'type' or 'pred' declaration");
		}
	}
	expect(Tok::RBrace, "'}'");
	voc->finalize();
	_voc = voc;
}

void Parser::parseTypeDecl(Vocabulary& voc) {
	expectWord("type");
	Token name = expect(Tok::Ident, "sort name");
	checkDeclName(name);
	expect(Tok::Eq, "'='");
	expect(Tok::LBrace, "'{'");
	Sort sort;
	sort.name = name.text;
	if (!at(Tok::RBrace)) {
		parseTypeItem(sort);
		while (at(Tok::Comma)) {
			advance();
			parseTypeItem(sort);
		}
	}
	expect(Tok::RBrace, "'}'");
	expect(Tok::Semi, "';'");
	voc.addSort(std::move(sort), name.loc);
}

void Parser::parseTypeItem(Sort& sort) {
	SourceLoc loc = peek().loc;
	if (at(Tok::Minus) || at(Tok::Int)) {
		long long first = parseSignedInt();
		if (at(Tok::DotDot)) {
			advance();
			long long last = parseSignedInt();
			if (last < first) fail("empty range: " + std::to_string(first) + ".." + std::to_string(last), loc);
			if (last - first + 1 > 100000) fail("range too large (over 100000 elements)", loc);
			for (long long v = first; v <= last; ++v) sort.elements.push_back(DomainElement::number(v));
		} else {
			sort.elements.push_back(DomainElement::number(first));
		}
		return;
	}
	Token e = expect(Tok::Ident, "domain element");
	checkDeclName(e);
	if (at(Tok::DotDot)) fail("range bounds must be integers", peek().loc);
	sort.elements.push_back(DomainElement::symbol(e.text));
}

void Parser::parsePredDecl(Vocabulary& voc) {
	PredKind kind = PredKind::Search;
	if (at(Tok::LBracket)) {
		advance();
		Token mark = expect(Tok::Ident, "'data'");
		if (mark.text != "data") fail("expected 'data'", mark.loc);
		expect(Tok::RBracket, "']'");
		kind = PredKind::Data;
	}
	expectWord("pred");
	Token name = expect(Tok::Ident, "predicate name");
	checkDeclName(name);
	Predicate pred;
	pred.name = name.text;
	pred.kind = kind;
	if (at(Tok::LParen)) {
		advance();
		if (!at(Tok::RParen)) {
			while (true) {
				Token s = expect(Tok::Ident, "sort name");
				auto sid = voc.sortId(s.text);
				if (!sid) fail("unknown sort '" + s.text + "'", s.loc);
				pred.argSorts.push_back(*sid);
				if (!at(Tok::Comma)) break;
				advance();
			}
		}
		expect(Tok::RParen, "')'");
	}
	expect(Tok::Semi, "';'");
	voc.addPredicate(std::move(pred), name.loc);
}

long long Parser::parseSignedInt() {
	bool negative = false;
	if (at(Tok::Minus)) {
		advance();
		negative = true;
	}
	Token t = expect(Tok::Int, "integer");
	return negative ? -t.number : t.number;
}

DomainElement Parser::parseElementToken() {
	if (at(Tok::Minus) || at(Tok::Int)) return DomainElement::number(parseSignedInt());
	Token e = expect(Tok::Ident, "domain element");
	return DomainElement::symbol(e.text);
}

void Parser::parseTheoryBlock(Theory& out) {
	expectWord("theory");
	Token name = expect(Tok::Ident, "theory name");
	out.name = name.text;
	expect(Tok::Colon, "':'");
	Token vref = expect(Tok::Ident, "vocabulary name");
	if (vref.text != _voc->name()) fail("unknown vocabulary '" + vref.text + "'", vref.loc);
	expect(Tok::LBrace, "'{'");
	while (!at(Tok::RBrace)) {
		if (at(Tok::LBrace)) {
			out.definitions.push_back(parseDefinition());
		} else {
			out.sentences.push_back(parseFormula());
			expect(Tok::Dot, "'.' after sentence");
		}
	}
	expect(Tok::RBrace, "'}'");
}

Definition Parser::parseDefinition() {
	Definition def;
	def.loc = peek().loc;
	expect(Tok::LBrace, "'{'");
	while (!at(Tok::RBrace)) {
		def.rules.push_back(parseRule());
	}
	if (def.rules.empty()) fail("a definition needs at least one rule", def.loc);
	expect(Tok::RBrace, "'}'");
	return def;
}

Rule Parser::parseRule() {
	Rule rule;
	rule.loc = peek().loc;
	size_t mark = _scope.size();
	if (at(Tok::Bang)) {
		advance();
		rule.vars = parseBinders();
		expect(Tok::Colon, "':'");
		for (const auto& v : rule.vars) _scope.push_back(v.name);
	}
	std::vector<std::string> implicit;
	_implicit = &implicit;

	if (!at(Tok::Ident) || !_voc->predId(peek().text)) {
		_implicit = nullptr;
		fail("expected a rule head (an atom of a declared predicate)");
	}
	rule.head = parseAtom();
	for (const Term& arg : rule.head.args) {
		if (arg.kind == TermKind::Arith) {
			_implicit = nullptr;
			fail("rule head arguments must be variables or domain elements", arg.loc);
		}
	}
	if (at(Tok::Arrow)) {
		advance();
		rule.body = parseFormula();
	} else {
		rule.body = Formula::boolConst(true, rule.loc);
	}
	_implicit = nullptr;
	expect(Tok::Dot, "'.' after rule");
	for (const std::string& name : implicit) {
		rule.vars.push_back(TypedVar{name, "", -1, rule.loc});
	}
	_scope.resize(mark);
	return rule;
}

std::vector<TypedVar> Parser::parseBinders() {
	std::vector<TypedVar> out;
	while (at(Tok::Ident)) {
		Token t = advance();
		checkDeclName(t);
		if (_voc->predId(t.text)) fail("variable '" + t.text + "' collides with a predicate", t.loc);
		if (_voc->sortId(t.text)) fail("variable '" + t.text + "' collides with a sort", t.loc);
		TypedVar v{t.text, "", -1, t.loc};
		if (at(Tok::LBracket)) {
			advance();
			Token s = expect(Tok::Ident, "sort name");
			if (!_voc->sortId(s.text)) fail("unknown sort '" + s.text + "'", s.loc);
			v.sortName = s.text;
			expect(Tok::RBracket, "']'");
		}
		for (const auto& seen : out) {
			if (seen.name == v.name) fail("duplicate variable '" + v.name + "'", t.loc);
		}
		out.push_back(std::move(v));
	}
	if (out.empty()) fail("expected a variable name");
	return out;
}

Formula Parser::parseEquiv() {
	Formula f = parseImplication();
	while (at(Tok::Equiv)) {
		SourceLoc loc = peek().loc;
		advance();
		Formula rhs = parseImplication();
		f = Formula::connect(FKind::Equiv, {std::move(f), std::move(rhs)}, loc);
	}
	return f;
}

Formula Parser::parseImplication() {
	Formula f = parseOr();
	if (at(Tok::Implies)) {
		SourceLoc loc = peek().loc;
		advance();
		Formula rhs = parseImplication();
		return Formula::connect(FKind::Implies, {std::move(f), std::move(rhs)}, loc);
	}
	if (at(Tok::RevImplies)) {
		SourceLoc loc = peek().loc;
		advance();
		Formula rhs = parseImplication();
		return Formula::connect(FKind::Implies, {std::move(rhs), std::move(f)}, loc);
	}
	return f;
}

Formula Parser::parseOr() {
	Formula f = parseAnd();
	while (at(Tok::Or)) {
		SourceLoc loc = peek().loc;
		advance();
		Formula rhs = parseAnd();
		f = Formula::connect(FKind::Or, {std::move(f), std::move(rhs)}, loc);
	}
	return f;
}

Formula Parser::parseAnd() {
	Formula f = parseUnary();
	while (at(Tok::And)) {
		SourceLoc loc = peek().loc;
		advance();
		Formula rhs = parseUnary();
		f = Formula::connect(FKind::And, {std::move(f), std::move(rhs)}, loc);
	}
	return f;
}

Formula Parser::parseUnary() {
	if (at(Tok::Not)) {
		SourceLoc loc = peek().loc;
		advance();
		return Formula::negate(parseUnary(), loc);
	}
	if (at(Tok::Bang) || at(Tok::Quest)) return parseQuantified();
	return parsePrimary();
}

// Quantifiers take the longest formula to their right: ! x : p(x) | q(x)
// quantifies the whole disjunction.
Formula Parser::parseQuantified() {
	SourceLoc loc = peek().loc;
	bool forall = at(Tok::Bang);
	advance();

	std::optional<std::pair<CountKind, long long>> count;
	if (!forall) {
		std::optional<std::pair<CountKind, long long>> mapped;
		switch (peek().kind) {
		case Tok::Eq:
		case Tok::Geq:
		case Tok::Leq:
		case Tok::Lt:
		case Tok::Gt: {
			Tok op = peek().kind;
			advance();
			Token k = expect(Tok::Int, "count");
			switch (op) {
			case Tok::Eq: mapped = {CountKind::Exactly, k.number}; break;
			case Tok::Geq: mapped = {CountKind::AtLeast, k.number}; break;
			case Tok::Leq: mapped = {CountKind::AtMost, k.number}; break;
			case Tok::Lt:
				if (k.number == 0) fail("count bound must be at least 1 after '?<'", k.loc);
				mapped = {CountKind::AtMost, k.number - 1};
				break;
			default: mapped = {CountKind::AtLeast, k.number + 1}; break;
			}
			break;
		}
		default: break;
		}
		count = mapped;
	}

	std::vector<TypedVar> vars = parseBinders();
	expect(Tok::Colon, "':'");
	if (count && vars.size() != 1) {
		fail("a counting quantifier binds exactly one variable", loc);
	}
	size_t mark = _scope.size();
	for (const auto& v : vars) _scope.push_back(v.name);
	Formula body = parseFormula();
	_scope.resize(mark);

	if (count) return Formula::countq(count->first, count->second, vars[0], std::move(body), loc);
	FKind kind = forall ? FKind::Forall : FKind::Exists;
	for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
		body = Formula::quantify(kind, *it, std::move(body), loc);
	}
	return body;
}

// A '(' can open either a parenthesized formula or the left term of a
// comparison; look past the matching ')' to tell the two apart.
bool Parser::parenStartsTerm() const {
	size_t i = _pos;
	int depth = 0;
	for (; i < _toks.size(); ++i) {
		if (_toks[i].kind == Tok::LParen) {
			++depth;
		} else if (_toks[i].kind == Tok::RParen) {
			if (--depth == 0) {
				++i;
				break;
			}
		} else if (_toks[i].kind == Tok::End) {
			return false;
		}
	}
	if (i >= _toks.size()) return false;
	switch (_toks[i].kind) {
	case Tok::Eq:
	case Tok::Neq:
	case Tok::Lt:
	case Tok::Leq:
	case Tok::Gt:
	case Tok::Geq:
	case Tok::Plus:
	case Tok::Minus:
	case Tok::Star:
	case Tok::Slash:
	case Tok::Percent:
		return true;
	default:
		return false;
	}
}

Formula Parser::parsePrimary() {
	SourceLoc loc = peek().loc;
	switch (peek().kind) {
	case Tok::LParen: {
		if (parenStartsTerm()) return parseCmpFrom(parseTerm());
		advance();
		Formula f = parseFormula();
		expect(Tok::RParen, "')'");
		return f;
	}
	case Tok::Ident: {
		const std::string& w = peek().text;
		if (w == "true" || w == "false") {
			advance();
			return Formula::boolConst(w == "true", loc);
		}
		if (aggFunOf(w) && peek(1).kind == Tok::LBrace) {
			AggregateTerm a = parseAggTerm();
			auto op = cmpOpOf(peek().kind);
			if (!op) fail("expected a comparison after the aggregate");
			if (*op == CmpOp::Neq) fail("'~=' on aggregates is not supported; negate an equality instead");
			advance();
			Term bound = parseTerm();
			return Formula::aggcmp(a.fun, std::move(a.vars), std::move(a.condition),
					std::move(a.weight), *op, std::move(bound), loc);
		}
		if (!boundInScope(w) && _voc->predId(w)) return parseAtom();
		return parseCmpFrom(parseTerm());
	}
	case Tok::Int:
	case Tok::Minus:
		return parseCmpFrom(parseTerm());
	default:
		fail("expected a formula, got '" + describe(peek()) + "'");
	}
}

Formula Parser::parseAtom() {
	Token p = advance();
	PredId pid = *_voc->predId(p.text);
	std::vector<Term> args;
	if (at(Tok::LParen)) {
		advance();
		if (!at(Tok::RParen)) {
			args.push_back(parseTerm());
			while (at(Tok::Comma)) {
				advance();
				args.push_back(parseTerm());
			}
		}
		expect(Tok::RParen, "')'");
	}
	size_t arity = _voc->pred(pid).argSorts.size();
	if (args.size() != arity) {
		fail("predicate '" + p.text + "' takes " + std::to_string(arity) + " argument(s), got "
						+ std::to_string(args.size()),
				p.loc);
	}
	return Formula::atom(p.text, pid, std::move(args), p.loc);
}

Formula Parser::parseCmpFrom(Term lhs) {
	auto op = cmpOpOf(peek().kind);
	if (!op) fail("expected a comparison operator, got '" + describe(peek()) + "'");
	SourceLoc loc = peek().loc;
	advance();
	if (at(Tok::Ident) && aggFunOf(peek().text) && peek(1).kind == Tok::LBrace) {
		if (*op == CmpOp::Neq) fail("'~=' on aggregates is not supported; negate an equality instead", loc);
		AggregateTerm a = parseAggTerm();
		return Formula::aggcmp(a.fun, std::move(a.vars), std::move(a.condition),
				std::move(a.weight), flipCmp(*op), std::move(lhs), loc);
	}
	Term rhs = parseTerm();
	return Formula::cmpf(*op, std::move(lhs), std::move(rhs), loc);
}

AggregateTerm Parser::parseAggTerm() {
	Token w = advance();
	AggregateTerm out;
	out.fun = *aggFunOf(w.text);
	out.loc = w.loc;
	expect(Tok::LBrace, "'{'");
	out.vars = parseBinders();
	expect(Tok::Colon, "':'");
	size_t mark = _scope.size();
	for (const auto& v : out.vars) _scope.push_back(v.name);
	out.condition = parseFormula();
	out.weight = Term::constant(DomainElement::number(1), w.loc);
	if (at(Tok::Colon)) {
		Token colon = advance();
		if (out.fun == AggFun::Card) fail("card takes no weight term", colon.loc);
		out.weight = parseTerm();
	} else if (out.fun != AggFun::Card) {
		fail("aggregate '" + w.text + "' needs a weight term: " + w.text + "{ vars : condition : weight }");
	}
	_scope.resize(mark);
	expect(Tok::RBrace, "'}'");
	return out;
}

Term Parser::parseAddSub() {
	Term t = parseMulDiv();
	while (at(Tok::Plus) || at(Tok::Minus)) {
		ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
		SourceLoc loc = peek().loc;
		advance();
		Term rhs = parseMulDiv();
		t = Term::arith(op, {std::move(t), std::move(rhs)}, loc);
	}
	return t;
}

Term Parser::parseMulDiv() {
	Term t = parseTermAtom();
	while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
		ArithOp op = at(Tok::Star) ? ArithOp::Mul : (at(Tok::Slash) ? ArithOp::Div : ArithOp::Mod);
		SourceLoc loc = peek().loc;
		advance();
		Term rhs = parseTermAtom();
		t = Term::arith(op, {std::move(t), std::move(rhs)}, loc);
	}
	return t;
}

Term Parser::parseTermAtom() {
	SourceLoc loc = peek().loc;
	if (at(Tok::LParen)) {
		advance();
		Term t = parseTerm();
		expect(Tok::RParen, "')'");
		return t;
	}
	if (at(Tok::Minus)) {
		advance();
		return Term::arith(ArithOp::Neg, {parseTermAtom()}, loc);
	}
	if (at(Tok::Int)) {
		Token t = advance();
		return Term::constant(DomainElement::number(t.number), loc);
	}
	if (at(Tok::Ident)) {
		if (peek().text == "abs") {
			advance();
			expect(Tok::LParen, "'('");
			Term arg = parseTerm();
			expect(Tok::RParen, "')'");
			return Term::arith(ArithOp::Abs, {std::move(arg)}, loc);
		}
		return resolveIdentTerm(advance());
	}
	fail("expected a term, got '" + describe(peek()) + "'");
}

Term Parser::resolveIdentTerm(const Token& t) {
	if (boundInScope(t.text)) return Term::variable(t.text, t.loc);
	if (!_voc->sortsOfSymbol(t.text).empty()) {
		return Term::constant(DomainElement::symbol(t.text), t.loc);
	}
	if (_voc->predId(t.text)) fail("predicate '" + t.text + "' used as a term", t.loc);
	if (isReserved(t.text)) fail("unexpected '" + t.text + "'", t.loc);
	if (_implicit) {
		_implicit->push_back(t.text);
		_scope.push_back(t.text);
		return Term::variable(t.text, t.loc);
	}
	fail("unknown symbol '" + t.text + "'", t.loc);
}

void Parser::parseStructureBlock(ThreeValuedStructure& st, std::string& name, bool& total) {
	expectWord("structure");
	Token n = expect(Tok::Ident, "structure name");
	name = n.text;
	expect(Tok::Colon, "':'");
	Token vref = expect(Tok::Ident, "vocabulary name");
	if (vref.text != _voc->name()) fail("unknown vocabulary '" + vref.text + "'", vref.loc);
	expect(Tok::LBrace, "'{'");
	total = false;
	std::vector<PredId> totalPreds;
	while (!at(Tok::RBrace)) {
		parseStructureEntry(st, total, totalPreds);
	}
	expect(Tok::RBrace, "'}'");
	if (total) {
		for (int i = 0; i < _voc->atomCount(); ++i) {
			if (st.value(i) == Truth::Unknown) st.set(i, Truth::False);
		}
	} else {
		for (PredId pid : totalPreds) {
			int off = _voc->atomOffset(pid);
			for (int i = 0; i < _voc->tupleCount(pid); ++i) {
				if (st.value(off + i) == Truth::Unknown) st.set(off + i, Truth::False);
			}
		}
	}
}

void Parser::parseStructureEntry(ThreeValuedStructure& st, bool& total, std::vector<PredId>& totalPreds) {
	if (atWord("total")) {
		advance();
		// Bare 'total;' closes every predicate; 'total p, q;' only the named ones.
		if (at(Tok::Semi)) {
			advance();
			total = true;
			return;
		}
		while (true) {
			Token p = expect(Tok::Ident, "predicate name");
			auto pid = _voc->predId(p.text);
			if (!pid) fail("unknown predicate '" + p.text + "'", p.loc);
			totalPreds.push_back(*pid);
			if (!at(Tok::Comma)) break;
			advance();
		}
		expect(Tok::Semi, "';'");
		return;
	}
	Token p = expect(Tok::Ident, "predicate name");
	auto pid = _voc->predId(p.text);
	if (!pid) fail("unknown predicate '" + p.text + "'", p.loc);
	bool cf = false;
	if (at(Tok::Dot)) {
		advance();
		Token mark = expect(Tok::Ident, "'cf'");
		if (mark.text != "cf") fail("expected 'cf'", mark.loc);
		cf = true;
	}
	expect(Tok::Eq, "'='");
	Truth val = cf ? Truth::False : Truth::True;
	const Predicate& pred = _voc->pred(*pid);
	if (atWord("true") || atWord("false")) {
		Token b = advance();
		if (!pred.argSorts.empty()) {
			fail("only nullary predicates take '= true' or '= false'", b.loc);
		}
		if (cf) fail("'.cf' does not combine with true/false", b.loc);
		setAtom(st, _voc->atomOffset(*pid), b.text == "true" ? Truth::True : Truth::False, b.loc);
	} else {
		Token open = expect(Tok::LBrace, "'{'");
		if (pred.argSorts.empty()) {
			fail("nullary predicate '" + p.text + "' takes '= true' or '= false'", open.loc);
		}
		while (!at(Tok::RBrace)) {
			parseTupleEntry(st, *pid, val);
			if (at(Tok::Semi)) {
				advance();
			} else {
				break;
			}
		}
		expect(Tok::RBrace, "'}'");
	}
	expect(Tok::Semi, "';'");
}

void Parser::parseTupleEntry(ThreeValuedStructure& st, PredId pid, Truth val) {
	SourceLoc loc = peek().loc;
	const Predicate& pred = _voc->pred(pid);
	std::vector<DomainElement> tuple;
	if (pred.argSorts.size() == 1 && !at(Tok::LParen)) {
		tuple.push_back(parseElementToken());
	} else {
		expect(Tok::LParen, "'('");
		tuple.push_back(parseElementToken());
		for (size_t i = 1; i < pred.argSorts.size(); ++i) {
			expect(Tok::Comma, "','");
			tuple.push_back(parseElementToken());
		}
		expect(Tok::RParen, "')'");
	}
	DomainAtom atom{pid, std::move(tuple)};
	auto idx = _voc->atomIndex(atom);
	if (!idx) {
		fail("tuple " + _voc->atomText(atom) + " has an element outside the declared argument sorts", loc);
	}
	setAtom(st, *idx, val, loc);
}

void Parser::setAtom(ThreeValuedStructure& st, int atomIdx, Truth val, SourceLoc loc) const {
	Truth cur = st.value(atomIdx);
	if (cur != Truth::Unknown && cur != val) {
		fail("conflicting assignment for atom '" + _voc->atomText(atomIdx) + "'", loc);
	}
	st.set(atomIdx, val);
}

} // namespace

KbFile parseKb(const std::string& text) {
	Parser parser(text);
	return parser.parseKbFile();
}

ParsedStructure parseStructureFile(const std::string& text, VocabularyPtr voc) {
	Parser parser(text);
	return parser.parseStructureOnly(std::move(voc));
}

std::vector<DomainAtom> parseAtomsFile(const std::string& text, const Vocabulary& voc) {
	std::vector<DomainAtom> out;
	std::istringstream in(text);
	std::string line;
	int lineNo = 0;
	while (std::getline(in, line)) {
		++lineNo;
		auto cut = line.find("//");
		if (cut != std::string::npos) line.resize(cut);
		size_t b = line.find_first_not_of(" \t\r");
		if (b == std::string::npos) continue;
		size_t e = line.find_last_not_of(" \t\r");
		try {
			out.push_back(parseDomainAtom(line.substr(b, e - b + 1), voc));
		} catch (const KbError& err) {
			throw KbError(err.kind(), err.message(), SourceLoc{lineNo, (int)b + 1});
		}
	}
	return out;
}

AggregateTerm parseAggregateTermText(const std::string& text, VocabularyPtr voc) {
	Parser parser(text);
	return parser.parseAggTermOnly(std::move(voc));
}

} // namespace kbr::lang
