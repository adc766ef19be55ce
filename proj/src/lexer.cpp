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

#include "kbr/lexer.hpp"

#include <cctype>

namespace kbr::lang {

std::string tokenName(Tok kind) {
	switch (kind) {
	case Tok::Ident: return "identifier";
	case Tok::Int: return "integer";
	case Tok::LBrace: return "'{'";
	case Tok::RBrace: return "'}'";
	case Tok::LParen: return "'('";
	case Tok::RParen: return "')'";
	case Tok::LBracket: return "'['";
	case Tok::RBracket: return "']'";
	case Tok::Comma: return "','";
	case Tok::Semi: return "';'";
	case Tok::Colon: return "':'";
	case Tok::Dot: return "'.'";
	case Tok::DotDot: return "'..'";
	case Tok::Eq: return "'='";
	case Tok::Neq: return "'~='";
	case Tok::Lt: return "'<'";
	case Tok::Leq: return "'=<'";
	case Tok::Gt: return "'>'";
	case Tok::Geq: return "'>='";
	case Tok::Not: return "'~'";
	case Tok::And: return "'&'";
	case Tok::Or: return "'|'";
	case Tok::Implies: return "'=>'";
	case Tok::RevImplies: return "'<='";
	case Tok::Equiv: return "'<=>'";
	case Tok::Bang: return "'!'";
	case Tok::Quest: return "'?'";
	case Tok::Arrow: return "'<-'";
	case Tok::Plus: return "'+'";
	case Tok::Minus: return "'-'";
	case Tok::Star: return "'*'";
	case Tok::Slash: return "'/'";
	case Tok::Percent: return "'%'";
	case Tok::End: return "end of input";
	}
	return "?";
}

std::vector<Token> lex(const std::string& input) {
	std::vector<Token> out;
	int line = 1;
	int col = 1;
	size_t i = 0;
	auto push = [&](Tok kind, std::string text, int width) {
		Token t;
		t.kind = kind;
		t.text = std::move(text);
		t.loc = {line, col};
		out.push_back(std::move(t));
		col += width;
		i += width;
	};
	while (i < input.size()) {
		char c = input[i];
		if (c == '\n') {
			++line;
			col = 1;
			++i;
			continue;
		}
		if (std::isspace((unsigned char)c)) {
			++col;
			++i;
			continue;
		}
		if (c == '/' && i + 1 < input.size() && input[i + 1] == '/') {
			while (i < input.size() && input[i] != '\n') ++i;
			continue;
		}
		if (std::isalpha((unsigned char)c) || c == '_') {
			size_t j = i;
			while (j < input.size() && (std::isalnum((unsigned char)input[j]) || input[j] == '_')) ++j;
			push(Tok::Ident, input.substr(i, j - i), (int)(j - i));
			continue;
		}
		if (std::isdigit((unsigned char)c)) {
			size_t j = i;
			while (j < input.size() && std::isdigit((unsigned char)input[j])) ++j;
			Token t;
			t.kind = Tok::Int;
			t.text = input.substr(i, j - i);
			try {
				t.number = std::stoll(t.text);
			} catch (const std::out_of_range&) {
				throw parseError("integer literal out of range", {line, col});
			}
			t.loc = {line, col};
			out.push_back(std::move(t));
			col += (int)(j - i);
			i = j;
			continue;
		}
		auto startsWith = [&](const char* s) {
			size_t n = std::char_traits<char>::length(s);
			return input.compare(i, n, s) == 0;
		};
		if (startsWith("<=>")) { push(Tok::Equiv, "<=>", 3); continue; }
		if (startsWith("<=")) { push(Tok::RevImplies, "<=", 2); continue; }
		if (startsWith("<-")) { push(Tok::Arrow, "<-", 2); continue; }
		if (startsWith("=>")) { push(Tok::Implies, "=>", 2); continue; }
		if (startsWith("=<")) { push(Tok::Leq, "=<", 2); continue; }
		if (startsWith(">=")) { push(Tok::Geq, ">=", 2); continue; }
		if (startsWith("~=")) { push(Tok::Neq, "~=", 2); continue; }
		if (startsWith("..")) { push(Tok::DotDot, "..", 2); continue; }
		switch (c) {
		case '{': push(Tok::LBrace, "{", 1); continue;
		case '}': push(Tok::RBrace, "}", 1); continue;
		case '(': push(Tok::LParen, "(", 1); continue;
		case ')': push(Tok::RParen, ")", 1); continue;
		case '[': push(Tok::LBracket, "[", 1); continue;
		case ']': push(Tok::RBracket, "]", 1); continue;
		case ',': push(Tok::Comma, ",", 1); continue;
		case ';': push(Tok::Semi, ";", 1); continue;
		case ':': push(Tok::Colon, ":", 1); continue;
		case '.': push(Tok::Dot, ".", 1); continue;
		case '=': push(Tok::Eq, "=", 1); continue;
		case '<': push(Tok::Lt, "<", 1); continue;
		case '>': push(Tok::Gt, ">", 1); continue;
		case '~': push(Tok::Not, "~", 1); continue;
		case '&': push(Tok::And, "&", 1); continue;
		case '|': push(Tok::Or, "|", 1); continue;
		case '!': push(Tok::Bang, "!", 1); continue;
		case '?': push(Tok::Quest, "?", 1); continue;
		case '+': push(Tok::Plus, "+", 1); continue;
		case '-': push(Tok::Minus, "-", 1); continue;
		case '*': push(Tok::Star, "*", 1); continue;
		case '/': push(Tok::Slash, "/", 1); continue;
		case '%': push(Tok::Percent, "%", 1); continue;
		default:
			throw parseError(std::string("unexpected character '") + c + "'", {line, col});
		}
	}
	Token end;
	end.kind = Tok::End;
	end.loc = {line, col};
	out.push_back(end);
	return out;
}

} // namespace kbr::lang
