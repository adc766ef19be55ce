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

#include <string>
#include <vector>

#include "kbr/error.hpp"

namespace kbr::lang {

enum class Tok {
	Ident, Int,
	LBrace, RBrace, LParen, RParen, LBracket, RBracket,
	Comma, Semi, Colon, Dot, DotDot,
	Eq, Neq, Lt, Leq, Gt, Geq,
	Not, And, Or, Implies, RevImplies, Equiv,
	Bang, Quest, Arrow, // Arrow is "<-"
	Plus, Minus, Star, Slash, Percent,
	End
};

struct Token {
	Tok kind = Tok::End;
	std::string text;
	long long number = 0;
	SourceLoc loc;
};

/** Tokenizes a whole input; "//" starts a comment running to end of line. */
std::vector<Token> lex(const std::string& input);

std::string tokenName(Tok kind);

} // namespace kbr::lang
