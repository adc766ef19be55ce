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

#include <stdexcept>
#include <string>

namespace kbr {

struct SourceLoc {
	int line = 0;
	int col = 0;
	bool known() const { return line > 0; }
};

/**
 * All user-facing failures raised by the engine. The kind distinguishes the
 * phase that rejected the input; solver outcomes (UNSAT, NO_MODEL) are
 * ordinary return values, never exceptions.
 */
class KbError : public std::runtime_error {
public:
	enum class Kind { Parse, Type, Ground, Eval, Input };

	KbError(Kind kind, std::string message, SourceLoc loc = {})
			: std::runtime_error(format(kind, message, loc)), _kind(kind), _loc(loc),
			  _message(std::move(message)) {
	}

	Kind kind() const { return _kind; }
	SourceLoc loc() const { return _loc; }
	const std::string& message() const { return _message; } // without the location prefix

private:
	static std::string format(Kind kind, const std::string& message, SourceLoc loc) {
		std::string head;
		switch (kind) {
		case Kind::Parse: head = "parse error"; break;
		case Kind::Type: head = "type error"; break;
		case Kind::Ground: head = "grounding error"; break;
		case Kind::Eval: head = "evaluation error"; break;
		case Kind::Input: head = "input error"; break;
		}
		if (loc.known()) {
			head += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.col);
		}
		return head + ": " + message;
	}

	Kind _kind;
	SourceLoc _loc;
	std::string _message;
};

inline KbError parseError(const std::string& m, SourceLoc l = {}) { return KbError(KbError::Kind::Parse, m, l); }
inline KbError typeError(const std::string& m, SourceLoc l = {}) { return KbError(KbError::Kind::Type, m, l); }
inline KbError groundError(const std::string& m, SourceLoc l = {}) { return KbError(KbError::Kind::Ground, m, l); }
inline KbError evalError(const std::string& m, SourceLoc l = {}) { return KbError(KbError::Kind::Eval, m, l); }
inline KbError inputError(const std::string& m, SourceLoc l = {}) { return KbError(KbError::Kind::Input, m, l); }

} // namespace kbr
