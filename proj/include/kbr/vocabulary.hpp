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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kbr/error.hpp"

namespace kbr {

using SortId = int;
using PredId = int;

/** A domain element: either a symbolic constant or an integer. */
class DomainElement {
public:
	static DomainElement symbol(std::string name) { return DomainElement(std::move(name)); }
	static DomainElement number(long long value) { return DomainElement(value); }

	bool isNumber() const { return std::holds_alternative<long long>(_value); }
	long long number() const { return std::get<long long>(_value); }
	const std::string& symbol() const { return std::get<std::string>(_value); }

	std::string text() const {
		return isNumber() ? std::to_string(number()) : symbol();
	}

	bool operator==(const DomainElement& other) const = default;
	bool operator<(const DomainElement& other) const { return _value < other._value; }

private:
	explicit DomainElement(std::string s) : _value(std::move(s)) {}
	explicit DomainElement(long long n) : _value(n) {}

	std::variant<long long, std::string> _value;
};

struct Sort {
	std::string name;
	std::vector<DomainElement> elements; // declaration order; this order is the sort's order
	bool numeric = false;                // true iff every element is an integer
};

enum class PredKind { Data, Search };

struct Predicate {
	std::string name;
	std::vector<SortId> argSorts;
	PredKind kind = PredKind::Search;
};

/** A ground atom: predicate applied to a tuple of domain elements. */
struct DomainAtom {
	PredId pred = -1;
	std::vector<DomainElement> args;

	bool operator==(const DomainAtom&) const = default;
	bool operator<(const DomainAtom& o) const {
		if (pred != o.pred) return pred < o.pred;
		return args < o.args;
	}
};

/**
 * A finite typed vocabulary. Once finalized it also provides a dense
 * enumeration of all ground atoms in lexicographic (predicate, tuple) order,
 * where tuples follow the declared element order of each argument sort.
 */
class Vocabulary {
public:
	explicit Vocabulary(std::string name = "V") : _name(std::move(name)) {}

	const std::string& name() const { return _name; }

	SortId addSort(Sort sort, SourceLoc loc = {});
	PredId addPredicate(Predicate pred, SourceLoc loc = {});
	void finalize(); // builds element and atom indices; no declarations afterwards

	int sortCount() const { return (int)_sorts.size(); }
	int predCount() const { return (int)_preds.size(); }
	const Sort& sort(SortId s) const { return _sorts.at(s); }
	const Predicate& pred(PredId p) const { return _preds.at(p); }

	std::optional<SortId> sortId(const std::string& name) const;
	std::optional<PredId> predId(const std::string& name) const;

	/** Index of an element inside a sort's declared order, if it belongs to it. */
	std::optional<int> elementIndex(SortId s, const DomainElement& e) const;

	/** Sorts an element belongs to (used for sort inference of constants). */
	const std::vector<SortId>& sortsOfSymbol(const std::string& name) const;

	// Dense atom enumeration (valid after finalize()).
	int atomCount() const { return _atomTotal; }
	int atomOffset(PredId p) const { return _atomOffset.at(p); }
	int tupleCount(PredId p) const { return _tupleCount.at(p); }
	int atomIndex(PredId p, const std::vector<int>& elemIdx) const;
	std::optional<int> atomIndex(const DomainAtom& atom) const;
	DomainAtom atomAt(int index) const;
	PredId predOfAtom(int index) const;
	std::string atomText(int index) const;
	std::string atomText(const DomainAtom& atom) const;

	bool finalized() const { return _finalized; }

private:
	std::string _name;
	std::vector<Sort> _sorts;
	std::vector<Predicate> _preds;
	std::map<std::string, SortId> _sortByName;
	std::map<std::string, PredId> _predByName;
	std::map<std::string, std::vector<SortId>> _symbolSorts;
	std::vector<std::map<long long, int>> _numIndex;    // per sort: value -> element index
	std::vector<std::map<std::string, int>> _symIndex;  // per sort: symbol -> element index
	std::vector<int> _atomOffset;
	std::vector<int> _tupleCount;
	int _atomTotal = 0;
	bool _finalized = false;
	static const std::vector<SortId> _noSorts;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

/** Parses "pred" or "pred(el1,...,eln)" against a vocabulary. */
DomainAtom parseDomainAtom(const std::string& text, const Vocabulary& voc);

} // namespace kbr
