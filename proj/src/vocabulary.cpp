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

#include "kbr/vocabulary.hpp"

#include <algorithm>

namespace kbr {

const std::vector<SortId> Vocabulary::_noSorts = {};

SortId Vocabulary::addSort(Sort sort, SourceLoc loc) {
	if (_finalized) throw typeError("vocabulary is finalized", loc);
	if (sort.name.empty()) throw typeError("sort with empty name", loc);
	if (_sortByName.count(sort.name)) throw typeError("duplicate sort name '" + sort.name + "'", loc);
	if (_predByName.count(sort.name)) throw typeError("name '" + sort.name + "' already declared as predicate", loc);
	if (sort.elements.empty()) throw typeError("sort '" + sort.name + "' has an empty domain", loc);
	sort.numeric = std::all_of(sort.elements.begin(), sort.elements.end(),
			[](const DomainElement& e) { return e.isNumber(); });
	for (size_t i = 0; i < sort.elements.size(); ++i) {
		for (size_t j = i + 1; j < sort.elements.size(); ++j) {
			if (sort.elements[i] == sort.elements[j]) {
				throw typeError("duplicate element '" + sort.elements[i].text() + "' in sort '" + sort.name + "'", loc);
			}
		}
	}
	SortId id = (SortId)_sorts.size();
	_sortByName[sort.name] = id;
	for (const auto& e : sort.elements) {
		if (!e.isNumber()) _symbolSorts[e.symbol()].push_back(id);
	}
	_sorts.push_back(std::move(sort));
	return id;
}

PredId Vocabulary::addPredicate(Predicate pred, SourceLoc loc) {
	if (_finalized) throw typeError("vocabulary is finalized", loc);
	if (pred.name.empty()) throw typeError("predicate with empty name", loc);
	if (_predByName.count(pred.name)) throw typeError("duplicate predicate name '" + pred.name + "'", loc);
	if (_sortByName.count(pred.name)) throw typeError("name '" + pred.name + "' already declared as sort", loc);
	for (SortId s : pred.argSorts) {
		if (s < 0 || s >= (SortId)_sorts.size()) {
			throw typeError("predicate '" + pred.name + "' uses an undeclared sort", loc);
		}
	}
	PredId id = (PredId)_preds.size();
	_predByName[pred.name] = id;
	_preds.push_back(std::move(pred));
	return id;
}

void Vocabulary::finalize() {
	if (_finalized) return;
	_numIndex.resize(_sorts.size());
	_symIndex.resize(_sorts.size());
	for (size_t s = 0; s < _sorts.size(); ++s) {
		for (size_t i = 0; i < _sorts[s].elements.size(); ++i) {
			const auto& e = _sorts[s].elements[i];
			if (e.isNumber()) {
				_numIndex[s][e.number()] = (int)i;
			} else {
				_symIndex[s][e.symbol()] = (int)i;
			}
		}
	}
	_atomOffset.resize(_preds.size());
	_tupleCount.resize(_preds.size());
	long long total = 0;
	for (size_t p = 0; p < _preds.size(); ++p) {
		long long tuples = 1;
		for (SortId s : _preds[p].argSorts) {
			tuples *= (long long)_sorts[s].elements.size();
		}
		_atomOffset[p] = (int)total;
		_tupleCount[p] = (int)tuples;
		total += tuples;
		if (total > 50'000'000) throw typeError("vocabulary enumerates too many ground atoms");
	}
	_atomTotal = (int)total;
	_finalized = true;
}

std::optional<SortId> Vocabulary::sortId(const std::string& name) const {
	auto it = _sortByName.find(name);
	if (it == _sortByName.end()) return std::nullopt;
	return it->second;
}

std::optional<PredId> Vocabulary::predId(const std::string& name) const {
	auto it = _predByName.find(name);
	if (it == _predByName.end()) return std::nullopt;
	return it->second;
}

std::optional<int> Vocabulary::elementIndex(SortId s, const DomainElement& e) const {
	if (_finalized) {
		if (e.isNumber()) {
			auto it = _numIndex[s].find(e.number());
			if (it == _numIndex[s].end()) return std::nullopt;
			return it->second;
		}
		auto it = _symIndex[s].find(e.symbol());
		if (it == _symIndex[s].end()) return std::nullopt;
		return it->second;
	}
	const auto& elems = _sorts.at(s).elements;
	for (size_t i = 0; i < elems.size(); ++i) {
		if (elems[i] == e) return (int)i;
	}
	return std::nullopt;
}

const std::vector<SortId>& Vocabulary::sortsOfSymbol(const std::string& name) const {
	auto it = _symbolSorts.find(name);
	return it == _symbolSorts.end() ? _noSorts : it->second;
}

int Vocabulary::atomIndex(PredId p, const std::vector<int>& elemIdx) const {
	long long idx = 0;
	const auto& arity = _preds[p].argSorts;
	for (size_t i = 0; i < arity.size(); ++i) {
		idx = idx * (long long)_sorts[arity[i]].elements.size() + elemIdx[i];
	}
	return _atomOffset[p] + (int)idx;
}

std::optional<int> Vocabulary::atomIndex(const DomainAtom& atom) const {
	if (atom.pred < 0 || atom.pred >= (PredId)_preds.size()) return std::nullopt;
	const auto& arity = _preds[atom.pred].argSorts;
	if (atom.args.size() != arity.size()) return std::nullopt;
	std::vector<int> idx(arity.size());
	for (size_t i = 0; i < arity.size(); ++i) {
		auto e = elementIndex(arity[i], atom.args[i]);
		if (!e) return std::nullopt;
		idx[i] = *e;
	}
	return atomIndex(atom.pred, idx);
}

DomainAtom Vocabulary::atomAt(int index) const {
	PredId p = predOfAtom(index);
	int rest = index - _atomOffset[p];
	const auto& arity = _preds[p].argSorts;
	std::vector<int> idx(arity.size());
	for (int i = (int)arity.size() - 1; i >= 0; --i) {
		int size = (int)_sorts[arity[i]].elements.size();
		idx[i] = rest % size;
		rest /= size;
	}
	DomainAtom atom;
	atom.pred = p;
	atom.args.reserve(arity.size());
	for (size_t i = 0; i < arity.size(); ++i) {
		atom.args.push_back(_sorts[arity[i]].elements[idx[i]]);
	}
	return atom;
}

PredId Vocabulary::predOfAtom(int index) const {
	for (PredId p = (PredId)_preds.size() - 1; p >= 0; --p) {
		if (index >= _atomOffset[p]) return p;
	}
	throw std::out_of_range("atom index");
}

std::string Vocabulary::atomText(int index) const {
	return atomText(atomAt(index));
}

std::string Vocabulary::atomText(const DomainAtom& atom) const {
	std::string out = _preds.at(atom.pred).name;
	if (!atom.args.empty()) {
		out += "(";
		for (size_t i = 0; i < atom.args.size(); ++i) {
			if (i > 0) out += ",";
			out += atom.args[i].text();
		}
		out += ")";
	}
	return out;
}

DomainAtom parseDomainAtom(const std::string& text, const Vocabulary& voc) {
	size_t open = text.find('(');
	std::string name = text.substr(0, open);
	// trim surrounding whitespace
	auto trim = [](std::string s) {
		size_t a = s.find_first_not_of(" \t\r\n");
		size_t b = s.find_last_not_of(" \t\r\n");
		if (a == std::string::npos) return std::string();
		return s.substr(a, b - a + 1);
	};
	name = trim(name);
	auto pid = voc.predId(name);
	if (!pid) throw inputError("unknown predicate '" + name + "' in atom '" + text + "'");
	const Predicate& pred = voc.pred(*pid);
	DomainAtom atom;
	atom.pred = *pid;
	if (open == std::string::npos) {
		if (!pred.argSorts.empty()) throw inputError("atom '" + text + "' misses arguments");
		return atom;
	}
	size_t close = text.rfind(')');
	if (close == std::string::npos || close < open) throw inputError("malformed atom '" + text + "'");
	std::string inner = text.substr(open + 1, close - open - 1);
	std::vector<std::string> parts;
	if (!trim(inner).empty()) {
		size_t start = 0;
		while (true) {
			size_t comma = inner.find(',', start);
			if (comma == std::string::npos) {
				parts.push_back(trim(inner.substr(start)));
				break;
			}
			parts.push_back(trim(inner.substr(start, comma - start)));
			start = comma + 1;
		}
	}
	if (parts.size() != pred.argSorts.size()) {
		throw inputError("atom '" + text + "' has " + std::to_string(parts.size()) + " arguments, expected "
				+ std::to_string(pred.argSorts.size()));
	}
	for (size_t i = 0; i < parts.size(); ++i) {
		if (parts[i].empty()) throw inputError("empty argument in atom '" + text + "'");
		DomainElement elem = DomainElement::symbol(parts[i]);
		bool isNum = parts[i].find_first_not_of("-0123456789") == std::string::npos && parts[i] != "-";
		if (isNum) elem = DomainElement::number(std::stoll(parts[i]));
		if (!voc.elementIndex(pred.argSorts[i], elem)) {
			throw inputError("element '" + parts[i] + "' is not in sort '" + voc.sort(pred.argSorts[i]).name
					+ "' (atom '" + text + "')");
		}
		atom.args.push_back(elem);
	}
	return atom;
}

} // namespace kbr
