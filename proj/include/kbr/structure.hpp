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

#include <vector>

#include "kbr/vocabulary.hpp"

namespace kbr {

enum class Truth : uint8_t { False = 0, True = 1, Unknown = 2 };

/**
 * A three-valued structure over a vocabulary: every ground atom is certainly
 * true, certainly false, or unknown. Stored densely in the vocabulary's atom
 * order, so CT and CF are disjoint by construction.
 */
class ThreeValuedStructure {
public:
	ThreeValuedStructure() = default;
	explicit ThreeValuedStructure(VocabularyPtr voc)
			: _voc(std::move(voc)), _values(_voc->atomCount(), Truth::Unknown) {
	}

	const Vocabulary& voc() const { return *_voc; }
	const VocabularyPtr& vocPtr() const { return _voc; }

	Truth value(int atomIdx) const { return _values[atomIdx]; }
	void set(int atomIdx, Truth v) { _values[atomIdx] = v; }

	bool twoValued(int atomIdx) const { return _values[atomIdx] != Truth::Unknown; }
	bool isTotal() const {
		for (Truth v : _values) {
			if (v == Truth::Unknown) return false;
		}
		return true;
	}
	int knownCount() const {
		int n = 0;
		for (Truth v : _values) n += (v != Truth::Unknown);
		return n;
	}

	/** True iff other assigns the same value to every atom this one knows. */
	bool extendedBy(const ThreeValuedStructure& other) const {
		for (size_t i = 0; i < _values.size(); ++i) {
			if (_values[i] != Truth::Unknown && other._values[i] != _values[i]) return false;
		}
		return true;
	}

	bool operator==(const ThreeValuedStructure& other) const { return _values == other._values; }

private:
	VocabularyPtr _voc;
	std::vector<Truth> _values;
};

/** A total structure. The constructor rejects structures with unknowns. */
class Model {
public:
	Model() = default;
	explicit Model(ThreeValuedStructure s) : _s(std::move(s)) {
		if (!_s.isTotal()) throw inputError("model is not total: some atoms are unknown");
	}

	const ThreeValuedStructure& structure() const { return _s; }
	const Vocabulary& voc() const { return _s.voc(); }
	const VocabularyPtr& vocPtr() const { return _s.vocPtr(); }
	bool holds(int atomIdx) const { return _s.value(atomIdx) == Truth::True; }

	bool operator==(const Model& other) const { return _s == other._s; }

private:
	ThreeValuedStructure _s;
};

} // namespace kbr
