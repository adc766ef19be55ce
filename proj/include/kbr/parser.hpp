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

#include "kbr/ast.hpp"

namespace kbr::lang {

/**
 * Parses a knowledge-base file: a vocabulary block, optionally followed by a
 * theory block and a structure block (in that order). Missing blocks default
 * to an empty theory and an all-unknown structure.
 */
KbFile parseKb(const std::string& text);

/** Parses a file holding a single structure block against a known vocabulary. */
struct ParsedStructure {
	ThreeValuedStructure structure;
	std::string name;
	bool total = false;
};
ParsedStructure parseStructureFile(const std::string& text, VocabularyPtr voc);

/** Parses a file with one "pred(el,...)" atom per line ("//" comments allowed). */
std::vector<DomainAtom> parseAtomsFile(const std::string& text, const Vocabulary& voc);

/** Parses a standalone aggregate term such as "sum{ x : p(x) : x }". */
AggregateTerm parseAggregateTermText(const std::string& text, VocabularyPtr voc);

} // namespace kbr::lang
