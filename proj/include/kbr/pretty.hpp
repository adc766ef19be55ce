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

// Printers emit fully parenthesized text that re-parses to a structurally
// equal AST (source locations aside).

std::string printTerm(const Term& t);
std::string printFormula(const Formula& f);
std::string printRule(const Rule& r);
std::string printVocabulary(const Vocabulary& voc);
std::string printTheoryBlock(const Theory& th, const std::string& vocName);
std::string printStructureBlock(const std::string& name, const ThreeValuedStructure& st, bool total);
std::string printKb(const KbFile& kb);

} // namespace kbr::lang
