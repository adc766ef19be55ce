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
 * Annotates every variable and term with its sort and validates the theory:
 * sort agreement in atom arguments, numeric-only arithmetic and order
 * comparisons, aggregate weight variables bound by their set expression,
 * definitions with search-predicate heads, each predicate defined at most
 * once, and no aggregate over a predicate of the same definition.
 *
 * Unannotated variables get their sort inferred from atom occurrences and
 * equalities; inference failures ask for an explicit annotation.
 *
 * Throws KbError(Type) on the first violation.
 */
void typecheck(const Vocabulary& voc, Theory& theory);

/** Same checks for a standalone aggregate term (optimization objectives). */
void typecheckAggTerm(const Vocabulary& voc, AggregateTerm& agg);

} // namespace kbr::lang
