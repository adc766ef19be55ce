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
 * Rewrites a type-checked formula to the core fragment:
 *  - counting quantifiers become card aggregate comparisons,
 *  - => and <=> are eliminated,
 *  - negation is pushed down to atoms (negation normal form),
 *  - aggregate comparisons use only =, =< and >= (< and > shift the bound;
 *    a negated = splits into =< bound-1 | >= bound+1).
 *
 * The result contains only BoolConst, Atom, ~Atom, Cmp, And, Or, Forall,
 * Exists and AggCmp nodes. Idempotent and model-preserving.
 */
Formula desugarFormula(const Formula& f);

/** Applies desugarFormula to all sentences and rule bodies. */
Theory desugarTheory(const Theory& theory);

} // namespace kbr::lang
