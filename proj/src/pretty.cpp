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

#include "kbr/pretty.hpp"

#include <sstream>

namespace kbr::lang {

namespace {

const char* cmpText(CmpOp op) {
	switch (op) {
	case CmpOp::Eq: return "=";
	case CmpOp::Neq: return "~=";
	case CmpOp::Lt: return "<";
	case CmpOp::Leq: return "=<";
	case CmpOp::Gt: return ">";
	case CmpOp::Geq: return ">=";
	}
	return "=";
}

const char* aggText(AggFun fun) {
	switch (fun) {
	case AggFun::Card: return "card";
	case AggFun::Sum: return "sum";
	case AggFun::Min: return "min";
	case AggFun::Max: return "max";
	case AggFun::Prod: return "prod";
	}
	return "card";
}

std::string binderText(const TypedVar& v) {
	if (v.sortName.empty()) return v.name;
	return v.name + " [" + v.sortName + "]";
}

std::string binderListText(const std::vector<TypedVar>& vars) {
	std::string out;
	for (size_t i = 0; i < vars.size(); ++i) {
		if (i) out += " ";
		out += binderText(vars[i]);
	}
	return out;
}

std::string setText(const std::vector<TypedVar>& vars, const Formula& cond, const Term* weight) {
	std::string out = "{ " + binderListText(vars) + " : " + printFormula(cond);
	if (weight) out += " : " + printTerm(*weight);
	return out + " }";
}

} // namespace

std::string printTerm(const Term& t) {
	switch (t.kind) {
	case TermKind::Variable:
		return t.var;
	case TermKind::Constant:
		return t.value.text();
	case TermKind::Arith:
		switch (t.op) {
		case ArithOp::Add: return "(" + printTerm(t.args[0]) + " + " + printTerm(t.args[1]) + ")";
		case ArithOp::Sub: return "(" + printTerm(t.args[0]) + " - " + printTerm(t.args[1]) + ")";
		case ArithOp::Mul: return "(" + printTerm(t.args[0]) + " * " + printTerm(t.args[1]) + ")";
		case ArithOp::Div: return "(" + printTerm(t.args[0]) + " / " + printTerm(t.args[1]) + ")";
		case ArithOp::Mod: return "(" + printTerm(t.args[0]) + " % " + printTerm(t.args[1]) + ")";
		case ArithOp::Neg: return "-" + printTerm(t.args[0]);
		case ArithOp::Abs: return "abs(" + printTerm(t.args[0]) + ")";
		}
	}
	return "?";
}

std::string printFormula(const Formula& f) {
	switch (f.kind) {
	case FKind::BoolConst:
		return f.boolval ? "true" : "false";
	case FKind::Atom: {
		if (f.args.empty()) return f.pred;
		std::string out = f.pred + "(";
		for (size_t i = 0; i < f.args.size(); ++i) {
			if (i) out += ", ";
			out += printTerm(f.args[i]);
		}
		return out + ")";
	}
	case FKind::Cmp:
		return "(" + printTerm(f.args[0]) + " " + cmpText(f.cmp) + " " + printTerm(f.args[1]) + ")";
	case FKind::Not:
		return "~(" + printFormula(f.children[0]) + ")";
	case FKind::And:
		return "(" + printFormula(f.children[0]) + " & " + printFormula(f.children[1]) + ")";
	case FKind::Or:
		return "(" + printFormula(f.children[0]) + " | " + printFormula(f.children[1]) + ")";
	case FKind::Implies:
		return "(" + printFormula(f.children[0]) + " => " + printFormula(f.children[1]) + ")";
	case FKind::Equiv:
		return "(" + printFormula(f.children[0]) + " <=> " + printFormula(f.children[1]) + ")";
	case FKind::Forall:
		return "(! " + binderText(f.boundVar) + " : " + printFormula(f.children[0]) + ")";
	case FKind::Exists:
		return "(? " + binderText(f.boundVar) + " : " + printFormula(f.children[0]) + ")";
	case FKind::CountQ: {
		std::string op;
		switch (f.countKind) {
		case CountKind::Exactly: op = "?="; break;
		case CountKind::AtLeast: op = "?>="; break;
		case CountKind::AtMost: op = "?=<"; break;
		}
		return "(" + op + std::to_string(f.count) + " " + binderText(f.boundVar) + " : "
				+ printFormula(f.children[0]) + ")";
	}
	case FKind::AggCmp: {
		bool card = f.agg == AggFun::Card;
		return "(" + std::string(aggText(f.agg))
				+ setText(f.setVars, f.children[0], card ? nullptr : &f.weight) + " "
				+ cmpText(f.cmp) + " " + printTerm(f.bound) + ")";
	}
	}
	return "false";
}

std::string printRule(const Rule& r) {
	std::string out;
	if (!r.vars.empty()) out += "! " + binderListText(r.vars) + " : ";
	out += printFormula(r.head);
	bool fact = r.body.kind == FKind::BoolConst && r.body.boolval;
	if (!fact) out += " <- " + printFormula(r.body);
	return out + ".";
}

std::string printVocabulary(const Vocabulary& voc) {
	std::ostringstream out;
	out << "vocabulary " << voc.name() << " {\n";
	for (SortId s = 0; s < voc.sortCount(); ++s) {
		const Sort& sort = voc.sort(s);
		out << "\ttype " << sort.name << " = {";
		for (size_t i = 0; i < sort.elements.size();) {
			if (i) out << ", ";
			const DomainElement& e = sort.elements[i];
			if (e.isNumber()) {
				// compact maximal consecutive runs as lo..hi
				size_t j = i;
				while (j + 1 < sort.elements.size() && sort.elements[j + 1].isNumber()
						&& sort.elements[j + 1].number() == sort.elements[j].number() + 1) {
					++j;
				}
				if (j > i) {
					out << e.number() << ".." << sort.elements[j].number();
					i = j + 1;
					continue;
				}
			}
			out << e.text();
			++i;
		}
		out << "};\n";
	}
	for (PredId p = 0; p < voc.predCount(); ++p) {
		const Predicate& pred = voc.pred(p);
		out << "\t";
		if (pred.kind == PredKind::Data) out << "[data] ";
		out << "pred " << pred.name;
		if (!pred.argSorts.empty()) {
			out << "(";
			for (size_t i = 0; i < pred.argSorts.size(); ++i) {
				if (i) out << ", ";
				out << voc.sort(pred.argSorts[i]).name;
			}
			out << ")";
		}
		out << ";\n";
	}
	out << "}\n";
	return out.str();
}

std::string printTheoryBlock(const Theory& th, const std::string& vocName) {
	std::ostringstream out;
	out << "theory " << (th.name.empty() ? "T" : th.name) << " : " << vocName << " {\n";
	for (const Formula& s : th.sentences) {
		out << "\t" << printFormula(s) << ".\n";
	}
	for (const Definition& def : th.definitions) {
		out << "\t{\n";
		for (const Rule& r : def.rules) {
			out << "\t\t" << printRule(r) << "\n";
		}
		out << "\t}\n";
	}
	out << "}\n";
	return out.str();
}

std::string printStructureBlock(const std::string& name, const ThreeValuedStructure& st, bool total) {
	const Vocabulary& voc = st.voc();
	std::ostringstream out;
	out << "structure " << (name.empty() ? "S" : name) << " : " << voc.name() << " {\n";
	for (PredId p = 0; p < voc.predCount(); ++p) {
		const Predicate& pred = voc.pred(p);
		int offset = voc.atomOffset(p);
		int tuples = voc.tupleCount(p);
		if (pred.argSorts.empty()) {
			Truth v = st.value(offset);
			if (v == Truth::True) out << "\t" << pred.name << " = true;\n";
			if (v == Truth::False && !total) out << "\t" << pred.name << " = false;\n";
			continue;
		}
		for (Truth wanted : {Truth::True, Truth::False}) {
			if (wanted == Truth::False && total) continue;
			bool any = false;
			for (int t = 0; t < tuples; ++t) {
				if (st.value(offset + t) == wanted) {
					any = true;
					break;
				}
			}
			if (!any) continue;
			out << "\t" << pred.name << (wanted == Truth::True ? " = { " : ".cf = { ");
			bool first = true;
			for (int t = 0; t < tuples; ++t) {
				if (st.value(offset + t) != wanted) continue;
				if (!first) out << "; ";
				first = false;
				DomainAtom atom = voc.atomAt(offset + t);
				if (atom.args.size() == 1) {
					out << atom.args[0].text();
				} else {
					out << "(";
					for (size_t i = 0; i < atom.args.size(); ++i) {
						if (i) out << ", ";
						out << atom.args[i].text();
					}
					out << ")";
				}
			}
			out << " };\n";
		}
	}
	if (total) out << "\ttotal;\n";
	out << "}\n";
	return out.str();
}

std::string printKb(const KbFile& kb) {
	std::string out = printVocabulary(*kb.voc);
	const Theory& th = kb.theory;
	if (!th.name.empty() || !th.sentences.empty() || !th.definitions.empty()) {
		out += printTheoryBlock(th, kb.voc->name());
	}
	bool emptyStructure = kb.structure.knownCount() == 0 && !kb.structureTotal;
	if (!emptyStructure || !kb.structureName.empty()) {
		out += printStructureBlock(kb.structureName, kb.structure, kb.structureTotal);
	}
	return out;
}

} // namespace kbr::lang
