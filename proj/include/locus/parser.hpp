#ifndef LOCUS_PARSER_HPP
#define LOCUS_PARSER_HPP

#include <locus/formula.hpp>

#include <map>
#include <string>

namespace locus
{
    // Parses the concrete syntax:
    //
    //   formula     := disjunction
    //   disjunction := conjunction ('|' conjunction)*
    //   conjunction := unary ('&' unary)*
    //   unary       := '!' unary | quantified | '(' formula ')'
    //                | NAME '(' term {',' term} ')' | term '=' term
    //                | 'true' | 'false'
    //   quantified  := ('exists' | 'forall') NAME [':' NAME]
    //                  ['in' NAME '(' term ')'] '.' formula
    //
    // '!' binds tightest, then '&', then '|'; a quantifier body extends as
    // far right as possible. Variable sorts come from ':' annotations, from
    // relation profiles, from locality bounds or, in one-sorted languages,
    // by default. `free_sorts` may pre-declare sorts of free variables.
    auto parse(const SignatureSpec & sig, const std::string & text,
               const std::map<std::string, int> & free_sorts = {}) -> FormulaPtr;
}

#endif
