#ifndef FFDYN_PARSER_HPP
#define FFDYN_PARSER_HPP

#include "ffdyn/places.hpp"

#include <string>

namespace ffdyn {

// Expression grammar for K = k(t): integers, `t`, `+ - * / ^`, parentheses.
// Exponents are integer literals.  Throws std::invalid_argument on errors.
RatFunc parse_rat_func(const std::string& text, const ConstantField& field);

// "inf" or a monic irreducible polynomial expression.
Place parse_place(const std::string& text, const ConstantField& field);

} // namespace ffdyn

#endif
