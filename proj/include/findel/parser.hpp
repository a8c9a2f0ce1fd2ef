#pragma once

#include <findel/ast.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace findel {

// Position and expectation info for a rejected input. Lines and columns are
// 1-based.
struct parse_error
{
	std::size_t line = 0;
	std::size_t column = 0;
	std::string message;
	std::vector<std::string> expected;

	std::string to_string () const;
};

struct parse_result
{
	primitive_ptr tree;
	std::optional<parse_error> error;

	bool ok () const
	{
		return tree != nullptr;
	}
};

// Parses the textual contract grammar:
//   expr := Zero | One(CUR) | Scale(NAT, expr) | ScaleObs(ADDR, expr)
//         | Give(expr) | And(expr, expr) | Or(expr, expr)
//         | If(ADDR, expr, expr) | Timebound(NAT, NAT, expr)
//         | At(NAT, expr) | Before(NAT, expr) | After(NAT, expr)
// Whitespace between tokens is insignificant. At/Before/After are expanded
// to Timebound during parsing; d supplies the At window half-width.
parse_result parse (std::string_view text, delta d = delta{ 30 });

// Canonical rendering: one space after each comma, no re-sugaring.
std::string pretty_print (const primitive & tree);
std::string pretty_print (const primitive_ptr & tree);

std::ostream & operator<< (std::ostream & os, const primitive & tree);
}
