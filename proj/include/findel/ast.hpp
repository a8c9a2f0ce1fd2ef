#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace findel {

using timestamp = std::uint64_t;

// Largest representable point in time; used as the open upper bound of
// unbounded windows.
inline constexpr timestamp t_max = std::numeric_limits<timestamp>::max();

inline timestamp sat_add(timestamp a, timestamp b)
{
	return a > t_max - b ? t_max : a + b;
}

inline timestamp sat_sub(timestamp a, timestamp b)
{
	return a < b ? 0 : a - b;
}

// Scale factors and transfer amounts are arbitrary-precision naturals;
// balances are arbitrary-precision signed integers.
using nat = mpz_class;

// Currency token: 1-8 uppercase letters.
struct currency
{
	std::string symbol;

	currency () = default;
	explicit currency (std::string symbol_a);

	auto operator<=> (const currency &) const = default;
};

bool valid_currency (const std::string & symbol);

// Opaque party or gateway endpoint identifier. Equality is exact token
// equality.
struct address
{
	std::string value;

	address () = default;
	explicit address (std::string value_a);

	auto operator<=> (const address &) const = default;
};

// Half-width of the acceptance window used by the At combinator.
struct delta
{
	std::uint64_t value = 0;
};

enum class prim_kind : std::uint8_t
{
	zero,
	one,
	scale,
	scale_obs,
	give,
	and_,
	or_,
	if_,
	timebound,
};

std::string_view to_string (prim_kind kind);

class primitive;
using primitive_ptr = std::shared_ptr<const primitive>;

// One node of a contract description tree. Trees are immutable and share
// subtrees freely. Field usage by kind:
//   one        -> cur
//   scale      -> factor, left (sub)
//   scale_obs  -> source, left (sub)
//   give       -> left (sub)
//   and_/or_   -> left, right
//   if_        -> source, left (then), right (else)
//   timebound  -> t0, t1, left (sub)
class primitive
{
public:
	prim_kind kind{ prim_kind::zero };
	currency cur{};
	nat factor{ 0 };
	address source{};
	timestamp t0{ 0 };
	timestamp t1{ 0 };
	primitive_ptr left{};
	primitive_ptr right{};
};

// Structural (deep) equality.
bool operator== (const primitive & lhs, const primitive & rhs);
bool equal (const primitive_ptr & lhs, const primitive_ptr & rhs);

namespace prim
{
	primitive_ptr zero ();
	primitive_ptr one (currency cur);
	primitive_ptr scale (nat factor, primitive_ptr sub);
	primitive_ptr scale_obs (address source, primitive_ptr sub);
	primitive_ptr give (primitive_ptr sub);
	primitive_ptr and_ (primitive_ptr left, primitive_ptr right);
	primitive_ptr or_ (primitive_ptr left, primitive_ptr right);
	primitive_ptr if_ (address source, primitive_ptr then_branch, primitive_ptr else_branch);
	primitive_ptr timebound (timestamp t0, timestamp t1, primitive_ptr sub);
}

// At(t, p) = Timebound(t - delta, t + delta, p) with saturation at both ends.
primitive_ptr at (timestamp t, primitive_ptr sub, delta d);

// Before(t, p) = Timebound(0, t, p).
primitive_ptr before (timestamp t, primitive_ptr sub);

// After(t, p) = Timebound(t, t_max, p).
primitive_ptr after (timestamp t, primitive_ptr sub);

// Edge labels for paths from the root of a tree to one of its nodes.
enum class child_edge : std::uint8_t
{
	sub,
	left,
	right,
	then_branch,
	else_branch,
};

std::string_view to_string (child_edge edge);

// A Timebound node whose window is reversed (t0 > t1), with its path from
// the root.
struct timebound_violation
{
	std::vector<child_edge> path;
	timestamp t0{ 0 };
	timestamp t1{ 0 };

	bool operator== (const timebound_violation &) const = default;
};

// Collects every reversed Timebound window in the tree. Empty result means
// the tree is well-formed.
std::vector<timebound_violation> validate (const primitive & root);
std::vector<timebound_violation> validate (const primitive_ptr & root);
}
