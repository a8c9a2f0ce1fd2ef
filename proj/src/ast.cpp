#include <findel/ast.hpp>

#include <stdexcept>

namespace findel {

bool valid_currency (const std::string & symbol)
{
	if (symbol.empty () || symbol.size () > 8)
	{
		return false;
	}
	for (auto ch : symbol)
	{
		if (ch < 'A' || ch > 'Z')
		{
			return false;
		}
	}
	return true;
}

currency::currency (std::string symbol_a) :
	symbol (std::move (symbol_a))
{
	if (!valid_currency (symbol))
	{
		throw std::invalid_argument ("currency symbol must be 1-8 uppercase letters: " + symbol);
	}
}

address::address (std::string value_a) :
	value (std::move (value_a))
{
	if (value.empty ())
	{
		throw std::invalid_argument ("address must be non-empty");
	}
}

std::string_view to_string (prim_kind kind)
{
	switch (kind)
	{
		case prim_kind::zero:
			return "Zero";
		case prim_kind::one:
			return "One";
		case prim_kind::scale:
			return "Scale";
		case prim_kind::scale_obs:
			return "ScaleObs";
		case prim_kind::give:
			return "Give";
		case prim_kind::and_:
			return "And";
		case prim_kind::or_:
			return "Or";
		case prim_kind::if_:
			return "If";
		case prim_kind::timebound:
			return "Timebound";
	}
	return "?";
}

bool operator== (const primitive & lhs, const primitive & rhs)
{
	if (lhs.kind != rhs.kind)
	{
		return false;
	}
	switch (lhs.kind)
	{
		case prim_kind::zero:
			return true;
		case prim_kind::one:
			return lhs.cur == rhs.cur;
		case prim_kind::scale:
			return lhs.factor == rhs.factor && equal (lhs.left, rhs.left);
		case prim_kind::scale_obs:
			return lhs.source == rhs.source && equal (lhs.left, rhs.left);
		case prim_kind::give:
			return equal (lhs.left, rhs.left);
		case prim_kind::and_:
		case prim_kind::or_:
			return equal (lhs.left, rhs.left) && equal (lhs.right, rhs.right);
		case prim_kind::if_:
			return lhs.source == rhs.source && equal (lhs.left, rhs.left) && equal (lhs.right, rhs.right);
		case prim_kind::timebound:
			return lhs.t0 == rhs.t0 && lhs.t1 == rhs.t1 && equal (lhs.left, rhs.left);
	}
	return false;
}

bool equal (const primitive_ptr & lhs, const primitive_ptr & rhs)
{
	if (lhs == rhs)
	{
		return true;
	}
	if (!lhs || !rhs)
	{
		return false;
	}
	return *lhs == *rhs;
}

namespace prim
{
	namespace
	{
		const primitive_ptr & require (const primitive_ptr & sub)
		{
			if (!sub)
			{
				throw std::invalid_argument ("primitive subtree must be non-null");
			}
			return sub;
		}
	}

	primitive_ptr zero ()
	{
		// All Zero nodes are identical; share one.
		static const primitive_ptr instance = std::make_shared<primitive> ();
		return instance;
	}

	primitive_ptr one (currency cur)
	{
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::one;
		node->cur = std::move (cur);
		return node;
	}

	primitive_ptr scale (nat factor, primitive_ptr sub)
	{
		if (factor < 0)
		{
			throw std::invalid_argument ("scale factor must be a natural number");
		}
		require (sub);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::scale;
		node->factor = std::move (factor);
		node->left = std::move (sub);
		return node;
	}

	primitive_ptr scale_obs (address source, primitive_ptr sub)
	{
		require (sub);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::scale_obs;
		node->source = std::move (source);
		node->left = std::move (sub);
		return node;
	}

	primitive_ptr give (primitive_ptr sub)
	{
		require (sub);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::give;
		node->left = std::move (sub);
		return node;
	}

	primitive_ptr and_ (primitive_ptr left, primitive_ptr right)
	{
		require (left);
		require (right);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::and_;
		node->left = std::move (left);
		node->right = std::move (right);
		return node;
	}

	primitive_ptr or_ (primitive_ptr left, primitive_ptr right)
	{
		require (left);
		require (right);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::or_;
		node->left = std::move (left);
		node->right = std::move (right);
		return node;
	}

	primitive_ptr if_ (address source, primitive_ptr then_branch, primitive_ptr else_branch)
	{
		require (then_branch);
		require (else_branch);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::if_;
		node->source = std::move (source);
		node->left = std::move (then_branch);
		node->right = std::move (else_branch);
		return node;
	}

	primitive_ptr timebound (timestamp t0, timestamp t1, primitive_ptr sub)
	{
		require (sub);
		auto node = std::make_shared<primitive> ();
		node->kind = prim_kind::timebound;
		node->t0 = t0;
		node->t1 = t1;
		node->left = std::move (sub);
		return node;
	}
}

primitive_ptr at (timestamp t, primitive_ptr sub, delta d)
{
	return prim::timebound (sat_sub (t, d.value), sat_add (t, d.value), std::move (sub));
}

primitive_ptr before (timestamp t, primitive_ptr sub)
{
	return prim::timebound (0, t, std::move (sub));
}

primitive_ptr after (timestamp t, primitive_ptr sub)
{
	return prim::timebound (t, t_max, std::move (sub));
}

std::string_view to_string (child_edge edge)
{
	switch (edge)
	{
		case child_edge::sub:
			return "sub";
		case child_edge::left:
			return "left";
		case child_edge::right:
			return "right";
		case child_edge::then_branch:
			return "then";
		case child_edge::else_branch:
			return "else";
	}
	return "?";
}

namespace
{
	void validate_walk (const primitive & node, std::vector<child_edge> & path, std::vector<timebound_violation> & out)
	{
		auto descend = [&] (const primitive_ptr & child, child_edge edge) {
			if (child)
			{
				path.push_back (edge);
				validate_walk (*child, path, out);
				path.pop_back ();
			}
		};
		switch (node.kind)
		{
			case prim_kind::zero:
			case prim_kind::one:
				break;
			case prim_kind::scale:
			case prim_kind::scale_obs:
			case prim_kind::give:
				descend (node.left, child_edge::sub);
				break;
			case prim_kind::and_:
			case prim_kind::or_:
				descend (node.left, child_edge::left);
				descend (node.right, child_edge::right);
				break;
			case prim_kind::if_:
				descend (node.left, child_edge::then_branch);
				descend (node.right, child_edge::else_branch);
				break;
			case prim_kind::timebound:
				if (node.t0 > node.t1)
				{
					out.push_back ({ path, node.t0, node.t1 });
				}
				descend (node.left, child_edge::sub);
				break;
		}
	}
}

std::vector<timebound_violation> validate (const primitive & root)
{
	std::vector<timebound_violation> violations;
	std::vector<child_edge> path;
	validate_walk (root, path, violations);
	return violations;
}

std::vector<timebound_violation> validate (const primitive_ptr & root)
{
	if (!root)
	{
		return {};
	}
	return validate (*root);
}
}
