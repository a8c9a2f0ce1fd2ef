#include <findel/ast.hpp>
#include <findel/parser.hpp>

#include <gtest/gtest.h>
#include <support/random_tree.hpp>

using namespace findel;

TEST (ast, at_expands_to_timebound)
{
	auto expanded = at (100, prim::one (currency ("USD")), delta{ 10 });
	auto expected = prim::timebound (90, 110, prim::one (currency ("USD")));
	ASSERT_TRUE (equal (expanded, expected)) << pretty_print (expanded);
}

TEST (ast, at_saturates_at_zero)
{
	auto expanded = at (5, prim::zero (), delta{ 10 });
	ASSERT_TRUE (equal (expanded, prim::timebound (0, 15, prim::zero ())));
}

TEST (ast, at_zero_delta_is_point_window)
{
	auto sub = prim::one (currency ("EUR"));
	auto expanded = at (42, sub, delta{ 0 });
	ASSERT_EQ (expanded->t0, 42);
	ASSERT_EQ (expanded->t1, 42);
	ASSERT_TRUE (equal (expanded->left, sub));
}

TEST (ast, at_saturates_at_t_max)
{
	auto expanded = at (t_max - 2, prim::zero (), delta{ 10 });
	ASSERT_EQ (expanded->t0, t_max - 12);
	ASSERT_EQ (expanded->t1, t_max);
}

TEST (ast, before_expands_to_zero_based_window)
{
	ASSERT_TRUE (equal (before (50, prim::zero ()), prim::timebound (0, 50, prim::zero ())));
	ASSERT_TRUE (equal (before (0, prim::one (currency ("EUR"))), prim::timebound (0, 0, prim::one (currency ("EUR")))));
}

TEST (ast, after_expands_to_open_ended_window)
{
	ASSERT_TRUE (equal (after (50, prim::zero ()), prim::timebound (50, t_max, prim::zero ())));
	auto sub = prim::scale (3, prim::one (currency ("USD")));
	auto expanded = after (0, sub);
	ASSERT_EQ (expanded->t0, 0);
	ASSERT_EQ (expanded->t1, t_max);
	ASSERT_TRUE (equal (expanded->left, sub));
}

TEST (ast, validate_accepts_zero)
{
	ASSERT_TRUE (validate (prim::zero ()).empty ());
}

TEST (ast, validate_reports_reversed_window_at_root)
{
	auto violations = validate (prim::timebound (5, 3, prim::zero ()));
	ASSERT_EQ (violations.size (), 1u);
	ASSERT_TRUE (violations[0].path.empty ());
	ASSERT_EQ (violations[0].t0, 5);
	ASSERT_EQ (violations[0].t1, 3);
}

TEST (ast, validate_reports_path_from_root)
{
	// And(Zero, Give(Timebound(9, 2, Zero))): the bad node sits under the
	// right child's sub edge.
	auto tree = prim::and_ (prim::zero (), prim::give (prim::timebound (9, 2, prim::zero ())));
	auto violations = validate (tree);
	ASSERT_EQ (violations.size (), 1u);
	std::vector<child_edge> expected_path{ child_edge::right, child_edge::sub };
	ASSERT_EQ (violations[0].path, expected_path);
}

TEST (ast, validate_collects_multiple_violations)
{
	auto tree = prim::and_ (prim::timebound (7, 1, prim::zero ()), prim::timebound (4, 2, prim::zero ()));
	ASSERT_EQ (validate (tree).size (), 2u);
}

TEST (ast, validate_accepts_well_ordered_timebound)
{
	ASSERT_TRUE (validate (prim::timebound (3, 3, prim::zero ())).empty ());
	ASSERT_TRUE (validate (prim::timebound (0, t_max, prim::zero ())).empty ());
}

TEST (ast, structural_equality)
{
	auto usd = currency ("USD");
	auto eur = currency ("EUR");
	auto frce_a = prim::and_ (prim::give (prim::scale (11, prim::one (usd))), prim::scale (10, prim::one (eur)));
	auto frce_b = prim::and_ (prim::give (prim::scale (11, prim::one (usd))), prim::scale (10, prim::one (eur)));
	ASSERT_TRUE (equal (frce_a, frce_b));
	auto different = prim::and_ (prim::give (prim::scale (12, prim::one (usd))), prim::scale (10, prim::one (eur)));
	ASSERT_FALSE (equal (frce_a, different));
	ASSERT_FALSE (equal (prim::zero (), prim::one (usd)));
}

TEST (ast, factories_reject_invalid_arguments)
{
	ASSERT_THROW (prim::scale (nat (-1), prim::zero ()), std::invalid_argument);
	ASSERT_THROW (prim::scale (3, nullptr), std::invalid_argument);
	ASSERT_THROW (prim::give (nullptr), std::invalid_argument);
	ASSERT_THROW (prim::and_ (prim::zero (), nullptr), std::invalid_argument);
	ASSERT_THROW (prim::timebound (0, 1, nullptr), std::invalid_argument);
}

TEST (ast, currency_validation)
{
	ASSERT_TRUE (valid_currency ("USD"));
	ASSERT_TRUE (valid_currency ("X"));
	ASSERT_TRUE (valid_currency ("ABCDEFGH"));
	ASSERT_FALSE (valid_currency (""));
	ASSERT_FALSE (valid_currency ("usd"));
	ASSERT_FALSE (valid_currency ("TOOLONGXX"));
	ASSERT_FALSE (valid_currency ("US1"));
	ASSERT_THROW (currency ("usd"), std::invalid_argument);
	ASSERT_THROW (address (""), std::invalid_argument);
}

// Sugar introduces exactly one Timebound node and leaves the subtree
// untouched; the expansion always validates.
TEST (ast, sugar_wraps_subtree_and_validates)
{
	std::mt19937_64 rng (42);
	test::tree_universe universe;
	for (int iteration = 0; iteration < 300; ++iteration)
	{
		auto sub = test::random_tree (rng, 4, universe);
		auto t = static_cast<timestamp> (rng () % 1000);
		auto width = delta{ rng () % 100 };
		primitive_ptr expanded;
		switch (iteration % 3)
		{
			case 0:
				expanded = at (t, sub, width);
				break;
			case 1:
				expanded = before (t, sub);
				break;
			default:
				expanded = after (t, sub);
				break;
		}
		ASSERT_EQ (expanded->kind, prim_kind::timebound);
		ASSERT_EQ (expanded->left.get (), sub.get ()); // same subtree, not a copy
		ASSERT_LE (expanded->t0, expanded->t1);
		ASSERT_TRUE (validate (expanded).empty ());
	}
}
