#include <findel/marketplace.hpp>
#include <findel/parser.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace findel;

namespace {
const address alice ("alice");
const address bob ("bob");
const address carol ("carol");
const currency usd ("USD");
const currency eur ("EUR");

primitive_ptr frce ()
{
	return prim::and_ (prim::give (prim::scale (11, prim::one (usd))), prim::scale (10, prim::one (eur)));
}

// ZCB with the year pinned at 365 and delta 30: claim window [335, 395].
primitive_ptr zcb ()
{
	return prim::and_ (prim::give (prim::scale (10, prim::one (usd))), at (365, prim::scale (11, prim::one (usd)), delta{ 30 }));
}

// register + issue in one go, returning the state and contract id.
std::pair<marketplace_state, contract_id> issued (primitive_ptr body, const address & issuer_a = alice, const address & owner_a = bob)
{
	auto registered = register_description (marketplace_state{}, std::move (body));
	auto result = issue (registered.state, registered.id, issuer_a, owner_a);
	return { result.state, result.id };
}
}

TEST (marketplace, register_assigns_sequential_ids)
{
	marketplace_state empty;
	auto first = register_description (empty, frce ());
	ASSERT_TRUE (first.ok ());
	ASSERT_EQ (first.id, 1u);
	ASSERT_EQ (first.state.descriptions.size (), 1u);
	ASSERT_EQ (first.state.descriptions[0].valid_from, 0u);
	ASSERT_EQ (first.state.descriptions[0].valid_until, t_max);
	auto second = register_description (first.state, prim::zero ());
	ASSERT_EQ (second.id, 2u);
	// Nothing but D changes.
	ASSERT_EQ (second.state.contracts, empty.contracts);
	ASSERT_EQ (second.state.balances, empty.balances);
	ASSERT_EQ (second.state.time, empty.time);
	ASSERT_EQ (second.state.fresh_id, empty.fresh_id);
}

TEST (marketplace, register_requires_a_body)
{
	ASSERT_THROW (register_description (marketplace_state{}, nullptr), std::invalid_argument);
}

TEST (marketplace, register_rejects_reversed_window)
{
	marketplace_state empty;
	auto result = register_description (empty, prim::zero (), 5, 3);
	ASSERT_EQ (result.status, op_status::invalid_window);
	ASSERT_TRUE (result.state == empty);
}

TEST (marketplace, issue_initializes_contract_from_description)
{
	auto registered = register_description (marketplace_state{}, frce ());
	auto result = issue (registered.state, registered.id, alice, bob);
	ASSERT_TRUE (result.ok ());
	ASSERT_EQ (result.id, 1u);
	ASSERT_EQ (result.state.contracts.size (), 1u);
	const auto & contract = result.state.contracts[0];
	ASSERT_EQ (contract.id, 1u);
	ASSERT_EQ (contract.dsc_id, registered.id);
	ASSERT_TRUE (equal (contract.body, frce ()));
	ASSERT_EQ (contract.issuer, alice);
	ASSERT_EQ (contract.owner, alice); // owner starts as the issuer
	ASSERT_EQ (contract.proposed_owner, bob);
	ASSERT_EQ (contract.scale, 1);
	ASSERT_EQ (result.state.fresh_id, 2u);
	// Issuing entails no obligations.
	ASSERT_EQ (result.state.balances, balance_table{});
	ASSERT_TRUE (result.state.transfers.empty ());
	ASSERT_EQ (result.state.events.size (), 1u);
	ASSERT_EQ (result.state.events[0].kind, event_kind::issued_for);
	ASSERT_EQ (result.state.events[0].contract, 1u);
	ASSERT_EQ (result.state.events[0].proposed_owner, bob);
}

TEST (marketplace, issue_unknown_description_rejected)
{
	marketplace_state empty;
	auto result = issue (empty, 9, alice, bob);
	ASSERT_EQ (result.status, op_status::unknown_description);
	ASSERT_TRUE (result.state == empty);
}

TEST (marketplace, consecutive_issues_stack_events_newest_first)
{
	auto registered = register_description (marketplace_state{}, prim::zero ());
	auto first = issue (registered.state, registered.id, alice, bob);
	auto second = issue (first.state, registered.id, alice, carol);
	ASSERT_EQ (first.id, 1u);
	ASSERT_EQ (second.id, 2u);
	ASSERT_EQ (second.state.events.size (), 2u);
	ASSERT_EQ (second.state.events[0].contract, 2u);
	ASSERT_EQ (second.state.events[0].proposed_owner, carol);
	ASSERT_EQ (second.state.events[1].contract, 1u);
	auto chronological = events_chronological (second.state);
	ASSERT_EQ (chronological[0].contract, 1u);
	ASSERT_EQ (chronological[1].contract, 2u);
}

TEST (marketplace, join_frce_settles_both_legs)
{
	auto [state, id] = issued (frce ());
	auto result = join (state, id, bob);
	ASSERT_TRUE (result.ok ());
	ASSERT_EQ (balance_of (result.state, alice, usd), 11);
	ASSERT_EQ (balance_of (result.state, alice, eur), -10);
	ASSERT_EQ (balance_of (result.state, bob, usd), -11);
	ASSERT_EQ (balance_of (result.state, bob, eur), 10);
	ASSERT_EQ (result.state.transfers.size (), 2u);
	ASSERT_EQ (result.state.transfers[0].payer, bob);
	ASSERT_EQ (result.state.transfers[0].amount, 11);
	ASSERT_EQ (result.state.transfers[1].payer, alice);
	ASSERT_EQ (result.state.transfers[1].amount, 10);
	ASSERT_TRUE (result.state.contracts.empty ());
	ASSERT_EQ (result.state.events[0].kind, event_kind::executed);
	ASSERT_EQ (result.state.events[0].contract, id);
}

TEST (marketplace, join_by_stranger_is_pure_rejection)
{
	auto [state, id] = issued (frce ());
	auto result = join (state, id, carol);
	ASSERT_EQ (result.status, op_status::not_proposed_owner);
	ASSERT_TRUE (result.state == state) << dump_state (result.state);
}

TEST (marketplace, join_unknown_contract_rejected)
{
	auto [state, id] = issued (frce ());
	auto result = join (state, id + 10, bob);
	ASSERT_EQ (result.status, op_status::unknown_contract);
	ASSERT_TRUE (result.state == state);
}

TEST (marketplace, join_or_root_requires_join_or)
{
	auto [state, id] = issued (prim::or_ (prim::zero (), prim::zero ()));
	auto result = join (state, id, bob);
	ASSERT_EQ (result.status, op_status::root_is_or);
	ASSERT_TRUE (result.state == state);
}

TEST (marketplace, join_outside_description_window_rejected)
{
	auto registered = register_description (marketplace_state{}, prim::one (usd), 0, 5);
	auto state = issue (registered.state, registered.id, alice, bob).state;
	auto id = state.contracts[0].id;
	auto at_edge = join (tick (state, 5).state, id, bob);
	ASSERT_TRUE (at_edge.ok ());
	auto beyond = join (tick (state, 6).state, id, bob);
	ASSERT_EQ (beyond.status, op_status::outside_window);
	ASSERT_TRUE (beyond.state == tick (state, 6).state);
}

TEST (marketplace, join_before_window_start_rejected)
{
	auto registered = register_description (marketplace_state{}, prim::one (usd), 3, 10);
	auto state = issue (registered.state, registered.id, alice, bob).state;
	auto id = state.contracts[0].id;
	ASSERT_EQ (join (state, id, bob).status, op_status::outside_window);
	ASSERT_TRUE (join (tick (state, 3).state, id, bob).ok ());
}

TEST (marketplace, join_zcb_pays_now_and_postpones_claim)
{
	auto [state, id] = issued (zcb ());
	auto result = join (state, id, bob);
	ASSERT_TRUE (result.ok ());
	ASSERT_EQ (balance_of (result.state, alice, usd), 10);
	ASSERT_EQ (balance_of (result.state, bob, usd), -10);
	ASSERT_EQ (result.state.contracts.size (), 1u);
	const auto & claim = result.state.contracts[0];
	ASSERT_TRUE (equal (claim.body, prim::timebound (335, 395, prim::scale (11, prim::one (usd))))) << pretty_print (claim.body);
	ASSERT_EQ (claim.owner, bob);
	ASSERT_EQ (claim.proposed_owner, bob);
	ASSERT_EQ (claim.issuer, alice);
	ASSERT_EQ (claim.dsc_id, state.contracts[0].dsc_id);

	// A year later Bob claims the 11 USD.
	auto matured = tick (result.state, 365).state;
	auto claimed = join (matured, claim.id, bob);
	ASSERT_TRUE (claimed.ok ());
	ASSERT_EQ (balance_of (claimed.state, bob, usd), 1);
	ASSERT_EQ (balance_of (claimed.state, alice, usd), -1);
	ASSERT_TRUE (claimed.state.contracts.empty ());
}

TEST (marketplace, join_expired_claim_deletes_contract)
{
	auto [state, id] = issued (zcb ());
	auto joined = join (state, id, bob);
	auto claim_id = joined.state.contracts[0].id;
	auto late = tick (joined.state, 396).state;
	auto result = join (late, claim_id, bob);
	ASSERT_EQ (result.status, op_status::contract_deleted);
	ASSERT_EQ (result.exec_reason, exec_status::expired);
	ASSERT_TRUE (result.state.contracts.empty ());
	ASSERT_EQ (result.state.events[0].kind, event_kind::deleted);
	ASSERT_EQ (result.state.events[0].contract, claim_id);
	ASSERT_EQ (balance_of (result.state, bob, usd), -10);
	ASSERT_EQ (result.state.balances, late.balances);
	ASSERT_EQ (result.state.transfers, late.transfers);
	ASSERT_EQ (result.state.fresh_id, late.fresh_id);
}

TEST (marketplace, join_missing_gateway_triggers_fail_rule)
{
	auto [state, id] = issued (prim::scale_obs (address ("rate"), prim::one (usd)));
	auto result = join (state, id, bob);
	ASSERT_EQ (result.status, op_status::contract_deleted);
	ASSERT_EQ (result.exec_reason, exec_status::gateway_missing);
	ASSERT_TRUE (result.state.contracts.empty ());
	ASSERT_EQ (result.state.events[0].kind, event_kind::deleted);
	ASSERT_EQ (result.state.balances, balance_table{});
	ASSERT_TRUE (result.state.transfers.empty ());
	ASSERT_EQ (result.state.fresh_id, state.fresh_id);
}

TEST (marketplace, join_or_executes_chosen_branch_only)
{
	auto [state, id] = issued (prim::or_ (prim::scale (5, prim::one (usd)), prim::scale (3, prim::one (eur))));
	auto left = join_or (state, id, bob, or_branch::left);
	ASSERT_TRUE (left.ok ());
	ASSERT_EQ (balance_of (left.state, bob, usd), 5);
	ASSERT_EQ (balance_of (left.state, bob, eur), 0);
	ASSERT_EQ (left.state.transfers.size (), 1u);
	auto right = join_or (state, id, bob, or_branch::right);
	ASSERT_TRUE (right.ok ());
	ASSERT_EQ (balance_of (right.state, bob, usd), 0);
	ASSERT_EQ (balance_of (right.state, bob, eur), 3);
}

TEST (marketplace, join_or_right_on_zero_or_one)
{
	auto [state, id] = issued (prim::or_ (prim::zero (), prim::one (usd)));
	auto result = join_or (state, id, bob, or_branch::right);
	ASSERT_TRUE (result.ok ());
	ASSERT_EQ (balance_of (result.state, bob, usd), 1);
	ASSERT_EQ (result.state.transfers.size (), 1u);
}

TEST (marketplace, join_or_on_non_or_root_rejected)
{
	auto [state, id] = issued (prim::zero ());
	auto result = join_or (state, id, bob, or_branch::left);
	ASSERT_EQ (result.status, op_status::root_not_or);
	ASSERT_TRUE (result.state == state);
}

TEST (marketplace, join_or_by_stranger_rejected)
{
	auto [state, id] = issued (prim::or_ (prim::zero (), prim::zero ()));
	auto result = join_or (state, id, carol, or_branch::left);
	ASSERT_EQ (result.status, op_status::not_proposed_owner);
	ASSERT_TRUE (result.state == state);
}

TEST (marketplace, tick_advances_only_time)
{
	auto [state, id] = issued (frce ());
	auto result = tick (state);
	ASSERT_EQ (result.state.time, state.time + 1);
	auto expected = state;
	expected.time += 1;
	ASSERT_TRUE (result.state == expected);
	ASSERT_EQ (tick (state, 365).state.time, state.time + 365);
}

TEST (marketplace, set_gateway_stamps_current_time)
{
	auto state = tick (marketplace_state{}, 7).state;
	auto result = set_gateway (state, address ("rate"), gateway_value::number (4));
	ASSERT_TRUE (result.ok ());
	const auto & entry = result.state.gw.entries.at (address ("rate"));
	ASSERT_EQ (entry.value, gateway_value::number (4));
	ASSERT_EQ (entry.recorded_at, 7u);
	// Replacement, not accumulation.
	auto replaced = set_gateway (result.state, address ("rate"), gateway_value::number (9));
	ASSERT_EQ (replaced.state.gw.entries.size (), 1u);
	ASSERT_EQ (replaced.state.gw.entries.at (address ("rate")).value, gateway_value::number (9));
}

TEST (marketplace, stale_gateway_deletes_on_join)
{
	auto registered = register_description (marketplace_state{}, prim::scale_obs (address ("rate"), prim::one (usd)));
	auto primed = set_gateway (registered.state, address ("rate"), gateway_value::number (4)).state;
	auto state = issue (primed, registered.id, alice, bob).state;
	auto id = state.contracts[0].id;
	// Inside the freshness window (default 10) the join succeeds.
	auto fresh_join = join (tick (state, 10).state, id, bob);
	ASSERT_TRUE (fresh_join.ok ());
	ASSERT_EQ (balance_of (fresh_join.state, bob, usd), 4);
	// One tick past it the execution fails and the contract is deleted.
	auto stale_join = join (tick (state, 11).state, id, bob);
	ASSERT_EQ (stale_join.status, op_status::contract_deleted);
	ASSERT_EQ (stale_join.exec_reason, exec_status::gateway_stale);
}

TEST (marketplace, if_contract_follows_gateway_flag)
{
	auto registered = register_description (marketplace_state{}, prim::if_ (address ("flag"), prim::one (usd), prim::zero ()));
	auto primed = set_gateway (registered.state, address ("flag"), gateway_value::boolean (true)).state;
	auto state = issue (primed, registered.id, alice, bob).state;
	auto result = join (state, state.contracts[0].id, bob);
	ASSERT_TRUE (result.ok ());
	ASSERT_EQ (balance_of (result.state, bob, usd), 1);
}

TEST (marketplace, query_fresh_state)
{
	marketplace_state state;
	ASSERT_TRUE (state.contracts.empty ());
	ASSERT_TRUE (state.transfers.empty ());
	ASSERT_TRUE (state.events.empty ());
	ASSERT_EQ (state.time, 0u);
	ASSERT_EQ (state.fresh_id, 1u);
	ASSERT_EQ (balance_of (state, alice, usd), 0);
	ASSERT_EQ (find_contract (state, 1), nullptr);
}

// Time is only ever moved by tick.
TEST (marketplace, non_tick_transitions_leave_time_unchanged)
{
	auto state = tick (marketplace_state{}, 9).state;
	auto registered = register_description (state, frce ());
	ASSERT_EQ (registered.state.time, 9u);
	auto issued_result = issue (registered.state, registered.id, alice, bob);
	ASSERT_EQ (issued_result.state.time, 9u);
	auto gateway_result = set_gateway (issued_result.state, address ("rate"), gateway_value::number (1));
	ASSERT_EQ (gateway_result.state.time, 9u);
	auto joined = join (gateway_result.state, issued_result.id, bob);
	ASSERT_EQ (joined.state.time, 9u);
}

// The operation surface offers no withdrawal: only join/join_or by the
// proposed owner ever removes a live contract.
TEST (marketplace, no_transition_other_than_join_removes_contracts)
{
	auto registered = register_description (marketplace_state{}, frce ());
	auto state = issue (registered.state, registered.id, alice, bob).state;
	state = issue (state, registered.id, carol, alice).state;
	auto ids_before = std::vector<contract_id>{};
	for (const auto & contract : state.contracts)
	{
		ids_before.push_back (contract.id);
	}
	std::mt19937_64 rng (3);
	auto current = state;
	for (int step = 0; step < 60; ++step)
	{
		switch (rng () % 4)
		{
			case 0:
				current = register_description (current, prim::zero ()).state;
				break;
			case 1:
				current = issue (current, 1, alice, bob).state;
				break;
			case 2:
				current = tick (current, 1 + rng () % 3).state;
				break;
			default:
				current = set_gateway (current, address ("rate"), gateway_value::number (rng () % 9)).state;
				break;
		}
		for (auto id : ids_before)
		{
			ASSERT_NE (find_contract (current, id), nullptr);
		}
		// Failed joins by the wrong party must not remove anything either.
		auto rejected = join (current, ids_before[0], carol);
		ASSERT_EQ (rejected.status, op_status::not_proposed_owner);
		ASSERT_TRUE (rejected.state == current);
	}
}

TEST (marketplace, deterministic_replay)
{
	auto run = [] {
		auto registered = register_description (marketplace_state{}, frce ());
		auto state = issue (registered.state, registered.id, alice, bob).state;
		state = tick (state, 3).state;
		state = set_gateway (state, address ("rate"), gateway_value::number (4)).state;
		state = join (state, 1, bob).state;
		return state;
	};
	ASSERT_TRUE (run () == run ());
}

// Generated contracts inherit the parent's description, so its window
// still gates their joins.
TEST (marketplace, postponed_contract_gated_by_description_window)
{
	auto registered = register_description (marketplace_state{}, prim::timebound (10, 20, prim::one (usd)), 0, 5);
	auto state = issue (registered.state, registered.id, alice, bob).state;
	auto joined = join (state, state.contracts[0].id, bob);
	ASSERT_TRUE (joined.ok ());
	ASSERT_EQ (joined.state.contracts.size (), 1u); // postponed claim
	auto claim_id = joined.state.contracts[0].id;
	auto later = tick (joined.state, 12).state; // inside [10,20] but past the window
	auto result = join (later, claim_id, bob);
	ASSERT_EQ (result.status, op_status::outside_window);
	ASSERT_TRUE (result.state == later);
}
