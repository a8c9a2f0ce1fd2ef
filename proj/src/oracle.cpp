#include <findel/oracle.hpp>
#include <findel/parser.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <sstream>

namespace findel::oracle {

std::string_view to_string (violation_kind kind)
{
	switch (kind)
	{
		case violation_kind::duplicate_id:
			return "DuplicateId";
		case violation_kind::stale_fresh_id:
			return "StaleFreshId";
		case violation_kind::dangling_description:
			return "DanglingDescription";
		case violation_kind::ledger_mismatch:
			return "LedgerMismatch";
		case violation_kind::event_dangling:
			return "EventDangling";
		case violation_kind::time_regression:
			return "TimeRegression";
	}
	return "?";
}

std::string_view to_string (op_kind kind)
{
	switch (kind)
	{
		case op_kind::register_description:
			return "register";
		case op_kind::issue:
			return "issue";
		case op_kind::join:
			return "join";
		case op_kind::join_or:
			return "join_or";
		case op_kind::tick:
			return "tick";
		case op_kind::set_gateway:
			return "set_gateway";
	}
	return "?";
}

std::string to_string (const trace_op & op)
{
	std::ostringstream os;
	os << to_string (op.kind);
	switch (op.kind)
	{
		case op_kind::register_description:
			os << " " << pretty_print (op.body) << " window [" << op.valid_from << ", " << op.valid_until << "]";
			break;
		case op_kind::issue:
			os << " dsc " << op.dsc_id << " by " << op.issuer.value << " for " << op.proposed_owner.value;
			break;
		case op_kind::join:
			os << " contract " << op.contract << " by " << op.caller.value;
			break;
		case op_kind::join_or:
			os << " contract " << op.contract << " by " << op.caller.value << " " << (op.branch == or_branch::left ? "left" : "right");
			break;
		case op_kind::tick:
			os << " " << op.count;
			break;
		case op_kind::set_gateway:
			os << " " << op.source.value;
			break;
	}
	return os.str ();
}

step_result apply_op (const marketplace_state & state, const trace_op & op)
{
	switch (op.kind)
	{
		case op_kind::register_description:
			return register_description (state, op.body, op.valid_from, op.valid_until);
		case op_kind::issue:
			return issue (state, op.dsc_id, op.issuer, op.proposed_owner);
		case op_kind::join:
			return join (state, op.contract, op.caller);
		case op_kind::join_or:
			return join_or (state, op.contract, op.caller, op.branch);
		case op_kind::tick:
			return tick (state, op.count);
		case op_kind::set_gateway:
			return set_gateway (state, op.source, op.value);
	}
	step_result result;
	result.state = state;
	return result;
}

balance_table replay_ledger (const ledger & transfers)
{
	balance_table::entry_map totals;
	for (const auto & record : transfers)
	{
		totals[{ record.payer, record.cur }] -= record.amount;
		totals[{ record.payee, record.cur }] += record.amount;
	}
	return balance_table (std::move (totals));
}

std::vector<violation> check_state (const marketplace_state & state)
{
	std::vector<violation> out;
	std::set<contract_id> contract_ids;
	for (const auto & contract : state.contracts)
	{
		if (!contract_ids.insert (contract.id).second)
		{
			out.push_back ({ violation_kind::duplicate_id, "contract id " + std::to_string (contract.id) + " appears more than once" });
		}
		if (contract.id >= state.fresh_id)
		{
			out.push_back ({ violation_kind::stale_fresh_id, "contract id " + std::to_string (contract.id) + " is not below fresh id " + std::to_string (state.fresh_id) });
		}
		if (find_description (state, contract.dsc_id) == nullptr)
		{
			out.push_back ({ violation_kind::dangling_description, "contract " + std::to_string (contract.id) + " references unknown description " + std::to_string (contract.dsc_id) });
		}
	}
	std::set<description_id> description_ids;
	for (const auto & dsc : state.descriptions)
	{
		if (!description_ids.insert (dsc.id).second)
		{
			out.push_back ({ violation_kind::duplicate_id, "description id " + std::to_string (dsc.id) + " appears more than once" });
		}
	}
	if (!(replay_ledger (state.transfers) == state.balances))
	{
		out.push_back ({ violation_kind::ledger_mismatch, "replaying the ledger does not reproduce the balance table" });
	}
	for (const auto & ev : state.events)
	{
		if (ev.contract == 0 || ev.contract >= state.fresh_id)
		{
			out.push_back ({ violation_kind::event_dangling, std::string (to_string (ev.kind)) + " event references id " + std::to_string (ev.contract) + " that was never allocated" });
		}
	}
	return out;
}

std::vector<violation> check_trace (const trace & tr)
{
	auto out = check_state (tr.initial);
	const marketplace_state * previous = &tr.initial;
	for (std::size_t index = 0; index < tr.steps.size (); ++index)
	{
		const auto & step = tr.steps[index];
		auto step_violations = check_state (step.state);
		for (auto & v : step_violations)
		{
			v.at_step = static_cast<std::ptrdiff_t> (index);
			out.push_back (std::move (v));
		}
		const auto at = static_cast<std::ptrdiff_t> (index);
		if (step.state.time < previous->time)
		{
			out.push_back ({ violation_kind::time_regression, "time decreased from " + std::to_string (previous->time) + " to " + std::to_string (step.state.time), at });
		}
		if (step.op.kind != op_kind::tick && step.state.time != previous->time)
		{
			out.push_back ({ violation_kind::time_regression, "non-tick operation changed time", at });
		}
		auto ledger_prefix = step.state.transfers.size () >= previous->transfers.size () && std::equal (previous->transfers.begin (), previous->transfers.end (), step.state.transfers.begin ());
		if (!ledger_prefix)
		{
			out.push_back ({ violation_kind::ledger_mismatch, "ledger is not append-only", at });
		}
		auto events_kept = step.state.events.size () >= previous->events.size () && std::equal (previous->events.begin (), previous->events.end (), step.state.events.begin () + (step.state.events.size () - previous->events.size ()));
		if (!events_kept)
		{
			out.push_back ({ violation_kind::event_dangling, "event list is not append-only", at });
		}
		previous = &step.state;
	}
	return out;
}

trace_universe default_universe ()
{
	trace_universe universe;
	universe.parties = { address ("alice"), address ("bob"), address ("carol") };
	universe.currencies = { currency ("USD"), currency ("EUR") };
	universe.numeric_sources = { address ("rate_feed") };
	universe.boolean_sources = { address ("flag_feed") };
	auto usd = currency ("USD");
	auto eur = currency ("EUR");
	auto rate = universe.numeric_sources[0];
	auto flag = universe.boolean_sources[0];
	universe.description_bodies = {
		prim::zero (),
		prim::one (usd),
		prim::scale (5, prim::one (eur)),
		prim::give (prim::one (eur)),
		prim::and_ (prim::give (prim::scale (11, prim::one (usd))), prim::scale (10, prim::one (eur))),
		prim::or_ (prim::scale (5, prim::one (usd)), prim::scale (3, prim::one (eur))),
		prim::timebound (0, t_max, prim::one (usd)),
		prim::timebound (2, 9, prim::scale (2, prim::one (usd))),
		prim::scale_obs (rate, prim::one (usd)),
		prim::if_ (flag, prim::one (usd), prim::scale (2, prim::one (eur))),
		prim::and_ (prim::or_ (prim::zero (), prim::one (usd)), prim::scale (3, prim::one (eur))),
		prim::and_ (prim::give (prim::scale (2, prim::one (eur))), prim::scale_obs (rate, prim::one (usd))),
	};
	return universe;
}

namespace
{
	// Thin wrapper so draws stay deterministic across standard libraries;
	// std::uniform_int_distribution is not pinned by the standard.
	struct dice
	{
		std::mt19937_64 rng;

		explicit dice (std::uint64_t seed) :
			rng (seed)
		{
		}

		std::uint64_t below (std::uint64_t bound)
		{
			return rng () % bound;
		}

		bool chance (double probability)
		{
			return static_cast<double> (rng () >> 11) * 0x1.0p-53 < probability;
		}

		template <typename T>
		const T & pick (const std::vector<T> & pool)
		{
			return pool[below (pool.size ())];
		}
	};

	std::vector<const findel_contract *> live_contracts (const marketplace_state & state, bool or_rooted)
	{
		std::vector<const findel_contract *> out;
		for (const auto & contract : state.contracts)
		{
			auto is_or = contract.body && contract.body->kind == prim_kind::or_;
			if (is_or == or_rooted)
			{
				out.push_back (&contract);
			}
		}
		return out;
	}

	address other_party (dice & d, const trace_universe & universe, const address & excluded)
	{
		for (int attempt = 0; attempt < 8; ++attempt)
		{
			const auto & candidate = d.pick (universe.parties);
			if (!(candidate == excluded))
			{
				return candidate;
			}
		}
		return excluded;
	}

	trace_op draw_register (dice & d, const marketplace_state & state, const trace_universe & universe, bool invalid)
	{
		trace_op op;
		op.kind = op_kind::register_description;
		op.body = d.pick (universe.description_bodies);
		if (invalid)
		{
			op.valid_from = sat_add (state.time, 10);
			op.valid_until = sat_add (state.time, 3);
		}
		else if (d.chance (0.25))
		{
			// Narrow window; joins drifting past it are plain rejections.
			op.valid_from = state.time;
			op.valid_until = sat_add (state.time, d.below (6));
		}
		return op;
	}

	trace_op draw_issue (dice & d, const marketplace_state & state, const trace_universe & universe, bool invalid)
	{
		trace_op op;
		op.kind = op_kind::issue;
		op.issuer = d.pick (universe.parties);
		op.proposed_owner = d.pick (universe.parties);
		if (invalid || state.descriptions.empty ())
		{
			op.dsc_id = state.descriptions.size () + 100;
		}
		else
		{
			op.dsc_id = state.descriptions[d.below (state.descriptions.size ())].id;
		}
		return op;
	}

	trace_op draw_join (dice & d, const marketplace_state & state, const trace_universe & universe, bool or_rooted, bool invalid)
	{
		trace_op op;
		op.kind = or_rooted ? op_kind::join_or : op_kind::join;
		op.branch = d.below (2) == 0 ? or_branch::left : or_branch::right;
		auto candidates = live_contracts (state, or_rooted);
		if (candidates.empty ())
		{
			op.contract = state.fresh_id + d.below (5);
			op.caller = d.pick (universe.parties);
			return op;
		}
		const auto * target = candidates[d.below (candidates.size ())];
		op.contract = target->id;
		op.caller = target->proposed_owner;
		if (invalid)
		{
			switch (d.below (3))
			{
				case 0:
					op.contract = state.fresh_id + 1 + d.below (5);
					break;
				case 1:
					op.caller = other_party (d, universe, target->proposed_owner);
					break;
				default:
				{
					// Wrong entry point: plain join on an Or root or vice versa.
					auto opposite = live_contracts (state, !or_rooted);
					if (!opposite.empty ())
					{
						const auto * wrong = opposite[d.below (opposite.size ())];
						op.contract = wrong->id;
						op.caller = wrong->proposed_owner;
					}
					else
					{
						op.contract = state.fresh_id + 1 + d.below (5);
					}
					break;
				}
			}
		}
		return op;
	}

	trace_op draw_gateway (dice & d, const trace_universe & universe)
	{
		trace_op op;
		op.kind = op_kind::set_gateway;
		auto numeric = universe.boolean_sources.empty () || (!universe.numeric_sources.empty () && d.below (2) == 0);
		if (numeric)
		{
			op.source = d.pick (universe.numeric_sources);
			op.value = gateway_value::number (nat (d.below (20)));
		}
		else
		{
			op.source = d.pick (universe.boolean_sources);
			op.value = gateway_value::boolean (d.below (2) == 0);
		}
		return op;
	}
}

trace random_trace (std::uint64_t seed, std::size_t depth, const trace_universe & universe)
{
	if (universe.parties.empty () || universe.description_bodies.empty ())
	{
		throw std::invalid_argument ("trace universe needs at least one party and one description body");
	}
	auto has_gateway_sources = !universe.numeric_sources.empty () || !universe.boolean_sources.empty ();
	auto max_tick = universe.max_tick > 0 ? universe.max_tick : 1;
	dice d (seed);
	trace tr;
	marketplace_state current = tr.initial;
	for (std::size_t step = 0; step < depth; ++step)
	{
		auto invalid = d.chance (universe.invalid_rate);
		auto roll = d.below (100);
		trace_op op;
		if (current.descriptions.empty () || roll < 10)
		{
			op = draw_register (d, current, universe, invalid);
		}
		else if (roll < 35)
		{
			op = draw_issue (d, current, universe, invalid);
		}
		else if (roll < 65)
		{
			op = draw_join (d, current, universe, false, invalid);
		}
		else if (roll < 75)
		{
			op = draw_join (d, current, universe, true, invalid);
		}
		else if (roll < 90 || !has_gateway_sources)
		{
			op.kind = op_kind::tick;
			op.count = 1 + d.below (max_tick);
		}
		else
		{
			op = draw_gateway (d, universe);
		}
		auto result = apply_op (current, op);
		current = result.state;
		tr.steps.push_back ({ std::move (op), result.status, std::move (result.state) });
	}
	return tr;
}
}
