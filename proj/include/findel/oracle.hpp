#pragma once

#include <findel/marketplace.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace findel::oracle {

enum class violation_kind
{
	duplicate_id,
	stale_fresh_id,
	dangling_description,
	ledger_mismatch,
	event_dangling,
	time_regression,
};

std::string_view to_string (violation_kind kind);

// One detected consistency breach. at_step is the index of the transition
// after which the breach was observed; -1 marks the initial state.
struct violation
{
	violation_kind kind;
	std::string detail;
	std::ptrdiff_t at_step = -1;
};

enum class op_kind
{
	register_description,
	issue,
	join,
	join_or,
	tick,
	set_gateway,
};

std::string_view to_string (op_kind kind);

// A reified marketplace operation, replayable against any state.
struct trace_op
{
	op_kind kind{ op_kind::tick };
	primitive_ptr body; // register
	timestamp valid_from{ 0 }; // register
	timestamp valid_until{ t_max }; // register
	description_id dsc_id{ 0 }; // issue
	address issuer; // issue
	address proposed_owner; // issue
	contract_id contract{ 0 }; // join / join_or
	address caller; // join / join_or
	or_branch branch{ or_branch::left }; // join_or
	std::uint64_t count{ 1 }; // tick
	address source; // set_gateway
	gateway_value value; // set_gateway
};

std::string to_string (const trace_op & op);

step_result apply_op (const marketplace_state & state, const trace_op & op);

struct trace_step
{
	trace_op op;
	op_status status{ op_status::ok };
	marketplace_state state; // state after applying op
};

struct trace
{
	marketplace_state initial;
	std::vector<trace_step> steps;
};

// Independent fold over the ledger: payer loses amount, payee gains it,
// starting from the all-zero table. Deliberately shares no update code
// with the exec engine.
balance_table replay_ledger (const ledger & transfers);

// Snapshot consistency: distinct contract ids, fresh id dominance,
// description referential integrity, ledger/balance agreement (via
// replay_ledger) and event referential integrity.
std::vector<violation> check_state (const marketplace_state & state);

// check_state on every intermediate state, plus cross-state checks: time
// monotonicity, non-tick steps leave time unchanged, and append-only
// ledger and event lists.
std::vector<violation> check_trace (const trace & tr);

// Value universe the random trace generator draws from.
struct trace_universe
{
	std::vector<address> parties;
	std::vector<currency> currencies;
	std::vector<primitive_ptr> description_bodies;
	std::vector<address> numeric_sources; // gateway rate feeds
	std::vector<address> boolean_sources; // gateway flag feeds
	std::uint64_t max_tick = 5;
	// Fraction of steps drawn with deliberately invalid arguments.
	double invalid_rate = 0.20;
};

trace_universe default_universe ();

// Deterministic in seed: draws `depth` operations, mixing valid calls with
// deliberately invalid ones at roughly universe.invalid_rate.
trace random_trace (std::uint64_t seed, std::size_t depth, const trace_universe & universe = default_universe ());
}
