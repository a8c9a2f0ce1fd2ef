#pragma once

#include <findel/exec.hpp>

#include <deque>
#include <string>
#include <string_view>
#include <vector>

namespace findel {

// A registered contract body. Joins of contracts derived from it are only
// accepted while valid_from <= t <= valid_until.
struct description
{
	description_id id{ 0 };
	primitive_ptr body;
	timestamp valid_from{ 0 };
	timestamp valid_until{ t_max };

	bool operator== (const description & other) const;
};

enum class event_kind
{
	issued_for,
	executed,
	deleted,
};

std::string_view to_string (event_kind kind);

struct event
{
	event_kind kind{ event_kind::issued_for };
	contract_id contract{ 0 };
	address proposed_owner; // issued_for only

	bool operator== (const event &) const = default;
};

// The global execution environment: contracts C, descriptions D, balances
// B, time t, gateway G, fresh id i, ledger L, events E (newest first).
// States are immutable snapshots; transitions return new values.
struct marketplace_state
{
	std::vector<findel_contract> contracts;
	std::vector<description> descriptions;
	balance_table balances;
	timestamp time{ 0 };
	gateway gw;
	contract_id fresh_id{ 1 };
	ledger transfers;
	std::deque<event> events;

	bool operator== (const marketplace_state &) const = default;
};

enum class op_status
{
	ok,
	contract_deleted, // execution failed; the [Fail] rule removed the contract
	invalid_window,
	unknown_description,
	unknown_contract,
	not_proposed_owner,
	root_is_or,
	root_not_or,
	outside_window,
};

std::string_view to_string (op_status status);

// Rejections (every status except ok and contract_deleted) leave the
// returned state identical to the input.
struct step_result
{
	op_status status{ op_status::ok };
	exec_status exec_reason{ exec_status::ok }; // detail when contract_deleted
	std::uint64_t id{ 0 }; // new description or contract id
	marketplace_state state;

	bool ok () const
	{
		return status == op_status::ok;
	}
};

enum class or_branch
{
	left,
	right,
};

// Registers a description under the next description id.
step_result register_description (const marketplace_state & state, primitive_ptr body, timestamp valid_from = 0, timestamp valid_until = t_max);

// [Issue] Adds [i, dsc, primitive(dsc), issuer, issuer, proposed_owner, 1],
// increments the fresh id and prepends IssuedFor. Issuing entails no
// obligations: balances, ledger, time and gateway are untouched.
step_result issue (const marketplace_state & state, description_id dsc_id, const address & issuer, const address & proposed_owner);

// [Join] Checks, in order: the caller is the proposed owner, the root is
// not an Or, and the description window contains t; then executes the body
// with the caller as owner. Success removes the contract, adds the
// generated contracts and prepends Executed. A failed execution removes the
// contract and prepends Deleted, leaving balances, ledger and fresh id
// unchanged ([Fail]).
step_result join (const marketplace_state & state, contract_id id, const address & caller);

// [Join OR] Same as join for contracts whose root is Or; executes only the
// chosen branch.
step_result join_or (const marketplace_state & state, contract_id id, const address & caller, or_branch choice);

// [Tick] Advances global time by n. Nothing else changes.
step_result tick (const marketplace_state & state, std::uint64_t n = 1);

// Replaces the entry at source with (value, recorded_at = t).
step_result set_gateway (const marketplace_state & state, const address & source, const gateway_value & value);

// Read-only views.
mpz_class balance_of (const marketplace_state & state, const address & party, const currency & cur);
const findel_contract * find_contract (const marketplace_state & state, contract_id id);
const description * find_description (const marketplace_state & state, description_id id);
std::vector<event> events_chronological (const marketplace_state & state);

// Canonical textual rendering of a whole state; used for digests and
// debugging output.
std::string dump_state (const marketplace_state & state);
}
