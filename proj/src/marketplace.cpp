#include <findel/marketplace.hpp>
#include <findel/parser.hpp>

#include <algorithm>
#include <stdexcept>
#include <sstream>

namespace findel {

bool description::operator== (const description & other) const
{
	return id == other.id && equal (body, other.body) && valid_from == other.valid_from && valid_until == other.valid_until;
}

std::string_view to_string (event_kind kind)
{
	switch (kind)
	{
		case event_kind::issued_for:
			return "IssuedFor";
		case event_kind::executed:
			return "Executed";
		case event_kind::deleted:
			return "Deleted";
	}
	return "?";
}

std::string_view to_string (op_status status)
{
	switch (status)
	{
		case op_status::ok:
			return "ok";
		case op_status::contract_deleted:
			return "contract_deleted";
		case op_status::invalid_window:
			return "invalid_window";
		case op_status::unknown_description:
			return "unknown_description";
		case op_status::unknown_contract:
			return "unknown_contract";
		case op_status::not_proposed_owner:
			return "not_proposed_owner";
		case op_status::root_is_or:
			return "root_is_or";
		case op_status::root_not_or:
			return "root_not_or";
		case op_status::outside_window:
			return "outside_window";
	}
	return "?";
}

step_result register_description (const marketplace_state & state, primitive_ptr body, timestamp valid_from, timestamp valid_until)
{
	if (!body)
	{
		throw std::invalid_argument ("description body must be non-null");
	}
	step_result result;
	result.state = state;
	if (valid_from > valid_until)
	{
		result.status = op_status::invalid_window;
		return result;
	}
	description dsc;
	dsc.id = state.descriptions.size () + 1;
	dsc.body = std::move (body);
	dsc.valid_from = valid_from;
	dsc.valid_until = valid_until;
	result.id = dsc.id;
	result.state.descriptions.push_back (std::move (dsc));
	return result;
}

step_result issue (const marketplace_state & state, description_id dsc_id, const address & issuer, const address & proposed_owner)
{
	step_result result;
	result.state = state;
	auto dsc = find_description (state, dsc_id);
	if (dsc == nullptr)
	{
		result.status = op_status::unknown_description;
		return result;
	}
	findel_contract contract;
	contract.id = state.fresh_id;
	contract.dsc_id = dsc_id;
	contract.body = dsc->body;
	contract.issuer = issuer;
	contract.owner = issuer;
	contract.proposed_owner = proposed_owner;
	contract.scale = 1;
	result.id = contract.id;
	result.state.contracts.push_back (std::move (contract));
	result.state.fresh_id = state.fresh_id + 1;
	result.state.events.push_front ({ event_kind::issued_for, result.id, proposed_owner });
	return result;
}

namespace
{
	step_result join_impl (const marketplace_state & state, contract_id id, const address & caller, bool root_must_be_or, or_branch choice)
	{
		step_result result;
		result.state = state;
		auto contract = find_contract (state, id);
		if (contract == nullptr)
		{
			result.status = op_status::unknown_contract;
			return result;
		}
		// (A) the caller is the proposed owner
		if (caller != contract->proposed_owner)
		{
			result.status = op_status::not_proposed_owner;
			return result;
		}
		// (B) plain join refuses an Or root; join_or requires one
		auto root_is_or = contract->body && contract->body->kind == prim_kind::or_;
		if (!root_must_be_or && root_is_or)
		{
			result.status = op_status::root_is_or;
			return result;
		}
		if (root_must_be_or && !root_is_or)
		{
			result.status = op_status::root_not_or;
			return result;
		}
		// (C) the description window contains the current time
		auto dsc = find_description (state, contract->dsc_id);
		if (dsc == nullptr)
		{
			result.status = op_status::unknown_description;
			return result;
		}
		if (state.time < dsc->valid_from || state.time > dsc->valid_until)
		{
			result.status = op_status::outside_window;
			return result;
		}
		// (D) execute; join_or executes only the chosen branch
		const auto & body = root_must_be_or ? (choice == or_branch::left ? *contract->body->left : *contract->body->right) : *contract->body;
		auto executed = exec (body, contract->id, contract->dsc_id, contract->scale, contract->issuer, caller, state.time, state.gw, state.balances, state.transfers, state.fresh_id);
		auto erase_joined = [&] {
			auto & contracts = result.state.contracts;
			contracts.erase (std::find_if (contracts.begin (), contracts.end (), [&] (const findel_contract & existing) {
				return existing.id == id;
			}));
		};
		result.id = id;
		if (!executed.ok ())
		{
			// [Fail] the contract is deleted; balances, ledger and fresh id
			// stay as they were.
			erase_joined ();
			result.state.events.push_front ({ event_kind::deleted, id, {} });
			result.status = op_status::contract_deleted;
			result.exec_reason = executed.status;
			return result;
		}
		erase_joined ();
		for (auto & generated : executed.generated)
		{
			result.state.contracts.push_back (std::move (generated));
		}
		result.state.balances = std::move (executed.balance);
		result.state.transfers = std::move (executed.transfers);
		result.state.fresh_id = executed.fresh_id;
		result.state.events.push_front ({ event_kind::executed, id, {} });
		return result;
	}
}

step_result join (const marketplace_state & state, contract_id id, const address & caller)
{
	return join_impl (state, id, caller, false, or_branch::left);
}

step_result join_or (const marketplace_state & state, contract_id id, const address & caller, or_branch choice)
{
	return join_impl (state, id, caller, true, choice);
}

step_result tick (const marketplace_state & state, std::uint64_t n)
{
	step_result result;
	result.state = state;
	result.state.time = sat_add (state.time, n);
	return result;
}

step_result set_gateway (const marketplace_state & state, const address & source, const gateway_value & value)
{
	step_result result;
	result.state = state;
	result.state.gw.entries[source] = { value, state.time };
	return result;
}

mpz_class balance_of (const marketplace_state & state, const address & party, const currency & cur)
{
	return state.balances.balance (party, cur);
}

const findel_contract * find_contract (const marketplace_state & state, contract_id id)
{
	auto existing = std::find_if (state.contracts.begin (), state.contracts.end (), [&] (const findel_contract & contract) {
		return contract.id == id;
	});
	return existing == state.contracts.end () ? nullptr : &*existing;
}

const description * find_description (const marketplace_state & state, description_id id)
{
	auto existing = std::find_if (state.descriptions.begin (), state.descriptions.end (), [&] (const description & dsc) {
		return dsc.id == id;
	});
	return existing == state.descriptions.end () ? nullptr : &*existing;
}

std::vector<event> events_chronological (const marketplace_state & state)
{
	return { state.events.rbegin (), state.events.rend () };
}

std::string dump_state (const marketplace_state & state)
{
	std::ostringstream os;
	os << "time " << state.time << "\n";
	os << "fresh_id " << state.fresh_id << "\n";
	for (const auto & dsc : state.descriptions)
	{
		os << "description " << dsc.id << " window [" << dsc.valid_from << ", " << dsc.valid_until << "] " << pretty_print (dsc.body) << "\n";
	}
	for (const auto & contract : state.contracts)
	{
		os << "contract " << contract.id << " dsc " << contract.dsc_id << " issuer " << contract.issuer.value << " owner " << contract.owner.value << " proposed " << contract.proposed_owner.value << " scale " << contract.scale.get_str () << " " << pretty_print (contract.body) << "\n";
	}
	for (const auto & [key, amount] : state.balances.entries ())
	{
		os << "balance " << key.first.value << " " << key.second.symbol << " " << amount.get_str () << "\n";
	}
	for (const auto & [source, entry] : state.gw.entries)
	{
		os << "gateway " << source.value << " = ";
		if (entry.value.is_boolean ())
		{
			os << (entry.value.as_boolean () ? "true" : "false");
		}
		else
		{
			os << entry.value.as_number ().get_str ();
		}
		os << " at " << entry.recorded_at << "\n";
	}
	for (const auto & record : state.transfers)
	{
		os << "transfer " << record.payer.value << " -> " << record.payee.value << " " << record.amount.get_str () << " " << record.cur.symbol << " contract " << record.contract << " at " << record.at << "\n";
	}
	for (const auto & ev : state.events)
	{
		os << "event " << to_string (ev.kind) << " " << ev.contract;
		if (ev.kind == event_kind::issued_for)
		{
			os << " for " << ev.proposed_owner.value;
		}
		os << "\n";
	}
	return os.str ();
}
}
