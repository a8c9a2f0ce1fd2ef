#pragma once

#include <findel/ast.hpp>

#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

namespace findel {

using contract_id = std::uint64_t;
using description_id = std::uint64_t;

// Signed per-party, per-currency holdings. An absent entry is zero; zero
// entries are never stored, so map equality is semantic equality. Negative
// balances are permitted.
class balance_table
{
public:
	using entry_map = std::map<std::pair<address, currency>, mpz_class>;

	balance_table () = default;
	explicit balance_table (entry_map entries);

	mpz_class balance (const address & party, const currency & cur) const;
	void add (const address & party, const currency & cur, const mpz_class & amount);

	const entry_map & entries () const
	{
		return entries_;
	}

	bool operator== (const balance_table &) const = default;

private:
	entry_map entries_;
};

// One performed transaction. Self-transfers are recorded even though they
// do not move value; zero amounts are never recorded.
struct transfer_record
{
	contract_id contract{ 0 };
	address payer;
	address payee;
	nat amount{ 0 };
	currency cur;
	timestamp at{ 0 };

	bool operator== (const transfer_record &) const = default;
};

using ledger = std::vector<transfer_record>;

// Numeric-or-boolean external datum.
class gateway_value
{
public:
	static gateway_value number (nat value);
	static gateway_value boolean (bool value);

	bool is_number () const
	{
		return !boolean_;
	}
	bool is_boolean () const
	{
		return boolean_;
	}
	const nat & as_number () const
	{
		return number_;
	}
	bool as_boolean () const
	{
		return bool_;
	}

	bool operator== (const gateway_value &) const = default;

private:
	bool boolean_ = false;
	bool bool_ = false;
	nat number_{ 0 };
};

struct gateway_entry
{
	gateway_value value;
	timestamp recorded_at{ 0 };

	bool operator== (const gateway_entry &) const = default;
};

// External data source: at most one current entry per address. An entry is
// fresh at time t iff t - recorded_at <= freshness_window.
struct gateway
{
	std::map<address, gateway_entry> entries;
	std::uint64_t freshness_window = 10;

	const gateway_entry * find (const address & source) const;
	bool fresh (const gateway_entry & entry, timestamp now) const;

	bool operator== (const gateway &) const = default;
};

// A live contract [i, d, p, I, O, p_O, s].
struct findel_contract
{
	contract_id id{ 0 };
	description_id dsc_id{ 0 };
	primitive_ptr body;
	address issuer;
	address owner;
	address proposed_owner;
	nat scale{ 1 };

	bool operator== (const findel_contract & other) const;
};

enum class exec_status
{
	ok,
	expired,
	gateway_missing,
	gateway_stale,
	gateway_type_mismatch,
};

std::string_view to_string (exec_status status);

// Output tuple of exec: updated balances, generated contracts, next fresh
// id, updated ledger. On failure the state fields equal the inputs; a
// failed execution has no observable effect.
struct exec_result
{
	exec_status status{ exec_status::ok };
	balance_table balance;
	std::vector<findel_contract> generated;
	contract_id fresh_id{ 0 };
	ledger transfers;

	bool ok () const
	{
		return status == exec_status::ok;
	}
};

// Recursive execution of a primitive tree on behalf of contract c_id.
//   Zero       no effect
//   One        move `scale` units issuer -> owner, record the transfer
//   Scale      multiply scale by the constant factor
//   ScaleObs   multiply scale by a fresh numeric gateway value, else fail
//   Give       swap issuer and owner
//   And        left then right, threading all state
//   Or         no effect now; generate a contract owned by `owner`
//   If         branch on a fresh boolean gateway value, else fail
//   Timebound  fail when now > t1; generate a postponed contract when
//              t0 > now; execute the body otherwise
// Postponed and Or contracts carry the accumulated scale and set
// proposed_owner = owner. Execution is all-or-nothing.
exec_result exec (const primitive & body, contract_id c_id, description_id dsc_id, const nat & scale, const address & issuer, const address & owner, timestamp now, const gateway & gw, const balance_table & balance, const ledger & transfers, contract_id fresh_id);
}
