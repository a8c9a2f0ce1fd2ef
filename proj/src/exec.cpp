#include <findel/exec.hpp>

#include <stdexcept>

namespace findel {

balance_table::balance_table (entry_map entries) :
	entries_ (std::move (entries))
{
	for (auto it = entries_.begin (); it != entries_.end ();)
	{
		if (it->second == 0)
		{
			it = entries_.erase (it);
		}
		else
		{
			++it;
		}
	}
}

mpz_class balance_table::balance (const address & party, const currency & cur) const
{
	auto existing = entries_.find ({ party, cur });
	return existing == entries_.end () ? mpz_class (0) : existing->second;
}

void balance_table::add (const address & party, const currency & cur, const mpz_class & amount)
{
	if (amount == 0)
	{
		return;
	}
	auto [it, inserted] = entries_.try_emplace ({ party, cur }, amount);
	if (!inserted)
	{
		it->second += amount;
		if (it->second == 0)
		{
			entries_.erase (it);
		}
	}
}

gateway_value gateway_value::number (nat value)
{
	if (value < 0)
	{
		throw std::invalid_argument ("gateway numbers are natural values");
	}
	gateway_value result;
	result.number_ = std::move (value);
	return result;
}

gateway_value gateway_value::boolean (bool value)
{
	gateway_value result;
	result.boolean_ = true;
	result.bool_ = value;
	return result;
}

const gateway_entry * gateway::find (const address & source) const
{
	auto existing = entries.find (source);
	return existing == entries.end () ? nullptr : &existing->second;
}

bool gateway::fresh (const gateway_entry & entry, timestamp now) const
{
	if (now <= entry.recorded_at)
	{
		return true;
	}
	return now - entry.recorded_at <= freshness_window;
}

bool findel_contract::operator== (const findel_contract & other) const
{
	return id == other.id && dsc_id == other.dsc_id && equal (body, other.body) && issuer == other.issuer && owner == other.owner && proposed_owner == other.proposed_owner && scale == other.scale;
}

std::string_view to_string (exec_status status)
{
	switch (status)
	{
		case exec_status::ok:
			return "ok";
		case exec_status::expired:
			return "expired";
		case exec_status::gateway_missing:
			return "gateway_missing";
		case exec_status::gateway_stale:
			return "gateway_stale";
		case exec_status::gateway_type_mismatch:
			return "gateway_type_mismatch";
	}
	return "?";
}

namespace
{
	struct exec_frame
	{
		contract_id c_id;
		description_id dsc_id;
		timestamp now;
		const gateway & gw;
	};

	struct exec_state
	{
		balance_table balance;
		std::vector<findel_contract> generated;
		contract_id fresh_id;
		ledger transfers;
	};

	exec_status lookup (const exec_frame & frame, const address & source, bool want_number, const gateway_entry *& out)
	{
		auto entry = frame.gw.find (source);
		if (entry == nullptr)
		{
			return exec_status::gateway_missing;
		}
		if (!frame.gw.fresh (*entry, frame.now))
		{
			return exec_status::gateway_stale;
		}
		if (want_number != entry->value.is_number ())
		{
			return exec_status::gateway_type_mismatch;
		}
		out = entry;
		return exec_status::ok;
	}

	exec_status run (const primitive & node, const exec_frame & frame, const address & issuer, const address & owner, const nat & scale, exec_state & state)
	{
		switch (node.kind)
		{
			case prim_kind::zero:
				return exec_status::ok;
			case prim_kind::one:
				state.balance.add (issuer, node.cur, -scale);
				state.balance.add (owner, node.cur, scale);
				if (scale > 0)
				{
					state.transfers.push_back ({ frame.c_id, issuer, owner, scale, node.cur, frame.now });
				}
				return exec_status::ok;
			case prim_kind::scale:
				return run (*node.left, frame, issuer, owner, scale * node.factor, state);
			case prim_kind::scale_obs:
			{
				const gateway_entry * entry = nullptr;
				auto status = lookup (frame, node.source, true, entry);
				if (status != exec_status::ok)
				{
					return status;
				}
				return run (*node.left, frame, issuer, owner, scale * entry->value.as_number (), state);
			}
			case prim_kind::give:
				return run (*node.left, frame, owner, issuer, scale, state);
			case prim_kind::and_:
			{
				auto status = run (*node.left, frame, issuer, owner, scale, state);
				if (status != exec_status::ok)
				{
					return status;
				}
				return run (*node.right, frame, issuer, owner, scale, state);
			}
			case prim_kind::or_:
			{
				findel_contract generated;
				generated.id = state.fresh_id++;
				generated.dsc_id = frame.dsc_id;
				generated.body = prim::or_ (node.left, node.right);
				generated.issuer = issuer;
				generated.owner = owner;
				generated.proposed_owner = owner;
				generated.scale = scale;
				state.generated.push_back (std::move (generated));
				return exec_status::ok;
			}
			case prim_kind::if_:
			{
				const gateway_entry * entry = nullptr;
				auto status = lookup (frame, node.source, false, entry);
				if (status != exec_status::ok)
				{
					return status;
				}
				return run (entry->value.as_boolean () ? *node.left : *node.right, frame, issuer, owner, scale, state);
			}
			case prim_kind::timebound:
				if (frame.now > node.t1)
				{
					return exec_status::expired;
				}
				if (node.t0 > frame.now)
				{
					findel_contract generated;
					generated.id = state.fresh_id++;
					generated.dsc_id = frame.dsc_id;
					generated.body = prim::timebound (node.t0, node.t1, node.left);
					generated.issuer = issuer;
					generated.owner = owner;
					generated.proposed_owner = owner;
					generated.scale = scale;
					state.generated.push_back (std::move (generated));
					return exec_status::ok;
				}
				return run (*node.left, frame, issuer, owner, scale, state);
		}
		return exec_status::ok;
	}
}

exec_result exec (const primitive & body, contract_id c_id, description_id dsc_id, const nat & scale, const address & issuer, const address & owner, timestamp now, const gateway & gw, const balance_table & balance, const ledger & transfers, contract_id fresh_id)
{
	exec_frame frame{ c_id, dsc_id, now, gw };
	exec_state state{ balance, {}, fresh_id, transfers };
	auto status = run (body, frame, issuer, owner, scale, state);
	exec_result result;
	result.status = status;
	if (status == exec_status::ok)
	{
		result.balance = std::move (state.balance);
		result.generated = std::move (state.generated);
		result.fresh_id = state.fresh_id;
		result.transfers = std::move (state.transfers);
	}
	else
	{
		// Failure discards the working state entirely.
		result.balance = balance;
		result.fresh_id = fresh_id;
		result.transfers = transfers;
	}
	return result;
}
}
