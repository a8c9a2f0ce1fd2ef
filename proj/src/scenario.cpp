#include <findel/oracle.hpp>
#include <findel/parser.hpp>
#include <findel/scenario.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace findel::scenario {
namespace {
	std::vector<std::string> split_tokens (std::string_view line)
	{
		std::vector<std::string> tokens;
		std::size_t pos = 0;
		while (pos < line.size ())
		{
			while (pos < line.size () && (line[pos] == ' ' || line[pos] == '\t'))
			{
				++pos;
			}
			auto start = pos;
			while (pos < line.size () && line[pos] != ' ' && line[pos] != '\t')
			{
				++pos;
			}
			if (pos > start)
			{
				tokens.emplace_back (line.substr (start, pos - start));
			}
		}
		return tokens;
	}

	std::string trim (std::string_view text)
	{
		auto begin = text.find_first_not_of (" \t\r");
		auto end = text.find_last_not_of (" \t\r");
		if (begin == std::string_view::npos)
		{
			return {};
		}
		return std::string (text.substr (begin, end - begin + 1));
	}

	bool is_identifier (std::string_view text)
	{
		if (text.empty ())
		{
			return false;
		}
		auto head = text.front ();
		if (!((head >= 'A' && head <= 'Z') || (head >= 'a' && head <= 'z') || head == '_'))
		{
			return false;
		}
		return std::all_of (text.begin (), text.end (), [] (char ch) {
			return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
		});
	}

	bool is_digits (std::string_view text)
	{
		return !text.empty () && std::all_of (text.begin (), text.end (), [] (char ch) {
			return ch >= '0' && ch <= '9';
		});
	}

	bool parse_u64 (std::string_view text, std::uint64_t & out)
	{
		auto [ptr, ec] = std::from_chars (text.data (), text.data () + text.size (), out);
		return ec == std::errc{} && ptr == text.data () + text.size ();
	}

	// "not_proposed_owner", "NotProposedOwner" and "notproposedowner" all
	// name the same error.
	std::string normalize_error_name (std::string_view name)
	{
		std::string out;
		for (auto ch : name)
		{
			if (ch == '_')
			{
				continue;
			}
			out.push_back (ch >= 'A' && ch <= 'Z' ? static_cast<char> (ch - 'A' + 'a') : ch);
		}
		return out;
	}

	const std::set<std::string> & known_error_names ()
	{
		static const std::set<std::string> names = {
			"invalidwindow",
			"unknowndescription",
			"unknowncontract",
			"notproposedowner",
			"rootisor",
			"rootnotor",
			"outsidewindow",
			"expired",
			"gatewaymissing",
			"gatewaystale",
			"gatewaytypemismatch",
		};
		return names;
	}

	bool valid_contract_ref (std::string_view ref)
	{
		// <label>(.gen<N>)*
		std::vector<std::string_view> segments;
		std::size_t start = 0;
		while (start <= ref.size ())
		{
			auto dot = ref.find ('.', start);
			auto end = dot == std::string_view::npos ? ref.size () : dot;
			segments.push_back (ref.substr (start, end - start));
			if (dot == std::string_view::npos)
			{
				break;
			}
			start = dot + 1;
		}
		if (segments.empty () || !is_identifier (segments.front ()))
		{
			return false;
		}
		for (std::size_t index = 1; index < segments.size (); ++index)
		{
			auto segment = segments[index];
			if (segment.size () < 4 || segment.substr (0, 3) != "gen" || !is_digits (segment.substr (3)))
			{
				return false;
			}
		}
		return true;
	}

	std::string ref_base (std::string_view ref)
	{
		return std::string (ref.substr (0, ref.find ('.')));
	}

	std::uint64_t fnv1a64 (std::string_view text)
	{
		std::uint64_t hash = 0xcbf29ce484222325ull;
		for (unsigned char ch : text)
		{
			hash ^= ch;
			hash *= 0x100000001b3ull;
		}
		return hash;
	}

	std::string state_digest (const marketplace_state & state)
	{
		std::ostringstream os;
		os << std::hex << fnv1a64 (dump_state (state));
		return os.str ();
	}

	struct line_parser
	{
		delta at_delta;
		std::set<std::string> desc_labels;
		std::set<std::string> contract_labels;
		std::optional<std::string> pending_expect;
		std::optional<scenario_parse_error> error;

		void fail (std::size_t line, std::string message)
		{
			if (!error)
			{
				error = scenario_parse_error{ line, std::move (message) };
			}
		}

		bool check_ref (const command & cmd, const std::string & ref)
		{
			if (!valid_contract_ref (ref))
			{
				fail (cmd.line, "malformed contract reference '@" + ref + "'");
				return false;
			}
			// Under expect the reference may be left unbound; it then fails
			// at run time with the error the author is waiting for.
			if (!cmd.expected_error && contract_labels.count (ref_base (ref)) == 0)
			{
				fail (cmd.line, "contract label '@" + ref + "' used before being bound by an issue");
				return false;
			}
			return true;
		}

		std::optional<command> parse_line (std::size_t line_number, const std::string & text)
		{
			command cmd;
			cmd.line = line_number;
			cmd.text = text;
			cmd.expected_error = pending_expect;
			auto tokens = split_tokens (text);
			if (tokens[0] == "expect")
			{
				// expect <error-name>: <command>
				auto colon = text.find (':');
				if (pending_expect || tokens.size () < 2 || colon == std::string::npos)
				{
					fail (line_number, "expected 'expect <error-name>: <command>'");
					return std::nullopt;
				}
				auto name = trim (text.substr (6, colon - 6));
				auto normalized = normalize_error_name (name);
				if (known_error_names ().count (normalized) == 0)
				{
					fail (line_number, "unknown error name '" + name + "'");
					return std::nullopt;
				}
				auto wrapped = trim (text.substr (colon + 1));
				if (wrapped.empty ())
				{
					fail (line_number, "expect wraps an empty command");
					return std::nullopt;
				}
				pending_expect = normalized;
				auto inner = parse_line (line_number, wrapped);
				pending_expect.reset ();
				if (!inner)
				{
					return std::nullopt;
				}
				switch (inner->kind)
				{
					case command_kind::desc:
					case command_kind::issue:
					case command_kind::join:
					case command_kind::join_or:
					case command_kind::tick:
					case command_kind::gateway:
						break;
					default:
						fail (line_number, "expect can only wrap a mutating command");
						return std::nullopt;
				}
				inner->text = text;
				return inner;
			}
			if (tokens[0] == "desc")
			{
				return parse_desc (cmd, text, tokens);
			}
			if (tokens[0] == "issue")
			{
				return parse_issue (cmd, tokens);
			}
			if (tokens[0] == "join")
			{
				return parse_join (cmd, tokens, false);
			}
			if (tokens[0] == "joinor")
			{
				return parse_join (cmd, tokens, true);
			}
			if (tokens[0] == "tick")
			{
				return parse_tick (cmd, tokens);
			}
			if (tokens[0] == "gateway")
			{
				return parse_gateway (cmd, tokens);
			}
			if (tokens[0] == "assert")
			{
				return parse_assert (cmd, tokens);
			}
			fail (line_number, "unknown command '" + tokens[0] + "'");
			return std::nullopt;
		}

		std::optional<command> parse_desc (command cmd, const std::string & text, const std::vector<std::string> & tokens)
		{
			cmd.kind = command_kind::desc;
			if (tokens.size () < 4 || tokens[2] != "=")
			{
				fail (cmd.line, "expected 'desc <label> = <expr> [window <t0> <t1>]'");
				return std::nullopt;
			}
			if (!is_identifier (tokens[1]))
			{
				fail (cmd.line, "invalid description label '" + tokens[1] + "'");
				return std::nullopt;
			}
			cmd.desc_label = tokens[1];
			if (desc_labels.count (cmd.desc_label) != 0)
			{
				fail (cmd.line, "description label '" + cmd.desc_label + "' is already defined");
				return std::nullopt;
			}
			auto expr = trim (text.substr (text.find ('=') + 1));
			// Optional trailing: window <t0> <t1>
			auto n = tokens.size ();
			if (n >= 6 && tokens[n - 3] == "window" && is_digits (tokens[n - 2]) && is_digits (tokens[n - 1]))
			{
				if (!parse_u64 (tokens[n - 2], cmd.valid_from) || !parse_u64 (tokens[n - 1], cmd.valid_until))
				{
					fail (cmd.line, "window bound out of range");
					return std::nullopt;
				}
				auto window_at = expr.rfind ("window");
				expr = trim (expr.substr (0, window_at));
			}
			auto parsed = parse (expr, at_delta);
			if (!parsed.ok ())
			{
				fail (cmd.line, "bad findel expression: " + parsed.error->to_string ());
				return std::nullopt;
			}
			cmd.body = parsed.tree;
			desc_labels.insert (cmd.desc_label);
			return cmd;
		}

		std::optional<command> parse_issue (command cmd, const std::vector<std::string> & tokens)
		{
			cmd.kind = command_kind::issue;
			if (tokens.size () != 7 || tokens[2] != "for" || tokens[5] != "as")
			{
				fail (cmd.line, "expected 'issue <issuer> for <owner> <label> as <clabel>'");
				return std::nullopt;
			}
			if (!is_identifier (tokens[1]) || !is_identifier (tokens[3]) || !is_identifier (tokens[4]) || !is_identifier (tokens[6]))
			{
				fail (cmd.line, "issue arguments must be plain identifiers");
				return std::nullopt;
			}
			cmd.issuer = address (tokens[1]);
			cmd.proposed_owner = address (tokens[3]);
			cmd.desc_label = tokens[4];
			cmd.contract_label = tokens[6];
			if (!cmd.expected_error && desc_labels.count (cmd.desc_label) == 0)
			{
				fail (cmd.line, "description label '" + cmd.desc_label + "' used before being defined");
				return std::nullopt;
			}
			if (contract_labels.count (cmd.contract_label) != 0)
			{
				fail (cmd.line, "contract label '" + cmd.contract_label + "' is already bound");
				return std::nullopt;
			}
			contract_labels.insert (cmd.contract_label);
			return cmd;
		}

		std::optional<command> parse_join (command cmd, const std::vector<std::string> & tokens, bool with_branch)
		{
			cmd.kind = with_branch ? command_kind::join_or : command_kind::join;
			auto expected_size = with_branch ? std::size_t{ 4 } : std::size_t{ 3 };
			if (tokens.size () != expected_size || tokens[2].size () < 2 || tokens[2][0] != '@')
			{
				fail (cmd.line, with_branch ? "expected 'joinor <party> @<clabel> <left|right>'" : "expected 'join <party> @<clabel>'");
				return std::nullopt;
			}
			if (!is_identifier (tokens[1]))
			{
				fail (cmd.line, "invalid party '" + tokens[1] + "'");
				return std::nullopt;
			}
			cmd.caller = address (tokens[1]);
			cmd.contract_ref = tokens[2].substr (1);
			if (with_branch)
			{
				if (tokens[3] == "left")
				{
					cmd.branch = or_branch::left;
				}
				else if (tokens[3] == "right")
				{
					cmd.branch = or_branch::right;
				}
				else
				{
					fail (cmd.line, "branch must be 'left' or 'right'");
					return std::nullopt;
				}
			}
			if (!check_ref (cmd, cmd.contract_ref))
			{
				return std::nullopt;
			}
			return cmd;
		}

		std::optional<command> parse_tick (command cmd, const std::vector<std::string> & tokens)
		{
			cmd.kind = command_kind::tick;
			if (tokens.size () != 2)
			{
				fail (cmd.line, "expected 'tick <n|1yr>'");
				return std::nullopt;
			}
			if (tokens[1] == "1yr")
			{
				cmd.count_is_year = true;
				return cmd;
			}
			if (!is_digits (tokens[1]) || !parse_u64 (tokens[1], cmd.count))
			{
				fail (cmd.line, "tick count must be a number or '1yr'");
				return std::nullopt;
			}
			return cmd;
		}

		std::optional<command> parse_gateway (command cmd, const std::vector<std::string> & tokens)
		{
			cmd.kind = command_kind::gateway;
			if (tokens.size () != 4 || tokens[2] != "=" || !is_identifier (tokens[1]))
			{
				fail (cmd.line, "expected 'gateway <addr> = <number|true|false>'");
				return std::nullopt;
			}
			cmd.source = address (tokens[1]);
			if (tokens[3] == "true" || tokens[3] == "false")
			{
				cmd.value = gateway_value::boolean (tokens[3] == "true");
			}
			else if (is_digits (tokens[3]))
			{
				cmd.value = gateway_value::number (nat (tokens[3], 10));
			}
			else
			{
				fail (cmd.line, "gateway value must be a number, 'true' or 'false'");
				return std::nullopt;
			}
			return cmd;
		}

		std::optional<command> parse_assert (command cmd, const std::vector<std::string> & tokens)
		{
			if (tokens.size () == 5 && tokens[1] == "balance")
			{
				cmd.kind = command_kind::assert_balance;
				if (!is_identifier (tokens[2]))
				{
					fail (cmd.line, "invalid party '" + tokens[2] + "'");
					return std::nullopt;
				}
				if (!valid_currency (tokens[3]))
				{
					fail (cmd.line, "invalid currency '" + tokens[3] + "'");
					return std::nullopt;
				}
				cmd.party = address (tokens[2]);
				cmd.cur = currency (tokens[3]);
				const auto & amount = tokens[4];
				auto negative = amount.size () > 1 && amount[0] == '-';
				auto digits = amount.substr (amount.size () > 1 && (amount[0] == '-' || amount[0] == '+') ? 1 : 0);
				if (!is_digits (digits))
				{
					fail (cmd.line, "invalid amount '" + amount + "'");
					return std::nullopt;
				}
				cmd.expected_amount = mpz_class (digits, 10);
				if (negative)
				{
					cmd.expected_amount = -cmd.expected_amount;
				}
				return cmd;
			}
			if (tokens.size () == 4 && tokens[1] == "event")
			{
				cmd.kind = command_kind::assert_event;
				if (tokens[2] == "issuedfor")
				{
					cmd.expected_event = event_kind::issued_for;
				}
				else if (tokens[2] == "executed")
				{
					cmd.expected_event = event_kind::executed;
				}
				else if (tokens[2] == "deleted")
				{
					cmd.expected_event = event_kind::deleted;
				}
				else
				{
					fail (cmd.line, "event kind must be issuedfor, executed or deleted");
					return std::nullopt;
				}
				if (tokens[3].size () < 2 || tokens[3][0] != '@')
				{
					fail (cmd.line, "expected a contract reference '@<clabel>'");
					return std::nullopt;
				}
				cmd.contract_ref = tokens[3].substr (1);
				if (!check_ref (cmd, cmd.contract_ref))
				{
					return std::nullopt;
				}
				return cmd;
			}
			if (tokens.size () == 3 && (tokens[1] == "live" || tokens[1] == "gone"))
			{
				cmd.kind = command_kind::assert_live;
				cmd.expect_live = tokens[1] == "live";
				if (tokens[2].size () < 2 || tokens[2][0] != '@')
				{
					fail (cmd.line, "expected a contract reference '@<clabel>'");
					return std::nullopt;
				}
				cmd.contract_ref = tokens[2].substr (1);
				if (!check_ref (cmd, cmd.contract_ref))
				{
					return std::nullopt;
				}
				return cmd;
			}
			fail (cmd.line, "expected 'assert balance|event|live|gone ...'");
			return std::nullopt;
		}
	};
}

std::string scenario_parse_error::to_string () const
{
	return "line " + std::to_string (line) + ": " + message;
}

parse_outcome parse_scenario (std::string_view text, delta d)
{
	parse_outcome outcome;
	line_parser parser;
	parser.at_delta = d;
	std::size_t line_number = 0;
	std::size_t pos = 0;
	while (pos <= text.size ())
	{
		auto eol = text.find ('\n', pos);
		auto raw = text.substr (pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
		pos = eol == std::string_view::npos ? text.size () + 1 : eol + 1;
		++line_number;
		auto hash = raw.find ('#');
		auto line = trim (hash == std::string_view::npos ? raw : raw.substr (0, hash));
		if (line.empty ())
		{
			continue;
		}
		auto cmd = parser.parse_line (line_number, line);
		if (!cmd)
		{
			outcome.error = parser.error;
			return outcome;
		}
		outcome.commands.push_back (std::move (*cmd));
	}
	return outcome;
}

namespace
{
	struct runner
	{
		config cfg;
		marketplace_state state;
		std::map<std::string, description_id> desc_ids;
		std::map<std::string, contract_id> contract_ids;
		trace_report report;

		explicit runner (const config & cfg_a) :
			cfg (cfg_a)
		{
			state.gw.freshness_window = cfg.freshness_window;
		}

		void failure (const command & cmd, const std::string & message)
		{
			report.failures.push_back ("line " + std::to_string (cmd.line) + ": " + message);
			report.pass = false;
		}

		// Unbound references resolve to id 0, which no contract ever has;
		// under expect this produces the unknown_contract the author wants.
		contract_id resolve (const std::string & ref)
		{
			auto existing = contract_ids.find (ref);
			return existing == contract_ids.end () ? 0 : existing->second;
		}

		void record (const command & cmd, std::string outcome)
		{
			report.steps.push_back ({ cmd.text, std::move (outcome), state_digest (state) });
		}

		void check_consistency (const command & cmd)
		{
			for (const auto & v : oracle::check_state (state))
			{
				failure (cmd, std::string ("consistency violation [") + std::string (oracle::to_string (v.kind)) + "] " + v.detail);
			}
		}

		std::string apply_mutation (const command & cmd, const step_result & result)
		{
			auto error_name = normalize_error_name (to_string (result.status));
			auto reason_name = normalize_error_name (to_string (result.exec_reason));
			std::string outcome;
			if (result.status == op_status::ok)
			{
				outcome = "ok";
			}
			else if (result.status == op_status::contract_deleted)
			{
				outcome = "deleted (" + std::string (to_string (result.exec_reason)) + ")";
			}
			else
			{
				outcome = "rejected (" + std::string (to_string (result.status)) + ")";
			}
			if (cmd.expected_error)
			{
				auto matched = (result.status != op_status::ok && result.status != op_status::contract_deleted && error_name == *cmd.expected_error) || (result.status == op_status::contract_deleted && reason_name == *cmd.expected_error);
				if (matched)
				{
					outcome += " as expected";
				}
				else
				{
					failure (cmd, "expected error '" + *cmd.expected_error + "' but got '" + (result.status == op_status::ok ? "ok" : (result.status == op_status::contract_deleted ? reason_name : error_name)) + "'");
				}
			}
			else if (result.status != op_status::ok && result.status != op_status::contract_deleted)
			{
				failure (cmd, "command rejected (" + std::string (to_string (result.status)) + ")");
			}
			state = result.state;
			check_consistency (cmd);
			return outcome;
		}

		void run (const command & cmd)
		{
			switch (cmd.kind)
			{
				case command_kind::desc:
				{
					auto result = register_description (state, cmd.body, cmd.valid_from, cmd.valid_until);
					auto outcome = apply_mutation (cmd, result);
					if (result.ok ())
					{
						desc_ids[cmd.desc_label] = result.id;
						outcome += " dsc=" + std::to_string (result.id);
					}
					record (cmd, outcome);
					break;
				}
				case command_kind::issue:
				{
					auto dsc = desc_ids.find (cmd.desc_label);
					auto dsc_id = dsc == desc_ids.end () ? description_id{ 0 } : dsc->second;
					auto result = issue (state, dsc_id, cmd.issuer, cmd.proposed_owner);
					auto outcome = apply_mutation (cmd, result);
					if (result.ok ())
					{
						contract_ids[cmd.contract_label] = result.id;
						outcome += " contract=" + std::to_string (result.id);
					}
					record (cmd, outcome);
					break;
				}
				case command_kind::join:
				case command_kind::join_or:
				{
					auto id = resolve (cmd.contract_ref);
					auto fresh_before = state.fresh_id;
					auto result = cmd.kind == command_kind::join ? join (state, id, cmd.caller) : join_or (state, id, cmd.caller, cmd.branch);
					auto outcome = apply_mutation (cmd, result);
					if (result.ok ())
					{
						// Generated contracts take the consecutive ids
						// [fresh_before, fresh_after), in generation order.
						for (auto generated = fresh_before; generated < result.state.fresh_id; ++generated)
						{
							contract_ids[cmd.contract_ref + ".gen" + std::to_string (generated - fresh_before)] = generated;
						}
						if (result.state.fresh_id > fresh_before)
						{
							outcome += " generated=" + std::to_string (result.state.fresh_id - fresh_before);
						}
					}
					record (cmd, outcome);
					break;
				}
				case command_kind::tick:
				{
					auto result = tick (state, cmd.count_is_year ? cfg.year_length : cmd.count);
					record (cmd, apply_mutation (cmd, result));
					break;
				}
				case command_kind::gateway:
				{
					auto result = set_gateway (state, cmd.source, cmd.value);
					record (cmd, apply_mutation (cmd, result));
					break;
				}
				case command_kind::assert_balance:
				{
					auto actual = balance_of (state, cmd.party, cmd.cur);
					if (actual == cmd.expected_amount)
					{
						record (cmd, "pass");
					}
					else
					{
						failure (cmd, "balance of " + cmd.party.value + " in " + cmd.cur.symbol + " is " + actual.get_str () + ", expected " + cmd.expected_amount.get_str ());
						record (cmd, "fail");
					}
					break;
				}
				case command_kind::assert_event:
				{
					auto id = resolve (cmd.contract_ref);
					auto found = std::any_of (state.events.begin (), state.events.end (), [&] (const event & ev) {
						return ev.kind == cmd.expected_event && ev.contract == id;
					});
					if (id != 0 && found)
					{
						record (cmd, "pass");
					}
					else
					{
						failure (cmd, "no " + std::string (to_string (cmd.expected_event)) + " event for @" + cmd.contract_ref);
						record (cmd, "fail");
					}
					break;
				}
				case command_kind::assert_live:
				{
					auto id = resolve (cmd.contract_ref);
					auto live = id != 0 && find_contract (state, id) != nullptr;
					if (live == cmd.expect_live && (id != 0 || !cmd.expect_live))
					{
						record (cmd, "pass");
					}
					else
					{
						failure (cmd, "@" + cmd.contract_ref + " is " + (live ? "live" : "gone") + ", expected " + (cmd.expect_live ? "live" : "gone"));
						record (cmd, "fail");
					}
					break;
				}
			}
		}
	};
}

trace_report run_scenario (const std::vector<command> & commands, const config & cfg)
{
	runner r (cfg);
	for (const auto & cmd : commands)
	{
		r.run (cmd);
	}
	return r.report;
}

std::string to_text (const trace_report & report)
{
	std::ostringstream os;
	for (std::size_t index = 0; index < report.steps.size (); ++index)
	{
		const auto & step = report.steps[index];
		os << "step " << (index + 1) << ": " << step.command << " -> " << step.outcome << " [" << step.digest << "]\n";
	}
	for (const auto & message : report.failures)
	{
		os << "failure: " << message << "\n";
	}
	os << "verdict: " << report.verdict () << "\n";
	return os.str ();
}

std::string to_json (const trace_report & report)
{
	nlohmann::json doc;
	doc["steps"] = nlohmann::json::array ();
	for (const auto & step : report.steps)
	{
		doc["steps"].push_back ({ { "command", step.command }, { "outcome", step.outcome }, { "digest", step.digest } });
	}
	doc["verdict"] = std::string (report.verdict ());
	doc["failures"] = report.failures;
	return doc.dump (2);
}
}
