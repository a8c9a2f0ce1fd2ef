#pragma once

#include <findel/marketplace.hpp>

#include <optional>
#include <string>
#include <vector>

namespace findel::scenario {

enum class command_kind
{
	desc,
	issue,
	join,
	join_or,
	tick,
	gateway,
	assert_balance,
	assert_event,
	assert_live,
};

// One scenario line. Labels are scenario-local: desc_label names a
// registered description, contract_label a contract id bound at runtime.
// Contract references may address generated contracts as
// <label>.gen0, <label>.gen1, ... in generation order.
struct command
{
	command_kind kind{ command_kind::tick };
	std::size_t line = 0;
	std::string text; // original line, for reporting
	// expect <error>: <command> wraps a mutation and inverts its outcome
	std::optional<std::string> expected_error;

	std::string desc_label; // desc, issue
	primitive_ptr body; // desc
	timestamp valid_from{ 0 }; // desc
	timestamp valid_until{ t_max }; // desc

	address issuer; // issue
	address proposed_owner; // issue
	std::string contract_label; // issue

	address caller; // join, join_or
	std::string contract_ref; // join, join_or, assert_event, assert_live
	or_branch branch{ or_branch::left }; // join_or

	std::uint64_t count{ 1 }; // tick
	bool count_is_year{ false }; // tick 1yr

	address source; // gateway
	gateway_value value; // gateway

	address party; // assert_balance
	currency cur; // assert_balance
	mpz_class expected_amount{ 0 }; // assert_balance
	event_kind expected_event{ event_kind::issued_for }; // assert_event
	bool expect_live{ true }; // assert_live
};

struct scenario_parse_error
{
	std::size_t line = 0;
	std::string message;

	std::string to_string () const;
};

struct parse_outcome
{
	std::vector<command> commands;
	std::optional<scenario_parse_error> error;

	bool ok () const
	{
		return !error.has_value ();
	}
};

// Line-oriented scenario grammar, one command per line, '#' comments:
//   desc <label> = <findel-expr> [window <t0> <t1>]
//   issue <issuer> for <owner> <label> as <clabel>
//   join <party> @<clabel>
//   joinor <party> @<clabel> <left|right>
//   tick <n|1yr>
//   gateway <addr> = <number|true|false>
//   assert balance <party> <CUR> <signed-int>
//   assert event <issuedfor|executed|deleted> @<clabel>
//   assert <live|gone> @<clabel>
//   expect <error-name>: <command>
// Embedded findel expressions are parsed with the supplied At half-width.
// A contract reference must be bound by an earlier line unless the command
// is expect-wrapped, in which case resolution is deferred to run time.
parse_outcome parse_scenario (std::string_view text, delta d = delta{ 30 });

struct config
{
	std::uint64_t at_delta = 30;
	std::uint64_t freshness_window = 10;
	std::uint64_t year_length = 365;
};

struct report_step
{
	std::string command;
	std::string outcome;
	std::string digest; // digest of the state after the step
};

struct trace_report
{
	std::vector<report_step> steps;
	bool pass = true;
	std::vector<std::string> failures;

	std::string_view verdict () const
	{
		return pass ? "pass" : "fail";
	}
};

// Runs the commands sequentially from an empty marketplace. Every mutation
// also runs the consistency checker; violations, failed assertions and
// unexpected rejections all land in the report. The verdict is pass iff
// failures is empty.
trace_report run_scenario (const std::vector<command> & commands, const config & cfg = {});

std::string to_text (const trace_report & report);
std::string to_json (const trace_report & report);
}
