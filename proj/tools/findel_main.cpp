#include <findel/scenario.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

int main (int argc, char ** argv)
{
	CLI::App app{ "findel: run a contract scenario against the simulated marketplace" };
	std::string scenario_path;
	std::string format = "text";
	findel::scenario::config cfg;
	app.add_option ("scenario", scenario_path, "scenario file to run")->required ();
	app.add_option ("--delta", cfg.at_delta, "half-width of the At acceptance window")->capture_default_str ();
	app.add_option ("--freshness", cfg.freshness_window, "gateway data freshness window in time units")->capture_default_str ();
	app.add_option ("--year", cfg.year_length, "length of 1yr in time units")->capture_default_str ();
	app.add_option ("--format", format, "report format")->check (CLI::IsMember ({ "text", "json" }))->capture_default_str ();
	CLI11_PARSE (app, argc, argv);

	std::ifstream input (scenario_path);
	if (!input)
	{
		std::cerr << "error: cannot open " << scenario_path << "\n";
		return 2;
	}
	std::ostringstream buffer;
	buffer << input.rdbuf ();

	auto parsed = findel::scenario::parse_scenario (buffer.str (), findel::delta{ cfg.at_delta });
	if (!parsed.ok ())
	{
		std::cerr << "error: " << scenario_path << ":" << parsed.error->to_string () << "\n";
		return 2;
	}
	auto report = findel::scenario::run_scenario (parsed.commands, cfg);
	std::cout << (format == "json" ? findel::scenario::to_json (report) : findel::scenario::to_text (report));
	if (format == "json")
	{
		std::cout << "\n";
	}
	return report.pass ? 0 : 1;
}
