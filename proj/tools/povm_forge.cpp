/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "povmforge/povmforge.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw povmforge::SyntaxError("cannot open input file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_report(const povmforge::Json& report, const std::string& output) {
  std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    throw povmforge::SyntaxError("cannot open output file '" + output + "'");
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "povm-forge: dilations, disturbance, ordering and sequential "
      "realization of finite-dimensional quantum measurements"};
  app.footer(
      "commands:\n"
      "  validate NAME             check an object against its constraints\n"
      "  reduce NAME               minimally sufficient form of a POVM\n"
      "  dilate NAME               minimal Naimark dilation of a POVM\n"
      "  least-disturbing NAME     least disturbing channel and instrument\n"
      "  min-outdim NAME           minimal output dimension over all dilations\n"
      "  compare NAME NAME         post-processing order between two POVMs\n"
      "  extreme NAME              extremality of a POVM\n"
      "  realize-obs NAME NAME     observable B from A's least disturbing channel\n"
      "  realize-chan NAME NAME    channel L following A's measurement\n"
      "  cert-equiv NAME NAME      two-sided channel equivalence certificates\n"
      "  seq-joint NAME NAME       joint observable of a sequential measurement");

  std::string command;
  std::vector<std::string> names;
  std::string input;
  std::string output;
  povmforge::CommandOptions opts;

  app.add_option("command", command, "command to run")->required();
  app.add_option("names", names, "names of objects in the input document");
  app.add_option("--input", input, "input document path, or - for stdin")
      ->required();
  app.add_option("--output", output, "write the report here instead of stdout");
  app.add_option("--tol", opts.tol, "validation tolerance");
  app.add_option("--cert-tol", opts.cert_tol, "certificate tolerance");
  app.add_option("--budget", opts.budget, "iteration budget for solvers");
  app.add_option("--seed", opts.seed, "seed for randomized oracles");
  app.add_flag("--grid-oracle", opts.grid_oracle,
               "enable brute-force refutation oracles");
  app.add_option("--grid-resolution", opts.grid_resolution,
                 "subdivisions per simplex direction for the grid oracle");
  app.add_option("--instrument", opts.instrument_kind,
                 "instrument used by seq-joint: luders or least-disturbing");

  CLI11_PARSE(app, argc, argv);

  try {
    povmforge::Document doc = povmforge::parse_document(read_input(input));
    auto start = std::chrono::steady_clock::now();
    povmforge::CommandResult res =
        povmforge::run_command(command, names, doc, opts);
    auto stop = std::chrono::steady_clock::now();
    std::chrono::duration<double, std::milli> elapsed = stop - start;
    std::cerr << command << ": " << elapsed.count() << " ms\n";
    write_report(res.report, output);
    return res.exit_code;
  } catch (const povmforge::PovmForgeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
