/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "catch2/catch_amalgamated.hpp"
#include "test_helpers.hpp"

using namespace povmforge;

namespace {

Document sample_doc() {
  Rng rng(111);
  Document doc;
  doc.schema_version = "1";
  doc.objects.emplace("trine", th::trine());
  doc.objects.emplace("split", th::split_outcomes(th::trine(), 2, rng));
  doc.objects.emplace("z", th::sharp_z());
  doc.objects.emplace("x", th::sharp_x());
  doc.objects.emplace("noisy", th::noisy_z(0.4));
  doc.objects.emplace("dephase", make_channel({matrix_unit(2, 0, 0),
                                               matrix_unit(2, 1, 1)}));
  doc.objects.emplace("id2", identity_channel(2));

  Povm broken;
  broken.dim = 2;
  broken.outcomes = {0};
  broken.effects = {0.5 * identity(2)};
  doc.objects.emplace("broken", broken);
  return doc;
}

}  // namespace

TEST_CASE("unknown commands and names throw out of run_command") {
  Document doc = sample_doc();
  REQUIRE_THROWS_AS(run_command("frobnicate", {"z"}, doc), UnknownCommand);
  REQUIRE_THROWS_AS(run_command("validate", {"absent"}, doc), MissingObject);
  REQUIRE_THROWS_AS(run_command("compare", {"z"}, doc), UnknownCommand);
}

TEST_CASE("validate reports object shape") {
  Document doc = sample_doc();
  CommandResult ok = run_command("validate", {"trine"}, doc);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.report["status"] == "ok");
  REQUIRE(ok.report["kind"] == "povm");
  REQUIRE(ok.report["dim"] == 2);
  REQUIRE(ok.report["n_outcomes"] == 3);

  CommandResult chan = run_command("validate", {"dephase"}, doc);
  REQUIRE(chan.report["kind"] == "channel");
  REQUIRE(chan.report["in_dim"] == 2);
}

TEST_CASE("domain failures become error reports with exit code 1") {
  Document doc = sample_doc();
  CommandResult res = run_command("validate", {"broken"}, doc);
  REQUIRE(res.exit_code == 1);
  REQUIRE(res.report["status"] == "error");
  REQUIRE(res.report["message"].is_string());
}

TEST_CASE("reduce reports the relabeling") {
  Document doc = sample_doc();
  CommandResult res = run_command("reduce", {"split"}, doc);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report["reduced"]["effects"].size() == 3);
  REQUIRE(res.report["relabeling"].size() == 6);
}

TEST_CASE("dilate and min-outdim agree on the trine") {
  Document doc = sample_doc();
  CommandResult dil = run_command("dilate", {"trine"}, doc);
  REQUIRE(dil.report["dil_dim"] == 3);
  CommandResult mo = run_command("min-outdim", {"trine"}, doc);
  REQUIRE(mo.report["value"] == 3);
}

TEST_CASE("compare exit codes track decidability") {
  Document doc = sample_doc();

  CommandResult equiv = run_command("compare", {"trine", "split"}, doc);
  REQUIRE(equiv.exit_code == 0);
  REQUIRE(equiv.report["relation"] == "equivalent");
  REQUIRE(equiv.report.contains("witness_a_from_b"));

  CommandResult incomp = run_command("compare", {"z", "x"}, doc);
  REQUIRE(incomp.exit_code == 0);
  REQUIRE(incomp.report["relation"] == "incomparable");

  CommandResult undecided = run_command("compare", {"z", "noisy"}, doc);
  REQUIRE(undecided.exit_code == 2);
  REQUIRE(undecided.report["status"] == "undecided");

  CommandOptions with_oracle;
  with_oracle.grid_oracle = true;
  with_oracle.grid_resolution = 16;
  CommandResult decided = run_command("compare", {"z", "noisy"}, doc, with_oracle);
  REQUIRE(decided.exit_code == 0);
  REQUIRE(decided.report["relation"] == "above");
}

TEST_CASE("extreme command reports mixtures when available") {
  Document doc = sample_doc();
  CommandResult ex = run_command("extreme", {"trine"}, doc);
  REQUIRE(ex.report["extreme"] == true);
  CommandResult split = run_command("extreme", {"split"}, doc);
  REQUIRE(split.report["extreme"] == false);
  REQUIRE(split.report.contains("mixture_plus"));
}

TEST_CASE("realize-obs distinguishes feasible and undecided") {
  Document doc = sample_doc();
  CommandResult ok = run_command("realize-obs", {"trine", "trine"}, doc);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.report.contains("observable"));

  // Off-diagonal targets cannot be read out after a sharp z measurement.
  CommandResult stuck = run_command("realize-obs", {"z", "x"}, doc);
  REQUIRE(stuck.exit_code == 2);
  REQUIRE(stuck.report["status"] == "undecided");
  REQUIRE(stuck.report["solver"]["affine_floor"].get<double>() > kCertTol);
}

TEST_CASE("realize-chan upgrades negatives only with the oracle") {
  Document doc = sample_doc();
  CommandResult stuck = run_command("realize-chan", {"z", "id2"}, doc);
  REQUIRE(stuck.exit_code == 2);
  REQUIRE(stuck.report["status"] == "undecided");

  CommandOptions with_oracle;
  with_oracle.grid_oracle = true;
  CommandResult refuted = run_command("realize-chan", {"z", "id2"}, doc,
                                      with_oracle);
  REQUIRE(refuted.exit_code == 0);
  REQUIRE(refuted.report["status"] == "refuted");
  REQUIRE(refuted.report.contains("witness_state_1"));
}

TEST_CASE("cert-equiv certifies both directions or reports undecided") {
  Document doc = sample_doc();
  CommandResult ok = run_command("cert-equiv", {"dephase", "dephase"}, doc);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.report["status"] == "ok");
  REQUIRE(ok.report.contains("forward"));
  REQUIRE(ok.report.contains("backward"));

  CommandResult stuck = run_command("cert-equiv", {"dephase", "id2"}, doc);
  REQUIRE(stuck.exit_code == 2);
  REQUIRE(stuck.report["status"] == "undecided");

  CommandOptions with_oracle;
  with_oracle.grid_oracle = true;
  CommandResult refuted = run_command("cert-equiv", {"dephase", "id2"}, doc,
                                      with_oracle);
  REQUIRE(refuted.exit_code == 0);
  REQUIRE(refuted.report["status"] == "not_equivalent");
  REQUIRE(refuted.report["refuted_forward"] == true);
}

TEST_CASE("seq-joint reports the joint observable and its margins") {
  Document doc = sample_doc();
  CommandResult res = run_command("seq-joint", {"z", "z"}, doc);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report["instrument_kind"] == "luders");
  REQUIRE(res.report["joint"]["effects"].size() == 4);
  REQUIRE(res.report["margin_first"]["effects"].size() == 2);

  CommandOptions opts;
  opts.instrument_kind = "least-disturbing";
  CommandResult ld = run_command("seq-joint", {"z", "z"}, doc, opts);
  REQUIRE(ld.exit_code == 0);

  opts.instrument_kind = "bogus";
  REQUIRE_THROWS_AS(run_command("seq-joint", {"z", "z"}, doc, opts),
                    UnknownCommand);
}

TEST_CASE("reports are deterministic") {
  Document doc = sample_doc();
  CommandResult a = run_command("compare", {"trine", "split"}, doc);
  CommandResult b = run_command("compare", {"trine", "split"}, doc);
  REQUIRE(a.report.dump(2) == b.report.dump(2));
}
