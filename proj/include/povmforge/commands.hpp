/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "povmforge/analysis.hpp"
#include "povmforge/channels.hpp"
#include "povmforge/dilation.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/io.hpp"
#include "povmforge/observables.hpp"
#include "povmforge/realization.hpp"

namespace povmforge {

/// Knobs shared by every command; the CLI maps flags onto this.
struct CommandOptions {
  double tol = kDefaultTol;
  double cert_tol = kCertTol;
  int budget = kDefaultBudget;
  std::uint64_t seed = 0;
  bool grid_oracle = false;
  int grid_resolution = 8;
  std::string instrument_kind = "luders";  // or "least-disturbing"
};

/// A structured report plus the process exit code: 0 decided/ok, 1 domain
/// error, 2 undecided (budget ran out without a certificate or refutation).
struct CommandResult {
  Json report;
  int exit_code = 0;
};

namespace detail {

inline Json finite_or_null(double x) {
  if (std::isfinite(x)) return Json(x);
  return Json(nullptr);
}

inline Json stochastic_to_json(const StochasticMatrix& p) {
  Json j;
  j["rows"] = p.p.rows();
  j["cols"] = p.p.cols();
  j["entries"] = real_matrix_to_json(p.p);
  return j;
}

inline Json instrument_to_json(const Instrument& ins) {
  Json j;
  j["in_dim"] = ins.in_dim;
  j["out_dim"] = ins.out_dim;
  j["outcomes"] = ins.outcomes;
  Json ops = Json::array();
  for (const auto& branch : ins.operations) {
    Json list = Json::array();
    for (const ComplexMatrix& k : branch) list.push_back(matrix_to_json(k));
    ops.push_back(std::move(list));
  }
  j["operations"] = std::move(ops);
  return j;
}

inline Json feasibility_to_json(const FeasibilityOutcome& f) {
  Json j;
  j["residual"] = finite_or_null(f.residual);
  j["affine_floor"] = finite_or_null(f.affine_floor);
  j["iterations"] = f.iterations;
  return j;
}

inline const std::string& arg_at(const std::vector<std::string>& args,
                                 std::size_t i, const char* command,
                                 std::size_t expected) {
  if (args.size() != expected) {
    throw UnknownCommand(std::string("command '") + command + "' expects " +
                         std::to_string(expected) + " object name(s), got " +
                         std::to_string(args.size()));
  }
  return args[i];
}

inline Povm validated_povm(const Document& doc, const std::string& name,
                           double tol) {
  const Povm& raw = get_povm(doc, name);
  return validate_povm(raw.outcomes, raw.effects, tol);
}

inline Channel validated_channel(const Document& doc, const std::string& name,
                                 double tol) {
  const Channel& raw = get_channel(doc, name);
  return make_channel(raw.kraus, tol);
}

}  // namespace detail

/// Executes one command against a parsed document and assembles its report.
/// Unknown commands and unresolved object names throw; every other domain
/// failure comes back as a status "error" report with exit code 1. Reports
/// are deterministic given (document, command, options).
inline CommandResult run_command(const std::string& command,
                                 const std::vector<std::string>& args,
                                 const Document& doc,
                                 const CommandOptions& opts = {}) {
  CommandResult result;
  Json& report = result.report;
  report["schema_version"] = "1";
  report["command"] = command;
  report["status"] = "ok";

  using detail::arg_at;
  try {
    if (command == "validate") {
      const std::string& name = arg_at(args, 0, "validate", 1);
      auto it = doc.objects.find(name);
      if (it == doc.objects.end()) {
        throw MissingObject("no object named '" + name + "' in the document");
      }
      report["object"] = name;
      if (std::holds_alternative<Povm>(it->second)) {
        const Povm& raw = std::get<Povm>(it->second);
        Povm a = validate_povm(raw.outcomes, raw.effects, opts.tol);
        report["kind"] = "povm";
        report["dim"] = a.dim;
        report["n_outcomes"] = a.n_outcomes();
      } else if (std::holds_alternative<Channel>(it->second)) {
        Channel c = make_channel(std::get<Channel>(it->second).kraus, opts.tol);
        report["kind"] = "channel";
        report["in_dim"] = c.in_dim;
        report["out_dim"] = c.out_dim;
      } else {
        DensityMatrix rho =
            validate_density(std::get<DensityMatrix>(it->second).matrix, opts.tol);
        report["kind"] = "density";
        report["dim"] = rho.dim;
      }
      report["valid"] = true;

    } else if (command == "reduce") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "reduce", 1), opts.tol);
      Reduction r = minimal_sufficient_reduction(a, opts.tol);
      report["reduced"] = povm_to_json(r.reduced);
      Json map = Json::object();
      for (const auto& [from, to] : r.map.map) {
        map[std::to_string(from)] = to;
      }
      report["relabeling"] = std::move(map);

    } else if (command == "dilate") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "dilate", 1), opts.tol);
      NaimarkDilation d = minimal_naimark(a);
      report["dil_dim"] = d.dil_dim;
      Json blocks = Json::object();
      for (const auto& [outcome, range] : d.block_index) {
        blocks[std::to_string(outcome)] = Json::array({range.first, range.second});
      }
      report["block_index"] = std::move(blocks);
      report["isometry"] = matrix_to_json(d.isometry);
      report["pvm"] = povm_to_json(d.pvm);

    } else if (command == "least-disturbing") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "least-disturbing", 1),
                                      opts.tol);
      LeastDisturbing ld = least_disturbing(a);
      report["dil_dim"] = ld.dilation.dil_dim;
      report["channel"] = channel_to_json(ld.channel);
      report["instrument"] = detail::instrument_to_json(ld.instrument);

    } else if (command == "min-outdim") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "min-outdim", 1),
                                      opts.tol);
      report["value"] = minimal_output_dimension(a, opts.tol);

    } else if (command == "compare") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "compare", 2), opts.tol);
      Povm b = detail::validated_povm(doc, args[1], opts.tol);
      OrderOptions oo;
      oo.budget = opts.budget;
      oo.cert_tol = opts.cert_tol;
      oo.use_grid_oracle = opts.grid_oracle;
      oo.grid_resolution = opts.grid_resolution;
      OrderVerdict v = compare(a, b, oo);
      report["relation"] = to_string(v.relation);
      report["residual_a_from_b"] = detail::finite_or_null(v.residual_a_from_b);
      report["residual_b_from_a"] = detail::finite_or_null(v.residual_b_from_a);
      report["refuted_a_from_b"] = v.refuted_a_from_b;
      report["refuted_b_from_a"] = v.refuted_b_from_a;
      if (v.witness_a_from_b) {
        report["witness_a_from_b"] = detail::stochastic_to_json(*v.witness_a_from_b);
      }
      if (v.witness_b_from_a) {
        report["witness_b_from_a"] = detail::stochastic_to_json(*v.witness_b_from_a);
      }
      if (v.relation == Relation::undecided) {
        report["status"] = "undecided";
        result.exit_code = 2;
      }

    } else if (command == "extreme") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "extreme", 1), opts.tol);
      bool extreme = is_extreme(a);
      report["extreme"] = extreme;
      if (!extreme) {
        auto pair = extremality_counterexample(a);
        if (pair) {
          report["mixture_plus"] = povm_to_json(pair->first);
          report["mixture_minus"] = povm_to_json(pair->second);
        }
      }

    } else if (command == "realize-obs") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "realize-obs", 2),
                                      opts.tol);
      Povm b = detail::validated_povm(doc, args[1], opts.tol);
      ObservableRealization r =
          realize_observable_after(a, b, {opts.budget, opts.cert_tol});
      report["solver"] = detail::feasibility_to_json(r.details);
      report["used_block_reduction"] = r.used_block_reduction;
      if (r.observable) {
        report["observable"] = povm_to_json(*r.observable);
      } else {
        report["status"] = "undecided";
        result.exit_code = 2;
      }

    } else if (command == "realize-chan") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "realize-chan", 2),
                                      opts.tol);
      Channel lambda = detail::validated_channel(doc, args[1], opts.tol);
      ChannelRealization r =
          realize_channel_after(a, lambda, {opts.budget, opts.cert_tol});
      report["solver"] = detail::feasibility_to_json(r.details);
      if (r.channel) {
        report["channel"] = channel_to_json(*r.channel);
      } else if (opts.grid_oracle) {
        auto witness = refute_channel_realization(least_disturbing(a).channel,
                                                  lambda);
        if (witness) {
          report["status"] = "refuted";
          report["witness_state_1"] = matrix_to_json(witness->rho1.matrix);
          report["witness_state_2"] = matrix_to_json(witness->rho2.matrix);
          report["base_distance"] = witness->base_distance;
          report["target_distance"] = witness->target_distance;
        } else {
          report["status"] = "undecided";
          result.exit_code = 2;
        }
      } else {
        report["status"] = "undecided";
        result.exit_code = 2;
      }

    } else if (command == "cert-equiv") {
      Channel l1 = detail::validated_channel(doc, arg_at(args, 0, "cert-equiv", 2),
                                             opts.tol);
      Channel l2 = detail::validated_channel(doc, args[1], opts.tol);
      EquivalenceCertification c =
          certify_equivalence(l1, l2, {opts.budget, opts.cert_tol});
      report["forward_solver"] = detail::feasibility_to_json(c.forward.details);
      report["backward_solver"] = detail::feasibility_to_json(c.backward.details);
      if (c.forward.channel) {
        report["forward"] = channel_to_json(*c.forward.channel);
      }
      if (c.backward.channel) {
        report["backward"] = channel_to_json(*c.backward.channel);
      }
      if (!c.certified()) {
        bool refuted = false;
        if (opts.grid_oracle) {
          if (!c.forward.channel && refute_channel_realization(l1, l2)) {
            report["refuted_forward"] = true;
            refuted = true;
          }
          if (!c.backward.channel && refute_channel_realization(l2, l1)) {
            report["refuted_backward"] = true;
            refuted = true;
          }
        }
        if (refuted) {
          report["status"] = "not_equivalent";
        } else {
          report["status"] = "undecided";
          result.exit_code = 2;
        }
      }

    } else if (command == "seq-joint") {
      Povm a = detail::validated_povm(doc, arg_at(args, 0, "seq-joint", 2),
                                      opts.tol);
      Povm c = detail::validated_povm(doc, args[1], opts.tol);
      Instrument ins;
      if (opts.instrument_kind == "luders") {
        ins = luders_instrument(a);
      } else if (opts.instrument_kind == "least-disturbing") {
        ins = least_disturbing(a).instrument;
      } else {
        throw UnknownCommand("unknown instrument kind '" + opts.instrument_kind +
                             "' (expected 'luders' or 'least-disturbing')");
      }
      JointObservable g = sequential_joint(ins, c);
      report["instrument_kind"] = opts.instrument_kind;
      report["first_outcomes"] = g.first_outcomes;
      report["second_outcomes"] = g.second_outcomes;
      report["joint"] = povm_to_json(g.povm);
      auto [first, second] = margins(g);
      report["margin_first"] = povm_to_json(first);
      report["margin_second"] = povm_to_json(second);

    } else {
      throw UnknownCommand("unknown command '" + command + "'");
    }
  } catch (const UnknownCommand&) {
    throw;
  } catch (const MissingObject&) {
    throw;
  } catch (const PovmForgeError& e) {
    report["status"] = "error";
    report["message"] = e.what();
    result.exit_code = 1;
  }
  return result;
}

}  // namespace povmforge
