// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "egoview/corpus.hpp"
#include "egoview/evaluate.hpp"
#include "egoview/selection.hpp"
#include "egoview/services.hpp"
#include "egoview/solvability.hpp"
#include "egoview/synthesis.hpp"
#include "egoview/util.hpp"

namespace egoview::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::Schema:
    case ErrorKind::DuplicateId:
    case ErrorKind::EmptyInput:
    case ErrorKind::NoViews:
    case ErrorKind::TooManyViews:
    case ErrorKind::BehindCamera: return kSchema;
    case ErrorKind::UnknownScene:
    case ErrorKind::UnknownObjectId:
    case ErrorKind::MissingGold:
    case ErrorKind::DuplicatePrediction: return kReference;
    case ErrorKind::InvalidImageReference:
    case ErrorKind::ServiceUnavailable:
    case ErrorKind::ServiceProtocol: return kService;
  }
  return kUsage;
}

namespace {

struct WitnessFlags {
  solvability::WitnessConfig cfg;

  void add(CLI::App& cmd) {
    cmd.add_option("--iosa-threshold", cfg.iosa_threshold, "witness IoSA threshold (strict >)")
        ->capture_default_str();
    cmd.add_option("--min-area-ratio", cfg.min_area_ratio,
                   "minimum projected area as a fraction of the image")
        ->capture_default_str();
  }
};

struct ServiceFlags {
  bool stub = false;
  std::string url;
  std::uint64_t seed = 0;
  std::size_t max_in_flight = 8;
  double timeout = 30.0;

  void add(CLI::App& cmd) {
    cmd.add_flag("--stub", stub, "use deterministic in-process model stubs");
    cmd.add_option("--service", url, "model service base URL (MODEL_SERVICE_URL when omitted)");
    cmd.add_option("--seed", seed, "seed for every stochastic component")->capture_default_str();
    cmd.add_option("--max-in-flight", max_in_flight, "concurrent service requests")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--timeout", timeout, "service timeout in seconds")->capture_default_str();
  }

  services::ServiceEndpointConfig config() const {
    services::ServiceEndpointConfig cfg;
    cfg.seed = seed;
    cfg.max_in_flight = max_in_flight;
    cfg.timeout_seconds = timeout;
    if (stub) {
      cfg.mode = services::Mode::Stub;
      return cfg;
    }
    cfg.mode = services::Mode::Remote;
    if (url.empty()) {
      cfg.apply_environment();
    } else {
      cfg.base_url = url;
    }
    if (cfg.base_url.empty()) {
      throw Error(ErrorKind::InvalidArgument,
                  "pass --stub, --service URL, or set MODEL_SERVICE_URL");
    }
    return cfg;
  }

  std::string mode_name() const { return stub ? "stub" : "remote"; }
};

ordered_json provenance(std::string_view command, std::string_view config_hash,
                        std::optional<std::uint64_t> seed, ordered_json extra = ordered_json::object()) {
  ordered_json p;
  p["tool"] = "egoview";
  p["version"] = kToolVersion;
  p["command"] = command;
  p["config_hash"] = config_hash;
  p["seed"] = seed ? ordered_json(*seed) : ordered_json();
  p["rulesets"] = {{"normalization", evaluate::kNormalizationVersion}};
  for (auto& [k, v] : extra.items()) p[k] = v;
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

std::string header_line(const ordered_json& prov) {
  ordered_json h;
  h[std::string(corpus::kProvenanceKey)] = prov;
  return h.dump() + "\n";
}

std::string hash_of(const ordered_json& j) { return hex64(fnv1a64(j.dump())); }

// --- commands ----------------------------------------------------------------

struct SolvabilityArgs {
  std::string scenes, instructions, out;
  std::size_t stride = 1;
  std::size_t threads = 1;
  WitnessFlags witness;
};

int cmd_solvability(const SolvabilityArgs& a, std::ostream& out) {
  a.witness.cfg.validate();
  const auto scenes = corpus::load_scenes(a.scenes);
  const auto instructions = corpus::load_instructions(a.instructions);
  const auto hist = solvability::view_requirement_stats(
      instructions, scenes, a.witness.cfg, {.stride = a.stride, .threads = a.threads});

  auto report = evaluate::solvability_report(hist, a.witness.cfg, a.stride);
  const ordered_json cfg = {{"iosa_threshold", a.witness.cfg.iosa_threshold},
                            {"min_area_ratio", a.witness.cfg.min_area_ratio},
                            {"stride", a.stride}};
  report["provenance"] = provenance("solvability", hash_of(cfg), std::nullopt);
  write_file(a.out, report.dump(2) + "\n");
  out << evaluate::format_table(hist);
  return kOk;
}

struct SynthesizeArgs {
  std::string scenes, questions, out, report;
  std::size_t stride = 1;
  WitnessFlags witness;
  ServiceFlags service;
};

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
  a.witness.cfg.validate();
  const auto service_cfg = a.service.config();
  const auto scenes = corpus::load_scenes(a.scenes);
  const auto instructions = corpus::load_instructions(a.questions);
  std::vector<synthesis::QuestionRecord> questions;
  std::size_t skipped_non_qa = 0;
  for (const auto& ins : instructions) {
    if (ins.task == Task::QA) {
      questions.push_back(synthesis::to_question(ins));
    } else {
      ++skipped_non_qa;
    }
  }

  synthesis::SynthesisConfig cfg;
  cfg.view_stride = a.stride;
  cfg.max_in_flight = a.service.max_in_flight;
  auto generator = services::make_service(service_cfg);
  const auto result =
      synthesis::synthesize_dataset(questions, *generator, scenes, a.witness.cfg, cfg);
  const auto& r = result.report;

  const auto prov = provenance(
      "synthesize", r.config_hash, a.service.seed,
      {{"service_mode", a.service.mode_name()}, {"prompt_version", r.prompt_version}});
  std::string body = header_line(prov);
  for (const auto& rec : result.records) body += corpus::to_json_line(rec) + "\n";
  write_file(a.out, body);

  ordered_json rep;
  rep["report"] = "synthesis";
  rep["questions"] = r.questions;
  rep["skipped_non_qa"] = skipped_non_qa;
  rep["pairs_considered"] = r.pairs_considered;
  rep["composed"] = r.composed;
  rep["kept"] = r.kept;
  rep["dropped_by_reason"] = r.dropped_by_reason;
  ordered_json dropped = ordered_json::array();
  for (const auto& d : r.dropped) {
    dropped.push_back({{"parents", {d.first_id, d.second_id}},
                       {"reason", synthesis::to_string(d.reason)},
                       {"detail", d.detail}});
  }
  rep["dropped"] = dropped;
  rep["exact_duplicates"] = r.exact_duplicates;
  rep["view_requirements"] = evaluate::solvability_report(r.view_histogram, a.witness.cfg, a.stride);
  if (r.pairs_considered == 0) rep["note"] = "no same-scene question pair has overlapping, non-nested anchor sets";
  rep["provenance"] = prov;
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  write_file(report_path, rep.dump(2) + "\n");

  out << "pairs considered " << r.pairs_considered << ", composed " << r.composed << ", kept "
      << r.kept << ", dropped " << r.dropped.size() << "\n";
  return kOk;
}

struct BuildCorpusArgs {
  std::string scenes, mode, instructions, out, report;
  std::size_t stride = 20;
  std::size_t num_captions = 3;
  double threshold = 0.5;
  double tau = 0.5;
  ServiceFlags service;
};

int cmd_build_corpus(const BuildCorpusArgs& a, std::ostream& out) {
  if (a.mode == "extend" && a.instructions.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--mode extend requires --instructions");
  }
  const auto service_cfg = a.service.config();
  const auto scenes = corpus::load_scenes(a.scenes);
  auto client = services::make_service(service_cfg);

  std::vector<corpus::TripletRecord> triplets;
  std::vector<corpus::SkippedInstruction> skipped;
  std::string config_hash;
  if (a.mode == "captions") {
    corpus::CaptionCorpusConfig cfg{a.stride, a.num_captions, a.threshold, a.tau,
                                    a.service.max_in_flight};
    selection::AlignmentConfig{a.tau}.validate();
    config_hash = cfg.hash();
    for (const auto& [id, scene] : scenes) {
      auto batch = corpus::build_caption_triplets(scene, *client, *client, cfg);
      std::ranges::move(batch, std::back_inserter(triplets));
    }
  } else {
    corpus::ExtendConfig cfg{a.tau, a.service.max_in_flight};
    config_hash = cfg.hash();
    const auto instructions = corpus::load_instructions(a.instructions);
    auto result = corpus::extend_dataset_triplets(instructions, scenes, *client, cfg);
    triplets = std::move(result.triplets);
    skipped = std::move(result.skipped);
  }

  const auto prov = provenance("build-corpus", config_hash, a.service.seed,
                               {{"mode", a.mode}, {"service_mode", a.service.mode_name()}});
  std::string body = header_line(prov);
  std::map<std::string, std::size_t> per_source;
  for (const auto& t : triplets) {
    body += corpus::to_json_line(t) + "\n";
    ++per_source[std::string(corpus::to_string(t.source))];
  }
  write_file(a.out, body);

  ordered_json rep;
  rep["report"] = "corpus";
  rep["mode"] = a.mode;
  rep["triplets"] = triplets.size();
  rep["per_source"] = per_source;
  ordered_json sk = ordered_json::array();
  for (const auto& s : skipped) sk.push_back({{"instruction_id", s.instruction_id}, {"reason", s.reason}});
  rep["skipped"] = sk;
  rep["provenance"] = prov;
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  write_file(report_path, rep.dump(2) + "\n");

  out << "triplets " << triplets.size();
  for (const auto& [source, n] : per_source) out << ", " << source << " " << n;
  out << ", skipped " << skipped.size() << "\n";
  for (const auto& s : skipped) out << "skipped " << s.instruction_id << ": " << s.reason << "\n";
  return kOk;
}

struct EvalArgs {
  std::string gold, pred, out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  auto open = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Schema, path + ": cannot open");
    return in;
  };
  auto gold_in = open(a.gold);
  auto pred_in = open(a.pred);
  const auto gold = evaluate::read_gold(gold_in, a.gold);
  const auto preds = evaluate::read_predictions(pred_in, a.pred);
  const auto report = evaluate::em_score(preds, gold);
  auto j = evaluate::to_json(report);
  j["provenance"] = provenance("eval", hash_of({{"normalization", evaluate::kNormalizationVersion}}),
                               std::nullopt);
  write_file(a.out, j.dump(2) + "\n");
  out << evaluate::format_table(report);
  return kOk;
}

struct SelectViewsArgs {
  std::string scenes, scene_id, out;
  selection::DiversityConfig diversity;
};

int cmd_select_views(const SelectViewsArgs& a, std::ostream& out) {
  const auto scenes = corpus::load_scenes(a.scenes);
  const Scene& scene = require_scene(scenes, a.scene_id);
  const auto picked = selection::select_diverse_views(scene.views, a.diversity);
  std::vector<View> chosen;
  for (const auto& id : picked.view_ids) chosen.push_back(*scene.find_view(id));
  const auto grid = selection::build_grid_manifest(chosen);

  ordered_json j;
  j["scene_id"] = scene.scene_id;
  j["selected"] = picked.view_ids;
  j["short_selection"] = picked.short_selection;
  ordered_json cells = ordered_json::array();
  for (const auto& c : grid.cells) {
    if (!c) {
      cells.push_back(nullptr);
      continue;
    }
    cells.push_back({{"view_id", c->view_id},
                     {"image_path", c->image_path ? ordered_json(*c->image_path) : ordered_json()}});
  }
  j["grid"] = {{"rows", grid.rows}, {"cols", grid.cols}, {"cells", cells}};
  const ordered_json cfg = {{"k", a.diversity.k},
                            {"lambda_rot", a.diversity.lambda_rot},
                            {"min_separation", a.diversity.min_separation}};
  j["provenance"] = provenance("select-views", hash_of(cfg), std::nullopt);
  write_file(a.out, j.dump(2) + "\n");
  for (const auto& id : picked.view_ids) out << id << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"egoview: egocentric-view visibility, question synthesis and triplet corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  SolvabilityArgs solv;
  auto* c_solv = app.add_subcommand("solvability", "minimum-view statistics for instructions");
  c_solv->add_option("--scenes", solv.scenes, "directory of scene files")->required();
  c_solv->add_option("--instructions", solv.instructions, "instruction JSONL")->required();
  c_solv->add_option("--out", solv.out, "report path")->required();
  c_solv->add_option("--stride", solv.stride, "use every N-th view")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_solv->add_option("--threads", solv.threads, "worker threads")->capture_default_str()
      ->check(CLI::PositiveNumber);
  solv.witness.add(*c_solv);

  SynthesizeArgs syn;
  auto* c_syn = app.add_subcommand("synthesize", "compose multi-view questions from QA pairs");
  c_syn->add_option("--scenes", syn.scenes, "directory of scene files")->required();
  c_syn->add_option("--questions", syn.questions, "qa instruction JSONL")->required();
  c_syn->add_option("--out", syn.out, "composed question JSONL")->required();
  c_syn->add_option("--report", syn.report, "report path (default <out>.report.json)");
  c_syn->add_option("--stride", syn.stride, "view stride for min-view annotation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  syn.witness.add(*c_syn);
  syn.service.add(*c_syn);

  BuildCorpusArgs bc;
  auto* c_bc = app.add_subcommand("build-corpus", "build 2D view / 3D objects / text triplets");
  c_bc->add_option("--scenes", bc.scenes, "directory of scene files")->required();
  c_bc->add_option("--mode", bc.mode, "captions or extend")
      ->required()
      ->check(CLI::IsMember({"captions", "extend"}));
  c_bc->add_option("--instructions", bc.instructions, "instruction JSONL (extend mode)");
  c_bc->add_option("--out", bc.out, "triplet JSONL")->required();
  c_bc->add_option("--report", bc.report, "summary path (default <out>.report.json)");
  c_bc->add_option("--stride", bc.stride, "caption every N-th view")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_bc->add_option("--num-captions", bc.num_captions, "captions requested per view")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_bc->add_option("--threshold", bc.threshold, "minimum caption score")->capture_default_str();
  c_bc->add_option("--tau", bc.tau, "visibility threshold for object binding")->capture_default_str();
  bc.service.add(*c_bc);

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "exact-match evaluation");
  c_ev->add_option("--gold", ev.gold, "gold JSONL")->required();
  c_ev->add_option("--pred", ev.pred, "prediction JSONL")->required();
  c_ev->add_option("--out", ev.out, "report path")->required();

  SelectViewsArgs sv;
  auto* c_sv = app.add_subcommand("select-views", "pick dissimilar views and lay them out 2x2");
  c_sv->add_option("--scenes", sv.scenes, "directory of scene files")->required();
  c_sv->add_option("--scene", sv.scene_id, "scene id")->required();
  c_sv->add_option("--out", sv.out, "manifest path")->required();
  c_sv->add_option("--k", sv.diversity.k, "views to select")->capture_default_str();
  c_sv->add_option("--lambda-rot", sv.diversity.lambda_rot, "meters per radian")->capture_default_str();
  c_sv->add_option("--min-separation", sv.diversity.min_separation, "minimum dissimilarity")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (c_solv->parsed()) return cmd_solvability(solv, out);
    if (c_syn->parsed()) return cmd_synthesize(syn, out);
    if (c_bc->parsed()) return cmd_build_corpus(bc, out);
    if (c_ev->parsed()) return cmd_eval(ev, out);
    if (c_sv->parsed()) return cmd_select_views(sv, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace egoview::cli
