#pragma once

// Command-line front end. Every subcommand loads its inputs, calls one
// library operation and renders the result as a table or as JSON.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "missionware/missionware.hpp"

namespace missionware::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kUsage = 2 };

struct Options {
  std::string format = "table";
  std::string model;
  std::string corpus;
  std::string from;
  std::string to;
  std::string node;
  std::string weights;
  std::vector<std::string> overrides;
  std::size_t top_k = MatchOptions{}.top_k;
  double threshold = MatchOptions{}.threshold;
  std::size_t max_len = kDefaultMaxChainLength;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::string scenario;
  std::string pattern;
  std::string out;
  bool exact = false;
  bool sum = false;
};

/// A problem with the invocation itself (flags, paths, file contents).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finding(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId:
    case ErrorCode::DanglingEdge:
    case ErrorCode::EdgeKindViolation:
    case ErrorCode::LogicCycle:
    case ErrorCode::TruthTableIncomplete:
    case ErrorCode::InvalidNode:
    case ErrorCode::NotAnalysisReady:
    case ErrorCode::InvalidCandidate:
    case ErrorCode::IdCollision: return true;
    default: return false;
  }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

inline double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

inline RiskWeights parse_weights(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 3) throw UsageError("--weights expects three comma-separated numbers");
  RiskWeights w{parse_number(parts[0], "--weights"), parse_number(parts[1], "--weights"),
                parse_number(parts[2], "--weights")};
  try {
    w.check();
  } catch (const Error& e) {
    throw UsageError(std::string("--weights: ") + e.what());
  }
  return w;
}

/// loss=complexity:3,mitigability:0.4
inline void parse_override(const std::string& text, RiskOverrides& into) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--override expects loss=key:value[,key:value]");
  auto& o = into[text.substr(0, eq)];
  for (const auto& item : split(text.substr(eq + 1), ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--override: '" + item + "' is not key:value");
    auto key = item.substr(0, colon);
    auto value = parse_number(item.substr(colon + 1), "--override " + key);
    if (key == "complexity" || key == "attack_complexity") {
      o.attack_complexity = value;
    } else if (key == "mitigability") {
      o.mitigability = value;
    } else {
      throw UsageError("--override: unknown key '" + key + "'");
    }
  }
}

inline std::string corpus_path(const Options& o) {
  if (!o.corpus.empty()) return o.corpus;
  if (const char* env = std::getenv("MISSIONWARE_CORPUS"); env && *env) return env;
  throw UsageError("no corpus given: pass --corpus or set MISSIONWARE_CORPUS");
}

/// A pattern file holds one application, a list of them, or
/// {"variants": [{"id", "applications"}]}.
inline std::vector<Variant> load_variants(const std::string& path) {
  auto doc = io::parse_file(path);
  auto apps_of = [](const Json& list) {
    std::vector<PatternApplication> apps;
    for (const auto& a : list) apps.push_back(pattern_from_json(a));
    return apps;
  };
  std::vector<Variant> out;
  if (doc.is_object() && doc.contains("variants")) {
    io::expect_keys(doc, {"variants"}, "variants document");
    if (!doc["variants"].is_array()) throw Error(ErrorCode::SchemaError, path, "'variants' must be a list");
    for (const auto& v : doc["variants"]) {
      io::expect_keys(v, {"id", "applications"}, "variant");
      auto id = io::require_string(v, "id", "variant");
      if (!v.contains("applications") || !v["applications"].is_array())
        throw Error(ErrorCode::SchemaError, id, "'applications' must be a list");
      out.push_back({id, apps_of(v["applications"])});
    }
  } else if (doc.is_array()) {
    out.push_back({"candidate", apps_of(doc)});
  } else {
    out.push_back({"candidate", {pattern_from_json(doc)}});
  }
  return out;
}

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline void print_mapping(std::ostream& out, const Mapping& m) {
  TextTable t({"record", "kind", "score", "derived", "derivation"});
  for (const auto& h : m.hits)
    t.add({h.record_id, std::string(to_string(h.kind)), fixed(h.score), h.derived ? "yes" : "no",
           join(h.derivation, " > ")});
  out << m.component << '\n';
  t.print(out);
}

inline int cmd_validate(const Options& o, std::ostream& out) {
  auto report = validate_document(parse_model_document(io::parse_file(o.model)));
  if (o.format == "data") {
    emit(out, to_json(report));
  } else {
    TextTable t({"severity", "code", "subject", "message"});
    for (const auto& f : report.findings) t.add({std::string(to_string(f.severity)), f.code, f.subject, f.message});
    t.print(out);
    out << (report.analysis_ready ? "analysis-ready" : "not analysis-ready") << " ("
        << report.count(FindingSeverity::Error) << " errors, " << report.count(FindingSeverity::Warning)
        << " warnings)\n";
  }
  return report.analysis_ready ? kOk : kFindings;
}

inline int cmd_trace(const Options& o, std::ostream& out) {
  if (o.from.empty() == o.to.empty()) throw UsageError("trace needs exactly one of --from or --to");
  auto g = load_model(o.model);
  if (!o.from.empty()) {
    auto up = trace_up(g, o.from);
    if (o.format == "data") {
      Json j;
      j["from"] = o.from;
      j.update(to_json(up));
      emit(out, j);
    } else {
      TextTable t({"kind", "id", "label"});
      for (const auto& id : up.hazards) t.add({"Hazard", id, g.node(id).label});
      for (const auto& id : up.losses) t.add({"MissionLoss", id, g.node(id).label});
      t.print(out);
    }
  } else {
    auto down = trace_down(g, o.to);
    if (o.format == "data") {
      emit(out, Json{{"to", o.to}, {"contributors", down}});
    } else {
      TextTable t({"kind", "id", "label"});
      for (const auto& id : down) t.add({std::string(to_string(g.node(id).kind)), id, g.node(id).label});
      t.print(out);
    }
  }
  return kOk;
}

inline int cmd_critical(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto critical = critical_subsystems(g);
  if (o.format == "data") {
    emit(out, to_json(critical));
  } else {
    TextTable t({"component", "kind", "hazard", "loss"});
    for (const auto& id : critical.components) {
      for (const auto& why : critical.justification.at(id))
        t.add({id, std::string(to_string(g.node(id).kind)), why.hazard.value_or("-"), why.loss});
    }
    t.print(out);
  }
  return kOk;
}

inline int cmd_threats(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto corpus = ThreatCorpus::load(corpus_path(o));
  MatchOptions match{o.top_k, o.threshold};
  std::vector<Mapping> mappings;
  if (!o.node.empty()) {
    mappings.push_back(map_component(corpus, g.node(o.node), match));
  } else {
    for (const auto& n : g.nodes()) {
      if (is_component(n.kind) && !descriptor_tokens(n).empty()) mappings.push_back(map_component(corpus, n, match));
    }
  }
  if (o.format == "data") {
    Json j = Json::array();
    for (const auto& m : mappings) j.push_back(to_json(m));
    emit(out, j);
  } else {
    for (std::size_t i = 0; i < mappings.size(); ++i) {
      if (i) out << '\n';
      print_mapping(out, mappings[i]);
    }
  }
  return kOk;
}

inline int cmd_surface(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto corpus = ThreatCorpus::load(corpus_path(o));
  auto surface = attack_surface(g, corpus, {o.top_k, o.threshold});
  if (o.format == "data") {
    emit(out, to_json(surface));
  } else {
    TextTable t({"entry point", "kind", "top vectors"});
    for (const auto& e : surface.entries) {
      std::vector<std::string> top;
      for (const auto& h : e.mapping.hits) {
        if (top.size() == 3) break;
        top.push_back(h.record_id);
      }
      t.add({e.node, std::string(to_string(g.node(e.node).kind)), top.empty() ? "-" : join(top, ", ")});
    }
    t.print(out);
  }
  return kOk;
}

inline int cmd_chains(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto chains = exploit_chains(g, critical_subsystems(g), o.max_len);
  std::string path = o.corpus;
  if (path.empty()) {
    if (const char* env = std::getenv("MISSIONWARE_CORPUS"); env && *env) path = env;
  }
  if (!path.empty()) annotate_chains(chains, g, ThreatCorpus::load(path), {o.top_k, o.threshold});
  if (o.format == "data") {
    emit(out, to_json(chains));
  } else {
    TextTable t({"hops", "path", "top vector per hop"});
    for (const auto& c : chains) {
      std::vector<std::string> vectors;
      for (const auto& m : c.per_hop_vectors) vectors.push_back(m && !m->hits.empty() ? m->hits.front().record_id : "-");
      t.add({std::to_string(c.length()), join(c.path, " -> "), join(vectors, " | ")});
    }
    t.print(out);
    out << chains.size() << " chains\n";
  }
  return kOk;
}

inline int cmd_apply(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto variants = load_variants(o.pattern);
  if (variants.size() != 1) throw UsageError("apply takes a single application or a list of applications");
  const auto& apps = variants.front().applications;
  auto rewritten = apply_all(g, apps);
  const bool nominal = preserves_nominal(g, rewritten);
  const auto report = validate(rewritten);
  if (!o.out.empty()) save_model(rewritten, o.out);
  if (o.format == "data") {
    if (o.out.empty()) {
      emit(out, to_json(rewritten));
    } else {
      emit(out, Json{{"out", o.out}, {"nominal_preserved", nominal}, {"validation", to_json(report)}});
    }
  } else {
    TextTable t({"pattern", "target", "cost"});
    for (const auto& a : apps) t.add({std::string(to_string(a.kind)), a.target, fixed(a.costs.total())});
    t.print(out);
    out << "nodes " << g.size() << " -> " << rewritten.size() << ", nominal behaviour "
        << (nominal ? "preserved" : "changed") << ", " << (report.analysis_ready ? "analysis-ready" : "not analysis-ready")
        << '\n';
  }
  return nominal && report.analysis_ready ? kOk : kFindings;
}

inline int cmd_score(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  RankingContext ctx;
  if (!o.weights.empty()) ctx.weights = parse_weights(o.weights);
  for (const auto& text : o.overrides) parse_override(text, ctx.overrides);
  ctx.max_len = o.max_len;
  ctx.aggregation = o.sum ? Aggregation::Sum : Aggregation::Max;

  if (o.pattern.empty()) {
    require_analysis_ready(g);
    auto chains = exploit_chains(g, critical_subsystems(g), ctx.max_len);
    auto scores = score_all(g, chains, ctx.overrides, ctx.weights, ctx.deltas);
    if (o.format == "data") {
      Json j = Json::array();
      for (const auto& s : scores) j.push_back(to_json(s));
      emit(out, j);
    } else {
      TextTable t({"loss", "severity", "attack complexity", "mitigability", "risk"});
      for (const auto& s : scores)
        t.add({s.loss, std::to_string(s.severity), fixed(s.attack_complexity, 2), fixed(s.mitigability, 2),
               fixed(s.scalar)});
      t.print(out);
    }
    return kOk;
  }

  auto ranking = rank_variants(g, load_variants(o.pattern), ctx);
  if (o.format == "data") {
    emit(out, to_json(ranking));
  } else {
    std::vector<std::string> header{"rank", "variant", "risk", "cost", "pareto"};
    for (const auto& s : ranking.variants.front().scores) header.push_back(s.loss);
    TextTable t(header);
    for (std::size_t i = 0; i < ranking.variants.size(); ++i) {
      const auto& v = ranking.variants[i];
      const bool front = std::find(ranking.pareto_front.begin(), ranking.pareto_front.end(), i) != ranking.pareto_front.end();
      std::vector<std::string> row{std::to_string(i + 1), v.id, fixed(v.aggregate_risk), fixed(v.total_cost),
                                   front ? "*" : ""};
      for (const auto& s : v.scores) row.push_back(fixed(s.scalar));
      t.add(row);
    }
    t.print(out);
  }
  return kOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  auto scenario = scenario_from_json(io::parse_file(o.scenario));
  auto result = run(g, scenario, o.trials, o.seed);
  std::optional<ExactResult> ex;
  if (o.exact) ex = exact(g, scenario);
  if (o.format == "data") {
    Json j;
    j["scenario"] = to_json(scenario);
    j["result"] = to_json(result);
    if (ex) j["exact"] = to_json(*ex);
    emit(out, j);
  } else {
    std::vector<std::string> header{"outcome", "frequency"};
    if (ex) header.push_back("exact");
    TextTable t(header);
    for (const auto& [id, f] : result.loss_frequency) {
      std::vector<std::string> row{id, fixed(f)};
      if (ex) row.push_back(fixed(ex->loss_probability.at(id)));
      t.add(row);
    }
    std::vector<std::string> row{"detection", fixed(result.detection_frequency)};
    if (ex) row.push_back(fixed(ex->detection_probability));
    t.add(row);
    out << to_string(scenario.kind) << ", " << result.trials << " trials, seed " << result.seed << '\n';
    t.print(out);
  }
  return kOk;
}

inline int cmd_export_dot(const Options& o, std::ostream& out) {
  auto g = load_model(o.model);
  if (o.out.empty()) {
    write_dot(g, out);
    return kOk;
  }
  std::ofstream file(o.out);
  if (!file) throw UsageError("cannot write " + o.out);
  write_dot(g, file);
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mission-aware analysis of cyber-physical system models", "missionware"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "data"}));

  std::vector<std::pair<CLI::App*, std::function<int(const Options&, std::ostream&)>>> commands;
  auto command = [&](const char* name, const char* about, auto fn) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("model", o.model, "Model file")->required();
    commands.emplace_back(sub, fn);
    return sub;
  };
  auto match_flags = [&](CLI::App* sub) {
    sub->add_option("--corpus", o.corpus, "Threat corpus file (default: $MISSIONWARE_CORPUS)");
    sub->add_option("--top-k", o.top_k, "Direct hits kept per component")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", o.threshold, "Minimum hit score")->check(CLI::NonNegativeNumber);
  };

  command("validate", "Check model structure and completeness", cmd_validate);
  auto* trace = command("trace", "Trace a component up to losses, or a loss down to contributors", cmd_trace);
  trace->add_option("--from", o.from, "Component or physical state");
  trace->add_option("--to", o.to, "Mission loss");
  command("critical", "List critical subsystems", cmd_critical);
  auto* threats = command("threats", "Map components to the threat corpus", cmd_threats);
  threats->add_option("--node", o.node, "Map one node only");
  match_flags(threats);
  match_flags(command("surface", "Entry points and their attack vectors", cmd_surface));
  auto* chains = command("chains", "Exploit chains from entry points to critical subsystems", cmd_chains);
  chains->add_option("--max-len", o.max_len, "Longest chain in hops")->check(CLI::PositiveNumber);
  match_flags(chains);
  auto* apply_cmd = command("apply", "Apply resilience patterns", cmd_apply);
  apply_cmd->add_option("--pattern", o.pattern, "Pattern application file")->required();
  apply_cmd->add_option("--out", o.out, "Write the rewritten model here");
  auto* score_cmd = command("score", "Risk scores, or a variant ranking with --pattern", cmd_score);
  score_cmd->add_option("--weights", o.weights, "Severity, complexity and mitigability weights: a,b,c");
  score_cmd->add_option("--override", o.overrides, "loss=complexity:X,mitigability:Y (repeatable)");
  score_cmd->add_option("--max-len", o.max_len, "Longest chain in hops")->check(CLI::PositiveNumber);
  score_cmd->add_option("--pattern", o.pattern, "Candidate variants to rank");
  score_cmd->add_flag("--sum", o.sum, "Aggregate variant risk by sum instead of max");
  auto* simulate = command("simulate", "Monte Carlo attack simulation", cmd_simulate);
  simulate->add_option("--scenario", o.scenario, "Scenario file")->required();
  simulate->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_flag("--exact", o.exact, "Also compute exact probabilities");
  auto* dot_cmd = command("export-dot", "Write the model as a Graphviz graph", cmd_export_dot);
  dot_cmd->add_option("--out", o.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kOk;
    }
    err << "missionware: " << e.what() << '\n';
    return kUsage;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(o, out);
    }
  } catch (const UsageError& e) {
    err << "missionware: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "missionware: " << e.what() << '\n';
    return is_finding(e.code()) ? kFindings : kUsage;
  } catch (const std::exception& e) {
    err << "missionware: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace missionware::cli
