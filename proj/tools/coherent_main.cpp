#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coherent/report.hpp"

namespace {

using namespace coherent;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonArgs {
  std::string file;
  std::string kind;
  std::string rule;
  std::string json_path;
  std::size_t atom_limit = 0;
  std::size_t chain_limit = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("file", args.file, "assessment document (JSON)")->required();
  cmd->add_option("--kind", args.kind, "override the document kind")
      ->check(CLI::IsMember({"belief", "probability", "necessity"}));
  cmd->add_option("--rule", args.rule, "scoring rule (brier, log, spherical)");
  cmd->add_option("--json", args.json_path, "write the machine-readable report here");
  cmd->add_option("--atom-limit", args.atom_limit, "largest atom count to enumerate");
  cmd->add_option("--chain-limit", args.chain_limit, "largest atom count for chain search");
}

AssessmentDocument load_with_overrides(const CommonArgs& args) {
  AssessmentDocument doc = load_document(args.file);
  if (!args.kind.empty()) doc.kind = parse_kind(args.kind);
  if (!args.rule.empty()) doc.options.rule = args.rule;
  if (args.atom_limit > 0) doc.options.atom_limit = args.atom_limit;
  if (args.chain_limit > 0) doc.options.chain_limit = args.chain_limit;
  return doc;
}

void write_json(const std::string& path, const nlohmann::json& report) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw DocumentError("cannot write report to '" + path + "'");
  out << report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherence checking, Dutch-book certificates and scoring-rule "
               "corrections for belief, probability and necessity assessments"};
  app.require_subcommand(1);

  CommonArgs check_args, correct_args, extend_args, gain_args;
  std::string correct_out, extend_target, gain_observed, gain_stakes, correct_tolerance;
  bool gain_sweep = false;

  CLI::App* check_cmd = app.add_subcommand("check", "decide coherence, emit a certificate");
  add_common(check_cmd, check_args);

  CLI::App* correct_cmd =
      app.add_subcommand("correct", "project an incoherent assessment back onto coherence");
  add_common(correct_cmd, correct_args);
  correct_cmd->add_option("--out", correct_out, "write the corrected document here");
  correct_cmd->add_option("--tolerance", correct_tolerance,
                          "duality-gap tolerance for non-Brier rules");

  CLI::App* extend_cmd =
      app.add_subcommand("extend", "coherent value interval for a new event");
  add_common(extend_cmd, extend_args);
  extend_cmd
      ->add_option("--target", extend_target, "target event: comma-separated world labels")
      ->required();

  CLI::App* gain_cmd = app.add_subcommand("gain", "evaluate a betting gain");
  add_common(gain_cmd, gain_args);
  gain_cmd->add_option("--stakes", gain_stakes, "comma-separated stakes, one per event")
      ->required();
  gain_cmd->add_option("--observed", gain_observed,
                       "observed event: comma-separated world labels");
  gain_cmd->add_flag("--sweep", gain_sweep, "evaluate on every non-empty algebra element");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json report;
    int exit_code = 0;
    if (check_cmd->parsed()) {
      AssessmentDocument doc = load_with_overrides(check_args);
      exit_code = cmd_check(doc, std::cout, &report);
      write_json(check_args.json_path, report);
    } else if (correct_cmd->parsed()) {
      AssessmentDocument doc = load_with_overrides(correct_args);
      if (!correct_tolerance.empty()) doc.options.tolerance = correct_tolerance;
      AssessmentDocument corrected;
      exit_code = cmd_correct(doc, std::cout, &report, &corrected);
      write_json(correct_args.json_path, report);
      if (!correct_out.empty()) {
        std::ofstream out(correct_out);
        if (!out) throw DocumentError("cannot write document to '" + correct_out + "'");
        out << document_to_json(corrected).dump(2) << "\n";
      }
    } else if (extend_cmd->parsed()) {
      AssessmentDocument doc = load_with_overrides(extend_args);
      exit_code = cmd_extend(doc, split_list(extend_target), std::cout, &report);
      write_json(extend_args.json_path, report);
    } else if (gain_cmd->parsed()) {
      AssessmentDocument doc = load_with_overrides(gain_args);
      std::optional<std::vector<std::string>> observed;
      if (gain_cmd->count("--observed") > 0) observed = split_list(gain_observed);
      exit_code = cmd_gain(doc, split_list(gain_stakes), observed, gain_sweep, std::cout,
                           &report);
      write_json(gain_args.json_path, report);
    }
    return exit_code;
  } catch (const DocumentError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const SizeLimitError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
