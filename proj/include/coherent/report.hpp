#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherent/correction.hpp"
#include "coherent/document.hpp"

namespace coherent {

/// Command drivers behind the CLI. Each writes a human-readable report to
/// `out`, optionally fills a stable versioned JSON report, and returns the
/// process exit code: 0 success/coherent, 1 incoherent. Input problems
/// throw DocumentError (exit 2 at the CLI boundary).

int cmd_check(const AssessmentDocument& doc, std::ostream& out, nlohmann::json* report);

/// `corrected_doc`, when given, receives a full document with the corrected
/// values; feeding it back to cmd_check exits 0.
int cmd_correct(const AssessmentDocument& doc, std::ostream& out, nlohmann::json* report,
                AssessmentDocument* corrected_doc = nullptr);

int cmd_extend(const AssessmentDocument& doc, const std::vector<std::string>& target_labels,
               std::ostream& out, nlohmann::json* report);

int cmd_gain(const AssessmentDocument& doc, const std::vector<std::string>& stakes_text,
             const std::optional<std::vector<std::string>>& observed_labels, bool sweep,
             std::ostream& out, nlohmann::json* report);

/// Verdict/correction renderers shared by the commands (exposed for tests).
nlohmann::json verdict_to_json(const Verdict& verdict, const AtomSet& atoms);
nlohmann::json correction_to_json(const CorrectionResult& result, const AtomSet& atoms);

}  // namespace coherent
