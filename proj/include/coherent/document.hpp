#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherent/coherence.hpp"
#include "coherent/numeric.hpp"

namespace coherent {

/// Input problems: malformed JSON, unknown labels, unparsable rationals.
/// The CLI maps these to exit code 2.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DocumentOptions {
  std::string rule = "brier";
  std::size_t atom_limit = kDefaultAtomLimit;
  std::size_t chain_limit = kDefaultChainLimit;
  /// Conditional-gradient stopping tolerance for non-Brier corrections.
  std::string tolerance = "1e-9";
};

struct AssessmentRow {
  std::vector<std::string> event;
  Rational value;
};

/// The JSON document format: world labels, a kind tag, event/value rows,
/// and optional engine options. Values are exact rationals, written as
/// "p/q" strings or decimal literals.
struct AssessmentDocument {
  std::vector<std::string> worlds;
  Kind kind = Kind::Belief;
  std::vector<AssessmentRow> rows;
  DocumentOptions options;
};

Kind parse_kind(const std::string& text);

AssessmentDocument parse_document(const nlohmann::json& doc);
AssessmentDocument load_document(const std::string& path);
nlohmann::json document_to_json(const AssessmentDocument& doc);

/// Materializes universe, events and values. Throws DocumentError on
/// unknown labels or out-of-range values.
Assessment to_assessment(const AssessmentDocument& doc);

/// Parses a value field ("p/q", decimal literal, or JSON integer).
Rational parse_value(const nlohmann::json& value, const std::string& where);

}  // namespace coherent
