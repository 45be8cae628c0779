#include "coherent/document.hpp"

#include <fstream>

namespace coherent {

Kind parse_kind(const std::string& text) {
  if (text == "belief") return Kind::Belief;
  if (text == "probability") return Kind::Probability;
  if (text == "necessity") return Kind::Necessity;
  throw DocumentError("unknown kind '" + text + "' (expected belief, probability or necessity)");
}

Rational parse_value(const nlohmann::json& value, const std::string& where) {
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (value.is_string()) {
    auto parsed = parse_rational(value.get<std::string>());
    if (!parsed)
      throw DocumentError("invalid rational '" + value.get<std::string>() + "' at " + where);
    return *parsed;
  }
  throw DocumentError("value at " + where +
                      " must be a string rational (\"3/8\", \"0.25\") or an integer");
}

AssessmentDocument parse_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw DocumentError("document root must be a JSON object");
  AssessmentDocument out;

  if (!doc.contains("worlds") || !doc["worlds"].is_array() || doc["worlds"].empty())
    throw DocumentError("'worlds' must be a non-empty array of labels");
  for (const auto& w : doc["worlds"]) {
    if (!w.is_string()) throw DocumentError("'worlds' entries must be strings");
    out.worlds.push_back(w.get<std::string>());
  }

  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw DocumentError("'kind' must be one of belief, probability, necessity");
  out.kind = parse_kind(doc["kind"].get<std::string>());

  if (!doc.contains("assessments") || !doc["assessments"].is_array())
    throw DocumentError("'assessments' must be an array");
  std::size_t index = 0;
  for (const auto& row : doc["assessments"]) {
    if (!row.is_object() || !row.contains("event") || !row.contains("value"))
      throw DocumentError("assessment #" + std::to_string(index) +
                          " needs 'event' and 'value' fields");
    AssessmentRow parsed;
    if (!row["event"].is_array())
      throw DocumentError("assessment #" + std::to_string(index) +
                          ": 'event' must be an array of world labels");
    for (const auto& label : row["event"]) {
      if (!label.is_string())
        throw DocumentError("assessment #" + std::to_string(index) +
                            ": event labels must be strings");
      parsed.event.push_back(label.get<std::string>());
    }
    parsed.value = parse_value(row["value"], "assessment #" + std::to_string(index));
    if (parsed.value < 0 || parsed.value > 1)
      throw DocumentError("assessment #" + std::to_string(index) + ": value " +
                          format_rational(parsed.value) + " lies outside [0,1]");
    out.rows.push_back(std::move(parsed));
    ++index;
  }

  if (doc.contains("options")) {
    const auto& options = doc["options"];
    if (!options.is_object()) throw DocumentError("'options' must be an object");
    if (options.contains("rule")) {
      if (!options["rule"].is_string()) throw DocumentError("options.rule must be a string");
      out.options.rule = options["rule"].get<std::string>();
    }
    if (options.contains("atom_limit")) {
      if (!options["atom_limit"].is_number_unsigned())
        throw DocumentError("options.atom_limit must be a non-negative integer");
      out.options.atom_limit = options["atom_limit"].get<std::size_t>();
    }
    if (options.contains("chain_limit")) {
      if (!options["chain_limit"].is_number_unsigned())
        throw DocumentError("options.chain_limit must be a non-negative integer");
      out.options.chain_limit = options["chain_limit"].get<std::size_t>();
    }
    if (options.contains("tolerance")) {
      if (!options["tolerance"].is_string())
        throw DocumentError("options.tolerance must be a string decimal");
      out.options.tolerance = options["tolerance"].get<std::string>();
    }
  }
  return out;
}

AssessmentDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open document '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw DocumentError("cannot parse '" + path + "': " + err.what());
  }
  return parse_document(doc);
}

nlohmann::json document_to_json(const AssessmentDocument& doc) {
  nlohmann::json out;
  out["worlds"] = doc.worlds;
  out["kind"] = kind_name(doc.kind);
  out["assessments"] = nlohmann::json::array();
  for (const auto& row : doc.rows)
    out["assessments"].push_back(
        {{"event", row.event}, {"value", format_rational(row.value)}});
  out["options"] = {{"rule", doc.options.rule},
                    {"atom_limit", doc.options.atom_limit},
                    {"chain_limit", doc.options.chain_limit},
                    {"tolerance", doc.options.tolerance}};
  return out;
}

Assessment to_assessment(const AssessmentDocument& doc) {
  UniversePtr universe;
  try {
    universe = Universe::make(doc.worlds);
  } catch (const std::invalid_argument& err) {
    throw DocumentError(err.what());
  }
  std::vector<Event> events;
  std::vector<Rational> values;
  events.reserve(doc.rows.size());
  for (const auto& row : doc.rows) {
    try {
      events.push_back(Event::of_labels(universe, row.event));
    } catch (const std::invalid_argument& err) {
      throw DocumentError(err.what());
    }
    values.push_back(row.value);
  }
  return Assessment(EventFamily(universe, std::move(events)), std::move(values), doc.kind);
}

}  // namespace coherent
