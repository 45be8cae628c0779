#include "coherent/report.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <sstream>

namespace coherent {

namespace {

constexpr int kSchemaVersion = 1;

std::shared_ptr<const AtomSet> atoms_for(const Assessment& assessment) {
  if (assessment.family.size() == 0)
    return std::make_shared<const AtomSet>(AtomSet::trivial(assessment.family.universe()));
  return std::make_shared<const AtomSet>(AtomSet::compute(assessment.family));
}

nlohmann::json event_labels(const AtomSet& atoms, AtomMask mask) {
  nlohmann::json out = nlohmann::json::array();
  const Event event = atoms.event_of(mask);
  for (std::size_t w = 0; w < event.universe()->size(); ++w)
    if (event.contains(w)) out.push_back(event.universe()->label(w));
  return out;
}

nlohmann::json weights_to_json(const AtomSet& atoms,
                               const std::map<AtomMask, Rational>& weights) {
  std::vector<AtomMask> order;
  order.reserve(weights.size());
  for (const auto& [mask, w] : weights) order.push_back(mask);
  std::sort(order.begin(), order.end(), canonical_mask_less);
  nlohmann::json out = nlohmann::json::array();
  for (AtomMask mask : order)
    out.push_back({{"event", event_labels(atoms, mask)},
                   {"weight", format_rational(weights.at(mask))}});
  return out;
}

nlohmann::json chain_to_json(const AtomSet& atoms, const Chain& chain) {
  nlohmann::json out = nlohmann::json::array();
  for (AtomMask element : chain.elements) out.push_back(event_labels(atoms, element));
  return out;
}

nlohmann::json stakes_to_json(const std::vector<Rational>& stakes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : stakes) out.push_back(format_rational(s));
  return out;
}

std::string chain_to_text(const AtomSet& atoms, const Chain& chain) {
  std::ostringstream out;
  for (std::size_t k = 0; k < chain.elements.size(); ++k) {
    if (k > 0) out << " < ";
    out << atoms.event_of(chain.elements[k]).to_string();
  }
  return out.str();
}

void print_weights(std::ostream& out, const AtomSet& atoms,
                   const std::map<AtomMask, Rational>& weights) {
  std::vector<AtomMask> order;
  for (const auto& [mask, w] : weights) order.push_back(mask);
  std::sort(order.begin(), order.end(), canonical_mask_less);
  for (AtomMask mask : order)
    out << "  " << atoms.event_of(mask).to_string() << "  "
        << format_rational(weights.at(mask)) << "\n";
}

CheckLimits limits_of(const AssessmentDocument& doc) {
  CheckLimits limits;
  limits.atom_limit = doc.options.atom_limit;
  limits.chain_limit = doc.options.chain_limit;
  return limits;
}

const AnyRule& rule_of(const AssessmentDocument& doc, const RuleRegistry& registry) {
  const AnyRule* rule = registry.find(doc.options.rule);
  if (!rule)
    throw DocumentError("unknown scoring rule '" + doc.options.rule + "'");
  return *rule;
}

std::string divergence_text(const CorrectionResult& result) {
  if (result.exact) return format_rational(result.divergence_rational());
  return format_highfloat(result.divergence_value());
}

}  // namespace

nlohmann::json verdict_to_json(const Verdict& verdict, const AtomSet& atoms) {
  nlohmann::json report;
  report["schema"] = "coherent.verdict";
  report["schema_version"] = kSchemaVersion;
  report["kind"] = kind_name(verdict.kind);
  report["coherent"] = verdict.coherent;
  report["witness"] =
      verdict.witness ? weights_to_json(atoms, verdict.witness->weights()) : nlohmann::json();
  report["witness_chain"] =
      verdict.witness_chain ? chain_to_json(atoms, *verdict.witness_chain) : nlohmann::json();
  if (verdict.dutch_book) {
    report["dutch_book"] = {{"stakes", stakes_to_json(verdict.dutch_book->stakes)},
                            {"gain_bound", format_rational(verdict.dutch_book->gain_bound)}};
  } else {
    report["dutch_book"] = nullptr;
  }
  report["chain_refutations"] = nlohmann::json::array();
  for (const auto& refutation : verdict.chain_refutations)
    report["chain_refutations"].push_back(
        {{"permutation_index", refutation.permutation_index},
         {"permutation", refutation.permutation},
         {"stakes", stakes_to_json(refutation.stakes)},
         {"gain_bound", format_rational(refutation.gain_bound)}});
  if (verdict.kind == Kind::Necessity && !verdict.coherent)
    report["chains_all_infeasible"] = verdict.chains_all_infeasible;
  else
    report["chains_all_infeasible"] = nullptr;
  return report;
}

nlohmann::json correction_to_json(const CorrectionResult& result, const AtomSet& atoms) {
  nlohmann::json report;
  report["schema"] = "coherent.correction";
  report["schema_version"] = kSchemaVersion;
  report["kind"] = kind_name(result.mode);
  report["rule"] = result.rule_name;
  report["exact"] = result.exact;
  report["corrected"] = nlohmann::json::array();
  for (const auto& value : result.corrected)
    report["corrected"].push_back(format_rational(value));
  report["divergence"] = divergence_text(result);
  report["divergence_exact"] = result.exact;
  report["weights"] = weights_to_json(atoms, result.hull_weights);
  report["degenerate"] = result.weight_degenerate;
  report["chain"] = result.chain ? chain_to_json(atoms, *result.chain) : nlohmann::json();
  return report;
}

int cmd_check(const AssessmentDocument& doc, std::ostream& out, nlohmann::json* report) {
  const Assessment assessment = to_assessment(doc);
  const Verdict verdict = check(assessment, limits_of(doc));
  const auto atoms = atoms_for(assessment);

  out << "verdict: " << (verdict.coherent ? "coherent" : "incoherent") << " ("
      << kind_name(verdict.kind) << ")\n";
  if (verdict.witness) {
    out << "witness mass:\n";
    print_weights(out, *atoms, verdict.witness->weights());
  }
  if (verdict.witness_chain)
    out << "witness chain: " << chain_to_text(*atoms, *verdict.witness_chain) << "\n";
  if (verdict.dutch_book) {
    out << "dutch book stakes:\n";
    for (std::size_t i = 0; i < verdict.dutch_book->stakes.size(); ++i)
      out << "  " << assessment.family[i].to_string() << "  "
          << format_rational(verdict.dutch_book->stakes[i]) << "\n";
    out << "gain bound: " << format_rational(verdict.dutch_book->gain_bound)
        << "  (every resolution loses at least this much)\n";
  }
  if (!verdict.chain_refutations.empty()) {
    out << "per-chain refutations: " << verdict.chain_refutations.size() << " chains, bounds";
    Rational worst = verdict.chain_refutations.front().gain_bound;
    for (const auto& refutation : verdict.chain_refutations)
      worst = std::max(worst, refutation.gain_bound);
    out << " at or below " << format_rational(worst) << "\n";
  }
  if (verdict.kind == Kind::Necessity && !verdict.coherent && verdict.chains_all_infeasible)
    out << "every atom chain is infeasible\n";

  if (report) *report = verdict_to_json(verdict, *atoms);
  return verdict.coherent ? 0 : 1;
}

int cmd_correct(const AssessmentDocument& doc, std::ostream& out, nlohmann::json* report,
                AssessmentDocument* corrected_doc) {
  const Assessment assessment = to_assessment(doc);
  const RuleRegistry registry = RuleRegistry::standard();
  const AnyRule& rule = rule_of(doc, registry);

  CorrectionOptions options;
  options.limits = limits_of(doc);
  if (auto tolerance = parse_rational(doc.options.tolerance))
    options.tolerance = to_highfloat(*tolerance);
  else
    throw DocumentError("options.tolerance is not a decimal: '" + doc.options.tolerance + "'");

  CorrectionResult result;
  try {
    result = correct(assessment, rule, options);
  } catch (const std::invalid_argument& err) {
    throw DocumentError(err.what());
  }
  const auto atoms = atoms_for(assessment);

  out << "rule: " << result.rule_name << (result.exact ? " (exact)" : " (high precision)")
      << "\n";
  out << "corrected values:\n";
  for (std::size_t i = 0; i < result.corrected.size(); ++i)
    out << "  " << assessment.family[i].to_string() << "  "
        << format_rational(assessment.values[i]) << " -> "
        << format_rational(result.corrected[i]) << "\n";
  out << "divergence: " << divergence_text(result) << "\n";
  out << "hull weights" << (result.weight_degenerate ? " (degenerate family; representative)" : "")
      << ":\n";
  print_weights(out, *atoms, result.hull_weights);
  if (result.chain) out << "chain: " << chain_to_text(*atoms, *result.chain) << "\n";

  if (report) *report = correction_to_json(result, *atoms);
  if (corrected_doc) {
    *corrected_doc = doc;
    for (std::size_t i = 0; i < result.corrected.size(); ++i)
      corrected_doc->rows[i].value = result.corrected[i];
  }
  return 0;
}

int cmd_extend(const AssessmentDocument& doc, const std::vector<std::string>& target_labels,
               std::ostream& out, nlohmann::json* report) {
  const Assessment assessment = to_assessment(doc);
  Event target = [&]() {
    try {
      return Event::of_labels(assessment.family.universe(), target_labels);
    } catch (const std::invalid_argument& err) {
      throw DocumentError(err.what());
    }
  }();

  try {
    auto [lo, hi] = extension_interval(assessment, target, limits_of(doc));
    out << "coherent extension interval for " << target.to_string() << ": ["
        << format_rational(lo) << ", " << format_rational(hi) << "]\n";
    if (report) {
      *report = {{"schema", "coherent.extension"},
                 {"schema_version", kSchemaVersion},
                 {"kind", kind_name(assessment.kind)},
                 {"target", target_labels},
                 {"lo", format_rational(lo)},
                 {"hi", format_rational(hi)}};
    }
    return 0;
  } catch (const IncoherentAssessmentError& err) {
    out << "incoherent assessment: " << err.what() << "\n";
    out << "hint: run `correct` first, then extend the corrected document\n";
    if (report)
      *report = {{"schema", "coherent.extension"},
                 {"schema_version", kSchemaVersion},
                 {"error", "incoherent"},
                 {"hint", "run correct first"}};
    return 1;
  }
}

int cmd_gain(const AssessmentDocument& doc, const std::vector<std::string>& stakes_text,
             const std::optional<std::vector<std::string>>& observed_labels, bool sweep,
             std::ostream& out, nlohmann::json* report) {
  const Assessment assessment = to_assessment(doc);
  if (stakes_text.size() != assessment.size())
    throw DocumentError("need exactly one stake per assessed event (" +
                        std::to_string(assessment.size()) + " events, " +
                        std::to_string(stakes_text.size()) + " stakes)");
  std::vector<Rational> stakes;
  stakes.reserve(stakes_text.size());
  for (const auto& text : stakes_text) {
    auto parsed = parse_rational(text);
    if (!parsed) throw DocumentError("invalid rational stake '" + text + "'");
    stakes.push_back(*parsed);
  }
  if (!sweep && !observed_labels)
    throw DocumentError("gain needs --observed or --sweep");

  const auto atoms = atoms_for(assessment);
  nlohmann::json gains = nlohmann::json::array();
  std::optional<Rational> max_gain;
  const auto record = [&](const Event& observed) {
    const Rational gain = [&]() {
      try {
        return evaluate_gain(assessment, stakes, observed);
      } catch (const std::invalid_argument& err) {
        throw DocumentError(err.what());
      }
    }();
    out << "  " << observed.to_string() << "  " << format_rational(gain) << "\n";
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t w = 0; w < observed.universe()->size(); ++w)
      if (observed.contains(w)) labels.push_back(observed.universe()->label(w));
    gains.push_back({{"observed", labels}, {"gain", format_rational(gain)}});
    if (!max_gain || gain > *max_gain) max_gain = gain;
  };

  out << "gain per observed event:\n";
  if (sweep) {
    for (AtomMask column : enumerate_nonempty_events(*atoms, doc.options.atom_limit))
      record(atoms->event_of(column));
  } else {
    record(Event::of_labels(assessment.family.universe(), *observed_labels));
  }
  if (max_gain) out << "max gain: " << format_rational(*max_gain) << "\n";

  if (report) {
    *report = {{"schema", "coherent.gain"},
               {"schema_version", kSchemaVersion},
               {"kind", kind_name(assessment.kind)},
               {"stakes", stakes_to_json(stakes)},
               {"gains", gains},
               {"max_gain", max_gain ? nlohmann::json(format_rational(*max_gain))
                                     : nlohmann::json()}};
  }
  return 0;
}

}  // namespace coherent
