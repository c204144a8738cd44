#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ipelicit/campaign.hpp"
#include "ipelicit/coherence.hpp"
#include "ipelicit/decision.hpp"
#include "ipelicit/elicit.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/eval.hpp"
#include "ipelicit/json_io.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/mock.hpp"
#include "ipelicit/prompts.hpp"
#include "ipelicit/record_eval.hpp"
#include "ipelicit/report.hpp"
#include "ipelicit/scores.hpp"
#include "ipelicit/synth.hpp"
#include "ipelicit/types.hpp"

namespace py = pybind11;
using namespace ipelicit;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

py::object json_module() { return py::module_::import("json"); }

py::object to_py(const ojson& j) { return json_module().attr("loads")(j.dump()); }

ojson from_py(const py::object& o) {
  return ojson::parse(json_module().attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Imprecise-probability uncertainty elicitation for language models";

  static auto* exc = new py::exception<Error>(m, "IpelicitError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object cls = *exc;
      py::object err = cls(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      py::set_error(cls, err);
    }
  });

  py::enum_<AnswerFolding>(m, "AnswerFolding")
      .value("CASE_INSENSITIVE", AnswerFolding::kCaseInsensitive)
      .value("CASE_SENSITIVE", AnswerFolding::kCaseSensitive);

  m.def("fold_answer", &fold_answer);

  py::class_<CandidateSet>(m, "CandidateSet")
      .def(py::init(&CandidateSet::make), py::arg("answers"), py::arg("open_ended") = false,
           py::arg("folding") = AnswerFolding::kCaseInsensitive)
      .def_property_readonly("answers", &CandidateSet::answers)
      .def_property_readonly("open_ended", &CandidateSet::open_ended)
      .def_property_readonly("folding", &CandidateSet::folding)
      .def("index_of", &CandidateSet::index_of)
      .def("__len__", &CandidateSet::size)
      .def("__getitem__",
           [](const CandidateSet& c, std::size_t i) {
             if (i >= c.size()) throw py::index_error();
             return c[i];
           })
      .def("__eq__", &CandidateSet::operator==)
      .def("__repr__", [](const CandidateSet& c) { return "CandidateSet(" + to_json(c).dump() + ")"; });

  py::class_<PrecisePMF>(m, "PrecisePMF")
      .def(py::init<CandidateSet, std::vector<double>>(), py::arg("candidates"), py::arg("probs"))
      .def_property_readonly("candidates", &PrecisePMF::candidates)
      .def_property_readonly("probs", [](const PrecisePMF& p) { return to_vec(p.probs()); })
      .def("__len__", &PrecisePMF::size);

  py::class_<ProbabilityIntervalSet>(m, "ProbabilityIntervalSet")
      .def(py::init<CandidateSet, std::vector<double>, std::vector<double>>(),
           py::arg("candidates"), py::arg("lower"), py::arg("upper"))
      .def_property_readonly("candidates", &ProbabilityIntervalSet::candidates)
      .def_property_readonly("lower", [](const ProbabilityIntervalSet& s) { return to_vec(s.lower()); })
      .def_property_readonly("upper", [](const ProbabilityIntervalSet& s) { return to_vec(s.upper()); })
      .def("__len__", &ProbabilityIntervalSet::size);

  py::class_<CredalSet>(m, "CredalSet")
      .def(py::init<CandidateSet, std::vector<PrecisePMF>, std::vector<std::string>>(),
           py::arg("candidates"), py::arg("members"),
           py::arg("member_tags") = std::vector<std::string>{})
      .def_property_readonly("candidates", &CredalSet::candidates)
      .def_property_readonly("members", &CredalSet::members)
      .def_property_readonly("member_tags", &CredalSet::member_tags)
      .def("__len__", &CredalSet::size);

  py::class_<PossibilityAssignment>(m, "PossibilityAssignment")
      .def(py::init<CandidateSet, std::vector<double>, std::optional<double>>(),
           py::arg("candidates"), py::arg("scores"), py::arg("none_of_above") = std::nullopt)
      .def_property_readonly("candidates", &PossibilityAssignment::candidates)
      .def_property_readonly("scores",
                             [](const PossibilityAssignment& a) { return to_vec(a.raw_scores()); })
      .def_property_readonly("none_of_above", &PossibilityAssignment::none_of_above)
      .def("combined_scores", &PossibilityAssignment::combined_scores);

  m.def("build_pmf",
        [](const CandidateSet& c, const std::vector<double>& w, bool renormalize) {
          return build_pmf(c, w, renormalize);
        },
        py::arg("candidates"), py::arg("weights"), py::arg("renormalize") = false);
  m.def("interval_from_credal", &interval_from_credal);

  // coherence
  py::enum_<ViolationCode>(m, "ViolationCode")
      .value("NEGATIVE", ViolationCode::kNegative)
      .value("ABOVE_ONE", ViolationCode::kAboveOne)
      .value("SUM", ViolationCode::kSum)
      .value("LOWER_SUM", ViolationCode::kLowerSum)
      .value("UPPER_SUM", ViolationCode::kUpperSum)
      .value("ALL_ZERO", ViolationCode::kAllZero)
      .value("PARSE", ViolationCode::kParse)
      .value("EMPTY_LIST", ViolationCode::kEmptyList);

  py::class_<Violation>(m, "Violation")
      .def_readonly("code", &Violation::code)
      .def_readonly("index", &Violation::index)
      .def_readonly("observed", &Violation::observed)
      .def_readonly("bound", &Violation::bound);

  py::class_<VerdictReport>(m, "VerdictReport")
      .def_readonly("passed", &VerdictReport::passed)
      .def_readonly("violations", &VerdictReport::violations)
      .def("describe", &VerdictReport::describe);

  m.def("verify_axioms", [](const std::vector<double>& prices) { return verify_axioms(prices); });
  m.def("verify_interval_coherence", &verify_interval_coherence, py::arg("intervals"),
        py::arg("enforce_upper") = false);
  m.def("verify_possibility", &verify_possibility);
  m.def("normalize_possibility", &normalize_possibility);

  // mmi
  py::enum_<MmiMode>(m, "MmiMode")
      .value("EXACT_EVENT_ENUM", MmiMode::kExactEventEnum)
      .value("UPPER_BOUND", MmiMode::kUpperBound)
      .value("INTERVAL_WIDTH", MmiMode::kIntervalWidth)
      .value("POSSIBILITY_ORDER_STAT", MmiMode::kPossibilityOrderStat)
      .value("POSSIBILITY_BINARY", MmiMode::kPossibilityBinary);

  py::class_<MmiScore>(m, "MmiScore")
      .def_readonly("value", &MmiScore::value)
      .def_readonly("mode", &MmiScore::mode)
      .def_readonly("event_count", &MmiScore::event_count);

  m.def("interval_width_mmi", py::overload_cast<double, double>(&interval_width_mmi));
  m.def("mmi_upper_bound",
        [](const std::vector<double>& lowers) { return mmi_upper_bound(lowers); });
  m.def("mmi_upper_bound", py::overload_cast<const ProbabilityIntervalSet&>(&mmi_upper_bound));
  m.def("mmi_upper_bound", py::overload_cast<const CredalSet&>(&mmi_upper_bound));
  m.def("exact_mmi_credal", &exact_mmi_credal, py::arg("credal"),
        py::arg("cap") = kExactEnumCap);
  m.def("possibility_mmi", &possibility_mmi);
  m.def("possibility_binary_mmi", &possibility_binary_mmi);
  m.def("possibility_answer_mmi", &possibility_answer_mmi);

  // scores
  m.def("entropy", [](const std::vector<double>& p) { return entropy(p); });
  m.def("entropy", [](const PrecisePMF& p) { return entropy(p); });
  m.def("bernoulli_entropy", &bernoulli_entropy);
  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("cross_entropy", &Decomposition::cross_entropy)
      .def_readonly("entropy_au", &Decomposition::entropy_au)
      .def_readonly("kl_eu", &Decomposition::kl_eu)
      .def_readonly("smoothed", &Decomposition::smoothed);
  m.def("ce_kl_decomposition", &ce_kl_decomposition, py::arg("p_star"), py::arg("p_hat"),
        py::arg("smooth") = true);
  m.def("combined_score", &combined_score);

  // decision
  py::enum_<DecisionRule>(m, "DecisionRule")
      .value("PRECISE_ARGMAX", DecisionRule::kPreciseArgmax)
      .value("MAXIMIN", DecisionRule::kMaximin)
      .value("MAXIMAX", DecisionRule::kMaximax)
      .value("BAYES_EU", DecisionRule::kBayesEu)
      .value("UTILITARIAN_ARGMAX", DecisionRule::kUtilitarianArgmax);
  py::class_<DecisionOutcome>(m, "DecisionOutcome")
      .def_readonly("chosen_index", &DecisionOutcome::chosen_index)
      .def_readonly("chosen_answer", &DecisionOutcome::chosen_answer)
      .def_readonly("rule", &DecisionOutcome::rule)
      .def_readonly("tie_broken", &DecisionOutcome::tie_broken);
  m.def("precise_argmax", &precise_argmax);
  m.def("maximin", &maximin);
  m.def("maximax", &maximax);
  m.def("bayes_expected_utility", &bayes_expected_utility);
  m.def("utilitarian_aggregate", &utilitarian_aggregate);

  // synth
  auto s = m.def_submodule("synth", "Synthetic in-context learning tasks");
  s.def("apply_rotation", &synth::apply_rotation);
  s.def("apply_cyclic_shift",
        [](std::string_view str, int n, bool right) {
          return synth::apply_cyclic_shift(
              str, n, right ? synth::ShiftDirection::kRight : synth::ShiftDirection::kLeft);
        },
        py::arg("s"), py::arg("n"), py::arg("right") = false);
  s.def("apply_transform", [](std::string_view spec, std::string_view str) {
    return synth::apply_transform(synth::TransformSpec::parse(spec), str);
  });
  s.def("inject_case_noise", [](std::string_view str, double p, std::uint64_t seed) {
    return synth::inject_case_noise(str, {p, seed});
  });
  s.def("casing_probability", &synth::casing_probability);
  s.def("ground_truth_variants",
        [](std::string_view clean, double p) {
          py::list out;
          for (const auto& v : synth::ground_truth_variants(clean, p)) {
            out.append(py::make_tuple(v.text, v.lowercase_count, v.prob));
          }
          return out;
        });
  s.def("permissive_match", &synth::permissive_match);
  s.def("icl_question",
        [](std::string_view spec, double p, int m_examples, int word_length, std::uint64_t seed) {
          const auto task = synth::generate_icl_task(synth::TransformSpec::parse(spec),
                                                     {p, seed}, m_examples, word_length, seed);
          return py::make_tuple(synth::render_icl_question(task), task.clean_query_output);
        },
        py::arg("spec") = "rotation:13,cyclic_shift:1", py::arg("p") = 0.25,
        py::arg("m") = 80, py::arg("word_length") = 5, py::arg("seed") = 0);

  // elicitation
  m.def("render_prompt",
        [](const std::string& kind, std::string_view question,
           const std::optional<CandidateSet>& candidates) {
          return render_prompt(prompt_kind_from_string(kind), question, candidates);
        },
        py::arg("kind"), py::arg("question"), py::arg("candidates") = std::nullopt);

  m.def("parse_and_verify",
        [](const std::string& kind, std::string_view raw,
           const std::optional<CandidateSet>& candidates, bool enforce_upper) {
          const auto k = prompt_kind_from_string(kind);
          const auto report = parse_structured_report(k, raw, candidates);
          return verify_report(report, candidates, enforce_upper);
        },
        py::arg("kind"), py::arg("reply"), py::arg("candidates") = std::nullopt,
        py::arg("enforce_upper") = false);

  // Elicits through a mock script (a dict in the script file format) and
  // returns the serialized result.
  m.def("elicit_scripted",
        [](const py::object& script, const std::string& kind, std::string_view question,
           const std::optional<CandidateSet>& candidates, int max_attempts) {
          ScriptedClient client(MockScript::from_json(from_py(script).dump()));
          ModelEndpoint endpoint;
          endpoint.name = "mock";
          endpoint.base_url = "mock://inline";
          endpoint.model_id = "mock";
          ElicitOptions options;
          options.max_attempts = max_attempts;
          try {
            return to_py(to_json(elicit_with_retry(client, endpoint, prompt_kind_from_string(kind),
                                                   question, candidates, options)));
          } catch (const ElicitationFailure& f) {
            return to_py(to_json(f.result()));
          }
        },
        py::arg("script"), py::arg("kind"), py::arg("question"),
        py::arg("candidates") = std::nullopt, py::arg("max_attempts") = 5);

  // evaluation
  m.def("auroc", [](const std::vector<double>& scores, const std::vector<int>& labels) {
    return auroc(scores, labels);
  });
  m.def("concordance_index", [](const std::vector<double>& scores, const std::vector<double>& refs) {
    return concordance_index(scores, refs);
  });

  // campaigns
  m.def("run_campaign",
        [](const std::filesystem::path& config_path) {
          const auto summary = run_campaign(CampaignConfig::load(config_path));
          py::dict d;
          d["planned"] = summary.planned;
          d["skipped"] = summary.skipped;
          d["written"] = summary.written;
          d["failed"] = summary.failed;
          d["records_path"] = summary.records_path.string();
          return d;
        },
        py::arg("config_path"));
  m.def("read_records", [](const std::filesystem::path& path) {
    py::list out;
    for (const auto& r : read_records(path)) out.append(to_py(r));
    return out;
  });
  m.def("rescore_record", [](const py::object& record) {
    return to_py(rescore_record(from_py(record)));
  });
  m.def("auroc_table",
        [](const std::filesystem::path& path, const std::string& label, const std::string& score) {
          const auto records = read_records(path);
          py::list out;
          for (const auto& r : auroc_table(records, label, score, path.stem().string())) {
            out.append(py::dict(py::arg("method") = r.method, py::arg("metric") = r.metric,
                                py::arg("value") = r.value, py::arg("stderr") = r.stderr_value,
                                py::arg("n") = r.n));
          }
          return out;
        },
        py::arg("records_path"), py::arg("label"), py::arg("score"));
}
