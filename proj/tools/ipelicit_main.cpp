// Command-line front end: ad hoc elicitation, campaigns, synthetic studies,
// evaluation tables and the local mock endpoint.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ipelicit/campaign.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/mock.hpp"
#include "ipelicit/record_eval.hpp"
#include "ipelicit/study.hpp"

namespace fs = std::filesystem;
using namespace ipelicit;

namespace {

constexpr int kExitError = 1;
constexpr int kExitPartial = 3;
constexpr int kExitUnreachable = 4;

MockServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

struct EndpointFlags {
  std::string url;
  std::string model;
  std::string token_env;
  std::string name;
  std::optional<double> temperature;
  std::optional<std::int64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--endpoint-url", url, "http(s)://host[:port]/prefix or mock://script.json")
        ->required();
    app->add_option("--model", model, "Model id sent with each request");
    app->add_option("--token-env", token_env, "Environment variable holding the bearer token");
    app->add_option("--endpoint-name", name, "Label for records and cost tables");
    app->add_option("--temperature", temperature);
    app->add_option("--seed", seed);
  }
  ModelEndpoint endpoint() const {
    ModelEndpoint e;
    e.name = name;
    e.base_url = url;
    e.model_id = model;
    e.auth_token_env = token_env;
    e.temperature = temperature;
    e.seed = seed;
    return e;
  }
};

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<PromptKind> parse_methods(const std::string& text) {
  std::vector<PromptKind> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(prompt_kind_from_string(item));
  return out;
}

std::vector<ojson> load_records(const std::string& path) { return read_records(path); }

void emit_metric_rows(const std::vector<MetricRow>& rows, const std::string& out_path) {
  if (out_path.empty()) {
    write_metric_csv(std::cout, rows);
    return;
  }
  std::ofstream out(out_path);
  write_metric_csv(out, rows);
}

int run_campaign_command(CampaignConfig config, bool require_existing) {
  if (require_existing && !fs::exists(config.records_path())) {
    std::cerr << "nothing to resume: " << config.records_path() << " does not exist\n";
    return kExitError;
  }
  const auto summary = run_campaign(config);
  std::cout << "planned " << summary.planned << ", skipped " << summary.skipped
            << ", written " << summary.written << ", failed " << summary.failed << "\n"
            << "records: " << summary.records_path.string() << "\n";
  if (summary.partial()) {
    std::cerr << to_string(ErrorCode::kPartialCampaign) << ": " << summary.failed
              << " record(s) failed; rerun 'campaign resume' to retry them\n";
    return kExitPartial;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imprecise-probability elicitation toolkit"};
  app.require_subcommand(1);

  // elicit
  auto* elicit = app.add_subcommand("elicit", "Elicit one report for one question");
  EndpointFlags elicit_ep;
  elicit_ep.add(elicit);
  std::string elicit_kind = "definetti";
  std::string elicit_question;
  std::vector<std::string> elicit_candidates;
  int elicit_attempts = 5;
  bool elicit_enforce_upper = false;
  elicit->add_option("--kind", elicit_kind, "definetti|probint|credal|possibility|candidates|vanilla");
  elicit->add_option("--question", elicit_question)->required();
  elicit->add_option("--candidate", elicit_candidates, "Candidate answer (repeatable)");
  elicit->add_option("--max-attempts", elicit_attempts);
  elicit->add_flag("--enforce-upper", elicit_enforce_upper);

  // campaign
  auto* campaign = app.add_subcommand("campaign", "Run or resume a campaign");
  campaign->require_subcommand(1);
  std::string campaign_config;
  std::optional<int> campaign_concurrency;
  std::optional<std::string> campaign_output;
  std::optional<int> campaign_budget;
  for (auto* sub : {campaign->add_subcommand("run", "Run (skipping finished records)"),
                    campaign->add_subcommand("resume", "Resume an existing campaign")}) {
    sub->add_option("--config", campaign_config, "Campaign config (JSON)")->required();
    sub->add_option("--concurrency", campaign_concurrency);
    sub->add_option("--output-dir", campaign_output);
    sub->add_option("--retry-budget", campaign_budget);
  }

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic ICL tasks");
  synth_cmd->require_subcommand(1);
  auto* synth_gen = synth_cmd->add_subcommand("gen", "Export tasks, one JSON object per line");
  std::string transform = "rotation:13,cyclic_shift:1";
  std::string shift_dir = "left";
  double gen_p = 0.25;
  int gen_m = 80;
  int word_length = 5;
  std::size_t gen_count = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  for (auto* sub : {synth_gen}) {
    sub->add_option("--transform", transform);
    sub->add_option("--shift-direction", shift_dir)->check(CLI::IsMember({"left", "right"}));
    sub->add_option("--p", gen_p);
    sub->add_option("--m", gen_m);
    sub->add_option("--word-length", word_length);
    sub->add_option("--count", gen_count);
    sub->add_option("--seed", gen_seed);
    sub->add_option("--out", gen_out, "Output file (stdout by default)");
  }
  auto* synth_run = synth_cmd->add_subcommand("run", "Noise/depth sweep against an endpoint");
  EndpointFlags study_ep;
  study_ep.add(synth_run);
  std::string p_grid = "0,0.25,0.5";
  std::string m_grid = "1,5,20,80";
  int repeats = 5;
  std::uint64_t study_seed = 0;
  std::string study_methods = "definetti,probint,credal,possibility,vanilla";
  int study_members = 3;
  int study_attempts = 5;
  bool declare_p = false;
  std::string study_out;
  std::string study_rows_out;
  synth_run->add_option("--transform", transform);
  synth_run->add_option("--p-grid", p_grid);
  synth_run->add_option("--m-grid", m_grid);
  synth_run->add_option("--repeats", repeats);
  synth_run->add_option("--word-length", word_length);
  synth_run->add_option("--study-seed", study_seed);
  synth_run->add_option("--methods", study_methods);
  synth_run->add_option("--credal-members", study_members);
  synth_run->add_option("--max-attempts", study_attempts);
  synth_run->add_flag("--declare-p", declare_p,
                      "Tell a mock:// agent the true noise level of each grid point");
  synth_run->add_option("--out", study_out, "Aggregated CSV (stdout by default)");
  synth_run->add_option("--rows-out", study_rows_out, "Per-repeat CSV");

  // eval
  auto* eval = app.add_subcommand("eval", "Metric tables from run records");
  eval->require_subcommand(1);
  std::string records_path;
  std::string score = "first_order";
  std::string label = "ambiguous";
  std::string ref = "entropy_au";
  std::string dataset_name;
  std::string eval_out;
  std::string eval_config;
  auto* eval_auroc = eval->add_subcommand("auroc", "AUROC per method, mean over seeds");
  eval_auroc->add_option("--label", label)->check(CLI::IsMember({"ambiguous", "incorrect"}));
  auto* eval_conc = eval->add_subcommand("concordance", "Concordance index against p* proxies");
  eval_conc->add_option("--ref", ref)->check(CLI::IsMember({"entropy_au", "kl_eu"}));
  auto* eval_cost = eval->add_subcommand("cost", "Token and currency totals");
  eval_cost->add_option("--config", eval_config, "Campaign config with endpoint prices")->required();
  for (auto* sub : {eval_auroc, eval_conc, eval_cost}) {
    sub->add_option("--records", records_path)->required();
    sub->add_option("--out", eval_out);
  }
  for (auto* sub : {eval_auroc, eval_conc}) {
    sub->add_option("--score", score, "Key of the record's scores object");
    sub->add_option("--dataset", dataset_name);
  }

  // mock
  auto* mock = app.add_subcommand("mock", "Local scripted endpoint");
  mock->require_subcommand(1);
  auto* serve = mock->add_subcommand("serve", "Serve a mock script over HTTP");
  std::string script_path;
  std::string host = "127.0.0.1";
  int port = 0;
  std::string port_file;
  serve->add_option("--script", script_path)->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--port-file", port_file, "Write the bound port here once listening");

  CLI11_PARSE(app, argc, argv);

  try {
    if (elicit->parsed()) {
      const auto endpoint = elicit_ep.endpoint();
      auto client = make_client(endpoint);
      const auto kind = prompt_kind_from_string(elicit_kind);
      std::optional<CandidateSet> cands;
      if (!elicit_candidates.empty()) cands = CandidateSet::make(elicit_candidates);
      ElicitOptions opts;
      opts.max_attempts = elicit_attempts;
      opts.enforce_upper = elicit_enforce_upper;
      try {
        const auto r = elicit_with_retry(*client, endpoint, kind, elicit_question, cands, opts);
        std::cout << to_json(r).dump(2) << "\n";
      } catch (const ElicitationFailure& f) {
        std::cout << to_json(f.result()).dump(2) << "\n";
        throw;
      }
      return 0;
    }

    if (campaign->parsed()) {
      auto config = CampaignConfig::load(campaign_config);
      if (campaign_concurrency) config.concurrency = *campaign_concurrency;
      if (campaign_output) config.output_dir = *campaign_output;
      if (campaign_budget) config.retry_budget = *campaign_budget;
      config.validate();
      const bool resume = campaign->get_subcommand("resume")->parsed();
      return run_campaign_command(config, resume);
    }

    if (synth_gen->parsed()) {
      auto spec = synth::TransformSpec::parse(transform);
      if (shift_dir == "right") spec.shift_direction = synth::ShiftDirection::kRight;
      std::ofstream file;
      if (!gen_out.empty()) file.open(gen_out);
      std::ostream& out = gen_out.empty() ? std::cout : file;
      for (std::size_t i = 0; i < gen_count; ++i) {
        const std::uint64_t seed = gen_seed + i;
        const auto task = synth::generate_icl_task(spec, {gen_p, seed}, gen_m, word_length, seed);
        ojson examples = ojson::array();
        for (const auto& ex : task.examples) {
          examples.push_back({{"input", ex.input}, {"output", ex.output}});
        }
        ojson line = {{"spec", spec.describe()},
                      {"shift_direction", shift_dir},
                      {"noise", {{"p", gen_p}, {"rng_seed", seed}}},
                      {"seed", seed},
                      {"m", task.m},
                      {"word_length", word_length},
                      {"examples", std::move(examples)},
                      {"query", task.query_input},
                      {"clean_truth", task.clean_query_output},
                      {"question", synth::render_icl_question(task)}};
        out << line.dump() << "\n";
      }
      return 0;
    }

    if (synth_run->parsed()) {
      StudyConfig cfg;
      cfg.spec = synth::TransformSpec::parse(transform);
      cfg.p_grid = parse_doubles(p_grid);
      cfg.m_grid = parse_ints(m_grid);
      cfg.repeats = repeats;
      cfg.word_length = word_length;
      cfg.seed = study_seed;
      cfg.methods = parse_methods(study_methods);
      cfg.credal_members = study_members;
      cfg.options.max_attempts = study_attempts;
      const auto endpoint = study_ep.endpoint();
      StudyClientFactory factory = [&](double p, int) -> std::unique_ptr<ChatClient> {
        constexpr std::string_view kMock = "mock://";
        if (declare_p && std::string_view(endpoint.base_url).starts_with(kMock)) {
          auto script = MockScript::load(endpoint.base_url.substr(kMock.size()));
          if (script.icl_agent) script.icl_agent->p = p;
          return std::make_unique<ScriptedClient>(std::move(script));
        }
        return make_client(endpoint);
      };
      const auto rows = run_synthetic_study(cfg, endpoint, factory);
      if (!study_rows_out.empty()) {
        std::ofstream out(study_rows_out);
        write_study_rows_csv(out, rows);
      }
      const auto agg = aggregate_study(rows);
      if (study_out.empty()) {
        write_study_csv(std::cout, agg);
      } else {
        std::ofstream out(study_out);
        write_study_csv(out, agg);
      }
      return 0;
    }

    if (eval->parsed()) {
      const auto records = load_records(records_path);
      const std::string ds = dataset_name.empty() ? fs::path(records_path).parent_path().filename().string()
                                                  : dataset_name;
      if (eval_auroc->parsed()) {
        emit_metric_rows(auroc_table(records, label, score, ds), eval_out);
      } else if (eval_conc->parsed()) {
        emit_metric_rows(concordance_table(records, ref, score, ds), eval_out);
      } else {
        const auto config = CampaignConfig::load(eval_config);
        const auto ledger = ledger_from_records(records, config.endpoints);
        std::ofstream file;
        if (!eval_out.empty()) file.open(eval_out);
        std::ostream& out = eval_out.empty() ? std::cout : file;
        out << "endpoint,method,input_tokens,output_tokens,currency\n";
        auto line = [&](const std::string& e, const std::string& m, const CostLine& c) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", c.currency);
          out << e << ',' << m << ',' << c.input_tokens << ',' << c.output_tokens << ',' << buf
              << '\n';
        };
        for (const auto& e : ledger.endpoints()) {
          for (const auto& m : ledger.methods(e)) line(e, m, ledger.method_total(e, m));
          line(e, "*", ledger.endpoint_total(e));
        }
        line("*", "*", ledger.total());
      }
      return 0;
    }

    if (serve->parsed()) {
      MockServer server(MockScript::load(script_path), host, port);
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cout << server.base_url() << std::endl;
      if (!port_file.empty()) {
        const auto tmp = port_file + ".tmp";
        std::ofstream(tmp) << server.port() << "\n";
        fs::rename(tmp, port_file);
      }
      server.wait();
      g_server = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::kEndpointUnreachable ? kExitUnreachable : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
