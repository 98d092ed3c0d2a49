// Command-line surface: calibrate, solve-lp, account, train, attack, sweep,
// report. All outputs are plain JSON/CSV; every command is deterministic
// given --seed. Exit codes: 0 success, 1 guarantee violation, 2 input error.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "secretprot/accountant.hpp"
#include "secretprot/attack.hpp"
#include "secretprot/divergence.hpp"
#include "secretprot/domain.hpp"
#include "secretprot/lp.hpp"
#include "secretprot/pipeline.hpp"
#include "secretprot/trainer.hpp"

namespace {

using nlohmann::json;
using namespace secretprot;

json plan_to_json(const SamplingPlan& plan) {
  return json{{"weights", plan.weights.w},
              {"objective", plan.weights.objective},
              {"probs", plan.probs},
              {"batch_target", plan.batch_target},
              {"rounds", plan.rounds},
              {"sigma", plan.sigma}};
}

SamplingPlan plan_from_json(const json& obj) {
  SamplingPlan plan;
  plan.weights.w = obj.at("weights").get<std::vector<double>>();
  plan.weights.objective = obj.at("objective").get<double>();
  plan.probs = obj.at("probs").get<std::vector<double>>();
  plan.batch_target = obj.at("batch_target").get<double>();
  plan.rounds = obj.at("rounds").get<long>();
  plan.sigma = obj.at("sigma").get<double>();
  return plan;
}

json report_to_json(const CalibrationReport& report) {
  json secrets = json::array();
  for (const auto& s : report.secrets) {
    secrets.push_back(json{{"id", s.secret_id},
                           {"mu", s.mu},
                           {"sigma_j", s.sigma_j},
                           {"achieved_kl", s.achieved_kl},
                           {"achieved_posterior", s.achieved_posterior},
                           {"target_posterior", s.target_posterior},
                           {"vacuous", s.vacuous}});
  }
  return json{{"sigma", report.sigma},
              {"fraction_retained", report.fraction_retained},
              {"secrets", secrets}};
}

void write_json(const std::string& path, const json& obj) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << obj.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  json obj;
  f >> obj;
  return obj;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

ModelAdapter make_model(const std::string& kind, int dim) {
  if (kind == "linreg") return linear_regression_model(dim);
  if (kind == "logreg") return logistic_regression_model(dim);
  throw std::invalid_argument("unknown model kind " + kind);
}

int run(int argc, char** argv) {
  CLI::App app{"secret-protection calibration and training toolkit"};
  app.require_subcommand(1);

  std::string dataset_path, secrets_path, config_path, out_path, plan_path,
      report_path;
  std::int64_t seed = 0;

  // calibrate
  auto* cal = app.add_subcommand(
      "calibrate", "calibrate weights, sampling probabilities and sigma");
  std::string out_plan = "plan.json", out_report = "report.json";
  cal->add_option("--dataset", dataset_path)->required();
  cal->add_option("--secrets", secrets_path)->required();
  cal->add_option("--config", config_path)->required();
  cal->add_option("--out-plan", out_plan);
  cal->add_option("--out-report", out_report);

  // solve-lp
  auto* slp = app.add_subcommand("solve-lp", "solve the example-weighting LP");
  double lp_c = 1.0;
  slp->add_option("--dataset", dataset_path)->required();
  slp->add_option("--secrets", secrets_path)->required();
  slp->add_option("--c", lp_c)->required();
  slp->add_option("--out", out_path)->required();

  // account
  auto* acct = app.add_subcommand(
      "account", "recompute per-secret KL and posterior at a plan's sigma");
  acct->add_option("--dataset", dataset_path)->required();
  acct->add_option("--secrets", secrets_path)->required();
  acct->add_option("--plan", plan_path)->required();
  acct->add_option("--out", out_path)->required();

  // train
  auto* tr = app.add_subcommand("train", "run DP-SGD with a sampling plan");
  std::string model_kind = "linreg", losses_path;
  double learning_rate = 0.1;
  tr->add_option("--dataset", dataset_path)->required();
  tr->add_option("--secrets", secrets_path)->required();
  tr->add_option("--config", config_path)->required();
  tr->add_option("--plan", plan_path)->required();
  tr->add_option("--model", model_kind);
  tr->add_option("--lr", learning_rate);
  tr->add_option("--seed", seed);
  tr->add_option("--out", out_path)->required();
  tr->add_option("--losses", losses_path);

  // attack
  auto* atk = app.add_subcommand(
      "attack", "Monte-Carlo reconstruction game against the mechanism");
  double atk_p = 0.0, atk_r = 0.0, atk_sigma = 0.0;
  std::string group_csv;
  long atk_T = 1, atk_k = 0, atk_trials = 100000;
  atk->add_option("--p", atk_p)->required();
  atk->add_option("--r", atk_r);
  atk->add_option("--sigma", atk_sigma);
  atk->add_option("--group", group_csv)->required();
  atk->add_option("--T", atk_T);
  atk->add_option("--k", atk_k)->required();
  atk->add_option("--trials", atk_trials);
  atk->add_option("--seed", seed);
  atk->add_option("--out", out_path);

  // sweep
  auto* sw = app.add_subcommand(
      "sweep", "calibrate (and optionally train) over a list of c values");
  std::string c_values_csv;
  bool sweep_train = false;
  double sweep_lr = 0.1;
  sw->add_option("--dataset", dataset_path)->required();
  sw->add_option("--secrets", secrets_path)->required();
  sw->add_option("--config", config_path)->required();
  sw->add_option("--c-values", c_values_csv)->required();
  sw->add_flag("--train", sweep_train);
  sw->add_option("--lr", sweep_lr);
  sw->add_option("--out", out_path)->required();

  // report
  auto* rep = app.add_subcommand(
      "report", "print the per-secret table and check the guarantees");
  rep->add_option("--plan", plan_path)->required();
  rep->add_option("--report", report_path)->required();

  CLI11_PARSE(app, argc, argv);

  if (cal->parsed()) {
    SecretMap map = load_dataset(dataset_path, secrets_path);
    RunConfig cfg = load_config(config_path);
    auto [plan, report] = calibrate(map, cfg);
    write_json(out_plan, plan_to_json(plan));
    write_json(out_report, report_to_json(report));
    std::cout << "sigma=" << plan.sigma
              << " fraction_retained=" << report.fraction_retained << "\n";
    return 0;
  }

  if (slp->parsed()) {
    SecretMap map = load_dataset(dataset_path, secrets_path);
    std::vector<KLBudget> budgets;
    for (const auto& s : map.secrets) budgets.push_back(budget_from_targets(s));
    WeightVector wv = solve(build_lp(map, budgets, lp_c));
    write_json(out_path, json{{"weights", wv.w}, {"objective", wv.objective}});
    std::cout << "objective=" << wv.objective << "\n";
    return 0;
  }

  if (acct->parsed()) {
    SecretMap map = load_dataset(dataset_path, secrets_path);
    SamplingPlan plan = plan_from_json(read_json(plan_path));
    if (plan.probs.size() != map.examples.size())
      throw std::invalid_argument("plan does not match dataset");
    json rows = json::array();
    for (size_t j = 0; j < map.secrets.size(); ++j) {
      std::vector<double> group;
      for (int i : map.incidence[j]) group.push_back(plan.probs[i]);
      double mu = budget_from_targets(map.secrets[j]).mu;
      bool vacuous = group.empty() ||
                     std::all_of(group.begin(), group.end(),
                                 [](double p) { return p == 0.0; });
      double kl = (vacuous || plan.sigma <= 0.0)
                      ? 0.0
                      : composed_kl(RoundMechanism{poisson_binomial(group),
                                                   plan.sigma},
                                    plan.rounds);
      rows.push_back(json{{"id", map.secrets[j].id},
                          {"mu", mu},
                          {"achieved_kl", kl},
                          {"achieved_posterior",
                           invert_posterior(map.secrets[j].prior_p, kl)},
                          {"target_posterior", map.secrets[j].posterior_r}});
    }
    write_json(out_path, json{{"sigma", plan.sigma}, {"secrets", rows}});
    return 0;
  }

  if (tr->parsed()) {
    SecretMap map = load_dataset(dataset_path, secrets_path);
    RunConfig cfg = load_config(config_path);
    SamplingPlan plan = plan_from_json(read_json(plan_path));
    int dim = map.examples.empty()
                  ? 0
                  : static_cast<int>(map.examples[0].payload.size()) - 1;
    ModelAdapter model = make_model(model_kind, dim);
    TrainTrace trace = train(map, plan, model, cfg,
                             static_cast<std::uint64_t>(seed), learning_rate);
    write_json(out_path, json{{"batch_sizes", trace.batch_sizes},
                              {"grad_norms", trace.grad_norms},
                              {"theta", trace.theta},
                              {"eval_loss", trace.eval_loss}});
    if (!losses_path.empty()) {
      std::ofstream csv(losses_path);
      csv << "round,loss\n";
      for (size_t t = 0; t < trace.round_losses.size(); ++t)
        csv << t << "," << std::setprecision(17) << trace.round_losses[t]
            << "\n";
    }
    std::cout << "eval_loss=" << trace.eval_loss << "\n";
    return 0;
  }

  if (atk->parsed()) {
    ReconstructionGame game;
    game.group_probs = parse_list(group_csv);
    game.k = static_cast<int>(atk_k);
    game.prior_cap = atk_p;
    game.prior.assign(game.k, 1.0 / static_cast<double>(game.k));
    game.rounds = atk_T;
    game.trials = atk_trials;
    if (atk_sigma > 0.0) {
      game.sigma = atk_sigma;
    } else {
      if (!(atk_r > atk_p))
        throw std::invalid_argument("provide --sigma or a target --r > --p");
      game.sigma = calibrate_secret_sigma(game.group_probs, atk_T,
                                          bern_kl(atk_r, atk_p));
    }
    GameResult result = simulate_game(game, static_cast<std::uint64_t>(seed));
    json obj{{"empirical_success", result.empirical_success},
             {"stderr", result.stderr_},
             {"certified_bound", result.certified_bound},
             {"plugin_success", result.plugin_success},
             {"sigma", game.sigma}};
    if (!out_path.empty()) write_json(out_path, obj);
    std::cout << obj.dump(2) << "\n";
    return result.empirical_success <=
                   result.certified_bound + 3.0 * result.stderr_
               ? 0
               : 1;
  }

  if (sw->parsed()) {
    SecretMap map = load_dataset(dataset_path, secrets_path);
    RunConfig cfg = load_config(config_path);
    std::vector<double> c_values = parse_list(c_values_csv);
    std::sort(c_values.begin(), c_values.end());
    std::ofstream csv(out_path);
    if (!csv) throw std::invalid_argument("cannot write " + out_path);
    csv << "c,fraction_retained,sigma,noiseless_loss,noisy_loss\n";
    for (double c : c_values) {
      RunConfig run_cfg = cfg;
      run_cfg.lp_constant = c;
      auto [plan, report] = calibrate(map, run_cfg);
      csv << std::setprecision(12) << c << "," << report.fraction_retained
          << "," << report.sigma;
      if (sweep_train) {
        int dim = static_cast<int>(map.examples[0].payload.size()) - 1;
        SamplingPlan noiseless = plan;
        noiseless.sigma = 0.0;
        ModelAdapter m0 = linear_regression_model(dim);
        TrainTrace t0 = train(map, noiseless, m0, run_cfg,
                              static_cast<std::uint64_t>(cfg.seed), sweep_lr);
        ModelAdapter m1 = linear_regression_model(dim);
        TrainTrace t1 = train(map, plan, m1, run_cfg,
                              static_cast<std::uint64_t>(cfg.seed), sweep_lr);
        csv << "," << t0.eval_loss << "," << t1.eval_loss;
      } else {
        csv << ",,";
      }
      csv << "\n";
      std::cout << "c=" << c << " fraction_retained=" << report.fraction_retained
                << " sigma=" << report.sigma << "\n";
    }
    return 0;
  }

  if (rep->parsed()) {
    json plan = read_json(plan_path);
    json report = read_json(report_path);
    std::cout << "global sigma: " << report.at("sigma").get<double>() << "\n";
    std::cout << std::left << std::setw(12) << "secret" << std::setw(14) << "mu"
              << std::setw(14) << "sigma_j" << std::setw(14) << "achieved_r"
              << std::setw(14) << "target_r" << std::setw(14) << "slack"
              << "\n";
    int violations = 0;
    for (const auto& s : report.at("secrets")) {
      double achieved = s.at("achieved_posterior").get<double>();
      double target = s.at("target_posterior").get<double>();
      std::cout << std::left << std::setw(12) << s.at("id").get<std::string>()
                << std::setw(14) << s.at("mu").get<double>() << std::setw(14)
                << s.at("sigma_j").get<double>() << std::setw(14) << achieved
                << std::setw(14) << target << std::setw(14)
                << target - achieved << "\n";
      if (achieved > target) {
        ++violations;
        std::cout << "  VIOLATION: achieved posterior exceeds target for "
                  << s.at("id").get<std::string>() << "\n";
      }
    }
    (void)plan;
    return violations == 0 ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
