// lossfact command-line front end.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lossfact/bounds.hpp"
#include "lossfact/experiments.hpp"
#include "lossfact/loss.hpp"
#include "lossfact/mean_operator.hpp"
#include "lossfact/risk.hpp"
#include "lossfact/rng.hpp"
#include "lossfact/sample.hpp"
#include "lossfact/solver.hpp"

using nlohmann::json;
using namespace lossfact;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

NoiseSpec parse_noise(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw CLI::ValidationError("--noise", "expected p+,p- (e.g. 0.4,0.2)");
  }
  return NoiseSpec(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

CsvOptions csv_options(const std::string& label_column, bool standardize) {
  CsvOptions opts;
  opts.standardize = standardize;
  if (!label_column.empty()) {
    try {
      std::size_t used = 0;
      const int idx = std::stoi(label_column, &used);
      if (used == label_column.size()) {
        opts.label_column = idx;
      } else {
        opts.label_column = label_column;
      }
    } catch (const std::exception&) {
      opts.label_column = label_column;
    }
  }
  return opts;
}

json provenance_json(const Provenance& p) {
  json out = {{"kind", provenance_name(p)}};
  if (const auto* nc = std::get_if<NoiseCorrectedProvenance>(&p)) {
    out["p_plus"] = nc->noise.p_plus;
    out["p_minus"] = nc->noise.p_minus;
  } else if (const auto* pu = std::get_if<PuProvenance>(&p)) {
    out["pi_plus"] = pu->pi_plus;
  }
  return out;
}

Sample random_sample(Rng& rng, Eigen::Index m, Eigen::Index d) {
  Matrix x(m, d);
  Vector y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y[i] = rng.sign();
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = rng.normal();
  }
  return Sample(std::move(x), std::move(y));
}

void write_plot(const std::filesystem::path& dir, const ExperimentResult::Plot& plot) {
  std::ofstream out(dir / ("plot_" + plot.name + ".csv"));
  for (std::size_t c = 0; c < plot.columns.size(); ++c) {
    out << (c ? "," : "") << plot.columns[c];
  }
  out << '\n';
  out.precision(17);
  for (const auto& row : plot.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "");
      if (std::isfinite(row[c])) out << row[c];
    }
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss factorization, mean-operator estimation and mean-operator SGD"};
  app.require_subcommand(1);

  // estimate-mu
  auto* est = app.add_subcommand("estimate-mu", "Mean operator of a labelled CSV");
  std::string est_data, est_label, est_noise;
  double est_pi = 0.0;
  bool est_standardize = false;
  est->add_option("--data", est_data, "CSV file")->required();
  est->add_option("--label-column", est_label, "label column name or index (default: last)");
  est->add_option("--noise", est_noise, "flip rates p+,p- for the noise-corrected estimator");
  est->add_option("--pu-pi", est_pi, "class prior for the positive-unlabelled estimator");
  est->add_flag("--standardize", est_standardize, "standardize features");

  // factorize-check
  auto* fac = app.add_subcommand("factorize-check", "Residual of the factorization identity");
  std::string fac_loss = "logistic";
  int fac_trials = 50;
  std::uint64_t fac_seed = 0;
  fac->add_option("--loss", fac_loss, "loss name")->required();
  fac->add_option("--trials", fac_trials, "random (sample, model) cases")->check(CLI::PositiveNumber);
  fac->add_option("--seed", fac_seed, "seed");

  // train
  auto* tr = app.add_subcommand("train", "Train a linear model on a CSV");
  std::string tr_algo = "mosgd", tr_loss = "logistic", tr_noise = "0,0", tr_data, tr_label,
              tr_mode = "paper_faithful";
  double tr_lambda = 1e-6, tr_test = 0.2, tr_eta = 0.1;
  int tr_epochs = 4;
  std::int64_t tr_prox_steps = 1000;
  std::uint64_t tr_seed = 0;
  bool tr_standardize = false, tr_l1 = false;
  tr->add_option("--algo", tr_algo, "mosgd | sgd | prox")
      ->check(CLI::IsMember({"mosgd", "sgd", "prox"}));
  tr->add_option("--loss", tr_loss, "loss name");
  tr->add_option("--lambda", tr_lambda, "regularization strength");
  tr->add_option("--epochs", tr_epochs, "passes over the doubled sample")->check(CLI::PositiveNumber);
  tr->add_option("--noise", tr_noise, "flip rates p+,p- injected into the training labels");
  tr->add_option("--seed", tr_seed, "seed");
  tr->add_option("--data", tr_data, "CSV file")->required();
  tr->add_option("--label-column", tr_label, "label column name or index (default: last)");
  tr->add_option("--test-fraction", tr_test, "held-out fraction");
  tr->add_option("--update-mode", tr_mode, "paper_faithful | risk_consistent")
      ->check(CLI::IsMember({"paper_faithful", "risk_consistent"}));
  tr->add_option("--eta", tr_eta, "step size for prox");
  tr->add_option("--prox-steps", tr_prox_steps, "iterations for prox");
  tr->add_flag("--l1", tr_l1, "l1 instead of l2 regularizer for prox");
  tr->add_flag("--standardize", tr_standardize, "standardize features on the training split");

  // bounds
  auto* bd = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  std::string bd_which, bd_loss;
  BoundInputs bi;
  double bd_pp = 0.0, bd_pm = 0.0, bd_mu_norm = 0.0, bd_deviation = -1.0;
  bool bd_proof = false, bd_statement = false, bd_c_given = false;
  bd->add_option("--which", bd_which, "rademacher | deviation | generalization | noisy | aln")
      ->required()
      ->check(CLI::IsMember({"rademacher", "deviation", "generalization", "noisy", "aln"}));
  bd->add_option("--X", bi.X, "max feature norm");
  bd->add_option("--B", bi.B, "model norm cap");
  bd->add_option("--L", bi.L, "Lipschitz constant");
  bd->add_option("--a", bi.a, "odd slope");
  bd->add_option("--m", bi.m, "sample size");
  bd->add_option("--d", bi.d, "dimension");
  bd->add_option("--delta", bi.delta, "confidence parameter");
  auto* c_opt = bd->add_option("--c", bi.c_XB, "c(X,B) = max_y l(yXB)");
  bd->add_option("--loss", bd_loss, "take a, L and c(X,B) from this loss");
  bd->add_option("--p-plus", bd_pp, "flip rate of positives");
  bd->add_option("--p-minus", bd_pm, "flip rate of negatives");
  bd->add_option("--mu-norm", bd_mu_norm, "||mu_D|| for aln");
  bd->add_option("--mu-deviation", bd_deviation, "||mu_D - mu_S|| for the first generalization form");
  bd->add_flag("--proof-constant", bd_proof, "use (sqrt2+1)/2 for the complexity term");
  bd->add_flag("--statement-form", bd_statement, "deviation bound without the sqrt2 factor");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an experiment");
  std::string ex_which, ex_out, ex_mode = "risk_consistent", ex_label;
  std::uint64_t ex_seed = 0;
  std::vector<std::string> ex_data;
  int ex_trials = 25;
  bool ex_standardize = false;
  ex->add_option("which", ex_which, "figure2 | figure3 | table2")
      ->required()
      ->check(CLI::IsMember({"figure2", "figure3", "table2"}));
  ex->add_option("--out", ex_out, "output directory")->required();
  ex->add_option("--seed", ex_seed, "master seed");
  ex->add_option("--data", ex_data, "CSV datasets (default: synthetic surrogates)");
  ex->add_option("--label-column", ex_label, "label column for --data files");
  ex->add_flag("--standardize", ex_standardize, "standardize --data features");
  ex->add_option("--trials", ex_trials, "trials per cell")->check(CLI::PositiveNumber);
  ex->add_option("--update-mode", ex_mode, "update mode for mean-operator SGD in table2")
      ->check(CLI::IsMember({"paper_faithful", "risk_consistent"}));

  CLI11_PARSE(app, argc, argv);
  bd_c_given = c_opt->count() > 0;

  try {
    if (*est) {
      const Sample s = load_csv(est_data, csv_options(est_label, est_standardize));
      MeanOperator mu = mean_op(s);
      if (!est_noise.empty()) {
        mu = noise_corrected_mean_op(s, parse_noise(est_noise));
      } else if (est_pi > 0.0) {
        mu = pu_mean_op(s.positives(), est_pi);
      }
      const json out = {{"vector", to_json(mu.vector)},
                        {"norm", mu.norm()},
                        {"provenance", provenance_json(mu.provenance)},
                        {"m", s.size()},
                        {"d", s.dim()}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*fac) {
      const LossSpec loss = loss_by_name(fac_loss);
      Rng rng(fac_seed);
      double worst = 0.0;
      for (int t = 0; t < fac_trials; ++t) {
        const auto m = static_cast<Eigen::Index>(1 + rng.below(64));
        const auto d = static_cast<Eigen::Index>(1 + rng.below(16));
        const Sample s = random_sample(rng, m, d);
        Vector theta(d);
        for (Eigen::Index k = 0; k < d; ++k) theta[k] = rng.normal();
        theta *= 10.0 * rng.uniform() / theta.norm();
        const Model h(theta);
        const double direct = empirical_risk(s, loss, h);
        const double factored = loss.is_linear_odd()
                                    ? factored_risk(double_sample(s), mean_op(s), loss, h)
                                    : general_factored_risk(s, loss, h).total();
        worst = std::max(worst, std::abs(direct - factored) / (1.0 + std::abs(direct)));
      }
      const json out = {{"loss", loss.name()},
                        {"identity", loss.is_linear_odd() ? "linear_odd" : "even_odd"},
                        {"trials", fac_trials},
                        {"seed", fac_seed},
                        {"max_residual", worst}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*tr) {
      const LossSpec loss = loss_by_name(tr_loss);
      const NoiseSpec noise = parse_noise(tr_noise);
      const Sample data = load_csv(tr_data, csv_options(tr_label, false));
      auto [train, test] = split(data, tr_test, derive_seed(tr_seed, 0));
      if (tr_standardize) {
        const Standardizer st = Standardizer::fit(train);
        train = st.apply(train);
        test = st.apply(test);
      }
      const Sample noisy = inject_noise(train, noise, derive_seed(tr_seed, 1));
      SolverConfig cfg;
      cfg.lambda = tr_lambda;
      cfg.T = static_cast<std::int64_t>(tr_epochs) * 2 * noisy.size();
      cfg.seed = derive_seed(tr_seed, 2);
      cfg.update_mode = update_mode_from_string(tr_mode);

      std::optional<Model> model;
      json extra = json::object();
      if (tr_algo == "mosgd") {
        model = mosgd_noisy(noisy, loss, noise, cfg);
      } else if (tr_algo == "sgd") {
        model = sgd_baseline(noisy, loss, cfg);
      } else {
        ProxConfig pc;
        pc.regularizer = tr_l1 ? Regularizer::l1(tr_lambda) : Regularizer::l2(tr_lambda);
        pc.eta = tr_eta;
        pc.T = tr_prox_steps;
        pc.seed = cfg.seed;
        pc.update_mode = cfg.update_mode;
        model = prox_train(double_sample(noisy), noise_corrected_mean_op(noisy, noise), loss, pc);
        extra = {{"eta", tr_eta}, {"steps", tr_prox_steps}, {"regularizer", tr_l1 ? "l1" : "l2"}};
      }
      json out = {{"algo", tr_algo},
                  {"loss", loss.name()},
                  {"lambda", tr_lambda},
                  {"T", tr_algo == "prox" ? tr_prox_steps : cfg.T},
                  {"seed", tr_seed},
                  {"noise", {{"p_plus", noise.p_plus}, {"p_minus", noise.p_minus}}},
                  {"update_mode", to_string(cfg.update_mode)},
                  {"model", to_json(model->theta())},
                  {"train_error", zero_one_error(noisy, *model)},
                  {"train_error_clean", zero_one_error(train, *model)},
                  {"test_error", zero_one_error(test, *model)},
                  {"m_train", train.size()},
                  {"m_test", test.size()}};
      if (!extra.empty()) out["prox"] = extra;
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*bd) {
      if (!bd_loss.empty()) {
        const LossSpec loss = loss_by_name(bd_loss);
        if (loss.odd_slope()) bi.a = *loss.odd_slope();
        if (loss.lipschitz()) bi.L = *loss.lipschitz();
        if (!bd_c_given) bi.c_XB = c_of_XB(loss, bi.X, bi.B);
      }
      const NoiseSpec noise(bd_pp, bd_pm);
      double value = 0.0;
      json inputs;
      if (bd_which == "rademacher") {
        value = rademacher_bound(bi.B, bi.X, bi.m);
        inputs = {{"B", bi.B}, {"X", bi.X}, {"m", bi.m}, {"v", rademacher_v(bi.m)}};
      } else if (bd_which == "deviation") {
        value = mean_op_deviation_bound(bi.X, bi.d, bi.m, bi.delta,
                                        bd_statement ? DeviationForm::statement
                                                     : DeviationForm::proof);
        inputs = {{"X", bi.X}, {"d", bi.d}, {"m", bi.m}, {"delta", bi.delta},
                  {"form", bd_statement ? "statement" : "proof"}};
      } else if (bd_which == "aln") {
        value = aln_epsilon(bi.a, bi.B, noise, bd_mu_norm);
        inputs = {{"a", bi.a}, {"B", bi.B}, {"p_plus", bd_pp}, {"p_minus", bd_pm},
                  {"mu_norm", bd_mu_norm}};
      } else {
        inputs = {{"X", bi.X}, {"B", bi.B}, {"L", bi.L}, {"a", bi.a}, {"m", bi.m},
                  {"d", bi.d}, {"delta", bi.delta}, {"c_XB", bi.c_XB},
                  {"proof_constant", bd_proof}};
        if (bd_which == "noisy") {
          value = noisy_generalization_bound(bi, noise, bd_proof);
          inputs["p_plus"] = bd_pp;
          inputs["p_minus"] = bd_pm;
        } else if (bd_deviation >= 0.0) {
          value = generalization_bound(bi, bd_deviation, bd_proof);
          inputs["mu_deviation"] = bd_deviation;
        } else {
          value = generalization_bound(bi, bd_proof);
        }
      }
      if (!bd_loss.empty()) inputs["loss"] = bd_loss;
      std::cout << json{{"which", bd_which}, {"value", value}, {"inputs", inputs}}.dump(2) << '\n';
      return 0;
    }

    if (*ex) {
      std::vector<NamedSample> datasets;
      for (const auto& path : ex_data) {
        datasets.push_back({std::filesystem::path(path).stem().string(),
                            load_csv(path, csv_options(ex_label, ex_standardize))});
      }
      if (datasets.empty() && ex_which != "figure2") datasets = surrogate_datasets(ex_seed);

      ExperimentResult result;
      json config = {{"experiment", ex_which}, {"seed", ex_seed}};
      if (ex_which == "figure2") {
        Figure2Config cfg;
        cfg.seed = ex_seed;
        result = run_figure2(cfg);
        config["lambda"] = cfg.lambda;
        config["p_fixed"] = cfg.p_fixed;
        config["phi_fixed"] = cfg.phi_fixed;
      } else if (ex_which == "figure3") {
        Figure3Config cfg;
        cfg.seed = ex_seed;
        cfg.trials = ex_trials;
        result = run_figure3(datasets, cfg);
        config["lambda"] = cfg.lambda;
        config["trials"] = cfg.trials;
      } else {
        Table2Config cfg;
        cfg.seed = ex_seed;
        cfg.trials = ex_trials;
        cfg.update_mode = update_mode_from_string(ex_mode);
        result = run_table2(datasets, cfg);
        config["trials"] = cfg.trials;
        config["folds"] = cfg.folds;
        config["update_mode"] = ex_mode;
      }
      json names = json::array();
      for (const auto& d : datasets) names.push_back(d.name);
      config["datasets"] = names;

      const std::filesystem::path dir(ex_out);
      std::filesystem::create_directories(dir);
      emit(result.records, RecordFormat::csv, (dir / "records.csv").string());
      for (const auto& plot : result.plots) write_plot(dir, plot);

      json checks = json::array();
      for (const auto& c : result.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"invariant", c.invariant},
                          {"detail", c.detail}});
      }
      const json summary = {{"config", config},
                            {"summary", result.summary},
                            {"checks", checks},
                            {"invariants_hold", result.invariants_hold()},
                            {"records", result.records.size()}};
      std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
      std::cout << summary.dump(2) << '\n';
      return result.invariants_hold() ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
