// relent: relative-entropy inference on finite distributions and Markov text
// models.  Every subcommand reads the declared file formats, writes a single
// JSON report (stdout or --out), and echoes its effective configuration,
// including seeds, so identical invocations produce byte-identical reports.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "relent/bayes.hpp"
#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/em.hpp"
#include "relent/errors.hpp"
#include "relent/hypothesis_tests.hpp"
#include "relent/io.hpp"
#include "relent/markov.hpp"
#include "relent/maxent.hpp"
#include "relent/ml_estimators.hpp"

using relent::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitInfeasible = 4;

struct Output {
    std::string path;  // empty: stdout

    void emit(const std::string& command, json config, json payload) const {
        json report;
        report["command"] = command;
        report["config"] = std::move(config);
        report["result"] = std::move(payload);
        std::string text = report.dump(2);
        text.push_back('\n');
        if (path.empty())
            std::fwrite(text.data(), 1, text.size(), stdout);
        else
            relent::io::write_file(path, text);
    }
};

json fit_table_payload(const relent::FitResult<relent::JointTable>& r) {
    json j;
    j["divergence"] = relent::io::json_number(r.divergence);
    j["dim_family"] = r.dim_family;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["fitted"] = relent::io::table_to_json(r.fitted);
    return j;
}

json maxent_payload(const relent::MaxentResult& r) {
    json j;
    j["projected"] = relent::io::distribution_to_json(r.projected);
    json mult = json::array();
    for (double m : r.multipliers) mult.push_back(relent::io::json_number(m));
    j["multipliers"] = mult;
    j["divergence"] = relent::io::json_number(r.divergence);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    return j;
}

relent::Partition load_partition(const std::string& path) {
    json j = json::parse(relent::io::read_file(path));
    if (!j.is_array() || j.empty())
        throw relent::invalid_input("partition file must be a JSON array of group indices");
    std::vector<int> assign;
    int groups = 0;
    for (const auto& x : j) {
        int g = x.get<int>();
        assign.push_back(g);
        groups = std::max(groups, g + 1);
    }
    return relent::Partition(std::move(assign), groups);
}

std::vector<double> load_numbers(const std::string& path) {
    std::string content = relent::io::read_file(path);
    std::size_t pos = content.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) throw relent::invalid_input("empty number file: " + path);
    std::vector<double> out;
    if (content[pos] == '[') {
        for (const auto& x : json::parse(content)) out.push_back(relent::io::number_from_json(x));
        return out;
    }
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = relent::io::split_csv_line(line);
        out.push_back(relent::io::parse_double(cells.back()));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative-entropy inference on finite distributions and Markov text models"};
    app.require_subcommand(1);

    Output out;
    app.add_option("--out", out.path, "write the JSON report here instead of stdout");

    double alpha = 0.05, tol = 1e-10;
    int max_iter = 10000, threads = 1;
    std::string fitted_csv;
    std::uint64_t seed = 1;
    app.add_option("--threads", threads, "worker-thread cap for Monte-Carlo batches")
        ->check(CLI::PositiveNumber);

    // ---- entropy / kl -------------------------------------------------------
    std::string f_path, g_path;
    auto* cmd_entropy = app.add_subcommand(
        "entropy", "Shannon entropy, e.g. `relent entropy --f dist.csv`");
    cmd_entropy->add_option("--f", f_path, "distribution (CSV label,prob or JSON array)")
        ->required();

    auto* cmd_kl = app.add_subcommand(
        "kl", "relative entropy K(f||g), e.g. `relent kl --f coin_d.csv --g coin_m.csv`");
    cmd_kl->add_option("--f", f_path, "data distribution")->required();
    cmd_kl->add_option("--g", g_path, "model distribution")->required();

    // ---- test ---------------------------------------------------------------
    auto* cmd_test = app.add_subcommand("test", "hypothesis tests");
    cmd_test->require_subcommand(1);
    long n_obs = 0;
    std::string fitted_path, fit0_path, fit1_path, table_path;
    int dim_s = 0, dim_m = 0, df_delta = 0;

    auto* t_simple = cmd_test->add_subcommand(
        "simple", "single hypothesis: reject when 2nK(f||g) exceeds the chi-square bound, "
                  "e.g. `relent test simple --f obs.csv --g model.csv --n 100`");
    t_simple->add_option("--f", f_path, "observed distribution")->required();
    t_simple->add_option("--g", g_path, "model distribution")->required();
    t_simple->add_option("--n", n_obs, "sample size")->required();
    t_simple->add_option("--alpha", alpha, "significance level");

    auto* t_comp = cmd_test->add_subcommand(
        "composite", "family hypothesis via its ML fit, e.g. `relent test composite --f obs.csv "
                     "--fitted fit.csv --dim-s 8 --dim-m 4 --n 500`");
    t_comp->add_option("--f", f_path, "observed distribution")->required();
    t_comp->add_option("--fitted", fitted_path, "ML projection of f onto the family")->required();
    t_comp->add_option("--dim-s", dim_s, "dimension of the simplex")->required();
    t_comp->add_option("--dim-m", dim_m, "dimension of the family")->required();
    t_comp->add_option("--n", n_obs, "sample size")->required();
    t_comp->add_option("--alpha", alpha, "significance level");

    auto* t_indep = cmd_test->add_subcommand(
        "independence", "row/column independence, e.g. `relent test independence --table "
                        "joint.csv --n 1000`");
    t_indep->add_option("--table", table_path, "joint table CSV")->required();
    t_indep->add_option("--n", n_obs, "sample size")->required();
    t_indep->add_option("--alpha", alpha, "significance level");

    auto* t_nested = cmd_test->add_subcommand(
        "nested", "family M0 within M1, e.g. `relent test nested --f obs.csv --fit0 sym.csv "
                  "--fit1 qs.csv --df 2 --n 1000`");
    t_nested->add_option("--f", f_path, "observed distribution")->required();
    t_nested->add_option("--fit0", fit0_path, "ML fit onto the smaller family")->required();
    t_nested->add_option("--fit1", fit1_path, "ML fit onto the larger family")->required();
    t_nested->add_option("--df", df_delta, "dim(M1) - dim(M0)")->required();
    t_nested->add_option("--n", n_obs, "sample size")->required();
    t_nested->add_option("--alpha", alpha, "significance level");

    // ---- fit ----------------------------------------------------------------
    auto* cmd_fit = app.add_subcommand("fit", "maximum-likelihood projections");
    cmd_fit->require_subcommand(1);
    std::string tensor_path, model_kind;

    auto* f_indep = cmd_fit->add_subcommand(
        "independence", "product-of-marginals fit, e.g. `relent fit independence --table t.csv`");
    f_indep->add_option("--table", table_path, "joint table CSV")->required();
    f_indep->add_option("--fitted-csv", fitted_csv, "also write the fitted table as CSV");

    auto* f_sym = cmd_fit->add_subcommand(
        "symmetry", "half-sum symmetric fit, e.g. `relent fit symmetry --table flows.csv`");
    f_sym->add_option("--table", table_path, "square table CSV")->required();
    f_sym->add_option("--fitted-csv", fitted_csv, "also write the fitted table as CSV");

    auto* f_qs = cmd_fit->add_subcommand(
        "qs", "quasi-symmetry fit by proportional fitting, e.g. `relent fit qs --table "
              "flows.csv --tol 1e-10`");
    f_qs->add_option("--table", table_path, "square table CSV")->required();
    f_qs->add_option("--tol", tol, "convergence tolerance");
    f_qs->add_option("--max-iter", max_iter, "iteration cap");
    f_qs->add_option("--fitted-csv", fitted_csv, "also write the fitted table as CSV");

    auto* f_three = cmd_fit->add_subcommand(
        "threeway", "log-linear models, e.g. `relent fit threeway --tensor t.json --model N`");
    f_three->add_option("--tensor", tensor_path, "three-way table (nested JSON array)")
        ->required();
    f_three->add_option("--model", model_kind, "L (Z indep), M (Y indep Z), N (X indep Z | Y)")
        ->required()
        ->check(CLI::IsMember({"L", "M", "N"}));

    // ---- maxent -------------------------------------------------------------
    auto* cmd_me = app.add_subcommand("maxent", "maximum-entropy projections");
    cmd_me->require_subcommand(1);
    std::string prior_path, constraints_path, partition_path, observed_path, energies_path;
    double beta = 1.0;
    std::size_t category = 0;

    auto* me_lin = cmd_me->add_subcommand(
        "linear", "one linear constraint, e.g. a fair dice prior tilted to mean 4");
    me_lin->add_option("--prior", prior_path, "prior distribution")->required();
    me_lin->add_option("--constraints", constraints_path, "JSON {coeffs, target}")->required();
    me_lin->add_option("--tol", tol, "constraint residual tolerance");

    auto* me_multi = cmd_me->add_subcommand(
        "multi", "several linear constraints (dual Newton), e.g. `relent maxent multi --prior "
                 "flows.csv --constraints margins.json`");
    me_multi->add_option("--prior", prior_path, "prior distribution")->required();
    me_multi->add_option("--constraints", constraints_path, "JSON array of {coeffs, target}")
        ->required();
    me_multi->add_option("--tol", tol, "constraint residual tolerance");
    me_multi->add_option("--max-iter", max_iter, "iteration cap");

    auto* me_gibbs = cmd_me->add_subcommand(
        "gibbs", "Boltzmann-Gibbs distribution, e.g. `relent maxent gibbs --energies E.json "
                 "--beta 2`");
    me_gibbs->add_option("--energies", energies_path, "energy levels (JSON array or CSV)")
        ->required();
    me_gibbs->add_option("--beta", beta, "inverse temperature")->required();

    auto* me_coarse = cmd_me->add_subcommand(
        "coarse", "coarse-grained observations, e.g. `relent maxent coarse --prior p.csv "
                  "--partition groups.json --observed big.csv`");
    me_coarse->add_option("--prior", prior_path, "prior distribution")->required();
    me_coarse->add_option("--partition", partition_path, "JSON array of group indices")
        ->required();
    me_coarse->add_option("--observed", observed_path, "observed group distribution")->required();

    auto* me_unobs = cmd_me->add_subcommand(
        "unobserved", "condition on a category not occurring, e.g. `relent maxent unobserved "
                      "--prior p.csv --category 0`");
    me_unobs->add_option("--prior", prior_path, "prior distribution")->required();
    me_unobs->add_option("--category", category, "0-based category index")->required();

    auto* me_sym = cmd_me->add_subcommand(
        "symmetric", "geometric-mean symmetric projection, e.g. `relent maxent symmetric "
                     "--table flows.csv`");
    me_sym->add_option("--table", table_path, "square table prior CSV")->required();

    // ---- sanov-check --------------------------------------------------------
    auto* cmd_sanov = app.add_subcommand(
        "sanov-check", "Monte-Carlo check of the large-deviation rate, e.g. fair-coin "
                       "heads-fraction >= 0.7");
    std::vector<long> n_list;
    long trials = 100000;
    cmd_sanov->add_option("--prior", prior_path, "sampling distribution")->required();
    cmd_sanov->add_option("--constraints", constraints_path, "JSON {coeffs, target}")->required();
    cmd_sanov->add_option("--n", n_list, "sample sizes (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    cmd_sanov->add_option("--trials", trials, "Monte-Carlo trials per sample size");
    cmd_sanov->add_option("--seed", seed, "RNG seed (echoed in the report)");

    // ---- bayes --------------------------------------------------------------
    auto* cmd_bayes = app.add_subcommand("bayes", "Bayesian selection among simple hypotheses");
    cmd_bayes->require_subcommand(1);
    std::string hyp_path, data_path;
    auto* b_select = cmd_bayes->add_subcommand(
        "select", "posterior over hypotheses, e.g. `relent bayes select --hypotheses h.json "
                  "--data obs.csv --n 100`");
    b_select->add_option("--hypotheses", hyp_path, "JSON [{prior, probs}, ...]")->required();
    b_select->add_option("--data", data_path, "observed distribution")->required();
    b_select->add_option("--n", n_obs, "sample size")->required();

    // ---- em -----------------------------------------------------------------
    auto* cmd_em = app.add_subcommand("em", "EM for finite mixtures with fixed components");
    cmd_em->require_subcommand(1);
    std::string problem_path, rho0_path;
    auto* em_fit_cmd = cmd_em->add_subcommand(
        "fit", "fit the mixing proportions, e.g. `relent em fit --problem mixture.json`");
    em_fit_cmd->add_option("--problem", problem_path, "JSON {components, observed}")->required();
    em_fit_cmd->add_option("--rho0", rho0_path, "starting weights (default uniform)");
    em_fit_cmd->add_option("--tol", tol, "parameter-change tolerance");
    em_fit_cmd->add_option("--max-iter", max_iter, "iteration cap");

    // ---- markov -------------------------------------------------------------
    auto* cmd_markov = app.add_subcommand("markov", "character n-gram models");
    cmd_markov->require_subcommand(1);
    std::string corpus_path, model_path, model_out, g_model_path, text_out;
    int order = 3, max_order = 5;
    long gen_length = 200;
    double lambda = -1.0, mu = -1.0;
    bool keep_case = false, keep_space = false, keep_punct = false, with_counts = false;
    std::string keep_chars;

    auto add_norm_flags = [&](CLI::App* c) {
        c->add_flag("--keep-case", keep_case, "do not fold to lowercase");
        c->add_flag("--keep-whitespace", keep_space, "do not collapse whitespace runs");
        c->add_flag("--keep-punctuation", keep_punct, "do not strip punctuation");
        c->add_option("--keep", keep_chars, "punctuation characters to retain (e.g. \"'-\")");
    };

    auto* mk_train = cmd_markov->add_subcommand(
        "train", "fit a conditional model, e.g. `relent markov train --order 4 --in "
                 "binary202.txt --counts`");
    mk_train->add_option("--in", corpus_path, "UTF-8 corpus file")->required();
    mk_train->add_option("--order", order, "context length r")->required();
    mk_train->add_option("--model-out", model_out, "write the model JSON here");
    mk_train->add_flag("--counts", with_counts, "include integer r-gram context counts");
    add_norm_flags(mk_train);

    auto* mk_entropy = cmd_markov->add_subcommand(
        "entropy", "gram and conditional entropies, e.g. `relent markov entropy --in "
                   "corpus.txt --max-order 5`");
    mk_entropy->add_option("--in", corpus_path, "UTF-8 corpus file")->required();
    mk_entropy->add_option("--max-order", max_order, "largest conditional order to report");
    add_norm_flags(mk_entropy);

    auto* mk_scan = cmd_markov->add_subcommand(
        "order-scan", "sequential chi-square tests detecting the Markov order, e.g. `relent "
                      "markov order-scan --in corpus.txt --alpha 0.05`");
    mk_scan->add_option("--in", corpus_path, "UTF-8 corpus file")->required();
    mk_scan->add_option("--alpha", alpha, "significance level");
    add_norm_flags(mk_scan);

    auto* mk_gen = cmd_markov->add_subcommand(
        "generate", "sample text, e.g. `relent markov generate --model m.json --length 200 "
                    "--seed 42`");
    mk_gen->add_option("--model", model_path, "model JSON")->required();
    mk_gen->add_option("--length", gen_length, "number of symbols")->required();
    mk_gen->add_option("--seed", seed, "RNG seed (echoed in the report)");
    mk_gen->add_option("--text-out", text_out, "also write the raw text here");

    auto* mk_anneal = cmd_markov->add_subcommand(
        "anneal", "heat or cool a model's rows, e.g. `relent markov anneal --model m.json "
                  "--beta 0.5`");
    mk_anneal->add_option("--model", model_path, "model JSON")->required();
    mk_anneal->add_option("--beta", beta, "inverse temperature (beta < 1 heats)")->required();
    mk_anneal->add_option("--model-out", model_out, "write the annealed model here");

    auto* mk_mix = cmd_markov->add_subcommand(
        "mix", "additive or multiplicative mixture, e.g. `relent markov mix --f en.json "
               "--g fr.json --mu 0.5`");
    mk_mix->add_option("--f", model_path, "first model JSON")->required();
    mk_mix->add_option("--g", g_model_path, "second model JSON")->required();
    mk_mix->add_option("--lambda", lambda, "additive weight on the first model");
    mk_mix->add_option("--mu", mu, "multiplicative weight on the first model");
    mk_mix->add_option("--model-out", model_out, "write the mixed model here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        relent::NormalizationSpec norm;
        norm.lowercase = !keep_case;
        norm.collapse_whitespace = !keep_space;
        norm.strip_punctuation = !keep_punct;
        norm.keep = keep_chars;
        json norm_cfg = relent::io::normalization_to_json(norm);

        if (*cmd_entropy) {
            relent::Distribution f = relent::io::load_distribution(f_path);
            json payload;
            payload["entropy"] = relent::entropy(f);
            out.emit("entropy", json{{"f", f_path}}, payload);
        } else if (*cmd_kl) {
            relent::Distribution f = relent::io::load_distribution(f_path);
            relent::Distribution g = relent::io::load_distribution(g_path);
            json payload;
            payload["kl"] = relent::io::json_number(relent::relative_entropy(f, g));
            out.emit("kl", json{{"f", f_path}, {"g", g_path}}, payload);
        } else if (*t_simple) {
            auto rep = relent::test_simple(relent::io::load_distribution(f_path),
                                           relent::io::load_distribution(g_path), n_obs, alpha);
            out.emit("test simple",
                     json{{"f", f_path}, {"g", g_path}, {"n", n_obs}, {"alpha", alpha}},
                     relent::io::test_report_to_json(rep));
        } else if (*t_comp) {
            auto rep = relent::test_composite(relent::io::load_distribution(f_path),
                                              relent::io::load_distribution(fitted_path), dim_s,
                                              dim_m, n_obs, alpha);
            out.emit("test composite",
                     json{{"f", f_path}, {"fitted", fitted_path}, {"dim_s", dim_s},
                          {"dim_m", dim_m}, {"n", n_obs}, {"alpha", alpha}},
                     relent::io::test_report_to_json(rep));
        } else if (*t_indep) {
            relent::JointTable t = relent::io::load_table(table_path);
            auto fit = relent::fit_independence(t);
            int dimS = static_cast<int>(t.rows() * t.cols()) - 1;
            auto rep = relent::test_composite(t.flatten(), fit.fitted.flatten(), dimS,
                                              fit.dim_family, n_obs, alpha);
            json payload = relent::io::test_report_to_json(rep);
            payload["mutual_information"] = fit.divergence;
            out.emit("test independence",
                     json{{"table", table_path}, {"n", n_obs}, {"alpha", alpha}}, payload);
        } else if (*t_nested) {
            auto rep = relent::test_nested(relent::io::load_distribution(f_path),
                                           relent::io::load_distribution(fit0_path),
                                           relent::io::load_distribution(fit1_path), df_delta,
                                           n_obs, alpha);
            out.emit("test nested",
                     json{{"f", f_path}, {"fit0", fit0_path}, {"fit1", fit1_path},
                          {"df", df_delta}, {"n", n_obs}, {"alpha", alpha}},
                     relent::io::test_report_to_json(rep));
        } else if (*f_indep) {
            auto r = relent::fit_independence(relent::io::load_table(table_path));
            if (!fitted_csv.empty())
                relent::io::write_file(fitted_csv, relent::io::table_to_csv(r.fitted));
            out.emit("fit independence", json{{"table", table_path}}, fit_table_payload(r));
        } else if (*f_sym) {
            auto r = relent::fit_symmetry(relent::io::load_table(table_path));
            if (!fitted_csv.empty())
                relent::io::write_file(fitted_csv, relent::io::table_to_csv(r.fitted));
            out.emit("fit symmetry", json{{"table", table_path}}, fit_table_payload(r));
        } else if (*f_qs) {
            auto r = relent::fit_quasi_symmetry(relent::io::load_table(table_path), tol, max_iter);
            if (!fitted_csv.empty())
                relent::io::write_file(fitted_csv, relent::io::table_to_csv(r.fitted));
            out.emit("fit qs",
                     json{{"table", table_path}, {"tol", tol}, {"max_iter", max_iter}},
                     fit_table_payload(r));
        } else if (*f_three) {
            relent::ThreeWayModel kind = model_kind == "L"
                                             ? relent::ThreeWayModel::kJointIndependence
                                             : model_kind == "M"
                                                   ? relent::ThreeWayModel::kMarginalIndependence
                                                   : relent::ThreeWayModel::kConditionalIndependence;
            auto r = relent::fit_threeway(relent::io::load_tensor(tensor_path), kind);
            json payload;
            payload["divergence"] = relent::io::json_number(r.divergence);
            payload["dim_family"] = r.dim_family;
            payload["fitted"] = relent::io::tensor_to_json(r.fitted);
            out.emit("fit threeway", json{{"tensor", tensor_path}, {"model", model_kind}},
                     payload);
        } else if (*me_lin) {
            auto cs = relent::io::load_constraints(constraints_path);
            auto r = relent::maxent_linear(relent::io::load_distribution(prior_path), cs.at(0),
                                           tol);
            out.emit("maxent linear",
                     json{{"prior", prior_path}, {"constraints", constraints_path}, {"tol", tol}},
                     maxent_payload(r));
        } else if (*me_multi) {
            auto cs = relent::io::load_constraints(constraints_path);
            auto r = relent::maxent_multi(relent::io::load_distribution(prior_path), cs, tol,
                                          max_iter);
            out.emit("maxent multi",
                     json{{"prior", prior_path}, {"constraints", constraints_path}, {"tol", tol},
                          {"max_iter", max_iter}},
                     maxent_payload(r));
        } else if (*me_gibbs) {
            relent::Distribution d = relent::boltzmann_gibbs(load_numbers(energies_path), beta);
            json payload;
            payload["distribution"] = relent::io::distribution_to_json(d);
            out.emit("maxent gibbs", json{{"energies", energies_path}, {"beta", beta}}, payload);
        } else if (*me_coarse) {
            auto r = relent::maxent_coarse(relent::io::load_distribution(prior_path),
                                           load_partition(partition_path),
                                           relent::io::load_distribution(observed_path));
            out.emit("maxent coarse",
                     json{{"prior", prior_path}, {"partition", partition_path},
                          {"observed", observed_path}},
                     maxent_payload(r));
        } else if (*me_unobs) {
            auto r = relent::maxent_unobserved(relent::io::load_distribution(prior_path),
                                               category);
            out.emit("maxent unobserved",
                     json{{"prior", prior_path}, {"category", category}}, maxent_payload(r));
        } else if (*me_sym) {
            auto r = relent::maxent_symmetric(relent::io::load_table(table_path));
            out.emit("maxent symmetric", json{{"table", table_path}}, maxent_payload(r));
        } else if (*cmd_sanov) {
            auto cs = relent::io::load_constraints(constraints_path);
            auto rep = relent::sanov_mc_check(relent::io::load_distribution(prior_path), cs.at(0),
                                              n_list, trials, seed, threads);
            json points = json::array();
            for (const auto& p : rep.points) {
                json pj;
                pj["n"] = p.n;
                pj["trials"] = p.trials;
                pj["hits"] = p.hits;
                pj["rate"] = relent::io::json_number(p.rate);
                points.push_back(pj);
            }
            json payload;
            payload["points"] = points;
            payload["theoretical_rate"] = rep.theoretical_rate;
            payload["fitted_rate"] = relent::io::json_number(rep.fitted_rate);
            payload["slope_valid"] = rep.slope_valid;
            payload["zero_hit_flag"] = rep.zero_hit_flag;
            json cfg{{"prior", prior_path}, {"constraints", constraints_path},
                     {"trials", trials}, {"seed", seed}, {"threads", threads}};
            cfg["n"] = n_list;
            out.emit("sanov-check", cfg, payload);
        } else if (*b_select) {
            relent::HypothesisSet h = relent::io::load_hypotheses(hyp_path);
            relent::Distribution fD = relent::io::load_distribution(data_path);
            relent::Distribution post = relent::posterior_over_hypotheses(h, fD, n_obs);
            auto scores = relent::penalized_score(h, fD, n_obs);
            json payload;
            payload["posterior"] = relent::io::distribution_to_json(post);
            json sc = json::array();
            for (double s : scores) sc.push_back(relent::io::json_number(s));
            payload["penalized_scores"] = sc;
            payload["selected"] = relent::argmax_posterior(post);
            out.emit("bayes select",
                     json{{"hypotheses", hyp_path}, {"data", data_path}, {"n", n_obs}}, payload);
        } else if (*em_fit_cmd) {
            relent::MixtureProblem p = relent::io::load_mixture_problem(problem_path);
            relent::Distribution rho0 =
                rho0_path.empty() ? relent::Distribution::uniform(p.component_count())
                                  : relent::io::load_distribution(rho0_path);
            relent::EMTrace t = relent::em_fit(p, rho0, tol, max_iter);
            json payload;
            payload["rho"] = relent::io::distribution_to_json(t.rho);
            payload["divergence_path"] = t.divergence_path;
            payload["iterations"] = t.iterations;
            payload["converged"] = t.converged;
            out.emit("em fit",
                     json{{"problem", problem_path}, {"rho0", rho0_path}, {"tol", tol},
                          {"max_iter", max_iter}},
                     payload);
        } else if (*mk_train) {
            relent::SymbolSequence s =
                relent::ingest_corpus(relent::io::read_file(corpus_path), norm);
            relent::ConditionalModel model = relent::fit_conditional(s, order, norm);
            json payload;
            payload["n"] = s.size();
            payload["alphabet_size"] = s.alphabet.size();
            payload["contexts"] = model.contexts.size();
            if (with_counts) {
                relent::NGramTable t = relent::count_ngrams(s, order);
                json counts = json::object();
                for (const auto& [g, c] : t.counts) counts[g] = c;
                payload["context_counts"] = counts;
                payload["context_total"] = t.total;
            }
            if (!model_out.empty()) {
                relent::io::write_file(model_out,
                                       relent::io::model_to_json(model).dump(2) + "\n");
                payload["model_file"] = model_out;
            } else {
                payload["model"] = relent::io::model_to_json(model);
            }
            json cfg{{"in", corpus_path}, {"order", order}, {"counts", with_counts}};
            cfg["normalization"] = norm_cfg;
            out.emit("markov train", cfg, payload);
        } else if (*mk_entropy) {
            relent::SymbolSequence s =
                relent::ingest_corpus(relent::io::read_file(corpus_path), norm);
            json payload;
            payload["n"] = s.size();
            payload["alphabet_size"] = s.alphabet.size();
            json hr = json::array(), Hr = json::array();
            double h_last = 0.0;
            for (int r = 1; r <= max_order && static_cast<std::size_t>(r) < s.size(); ++r) {
                Hr.push_back(relent::gram_entropy(s, r));
                h_last = relent::cond_entropy(s, r - 1);
                hr.push_back(h_last);
            }
            payload["gram_entropy"] = Hr;
            payload["cond_entropy"] = hr;
            if (s.alphabet.size() >= 2)
                payload["redundancy"] = relent::redundancy(
                    std::min(h_last, std::log(static_cast<double>(s.alphabet.size()))),
                    s.alphabet.size());
            json cfg{{"in", corpus_path}, {"max_order", max_order}};
            cfg["normalization"] = norm_cfg;
            out.emit("markov entropy", cfg, payload);
        } else if (*mk_scan) {
            relent::SymbolSequence s =
                relent::ingest_corpus(relent::io::read_file(corpus_path), norm);
            relent::OrderScanResult res = relent::order_scan(s, alpha);
            json payload;
            payload["r_max"] = res.r_max;
            payload["detected_order"] = res.detected_order;
            json reports = json::array();
            for (std::size_t i = 0; i < res.reports.size(); ++i) {
                json rj = relent::io::test_report_to_json(res.reports[i]);
                rj["r"] = i + 1;
                reports.push_back(rj);
            }
            payload["reports"] = reports;
            json cfg{{"in", corpus_path}, {"alpha", alpha}};
            cfg["normalization"] = norm_cfg;
            out.emit("markov order-scan", cfg, payload);
        } else if (*mk_gen) {
            relent::ConditionalModel model = relent::io::load_model(model_path);
            relent::GenerateResult g = relent::generate(model, gen_length, seed);
            json payload;
            payload["text"] = g.sequence.str();
            payload["restarts"] = g.restarts;
            if (!text_out.empty()) {
                relent::io::write_file(text_out, g.sequence.str() + "\n");
                payload["text_file"] = text_out;
            }
            out.emit("markov generate",
                     json{{"model", model_path}, {"length", gen_length}, {"seed", seed}},
                     payload);
        } else if (*mk_anneal) {
            relent::ConditionalModel model =
                relent::anneal(relent::io::load_model(model_path), beta);
            json payload;
            if (!model_out.empty()) {
                relent::io::write_file(model_out,
                                       relent::io::model_to_json(model).dump(2) + "\n");
                payload["model_file"] = model_out;
            } else {
                payload["model"] = relent::io::model_to_json(model);
            }
            out.emit("markov anneal", json{{"model", model_path}, {"beta", beta}}, payload);
        } else if (*mk_mix) {
            if ((lambda >= 0.0) == (mu >= 0.0))
                throw relent::invalid_input("markov mix: give exactly one of --lambda or --mu");
            relent::ConditionalModel mf = relent::io::load_model(model_path);
            relent::ConditionalModel mg = relent::io::load_model(g_model_path);
            json payload;
            relent::ConditionalModel mixed;
            if (lambda >= 0.0) {
                mixed = relent::mix_additive(mf, mg, lambda);
                payload["kind"] = "additive";
            } else {
                auto res = relent::mix_multiplicative(mf, mg, mu);
                mixed = std::move(res.model);
                payload["kind"] = "multiplicative";
                payload["dropped_contexts"] = res.dropped_contexts;
            }
            if (!model_out.empty()) {
                relent::io::write_file(model_out,
                                       relent::io::model_to_json(mixed).dump(2) + "\n");
                payload["model_file"] = model_out;
            } else {
                payload["model"] = relent::io::model_to_json(mixed);
            }
            out.emit("markov mix",
                     json{{"f", model_path}, {"g", g_model_path}, {"lambda", lambda}, {"mu", mu}},
                     payload);
        }
        return kExitOk;
    } catch (const relent::convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const relent::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const relent::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
