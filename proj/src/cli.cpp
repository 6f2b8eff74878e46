#include "aerq/cli.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "aerq/csv.hpp"
#include "aerq/error.hpp"
#include "aerq/report.hpp"
#include "aerq/rq.hpp"

namespace aerq::cli {

namespace {

Index parse_index(const std::string& text) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw InputError("not an integer: '" + text + "'");
    return static_cast<Index>(v);
}

Dataset load_input(const RunConfig& config) {
    if (!config.input) throw InputError("--input is required");
    return load_csv(*config.input, config.size_mode);
}

const char* csv_field(double v, std::string& buf) {
    buf = std::isfinite(v) ? format_double(v) : std::string();
    return buf.c_str();
}

std::string csv_row(std::uint64_t instance, const AerqReport& rep) {
    std::ostringstream s;
    std::string b;
    s << instance << ',' << rep.n << ',' << rep.p << ',' << csv_field(rep.b_primal, b) << ','
      << csv_field(rep.b_weights, b) << ',' << csv_field(rep.b_restimator, b) << ','
      << csv_field(rep.shortfall, b) << ',' << csv_field(rep.mean_y, b) << ','
      << csv_field(rep.max_y, b) << ',' << to_string(rep.verdict);
    return s.str();
}

constexpr const char* kVerifyCsvHeader =
    "instance,n,p,b_primal,b_weights,b_restimator,shortfall,mean_y,max_y,verdict";

} // namespace

std::pair<Index, Index> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const Index v = parse_index(text);
        return {v, v};
    }
    const Index lo = parse_index(text.substr(0, colon));
    const Index hi = parse_index(text.substr(colon + 1));
    if (lo > hi) throw InputError("empty range '" + text + "'");
    return {lo, hi};
}

Vector parse_vector(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw InputError("not a number: '" + item + "'");
        vals.push_back(v);
    }
    Vector out(static_cast<Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Index>(i)) = vals[i];
    return out;
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    VerifyOptions options;
    options.tol = config.tol;
    VerifySummary summary;
    const bool csv = config.format == Format::Csv;
    if (csv) out << kVerifyCsvHeader << '\n';

    if (config.input) {
        const AerqReport rep = verify_identities(load_input(config), options);
        summary.add(rep.verdict);
        out << (csv ? csv_row(0, rep) : dump_line(report_to_json(rep, 0))) << '\n';
    } else {
        if (!config.seed) throw InputError("verify: --seed is required with --generate");
        const std::size_t total = config.generate;
        unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
        threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(total, 1))));

        std::vector<std::optional<std::pair<std::string, Verdict>>> ready(total);
        std::size_t next_emit = 0;
        std::atomic<std::size_t> next_job{0};
        std::mutex mu;
        std::exception_ptr failure;

        auto worker = [&] {
            while (true) {
                const std::size_t i = next_job.fetch_add(1);
                if (i >= total) return;
                std::pair<std::string, Verdict> line;
                try {
                    const auto inst = corpus_instance(config.corpus, *config.seed, i);
                    const AerqReport rep = verify_identities(inst.data, options, &inst.truth);
                    line = {csv ? csv_row(i, rep) : dump_line(report_to_json(rep, i)), rep.verdict};
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    next_job.store(total);
                    return;
                }
                std::lock_guard lock(mu);
                ready[i] = std::move(line);
                while (next_emit < total && ready[next_emit]) {
                    out << ready[next_emit]->first << '\n';
                    summary.add(ready[next_emit]->second);
                    ready[next_emit].reset();
                    ++next_emit;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    (csv ? err : out) << dump_line(summary_to_json(summary)) << '\n';
    out.flush();
    return summary.fail == 0 ? kSuccess : kVerificationFailure;
}

int run_simulate(const RunConfig& config, std::ostream& out) {
    if (!config.seed) throw InputError("simulate: --seed is required");
    if (!config.output) throw InputError("simulate: --output is required");
    const auto inst = generate(config.simulate, *config.seed, 0);
    if (config.output->string() == "-") {
        write_csv(out, inst.data);
        return kSuccess;
    }
    std::ofstream file(*config.output, std::ios::binary);
    if (!file) throw InputError("cannot write '" + config.output->string() + "'");
    write_csv(file, inst.data);
    return kSuccess;
}

int run_fit(const RunConfig& config, std::ostream& out) {
    if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
        throw InputError("fit: alpha must lie in (0, 1]");
    }
    const Dataset data = load_input(config);
    const QuantileFit fit =
        config.alpha == 1.0 ? fit_extreme_rq(data, config.tol).fit : fit_rq(data, config.alpha, config.tol);
    if (config.format == Format::Csv) {
        out << "term,coefficient\n";
        const Vector coef = fit.coefficients();
        for (Index j = 0; j < coef.size(); ++j) {
            out << (j == 0 ? std::string("intercept") : "x" + std::to_string(j)) << ','
                << format_double(coef(j)) << '\n';
        }
    } else {
        out << dump_line(fit_to_json(fit, averaged_rq(fit, data))) << '\n';
    }
    return kSuccess;
}

int run_rank_scores(const RunConfig& config, std::ostream& out) {
    const Dataset data = load_input(config);
    const RankScoreSolution s = solve_rank_scores(data, config.alpha, config.tol);
    if (config.format == Format::Csv) {
        out << "observation,score\n";
        for (Index i = 0; i < s.scores.size(); ++i) out << i + 1 << ',' << format_double(s.scores(i)) << '\n';
    } else {
        out << dump_line(rank_scores_to_json(s)) << '\n';
    }
    return kSuccess;
}

int run_aerq(const RunConfig& config, std::ostream& out) {
    VerifyOptions options;
    options.tol = config.tol;
    const AerqReport rep = verify_identities(load_input(config), options);
    if (config.format == Format::Csv) {
        out << kVerifyCsvHeader << '\n' << csv_row(0, rep) << '\n';
    } else {
        out << dump_line(report_to_json(rep)) << '\n';
    }
    return rep.verdict == Verdict::Fail ? kVerificationFailure : kSuccess;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regression quantiles and the averaged extreme regression quantile"};
    app.require_subcommand(1);

    RunConfig config;
    std::string format = "json";
    std::string input;
    double tol = config.tol.cross_route;
    std::uint64_t seed = 0;
    bool exact_fit = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--tol", tol, "Cross-route equality tolerance")->check(CLI::PositiveNumber);
    };
    auto with_input = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--input", input, "CSV file with header y,x1,...,xp");
        if (required) opt->required();
        sub->add_flag("--allow-exact-fit", exact_fit, "Accept n = p + 1");
    };

    auto* fit = app.add_subcommand("fit", "Regression quantile at level alpha (alpha = 1: extreme)");
    with_input(fit, true);
    fit->add_option("--alpha", config.alpha, "Level in (0, 1]")->required();
    common(fit);

    auto* scores = app.add_subcommand("rankscores", "Regression rank scores at level alpha");
    with_input(scores, true);
    scores->add_option("--alpha", config.alpha, "Level in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
    common(scores);

    auto* aerq_cmd = app.add_subcommand("aerq", "Averaged extreme regression quantile by every route");
    with_input(aerq_cmd, true);
    common(aerq_cmd);

    std::string n_range = "8:60";
    std::string p_range = "1:5";
    std::string dist = "normal";
    double hetero_fraction = 0.0;
    double hetero = 1.0;
    std::string beta;
    auto* verify = app.add_subcommand("verify", "Check the identities on a file or a generated corpus");
    with_input(verify, false);
    auto* gen_opt = verify->add_option("--generate", config.generate, "Number of generated instances");
    gen_opt->excludes(verify->get_option("--input"));
    verify->add_option("--n", n_range, "Sample size N or range A:B");
    verify->add_option("--p", p_range, "Regressor count P or range A:B");
    verify->add_option("--dist", dist, "Error laws, cycled by instance: normal, t(df), pareto(tail)");
    verify->add_option("--hetero-fraction", hetero_fraction, "Share of heteroscedastic instances")
        ->check(CLI::Range(0.0, 1.0));
    verify->add_option("--hetero", hetero, "Scale multiplier s_i = 1 + h|x_i1|")->check(CLI::NonNegativeNumber);
    verify->add_option("--beta", beta, "True coefficients (intercept first); random when absent");
    auto* seed_opt = verify->add_option("--seed", seed, "64-bit seed");
    verify->add_option("--threads", config.threads, "Worker threads (0: all cores)");
    common(verify);

    auto* sim = app.add_subcommand("simulate", "Write one generated data set as CSV");
    sim->add_option("--n", config.simulate.n, "Sample size")->required();
    sim->add_option("--p", config.simulate.p, "Regressor count")->required();
    sim->add_option("--dist", dist, "Error law: normal, t(df), pareto(tail)");
    sim->add_option("--beta", beta, "True coefficients (intercept first); zeros when absent");
    sim->add_option("--hetero", config.simulate.hetero, "Scale multiplier s_i = 1 + h|x_i1|")
        ->check(CLI::NonNegativeNumber);
    auto* sim_seed = sim->add_option("--seed", seed, "64-bit seed")->required();
    std::string output;
    sim->add_option("--output", output, "Output CSV path ('-' for stdout)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputFailure;
    }

    try {
        config.format = format == "csv" ? Format::Csv : Format::Json;
        config.tol.cross_route = tol;
        config.size_mode = exact_fit ? SizeMode::AllowExactFit : SizeMode::Strict;
        if (!input.empty()) config.input = input;
        if (!output.empty()) config.output = output;
        if (*seed_opt || *sim_seed) config.seed = seed;

        if (*fit) {
            config.command = Command::Fit;
            return run_fit(config, out);
        }
        if (*scores) {
            config.command = Command::RankScores;
            return run_rank_scores(config, out);
        }
        if (*aerq_cmd) {
            config.command = Command::Aerq;
            return run_aerq(config, out);
        }
        if (*verify) {
            config.command = Command::Verify;
            if (!config.input && config.generate == 0) {
                throw InputError("verify: give --input FILE or --generate N");
            }
            std::tie(config.corpus.n_min, config.corpus.n_max) = parse_range(n_range);
            std::tie(config.corpus.p_min, config.corpus.p_max) = parse_range(p_range);
            config.corpus.laws = parse_error_laws(dist);
            config.corpus.hetero_fraction = hetero_fraction;
            config.corpus.hetero = hetero;
            if (!beta.empty()) config.corpus.beta = parse_vector(beta);
            return run_verify(config, out, err);
        }
        config.command = Command::Simulate;
        config.simulate.law = parse_error_law(dist);
        if (!beta.empty()) config.simulate.beta = parse_vector(beta);
        return run_simulate(config, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const DegeneracyError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

} // namespace aerq::cli
