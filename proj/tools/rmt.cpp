// rmt: command-line surface for the random-matrix toolkit.
//
// Exit codes: 0 success, 64 usage/input error, 2 validation failure,
// 3 numerical failure (diagnostic JSON on stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/freeprob.hpp"
#include "rmt/io.hpp"
#include "rmt/kernels.hpp"
#include "rmt/orthopoly.hpp"
#include "rmt/rmstats.hpp"
#include "rmt/spectral.hpp"
#include "rmt/validation.hpp"

namespace {

std::vector<double> parse_grid(const std::string& s) {
    double start, stop, step;
    char c1, c2;
    std::istringstream is(s);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw rmt::InputError("grid must be start:stop:step with step > 0, got '" + s + "'");
    std::vector<double> out;
    for (double x = start; x <= stop + 1e-12 * std::max(1.0, std::abs(stop)); x += step)
        out.push_back(x);
    if (out.empty()) throw rmt::InputError("empty grid '" + s + "'");
    return out;
}

rmt::EnsembleKind parse_ensemble(const std::string& s) {
    if (s == "goe") return rmt::EnsembleKind::GOE;
    if (s == "gue") return rmt::EnsembleKind::GUE;
    if (s == "wishart-real") return rmt::EnsembleKind::WishartReal;
    if (s == "wishart-complex") return rmt::EnsembleKind::WishartComplex;
    throw rmt::InputError("unknown ensemble '" + s + "'");
}

std::string join_argv(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) out += std::string(i ? " " : "") + argv[i];
    return out;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("RMT_THREADS")) {
        int t = std::atoi(threads);
        if (t > 0) Eigen::setNbThreads(t);
    }
    const std::string command_echo = join_argv(argc, argv);

    CLI::App app{"random-matrix spectral statistics toolkit"};
    app.require_subcommand(1);

    // --- sample ---
    auto* sample = app.add_subcommand("sample", "sample ensemble spectra to CSV");
    std::string s_ensemble = "gue", s_output, s_spikes;
    int s_n = 100, s_p = 100, s_count = 1, s_spike_rank = 0;
    double s_sigma2 = 1.0, s_spike_lambda = 0.0;
    std::uint64_t s_seed = 0;
    sample->add_option("--ensemble", s_ensemble, "goe|gue|wishart-real|wishart-complex");
    sample->add_option("-n,--size", s_n, "matrix size / degrees of freedom")->required();
    sample->add_option("-p,--dim", s_p, "Wishart dimension");
    sample->add_option("--sigma2", s_sigma2, "base variance");
    sample->add_option("--spikes", s_spikes, "comma-separated Wishart spike std-devs");
    sample->add_option("--spike-lambda", s_spike_lambda, "additive spike strength (GOE/GUE)");
    sample->add_option("--spike-rank", s_spike_rank, "additive spike rank (GOE/GUE)");
    sample->add_option("--count", s_count, "number of independent samples");
    sample->add_option("--seed", s_seed, "RNG seed")->required();
    sample->add_option("-o,--output", s_output, "output CSV (one spectrum per column)")
        ->required();

    // --- law ---
    auto* law = app.add_subcommand("law", "evaluate limit-law pdf/cdf on a grid");
    std::string l_law = "semicircle", l_grid, l_output;
    double l_sigma2 = 1.0, l_gamma = 1.0;
    law->add_option("--law", l_law, "semicircle|mp");
    law->add_option("--sigma2", l_sigma2, "variance parameter");
    law->add_option("--gamma", l_gamma, "MP aspect ratio n/p");
    law->add_option("--grid", l_grid, "x grid start:stop:step")->required();
    law->add_option("-o,--output", l_output, "output CSV (x, pdf, cdf)")->required();

    // --- freeconv ---
    auto* freeconv = app.add_subcommand("freeconv", "subordination density of sc (+) atoms");
    std::string f_grid, f_output;
    double f_sigma2 = 1.0, f_eps = 0.0, f_lambda = 1.0, f_eta = 1e-4;
    freeconv->add_option("--sigma2", f_sigma2, "semicircle variance");
    freeconv->add_option("--eps", f_eps, "atom weight at Lambda")->required();
    freeconv->add_option("--lambda", f_lambda, "atom location")->required();
    freeconv->add_option("--eta", f_eta, "final imaginary offset");
    freeconv->add_option("--grid", f_grid, "x grid start:stop:step")->required();
    freeconv->add_option("-o,--output", f_output, "output CSV (x, density)")->required();

    // --- kernel ---
    auto* kernel = app.add_subcommand("kernel", "tabulate sine/Airy kernel on a grid");
    std::string k_kind = "sine", k_grid, k_output;
    kernel->add_option("--kind", k_kind, "sine|airy");
    kernel->add_option("--grid", k_grid, "grid start:stop:step (used for both axes)")->required();
    kernel->add_option("-o,--output", k_output, "output CSV matrix K(x_i, x_j)")->required();

    // --- tw ---
    auto* tw = app.add_subcommand("tw", "build a Tracy-Widom CDF table");
    std::string t_grid = "-12:8:0.05", t_method = "painleve", t_variant = "sqrt-tw2", t_output;
    int t_beta = 2;
    tw->add_option("--beta", t_beta, "1 or 2");
    tw->add_option("--grid", t_grid, "s grid start:stop:step");
    tw->add_option("--method", t_method, "fredholm|painleve");
    tw->add_option("--variant", t_variant, "beta=1 formula: sqrt-tw2|plain");
    tw->add_option("-o,--output", t_output, "output CSV (s, cdf); JSON header alongside")
        ->required();

    // --- gap ---
    auto* gap = app.add_subcommand("gap", "gap probability P[no eigenvalue in (a, inf)]");
    int g_n = 0;
    double g_a = 0.0;
    std::string g_output;
    bool g_edge = false;
    gap->add_option("-n,--size", g_n, "finite-n GUE size (omit for the edge limit)");
    gap->add_option("--a", g_a, "left endpoint (finite n) or TW argument s (edge)")->required();
    gap->add_flag("--edge", g_edge, "use the Airy-kernel (Tracy-Widom) limit");
    gap->add_option("-o,--output", g_output, "output JSON")->required();

    // --- pca-test ---
    auto* pca = app.add_subcommand("pca-test", "TW significance test of a data matrix's PCA");
    std::string p_data, p_output;
    double p_alpha = 0.01;
    int p_beta = 1;
    pca->add_option("--data", p_data, "input data CSV (rows = observations)")->required();
    pca->add_option("--alpha", p_alpha, "test level");
    pca->add_option("--beta", p_beta, "1 (real data) or 2 (complex-derived)");
    pca->add_option("-o,--output", p_output, "output PcaReport JSON")->required();

    // --- denoise ---
    auto* denoise = app.add_subcommand("denoise", "MP noise-band covariance cleaning");
    std::string d_input, d_output;
    double d_gamma = 0.0;
    int d_exclude = 0;
    denoise->add_option("--input", d_input, "covariance CSV")->required();
    denoise->add_option("--gamma", d_gamma, "aspect ratio n/p")->required();
    denoise->add_option("--exclude-top", d_exclude, "eigenvalues excluded from the fit");
    denoise->add_option("-o,--output", d_output, "cleaned covariance CSV")->required();

    // --- frontier ---
    auto* frontier = app.add_subcommand("frontier", "Markowitz efficient frontier");
    std::string fr_cov, fr_p, fr_grid, fr_output;
    frontier->add_option("--cov", fr_cov, "covariance CSV")->required();
    frontier->add_option("--gains", fr_p, "predicted gain vector CSV (single column)")
        ->required();
    frontier->add_option("--excess-grid", fr_grid, "excess-return grid start:stop:step")
        ->required();
    frontier->add_option("-o,--output", fr_output, "output CSV (excess, risk)")->required();

    // --- validate ---
    auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
    int v_criterion = 0;
    validate->add_option("--criterion", v_criterion, "run a single criterion 1..14 (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 64;
    }

    try {
        if (sample->parsed()) {
            rmt::EnsembleSpec spec;
            spec.kind = parse_ensemble(s_ensemble);
            spec.n = s_n;
            spec.p = s_p;
            spec.sigma2 = s_sigma2;
            spec.seed = s_seed;
            spec.additive_spike_lambda = s_spike_lambda;
            spec.additive_spike_rank = s_spike_rank;
            if (!s_spikes.empty()) {
                std::istringstream is(s_spikes);
                std::string tok;
                while (std::getline(is, tok, ',')) spec.spikes.push_back(std::stod(tok));
            }
            spec.validate();
            if (s_count < 1) throw rmt::InputError("--count must be >= 1");
            rmt::SampleBatch batch = rmt::sample_batch(spec, s_count);
            std::ofstream out(s_output);
            if (!out) throw rmt::InputError("cannot write " + s_output);
            int rows = batch.spectra.front().n();
            for (int i = 0; i < rows; ++i) {
                for (int s = 0; s < s_count; ++s)
                    out << (s ? "," : "") << rmt::format_double(batch.spectra[s].values[i]);
                out << "\n";
            }
        } else if (law->parsed()) {
            rmt::LawDescriptor desc;
            if (l_law == "semicircle")
                desc = rmt::SemicircleLaw{l_sigma2};
            else if (l_law == "mp")
                desc = rmt::MarchenkoPasturLaw{l_sigma2, l_gamma};
            else
                throw rmt::InputError("unknown law '" + l_law + "'");
            std::ofstream out(l_output);
            if (!out) throw rmt::InputError("cannot write " + l_output);
            for (double x : parse_grid(l_grid))
                out << rmt::format_double(x) << ","
                    << rmt::format_double(rmt::law_eval(desc, x, rmt::LawEvalMode::pdf)) << ","
                    << rmt::format_double(rmt::law_eval(desc, x, rmt::LawEvalMode::cdf)) << "\n";
        } else if (freeconv->parsed()) {
            auto grid = parse_grid(f_grid);
            rmt::GridDensityLaw d = rmt::subordination_density(f_sigma2, f_eps, f_lambda, grid,
                                                              f_eta);
            std::ofstream out(f_output);
            if (!out) throw rmt::InputError("cannot write " + f_output);
            for (std::size_t i = 0; i < grid.size(); ++i)
                out << rmt::format_double(grid[i]) << "," << rmt::format_double(d.density[i])
                    << "\n";
            nlohmann::json atoms = nlohmann::json::array();
            for (auto& [loc, mass] : d.atoms)
                atoms.push_back({{"location", loc}, {"mass", mass}});
            std::cout << rmt::report_envelope(command_echo, {{"atoms", atoms}}).dump(2) << "\n";
        } else if (kernel->parsed()) {
            rmt::KernelKind kind;
            if (k_kind == "sine")
                kind = rmt::KernelKind::sine;
            else if (k_kind == "airy")
                kind = rmt::KernelKind::airy;
            else
                throw rmt::InputError("unknown kernel '" + k_kind + "'");
            auto grid = parse_grid(k_grid);
            Eigen::MatrixXd m(grid.size(), grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = 0; j < grid.size(); ++j)
                    m(i, j) = rmt::kernel_eval(kind, grid[i], grid[j]);
            rmt::write_matrix_csv(k_output, m);
        } else if (tw->parsed()) {
            if (t_beta != 1 && t_beta != 2) throw rmt::InputError("--beta must be 1 or 2");
            rmt::TwMethod method;
            if (t_method == "fredholm")
                method = rmt::TwMethod::fredholm;
            else if (t_method == "painleve")
                method = rmt::TwMethod::painleve;
            else
                throw rmt::InputError("unknown method '" + t_method + "'");
            rmt::Tw1Variant variant;
            if (t_variant == "sqrt-tw2")
                variant = rmt::Tw1Variant::sqrt_tw2;
            else if (t_variant == "plain")
                variant = rmt::Tw1Variant::plain;
            else
                throw rmt::InputError("unknown variant '" + t_variant + "'");
            auto grid = parse_grid(t_grid);
            std::ofstream out(t_output);
            if (!out) throw rmt::InputError("cannot write " + t_output);
            for (double s : grid)
                out << rmt::format_double(s) << ","
                    << rmt::format_double(rmt::tw_cdf(t_beta, s, method, variant)) << "\n";
            nlohmann::json header = {{"beta", t_beta},
                                     {"method", t_method},
                                     {"variant", t_variant},
                                     {"grid", t_grid},
                                     {"schema_version", 1}};
            rmt::write_json(t_output + ".json", header);
        } else if (gap->parsed()) {
            double value;
            std::string route;
            if (g_edge) {
                value = rmt::tw_cdf(2, g_a, rmt::TwMethod::fredholm);
                route = "airy-limit";
            } else {
                if (g_n < 1) throw rmt::InputError("finite-n gap needs -n >= 1");
                rmt::CDContext ctx = rmt::CDContext::gue(g_n);
                value = rmt::fredholm_det(
                    [&](double x, double y) { return rmt::cd_kernel(ctx, x, y); }, g_a,
                    std::numeric_limits<double>::infinity(), rmt::FredholmConfig{});
                route = "finite-n";
            }
            rmt::write_json(g_output,
                            rmt::report_envelope(command_echo, {{"gap_probability", value},
                                                                {"a", g_a},
                                                                {"route", route}}));
        } else if (pca->parsed()) {
            Eigen::MatrixXd raw = rmt::read_data_csv(p_data);
            rmt::DataMatrix data = rmt::center_columns(raw);
            Eigen::MatrixXd cov = rmt::covariance(data, rmt::CovarianceSide::variables);
            rmt::Spectrum spec = rmt::eigenvalues_of(cov);
            rmt::PcaReport rep = rmt::significant_components(
                spec, static_cast<int>(raw.rows()), static_cast<int>(raw.cols()), p_alpha,
                p_beta);
            nlohmann::json comps = nlohmann::json::array();
            for (auto& c : rep.components)
                comps.push_back({{"index", c.index},
                                 {"eigenvalue", c.eigenvalue},
                                 {"statistic", c.statistic},
                                 {"p_value", c.p_value},
                                 {"significant", c.significant},
                                 {"sigma2_used", c.sigma2_used}});
            nlohmann::json payload = {{"k_significant", rep.k_significant},
                                      {"components", comps},
                                      {"spectrum", rep.spectrum.values},
                                      {"mp_fit",
                                       {{"sigma2_hat", rep.mp_fit.sigma2_hat},
                                        {"gamma", rep.mp_fit.gamma},
                                        {"ks", rep.mp_fit.ks},
                                        {"excluded_top", rep.mp_fit.excluded_top}}}};
            rmt::write_json(p_output, rmt::report_envelope(command_echo, payload));
        } else if (denoise->parsed()) {
            Eigen::MatrixXd m = rmt::read_matrix_csv(d_input);
            if (m.rows() != m.cols()) throw rmt::InputError("covariance must be square");
            rmt::Spectrum spec = rmt::eigenvalues_of(m);
            rmt::MPFit fit = rmt::fit_mp(spec, d_gamma, d_exclude);
            rmt::write_matrix_csv(d_output,
                                  rmt::clean_covariance(m, fit.noise_lo, fit.noise_hi));
        } else if (frontier->parsed()) {
            Eigen::MatrixXd m = rmt::read_matrix_csv(fr_cov);
            Eigen::MatrixXd pv = rmt::read_matrix_csv(fr_p);
            if (pv.cols() != 1) throw rmt::InputError("gain vector must be a single column");
            auto grid = parse_grid(fr_grid);
            std::ofstream out(fr_output);
            if (!out) throw rmt::InputError("cannot write " + fr_output);
            for (double r : grid) {
                double risk = r == 0.0 ? 0.0 : rmt::markowitz(m, pv.col(0), r).risk;
                out << rmt::format_double(r) << "," << rmt::format_double(risk) << "\n";
            }
        } else if (validate->parsed()) {
            bool all_pass = true;
            auto run_one = [&](int i) {
                rmt::CheckResult res = rmt::acceptance_check(i);
                std::cout << (res.passed ? "PASS" : "FAIL") << " [" << res.index << "] "
                          << res.name << ": " << res.detail << "\n"
                          << std::flush;
                all_pass = all_pass && res.passed;
            };
            if (v_criterion != 0)
                run_one(v_criterion);
            else
                for (int i = 1; i <= 14; ++i) run_one(i);
            return all_pass ? 0 : 2;
        }
    } catch (const rmt::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 64;
    } catch (const rmt::NumericalError& e) {
        nlohmann::json diag = {{"error", "numerical"},
                               {"message", e.what()},
                               {"best_estimate", e.best_estimate}};
        std::cerr << diag.dump(2) << "\n";
        return 3;
    }
    return 0;
}
