#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "padicdyn/report.hpp"
#include "padicdyn/testkit.hpp"

namespace {

using namespace padicdyn;

int outcome_code(criterion_verdict::outcome_t o) {
    switch (o) {
        case criterion_verdict::outcome_t::potentially_good: return 0;
        case criterion_verdict::outcome_t::not_potentially_good: return 1;
        default: return 2;
    }
}

int run_check(const report_input& in, bool as_json, bool do_verify) {
    rational_map phi = rebuild_input_map(in, in.precision);
    if (phi.d < 2) {
        std::cerr << "padicdyn: the map must have degree at least 2\n";
        return 64;
    }
    criterion_bounds bounds;
    bounds.max_unramified = in.max_unramified;
    bounds.max_ramified = in.max_ramified;
    criterion_verdict v = check_potential_good_reduction(phi, bounds);
    if (do_verify && v.outcome != criterion_verdict::outcome_t::undetermined &&
        !verify_certificate(phi, v)) {
        std::cerr << "padicdyn: the produced certificate failed re-verification\n";
        return 70;
    }
    if (as_json)
        std::cout << make_report(in, v).dump(2) << "\n";
    else
        print_report(std::cout, in, v);
    return outcome_code(v.outcome);
}

int run_verify(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream f(path);
        if (!f) {
            std::cerr << "padicdyn: cannot read " << path << "\n";
            return 64;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    parsed_report pr = parse_report(ordered_json::parse(text));
    if (pr.verdict.outcome == criterion_verdict::outcome_t::undetermined) {
        std::cerr << "padicdyn: an undetermined report carries no certificate\n";
        return 1;
    }
    rational_map phi = rebuild_input_map(pr.input, pr.input.precision);
    if (verify_certificate(phi, pr.verdict)) {
        std::cout << "certificate verified\n";
        return 0;
    }
    std::cout << "certificate REJECTED\n";
    return 1;
}

int run_trials(const generator_config& cfg, long trials, long max_u, long max_e) {
    criterion_bounds bounds;
    bounds.max_unramified = max_u;
    bounds.max_ramified = max_e;
    std::vector<harness_cell> cells = run_harness(cfg, trials, bounds);
    std::cout << std::setw(6) << "prime" << std::setw(8) << "degree" << std::setw(8) << "trials"
              << std::setw(8) << "good" << std::setw(9) << "blocked" << std::setw(8) << "failed"
              << "\n";
    harness_cell total;
    for (const auto& c : cells) {
        std::cout << std::setw(6) << c.prime << std::setw(8) << c.degree << std::setw(8)
                  << c.trials << std::setw(8) << c.good << std::setw(9) << c.blocked
                  << std::setw(8) << c.failed << "\n";
        total.trials += c.trials;
        total.good += c.good;
        total.blocked += c.blocked;
        total.failed += c.failed;
    }
    std::cout << std::setw(6) << "all" << std::setw(8) << "" << std::setw(8) << total.trials
              << std::setw(8) << total.good << std::setw(9) << total.blocked << std::setw(8)
              << total.failed << "\n";
    if (total.failed != 0) {
        std::cerr << "padicdyn: " << total.failed
                  << " round trip(s) failed to recover potential good reduction\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"potential good reduction of rational maps over p-adic fields"};
    app.require_subcommand(1);

    report_input in;
    std::string prime_str;
    bool as_json = false, do_verify = false;
    CLI::App* check = app.add_subcommand("check", "decide potential good reduction of one map");
    check->add_option("--prime", prime_str, "residue characteristic p")->required();
    check->add_option("--map", in.map_src, "rational function in z, e.g. \"(z^2 - z)/3\"")
        ->required();
    check->add_option("--precision", in.precision, "working precision in p-adic digits")
        ->capture_default_str();
    check->add_option("--max-unramified", in.max_unramified, "largest unramified degree to search")
        ->capture_default_str();
    check->add_option("--max-ramified", in.max_ramified, "largest ramification index to search")
        ->capture_default_str();
    check
        ->add_option("--ext-unramified", in.ext_u,
                     "declared unramified degree for zeta in the expression")
        ->capture_default_str();
    check
        ->add_option("--ext-ramified", in.ext_e,
                     "declared ramification index for pi_u in the expression")
        ->capture_default_str();
    check->add_flag("--json", as_json, "emit the machine-readable report");
    check->add_flag("--verify", do_verify, "re-verify the certificate before printing");

    std::string report_path = "-";
    CLI::App* verify = app.add_subcommand("verify", "re-check a JSON report against its input");
    verify->add_option("report", report_path, "report file, or - for standard input");

    generator_config cfg;
    long trials = 25;
    std::vector<long> degree_range{2, 4};
    long hmax_u = 6, hmax_e = 6;
    CLI::App* harness =
        app.add_subcommand("harness", "round-trip the decision over generated maps");
    harness->add_option("--trials", trials, "trials per (prime, degree) cell")
        ->capture_default_str();
    harness->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    harness->add_option("--degrees", degree_range, "degree range: two values LO HI")
        ->expected(2);
    harness->add_option("--primes", cfg.primes, "primes to sample")->expected(-1);
    harness->add_option("--precision", cfg.precision, "starting precision in digits")
        ->capture_default_str();
    harness->add_option("--max-unramified", hmax_u, "largest unramified degree to search")
        ->capture_default_str();
    harness->add_option("--max-ramified", hmax_e, "largest ramification index to search")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (*check) {
            in.prime = mpz_class(prime_str);
            return run_check(in, as_json, do_verify);
        }
        if (*verify) return run_verify(report_path);
        if (degree_range[0] < 2 || degree_range[1] < degree_range[0]) {
            std::cerr << "padicdyn: --degrees wants 2 <= LO <= HI\n";
            return 64;
        }
        cfg.degree_min = degree_range[0];
        cfg.degree_max = degree_range[1];
        return run_trials(cfg, trials, hmax_u, hmax_e);
    } catch (const parse_error& e) {
        std::cerr << "padicdyn: " << e.what() << "\n";
        return 64;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "padicdyn: malformed report: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "padicdyn: " << e.what() << "\n";
        return 64;
    }
}
