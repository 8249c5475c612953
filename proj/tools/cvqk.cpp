// cvqk: closed-form continuous-variable quantum kernels from the command line.
//
// Subcommands: kernel, gram, experiment, grid, verify. All numeric output is
// emitted in round-trip decimal form; every command is deterministic under
// --seed.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvkernel/closedforms.hpp"
#include "cvkernel/engine.hpp"
#include "cvkernel/errors.hpp"
#include "cvkernel/io.hpp"
#include "cvkernel/mlkit.hpp"
#include "cvkernel/special.hpp"
#include "cvkernel/stellar.hpp"
#include "cvkernel/verify.hpp"

namespace {

using namespace cvkernel;
using json = nlohmann::ordered_json;

struct Shared {
    std::uint64_t seed = 42;
    int threads = 0;
    long long term_budget = 50'000'000;
    std::string family = "displaced-fock";
    int n = 0;
    int d = 2;
    double bandwidth = 1.0;
    std::string parity = "even";
};

/// Loads --config defaults; flags given explicitly still win. Unknown keys
/// are rejected so typos cannot silently change a run.
Shared load_config(const std::string& path) {
    Shared s;
    if (path.empty()) return s;
    const json j = json::parse(io::read_text(path));
    for (const auto& [key, val] : j.items()) {
        if (key == "seed")
            s.seed = val.get<std::uint64_t>();
        else if (key == "threads")
            s.threads = val.get<int>();
        else if (key == "term_budget")
            s.term_budget = val.get<long long>();
        else if (key == "family")
            s.family = val.get<std::string>();
        else if (key == "n")
            s.n = val.get<int>();
        else if (key == "d")
            s.d = val.get<int>();
        else if (key == "bandwidth")
            s.bandwidth = val.get<double>();
        else if (key == "parity")
            s.parity = val.get<std::string>();
        else
            throw RangeError("config: unknown field '" + key + "'");
    }
    return s;
}

std::array<double, 2> parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("point must be 'x1,x2'");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("point must be two numbers 'x1,x2'");
    }
}

std::vector<cxd> parse_amps(const std::string& s) {
    std::vector<cxd> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string cell =
            comma == std::string::npos ? s.substr(pos) : s.substr(pos, comma - pos);
        const auto colon = cell.find(':');
        try {
            if (colon == std::string::npos)
                out.emplace_back(std::stod(cell), 0.0);
            else
                out.emplace_back(std::stod(cell.substr(0, colon)),
                                 std::stod(cell.substr(colon + 1)));
        } catch (const std::exception&) {
            throw CLI::ValidationError("amplitudes must be 're' or 're:im', comma separated");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

stellar::CatParity parity_of(const std::string& s) {
    if (s == "even") return stellar::CatParity::Even;
    if (s == "odd") return stellar::CatParity::Odd;
    throw RangeError("parity must be 'even' or 'odd'");
}

/// Displaced Fock inner product in operator form: valid for every n the
/// encoder admits, and the production path for kernel values.
cxd displaced_inner(const std::array<double, 2>& a, const std::array<double, 2>& b, int n,
                    double c) {
    const cxd alpha = c * cxd{a[0], a[1]};
    const cxd beta = c * cxd{b[0], b[1]};
    const double s2 = std::norm(beta - alpha);
    const double im = std::imag(std::conj(alpha) * beta);
    return std::exp(cxd{-0.5 * s2, im}) * special::laguerre(n, s2);
}

int cmd_kernel(const Shared& sh, const std::string& a_str, const std::string& b_str,
               const std::string& amps1_str, const std::string& amps2_str,
               const std::string& f1_path, const std::string& f2_path, bool want_inner) {
    const mlkit::Family fam = mlkit::family_from_name(sh.family);
    cxd inner;
    double k = 0.0;
    engine::Options opts;
    opts.term_budget = sh.term_budget;

    switch (fam) {
        case mlkit::Family::DisplacedFock:
        case mlkit::Family::Coherent: {
            const auto a = parse_point(a_str), b = parse_point(b_str);
            const int n = fam == mlkit::Family::Coherent ? 0 : sh.n;
            inner = displaced_inner(a, b, n, sh.bandwidth);
            k = std::norm(inner);
            break;
        }
        case mlkit::Family::Qudit: {
            const auto a1 = parse_amps(amps1_str), a2 = parse_amps(amps2_str);
            inner = engine::qudit_inner(a1, a2);
            k = std::norm(inner);
            break;
        }
        case mlkit::Family::CatTruncation: {
            const auto a = parse_point(a_str), b = parse_point(b_str);
            const auto f1 = stellar::encode_cat_truncated(sh.bandwidth * cxd{a[0], a[1]}, sh.n,
                                                          parity_of(sh.parity));
            const auto f2 = stellar::encode_cat_truncated(sh.bandwidth * cxd{b[0], b[1]}, sh.n,
                                                          parity_of(sh.parity));
            inner = engine::inner_product(f1.state, f2.state, opts);
            k = std::norm(inner);
            break;
        }
        case mlkit::Family::General: {
            if (f1_path.empty() || f2_path.empty())
                throw RangeError("general family needs --f1 and --f2 state files");
            const auto f1 = io::stellar_from_json(json::parse(io::read_text(f1_path)));
            const auto f2 = io::stellar_from_json(json::parse(io::read_text(f2_path)));
            inner = engine::inner_product(f1, f2, opts);
            k = std::norm(inner);
            break;
        }
    }
    std::cout << format_double(k) << "\n";
    if (want_inner)
        std::cout << "inner: " << format_double(inner.real()) << " "
                  << format_double(inner.imag()) << "\n";
    return 0;
}

mlkit::KernelSpec spec_of(const Shared& sh) {
    mlkit::KernelSpec ks;
    ks.family = mlkit::family_from_name(sh.family);
    ks.n = sh.n;
    ks.d = sh.d;
    ks.bandwidth = sh.bandwidth;
    ks.parity = parity_of(sh.parity);
    return ks;
}

int cmd_gram(const Shared& sh, const std::string& dataset_path, const std::string& out_path) {
    const auto ds = io::read_dataset_csv(dataset_path);
    const auto g = mlkit::gram(ds.points, spec_of(sh), sh.threads);
    io::write_gram_csv(out_path, g);
    std::cout << "n=" << g.n << " kernel_spec_hash=" << g.kernel_spec_hash
              << " dataset_hash=" << g.dataset_hash << "\n";
    return 0;
}

int cmd_experiment(const Shared& sh, int variant, const std::string& out_path,
                   std::string grid_path, std::string model_path, int resolution, bool timing) {
    const mlkit::KernelSpec ks = spec_of(sh);
    if (ks.family != mlkit::Family::DisplacedFock && ks.family != mlkit::Family::Coherent)
        throw RangeError("experiment supports displaced-fock and coherent encodings");
    if (grid_path.empty()) grid_path = out_path + ".grid.csv";
    if (model_path.empty()) model_path = out_path + ".model.json";

    const auto t0 = std::chrono::steady_clock::now();
    auto res = mlkit::run_experiment(variant, ks, sh.seed, resolution, sh.threads);
    const auto t1 = std::chrono::steady_clock::now();
    if (timing)
        res.report.wall_time_ms =
            std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
    res.report.grid_path = grid_path;

    io::write_text(out_path, io::report_to_json(res.report).dump(2) + "\n");
    mlkit::write_grid_csv(grid_path, res.grid);
    io::write_text(model_path, io::model_to_json(res.model).dump(2) + "\n");

    std::cout << "variant=" << variant << " n=" << ks.n << " c=" << format_double(ks.bandwidth)
              << " test_acc=" << format_double(res.report.test_accuracy) << "\n";
    return 0;
}

int cmd_grid(const std::string& model_path, const std::string& out_path, int resolution,
             const std::string& bounds_str) {
    const auto model = io::model_from_json(json::parse(io::read_text(model_path)));
    mlkit::GridBounds b;
    if (!bounds_str.empty()) {
        std::vector<double> vals;
        std::size_t pos = 0;
        while (pos <= bounds_str.size()) {
            const auto comma = bounds_str.find(',', pos);
            const std::string cell = comma == std::string::npos
                                         ? bounds_str.substr(pos)
                                         : bounds_str.substr(pos, comma - pos);
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw CLI::ValidationError("bounds must be four numbers 'xmin,xmax,ymin,ymax'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (vals.size() != 4)
            throw CLI::ValidationError("bounds must be 'xmin,xmax,ymin,ymax'");
        b = {vals[0], vals[1], vals[2], vals[3]};
    }
    const auto rows = mlkit::decision_grid(model, b, resolution);
    mlkit::write_grid_csv(out_path, rows);
    std::cout << rows.size() << " rows\n";
    return 0;
}

int cmd_verify(const Shared& sh, const std::string& suite, bool quick,
               const std::string& json_out) {
    std::vector<std::string> names;
    if (suite == "all")
        names = {"closed-form", "oracle", "invariants", "bounds"};
    else
        names = {suite};

    json out = json::array();
    bool ok = true;
    for (const auto& name : names) {
        const auto result = verify::run_suite(name, quick, sh.seed);
        json jsuite;
        jsuite["suite"] = result.suite;
        jsuite["pass"] = result.all_pass();
        json checks = json::array();
        for (const auto& c : result.checks) {
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                      << " observed=" << format_double(c.observed)
                      << " bound=" << format_double(c.bound);
            if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
            std::cout << "\n";
            json jc;
            jc["name"] = c.name;
            jc["pass"] = c.pass;
            jc["observed"] = c.observed;
            jc["bound"] = c.bound;
            jc["detail"] = c.detail;
            checks.push_back(jc);
            ok = ok && c.pass;
        }
        jsuite["checks"] = checks;
        out.push_back(jsuite);
    }
    if (!json_out.empty()) io::write_text(json_out, out.dump(2) + "\n");
    std::cout << (ok ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    // pre-scan for --config so its values become the defaults below
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    Shared sh;
    try {
        sh = load_config(config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"closed-form continuous-variable quantum kernels"};
    app.require_subcommand(1);
    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file with default options");

    auto add_shared = [&](CLI::App* cmd, bool with_encoding) {
        cmd->add_option("--config", config_dummy, "JSON config file with default options");
        cmd->add_option("--seed", sh.seed, "RNG seed");
        cmd->add_option("--threads", sh.threads, "worker threads (0 = all cores)");
        cmd->add_option("--term-budget", sh.term_budget, "nested-sum term budget per entry");
        if (with_encoding) {
            cmd->add_option("--family", sh.family,
                            "encoding family: displaced-fock|coherent|qudit|general|cat-truncation");
            cmd->add_option("--n", sh.n, "stellar rank / cat truncation rank");
            cmd->add_option("--d", sh.d, "qudit dimension");
            cmd->add_option("--c,--bandwidth", sh.bandwidth, "bandwidth hyperparameter");
            cmd->add_option("--parity", sh.parity, "cat parity: even|odd");
        }
    };

    // kernel
    auto* kernel_cmd = app.add_subcommand("kernel", "evaluate one kernel entry");
    std::string a_str, b_str, amps1_str, amps2_str, f1_path, f2_path;
    bool want_inner = false;
    add_shared(kernel_cmd, true);
    kernel_cmd->add_option("--a", a_str, "first point 'x1,x2'");
    kernel_cmd->add_option("--b", b_str, "second point 'x1,x2'");
    kernel_cmd->add_option("--amps1", amps1_str, "first qudit amplitudes");
    kernel_cmd->add_option("--amps2", amps2_str, "second qudit amplitudes");
    kernel_cmd->add_option("--f1", f1_path, "first stellar-function JSON");
    kernel_cmd->add_option("--f2", f2_path, "second stellar-function JSON");
    kernel_cmd->add_flag("--inner", want_inner, "also print the inner product");

    // gram
    auto* gram_cmd = app.add_subcommand("gram", "Gram matrix of a dataset");
    std::string dataset_path, gram_out;
    add_shared(gram_cmd, true);
    gram_cmd->add_option("--dataset", dataset_path, "input dataset CSV (x1,x2,label)")
        ->required();
    gram_cmd->add_option("--out", gram_out, "output CSV path")->required();

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run one learning experiment");
    int variant = 1, resolution = 64;
    std::string report_out, grid_out, model_out;
    bool timing = false;
    add_shared(exp_cmd, true);
    exp_cmd->add_option("--variant", variant, "dataset variant 1|2|3")->required();
    exp_cmd->add_option("--out", report_out, "report JSON path")->required();
    exp_cmd->add_option("--grid-out", grid_out, "decision grid CSV path");
    exp_cmd->add_option("--model-out", model_out, "model JSON path");
    exp_cmd->add_option("--res", resolution, "decision grid resolution");
    exp_cmd->add_flag("--timing", timing, "record wall time in the report");

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "decision grid of a trained model");
    std::string model_path, grid_csv_out, bounds_str;
    int grid_res = 64;
    add_shared(grid_cmd, false);
    grid_cmd->add_option("--model", model_path, "model JSON path")->required();
    grid_cmd->add_option("--out", grid_csv_out, "output CSV path")->required();
    grid_cmd->add_option("--res", grid_res, "grid resolution");
    grid_cmd->add_option("--bounds", bounds_str, "'xmin,xmax,ymin,ymax'");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all", verify_json;
    bool quick = false;
    add_shared(verify_cmd, false);
    verify_cmd->add_option("--suite", suite, "closed-form|oracle|invariants|bounds|all");
    verify_cmd->add_flag("--quick", quick, "smaller randomized sample counts");
    verify_cmd->add_option("--json", verify_json, "machine-readable report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*kernel_cmd)
            return cmd_kernel(sh, a_str, b_str, amps1_str, amps2_str, f1_path, f2_path,
                              want_inner);
        if (*gram_cmd) return cmd_gram(sh, dataset_path, gram_out);
        if (*exp_cmd)
            return cmd_experiment(sh, variant, report_out, grid_out, model_out, resolution,
                                  timing);
        if (*grid_cmd) return cmd_grid(model_path, grid_csv_out, grid_res, bounds_str);
        if (*verify_cmd) return cmd_verify(sh, suite, quick, verify_json);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
