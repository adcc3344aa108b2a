#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpbs/bench.hpp"
#include "fpbs/driver.hpp"
#include "fpbs/qaplib_io.hpp"

namespace fpbs::cli {

// "120s", "30m", "0.5h"; a bare number means seconds.
inline double parse_duration_seconds(const std::string& text) {
    if (text.empty()) throw CLI::ValidationError("time limit", "empty duration");
    double factor = 1.0;
    std::string number = text;
    switch (text.back()) {
        case 's': factor = 1.0; number.pop_back(); break;
        case 'm': factor = 60.0; number.pop_back(); break;
        case 'h': factor = 3600.0; number.pop_back(); break;
        default: break;
    }
    try {
        std::size_t used = 0;
        const double value = std::stod(number, &used);
        if (used != number.size() || value < 0.0) throw std::invalid_argument("bad");
        return value * factor;
    } catch (const std::exception&) {
        throw CLI::ValidationError("time limit",
                                   "expected <number>[s|m|h], got '" + text + "'");
    }
}

namespace detail {

struct CommonOptions {
    std::string config_file;
    std::string time_limit;
    long long iters = -1;
    std::string bkv_file;
    std::string out_dir = ".";
    FpbsParams params;
};

inline void add_param_flags(CLI::App& cmd, CommonOptions& opt) {
    cmd.add_option("--config", opt.config_file,
                   "Config file (key = value lines), overridden by flags");
    cmd.add_option("--time-limit", opt.time_limit,
                   "Wall-clock budget with s/m/h suffix (e.g. 30m)");
    cmd.add_option("--iters", opt.iters,
                   "Deterministic iteration budget (overrides --time-limit)");
    cmd.add_option("--seed", opt.params.seed, "Master random seed");
    cmd.add_option("--k", opt.params.k, "Elite set size");
    cmd.add_option("--m", opt.params.m, "Mined pattern set size");
    cmd.add_option("--theta", opt.params.theta, "Minimum support");
    cmd.add_option("--lambda", opt.params.lambda, "Tournament pool size");
    cmd.add_option("--beta", opt.params.beta, "Guided-completion length threshold");
    cmd.add_option("--max-no-update", opt.params.max_no_update,
                   "Failed insertions before re-mining");
    cmd.add_option("--bls-max-iter", opt.params.bls.max_iter, "BLS episodes per call");
    cmd.add_option("--bkv-file", opt.bkv_file,
                   "CSV of best-known values (name,bkv) extending the builtin table");
    cmd.add_option("--out-dir", opt.out_dir, "Output directory")
        ->envname("FPBS_OUT_DIR");
    cmd.add_flag("--multistart", opt.params.multistart,
                 "Diagnostic mode: random restarts, no mining");
    cmd.add_flag("!--no-mining-array", opt.params.mining_array,
                 "Disable the FPmax* array technique");
}

// key = value lines mirroring the long flags; blank lines and # comments
// allowed. Values given on the command line win over the file.
inline void apply_config_file(const CLI::App& cmd, CommonOptions& opt) {
    if (opt.config_file.empty()) return;
    const std::string text = read_text_file(opt.config_file);
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    const auto fail = [&](const std::string& why) {
        throw std::runtime_error("config " + opt.config_file + " line " +
                                 std::to_string(line_no) + ": " + why);
    };
    while (std::getline(lines, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.pop_back();
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (cmd.get_option_no_throw("--" + key) == nullptr)
            fail("unknown key '" + key + "'");
        if (cmd.count("--" + key) > 0) continue;  // flag wins
        try {
            if (key == "time-limit") opt.time_limit = value;
            else if (key == "iters") opt.iters = std::stoll(value);
            else if (key == "seed") opt.params.seed = std::stoull(value);
            else if (key == "k") opt.params.k = std::stoi(value);
            else if (key == "m") opt.params.m = std::stoi(value);
            else if (key == "theta") opt.params.theta = std::stoll(value);
            else if (key == "lambda") opt.params.lambda = std::stoi(value);
            else if (key == "beta") opt.params.beta = std::stod(value);
            else if (key == "max-no-update") opt.params.max_no_update = std::stoll(value);
            else if (key == "bls-max-iter") opt.params.bls.max_iter = std::stoi(value);
            else if (key == "bkv-file") opt.bkv_file = value;
            else if (key == "out-dir") opt.out_dir = value;
            else fail("key '" + key + "' cannot be set from a config file");
        } catch (const std::invalid_argument&) {
            fail("bad value '" + value + "' for key '" + key + "'");
        } catch (const std::out_of_range&) {
            fail("bad value '" + value + "' for key '" + key + "'");
        }
    }
}

inline void apply_budget(CommonOptions& opt) {
    if (opt.iters >= 0)
        opt.params.budget = Budget::iters(opt.iters);
    else if (!opt.time_limit.empty())
        opt.params.budget = Budget::wall(parse_duration_seconds(opt.time_limit));
}

inline BkvRegistry load_registry(const CommonOptions& opt) {
    BkvRegistry registry = BkvRegistry::builtin();
    if (!opt.bkv_file.empty())
        registry.merge(BkvRegistry::from_csv(read_text_file(opt.bkv_file)));
    return registry;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

inline void append_run_csv(const std::filesystem::path& path, const RunRecord& record,
                           std::optional<long long> bkv) {
    const bool fresh = !std::filesystem::exists(path);
    if (!path.parent_path().empty())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    if (fresh) out << run_record_csv_header();
    out << run_record_csv_row(record, bkv);
}

inline void dump_pool(const RunRecord& record, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < record.final_pool.size(); ++i) {
        const auto& member = record.final_pool[i];
        SolutionFile sol{record.instance, record.n, member.value, member.pi};
        std::ostringstream name;
        name << record.instance << "_pool" << std::setw(2) << std::setfill('0') << i
             << ".sol";
        write_file(dir / name.str(), write_solution(sol));
    }
    std::vector<Transaction> db;
    const ItemEncoding enc{record.n};
    for (const auto& member : record.final_pool)
        db.push_back(permutation_to_transaction(member.pi, enc));
    write_file(dir / "transactions.txt", dump_transactions(db));
}

inline int solve_command(const CommonOptions& opt_in, const std::string& instance_path,
                         std::optional<long long> target, bool stop_at_bkv,
                         const std::string& pool_dump_dir) {
    CommonOptions opt = opt_in;
    apply_budget(opt);
    const QapInstance inst = load_instance(instance_path);
    const BkvRegistry registry = load_registry(opt);
    const auto bkv = registry.lookup(inst.name);
    opt.params.target = target;
    if (stop_at_bkv && !opt.params.target && bkv) opt.params.target = *bkv;

    const RunRecord record = run(inst, opt.params);

    const std::filesystem::path out_dir(opt.out_dir);
    SolutionFile sol{record.instance, record.n, record.best_value, record.best_solution};
    write_file(out_dir / (inst.name + ".sol"), write_solution(sol));
    write_file(out_dir / (inst.name + ".run.json"), record.to_json().dump(2) + "\n");
    append_run_csv(out_dir / "runs.csv", record, bkv);
    if (!pool_dump_dir.empty()) dump_pool(record, pool_dump_dir);

    std::cout << inst.name << " best " << record.best_value;
    if (bkv) {
        std::cout << " xpd " << std::fixed << std::setprecision(3)
                  << xpd(record.best_value, *bkv);
        std::cout.unsetf(std::ios::fixed);
    }
    std::cout << " iterations " << record.iterations << " minings "
              << record.mining_invocations << "\n";
    return 0;
}

inline int bench_command(const CommonOptions& opt_in,
                         const std::vector<std::string>& instance_paths, int runs,
                         int workers, bool stop_at_bkv, const std::string& format) {
    CommonOptions opt = opt_in;
    apply_budget(opt);
    std::vector<QapInstance> instances;
    instances.reserve(instance_paths.size());
    for (const auto& path : instance_paths) instances.push_back(load_instance(path));
    const BkvRegistry registry = load_registry(opt);

    BenchOptions bench;
    bench.runs = runs;
    bench.workers = workers;
    bench.stop_at_bkv = stop_at_bkv;
    bench.params = opt.params;

    std::vector<std::vector<RunRecord>> records;
    const BenchmarkReport report = run_benchmark(instances, registry, bench, &records);

    const std::filesystem::path out_dir(opt.out_dir);
    for (std::size_t i = 0; i < records.size(); ++i)
        for (std::size_t j = 0; j < records[i].size(); ++j) {
            std::ostringstream name;
            name << instances[i].name << ".run" << j << ".json";
            write_file(out_dir / "runs" / name.str(),
                       records[i][j].to_json().dump(2) + "\n");
            append_run_csv(out_dir / "runs.csv", records[i][j],
                           registry.lookup(instances[i].name));
        }
    write_file(out_dir / "report.csv", report.as_csv());

    if (format == "csv")
        std::cout << report.as_csv();
    else if (format == "json")
        std::cout << report.as_json().dump(2) << "\n";
    else
        std::cout << report.as_table();
    return 0;
}

inline int analyze_pool_command(const std::string& pool_dir, long long theta,
                                const std::string& out_dir) {
    std::vector<Assignment> pool;
    std::string instance_name;
    int n = 0;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(pool_dir))
        if (entry.path().extension() == ".sol") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        const SolutionFile sol = read_solution(read_text_file(path));
        if (n == 0) {
            n = sol.n;
            instance_name = sol.name;
        } else if (sol.n != n) {
            throw std::runtime_error("analyze: mixed solution sizes in " + pool_dir);
        }
        pool.push_back(Assignment{sol.pi, sol.value});
    }
    if (pool.size() < 2)
        throw std::runtime_error("analyze: need at least 2 solutions, found " +
                                 std::to_string(pool.size()));

    const SpreadStats sim = pool_similarity(pool);
    std::size_t pattern_count = 0;
    const SpreadStats len = pool_pattern_lengths(pool, theta, n, &pattern_count);

    std::ostringstream csv;
    csv << "instance,solutions,theta,patterns,sim_max,sim_avg,sim_min,len_max,len_avg,"
           "len_min\n";
    csv << std::setprecision(17) << instance_name << "," << pool.size() << "," << theta
        << "," << pattern_count << "," << sim.max << "," << sim.avg << "," << sim.min
        << "," << len.max << "," << len.avg << "," << len.min << "\n";
    if (!out_dir.empty())
        write_file(std::filesystem::path(out_dir) / "similarity.csv", csv.str());

    std::cout << "instance " << instance_name << " (" << pool.size() << " solutions, theta="
              << theta << ", " << pattern_count << " maximal patterns)\n"
              << std::fixed << std::setprecision(4)  //
              << "  similarity      max " << sim.max << "  avg " << sim.avg << "  min "
              << sim.min << "\n"
              << "  pattern length  max " << len.max << "  avg " << len.avg << "  min "
              << len.min << "\n";
    std::cout.unsetf(std::ios::fixed);
    return 0;
}

inline int analyze_runs_command(const std::string& runs_dir, const CommonOptions& opt,
                                const std::string& out_dir) {
    const BkvRegistry registry = load_registry(opt);
    std::vector<SweepSample> samples;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(runs_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        const auto j = nlohmann::json::parse(read_text_file(path));
        samples.push_back(sweep_sample_from_json(j, registry));
    }
    if (samples.empty())
        throw std::runtime_error("analyze: no run records under " + runs_dir);
    const std::string csv = sweep_csv(samples);
    if (!out_dir.empty())
        write_file(std::filesystem::path(out_dir) / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Frequent-pattern based search for the quadratic assignment problem"};
    app.require_subcommand(1);

    detail::CommonOptions solve_opt;
    std::string solve_instance;
    std::optional<long long> solve_target;
    bool solve_stop_at_bkv = false;
    std::string solve_pool_dump;
    auto* solve = app.add_subcommand("solve", "Solve one instance");
    solve->add_option("--instance", solve_instance, "QAPLIB .dat instance file")
        ->required();
    detail::add_param_flags(*solve, solve_opt);
    solve->add_option("--target", solve_target, "Stop early at this objective value");
    solve->add_flag("--stop-at-bkv", solve_stop_at_bkv,
                    "Stop early when the best-known value is reached");
    solve->add_option("--dump-pool-dir", solve_pool_dump,
                      "Write final elite pool (solution files + transactions)");

    detail::CommonOptions bench_opt;
    std::vector<std::string> bench_instances;
    int bench_runs = 10;
    int bench_workers = 1;
    bool bench_stop_at_bkv = false;
    std::string bench_format = "table";
    auto* bench = app.add_subcommand("bench", "Benchmark instances over repeated runs");
    bench->add_option("--instances", bench_instances, "Instance files")
        ->required()
        ->expected(-1);
    detail::add_param_flags(*bench, bench_opt);
    bench->add_option("--runs", bench_runs, "Runs per instance");
    bench->add_option("--workers", bench_workers, "Parallel runs");
    bench->add_flag("--stop-at-bkv", bench_stop_at_bkv,
                    "Stop runs early at the best-known value");
    bench->add_option("--format", bench_format, "Report format")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    detail::CommonOptions analyze_opt;
    std::string analyze_pool_dir;
    std::string analyze_runs_dir;
    long long analyze_theta = 2;
    auto* analyze = app.add_subcommand(
        "analyze", "Similarity/pattern statistics or m-sweep aggregation");
    analyze->add_option("--pool-dir", analyze_pool_dir,
                        "Directory of elite-pool solution files");
    analyze->add_option("--runs-dir", analyze_runs_dir,
                        "Directory of run-record JSON files");
    analyze->add_option("--theta", analyze_theta, "Minimum support for pool analysis");
    analyze->add_option("--bkv-file", analyze_opt.bkv_file, "Extra best-known values CSV");
    analyze->add_option("--out-dir", analyze_opt.out_dir, "Output directory")
        ->envname("FPBS_OUT_DIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) {
            detail::apply_config_file(*solve, solve_opt);
            return detail::solve_command(solve_opt, solve_instance, solve_target,
                                         solve_stop_at_bkv, solve_pool_dump);
        }
        if (bench->parsed()) {
            detail::apply_config_file(*bench, bench_opt);
            return detail::bench_command(bench_opt, bench_instances, bench_runs,
                                         bench_workers, bench_stop_at_bkv, bench_format);
        }
        if (analyze->parsed()) {
            if (!analyze_pool_dir.empty())
                return detail::analyze_pool_command(analyze_pool_dir, analyze_theta,
                                                    analyze_opt.out_dir);
            if (!analyze_runs_dir.empty())
                return detail::analyze_runs_command(analyze_runs_dir, analyze_opt,
                                                    analyze_opt.out_dir);
            std::cerr << "analyze: pass --pool-dir or --runs-dir\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace fpbs::cli
