// sketchjl command-line front end: planning, seeding, embedding, stream
// sketching, and verification experiments.  All machine-readable output is
// JSON; pass --format text for human-readable columns.  Every run is a pure
// function of its flags and input bytes (seeds are always explicit).
//
// Exit codes: 0 ok, 2 invalid parameters, 3 shape mismatch, 4 parse failure,
// 5 failed verification experiments.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sketchjl/io.hpp"

namespace {

using namespace sketchjl;

constexpr int kExitInvalidParams = 2;
constexpr int kExitShape = 3;
constexpr int kExitParse = 4;
constexpr int kExitFailedExperiments = 5;

struct Options {
    std::string format = "json";
    std::string family;
    std::string profile = "practical";
    double epsilon = 0;
    double delta = 0;
    std::size_t d = 0;
    std::string seed_h, seed_sigma;
    std::string transform_path, input_path, output_path, manifest_path;
    u64 trials = 0;
    u64 rng_seed = 0;
};

void emit_plan_text(std::ostream& out, const json& plan) {
    for (const auto& [key, value] : plan.items())
        out << key << "\t" << (value.is_string() ? value.get<std::string>() : value.dump())
            << "\n";
}

int cmd_plan(const Options& opt) {
    json plan;
    if (opt.family == "dense") {
        const DenseProfile profile =
            opt.profile == "paper" ? DenseProfile::paper : DenseProfile::practical;
        plan = plan_json(plan_dense(opt.epsilon, opt.delta, profile));
    } else if (opt.family == "sparse") {
        if (opt.d == 0) throw InvalidParameterError("--d is required for the sparse family");
        SparseConstants constants;
        SparseProfile profile = SparseProfile::main_theorem;
        if (opt.profile == "paper")
            constants.paper_k = true;
        else if (opt.profile == "variant")
            profile = SparseProfile::variant;
        else if (opt.profile != "practical")
            throw InvalidParameterError("unknown profile: " + opt.profile);
        const SparseParams params = plan_sparse(opt.epsilon, opt.delta, opt.d, profile, constants);
        plan = plan_json(params);
        if (!opt.seed_h.empty() || !opt.seed_sigma.empty()) {
            if (opt.seed_h.empty() || opt.seed_sigma.empty())
                throw InvalidParameterError("provide both --seed-h and --seed-sigma");
            const SparseJLTransform t(params, from_hex(opt.seed_h), from_hex(opt.seed_sigma));
            const json descriptor = transform_descriptor(t);
            if (!opt.output_path.empty()) {
                std::ofstream out(opt.output_path);
                if (!out) throw ParseError("cannot open output file: " + opt.output_path);
                out << descriptor.dump(2) << "\n";
            }
            plan["descriptor"] = descriptor;
        }
    } else if (opt.family == "cascade") {
        if (opt.d == 0) throw InvalidParameterError("--d is required for the cascade family");
        plan = plan_json(plan_cascade(opt.epsilon, opt.delta, opt.d));
    } else {
        throw InvalidParameterError("unknown family: " + opt.family);
    }
    if (opt.format == "text")
        emit_plan_text(std::cout, plan);
    else
        std::cout << plan.dump(2) << "\n";
    return 0;
}

int cmd_embed(const Options& opt) {
    const SparseJLTransform transform = load_transform(opt.transform_path);
    std::ifstream in(opt.input_path);
    if (!in) throw ParseError("cannot open input file: " + opt.input_path);
    const VectorFile data = read_vector_file(in);

    std::vector<std::vector<double>> out_rows;
    if (data.sparse) {
        out_rows.push_back(transform.apply(std::span<const SparseEntry>(data.entries)));
    } else {
        for (const auto& row : data.rows) out_rows.push_back(transform.apply(row));
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opt.output_path.empty()) {
        file.open(opt.output_path);
        if (!file) throw ParseError("cannot open output file: " + opt.output_path);
        out = &file;
    }
    write_rows_csv(*out, out_rows);
    return 0;
}

int cmd_sketch(const Options& opt) {
    const auto transform =
        std::make_shared<const SparseJLTransform>(load_transform(opt.transform_path));
    TurnstileSketch sketch(transform);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        std::string_view view = line;
        while (!view.empty() && (view.back() == '\r')) view.remove_suffix(1);
        if (view.empty()) continue;
        const UpdateLine u = parse_update_line(view, line_no);
        sketch.update(u.index, u.value);
    }
    const std::vector<double> y = sketch.values();
    if (opt.format == "text") {
        std::cout << "updates_applied\t" << sketch.updates_applied() << "\n";
        for (double v : y) std::cout << format_double(v) << "\n";
    } else {
        json out{{"updates_applied", sketch.updates_applied()}, {"y", y}};
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

int cmd_verify(const Options& opt) {
    std::ifstream in(opt.manifest_path);
    if (!in) throw ParseError("cannot open manifest: " + opt.manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    auto entries = parse_manifest(manifest);
    for (auto& entry : entries) {
        if (opt.trials != 0) entry.trials = opt.trials;
        if (opt.rng_seed != 0) entry.rng_seed = opt.rng_seed;
    }
    json reports = json::array();
    std::vector<std::string> failed;
    for (const auto& entry : entries) {
        const ExperimentReport report = run_manifest_entry(entry);
        if (!report.pass) failed.push_back(report.name);
        reports.push_back(report_json(report));
    }
    if (opt.format == "text") {
        for (const auto& r : reports)
            std::cout << (r["pass"].get<bool>() ? "PASS" : "FAIL") << "\t"
                      << r["experiment"].get<std::string>() << "\trate="
                      << format_double(r["empirical_rate"].get<double>()) << "\tupper="
                      << format_double(r["binomial_95_upper"].get<double>()) << "\n";
    } else {
        std::cout << reports.dump(2) << "\n";
    }
    if (!failed.empty()) {
        std::cerr << "failed experiments:";
        for (const auto& name : failed) std::cerr << " " << name;
        std::cerr << "\n";
        return kExitFailedExperiments;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seeded sparse Johnson-Lindenstrauss embeddings and sketches"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("SKETCHJL_PROFILE")) opt.profile = env;

    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    auto* plan = app.add_subcommand("plan", "compute embedding parameters");
    plan->add_option("--family", opt.family, "dense | sparse | cascade")->required();
    plan->add_option("--epsilon", opt.epsilon,
                     "distortion in (0, 1/2); the cascade accepts up to 1")
        ->required();
    plan->add_option("--delta", opt.delta, "failure probability in (0, 1/2)")->required();
    plan->add_option("--d", opt.d, "input dimension (sparse and cascade)");
    plan->add_option("--profile", opt.profile, "practical | paper | variant")
        ->capture_default_str();
    plan->add_option("--seed-h", opt.seed_h, "row hash seed (lowercase hex)");
    plan->add_option("--seed-sigma", opt.seed_sigma, "sign hash seed (lowercase hex)");
    plan->add_option("--output", opt.output_path,
                     "write a transform descriptor here (sparse, with seeds)");

    auto* embed = app.add_subcommand("embed", "embed vectors with a seeded transform");
    embed->add_option("--transform", opt.transform_path, "transform descriptor JSON")
        ->required();
    embed->add_option("--input", opt.input_path, "input vector file")->required();
    embed->add_option("--output", opt.output_path, "output CSV (default stdout)");

    auto* sketch = app.add_subcommand("sketch", "fold an update stream from stdin");
    sketch->add_option("--transform", opt.transform_path, "transform descriptor JSON")
        ->required();

    auto* verify = app.add_subcommand("verify", "run a manifest of experiments");
    verify->add_option("--manifest", opt.manifest_path, "experiment manifest JSON")
        ->required();
    verify->add_option("--trials", opt.trials, "override the trial count of every entry");
    verify->add_option("--rng-seed", opt.rng_seed, "override the rng seed of every entry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidParams;
    }

    try {
        if (plan->parsed()) return cmd_plan(opt);
        if (embed->parsed()) return cmd_embed(opt);
        if (sketch->parsed()) return cmd_sketch(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what();
        if (e.line) std::cerr << " (line " << e.line << ")";
        std::cerr << "\n";
        return kExitParse;
    } catch (const OutOfDomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidParams;
    }
    return 0;
}
