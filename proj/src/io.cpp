#include "sketchjl/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sketchjl {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* to_string(SparseProfile profile) {
    switch (profile) {
        case SparseProfile::main_theorem: return "main";
        case SparseProfile::variant: return "variant";
        case SparseProfile::custom: return "custom";
    }
    return "?";
}

SparseProfile sparse_profile_from_string(const std::string& s) {
    if (s == "main") return SparseProfile::main_theorem;
    if (s == "variant") return SparseProfile::variant;
    if (s == "custom") return SparseProfile::custom;
    throw ParseError("unknown sparse profile: " + s);
}

json family_record(const PolyHashFamily& family) {
    return json{{"p", family.field().modulus()},
                {"r", family.order()},
                {"n", family.domain_size()},
                {"m", family.range_size()},
                {"seed", to_hex(family.seed())}};
}

PolyHashFamily family_from_record(const json& record) {
    const Bytes seed = from_hex(record.at("seed").get<std::string>());
    return PolyHashFamily::sample(record.at("r").get<std::size_t>(),
                                  record.at("n").get<u64>(), record.at("m").get<u64>(),
                                  seed, FieldPrime(record.at("p").get<u64>()));
}

json transform_descriptor(const SparseJLTransform& transform) {
    const SparseParams& p = transform.params();
    return json{{"d", p.d},
                {"k", p.k},
                {"alpha", p.alpha},
                {"c", p.c},
                {"r_h", p.r_h},
                {"r_sigma", p.r_sigma},
                {"p", p.field_prime},
                {"seed_h", to_hex(transform.row_hash().seed())},
                {"seed_sigma", to_hex(transform.sign_hash().seed())},
                {"profile", to_string(p.profile)}};
}

SparseJLTransform transform_from_descriptor(const json& descriptor) {
    SparseParams p;
    try {
        p.d = descriptor.at("d").get<std::size_t>();
        p.k = descriptor.at("k").get<std::size_t>();
        p.alpha = descriptor.at("alpha").get<u64>();
        p.r_h = descriptor.at("r_h").get<std::size_t>();
        p.r_sigma = descriptor.at("r_sigma").get<std::size_t>();
        p.field_prime = descriptor.at("p").get<u64>();
        p.profile = sparse_profile_from_string(descriptor.at("profile").get<std::string>());
        p.epsilon = descriptor.value("epsilon", 0.25);
        p.delta = descriptor.value("delta", 0.05);
        if (p.alpha == 0 || !std::has_single_bit(p.alpha))
            throw ParseError("descriptor alpha must be a power of two");
        p.c = 1.0 / std::sqrt(static_cast<double>(p.alpha));
        p.c_squared = 1.0 / static_cast<double>(p.alpha);
        const double file_c = descriptor.at("c").get<double>();
        if (std::abs(file_c - p.c) > 1e-12 * p.c)
            throw ParseError("descriptor c does not equal 1/sqrt(alpha)");
        const FieldPrime field(p.field_prime);
        if (p.d == 0 || static_cast<u64>(p.d) > field.modulus() / p.alpha)
            throw ParseError("descriptor spread dimension exceeds the hash field");
        const Bytes seed_h = from_hex(descriptor.at("seed_h").get<std::string>());
        const Bytes seed_s = from_hex(descriptor.at("seed_sigma").get<std::string>());
        return SparseJLTransform(p, seed_h, seed_s);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad transform descriptor: ") + e.what());
    }
}

SparseJLTransform load_transform(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open transform file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("transform file is not valid JSON: ") + e.what());
    }
    return transform_from_descriptor(j);
}

json plan_json(const DenseJLParams& params) {
    return json{{"family", "dense"},
                {"epsilon", params.epsilon},
                {"delta", params.delta},
                {"k", params.k},
                {"r", params.r},
                {"profile", params.profile == DenseProfile::paper ? "paper" : "practical"},
                {"seed_bits", static_cast<u64>(params.r) * FieldPrime{}.bits()}};
}

json plan_json(const SparseParams& params) {
    json out{{"family", "sparse"},
             {"epsilon", params.epsilon},
             {"delta", params.delta},
             {"d", params.d},
             {"k", params.k},
             {"alpha", params.alpha},
             {"c", params.c},
             {"r_h", params.r_h},
             {"r_sigma", params.r_sigma},
             {"p", params.field_prime},
             {"profile", to_string(params.profile)},
             {"spread_dim", params.spread_dim()},
             {"seed_bits", sparse_seed_bits(params.r_h, params.r_sigma,
                                            FieldPrime(params.field_prime))}};
    if (!params.note.empty()) out["note"] = params.note;
    return out;
}

json plan_json(const CascadePlan& plan) {
    json stages = json::array();
    for (const auto& s : plan.stages)
        stages.push_back(json{{"k", s.output_dim}, {"r", s.r}, {"field", s.field_prime}});
    return json{{"family", "cascade"},
                {"eps", plan.epsilon},
                {"delta", plan.delta},
                {"eps_prime", plan.eps_prime},
                {"delta_prime", plan.delta_prime},
                {"d", plan.d},
                {"j_star", plan.j_star},
                {"start_level", plan.start_level},
                {"identity", plan.identity()},
                {"t_trace", plan.t_trace},
                {"stages", stages},
                {"final_k", plan.final_k},
                {"total_seed_bits", plan.total_seed_bits}};
}

json report_json(const ExperimentReport& r) {
    json out{{"experiment", r.name},
             {"trials", r.trials},
             {"failures", r.failures},
             {"empirical_rate", r.empirical_rate},
             {"binomial_95_upper", r.binomial_95_upper},
             {"threshold", r.threshold},
             {"pass_bound", r.pass_bound},
             {"p99", r.p99},
             {"rng_seed", r.rng_seed},
             {"pass", r.pass}};
    if (r.degenerate) out["degenerate"] = true;
    if (r.practical_threshold) {
        out["practical_threshold"] = *r.practical_threshold;
        out["practical_failures"] = *r.practical_failures;
    }
    return out;
}

namespace {

double parse_full_double(std::string_view tok, std::size_t line_no) {
    double v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError("malformed number '" + std::string(tok) + "'", line_no);
    return v;
}

u64 parse_full_u64(std::string_view tok, std::size_t line_no) {
    u64 v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError("malformed index '" + std::string(tok) + "'", line_no);
    return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

}  // namespace

VectorFile read_vector_file(std::istream& in) {
    VectorFile out;
    std::string raw;
    std::size_t line_no = 0;
    int mode = 0;  // 0 undecided, 1 csv, 2 sparse, 3 dense column
    std::vector<double> column;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip(raw);
        if (line.empty() || line.front() == '#') continue;
        if (mode == 0) mode = line.find(',') != std::string_view::npos ? 1 : 0;
        if (mode == 1) {
            std::vector<double> row;
            std::size_t start = 0;
            while (start <= line.size()) {
                std::size_t comma = line.find(',', start);
                if (comma == std::string_view::npos) comma = line.size();
                row.push_back(parse_full_double(strip(line.substr(start, comma - start)), line_no));
                start = comma + 1;
            }
            out.rows.push_back(std::move(row));
            continue;
        }
        const auto toks = split_ws(line);
        if (mode == 0) mode = toks.size() == 2 ? 2 : 3;
        if (mode == 2) {
            if (toks.size() != 2)
                throw ParseError("expected 'index value'", line_no);
            const u64 idx = parse_full_u64(toks[0], line_no);
            if (idx == 0) throw ParseError("sparse indices are 1-based", line_no);
            out.entries.push_back({idx - 1, parse_full_double(toks[1], line_no)});
        } else {
            if (toks.size() != 1)
                throw ParseError("expected one value per line", line_no);
            column.push_back(parse_full_double(toks[0], line_no));
        }
    }
    if (mode == 2) {
        out.sparse = true;
    } else if (mode == 3) {
        out.rows.push_back(std::move(column));
    }
    return out;
}

void write_rows_csv(std::ostream& out, std::span<const std::vector<double>> rows) {
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
}

UpdateLine parse_update_line(std::string_view line, std::size_t line_no) {
    const auto toks = split_ws(strip(line));
    if (toks.size() != 2)
        throw ParseError("expected 'j v'", line_no);
    const u64 j = parse_full_u64(toks[0], line_no);
    if (j == 0) throw ParseError("update indices are 1-based", line_no);
    return {j - 1, parse_full_double(toks[1], line_no)};
}

std::vector<ManifestEntry> parse_manifest(const json& manifest) {
    if (!manifest.is_array())
        throw ParseError("manifest must be a JSON array");
    std::vector<ManifestEntry> out;
    for (const auto& item : manifest) {
        try {
            ManifestEntry e;
            e.trials = item.at("trials").get<u64>();
            e.rng_seed = item.at("rng_seed").get<u64>();
            const std::string kind = item.at("kind").get<std::string>();
            if (kind == "eigenbound") {
                e.is_eigenbound = true;
                e.eigenbound.dim = item.at("dim").get<u64>();
                e.eigenbound.k = item.at("k").get<std::size_t>();
                e.eigenbound.c = item.at("c").get<double>();
                e.eigenbound.r = item.value("r", std::size_t{8});
            } else {
                if (kind == "frobenius")
                    e.tail.kind = TailKind::frobenius;
                else if (kind == "operator")
                    e.tail.kind = TailKind::operator_norm;
                else if (kind == "distortion")
                    e.tail.kind = TailKind::distortion;
                else
                    throw ParseError("unknown experiment kind: " + kind);
                const std::string profile = item.value("profile", std::string("practical"));
                SparseConstants constants;
                SparseProfile sp = SparseProfile::main_theorem;
                if (profile == "paper")
                    constants.paper_k = true;
                else if (profile == "variant")
                    sp = SparseProfile::variant;
                else if (profile != "practical")
                    throw ParseError("unknown profile: " + profile);
                e.tail.sparse = plan_sparse(item.at("epsilon").get<double>(),
                                            item.at("delta").get<double>(),
                                            item.at("d").get<std::size_t>(), sp, constants);
                const std::string vec = item.value("vector", std::string("ones"));
                if (vec == "e1")
                    e.tail.vector = TestVectorKind::e1;
                else if (vec == "ones")
                    e.tail.vector = TestVectorKind::ones;
                else if (vec == "geometric")
                    e.tail.vector = TestVectorKind::geometric;
                else
                    throw ParseError("unknown test vector: " + vec);
            }
            out.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw ParseError(std::string("bad manifest entry: ") + ex.what());
        }
    }
    return out;
}

ExperimentReport run_manifest_entry(const ManifestEntry& entry, unsigned threads) {
    if (entry.is_eigenbound)
        return eigenbound_experiment(entry.eigenbound, entry.trials, entry.rng_seed, threads);
    return tail_experiment(entry.tail, entry.trials, entry.rng_seed, threads);
}

}  // namespace sketchjl
