#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchjl/cascade.hpp"
#include "sketchjl/diagnostics.hpp"
#include "sketchjl/sparse_jl.hpp"

namespace sketchjl {

using json = nlohmann::ordered_json;

std::string format_double(double v);  // shortest round-trip (to_chars)

const char* to_string(SparseProfile profile);
SparseProfile sparse_profile_from_string(const std::string& s);

// {p, r, n, m, seed}; coefficients are re-derived from the seed, never stored.
json family_record(const PolyHashFamily& family);
PolyHashFamily family_from_record(const json& record);

// {d, k, alpha, c, r_h, r_sigma, p, seed_h, seed_sigma, profile}
json transform_descriptor(const SparseJLTransform& transform);
SparseJLTransform transform_from_descriptor(const json& descriptor);
SparseJLTransform load_transform(const std::string& path);

json plan_json(const DenseJLParams& params);
json plan_json(const SparseParams& params);
json plan_json(const CascadePlan& plan);

json report_json(const ExperimentReport& report);

// Vector files: CSV rows (one vector per line), a dense column (one value per
// line, a single vector), or sparse "index value" lines (1-based, a single
// vector).  '#' lines and blank lines are skipped.
struct VectorFile {
    bool sparse = false;
    std::vector<std::vector<double>> rows;   // dense form
    std::vector<SparseEntry> entries;        // sparse form, 0-based
};

VectorFile read_vector_file(std::istream& in);
void write_rows_csv(std::ostream& out, std::span<const std::vector<double>> rows);

struct UpdateLine {
    u64 index = 0;  // 0-based after parsing the 1-based file format
    double value = 0;
};

// "j v" with 1-based j; throws ParseError carrying the line number.
UpdateLine parse_update_line(std::string_view line, std::size_t line_no);

struct ManifestEntry {
    bool is_eigenbound = false;
    TailParams tail;
    EigenboundParams eigenbound;
    u64 trials = 0;
    u64 rng_seed = 0;
};

std::vector<ManifestEntry> parse_manifest(const json& manifest);
ExperimentReport run_manifest_entry(const ManifestEntry& entry, unsigned threads = 0);

}  // namespace sketchjl
