#pragma once

#include "relscott/inequalities.hpp"
#include "relscott/tf.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace relscott::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double (%.17g).
std::string format_number(double v);

/// In-memory CSV table. Cells are strings so mixed columns stay exact.
class Table {
public:
    explicit Table(std::vector<std::string> columns);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    /// Throws ValidationError on a column-count mismatch.
    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

Json to_json(const ineq::InequalityReport& rep);
Json to_json(const ineq::EnsembleSummary& s);

/// Versioned record of a TF solution: slope, bracket, energy and the φ samples.
Json to_json(const tf::TfSolution& sol, double Z);

/// One compact JSON document per line.
std::string json_lines(const std::vector<Json>& docs);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace relscott::io
