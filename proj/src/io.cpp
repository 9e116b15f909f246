#include "relscott/io.hpp"

#include "relscott/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace relscott::io {

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns_.size()) {
        throw ValidationError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

void Table::add_row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) {
        cells.push_back(format_number(v));
    }
    add_row(std::move(cells));
}

std::string Table::str() const
{
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << cells[i];
        }
        os << '\n';
    };
    line(columns_);
    for (const auto& r : rows_) {
        line(r);
    }
    return os.str();
}

void Table::write(const std::filesystem::path& path) const { write_text(path, str()); }

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

// JSON has no inf/nan; non-finite numbers become null
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

Json to_json(const ineq::InequalityReport& rep)
{
    Json params = Json::object();
    for (const auto& [k, v] : rep.params) {
        params[k] = number(v);
    }
    Json terms = Json::array();
    for (const auto& [k, v] : rep.rhs_terms) {
        terms.push_back({{"name", k}, {"value", number(v)}});
    }
    Json j = {{"id", rep.id},
              {"seed", rep.seed},
              {"params", params},
              {"lhs", number(rep.lhs)},
              {"rhs_terms", terms},
              {"empirical_constant", number(rep.empirical_constant)},
              {"pass", rep.pass}};
    if (rep.bound) {
        j["bound"] = number(*rep.bound);
    }
    if (!rep.warnings.empty()) {
        j["warnings"] = rep.warnings;
    }
    return j;
}

Json to_json(const ineq::EnsembleSummary& s)
{
    Json failures = Json::array();
    for (const auto& f : s.failures) {
        failures.push_back(to_json(f));
    }
    return {{"id", s.id},
            {"seed", s.seed},
            {"instances", s.instances},
            {"violations", s.violations},
            {"worst_margin", number(s.worst_margin)},
            {"failures", failures}};
}

Json to_json(const tf::TfSolution& sol, double Z)
{
    return {{"format", "relscott.tf"},
            {"version", 1},
            {"Z", Z},
            {"slope", sol.slope()},
            {"slope_bracket", {sol.slope_lo(), sol.slope_hi()}},
            {"tolerance", sol.tolerance()},
            {"converged", sol.converged()},
            {"x_match", sol.x_match()},
            {"tail_scale", sol.tail_scale()},
            {"energy", tf::tf_energy(sol, Z)},
            {"energy_virial", tf::tf_energy_virial(sol, Z)},
            {"x", sol.x_nodes()},
            {"phi", sol.phi_nodes()}};
}

std::string json_lines(const std::vector<Json>& docs)
{
    std::string out;
    for (const auto& d : docs) {
        out += d.dump();
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ValidationError("cannot open '" + path.string() + "' for writing");
    }
    os << text;
    if (!os) {
        throw ValidationError("write to '" + path.string() + "' failed");
    }
}

} // namespace relscott::io
