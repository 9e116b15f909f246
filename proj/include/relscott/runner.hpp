#pragma once

#include "relscott/config.hpp"

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relscott::cli {

std::string version();

/// Flat INI manifest: a [run] section naming the command and seed, a
/// [nuclei] section, and one section per command. Every value read is
/// recorded (with defaults filled in) for the run log.
class Manifest {
public:
    Manifest() = default;
    static Manifest load(const std::filesystem::path& path);
    static Manifest parse(const std::string& text);

    std::string command() const;
    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    /// Comma-separated numbers; an empty list is rejected.
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> words(const std::string& key, const std::vector<std::string>& fallback) const;

    const std::vector<std::pair<std::string, std::string>>& echo() const { return echo_; }

private:
    boost::property_tree::ptree tree_;
    mutable std::vector<std::pair<std::string, std::string>> echo_;
    std::optional<std::string> raw(const std::string& key) const;
    void record(const std::string& key, const std::string& value) const;
};

/// Nuclear configuration from the [nuclei] section. Rejects max_k Z_k α > 2/π,
/// which is the condition β ≤ h on the derived parameters.
NuclearConfig nuclei_from(const Manifest& m);

struct RunOptions {
    std::filesystem::path manifest;
    std::filesystem::path out = "out";
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

/// Exit codes.
constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_convergence = 3;

/// Runs one manifest: writes the command's CSV/JSON artifacts, run.log, and
/// error.json on failure. Returns an exit code; never throws.
int run(const RunOptions& opts);

/// Runs an already-loaded manifest into `out`. Throws ValidationError or
/// ConvergenceError.
void execute(const Manifest& m, const std::filesystem::path& out, int threads);

} // namespace relscott::cli
