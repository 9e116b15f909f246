#include "relscott/linalg.hpp"
#include "relscott/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"relscott: Thomas-Fermi, semiclassical and Scott-correction experiments"};
    relscott::cli::RunOptions opts;
    std::uint64_t seed = 0;
    app.add_option("--manifest", opts.manifest, "experiment manifest (INI)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opts.out, "output directory")->capture_default_str();
    app.add_option("--threads", opts.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "seed, overrides the manifest");
    app.set_version_flag("--version", relscott::cli::version());
    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) {
        opts.seed = seed;
    }
    try {
        relscott::linalg::ensure_backend(argv);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return relscott::cli::exit_convergence;
    }
    const int code = relscott::cli::run(opts);
    if (code != relscott::cli::exit_ok) {
        std::cerr << "relscott: failed with exit code " << code << "; see " << (opts.out / "error.json").string()
                  << '\n';
    }
    return code;
}
