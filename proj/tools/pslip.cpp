#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pslip/commands.hpp"
#include "pslip/config.hpp"
#include "pslip/errors.hpp"

namespace {

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("PSLIP_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw pslip::ValidationError("PSLIP_THREADS", "expected an integer in [1, 1024]");
    return static_cast<unsigned>(v);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw pslip::ValidationError("config", "cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-slip rates and log-susceptibility of a parametrically driven oscillator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_prefix, format;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", sets, "override one key, key=value (repeatable)")->allow_extra_args(false);
    app.add_option("--out", out_prefix, "output path prefix");
    app.add_option("--format", format, "csv|json|svg")->check(CLI::IsMember({"csv", "json", "svg"}));

    auto* rate = app.add_subcommand("rate", "rate exponent, momenta and validity diagnostics");
    auto* spectrum = app.add_subcommand("spectrum", "log-susceptibility spectrum");
    auto* portrait = app.add_subcommand("portrait", "phase portrait or fragility region (needs --out)");
    auto* selfcheck = app.add_subcommand("selfcheck", "invariant checks at the configured parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        pslip::RunConfig cfg;
        if (!config_path.empty()) pslip::parse_config(cfg, read_file(config_path));
        for (const auto& s : sets) pslip::apply_override(cfg, s);
        if (!format.empty()) cfg.format = pslip::parse_format(format);
        pslip::validate(cfg);

        pslip::CommandIO io{std::cout, std::cerr, std::nullopt, worker_count()};
        if (!out_prefix.empty()) io.prefix = out_prefix;

        if (rate->parsed()) return pslip::cmd_rate(cfg, io);
        if (spectrum->parsed()) return pslip::cmd_spectrum(cfg, io);
        if (portrait->parsed()) return pslip::cmd_portrait(cfg, io);
        if (selfcheck->parsed()) return pslip::cmd_selfcheck(cfg, io);
    } catch (const pslip::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
