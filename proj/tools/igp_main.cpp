// Command-line front end: single-unitary analytics, Monte Carlo verification
// against the closed forms, and the variance / concentration scans.

#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "igp/cli.hpp"

namespace {

using igp::cli::GlobalOptions;
using igp::cli::UnitarySource;

struct SourceFlags {
    std::string input;
    std::string phase_profile;
    std::vector<int> pauli_z; // d m
    int haar = 0;
    int orthogonal = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "JSON matrix file {dim, re, im}");
        cmd->add_option("--pauli-z", pauli_z, "generalized Pauli-Z: d m")->expected(2);
        cmd->add_option("--haar", haar, "Haar-random unitary of dimension d (uses --seed)");
        cmd->add_option("--orthogonal", orthogonal,
                        "Haar-random orthogonal of dimension d (uses --seed)");
        cmd->add_option("--phase-profile", phase_profile,
                        "JSON file {thetas: [...]} -> diag(e^{i theta_j})");
    }

    UnitarySource resolve(std::uint64_t seed) const {
        int given = 0;
        given += input.empty() ? 0 : 1;
        given += pauli_z.empty() ? 0 : 1;
        given += haar > 0 ? 1 : 0;
        given += orthogonal > 0 ? 1 : 0;
        given += phase_profile.empty() ? 0 : 1;
        if (given != 1) {
            throw igp::ParseError("exactly one unitary source is required "
                                  "(--input | --pauli-z | --haar | --orthogonal | "
                                  "--phase-profile)");
        }
        UnitarySource src;
        src.seed = seed;
        if (!input.empty()) {
            src.kind = UnitarySource::Kind::file;
            src.path = input;
        } else if (!pauli_z.empty()) {
            src.kind = UnitarySource::Kind::pauli_z;
            src.dim = pauli_z[0];
            src.m = pauli_z[1];
        } else if (haar > 0) {
            src.kind = UnitarySource::Kind::haar;
            src.dim = haar;
        } else if (orthogonal > 0) {
            src.kind = UnitarySource::Kind::orthogonal;
            src.dim = orthogonal;
        } else {
            src.kind = UnitarySource::Kind::phase_profile;
            src.path = phase_profile;
        }
        return src;
    }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the imaginarity-generating power of unitaries"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags remain valid after a subcommand name

    GlobalOptions g;
    app.add_option("--seed", g.seed, "base RNG seed, recorded in every artifact")
        ->capture_default_str();
    app.add_option("--streams", g.streams,
                   "Monte Carlo worker streams; results depend on (seed, streams) only")
        ->capture_default_str();
    app.add_option("--z-gate", g.z_gate, "pass/fail gate on |z| for verify commands")
        ->capture_default_str();
    app.add_option("--out", g.out, "output file (default: stdout); manifest written alongside");
    app.add_option("--format", g.format, "csv|json for scan and verify outputs")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "closed-form power report for one unitary");
    SourceFlags analyze_src;
    analyze_src.attach(analyze);
    double purity_val = -1.0;
    auto* purity_opt = analyze->add_option(
        "--purity", purity_val, "also report the fixed-purity power at this P");
    std::string basis_path;
    analyze->add_option("--basis", basis_path,
                        "JSON unitary V; analyze V^dag U V (basis B' = V B)");
    std::string dump_unitary;
    analyze->add_option("--dump-unitary", dump_unitary,
                        "write the analyzed unitary to this path as matrix JSON");

    // protocol
    auto* protocol = app.add_subcommand(
        "protocol", "run the entangled-pair fidelity protocol on one unitary");
    SourceFlags protocol_src;
    protocol_src.attach(protocol);
    std::uint64_t shots = 0;
    protocol->add_option("--shots", shots,
                         "estimate the fidelity from this many measurement shots "
                         "(0: exact, noiseless)")
        ->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "Monte Carlo verification of a closed form");
    std::string family_name;
    verify->add_option("family", family_name, "thm1|thm3|moments|appendixA|protocol")->required();
    std::string dims_spec;
    std::string purity_spec;
    igp::cli::VerifyParams vp;
    bool n_given = false;
    std::uint64_t n_value = 0;
    verify->add_option("--d", dims_spec, "dimension list, e.g. 2,4,8 or 2..16");
    verify->add_option("--purity", purity_spec,
                       "purity list; numbers or the tokens min (=1/d), mid (=(1+1/d)/2)");
    verify->add_option("--n", n_value,
                       "samples per grid point (default 100000; protocol family: 1000)")
        ->each([&](const std::string&) { n_given = true; });
    verify->add_option("--unitaries", vp.unitaries, "thm1: Haar test unitaries per dimension")
        ->capture_default_str();
    verify->add_option("--order", vp.order, "moments: y moment order (1 or 2)")
        ->capture_default_str();
    verify->add_option("--tuples", vp.tuples, "appendixA: random index tuples per dimension")
        ->capture_default_str();

    // scans
    auto* vscan = app.add_subcommand("variance-scan",
                                     "variance of the normalized power vs dimension (log-log)");
    std::string vscan_dims = "8,16,32,64";
    std::uint64_t vscan_n = 5000;
    vscan->add_option("--d", vscan_dims, "dimension list")->capture_default_str();
    vscan->add_option("--n", vscan_n, "Haar unitaries per dimension")->capture_default_str();

    auto* cscan = app.add_subcommand("concentration-scan",
                                     "near-maximality fraction vs the Levy bound");
    std::string cscan_dims = "8,16,32,64";
    std::uint64_t cscan_n = 10000;
    cscan->add_option("--d", cscan_dims, "dimension list")->capture_default_str();
    cscan->add_option("--n", cscan_n, "Haar unitaries per dimension")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (analyze->parsed()) {
            std::optional<double> p;
            if (purity_opt->count() > 0) {
                p = purity_val;
            }
            std::optional<std::string> basis;
            if (!basis_path.empty()) {
                basis = basis_path;
            }
            const UnitarySource src = analyze_src.resolve(g.seed);
            const auto report = igp::cli::cmd_analyze(src, p, basis, g, dump_unitary);
            igp::cli::emit(g, "analyze", report, report.dump(2) + "\n", seconds_since(t0));
            return 0;
        }
        if (protocol->parsed()) {
            const UnitarySource src = protocol_src.resolve(g.seed);
            const auto report = igp::cli::cmd_protocol(src, shots, g);
            igp::cli::emit(g, "protocol", report, report.dump(2) + "\n", seconds_since(t0));
            return 0;
        }
        if (verify->parsed()) {
            const auto family = igp::cli::parse_family(family_name);
            if (!dims_spec.empty()) {
                vp.dims = igp::cli::parse_dim_list(dims_spec);
            } else if (family == igp::cli::VerifyFamily::appendix_a) {
                vp.dims = {3, 5, 8};
            } else if (family == igp::cli::VerifyFamily::protocol) {
                vp.dims = {2, 4, 8, 16};
            } else if (family == igp::cli::VerifyFamily::moments) {
                vp.dims = vp.order == 1 ? std::vector<int>{2, 8, 32} : std::vector<int>{32, 64};
            }
            if (!purity_spec.empty()) {
                vp.purities = igp::cli::parse_purity_list(purity_spec);
            }
            if (n_given) {
                vp.n = n_value;
            } else if (family == igp::cli::VerifyFamily::protocol) {
                vp.n = 1000;
            }
            const auto table = igp::cli::cmd_verify(family, vp, g);
            nlohmann::json purity_tokens = nlohmann::json::array();
            for (const auto& ps : vp.purities) {
                purity_tokens.push_back(ps.token());
            }
            const nlohmann::json params{{"family", family_name},
                                        {"d", vp.dims},
                                        {"purity", purity_tokens},
                                        {"n", vp.n},
                                        {"unitaries", vp.unitaries},
                                        {"order", vp.order},
                                        {"tuples", vp.tuples},
                                        {"z_gate", g.z_gate}};
            const std::string payload = g.format == "json" ? table.to_json().dump(2) + "\n"
                                                           : table.to_string();
            igp::cli::emit(g, "verify", params, payload, seconds_since(t0));
            return table.all_pass ? 0 : 1;
        }
        if (vscan->parsed()) {
            const auto dims = igp::cli::parse_dim_list(vscan_dims);
            for (int d : dims) {
                if (d < 4) {
                    throw igp::ParseError("variance-scan: need d >= 4");
                }
            }
            const auto table = igp::cli::cmd_variance_scan(dims, vscan_n, g);
            const nlohmann::json params{{"d", vscan_dims}, {"n", vscan_n}};
            const std::string payload = g.format == "json" ? table.to_json().dump(2) + "\n"
                                                           : table.to_string();
            igp::cli::emit(g, "variance-scan", params, payload, seconds_since(t0));
            return table.all_pass ? 0 : 1;
        }
        if (cscan->parsed()) {
            const auto dims = igp::cli::parse_dim_list(cscan_dims);
            for (int d : dims) {
                if (d < 2) {
                    throw igp::ParseError("concentration-scan: need d >= 2");
                }
            }
            const auto table = igp::cli::cmd_concentration_scan(dims, cscan_n, g);
            const nlohmann::json params{{"d", cscan_dims}, {"n", cscan_n}};
            const std::string payload = g.format == "json" ? table.to_json().dump(2) + "\n"
                                                           : table.to_string();
            igp::cli::emit(g, "concentration-scan", params, payload, seconds_since(t0));
            return table.all_pass ? 0 : 1;
        }
    } catch (const igp::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
