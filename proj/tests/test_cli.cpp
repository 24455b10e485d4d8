#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "igp/cli.hpp"

using namespace igp;
using namespace igp::cli;

namespace {

GlobalOptions opts(std::uint64_t seed = 777, double gate = 4.0) {
    GlobalOptions g;
    g.seed = seed;
    g.streams = 4;
    g.z_gate = gate;
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IGP_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("dimension and purity list parsing") {
    CHECK(parse_dim_list("2,4,8") == std::vector<int>{2, 4, 8});
    CHECK(parse_dim_list("2..5") == std::vector<int>{2, 3, 4, 5});
    CHECK(parse_dim_list("2..3,8") == std::vector<int>{2, 3, 8});
    CHECK_THROWS_AS(parse_dim_list("abc"), ParseError);
    CHECK_THROWS_AS(parse_dim_list("5..2"), ParseError);
    CHECK_THROWS_AS(parse_dim_list(""), ParseError);

    const auto ps = parse_purity_list("min,mid,1.0");
    REQUIRE(ps.size() == 3);
    CHECK(ps[0].resolve(4) == Catch::Approx(0.25).margin(1e-15));
    CHECK(ps[1].resolve(4) == Catch::Approx(0.625).margin(1e-15));
    CHECK(ps[2].resolve(4) == Catch::Approx(1.0).margin(1e-15));
    CHECK_THROWS_AS(parse_purity_list("high"), ParseError);
}

TEST_CASE("cmd_analyze reports the closed forms") {
    UnitarySource pz;
    pz.kind = UnitarySource::Kind::pauli_z;
    pz.dim = 4;
    pz.m = 1;
    const json r = cmd_analyze(pz, std::nullopt, std::nullopt, opts());
    CHECK(r.at("dim") == 4);
    CHECK(r.at("igp_pure").get<double>() == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(r.at("igp_normalized").get<double>() == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.at("free_up_to_phase") == false);
    CHECK(r.at("protocol_residual").get<double>() <= 1e-10);

    UnitarySource orth;
    orth.kind = UnitarySource::Kind::orthogonal;
    orth.dim = 8;
    orth.seed = 7;
    const json ro = cmd_analyze(orth, std::nullopt, std::nullopt, opts());
    CHECK(ro.at("igp_pure").get<double>() == 0.0);

    UnitarySource haar;
    haar.kind = UnitarySource::Kind::haar;
    haar.dim = 2;
    haar.seed = 1;
    const json rh = cmd_analyze(haar, 0.5, std::nullopt, opts());
    CHECK(rh.at("igp_at_purity").get<double>() == 0.0); // P = 1/d
    CHECK(rh.at("igp_pure").get<double>() > 0.0);
}

TEST_CASE("file and phase-profile unitary sources") {
    const std::string dir = "/tmp/igp_cli_src";
    const int rc_setup = std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    REQUIRE(rc_setup == 0);

    // Round-trip a constructed unitary through --dump-unitary and --input.
    UnitarySource pz;
    pz.kind = UnitarySource::Kind::pauli_z;
    pz.dim = 3;
    pz.m = 1;
    const json direct =
        cmd_analyze(pz, std::nullopt, std::nullopt, opts(), dir + "/u.json");
    CHECK(direct.at("unitary_file") == dir + "/u.json");

    UnitarySource file;
    file.kind = UnitarySource::Kind::file;
    file.path = dir + "/u.json";
    const json reloaded = cmd_analyze(file, std::nullopt, std::nullopt, opts());
    CHECK(reloaded.at("igp_pure").get<double>() ==
          Catch::Approx(direct.at("igp_pure").get<double>()).margin(1e-15));

    // A phase profile is analyzed as diag(e^{i theta}).
    {
        std::ofstream f(dir + "/thetas.json");
        f << R"({"thetas": [0.0, 1.5707963267948966]})";
    }
    UnitarySource prof;
    prof.kind = UnitarySource::Kind::phase_profile;
    prof.path = dir + "/thetas.json";
    const json pr = cmd_analyze(prof, std::nullopt, std::nullopt, opts());
    CHECK(pr.at("dim") == 2);
    CHECK(pr.at("igp_pure").get<double>() == Catch::Approx(0.25).margin(1e-12));

    UnitarySource bad;
    bad.kind = UnitarySource::Kind::file;
    bad.path = dir + "/missing.json";
    CHECK_THROWS_AS(cmd_analyze(bad, std::nullopt, std::nullopt, opts()), ParseError);
}

TEST_CASE("cmd_protocol report") {
    UnitarySource pz;
    pz.kind = UnitarySource::Kind::pauli_z;
    pz.dim = 2;
    pz.m = 1;
    const json r = cmd_protocol(pz, 0, opts());
    CHECK(r.at("fidelity").get<double>() == Catch::Approx(0.0).margin(1e-15));
    CHECK(r.at("igp_pure_inferred").get<double>() == Catch::Approx(0.25).margin(1e-12));
    CHECK(r.at("residual").get<double>() <= 1e-10);
    CHECK_FALSE(r.contains("shots"));

    const json rs = cmd_protocol(pz, 5000, opts());
    CHECK(rs.at("shots") == 5000);
    CHECK(rs.at("fidelity").get<double>() <= 0.05); // true F is 0
}

TEST_CASE("cmd_verify protocol family gates on the identity residual") {
    VerifyParams vp;
    vp.dims = {2, 3, 4};
    vp.n = 100;
    const CsvTable t = cmd_verify(VerifyFamily::protocol, vp, opts());
    CHECK(t.header == "check,d,n,seed,oracle,estimate,stderr,z");
    CHECK(t.rows.size() == 3);
    CHECK(t.all_pass);
}

TEST_CASE("cmd_verify thm3 small grid") {
    VerifyParams vp;
    vp.dims = {2, 3};
    vp.purities = {PuritySpec{PuritySpec::Kind::min, 0.0}, PuritySpec{PuritySpec::Kind::mid, 0.0},
                   PuritySpec{PuritySpec::Kind::value, 1.0}};
    vp.n = 20000;
    const CsvTable t = cmd_verify(VerifyFamily::thm3, vp, opts());
    CHECK(t.header == "check,d,purity,n,seed,oracle,estimate,stderr,z");
    CHECK(t.rows.size() == 6);
    CHECK(t.all_pass);
}

TEST_CASE("cmd_variance_scan and cmd_concentration_scan headers and gates") {
    const CsvTable v = cmd_variance_scan({8}, 2000, opts());
    CHECK(v.header == "d,var_mc,ci_lo,ci_hi,var_analytic,n,seed");
    CHECK(v.rows.size() == 1);
    CHECK(v.all_pass); // no d >= 16 rows, so no containment gates apply

    const CsvTable c = cmd_concentration_scan({8, 16}, 2000, opts());
    CHECK(c.header == "d,threshold,fraction,levy_bound,n,seed");
    CHECK(c.rows.size() == 2);
    CHECK(c.all_pass);
}

TEST_CASE("scan output replays byte-identically") {
    const CsvTable a = cmd_concentration_scan({8, 16}, 2000, opts());
    const CsvTable b = cmd_concentration_scan({8, 16}, 2000, opts());
    CHECK(a.to_string() == b.to_string());

    VerifyParams vp;
    vp.dims = {2};
    vp.purities = {PuritySpec{PuritySpec::Kind::value, 1.0}};
    vp.n = 5000;
    vp.unitaries = 2;
    const CsvTable t1 = cmd_verify(VerifyFamily::thm1, vp, opts());
    const CsvTable t2 = cmd_verify(VerifyFamily::thm1, vp, opts());
    CHECK(t1.to_string() == t2.to_string());
}

TEST_CASE("csv to json conversion") {
    const CsvTable c = cmd_concentration_scan({8}, 2000, opts());
    const json arr = c.to_json();
    REQUIRE(arr.size() == 1);
    CHECK(arr[0].contains("levy_bound"));
    CHECK(arr[0].at("d") == "8");
}

TEST_CASE("cli binary: analyze, exit codes, manifests") {
    const std::string dir = "/tmp/igp_cli_test";
    const int rc_setup = std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    REQUIRE(rc_setup == 0);

    CHECK(run_cli("analyze --pauli-z 4 1 --out " + dir + "/a.json") == 0);
    const std::string report = slurp(dir + "/a.json");
    CHECK(report.find("igp_pure") != std::string::npos);
    const std::string manifest = slurp(dir + "/a.json.manifest.jsonl");
    const json m = json::parse(manifest);
    CHECK(m.at("command") == "analyze");
    CHECK(m.contains("tool_version"));
    CHECK(m.contains("wall_time_s"));

    // verify exit status: a generous gate passes, an absurd gate fails
    CHECK(run_cli("verify thm3 --d 2 --purity 1.0 --n 5000 --seed 3 --streams 2 --out " + dir +
                  "/v.csv") == 0);
    CHECK(run_cli("verify thm3 --d 2 --purity 1.0 --n 5000 --seed 3 --streams 2 --z-gate 1e-9 "
                  "--out " +
                  dir + "/v2.csv") == 1);

    // bad usage
    CHECK(run_cli("verify nosuch --d 2 2>/dev/null") == 2);
    CHECK(run_cli("analyze --pauli-z 4 1 --haar 2 2>/dev/null") == 2);
}

TEST_CASE("cli binary replays byte-identical csv") {
    const std::string dir = "/tmp/igp_cli_test";
    const int rc_setup = std::system(("mkdir -p " + dir).c_str());
    REQUIRE(rc_setup == 0);
    const std::string args =
        "variance-scan --d 8 --n 1000 --seed 99 --streams 2 --out ";
    CHECK(run_cli(args + dir + "/s1.csv") == 0);
    CHECK(run_cli(args + dir + "/s2.csv") == 0);
    const std::string a = slurp(dir + "/s1.csv");
    const std::string b = slurp(dir + "/s2.csv");
    CHECK(!a.empty());
    CHECK(a == b);
}
