#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "igp/core.hpp"
#include "igp/estimators.hpp"
#include "igp/power.hpp"
#include "igp/protocol.hpp"
#include "igp/sampling.hpp"
#include "igp/serialization.hpp"
#include "igp/version.hpp"

namespace igp::cli {

using nlohmann::json;

inline std::uint32_t default_streams() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::uint32_t>(std::clamp(hw, 1u, 16u));
}

struct GlobalOptions {
    std::uint64_t seed = 42;
    std::uint32_t streams = default_streams();
    double z_gate = 4.0;
    std::string out;            // empty: stdout
    std::string format = "csv"; // csv | json, scans only
};

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One scan/verify result: RFC-4180 style rows, '.' decimal, plus the
/// combined gate outcome that drives the exit status.
struct CsvTable {
    std::string header;
    std::vector<std::string> rows;
    bool all_pass = true;

    std::string to_string() const {
        std::string out = header;
        out.push_back('\n');
        for (const std::string& r : rows) {
            out += r;
            out.push_back('\n');
        }
        return out;
    }

    json to_json() const {
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string tok;
        while (std::getline(hs, tok, ',')) {
            cols.push_back(tok);
        }
        json arr = json::array();
        for (const std::string& r : rows) {
            std::stringstream rs(r);
            json obj = json::object();
            for (const std::string& c : cols) {
                std::getline(rs, tok, ',');
                obj[c] = tok;
            }
            arr.push_back(std::move(obj));
        }
        return arr;
    }
};

// ---------------------------------------------------------------------------
// Unitary sources: a matrix file or a named constructor family.
// ---------------------------------------------------------------------------

struct UnitarySource {
    enum class Kind { file, pauli_z, haar, orthogonal, phase_profile };
    Kind kind = Kind::haar;
    std::string path; // file / phase_profile
    int dim = 2;      // pauli_z / haar / orthogonal
    int m = 1;        // pauli_z
    std::uint64_t seed = 0;

    std::string describe() const {
        switch (kind) {
        case Kind::file:
            return "file:" + path;
        case Kind::pauli_z:
            return "pauli-z d=" + std::to_string(dim) + " m=" + std::to_string(m);
        case Kind::haar:
            return "haar d=" + std::to_string(dim) + " seed=" + std::to_string(seed);
        case Kind::orthogonal:
            return "orthogonal d=" + std::to_string(dim) + " seed=" + std::to_string(seed);
        case Kind::phase_profile:
            return "phase-profile:" + path;
        }
        return "?";
    }
};

inline UnitaryMatrix make_unitary(const UnitarySource& src, bool* free_up_to_phase = nullptr) {
    if (free_up_to_phase != nullptr) {
        *free_up_to_phase = false;
    }
    switch (src.kind) {
    case UnitarySource::Kind::file:
        return UnitaryMatrix(load_matrix(src.path));
    case UnitarySource::Kind::pauli_z: {
        GeneralizedPauliZ pz = make_pauli_z_unitary(src.dim, src.m);
        if (free_up_to_phase != nullptr) {
            *free_up_to_phase = pz.free_up_to_phase;
        }
        return pz.matrix;
    }
    case UnitarySource::Kind::haar: {
        RngStream rng(src.seed, 0);
        return haar_unitary(src.dim, rng);
    }
    case UnitarySource::Kind::orthogonal: {
        RngStream rng(src.seed, 0);
        return haar_orthogonal(src.dim, rng).as_unitary();
    }
    case UnitarySource::Kind::phase_profile: {
        std::ifstream in(src.path);
        if (!in) {
            throw ParseError("cannot open phase-profile file: " + src.path);
        }
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError("phase-profile file " + src.path + ": " + e.what());
        }
        if (!j.contains("thetas") || !j.at("thetas").is_array() || j.at("thetas").empty()) {
            throw ParseError("phase-profile: expected nonempty array field thetas");
        }
        const auto& arr = j.at("thetas");
        CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(arr.size()),
                                  static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            double th = 0.0;
            try {
                th = arr.at(i).get<double>();
            } catch (const json::exception& e) {
                throw ParseError(std::string("phase-profile entry: ") + e.what());
            }
            u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
                Complex(std::cos(th), std::sin(th));
        }
        return UnitaryMatrix(std::move(u));
    }
    }
    throw Error("make_unitary: unknown source kind");
}

// ---------------------------------------------------------------------------
// Flag mini-language: dimension lists and purity tokens.
// ---------------------------------------------------------------------------

inline std::vector<int> parse_dim_list(const std::string& spec) {
    std::vector<int> dims;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const std::size_t range = tok.find("..");
        try {
            if (range != std::string::npos) {
                const int lo = std::stoi(tok.substr(0, range));
                const int hi = std::stoi(tok.substr(range + 2));
                if (lo < 1 || hi < lo) {
                    throw ParseError("bad dimension range: " + tok);
                }
                for (int d = lo; d <= hi; ++d) {
                    dims.push_back(d);
                }
            } else {
                const int d = std::stoi(tok);
                if (d < 1) {
                    throw ParseError("bad dimension: " + tok);
                }
                dims.push_back(d);
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("bad dimension token: " + tok);
        } catch (const std::out_of_range&) {
            throw ParseError("dimension out of range: " + tok);
        }
    }
    if (dims.empty()) {
        throw ParseError("empty dimension list: " + spec);
    }
    return dims;
}

/// Purity grid entry; "min" resolves to 1/d and "mid" to (1 + 1/d)/2 so one
/// grid can span several dimensions.
struct PuritySpec {
    enum class Kind { value, min, mid };
    Kind kind = Kind::value;
    double value = 1.0;

    double resolve(int d) const {
        switch (kind) {
        case Kind::min:
            return 1.0 / d;
        case Kind::mid:
            return 0.5 * (1.0 + 1.0 / d);
        case Kind::value:
            return value;
        }
        return value;
    }

    std::string token() const {
        switch (kind) {
        case Kind::min:
            return "min";
        case Kind::mid:
            return "mid";
        case Kind::value:
            return fmt_num(value);
        }
        return "?";
    }
};

inline std::vector<PuritySpec> parse_purity_list(const std::string& spec) {
    std::vector<PuritySpec> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        PuritySpec p;
        if (tok == "min") {
            p.kind = PuritySpec::Kind::min;
        } else if (tok == "mid") {
            p.kind = PuritySpec::Kind::mid;
        } else {
            try {
                p.value = std::stod(tok);
            } catch (const std::exception&) {
                throw ParseError("bad purity token: " + tok);
            }
            p.kind = PuritySpec::Kind::value;
        }
        out.push_back(p);
    }
    if (out.empty()) {
        throw ParseError("empty purity list: " + spec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// analyze / protocol reports
// ---------------------------------------------------------------------------

inline json cmd_analyze(const UnitarySource& src, std::optional<double> purity_opt,
                        const std::optional<std::string>& basis_path, const GlobalOptions& g,
                        const std::string& dump_unitary_path = {}) {
    bool free_flag = false;
    UnitaryMatrix u = make_unitary(src, &free_flag);
    json report{{"op", "analyze"},
                {"tool_version", kToolVersion},
                {"seed", g.seed},
                {"streams", g.streams},
                {"source", src.describe()}};
    if (basis_path.has_value()) {
        const UnitaryMatrix v{load_matrix(*basis_path)};
        u = UnitaryMatrix(v.mat().adjoint() * u.mat() * v.mat());
        report["basis_change"] = *basis_path;
    }
    if (!dump_unitary_path.empty()) {
        save_matrix(dump_unitary_path, u.mat());
        report["unitary_file"] = dump_unitary_path;
    }
    const int d = u.dim();
    report["dim"] = d;
    report["trace_m_abs_sq"] = m_trace_abs_sq(u);
    report["igp_pure"] = igp_pure(u).value;
    report["igp_avg_uniform"] = igp_avg_uniform(u).value;
    report["igp_avg_hs"] = igp_avg_hs(u).value;
    report["igp_normalized"] = igp_normalized(u);
    report["igp_max"] = igp_max(d);
    report["igp_max_ratio"] = igp_pure(u).value / igp_max(d);
    if (purity_opt.has_value()) {
        report["purity"] = *purity_opt;
        report["igp_at_purity"] = igp_at_purity(u, *purity_opt).value;
    }
    if (src.kind == UnitarySource::Kind::pauli_z) {
        report["free_up_to_phase"] = free_flag;
    }
    if (d <= 128) {
        report["protocol_residual"] = run_fidelity_protocol(u).residual;
    }
    return report;
}

/// With shots = 0 the protocol is the exact noiseless identity; otherwise F
/// is the success frequency of that many projective measurements.
inline json cmd_protocol(const UnitarySource& src, std::uint64_t shots, const GlobalOptions& g) {
    const UnitaryMatrix u = make_unitary(src);
    ProtocolResult r;
    if (shots == 0) {
        r = run_fidelity_protocol(u);
    } else {
        RngStream rng(g.seed, 0);
        r = run_fidelity_protocol_sampled(u, shots, rng);
    }
    json out{{"op", "protocol"},
             {"tool_version", kToolVersion},
             {"seed", g.seed},
             {"streams", g.streams},
             {"source", src.describe()},
             {"dim", u.dim()},
             {"fidelity", r.fidelity},
             {"trace_sq", r.trace_sq},
             {"igp_pure_inferred", r.igp_pure_inferred},
             {"igp_direct", r.igp_direct},
             {"residual", r.residual}};
    if (shots > 0) {
        out["shots"] = shots;
    }
    return out;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

enum class VerifyFamily { thm1, thm3, moments, appendix_a, protocol };

inline VerifyFamily parse_family(const std::string& name) {
    if (name == "thm1") {
        return VerifyFamily::thm1;
    }
    if (name == "thm3") {
        return VerifyFamily::thm3;
    }
    if (name == "moments") {
        return VerifyFamily::moments;
    }
    if (name == "appendixA") {
        return VerifyFamily::appendix_a;
    }
    if (name == "protocol") {
        return VerifyFamily::protocol;
    }
    throw ParseError("unknown verify family: " + name +
                     " (expected thm1|thm3|moments|appendixA|protocol)");
}

struct VerifyParams {
    std::vector<int> dims{2, 3, 4, 8};
    std::vector<PuritySpec> purities{{PuritySpec::Kind::min, 0.0},
                                     {PuritySpec::Kind::mid, 0.0},
                                     {PuritySpec::Kind::value, 1.0}};
    std::uint64_t n = 100000;
    int unitaries = 5; // thm1: Haar test unitaries per grid point
    int order = 1;     // moments
    int tuples = 20;   // appendixA: random index tuples per dimension
};

namespace detail {

inline bool z_pass(double z, double gate) {
    return std::isfinite(z) && std::abs(z) <= gate;
}

inline std::string verify_row(const std::string& check, const std::vector<std::string>& keys,
                              const MCEstimate& e, double oracle, double z) {
    std::string row = check;
    for (const std::string& k : keys) {
        row += "," + k;
    }
    row += "," + std::to_string(e.n) + "," + std::to_string(e.seed);
    row += "," + fmt_num(oracle) + "," + fmt_num(e.mean) + "," + fmt_num(e.std_err) + "," +
           fmt_num(z);
    return row;
}

} // namespace detail

/// Grid verification against the closed forms. Exit contract: all_pass is
/// true iff every row's |z| stays within the gate (for the protocol family,
/// z is residual/1e-10 and the gate is fixed at 1).
inline CsvTable cmd_verify(VerifyFamily family, const VerifyParams& vp, const GlobalOptions& g) {
    CsvTable t;
    std::uint64_t row_salt = 1;
    const auto next_cfg = [&]() {
        return McConfig{derive_seed(g.seed, row_salt++), g.streams, 0};
    };

    switch (family) {
    case VerifyFamily::thm1: {
        t.header = "check,d,purity,unitary,n,seed,oracle,estimate,stderr,z";
        for (int d : vp.dims) {
            RngStream u_rng(derive_seed(g.seed, 0x7500u + static_cast<std::uint64_t>(d)), 0);
            std::vector<UnitaryMatrix> us;
            us.reserve(static_cast<std::size_t>(vp.unitaries));
            for (int k = 0; k < vp.unitaries; ++k) {
                us.push_back(haar_unitary(d, u_rng));
            }
            for (std::size_t k = 0; k < us.size(); ++k) {
                for (const PuritySpec& ps : vp.purities) {
                    const double p = ps.resolve(d);
                    const double oracle = igp_at_purity(us[k], p).value;
                    const MCEstimate e =
                        mc_igp(us[k], p, vp.n, SpectrumMode::two_level, next_cfg());
                    const double z = z_score(e, oracle);
                    t.all_pass = t.all_pass && detail::z_pass(z, g.z_gate);
                    t.rows.push_back(detail::verify_row(
                        "thm1", {std::to_string(d), fmt_num(p), std::to_string(k)}, e, oracle, z));
                }
            }
            // Spectrum-independence companion rows at interior purities.
            for (const PuritySpec& ps : vp.purities) {
                const double p = ps.resolve(d);
                if (p <= 1.0 / d + 1e-12 || p >= 1.0 - 1e-12 || us.empty()) {
                    continue;
                }
                const SpectrumIndependence si =
                    spectrum_independence_check(us.front(), p, vp.n, next_cfg());
                const double diff = si.two_level.mean - si.random_spectrum.mean;
                const double se =
                    std::sqrt(si.two_level.std_err * si.two_level.std_err +
                              si.random_spectrum.std_err * si.random_spectrum.std_err);
                MCEstimate rowest{diff, se, si.two_level.n, si.two_level.seed,
                                  si.two_level.streams};
                t.all_pass = t.all_pass && detail::z_pass(si.z, g.z_gate);
                t.rows.push_back(detail::verify_row(
                    "thm1-spectrum", {std::to_string(d), fmt_num(p), "0"}, rowest, 0.0, si.z));
            }
        }
        break;
    }
    case VerifyFamily::thm3: {
        t.header = "check,d,purity,n,seed,oracle,estimate,stderr,z";
        for (int d : vp.dims) {
            for (const PuritySpec& ps : vp.purities) {
                const double p = ps.resolve(d);
                const double oracle = haar_mean_igp(d, p).value;
                const MCEstimate e = mc_haar_mean_igp(d, p, vp.n, next_cfg());
                const double z = z_score(e, oracle);
                t.all_pass = t.all_pass && detail::z_pass(z, g.z_gate);
                t.rows.push_back(
                    detail::verify_row("thm3", {std::to_string(d), fmt_num(p)}, e, oracle, z));
            }
        }
        break;
    }
    case VerifyFamily::moments: {
        t.header = "check,d,order,n,seed,oracle,estimate,stderr,z";
        for (int d : vp.dims) {
            const double oracle = vp.order == 1
                                      ? 2.0 * d / (d + 1.0)
                                      : 8.0 + 64.0 / (static_cast<double>(d) * d);
            const MCEstimate e = mc_moment_y(d, vp.order, vp.n, next_cfg());
            const double z = z_score(e, oracle);
            t.all_pass = t.all_pass && detail::z_pass(z, g.z_gate);
            t.rows.push_back(detail::verify_row(
                "moments", {std::to_string(d), std::to_string(vp.order)}, e, oracle, z));
        }
        break;
    }
    case VerifyFamily::appendix_a: {
        t.header = "check,d,k,i,p,m,n,seed,oracle,estimate,stderr,z";
        for (int d : vp.dims) {
            RngStream tuple_rng(derive_seed(g.seed, 0xA400u + static_cast<std::uint64_t>(d)), 0);
            std::vector<std::pair<std::string, MomentIndices>> cases;
            cases.emplace_back("appendixA-special", MomentIndices{0, 0, 0, 0}); // <O_00^4>
            cases.emplace_back("appendixA-special",
                               MomentIndices{0, 0, 0, 1}); // <O_00^2 O_01^2>
            for (int tnum = 0; tnum < vp.tuples; ++tnum) {
                MomentIndices idx;
                idx.k = static_cast<int>(tuple_rng.next_u64() % static_cast<std::uint64_t>(d));
                idx.i = static_cast<int>(tuple_rng.next_u64() % static_cast<std::uint64_t>(d));
                idx.p = static_cast<int>(tuple_rng.next_u64() % static_cast<std::uint64_t>(d));
                idx.m = static_cast<int>(tuple_rng.next_u64() % static_cast<std::uint64_t>(d));
                cases.emplace_back("appendixA", idx);
            }
            for (const auto& [check, idx] : cases) {
                const double oracle = orthogonal_fourth_moment_closed(d, idx);
                const MCEstimate e = mc_orthogonal_fourth_moment(d, idx, vp.n, next_cfg());
                const double z = z_score(e, oracle);
                t.all_pass = t.all_pass && detail::z_pass(z, g.z_gate);
                t.rows.push_back(detail::verify_row(
                    check,
                    {std::to_string(d), std::to_string(idx.k), std::to_string(idx.i),
                     std::to_string(idx.p), std::to_string(idx.m)},
                    e, oracle, z));
            }
        }
        break;
    }
    case VerifyFamily::protocol: {
        t.header = "check,d,n,seed,oracle,estimate,stderr,z";
        for (int d : vp.dims) {
            const std::uint64_t sub_seed = derive_seed(g.seed, row_salt++);
            RngStream rng(sub_seed, 0);
            double worst = 0.0;
            for (std::uint64_t k = 0; k < vp.n; ++k) {
                worst = std::max(worst, run_fidelity_protocol(haar_unitary(d, rng)).residual);
            }
            const double z = worst / 1e-10;
            const bool pass = worst <= 1e-10;
            t.all_pass = t.all_pass && pass;
            MCEstimate rowest{worst, 0.0, vp.n, sub_seed, g.streams};
            // z here is the residual over its tolerance; the gate is 1.
            std::string row = detail::verify_row("protocol", {std::to_string(d)}, rowest, 0.0, z);
            t.rows.push_back(std::move(row));
        }
        break;
    }
    }
    return t;
}

// ---------------------------------------------------------------------------
// scans
// ---------------------------------------------------------------------------

namespace detail {

inline double loglog_slope(const std::vector<double>& ds, const std::vector<double>& vs) {
    const std::size_t n = ds.size();
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(ds[i]);
        const double y = std::log(vs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

} // namespace detail

/// Variance of the normalized power vs dimension; plot-ready on log axes.
/// Gates: the analytic curve must sit inside the 99% bootstrap interval at
/// every d >= 16, and the log-log slope over d >= 16 must be -4 +- 0.3.
inline CsvTable cmd_variance_scan(const std::vector<int>& dims, std::uint64_t n,
                                  const GlobalOptions& g) {
    CsvTable t;
    t.header = "d,var_mc,ci_lo,ci_hi,var_analytic,n,seed";
    std::vector<double> fit_d;
    std::vector<double> fit_v;
    std::uint64_t salt = 1;
    for (int d : dims) {
        const McConfig cfg{derive_seed(g.seed, salt++), g.streams, 0};
        const VarianceEstimate ve = mc_variance_normalized_igp(d, n, cfg);
        const double dd = static_cast<double>(d);
        const double analytic = 4.0 / std::pow(dd, 4) + 64.0 / std::pow(dd, 6);
        if (d >= 16) {
            t.all_pass = t.all_pass && ve.ci_lo <= analytic && analytic <= ve.ci_hi;
            fit_d.push_back(dd);
            fit_v.push_back(ve.variance);
        }
        t.rows.push_back(std::to_string(d) + "," + fmt_num(ve.variance) + "," +
                         fmt_num(ve.ci_lo) + "," + fmt_num(ve.ci_hi) + "," + fmt_num(analytic) +
                         "," + std::to_string(ve.n) + "," + std::to_string(ve.seed));
    }
    if (fit_d.size() >= 2) {
        const double slope = detail::loglog_slope(fit_d, fit_v);
        t.all_pass = t.all_pass && std::abs(slope + 4.0) <= 0.3;
    }
    return t;
}

/// Concentration probe vs dimension. Gate: empirical fraction above the
/// near-maximality threshold is at least the Levy bound at every d.
inline CsvTable cmd_concentration_scan(const std::vector<int>& dims, std::uint64_t n,
                                       const GlobalOptions& g) {
    CsvTable t;
    t.header = "d,threshold,fraction,levy_bound,n,seed";
    std::uint64_t salt = 1;
    for (int d : dims) {
        const McConfig cfg{derive_seed(g.seed, salt++), g.streams, 0};
        const ConcentrationProbe pr = concentration_probe(d, n, cfg);
        t.all_pass = t.all_pass && pr.fraction_above >= pr.levy_bound;
        t.rows.push_back(std::to_string(d) + "," + fmt_num(pr.threshold) + "," +
                         fmt_num(pr.fraction_above) + "," + fmt_num(pr.levy_bound) + "," +
                         std::to_string(pr.n) + "," + std::to_string(pr.seed));
    }
    return t;
}

// ---------------------------------------------------------------------------
// output + manifest
// ---------------------------------------------------------------------------

/// Write the payload to --out (or stdout) and append a manifest line next to
/// the output file. Manifests are append-only; every file written by a
/// command references the same run record.
inline void emit(const GlobalOptions& g, const std::string& command, const json& parameters,
                 const std::string& payload, double wall_seconds) {
    if (g.out.empty()) {
        std::fputs(payload.c_str(), stdout);
        return;
    }
    {
        std::ofstream f(g.out);
        if (!f) {
            throw Error("cannot open output file: " + g.out);
        }
        f << payload;
    }
    json manifest{{"command", command},
                  {"parameters", parameters},
                  {"seed", g.seed},
                  {"streams", g.streams},
                  {"tool_version", kToolVersion},
                  {"wall_time_s", wall_seconds},
                  {"output_paths", json::array({g.out})}};
    std::ofstream mf(g.out + ".manifest.jsonl", std::ios::app);
    if (!mf) {
        throw Error("cannot open manifest file: " + g.out + ".manifest.jsonl");
    }
    mf << manifest.dump() << "\n";
}

} // namespace igp::cli
