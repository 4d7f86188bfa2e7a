// Config parsing, sweep evaluation, table output, presets, and the
// verification battery behind the command-line driver.

#include "phase/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "phase/errors.hpp"
#include "phase/serialize.hpp"
#include "phase/transport.hpp"

namespace phase {

namespace {

constexpr double kPi = std::numbers::pi;

// A sweep row counts as converged when the step-halving estimate of its own
// discretization error is below this. The estimate bounds the error of the
// unextrapolated chain, so it sits orders of magnitude above the error of the
// reported (extrapolated) value; 1e-4 separates production resolutions
// (K >= 256) from deliberately coarse ones.
constexpr double kConvergedTol = 1e-4;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Scalars are plain decimals or quarter-turn-friendly pi fractions:
// "pi", "2pi", "pi/2", "3pi/4", "-pi/2", "0.5pi".
double parse_scalar(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty())
        throw ConfigError("empty numeric token");
    const auto at = t.find("pi");
    if (at != std::string::npos) {
        const std::string pre = t.substr(0, at);
        const std::string post = t.substr(at + 2);
        double mult = 1.0;
        if (pre == "-")
            mult = -1.0;
        else if (!pre.empty() && pre != "+") {
            std::size_t used = 0;
            mult = std::stod(pre, &used);
            if (used != pre.size())
                throw ConfigError("bad numeric token '" + t + "'");
        }
        double div = 1.0;
        if (!post.empty()) {
            if (post[0] != '/')
                throw ConfigError("bad numeric token '" + t + "'");
            const std::string d = post.substr(1);
            std::size_t used = 0;
            div = std::stod(d, &used);
            if (used != d.size() || div == 0.0)
                throw ConfigError("bad numeric token '" + t + "'");
        }
        return mult * kPi / div;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric token '" + t + "'");
    }
    if (used != t.size())
        throw ConfigError("bad numeric token '" + t + "'");
    return v;
}

// Lists are comma/space separated scalars, or the generators
// geom(lo, hi, n) and lin(lo, hi, n).
std::vector<double> parse_list(const std::string& value) {
    const std::string v = trim(value);
    for (const char* gen : {"geom", "lin"}) {
        const std::string head = std::string(gen) + "(";
        if (v.rfind(head, 0) != 0)
            continue;
        if (v.back() != ')')
            throw ConfigError("unterminated '" + std::string(gen) + "(' in '" + v + "'");
        std::vector<double> args;
        std::stringstream inner(v.substr(head.size(), v.size() - head.size() - 1));
        std::string tok;
        while (std::getline(inner, tok, ','))
            args.push_back(parse_scalar(tok));
        if (args.size() != 3)
            throw ConfigError(std::string(gen) + "() takes (lo, hi, n)");
        const double lo = args[0], hi = args[1];
        const int n = static_cast<int>(std::lround(args[2]));
        if (n < 1 || std::abs(args[2] - n) > 1e-9)
            throw ConfigError(std::string(gen) + "() count must be a positive integer");
        std::vector<double> grid;
        if (n == 1) {
            grid.push_back(lo);
        } else if (std::string(gen) == "geom") {
            if (lo <= 0.0 || hi <= 0.0)
                throw ConfigError("geom() endpoints must be positive");
            for (int i = 0; i < n; ++i)
                grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
        } else {
            for (int i = 0; i < n; ++i)
                grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
        }
        return grid;
    }
    std::vector<double> out;
    std::string tok;
    for (char c : v) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty())
                out.push_back(parse_scalar(tok));
            tok.clear();
        } else {
            tok += c;
        }
    }
    if (!tok.empty())
        out.push_back(parse_scalar(tok));
    return out;
}

void require_finite(const std::vector<double>& grid, const char* name) {
    if (grid.empty())
        throw ConfigError(std::string(name) + " grid is empty");
    for (double v : grid)
        if (!std::isfinite(v))
            throw ConfigError(std::string(name) + " grid has a non-finite entry");
}

// key -> value map with "section.key" composite keys; rejects duplicates.
std::map<std::string, std::string> read_keyvalues(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key =
            (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key.back() == '.')
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError("duplicate key '" + key + "'");
    }
    return kv;
}

// Pops a key from the map; empty optional when absent.
std::optional<std::string> take(std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end())
        return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
}

LoopKind loop_kind_from_name(const std::string& name) {
    if (name == "latitude")
        return LoopKind::Latitude;
    if (name == "meridian")
        return LoopKind::Meridian;
    if (name == "great-circle")
        return LoopKind::GreatCircle;
    throw ConfigError("unknown loop kind '" + name + "'");
}

unsigned worker_count(std::size_t jobs) {
    unsigned base = std::thread::hardware_concurrency();
    if (base == 0)
        base = 1;
    if (const char* env = std::getenv("PHASE_THREADS")) {
        int v = 0;
        const auto res = std::from_chars(env, env + std::strlen(env), v);
        if (res.ec != std::errc{} || *res.ptr != '\0' || v <= 0)
            throw ConfigError("PHASE_THREADS must be a positive integer");
        base = std::min<unsigned>(base, static_cast<unsigned>(v));
    }
    return std::max(1u, std::min<unsigned>(base, static_cast<unsigned>(jobs)));
}

SphereLoop make_loop(const LoopSpec& spec, double omega, bool has_omega) {
    switch (spec.kind) {
    case LoopKind::Latitude: {
        const double theta0 = has_omega ? std::acos(1.0 - omega / (2.0 * kPi)) : spec.theta0;
        return SphereLoop::latitude(theta0, spec.segments, spec.orientation);
    }
    case LoopKind::Meridian:
        return SphereLoop::meridian(spec.phi0, spec.segments);
    case LoopKind::GreatCircle:
        return SphereLoop::great_circle(spec.segments, spec.orientation);
    case LoopKind::Custom:
        break;
    }
    throw ConfigError("custom loops are not expressible in a config file");
}

void fill_phase(SweepRow& row, const PhaseResult& r) {
    row.phase_mod2pi = r.phase;
    row.phase_raw = r.raw_accumulated;
    row.residual_max = r.residual_max;
    row.converged = r.convergence_estimate <= kConvergedTol;
}

SweepRow evaluate_row(const RunConfig& cfg, double beta, double omega, bool has_omega,
                      AncillaConvention conv) {
    SweepRow row;
    row.beta = beta;
    row.kT_over_R = 1.0 / beta;
    row.representation = conv;

    const SphereLoop loop = make_loop(cfg.loop, omega, has_omega);
    row.omega = solid_angle(loop);
    const LoopPath path = loop.path(1.0);
    const HamiltonianFamily family = two_level_family(1.0, loop);

    try {
        switch (cfg.phase) {
        case PhaseSelect::THERMAL_BERRY: {
            const PhaseResult r = conv == AncillaConvention::THERMAL_VACUUM
                                      ? thermal_berry_phase_tv(family, path, beta)
                                      : thermal_berry_phase_ps(family, path, beta);
            fill_phase(row, r);
            break;
        }
        case PhaseSelect::INTERFEROMETRIC: {
            const TransportedFrame frame = build_frame(family, path);
            fill_phase(row, interferometric_phase_thermal(frame, beta));
            break;
        }
        case PhaseSelect::GENERALIZED_BERRY: {
            const ComplexMatrix shifter = off_diagonal_phase_shifter(loop, 1.0);
            const DensityMatrix rho = off_diagonal_protocol_density(1.0, beta);
            fill_phase(row, generalized_berry_phase_ancilla_only(rho, shifter, conv));
            break;
        }
        case PhaseSelect::DIAGNOSTICS: {
            const TransportedFrame frame = build_frame(family, path);
            const AdiabaticTransporters tp = adiabatic_transporters(frame);
            const ComplexMatrix H0 = family.hamiltonian(path.samples.front());
            const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
            const CompositeState s0 = conv == AncillaConvention::PURIFIED
                                          ? purify(gibbs_density(H0, beta), one)
                                          : thermal_vacuum(H0, beta, one);
            std::vector<CompositeState> chain;
            chain.reserve(tp.u1.size());
            for (std::size_t k = 0; k < tp.u1.size(); ++k)
                chain.push_back(apply_composite(s0, tp.u1[k], tp.u2_tilde[k]));
            fill_phase(row, generalized_berry_phase(s0, tp.u1.back(), tp.u2_tilde.back()));
            row.residual_max = pt_residual(chain, path.t);
            const double cancel =
                std::abs(dynamical_phase(frame, beta, DynamicalSide::SYSTEM) +
                         dynamical_phase(frame, beta, DynamicalSide::ANCILLA));
            row.converged = cancel <= 1e-8;
            break;
        }
        }
    } catch (const UndefinedPhase&) {
        row.undefined = true;
        row.phase_mod2pi = 0.0;
        row.phase_raw = 0.0;
        row.residual_max = 0.0;
        row.converged = false;
    }
    return row;
}

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(6) << v;
    return os.str();
}

} // namespace

const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names = {"two-level-s2"};
    return names;
}

RunConfig parse_config(std::istream& in) {
    auto kv = read_keyvalues(in);
    RunConfig cfg;

    if (auto v = take(kv, "model"))
        cfg.model = *v;
    if (std::find(known_models().begin(), known_models().end(), cfg.model) ==
        known_models().end())
        throw ConfigError("unknown model '" + cfg.model + "'");

    if (auto v = take(kv, "loop.kind"))
        cfg.loop.kind = loop_kind_from_name(*v);
    const auto theta0 = take(kv, "loop.theta0");
    if (theta0) {
        if (cfg.loop.kind != LoopKind::Latitude)
            throw ConfigError("loop.theta0 only applies to latitude loops");
        cfg.loop.theta0 = parse_scalar(*theta0);
    }
    if (auto v = take(kv, "loop.phi0")) {
        if (cfg.loop.kind != LoopKind::Meridian)
            throw ConfigError("loop.phi0 only applies to meridian loops");
        cfg.loop.phi0 = parse_scalar(*v);
    }
    if (auto v = take(kv, "loop.segments")) {
        const double raw = parse_scalar(*v);
        cfg.loop.segments = static_cast<int>(std::lround(raw));
        if (std::abs(raw - cfg.loop.segments) > 1e-9)
            throw ConfigError("loop.segments must be an integer");
    }
    if (auto v = take(kv, "loop.orientation")) {
        if (cfg.loop.kind == LoopKind::Meridian)
            throw ConfigError("loop.orientation does not apply to meridian loops");
        const double raw = parse_scalar(*v);
        cfg.loop.orientation = static_cast<int>(std::lround(raw));
        if (cfg.loop.orientation != 1 && cfg.loop.orientation != -1)
            throw ConfigError("loop.orientation must be 1 or -1");
    }
    if (cfg.loop.segments < 8 || cfg.loop.segments % 2 != 0)
        throw ConfigError("loop.segments must be an even integer >= 8");

    const auto beta_v = take(kv, "grid.beta");
    const auto kt_v = take(kv, "grid.kT_over_R");
    if (static_cast<bool>(beta_v) == static_cast<bool>(kt_v))
        throw ConfigError("give exactly one of grid.beta and grid.kT_over_R");
    if (beta_v) {
        cfg.betas = parse_list(*beta_v);
        require_finite(cfg.betas, "beta");
    } else {
        const auto temps = parse_list(*kt_v);
        require_finite(temps, "kT_over_R");
        for (double t : temps) {
            if (t <= 0.0)
                throw ConfigError("kT_over_R grid entries must be positive");
            cfg.betas.push_back(1.0 / t);
        }
    }
    for (double b : cfg.betas)
        if (b <= 0.0)
            throw ConfigError("beta grid entries must be positive");

    if (auto v = take(kv, "grid.omega")) {
        cfg.omegas = parse_list(*v);
        require_finite(cfg.omegas, "omega");
        if (cfg.loop.kind != LoopKind::Latitude)
            throw ConfigError("an omega grid requires a latitude loop");
        if (theta0)
            throw ConfigError("give either loop.theta0 or grid.omega, not both");
        for (double w : cfg.omegas)
            if (w <= 0.0 || w >= 4.0 * kPi)
                throw ConfigError("omega grid entries must lie strictly inside (0, 4pi)");
    } else if (cfg.loop.kind == LoopKind::Latitude) {
        if (!theta0)
            throw ConfigError("a latitude loop needs loop.theta0 or grid.omega");
        if (cfg.loop.theta0 <= 0.0 || cfg.loop.theta0 >= kPi)
            throw ConfigError("loop.theta0 must lie strictly inside (0, pi)");
    }

    if (auto v = take(kv, "phase.kind")) {
        if (*v == "thermal-berry")
            cfg.phase = PhaseSelect::THERMAL_BERRY;
        else if (*v == "generalized-berry")
            cfg.phase = PhaseSelect::GENERALIZED_BERRY;
        else if (*v == "interferometric")
            cfg.phase = PhaseSelect::INTERFEROMETRIC;
        else if (*v == "diagnostics")
            cfg.phase = PhaseSelect::DIAGNOSTICS;
        else
            throw ConfigError("unknown phase kind '" + *v + "'");
    }
    if (auto v = take(kv, "phase.representation")) {
        if (*v == "purified")
            cfg.representation = RepresentationSelect::PURIFIED;
        else if (*v == "thermal-vacuum")
            cfg.representation = RepresentationSelect::THERMAL_VACUUM;
        else if (*v == "both")
            cfg.representation = RepresentationSelect::BOTH;
        else
            throw ConfigError("unknown representation '" + *v + "'");
    }

    if (auto v = take(kv, "output.format")) {
        if (*v == "csv")
            cfg.format = OutputFormat::CSV;
        else if (*v == "json")
            cfg.format = OutputFormat::JSON;
        else
            throw ConfigError("unknown output format '" + *v + "'");
    }
    if (auto v = take(kv, "output.path"))
        cfg.output_path = *v;

    if (!kv.empty())
        throw ConfigError("unknown config key '" + kv.begin()->first + "'");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    struct Job {
        double beta;
        double omega;
        AncillaConvention conv;
    };
    std::vector<AncillaConvention> convs;
    if (cfg.representation != RepresentationSelect::THERMAL_VACUUM)
        convs.push_back(AncillaConvention::PURIFIED);
    if (cfg.representation != RepresentationSelect::PURIFIED)
        convs.push_back(AncillaConvention::THERMAL_VACUUM);

    const bool has_omega = !cfg.omegas.empty();
    std::vector<Job> jobs;
    for (double omega : (has_omega ? cfg.omegas : std::vector<double>{0.0}))
        for (double beta : cfg.betas)
            for (AncillaConvention conv : convs)
                jobs.push_back({beta, omega, conv});

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            const Job& job = jobs[i];
            try {
                rows[i] = evaluate_row(cfg, job.beta, job.omega, has_omega, job.conv);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    const unsigned n = worker_count(jobs.size());
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericError(e.what());
        }
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.beta != b.beta)
            return a.beta < b.beta;
        if (a.omega != b.omega)
            return a.omega < b.omega;
        return std::string(convention_name(a.representation)) <
               std::string(convention_name(b.representation));
    });
    return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "# columns: beta, kT_over_R, omega, representation, phase_mod2pi, phase_raw, "
           "residual_max, converged\n";
    for (const SweepRow& r : rows) {
        out << fmt_double(r.beta) << ',' << fmt_double(r.kT_over_R) << ',' << fmt_double(r.omega)
            << ',' << convention_name(r.representation) << ',';
        if (r.undefined)
            out << "undefined,undefined,";
        else
            out << fmt_double(r.phase_mod2pi) << ',' << fmt_double(r.phase_raw) << ',';
        out << fmt_double(r.residual_max) << ',' << (r.converged ? '1' : '0') << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json doc;
    doc["columns"] = {"beta",         "kT_over_R", "omega",        "representation",
                      "phase_mod2pi", "phase_raw", "residual_max", "converged"};
    doc["rows"] = nlohmann::ordered_json::array();
    for (const SweepRow& r : rows) {
        nlohmann::ordered_json row;
        row["beta"] = r.beta;
        row["kT_over_R"] = r.kT_over_R;
        row["omega"] = r.omega;
        row["representation"] = convention_name(r.representation);
        if (r.undefined) {
            row["phase_mod2pi"] = "undefined";
            row["phase_raw"] = "undefined";
        } else {
            row["phase_mod2pi"] = r.phase_mod2pi;
            row["phase_raw"] = r.phase_raw;
        }
        row["residual_max"] = r.residual_max;
        row["converged"] = r.converged;
        doc["rows"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

std::vector<SweepRow> rows_from_json_text(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        std::vector<SweepRow> rows;
        for (const auto& j : doc.at("rows")) {
            SweepRow r;
            r.beta = j.at("beta").get<double>();
            r.kT_over_R = j.at("kT_over_R").get<double>();
            r.omega = j.at("omega").get<double>();
            r.representation = convention_from_name(j.at("representation").get<std::string>());
            const auto& mod = j.at("phase_mod2pi");
            if (mod.is_string()) {
                if (mod.get<std::string>() != "undefined")
                    throw ConfigError("bad phase marker in row");
                r.undefined = true;
            } else {
                r.phase_mod2pi = mod.get<double>();
                r.phase_raw = j.at("phase_raw").get<double>();
            }
            r.residual_max = j.at("residual_max").get<double>();
            r.converged = j.at("converged").get<bool>();
            rows.push_back(r);
        }
        return rows;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad row document: ") + e.what());
    }
}

const char* preset_config(const std::string& name) {
    if (name == "fig1")
        return "# Thermal Berry phase against temperature for four latitude loops.\n"
               "model = two-level-s2\n"
               "\n"
               "[loop]\n"
               "kind = latitude\n"
               "segments = 512\n"
               "orientation = 1\n"
               "\n"
               "[grid]\n"
               "omega = 2pi, pi, pi/2, pi/4\n"
               "kT_over_R = geom(0.05, 10, 20)\n"
               "\n"
               "[phase]\n"
               "kind = thermal-berry\n"
               "representation = thermal-vacuum\n"
               "\n"
               "[output]\n"
               "format = csv\n"
               "path = fig1.csv\n";
    if (name == "example51")
        return "# Generalized Berry phase of the off-diagonal ancilla protocol; the\n"
               "# two pairing conventions land a circular distance pi apart.\n"
               "model = two-level-s2\n"
               "\n"
               "[loop]\n"
               "kind = latitude\n"
               "segments = 512\n"
               "\n"
               "[grid]\n"
               "omega = pi/2\n"
               "beta = 1\n"
               "\n"
               "[phase]\n"
               "kind = generalized-berry\n"
               "representation = both\n"
               "\n"
               "[output]\n"
               "format = csv\n"
               "path = example51.csv\n";
    if (name == "null-theorem")
        return "# Dual adiabatic transport: the generalized Berry phase vanishes for\n"
               "# both conventions; rows carry the transport-condition residual.\n"
               "model = two-level-s2\n"
               "\n"
               "[loop]\n"
               "kind = latitude\n"
               "segments = 256\n"
               "\n"
               "[grid]\n"
               "omega = pi/3, pi, 3pi/2\n"
               "beta = 0.5, 1, 2\n"
               "\n"
               "[phase]\n"
               "kind = diagnostics\n"
               "representation = both\n"
               "\n"
               "[output]\n"
               "format = csv\n"
               "path = null_theorem.csv\n";
    return nullptr;
}

int run_command(const std::string& config_path, bool allow_undefined, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    std::vector<SweepRow> rows;
    try {
        rows = run_sweep(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 3;
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.output_path.empty()) {
        file.open(cfg.output_path, std::ios::binary);
        if (!file) {
            err << "config error: cannot write output path '" << cfg.output_path << "'\n";
            return 2;
        }
        out = &file;
    }
    if (cfg.format == OutputFormat::CSV)
        write_csv(*out, rows);
    else
        write_json(*out, rows);

    const auto undefined_rows =
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.undefined; });
    if (undefined_rows > 0 && !allow_undefined) {
        err << undefined_rows
            << " row(s) have no defined phase; rerun with --allow-undefined to accept\n";
        return 1;
    }
    return 0;
}

namespace {

struct Check {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double diff = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool skipped = false;
    double conv_estimate = 0.0;
};

class Battery {
public:
    explicit Battery(bool allow_undefined) : allow_undefined_(allow_undefined) {}

    template <typename F>
    void add(const std::string& name, double expected, double tol, bool circular, F&& compute) {
        Check c;
        c.name = name;
        c.expected = expected;
        c.tol = tol;
        try {
            const PhaseResult r = compute();
            c.value = circular ? r.phase : r.raw_accumulated;
            c.diff = circular ? circular_distance(c.value, expected)
                              : std::abs(c.value - expected);
            c.pass = c.diff <= tol;
            c.conv_estimate = r.convergence_estimate;
        } catch (const UndefinedPhase&) {
            c.skipped = allow_undefined_;
            c.pass = false;
            c.value = std::numeric_limits<double>::quiet_NaN();
            c.diff = std::numeric_limits<double>::quiet_NaN();
        }
        checks_.push_back(std::move(c));
    }

    void add_scalar(const std::string& name, double value, double expected, double tol) {
        Check c;
        c.name = name;
        c.value = value;
        c.expected = expected;
        c.tol = tol;
        c.diff = std::abs(value - expected);
        c.pass = c.diff <= tol;
        checks_.push_back(std::move(c));
    }

    void note(const std::string& text) { notes_.push_back(text); }

    int report(std::ostream& out) const {
        out << std::left << std::setw(52) << "check" << std::setw(15) << "value"
            << std::setw(15) << "expected" << std::setw(11) << "|diff|" << std::setw(9)
            << "tol" << "result\n";
        int failures = 0;
        for (const Check& c : checks_) {
            out << std::left << std::setw(52) << c.name << std::setw(15) << fmt_sci(c.value)
                << std::setw(15) << fmt_sci(c.expected) << std::setw(11)
                << fmt_compact(c.diff) << std::setw(9) << fmt_compact(c.tol);
            if (c.skipped) {
                out << "SKIP (undefined)";
            } else if (c.pass) {
                out << "PASS";
            } else {
                out << "FAIL";
                ++failures;
            }
            if (c.conv_estimate > kConvergedTol)
                out << "  [low-confidence: richardson estimate " << fmt_compact(c.conv_estimate)
                    << "]";
            out << '\n';
        }
        for (const std::string& n : notes_)
            out << "note: " << n << '\n';
        out << checks_.size() << " checks, " << failures << " failed\n";
        return failures == 0 ? 0 : 1;
    }

private:
    static std::string fmt_compact(double v) {
        std::ostringstream os;
        os << std::scientific << std::setprecision(1) << v;
        return os.str();
    }

    bool allow_undefined_;
    std::vector<Check> checks_;
    std::vector<std::string> notes_;
};

LoopPath constant_path(const Eigen::Vector3d& point, int segments, double tau) {
    std::vector<Eigen::VectorXd> samples(segments + 1, Eigen::VectorXd(point));
    std::vector<double> t(segments + 1);
    for (int k = 0; k <= segments; ++k)
        t[k] = tau * static_cast<double>(k) / segments;
    return LoopPath::create(std::move(samples), std::move(t));
}

// Ancilla drive whose matrix is diagonal in the eigenbasis V with phases
// e^{-i E_n t}; the transposed slot of the state construction makes the
// coordinate-space matrix conj(V) diag Vᵀ.
UnitaryFamily eigen_diag_drive(const ComplexMatrix& V, const RealVector& E) {
    return [V, E](double t) {
        ComplexMatrix d = ComplexMatrix::Zero(E.size(), E.size());
        for (Eigen::Index n = 0; n < E.size(); ++n)
            d(n, n) = std::polar(1.0, -E(n) * t);
        return ComplexMatrix(V.conjugate() * d * V.transpose());
    };
}

} // namespace

int verify_command(const std::string& suite, bool allow_undefined, int segments,
                   std::ostream& out) {
    if (suite != "two-level") {
        std::cerr << "config error: unknown suite '" << suite << "'\n";
        return 2;
    }
    if (segments < 8 || segments % 2 != 0) {
        std::cerr << "config error: --segments must be an even integer >= 8\n";
        return 2;
    }

    try {
        Battery battery(allow_undefined);
        const int K = segments;

        const SphereLoop lat = SphereLoop::latitude(kPi / 3.0, K);
        const double omega = solid_angle(lat);
        const LoopPath lat_path = lat.path(1.0);
        const HamiltonianFamily lat_family = two_level_family(1.0, lat);
        const TransportedFrame lat_frame = build_frame(lat_family, lat_path);

        battery.add("latitude holonomy, lower level (raw)", omega / 2.0 - 2.0 * kPi, 1e-8,
                    false, [&] { return berry_phase_level(lat_frame, 0); });
        battery.add("latitude holonomy, upper level (raw)", -omega / 2.0, 1e-8, false,
                    [&] { return berry_phase_level(lat_frame, 1); });

        const SphereLoop mer = SphereLoop::meridian(0.3, K);
        const TransportedFrame mer_frame = build_frame(two_level_family(1.0, mer), mer.path(1.0));
        battery.add("meridian holonomy, lower level (raw)", 0.0, 1e-8, false,
                    [&] { return berry_phase_level(mer_frame, 0); });
        battery.add("meridian holonomy, upper level (raw)", 0.0, 1e-8, false,
                    [&] { return berry_phase_level(mer_frame, 1); });

        {
            const double beta = 1.0;
            const double lam_lower = 1.0 / (1.0 + std::exp(-2.0 * beta));
            const double closed = (2.0 * lam_lower - 1.0) * omega - 4.0 * lam_lower * kPi;
            battery.add("thermal holonomy, naive pairing, latitude", mod_two_pi(closed), 1e-6,
                        true, [&] { return thermal_berry_phase_tv(lat_family, lat_path, beta); });
        }
        {
            const SphereLoop gc = SphereLoop::great_circle(K);
            battery.add("thermal holonomy, naive pairing, great circle", 0.0, 1e-8, true, [&] {
                return thermal_berry_phase_tv(two_level_family(1.0, gc), gc.path(1.0), 0.7);
            });
        }
        battery.add("thermal holonomy, amplitude pairing, latitude", 0.0, 1e-8, true,
                    [&] { return thermal_berry_phase_ps(lat_family, lat_path, 1.3); });

        {
            const double beta = 0.9;
            const ComplexMatrix H = two_level_hamiltonian({1.0, 0.4, 1.1});
            const EigResult eig = eig_hermitian(H);
            const LoopPath cpath =
                constant_path(Eigen::Vector3d(std::sin(0.4) * std::cos(1.1),
                                              std::sin(0.4) * std::sin(1.1), std::cos(0.4)),
                              K, 1.0);
            const HamiltonianFamily cfam{[H](const Eigen::VectorXd&) { return H; }, {}};
            const UnitaryFamily drive = eigen_diag_drive(eig.eigenvectors, eig.eigenvalues);

            RealVector w(2);
            const double z = std::exp(-beta * eig.eigenvalues(0)) + std::exp(-beta * eig.eigenvalues(1));
            w(0) = std::exp(-beta * eig.eigenvalues(0)) / z;
            w(1) = std::exp(-beta * eig.eigenvalues(1)) / z;
            const double mean_energy = w(0) * eig.eigenvalues(0) + w(1) * eig.eigenvalues(1);
            battery.add("driven ancilla, constant path, naive pairing", mean_energy, 1e-8, false,
                        [&] { return thermal_berry_phase_tv(cfam, cpath, beta, drive); });

            const DensityMatrix rho = gibbs_density(H, beta);
            const double transposed_mean = trace(rho.matrix * H.transpose()).real();
            battery.add("driven ancilla, constant path, amplitude pairing", transposed_mean,
                        1e-8, false,
                        [&] { return thermal_berry_phase_ps(cfam, cpath, beta, drive); });
        }

        {
            const double beta = 0.9;
            RealVector w = lat_frame.gibbs_weights(beta, 0);
            const Complex avg = w(0) * std::polar(1.0, omega / 2.0 - 2.0 * kPi) +
                                w(1) * std::polar(1.0, -omega / 2.0);
            battery.add("interferometric phase, latitude", std::arg(avg), 1e-8, true,
                        [&] { return interferometric_phase_thermal(lat_frame, beta); });
        }

        {
            const double beta = 1.0;
            const double w = kPi / 2.0;
            const SphereLoop loop =
                SphereLoop::latitude(std::acos(1.0 - w / (2.0 * kPi)), K);
            const ComplexMatrix shifter = off_diagonal_phase_shifter(loop, 1.0);
            const DensityMatrix rho = off_diagonal_protocol_density(1.0, beta);
            const double expected_ps = kPi * (1.0 + (std::sin(w) > 0 ? 1.0 : -1.0)) / 2.0;
            const double expected_tv =
                kPi * (1.0 - (std::sin(w) * std::tanh(beta) > 0 ? 1.0 : -1.0)) / 2.0;
            battery.add("off-diagonal protocol, amplitude pairing", expected_ps, 1e-9, true, [&] {
                return generalized_berry_phase_ancilla_only(rho, shifter,
                                                            AncillaConvention::PURIFIED);
            });
            battery.add("off-diagonal protocol, naive pairing", expected_tv, 1e-9, true, [&] {
                return generalized_berry_phase_ancilla_only(rho, shifter,
                                                            AncillaConvention::THERMAL_VACUUM);
            });
            const double ps = generalized_berry_phase_ancilla_only(rho, shifter,
                                                                   AncillaConvention::PURIFIED)
                                  .phase;
            const double tv = generalized_berry_phase_ancilla_only(
                                  rho, shifter, AncillaConvention::THERMAL_VACUUM)
                                  .phase;
            battery.add_scalar("off-diagonal protocol, convention split", circular_distance(ps, tv),
                               kPi, 1e-9);
        }

        {
            const double beta = 0.8;
            const AdiabaticTransporters tp = adiabatic_transporters(lat_frame);
            const ComplexMatrix H0 = lat_family.hamiltonian(lat_path.samples.front());
            const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
            const CompositeState ps0 = purify(gibbs_density(H0, beta), one);
            const CompositeState tv0 = thermal_vacuum(H0, beta, one);
            battery.add("dual transport, amplitude pairing", 0.0, 1e-8, true, [&] {
                return generalized_berry_phase(ps0, tp.u1.back(), tp.u2_tilde.back());
            });
            battery.add("dual transport, naive pairing", 0.0, 1e-8, true, [&] {
                return generalized_berry_phase(tv0, tp.u1.back(), tp.u2_tilde.back());
            });
            const double cancel =
                std::abs(dynamical_phase(lat_frame, beta, DynamicalSide::SYSTEM) +
                         dynamical_phase(lat_frame, beta, DynamicalSide::ANCILLA));
            battery.add_scalar("dynamical phase cancellation", cancel, 0.0, 1e-8);
        }

        {
            const double beta = 1.5;
            const TwoLevelParams p{1.0, 0.7, 0.3};
            const ComplexMatrix U = u_beta(p, beta);
            battery.add_scalar("thermal rotation unitarity", unitarity_residual(U), 0.0, 1e-10);

            const ComplexMatrix frame_rot = u1_rotation(p.theta, p.phi);
            const StateVector ground = kron(frame_rot.col(1), frame_rot.col(1));
            const double z = std::exp(beta) + std::exp(-beta);
            const StateVector target = std::sqrt(std::exp(beta) / z) *
                                           StateVector(kron(frame_rot.col(1), frame_rot.col(1))) +
                                       std::sqrt(std::exp(-beta) / z) *
                                           StateVector(kron(frame_rot.col(0), frame_rot.col(0)));
            const double fidelity = std::abs(Complex(target.adjoint() * (U * ground)));
            battery.add_scalar("thermal rotation fidelity", fidelity, 1.0, 1e-9);

            const double xi = thermal_mixing_angle(beta);
            std::ostringstream note;
            note << "mixing-angle coefficient ratio: numeric solve gives tan(xi) = "
                 << fmt_sci(std::tan(xi)) << " (= e^(-beta R) at beta R = 1.5); the e^(beta R/2) "
                 << "convention would give " << fmt_sci(std::exp(beta / 2.0))
                 << "; both values reported, neither adjusted";
            battery.note(note.str());
        }

        {
            const BlochVector x{0.3, -0.5, 0.2};
            BlochVector a{1.0 / 3.0, 2.0 / 3.0, -2.0 / 3.0};
            const BlochVector rotated = bloch_rotate(x, a);
            const ComplexMatrix U =
                (pauli(0) -
                 Complex(0, 1) * (a.x * pauli(1) + a.y * pauli(2) + a.z * pauli(3))) /
                std::sqrt(2.0);
            const DensityMatrix conjugated =
                density_from_matrix(U * density_from_bloch(x).matrix * U.adjoint());
            const BlochVector oracle = bloch_from_density(conjugated);
            const double diff = std::hypot(rotated.x - oracle.x, rotated.y - oracle.y,
                                           rotated.z - oracle.z);
            battery.add_scalar("bloch rotation vs conjugation", diff, 0.0, 1e-10);
            battery.add_scalar("bloch rotation preserves radius", rotated.norm(), x.norm(),
                               1e-12);
        }

        {
            const double beta = 1.0;
            const double lam_lower = 1.0 / (1.0 + std::exp(-2.0 * beta));
            const double lam_upper = 1.0 - lam_lower;
            const PhaseResult tb = thermal_berry_phase_tv(lat_family, lat_path, beta);
            const double from_phase = (tb.raw_accumulated + 4.0 * kPi * lam_lower) / omega;
            std::ostringstream note;
            note << "shell radius candidates at beta R = 1: weight difference "
                 << fmt_sci(lam_upper - lam_lower) << ", holonomy slope " << fmt_sci(from_phase)
                 << "; signs disagree by " << fmt_sci(std::abs((lam_upper - lam_lower) - from_phase))
                 << "; both values reported, neither adjusted";
            battery.note(note.str());
        }

        return battery.report(out);
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    }
}

int presets_command(const std::string& name, std::ostream& out, std::ostream& err) {
    const char* text = preset_config(name);
    if (text == nullptr) {
        err << "unknown preset '" << name << "' (available: fig1, example51, null-theorem)\n";
        return 2;
    }
    out << text;
    return 0;
}

} // namespace phase
