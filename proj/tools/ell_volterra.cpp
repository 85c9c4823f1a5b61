// ell-volterra: command-line front end for the ellvolterra library.
//
// Exit codes: 0 success, 1 invalid operator / parameters / files, 2 usage error.

#include <CLI11/CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ellvolterra/ellvolterra.hpp"
#include "ellvolterra/io.hpp"

namespace ev = ellvolterra;
using ev::io::json;

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return ev::io::read_text_file(path);
}

ev::CubicMatrix load_operator(const std::string& path) {
    const json j = ev::io::parse_json_text(read_input(path), path == "-" ? "<stdin>" : path);
    return ev::io::operator_from_json(j);
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        ev::io::write_text_file(out, text);
}

/// 1-based "2,3" -> 0-based {1, 2}.
std::vector<std::size_t> parse_cycle(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            throw ev::SpecError("bad cycle index '" + tok + "'");
        }
        if (pos != tok.size() || v < 1) throw ev::SpecError("bad cycle index '" + tok + "'");
        out.push_back(static_cast<std::size_t>(v - 1));
    }
    return out;
}

/// Points c / (n - 1) for every composition c of n - 1 into m nonnegative parts, lexicographic.
std::vector<ev::SimplexPoint> portrait_grid(std::size_t m, std::size_t n) {
    std::vector<ev::SimplexPoint> out;
    if (n == 1) {
        out.push_back(ev::SimplexPoint::barycenter(m));
        return out;
    }
    const std::size_t total = n - 1;
    std::vector<std::size_t> c(m, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos + 1 == m) {
            c[pos] = left;
            Eigen::VectorXd x(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i)
                x(static_cast<Eigen::Index>(i)) = static_cast<double>(c[i]) / static_cast<double>(total);
            out.emplace_back(x);
            return;
        }
        for (std::size_t v = left + 1; v-- > 0;) {
            c[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, total);
    return out;
}

json operator_report(const ev::CubicMatrix& v, const json& report) {
    json out = report;
    out["operator"] = ev::io::operator_to_json(v);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis tools for l-Volterra quadratic stochastic operators"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string file;
    std::string out;

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check an operator JSON file ('-' reads stdin)");
    validate_cmd->add_option("file", file, "Operator JSON")->required();

    // classify
    bool check_invariance = false;
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    auto* classify_cmd = app.add_subcommand("classify", "Detect the class l of an operator");
    classify_cmd->add_option("file", file, "Operator JSON")->required();
    classify_cmd->add_flag("--check-invariance", check_invariance,
                           "Sample face and positivity invariance on the Volterra coordinates");
    classify_cmd->add_option("--samples", samples, "Sample points per check")->check(CLI::PositiveNumber);
    classify_cmd->add_option("--seed", seed, "Sampling seed");

    // apply
    std::string point;
    auto* apply_cmd = app.add_subcommand("apply", "Image of one point");
    apply_cmd->add_option("file", file, "Operator JSON")->required();
    apply_cmd->add_option("--x", point, "Point, comma separated")->required();

    // orbit
    std::size_t steps = 100;
    std::string format = "csv";
    auto* orbit_cmd = app.add_subcommand("orbit", "Iterate from a starting point");
    orbit_cmd->add_option("file", file, "Operator JSON")->required();
    orbit_cmd->add_option("--x0", point, "Starting point, comma separated")->required();
    orbit_cmd->add_option("--n", steps, "Number of steps");
    orbit_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    orbit_cmd->add_option("--out", out, "Output path (default stdout)");

    // fixed-points
    std::size_t grid = 20;
    auto* fixed_cmd = app.add_subcommand("fixed-points", "Multistart Newton search for fixed points");
    fixed_cmd->add_option("file", file, "Operator JSON")->required();
    fixed_cmd->add_option("--grid", grid, "Barycentric grid density for Newton starts")->check(CLI::PositiveNumber);

    // cycles
    std::size_t burn_in = 1000;
    std::size_t max_period = 16;
    std::size_t window = 64;
    auto* cycles_cmd = app.add_subcommand("cycles", "Detect periodic orbits (from every vertex unless --x0 is given)");
    cycles_cmd->add_option("file", file, "Operator JSON")->required();
    cycles_cmd->add_option("--x0", point, "Starting point, comma separated");
    cycles_cmd->add_option("--burn-in", burn_in, "Steps discarded before looking for a return");
    cycles_cmd->add_option("--max-period", max_period, "Largest period tried")->check(CLI::Range(2, 100000));

    // extremals
    std::size_t m = 3;
    std::size_t ell = 0;
    bool all_classes = false;
    auto* ext_cmd = app.add_subcommand("extremals", "Extremal (0/1) operators");
    ext_cmd->require_subcommand(1);
    auto* count_cmd = ext_cmd->add_subcommand("count", "Number of extremal operators");
    count_cmd->add_option("--m", m, "Number of species")->required();
    count_cmd->add_option("--ell", ell, "Class l");
    count_cmd->add_flag("--all", all_classes, "Table over l = m..0 plus the unconstrained count");
    auto* enum_cmd = ext_cmd->add_subcommand("enumerate", "Write every extremal operator (m <= 4)");
    enum_cmd->add_option("--m", m, "Number of species")->required();
    enum_cmd->add_option("--ell", ell, "Class l")->required();
    enum_cmd->add_option("--out", out, "Directory for one JSON file per operator (default: JSON lines on stdout)");

    // family
    bool analyze = false;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double a2b_tol = 0.0;
    std::vector<std::string> cycle_args;
    auto* family_cmd = app.add_subcommand("family", "Construct operators from the built-in families");
    family_cmd->require_subcommand(1);
    auto* fam_cycle = family_cmd->add_subcommand("cycle", "Class-l operator with prescribed vertex cycles");
    fam_cycle->add_option("--m", m, "Number of species")->required();
    fam_cycle->add_option("--ell", ell, "Class l")->required();
    fam_cycle->add_option("--cycle", cycle_args, "Cycle as 1-based indices in visiting order, e.g. 2,3 (repeatable)");
    fam_cycle->add_flag("--analyze", analyze, "Emit a report with the detected periods");
    fam_cycle->add_option("--out", out, "Also write the operator JSON here");
    auto* fam_m2 = family_cmd->add_subcommand("m2", "Two-species class-1 family");
    fam_m2->add_option("--a", a, "P_{11,1}")->required();
    fam_m2->add_option("--c", c, "P_{12,1}")->required();
    fam_m2->add_flag("--analyze", analyze, "Emit the fixed-point report");
    fam_m2->add_option("--out", out, "Also write the operator JSON here");
    auto* fam_m3 = family_cmd->add_subcommand("m3", "Symmetric three-species class-2 family");
    fam_m3->add_option("--a", a, "P_{11,1} = P_{22,2}")->required();
    fam_m3->add_option("--b", b, "P_{12,1} = P_{12,2}")->required();
    fam_m3->add_option("--c", c, "P_{13,1} = P_{23,2}")->required();
    fam_m3->add_option("--a2b-tolerance", a2b_tol, "Treat |a - 2b| <= tol as a = 2b");
    fam_m3->add_flag("--analyze", analyze, "Emit the regime report");
    fam_m3->add_option("--out", out, "Also write the operator JSON here");

    // portrait
    std::size_t threads = 0;
    std::size_t portrait_grid_n = 20;
    double radius = 1e-7;
    auto* portrait_cmd = app.add_subcommand("portrait", "Label a barycentric grid of starts by their limit set (CSV)");
    portrait_cmd->add_option("file", file, "Operator JSON")->required();
    portrait_cmd->add_option("--grid", portrait_grid_n, "Points per edge")->check(CLI::PositiveNumber);
    portrait_cmd->add_option("--burn-in", burn_in, "Steps before the limit window");
    portrait_cmd->add_option("--window", window, "Window length for clustering")->check(CLI::Range(2, 1000000));
    portrait_cmd->add_option("--radius", radius, "Cluster radius");
    portrait_cmd->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
    portrait_cmd->add_option("--out", out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            const json j = ev::io::parse_json_text(read_input(file), file);
            try {
                const ev::CubicMatrix v = ev::io::operator_from_json(j);
                std::cout << ev::io::dump(json{{"schema", ev::io::kSchemaVersion}, {"valid", true}, {"m", v.m()}});
            } catch (const ev::ValidationError& e) {
                json list = json::array();
                for (const auto& x : e.violations()) list.push_back(x.describe());
                std::cout << ev::io::dump(json{{"schema", ev::io::kSchemaVersion}, {"valid", false}, {"violations", list}});
                return 1;
            }
        } else if (*classify_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            const auto cls = ev::detect_ell(v);
            json report = ev::io::to_json(cls);
            if (check_invariance) {
                json faces = json::array();
                // every subset of the Volterra prefix while that stays small, else the singletons and the prefix
                std::vector<ev::IndexSet> sets;
                if (cls.ell <= 8) {
                    for (std::size_t mask = 1; mask < (std::size_t{1} << cls.ell); ++mask) {
                        ev::IndexSet s;
                        for (std::size_t i = 0; i < cls.ell; ++i)
                            if (mask & (std::size_t{1} << i)) s.push_back(i);
                        sets.push_back(std::move(s));
                    }
                } else {
                    for (std::size_t i = 0; i < cls.ell; ++i) sets.push_back({i});
                    sets.push_back(cls.volterra_coords);
                }
                bool all_hold = true;
                for (const auto& s : sets) {
                    const auto chk = ev::check_face_invariance(v, s, samples, seed);
                    all_hold = all_hold && chk.holds;
                    json f = ev::io::to_json(chk);
                    f["face"] = ev::io::indices_to_json(s);
                    faces.push_back(std::move(f));
                }
                const ev::IndexSet pos = ev::positive_self_coords(v, cls.ell);
                json p = ev::io::to_json(ev::check_positivity_invariance(v, pos, samples, seed));
                p["coords"] = ev::io::indices_to_json(pos);
                report["face_invariance"] = json{{"all_hold", all_hold}, {"faces", std::move(faces)}};
                report["positivity_invariance"] = std::move(p);
                report["seed"] = seed;
            }
            std::cout << ev::io::dump(report);
        } else if (*apply_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            const ev::SimplexPoint x = ev::io::parse_point(point);
            std::cout << ev::io::dump(json{{"x", ev::io::point_to_json(x)}, {"image", ev::io::point_to_json(ev::apply(v, x))}});
        } else if (*orbit_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            const ev::Orbit o = ev::orbit(v, ev::io::parse_point(point), steps);
            if (format == "csv") {
                std::ostringstream ss;
                ev::io::write_orbit_csv(ss, o);
                emit(ss.str(), out);
            } else {
                json pts = json::array();
                for (const auto& x : o.points) pts.push_back(ev::io::point_to_json(x));
                emit(ev::io::dump(json{{"schema", ev::io::kSchemaVersion}, {"points", std::move(pts)}}), out);
            }
        } else if (*fixed_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            ev::FixedPointOptions opt;
            opt.grid_density = grid;
            std::cout << ev::io::dump(ev::io::to_json(ev::find_fixed_points(v, opt)));
        } else if (*cycles_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            std::vector<ev::SimplexPoint> starts;
            if (!point.empty())
                starts.push_back(ev::io::parse_point(point));
            else
                for (std::size_t i = 0; i < v.m(); ++i) starts.push_back(ev::SimplexPoint::vertex(v.m(), i));
            json list = json::array();
            for (const auto& x0 : starts) {
                const auto cyc = ev::detect_cycle(v, x0, burn_in, max_period);
                json entry{{"start", ev::io::point_to_json(x0)}};
                entry["cycle"] = cyc ? ev::io::to_json(*cyc) : json(nullptr);
                list.push_back(std::move(entry));
            }
            std::cout << ev::io::dump(json{{"schema", ev::io::kSchemaVersion},
                                           {"burn_in", burn_in},
                                           {"max_period", max_period},
                                           {"results", std::move(list)}});
        } else if (*count_cmd) {
            if (all_classes) {
                for (std::size_t l = m + 1; l-- > 0;)
                    std::cout << "ell=" << l << ' ' << ev::extremal_count(m, l) << '\n';
                std::cout << "unconstrained " << ev::extremal_count_unconstrained(m) << '\n';
            } else {
                std::cout << ev::extremal_count(m, ell) << '\n';
            }
        } else if (*enum_cmd) {
            if (m > ev::kMaxEnumerationDim)
                throw ev::SizeGuardExceeded("enumeration is limited to m <= " + std::to_string(ev::kMaxEnumerationDim));
            std::string width_probe = ev::extremal_count(m, ell).str();
            const std::size_t width = width_probe.size();
            if (!out.empty()) std::filesystem::create_directories(out);
            std::size_t index = 0;
            ev::for_each_extremal(m, ell, [&](const std::vector<std::uint8_t>& rows) {
                const ev::ExtremalOperator e{m, rows, 0, false};
                const json j = ev::io::operator_to_json(e.matrix());
                if (out.empty()) {
                    std::cout << j.dump() << '\n';
                } else {
                    std::string name = std::to_string(index);
                    name.insert(0, width - name.size(), '0');
                    ev::io::write_text_file((std::filesystem::path(out) / (name + ".json")).string(), ev::io::dump(j));
                }
                ++index;
            });
            if (!out.empty()) std::cerr << index << " operators written to " << out << '\n';
        } else if (*fam_cycle) {
            ev::CycleSpec spec{m, ell, {}};
            for (const auto& s : cycle_args) spec.cycles.push_back(parse_cycle(s));
            const ev::CubicMatrix v = ev::cycle_family(spec);
            const json op = ev::io::operator_to_json(v);
            if (!out.empty()) ev::io::write_text_file(out, ev::io::dump(op));
            if (analyze) {
                json cyc = json::array();
                for (const auto& cy : spec.cycles) {
                    const auto r = ev::detect_cycle(v, ev::SimplexPoint::vertex(m, cy.front()), 0,
                                                    std::max<std::size_t>(2, cy.size() + 1));
                    json idx = json::array();
                    for (auto i : cy) idx.push_back(i + 1);
                    cyc.push_back(json{{"cycle", idx},
                                       {"detected_period", r ? r->period : (v(cy[0], cy[0], cy[0]) == 1.0 ? 1 : 0)}});
                }
                json report{{"schema", ev::io::kSchemaVersion},
                            {"family", "cycle"},
                            {"classification", ev::io::to_json(ev::detect_ell(v))},
                            {"cycles", std::move(cyc)}};
                std::cout << ev::io::dump(operator_report(v, report));
            } else {
                std::cout << ev::io::dump(op);
            }
        } else if (*fam_m2) {
            const ev::M2Params p{a, c};
            const ev::CubicMatrix v = ev::m2_operator(p);
            const json op = ev::io::operator_to_json(v);
            if (!out.empty()) ev::io::write_text_file(out, ev::io::dump(op));
            std::cout << ev::io::dump(analyze ? operator_report(v, ev::io::to_json(ev::m2_analyze(p))) : op);
        } else if (*fam_m3) {
            const ev::M3SymParams p{a, b, c};
            const ev::CubicMatrix v = ev::m3_operator(p);
            const json op = ev::io::operator_to_json(v);
            if (!out.empty()) ev::io::write_text_file(out, ev::io::dump(op));
            std::cout << ev::io::dump(analyze ? operator_report(v, ev::io::to_json(ev::m3_analyze(p, a2b_tol))) : op);
        } else if (*portrait_cmd) {
            const ev::CubicMatrix v = load_operator(file);
            const std::vector<ev::SimplexPoint> starts = portrait_grid(v.m(), portrait_grid_n);
            std::vector<ev::OmegaLimit> limits(starts.size());
            std::size_t workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
            workers = std::min(workers, starts.size());
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t i = next++; i < starts.size(); i = next++)
                    limits[i] = ev::omega_limit_estimate(v, starts[i], burn_in, window, radius);
            };
            std::vector<std::thread> pool;
            for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
            work();
            for (auto& t : pool) t.join();

            std::ostringstream ss;
            for (std::size_t i = 1; i <= v.m(); ++i) ss << "x0_" << i << ',';
            ss << "limit_type";
            for (std::size_t i = 1; i <= v.m(); ++i) ss << ",limit_" << i;
            ss << '\n';
            for (std::size_t r = 0; r < starts.size(); ++r) {
                for (std::size_t i = 0; i < v.m(); ++i) ss << ev::io::format_double(starts[r][i]) << ',';
                const auto& w = limits[r];
                ss << ev::to_string(w.kind);
                if (w.kind == ev::LimitKind::cycle) ss << '-' << w.period;
                for (std::size_t i = 0; i < v.m(); ++i) ss << ',' << ev::io::format_double(w.representatives.front()[i]);
                ss << '\n';
            }
            emit(ss.str(), out);
        }
    } catch (const ev::ValidationError& e) {
        std::cerr << "invalid operator:";
        for (const auto& x : e.violations()) std::cerr << ' ' << x.describe();
        std::cerr << '\n';
        return 1;
    } catch (const ev::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
