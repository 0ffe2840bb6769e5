#include "smoothext_cli/commands.hpp"

#include <smoothext/analysis.hpp>
#include <smoothext/bench.hpp>
#include <smoothext/error.hpp>
#include <smoothext/mesh.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace smoothext::cli {

namespace {

struct OptimizerFlags {
    std::string preset = "default";
    std::optional<std::string> method;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<int> memory;
    std::optional<int> line_search;

    void attach(CLI::App& app) {
        app.add_option("--preset", preset, "Optimizer preset")->check(CLI::IsMember({"default", "paper-freefem"}));
        app.add_option("--method", method, "Optimizer method")->check(CLI::IsMember({"lbfgs", "cg"}));
        app.add_option("--tol", tol, "Relative gradient tolerance");
        app.add_option("--max-iter", max_iter, "Maximum optimizer iterations");
        app.add_option("--memory", memory, "Quasi-Newton memory depth");
        app.add_option("--line-search", line_search, "Maximum line-search steps");
    }

    [[nodiscard]] OptimizerOptions build() const {
        OptimizerOptions o = OptimizerOptions::preset(preset);
        if (method) o.method = parse_method(*method);
        if (tol) o.tolerance = *tol;
        if (max_iter) o.max_iterations = *max_iter;
        if (memory) o.memory = *memory;
        if (line_search) o.max_line_search = *line_search;
        o.validate();
        return o;
    }
};

struct CaseFlags {
    std::string name = "flat";
    double kappa = 0.0;
    std::optional<double> C;
    std::optional<double> q;

    void attach(CLI::App& app) {
        app.add_option("--case", name, "Manufactured case")->check(CLI::IsMember({"flat", "circular", "corner"}));
        app.add_option("--kappa", kappa, "Contrast eps2/eps1")->required();
        app.add_option("--C", C, "Regularization constant C in lambda = C h^q");
        app.add_option("--q", q, "Regularization exponent q");
    }

    [[nodiscard]] ManufacturedCase build(std::ostream& err) const {
        ManufacturedCase c = make_case(parse_case(name), kappa);
        if (C) c.schedule.C = *C;
        if (q) c.schedule.q = *q;
        if (auto warning = check_schedule(c.schedule)) err << *warning << '\n';
        return c;
    }
};

Geometry parse_geometry(const std::string& g) {
    if (g == "square-split") return Geometry::square_split;
    if (g == "disk-annulus") return Geometry::disk_annulus;
    if (g == "corner") return Geometry::corner_halfdisk;
    throw InvalidArgument(fmt::format("unknown geometry '{}'", g));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path));
    f << content;
    if (!f) throw Error(fmt::format("failed writing '{}'", path));
}

std::string fmt_interval(const OpenInterval& i) { return fmt::format("({:g},{:.4g})", i.lower, i.upper); }

void print_report(std::ostream& out, const Mesh& mesh, const MeshQualityReport& r) {
    out << fmt::format("vertices={}\n", mesh.vertex_count());
    out << fmt::format("triangles={}\n", mesh.triangle_count());
    out << fmt::format("h={:.6g}\n", mesh.meshsize());
    out << fmt::format("min_angle_deg={:.6g}\n", r.min_angle * 180.0 / 3.14159265358979323846);
    out << fmt::format("max_aspect_ratio={:.6g}\n", r.max_aspect_ratio);
    out << fmt::format("interface_edges={}\n", r.interface_edge_count);
    out << fmt::format("conforming={}\n", r.conforming ? "true" : "false");
    for (const auto& issue : r.issues) out << "issue=" << issue << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sign-changing transmission problems by smooth extension"};
    app.require_subcommand(1);

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "Generate a mesh and print its quality report");
    std::string geom = "square-split";
    int mesh_n = 4;
    int refine = 0;
    std::string mesh_out;
    mesh_cmd->add_option("--geom", geom, "Geometry")->check(CLI::IsMember({"square-split", "disk-annulus", "corner"}));
    mesh_cmd->add_option("--n", mesh_n, "Resolution");
    mesh_cmd->add_option("--refine", refine, "Uniform refinements after generation")->check(CLI::NonNegativeNumber);
    mesh_cmd->add_option("--out", mesh_out, "Output mesh file");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Well-posedness of a contrast");
    analyze_cmd->require_subcommand(1);
    auto* annulus_cmd = analyze_cmd->add_subcommand("annulus", "Disk in annulus");
    auto* corner_cmd = analyze_cmd->add_subcommand("corner", "Corner of angle pi/4 in a half disk");
    double akappa = 0.0;
    double atol = 1e-9;
    annulus_cmd->add_option("--kappa", akappa, "Contrast eps2/eps1")->required();
    annulus_cmd->add_option("--tol", atol, "Membership tolerance");
    corner_cmd->add_option("--kappa", akappa, "Contrast eps2/eps1")->required();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Solve one manufactured case on one mesh");
    CaseFlags solve_case;
    OptimizerFlags solve_opt;
    int solve_n = 0;
    std::string solve_mesh;
    std::string solve_out;
    std::string solve_history;
    solve_case.attach(*solve_cmd);
    solve_opt.attach(*solve_cmd);
    solve_cmd->add_option("--n", solve_n, "Mesh resolution (default: case base resolution)");
    solve_cmd->add_option("--mesh", solve_mesh, "Read the mesh from a file instead");
    solve_cmd->add_option("--out", solve_out, "Solution file, one 'x y value' line per vertex");
    solve_cmd->add_option("--history", solve_history, "Iteration history CSV");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Convergence study of a manufactured case");
    CaseFlags bench_case;
    OptimizerFlags bench_opt;
    int levels = 4;
    int base = 0;
    std::string bench_out;
    bench_case.attach(*bench_cmd);
    bench_opt.attach(*bench_cmd);
    bench_cmd->add_option("--levels", levels, "Number of levels (>= 3)");
    bench_cmd->add_option("--base", base, "Coarsest resolution (default: case preset)");
    bench_cmd->add_option("--out", bench_out, "Report CSV (default: print to stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (mesh_cmd->parsed()) {
            Mesh mesh;
            switch (parse_geometry(geom)) {
                case Geometry::square_split: mesh = generate_square_split(mesh_n); break;
                case Geometry::disk_annulus: mesh = generate_disk_annulus(mesh_n); break;
                default: mesh = generate_corner_halfdisk(mesh_n); break;
            }
            for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
            const auto report = validate(mesh);
            if (!mesh_out.empty()) write_file(mesh_out, write_mesh(mesh));
            print_report(out, mesh, report);
            return report.conforming && report.issues.empty() ? 0 : 1;
        }
        if (analyze_cmd->parsed()) {
            if (annulus_cmd->parsed()) {
                const auto v = annulus_wellposed(akappa, atol);
                out << fmt::format("geometry=annulus\nkappa={:g}\nverdict={}\ndistance={:.6g}\n", akappa,
                                   to_string(v.verdict), v.distance);
                if (v.verdict == Verdict::well_posed) {
                    out << fmt::format("sigma_D=1\nq_interval={}\n", fmt_interval(recommended_q(1.0, 1.0)));
                }
            } else {
                const auto v = corner_wellposed(akappa);
                out << fmt::format("geometry=corner\nkappa={:g}\nverdict={}\ndistance={:.6g}\n", akappa,
                                   to_string(v.verdict), v.distance);
                if (v.sigma_d) {
                    out << fmt::format("sigma_D={:.6f}\nq_interval={}\n", *v.sigma_d,
                                       fmt_interval(recommended_q(*v.sigma_d, 1.0)));
                }
            }
            return 0;
        }
        if (solve_cmd->parsed()) {
            const ManufacturedCase c = solve_case.build(err);
            const OptimizerOptions opts = solve_opt.build();
            std::shared_ptr<const Mesh> mesh;
            if (!solve_mesh.empty()) {
                mesh = std::make_shared<const Mesh>(read_mesh(read_file(solve_mesh)));
            } else {
                mesh = std::make_shared<const Mesh>(c.make_mesh(solve_n > 0 ? solve_n : c.default_base));
            }
            const auto ops = prepare(c.problem(), mesh);
            const double lambda = lambda_of(c.schedule, ops.h);
            const auto result = minimize(ops, lambda, Control(ops.control_size(), 0.0), opts);
            const auto errs = composite_errors(ops, result.state, c.exact, degree7_rule());
            const auto& last = result.history.records.back();
            if (!solve_out.empty()) {
                std::ostringstream sol;
                write_solution(sol, ops, result.state);
                write_file(solve_out, sol.str());
            }
            if (!solve_history.empty()) write_file(solve_history, result.history.to_csv());
            out << fmt::format("case={}\nkappa={:g}\nh={:.6g}\nN={}\nlambda={:.6g}\n", to_string(c.name), c.kappa,
                               ops.h, mesh->vertex_count(), lambda);
            out << fmt::format("method={}\niterations={}\ntermination={}\n", to_string(opts.method),
                               result.history.iterations(), to_string(result.history.reason));
            out << fmt::format("cost={:.10g}\nmisfit={:.10g}\ncontrol_norm={:.10g}\n", last.cost, last.misfit,
                               control_norm(ops, result.w));
            out << fmt::format("relL2={:.6g}\nrelH1={:.6g}\n", errs.relative_l2, errs.relative_h1);
            return 0;
        }
        if (bench_cmd->parsed()) {
            const ManufacturedCase c = bench_case.build(err);
            const OptimizerOptions opts = bench_opt.build();
            const auto report = run_convergence(c, levels, base, opts);
            const std::string csv = report.to_csv();
            if (bench_out.empty()) {
                out << csv;
            } else {
                write_file(bench_out, csv);
            }
            out << fmt::format("rate_L2={:.4f}\nrate_H1={:.4f}\n", report.rate_l2.slope, report.rate_h1.slope);
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace smoothext::cli
