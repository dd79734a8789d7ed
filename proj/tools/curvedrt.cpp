// Command-line driver for the curved-boundary mixed finite element engine.
#include "curvedrt/analysis.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

using namespace curvedrt;

namespace {

struct LevelRange {
    int lo = 2, hi = 4;
};

LevelRange parse_levels(const std::string& s) {
    auto pos = s.find("..");
    LevelRange r;
    try {
        if (pos == std::string::npos) {
            r.lo = r.hi = std::stoi(s);
        } else {
            r.lo = std::stoi(s.substr(0, pos));
            r.hi = std::stoi(s.substr(pos + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("cannot parse level range '" + s + "'");
    }
    if (r.lo < 1 || r.hi < r.lo)
        throw ConfigError("bad level range '" + s + "'");
    return r;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-")
        return std::cout;
    file.open(path);
    if (!file)
        throw ConfigError("cannot open output file '" + path + "'");
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed finite elements with boundary-fitted trial fluxes"};
    app.require_subcommand(1);

    if (const char* env = std::getenv("CURVEDRT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0)
            Eigen::setNbThreads(n);
    }

    std::string case_name = "annulus-quarter";
    std::string out_path, mesh_path, domain_path, format = "csv";
    std::string rhs_mode = "quadrature", trial_mode = "fitted", target = "trial";
    std::string levels = "2..4";
    int k = 0, L = 4;
    bool dry_run = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--case", case_name, "built-in problem")
            ->check(CLI::IsMember(case_names()));
        sub->add_option("-k,--degree", k, "polynomial degree (>= 0)");
        sub->add_option("-o,--out", out_path, "output file ('-' = stdout)");
        sub->add_flag("--dry-run", dry_run, "print the plan and exit");
    };

    auto* cmesh = app.add_subcommand("mesh-gen", "generate a mesh for a built-in case");
    add_common(cmesh);
    cmesh->add_option("--grid", L, "grid parameter (cells per unit side)");
    std::string domain_out;
    cmesh->add_option("--domain-out", domain_out, "also write the boundary description");

    auto* csolve = app.add_subcommand("solve", "solve one problem and dump the solution");
    add_common(csolve);
    csolve->add_option("--levels", levels, "refinement level m (mesh parameter 2^m)");
    csolve->add_option("--mesh", mesh_path, "mesh file instead of a generated mesh");
    csolve->add_option("--domain", domain_path, "boundary description for --mesh");
    csolve->add_option("--rhs", rhs_mode, "right-hand side treatment")
        ->check(CLI::IsMember({"quadrature", "lattice"}));
    csolve->add_option("--trial", trial_mode, "trial space")
        ->check(CLI::IsMember({"fitted", "polygonal"}));

    auto* cconv = app.add_subcommand("convergence", "error table over a level range");
    add_common(cconv);
    cconv->add_option("--levels", levels, "level range m0..m1 (mesh parameter 2^m)");
    cconv->add_option("--format", format, "table format")
        ->check(CLI::IsMember({"csv", "md"}));
    cconv->add_option("--rhs", rhs_mode, "right-hand side treatment")
        ->check(CLI::IsMember({"quadrature", "lattice"}));
    cconv->add_option("--trial", trial_mode, "trial space")
        ->check(CLI::IsMember({"fitted", "polygonal"}));

    auto* cinterp = app.add_subcommand("interp", "interpolation error study");
    add_common(cinterp);
    cinterp->add_option("--levels", levels, "level range m0..m1");
    cinterp->add_option("--target", target, "which interpolant")
        ->check(CLI::IsMember({"test", "trial"}));
    cinterp->add_option("--format", format, "table format")
        ->check(CLI::IsMember({"csv", "md"}));

    auto* cinfsup = app.add_subcommand("infsup", "discrete stability constant per level");
    add_common(cinfsup);
    cinfsup->add_option("--levels", levels, "level range m0..m1");

    auto* cresid = app.add_subcommand(
        "residual", "consistency residual on the Dirichlet boundary per level");
    add_common(cresid);
    cresid->add_option("--levels", levels, "level range m0..m1");

    CLI11_PARSE(app, argc, argv);

    try {
        if (k < 0)
            throw ConfigError("degree must be >= 0");
        LevelRange lr = parse_levels(levels);
        std::ofstream file;

        if (cmesh->parsed()) {
            if (dry_run) {
                std::cout << "plan: generate mesh, case=" << case_name << " grid=" << L
                          << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            Mesh mesh = c.name == "annulus-quarter" ? generate_quarter_annulus(L)
                        : c.name == "disk-dirichlet"
                            ? generate_unit_disk(L)
                            : [&] {
                                  Mesh s = generate_unit_square(L);
                                  assign_boundary(s, c.domain);
                                  return s;
                              }();
            mesh.validate();
            write_mesh(open_out(file, out_path), mesh);
            if (!domain_out.empty())
                write_domain_file(domain_out, c.domain);
        } else if (csolve->parsed()) {
            if (dry_run) {
                std::cout << "plan: solve, case=" << case_name << " k=" << k
                          << " level=" << lr.lo << " rhs=" << rhs_mode
                          << " trial=" << trial_mode << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            Mesh mesh;
            DomainBoundary domain = c.domain;
            if (!mesh_path.empty()) {
                mesh = read_mesh_file(mesh_path);
                if (!domain_path.empty())
                    domain = read_domain_file(domain_path);
                assign_boundary(mesh, domain);
            } else {
                mesh = c.make_mesh(lr.lo);
            }
            mesh.validate();
            Discretization d = discretize(mesh, domain, k,
                                          trial_mode == "fitted"
                                              ? TrialMode::BoundaryFitted
                                              : TrialMode::Polygonal);
            MixedSystem sys = assemble(d, c.f,
                                       rhs_mode == "quadrature"
                                           ? RhsMode::ExactQuadrature
                                           : RhsMode::LatticeInterpolation);
            Solution sol = solve(d, sys);
            ErrorReport err = compute_errors(d, sol, c.u, c.p, c.div_p);
            std::ostream& out = open_out(file, out_path);
            write_solution(out, d, sol);
            std::cerr << "h=" << err.h << " l2_u=" << err.l2_u << " l2_p=" << err.l2_p
                      << " l2_div=" << err.l2_div << " max_u=" << err.dofmax_u
                      << " max_p=" << err.dofmax_p << "\n";
        } else if (cconv->parsed()) {
            if (dry_run) {
                std::cout << "plan: convergence, case=" << case_name << " k=" << k
                          << " levels=" << lr.lo << ".." << lr.hi << " rhs=" << rhs_mode
                          << " trial=" << trial_mode << " format=" << format << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            ConvergenceTable tab = convergence_study(
                c, k, lr.lo, lr.hi,
                rhs_mode == "quadrature" ? RhsMode::ExactQuadrature
                                         : RhsMode::LatticeInterpolation,
                trial_mode == "fitted" ? TrialMode::BoundaryFitted
                                       : TrialMode::Polygonal);
            std::ostream& out = open_out(file, out_path);
            if (format == "csv")
                write_csv(out, tab);
            else
                write_markdown(out, tab);
        } else if (cinterp->parsed()) {
            if (dry_run) {
                std::cout << "plan: interp, case=" << case_name << " k=" << k
                          << " levels=" << lr.lo << ".." << lr.hi
                          << " target=" << target << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            ConvergenceTable tab = interpolation_study(
                c, k, lr.lo, lr.hi,
                target == "test" ? InterpTarget::Test : InterpTarget::Trial);
            std::ostream& out = open_out(file, out_path);
            if (format == "csv")
                write_csv(out, tab);
            else
                write_markdown(out, tab);
        } else if (cinfsup->parsed()) {
            if (dry_run) {
                std::cout << "plan: infsup, case=" << case_name << " k=" << k
                          << " levels=" << lr.lo << ".." << lr.hi << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            write_probe_csv(open_out(file, out_path), infsup_probe(c, k, lr.lo, lr.hi));
        } else if (cresid->parsed()) {
            if (dry_run) {
                std::cout << "plan: residual, case=" << case_name << " k=" << k
                          << " levels=" << lr.lo << ".." << lr.hi << "\n";
                return 0;
            }
            TestCase c = make_case(case_name);
            write_probe_csv(open_out(file, out_path),
                            dirichlet_residual_probe(c, k, lr.lo, lr.hi));
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NoIntersection& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const NonConvergence& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const IllConditioned& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const ThreeBoundaryVertices& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const SingularSystem& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
