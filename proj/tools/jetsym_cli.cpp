#include <jetsym/casebook.hpp>
#include <jetsym/maxsym.hpp>
#include <jetsym/noether.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace jetsym;

namespace
{

// Thrown for inputs that violate a subcommand contract; maps to exit 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

source_context context_for(const std::optional<std::string> &q)
{
    if (!q) {
        return source_context::symbolic();
    }
    auto e = parse(*q);
    if (e.is_zero()) {
        return source_context::canonical();
    }
    for (auto a : free_atoms(e)) {
        if (a.kind() != atom_kind::indep && a.kind() != atom_kind::param) {
            throw usage_error("--q must be a function of x alone");
        }
    }
    return source_context::with_q(e);
}

vector_field parse_vf(const std::string &text, const parse_options &opts = {})
{
    auto semi = text.find(';');
    if (semi == std::string::npos) {
        throw usage_error("vector field must be written \"<xi>;<psi>\"");
    }
    return make_vector_field(parse(text.substr(0, semi), opts), parse(text.substr(semi + 1), opts));
}

point_transformation parse_map(const std::string &text)
{
    std::optional<expr> z, w;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(';', start);
        auto part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        auto eq = part.find('=');
        if (eq == std::string::npos) {
            throw usage_error("map must be written \"z=<expr>; w=<expr>\"");
        }
        auto lhs = part.substr(0, eq);
        lhs.erase(std::remove_if(lhs.begin(), lhs.end(), ::isspace), lhs.end());
        auto rhs = parse(part.substr(eq + 1));
        if (lhs == "z") {
            z = rhs;
        } else if (lhs == "w") {
            w = rhs;
        } else {
            throw usage_error("map components are z and w, got '" + lhs + "'");
        }
        if (end == std::string::npos) {
            break;
        }
        start = end + 1;
    }
    if (!z || !w) {
        throw usage_error("map needs both z and w");
    }
    return make_point_transformation(*z, *w);
}

void print_field(const std::string &name, const vector_field &v, nlohmann::ordered_json *out)
{
    if (out != nullptr) {
        out->push_back({{"name", name}, {"xi", to_string(v.xi)}, {"psi", to_string(v.psi)}});
    } else {
        std::cout << name << ": " << to_string(v.xi) << " ; " << to_string(v.psi) << "\n";
    }
}

int print_verdict(const symmetry_verdict &v)
{
    std::cout << to_string(v.kind) << ": " << (v.holds ? "holds" : "fails") << "\n";
    std::cout << "witness: " << to_string(v.witness) << "\n";
    return v.holds ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"symbolic symmetries, Lagrangians and first integrals of maximal-symmetry ODEs"};
    app.require_subcommand(1);

    int n = 0;
    int order = -1;
    bool json = false;
    std::optional<std::string> q, eq_text, lag_text, vf_text, integral_text, map_text, json_path;
    std::string kind;
    std::string case_id;

    auto *gens = app.add_subcommand("generators", "symmetry generators of the order-n equation");
    gens->add_option("--n", n, "order")->required()->check(CLI::Range(2, 8));
    gens->add_flag("--json", json, "JSON output");
    gens->add_option("--q", q, "q(x); 0 selects the canonical case");

    auto *lode = app.add_subcommand("build-lode", "the order-n linear equation of maximal symmetry");
    lode->add_option("--n", n, "order")->required()->check(CLI::Range(2, 8));
    lode->add_option("--q", q, "q(x); 0 selects the canonical case");

    auto *lag = app.add_subcommand("lagrangian", "Lagrangians of the even-order equation");
    lag->add_option("--n", n, "order")->required()->check(CLI::Range(2, 8));
    lag->add_option("--kind", kind, "canonical|transformed|natural")
        ->required()
        ->check(CLI::IsMember({"canonical", "transformed", "natural"}));
    lag->add_option("--q", q, "q(x); 0 selects the canonical case");

    auto *chk = app.add_subcommand("check", "classify a point vector field");
    chk->add_option("--kind", kind, "lie|variational|divergence")
        ->required()
        ->check(CLI::IsMember({"lie", "variational", "divergence"}));
    chk->add_option("--vf", vf_text, "\"<xi>;<psi>\"")->required();
    auto *eq_opt = chk->add_option("--eq", eq_text, "equation Delta");
    auto *lag_opt = chk->add_option("--lagrangian", lag_text, "Lagrangian density");
    eq_opt->excludes(lag_opt);
    chk->add_option("--order", order, "order of the equation or Lagrangian");
    chk->add_option("--q", q, "q(x); 0 selects the canonical case");

    auto *fi = app.add_subcommand("first-integral", "first integral of a divergence symmetry");
    fi->add_option("--vf", vf_text, "\"<xi>;<psi>\"")->required();
    fi->add_option("--n", n, "order")->required()->check(CLI::Range(2, 8));
    fi->add_option("--q", q, "q(x); 0 selects the canonical case");

    auto *tr = app.add_subcommand("transform", "rewrite source-side objects (in z, w) through a point map");
    tr->add_option("--map", map_text, "\"z=<expr>; w=<expr>\" in x, y")->required();
    auto *t_eq = tr->add_option("--eq", eq_text, "equation in z, w");
    auto *t_lag = tr->add_option("--lagrangian", lag_text, "Lagrangian density in z, w");
    auto *t_vf = tr->add_option("--vf", vf_text, "\"<xi>;<psi>\" in z, w");
    auto *t_int = tr->add_option("--integral", integral_text, "first integral in z, w");
    for (auto *a : {t_eq, t_lag, t_vf, t_int}) {
        for (auto *b : {t_eq, t_lag, t_vf, t_int}) {
            if (a != b) {
                a->excludes(b);
            }
        }
    }

    auto *rep = app.add_subcommand("reproduce", "run reproduction cases");
    rep->add_option("case", case_id, "case id (C1..C7) or all")->required();
    rep->add_option("--json", json_path, "write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gens) {
            auto ctx = context_for(q);
            auto g = q ? reduce(generators(n), ctx) : generators(n);
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto &f : g.fields) {
                print_field(f.name, f.field, json ? &arr : nullptr);
            }
            if (json) {
                nlohmann::ordered_json out;
                out["n"] = n;
                out["generators"] = arr;
                std::cout << out.dump(2) << "\n";
            }
            return 0;
        }
        if (*lode) {
            std::cout << to_string(build_lode(n, context_for(q)).delta) << "\n";
            return 0;
        }
        if (*lag) {
            auto ctx = context_for(q);
            lagrangian l = kind == "canonical"     ? canonical_lagrangian(n)
                           : kind == "transformed" ? transformed_lagrangian(n, ctx)
                                                   : natural_lagrangian(n, ctx);
            std::cout << to_string(l.density, {kind == "canonical"}) << "\n";
            return 0;
        }
        if (*chk) {
            if (order < 0) {
                throw usage_error("--order is required with --eq or --lagrangian");
            }
            auto ctx = context_for(q);
            auto v = parse_vf(*vf_text);
            if (kind == "variational") {
                if (!lag_text) {
                    throw usage_error("variational check needs --lagrangian");
                }
                return print_verdict(variational_check(v, make_lagrangian(parse(*lag_text), order), ctx));
            }
            if (!eq_text) {
                throw usage_error(kind + " check needs --eq");
            }
            auto eq = make_diff_eq(parse(*eq_text));
            if (eq.order != order) {
                throw usage_error("equation has order " + std::to_string(eq.order) + ", --order says " +
                                  std::to_string(order));
            }
            return print_verdict(kind == "lie" ? lie_symmetry_check(v, eq, ctx) : divergence_check(v, eq, ctx));
        }
        if (*fi) {
            auto ctx = context_for(q);
            auto r = first_integral(parse_vf(*vf_text), build_lode(n, ctx), ctx);
            std::cout << to_string(r.integral) << "\n";
            return 0;
        }
        if (*tr) {
            auto s = parse_map(*map_text);
            const parse_options src{true};
            if (eq_text) {
                std::cout << to_string(transform_equation(parse(*eq_text, src), s)) << "\n";
            } else if (lag_text) {
                std::cout << to_string(transform_lagrangian(make_lagrangian(parse(*lag_text, src)), s).density)
                          << "\n";
            } else if (vf_text) {
                auto v = pushforward(parse_vf(*vf_text, src), s);
                std::cout << to_string(v.xi) << " ; " << to_string(v.psi) << "\n";
            } else if (integral_text) {
                std::cout << to_string(transform_first_integral(parse(*integral_text, src), s)) << "\n";
            } else {
                throw usage_error("transform needs one of --eq, --lagrangian, --vf, --integral");
            }
            return 0;
        }
        if (*rep) {
            std::vector<case_report> reports;
            if (case_id == "all") {
                reports = run_all_cases();
            } else {
                reports.push_back(run_case(case_id));
            }
            std::cout << emit_reports(reports, report_format::text);
            if (json_path) {
                std::ofstream out(*json_path);
                if (!out) {
                    throw usage_error("cannot write " + *json_path);
                }
                out << (reports.size() == 1 ? emit_report(reports.front(), report_format::json)
                                            : emit_reports(reports, report_format::json))
                    << "\n";
            }
            bool ok = std::all_of(reports.begin(), reports.end(), [](const auto &r) { return r.all_verified(); });
            return ok ? 0 : 1;
        }
    } catch (const usage_error &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const parse_error &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_argument &e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const bad_order &e) {
        std::cerr << "bad order: " << e.what() << "\n";
        return 2;
    } catch (const odd_order &e) {
        std::cerr << "odd order: " << e.what() << "\n";
        return 2;
    } catch (const error &e) {
        std::cerr << "refuted: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
