#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "siegel/counting.hpp"
#include "siegel/geometry.hpp"
#include "siegel/oracle.hpp"

using namespace siegel;
using cli::RunConfig;
using cli::Violation;

namespace {

Json mat_json(const Mat& A) {
    Json j = Json::array();
    for (auto& row : A) j.push_back(rationals_json(row));
    return j;
}

Mat mat_from_json(const Json& j) {
    Mat A;
    for (auto& row : j) {
        Vec r;
        for (auto& x : row) r.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Q(x.dump()));
        A.push_back(r);
    }
    return A;
}

void load_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception&) {
        std::cerr << "warning: ignoring unreadable cache " << path << "\n";
        return;
    }
    for (auto& item : j.value("entries", Json::array())) {
        std::vector<OverlatticeEntry> list;
        for (auto& e : item["list"]) {
            OverlatticeEntry o;
            o.key = e["key"].get<std::string>();
            o.basis = mat_from_json(e["basis"]);
            o.gram = mat_from_json(e["gram"]);
            o.ell = e["ell"];
            o.t = e["t"];
            o.chi0 = e["chi0"];
            o.val = e["val"];
            o.rank = e["rank"];
            list.push_back(std::move(o));
        }
        overlattice_cache_insert(item["key"].get<std::string>(), std::move(list));
    }
}

void save_cache(const std::string& path) {
    Json entries = Json::array();
    for (auto& [key, list] : overlattice_cache_snapshot()) {
        Json l = Json::array();
        for (auto& e : *list)
            l.push_back({{"key", e.key},
                         {"basis", mat_json(e.basis)},
                         {"gram", mat_json(e.gram)},
                         {"ell", e.ell},
                         {"t", e.t},
                         {"chi0", e.chi0},
                         {"val", e.val},
                         {"rank", e.rank}});
        entries.push_back({{"key", key}, {"list", l}});
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "warning: cannot write cache " << path << "\n";
        return;
    }
    out << Json{{"version", 1}, {"entries", entries}}.dump() << "\n";
}

void check_report(const Json& out, bool ok) {
    if (!ok) throw Violation{out};
}

QuadLattice need_lattice(const std::string& gram, const PrimeCtx& ctx) {
    if (gram.empty()) throw CLI::ValidationError("--gram", "a lattice descriptor is required");
    return parse_lattice(gram, ctx);
}

Json cmd_invariants(const RunConfig& cfg, const std::string& gram) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    auto I = invariants(L);
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["fundamental_invariants"] = fundamental_invariants(L);
    j["val"] = I.val;
    j["type"] = I.type;
    j["det"] = rational_json(I.det);
    j["disc"] = rational_json(I.disc);
    j["chi"] = I.chi;
    j["hasse"] = I.hasse;
    j["integral"] = is_integral(L);
    return j;
}

Json cmd_overlattices(const RunConfig& cfg, const std::string& gram, int max_val) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    OverlatticeLimits lim;
    lim.max_val = max_val;
    auto list = cached_overlattices(L, lim);
    Json arr = Json::array();
    for (auto& e : *list)
        arr.push_back({{"ell", e.ell},
                       {"type", e.t},
                       {"val", e.val},
                       {"chi0", e.chi0},
                       {"gram", emit_lattice(make_lattice(ctx, e.gram))}});
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["count"] = list->size();
    j["overlattices"] = arr;
    return j;
}

Json cmd_den(const RunConfig& cfg, const std::string& gram) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["epsilon"] = cfg.epsilon;
    j["den"] = den_poly(L, cfg.epsilon).to_strings();
    j["den_flat"] = den_flat_poly(L, cfg.epsilon).to_strings();
    j["fe_sign"] = fe_sign(L, cfg.epsilon);
    return j;
}

Json cmd_pden(const RunConfig& cfg, const std::string& gram) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    Json j;
    j["pden"] = rational_json(pden(L, cfg.epsilon));
    j["fe_sign"] = fe_sign(L, cfg.epsilon);
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["epsilon"] = cfg.epsilon;
    return j;
}

Json suite_summary(const std::vector<Json>& cases) {
    int passed = 0;
    Json failures = Json::array();
    for (auto& c : cases) {
        if (c["ok"].get<bool>())
            ++passed;
        else
            failures.push_back(c);
    }
    Json j;
    j["passed"] = passed;
    j["failed"] = static_cast<int>(cases.size()) - passed;
    j["cases"] = cases.size();
    j["failures"] = failures;
    return j;
}

Json cmd_fe_check(const RunConfig& cfg, const std::string& gram, int random, int max_rank, int max_a) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto one = [&](const QuadLattice& L) {
        Json c;
        c["lattice"] = emit_lattice(L);
        bool ok = true;
        Json why = Json::array();
        for (int eps : {1, -1}) {
            auto r1 = check_functional_equation(L, eps);
            auto r2 = check_functional_equation_flat(L, eps);
            for (auto* r : {&r1, &r2})
                if (!r->ok) {
                    ok = false;
                    why.push_back(r->name + " eps=" + std::to_string(eps) + ": " + r->first_failure());
                }
        }
        c["ok"] = ok;
        if (!ok) c["why"] = why;
        return c;
    };
    std::vector<Json> cases;
    if (!gram.empty())
        cases.push_back(one(need_lattice(gram, ctx)));
    else
        cases = cli::fan_out(random, cfg.jobs, [&](int i) {
            auto rng = cli::case_rng(cfg.seed, i);
            return one(cli::random_lattice(ctx, 1 + static_cast<int>(rng() % max_rank), max_a, rng));
        });
    Json j = suite_summary(cases);
    j["p"] = cfg.p;
    j["seed"] = cfg.seed;
    check_report(j, j["failed"] == 0);
    return j;
}

Json cmd_induction_check(const RunConfig& cfg, const std::string& gram, const std::string& xnorm, int random) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto one = [&](const QuadLattice& Lf, const Q& xn, int eps) {
        auto R = induction_step(Lf, xn, eps);
        Json c = cli::report_json(R);
        c["lattice_flat"] = emit_lattice(Lf);
        c["x_norm"] = rational_json(xn);
        c["epsilon"] = eps;
        return c;
    };
    std::vector<Json> cases;
    if (!gram.empty()) {
        if (xnorm.empty()) throw CLI::ValidationError("--x-norm", "required together with --gram");
        cases.push_back(one(need_lattice(gram, ctx), parse_rational_at(xnorm, 0), cfg.epsilon));
    } else {
        cases = cli::fan_out(random, cfg.jobs, [&](int i) {
            auto rng = cli::case_rng(cfg.seed, i);
            auto Lf = cli::random_lattice(ctx, 1 + static_cast<int>(rng() % 2), 2, rng);
            int top = fundamental_invariants(Lf).back();
            Q xn = Q((rng() % 2) ? 1 : ctx.r) * qpow(cfg.p, top + 1 + static_cast<int>(rng() % 2));
            return one(Lf, xn, (rng() % 2) ? 1 : -1);
        });
    }
    Json j = suite_summary(cases);
    j["p"] = cfg.p;
    j["seed"] = cfg.seed;
    check_report(j, j["failed"] == 0);
    return j;
}

Json cmd_oracle(const RunConfig& cfg, const std::string& gram, int m, const std::string& method, int max_N) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    if (m < L.rank()) throw CLI::ValidationError("--m", "target rank must be at least rank(L)");
    OracleOptions opt;
    opt.budget = cfg.budget;
    opt.max_N = max_N;
    if (method == "literal")
        opt.method = OracleMethod::Literal;
    else if (method == "stratified")
        opt.method = OracleMethod::Stratified;
    auto M = self_dual(m, cfg.epsilon, ctx);
    auto r = density_oracle(M, L, opt);
    Q closed = local_density_closed(m, cfg.epsilon, L);
    Json counts = Json::array();
    for (auto& [N, c] : r.raw_counts) counts.push_back({{"N", N}, {"count", c.get_str()}});
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["m"] = m;
    j["epsilon"] = cfg.epsilon;
    j["density"] = rational_json(r.density);
    j["method"] = r.method;
    j["N"] = r.N_used;
    j["stabilized"] = r.stabilized;
    j["raw_counts"] = counts;
    j["closed_form"] = rational_json(closed);
    j["agrees"] = closed == r.density;
    check_report(j, closed == r.density);
    return j;
}

Json cmd_horizontal(const RunConfig& cfg, const std::string& gram) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    int eps = cfg.epsilon;
    Json hs = Json::array();
    for (auto& e : hor_set(L, eps))
        hs.push_back({{"gram", emit_lattice(make_lattice(ctx, e.gram))}, {"type", e.t}, {"val", e.val}});
    int chi = invariants(L).chi;
    bool realizable = embeds_in_space(L, L.rank() + 2, eps, -1);
    Z hd = horizontal_degree(L, eps);
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["epsilon"] = eps;
    j["coisotropic"] = chi == eps;
    j["realizable"] = realizable;
    j["hor_set"] = hs;
    j["horizontal_degree"] = rational_json(Q(hd));
    bool ok = true;
    if (chi != eps) {
        Q f = den_flat_at_1(L, eps);
        Q expect = chi == 0 ? 2 * f : f;
        j["den_flat_at_1"] = rational_json(f);
        j["expected"] = rational_json(expect);
        ok = Q(hd) == expect;
    } else if (realizable) {
        ok = hd == 0;
    }
    j["ok"] = ok;
    check_report(j, ok);
    return j;
}

Json cmd_int(const RunConfig& cfg, const std::string& gram) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    auto I = intersection_number(L, cfg.epsilon);
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["epsilon"] = cfg.epsilon;
    j["int"] = rational_json(I.value);
    j["realizable"] = I.realizable;
    return j;
}

Json cmd_vertex(const RunConfig& cfg, int m, int d) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto V = make_vertex_lattice(m, cfg.epsilon, d, ctx);
    Json j;
    j["p"] = cfg.p;
    j["m"] = m;
    j["epsilon"] = cfg.epsilon;
    j["d"] = d;
    j["type"] = 2 * d + 2;
    j["t_max"] = t_max(m, cfg.epsilon);
    j["lattice"] = emit_lattice(V.lattice);
    j["chi_W"] = V.chi_W();
    j["isotropic_lines"] = isotropic_subspaces(V.W, 1, cfg.p).size();
    if (d == 1)
        j["int_at_0"] = rational_json(int_V_Lambda(V, Vec(m, Q(0))));
    else {
        j["c_const"] = rational_json(c_const(d, cfg.p));
        j["c_prime"] = rational_json(c_prime(d, cfg.p));
    }
    return j;
}

Json cmd_modularity(const RunConfig& cfg, int m, int d) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto V = make_vertex_lattice(m, cfg.epsilon, d, ctx);
    auto R = check_local_modularity(V);
    Json j = cli::report_json(R);
    j["p"] = cfg.p;
    j["m"] = m;
    j["epsilon"] = cfg.epsilon;
    j["d"] = d;
    j["lattice"] = emit_lattice(V.lattice);
    check_report(j, R.ok);
    return j;
}

Json cmd_counting(const RunConfig& cfg, int t, int val, int trials) {
    if (t < 2) throw CLI::ValidationError("--t", "must be at least 2");
    if (val < t) throw CLI::ValidationError("--val", "must be at least --t");
    auto ctx = PrimeCtx::make(cfg.p);
    auto cases = cli::fan_out(trials, cfg.jobs, [&](int i) {
        auto rng = cli::case_rng(cfg.seed, i);
        // random composition of val into t parts >= 1
        std::vector<int> a(t, 1);
        for (int k = 0; k < val - t; ++k) a[rng() % t]++;
        std::vector<Q> d(t);
        for (int k = 0; k < t; ++k) d[k] = Q((rng() % 2) ? 1 : ctx.r) * qpow(cfg.p, a[k]);
        auto L = diag_lattice(ctx, d);
        Json c;
        c["lattice"] = emit_lattice(L);
        bool ok = true;
        Json checked = Json::array();
        for (int s : {1, -1}) {
            bool odd = t % 2 == 1;
            if (!(odd ? counting_odd_admissible(L, s) : counting_even_admissible(L, s))) continue;
            auto R = odd ? check_counting_odd(L, s) : check_counting_even(L, s);
            checked.push_back(s);
            if (!R.ok) {
                ok = false;
                c["why"] = R.first_failure();
            }
        }
        auto mu = mu_profile(L);
        c["mu"] = {{"plus", mu.plus.get_str()},
                   {"zero", mu.zero.get_str()},
                   {"minus", mu.minus.get_str()},
                   {"zero_plus", mu.zero_plus.get_str()},
                   {"zero_minus", mu.zero_minus.get_str()}};
        c["s_checked"] = checked;
        c["ok"] = ok;
        return c;
    });
    Json j = suite_summary(cases);
    j["p"] = cfg.p;
    j["t"] = t;
    j["val"] = val;
    j["seed"] = cfg.seed;
    check_report(j, j["failed"] == 0);
    return j;
}

Json cmd_whittaker(const RunConfig& cfg, const std::string& gram, int k) {
    auto ctx = PrimeCtx::make(cfg.p);
    auto L = need_lattice(gram, ctx);
    Json j;
    j["lattice"] = emit_lattice(L);
    j["p"] = cfg.p;
    j["epsilon"] = cfg.epsilon;
    j["k"] = k;
    j["value"] = rational_json(whittaker_value(L, cfg.epsilon, k));
    int w = fe_sign(L, cfg.epsilon);
    j["fe_sign"] = w;
    if (w == -1) j["derivative"] = rational_json(whittaker_derivative(L, cfg.epsilon));
    return j;
}

void emit(const Json& j, const std::string& format) {
    if (format == "csv")
        std::cout << to_csv(j);
    else
        std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local densities, Siegel series and lattice counts over Z_p"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--p", cfg.p, "odd prime")->check(CLI::PositiveNumber);
    app.add_option("--epsilon", cfg.epsilon, "discriminant class of the target space (+1 or -1)")
        ->check(CLI::IsMember({1, -1}));
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", cfg.seed, "seed for randomized suites");
    app.add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--cache", cfg.cache_path, "overlattice cache file (SIEGEL_CACHE overrides)");
    app.add_option("--budget", cfg.budget, "oracle work limit");

    std::string gram, xnorm, method = "auto";
    int random = 0, max_rank = 3, max_a = 3, m = 0, d = 1, t = 3, val = 5, trials = 10, k = 0, max_N = -1;
    int max_val = 12;

    auto* s_inv = app.add_subcommand("invariants", "fundamental invariants, chi and Hasse");
    auto* s_ovl = app.add_subcommand("overlattices", "integral overlattices");
    auto* s_den = app.add_subcommand("den", "local Siegel series and its even-corank companion");
    auto* s_pden = app.add_subcommand("pden", "central derivative");
    auto* s_fe = app.add_subcommand("fe-check", "functional equations");
    auto* s_ind = app.add_subcommand("induction-check", "induction formula");
    auto* s_or = app.add_subcommand("oracle", "brute-force local density");
    auto* s_hor = app.add_subcommand("horizontal", "horizontal overlattices and degrees");
    auto* s_int = app.add_subcommand("int", "intersection number");
    auto* s_vx = app.add_subcommand("vertex", "vertex lattice data");
    auto* s_mod = app.add_subcommand("modularity-check", "Fourier eigenfunction check");
    auto* s_cnt = app.add_subcommand("counting-check", "weighted counting identities");
    auto* s_wh = app.add_subcommand("whittaker", "Whittaker values");
    auto* s_self = app.add_subcommand("selftest", "built-in worked examples");

    for (auto* s : {s_inv, s_ovl, s_den, s_pden, s_fe, s_ind, s_or, s_hor, s_int, s_wh})
        s->add_option("--gram", gram, "lattice: diag(a,b,...) or a JSON Gram matrix");
    s_ovl->add_option("--max-val", max_val, "refuse lattices of larger valuation");
    s_fe->add_option("--random", random, "number of seed-derived lattices");
    s_fe->add_option("--max-rank", max_rank, "largest rank for random lattices")->check(CLI::Range(1, 4));
    s_fe->add_option("--max-a", max_a, "largest invariant for random lattices")->check(CLI::Range(0, 5));
    s_ind->add_option("--random", random, "number of seed-derived pairs");
    s_ind->add_option("--x-norm", xnorm, "norm of the perpendicular vector");
    s_or->add_option("--m", m, "rank of the self-dual target")->required();
    s_or->add_option("--method", method, "auto, literal or stratified")
        ->check(CLI::IsMember({"auto", "literal", "stratified"}));
    s_or->add_option("--max-n", max_N, "largest modulus exponent for the literal route");
    for (auto* s : {s_vx, s_mod}) {
        s->add_option("--m", m, "ambient dimension")->required();
        s->add_option("--d", d, "type is 2d+2")->check(CLI::PositiveNumber);
    }
    s_cnt->add_option("--t", t, "rank and type");
    s_cnt->add_option("--val", val, "valuation");
    s_cnt->add_option("--trials", trials, "number of seed-derived lattices");
    s_wh->add_option("--k", k, "evaluate at X = q^-k")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    if (const char* env = std::getenv("SIEGEL_CACHE")) cfg.cache_path = env;
    if (!cfg.cache_path.empty()) load_cache(cfg.cache_path);

    int code = 0;
    try {
        Json out;
        if (*s_inv)
            out = cmd_invariants(cfg, gram);
        else if (*s_ovl)
            out = cmd_overlattices(cfg, gram, max_val);
        else if (*s_den)
            out = cmd_den(cfg, gram);
        else if (*s_pden)
            out = cmd_pden(cfg, gram);
        else if (*s_fe) {
            if (gram.empty() && random <= 0) throw CLI::ValidationError("--random", "give --gram or --random N");
            out = cmd_fe_check(cfg, gram, random, max_rank, max_a);
        } else if (*s_ind) {
            if (gram.empty() && random <= 0) throw CLI::ValidationError("--random", "give --gram or --random N");
            out = cmd_induction_check(cfg, gram, xnorm, random);
        } else if (*s_or)
            out = cmd_oracle(cfg, gram, m, method, max_N);
        else if (*s_hor)
            out = cmd_horizontal(cfg, gram);
        else if (*s_int)
            out = cmd_int(cfg, gram);
        else if (*s_vx)
            out = cmd_vertex(cfg, m, d);
        else if (*s_mod)
            out = cmd_modularity(cfg, m, d);
        else if (*s_cnt)
            out = cmd_counting(cfg, t, val, trials);
        else if (*s_wh)
            out = cmd_whittaker(cfg, gram, k);
        else if (*s_self) {
            out = cli::run_selftest(cfg);
            if (out["failed"] != 0) throw Violation{out};
        }
        emit(out, cfg.format);
    } catch (const Violation& v) {
        emit(v.report, cfg.format);
        code = 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        code = 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = 2;
    }
    if (!cfg.cache_path.empty() && code != 2) save_cache(cfg.cache_path);
    return code;
}
