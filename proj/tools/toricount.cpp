// Command-line front end: exact torsor counts, local densities, archimedean
// densities, constant assembly, and diagnostics for toric hypersurface models.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "toricount/arcs.hpp"
#include "toricount/archimedean.hpp"
#include "toricount/constant.hpp"
#include "toricount/densities.hpp"
#include "toricount/enumerate.hpp"
#include "toricount/hyperbolic.hpp"
#include "toricount/io.hpp"
#include "toricount/mobius.hpp"

using namespace toricount;
using nlohmann::json;

namespace {

struct Common {
    std::string model_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 42;
    int workers = 1;
    long long budget = 10'000'000'000;
};

std::string fmt(double v) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<long long> parse_ll_list(const std::string& s) {
    std::vector<long long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back((long long)std::llround(std::stod(item)));
    return out;
}

std::vector<double> parse_d_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

class Output {
public:
    Output(const Common& c, const LoadedModel* lm) : common_(c) {
        if (!c.out_path.empty()) {
            file_.open(c.out_path);
            if (!file_) throw IoError("cannot open output file: " + c.out_path);
        }
        meta_["tool"] = std::string("toricount ") + tool_version();
        meta_["seed"] = c.seed;
        meta_["workers"] = c.workers;
        meta_["budget"] = c.budget;
        if (lm) {
            meta_["model"] = lm->model.name;
            meta_["model_hash"] = lm->hash;
        }
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

    void csv_header() {
        auto& os = stream();
        os << "# tool=" << meta_["tool"].get<std::string>() << "\n";
        if (meta_.contains("model"))
            os << "# model=" << meta_["model"].get<std::string>()
               << " hash=" << meta_["model_hash"].get<std::string>() << "\n";
        os << "# seed=" << common_.seed << " workers=" << common_.workers
           << " budget=" << common_.budget << "\n";
    }

    void emit_json(json payload) {
        payload["meta"] = meta_;
        stream() << payload.dump(2) << "\n";
    }

    bool json_mode() const { return common_.format == "json"; }
    json& meta() { return meta_; }

private:
    const Common& common_;
    std::ofstream file_;
    json meta_;
};

int run_validate(const Common& common) {
    LoadedModel lm = load_model_file(common.model_path);
    const auto& m = lm.model;
    Output out(common, &lm);
    auto& os = out.stream();
    os << "model " << m.name << " (hash " << lm.hash << "): valid\n";
    os << "n=" << m.n << " r=" << m.r << " rays=" << m.num_rays()
       << " max_cones=" << m.num_cones() << "\n";
    os << "anticanonical n_j =";
    for (int j = 0; j < m.r; ++j) os << " " << m.anticanonical[j];
    os << "\ndegrees d_j =";
    for (int j = 0; j < m.r; ++j) os << " " << m.degrees[j];
    os << "\nweight matrix a[i][j] (rows = rays):\n";
    for (int i = 0; i < m.num_rays(); ++i) {
        os << "  ray " << (i + 1) << ":";
        for (int j = 0; j < m.r; ++j) os << " " << m.weight[i][j];
        os << "\n";
    }
    os << "Picard basis rays:";
    for (int i : m.pic_rays) os << " " << (i + 1);
    os << "\npolynomial terms: " << lm.form.terms.size() << "\n";
    auto sets = m.minimal_uncovered_sets();
    os << "minimal uncovered ray sets (I_k):\n";
    bool all6 = true;
    for (const auto& s : sets) {
        os << "  {";
        for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << (s[i] + 1);
        os << "} card " << s.size() << "\n";
        if (int(s.size()) < 6) all6 = false;
    }
    os << "hypothesis Card I_k >= 6: " << (all6 ? "satisfied" : "NOT satisfied") << "\n";
    os << "hypothesis n(F) bound: not verified (out of scope)\n";
    return 0;
}

int run_count(const Common& common, long long B, bool all_nonzero, const std::string& e_str) {
    LoadedModel lm = load_model_file(common.model_path);
    CountOptions opt;
    opt.all_nonzero = all_nonzero;
    opt.budget = common.budget;
    opt.workers = common.workers;
    if (!e_str.empty()) opt.e = parse_ll_list(e_str);
    CountRecord rec = count_torsor(lm.model, &lm.form, B, opt);
    Output out(common, &lm);
    if (out.json_mode()) {
        json j;
        j["B"] = rec.B;
        j["total"] = rec.total;
        j["rational"] = rec.rational.str();
        j["rational_value"] = rec.rational.to_double();
        j["per_cone"] = rec.per_cone;
        j["all_nonzero"] = rec.all_nonzero;
        j["e"] = rec.e;
        out.emit_json(j);
    } else {
        out.csv_header();
        auto& os = out.stream();
        os << "B,total,rational";
        for (int c = 0; c < lm.model.num_cones(); ++c) os << ",cone" << (c + 1);
        os << "\n" << rec.B << "," << rec.total << "," << fmt(rec.rational.to_double());
        for (long long c : rec.per_cone) os << "," << c;
        os << "\n";
    }
    return 0;
}

int run_local_density(const Common& common, long long p, int mmax) {
    LoadedModel lm = load_model_file(common.model_path);
    MobiusTable mob(lm.model);
    LocalDensities loc(lm.model, lm.form, mob);
    DensityReport rep = loc.sigma_p(p, mmax, common.budget);
    Output out(common, &lm);
    if (out.json_mode()) {
        json j;
        j["p"] = rep.p;
        json vals = json::array();
        for (const auto& v : rep.values) vals.push_back(v.str());
        j["values"] = vals;
        j["stabilized"] = rep.stabilized;
        if (rep.stabilized_at) j["stabilized_at"] = *rep.stabilized_at;
        j["sigma_p"] = rep.sigma.to_double();
        out.emit_json(j);
    } else {
        out.csv_header();
        auto& os = out.stream();
        os << "m,value_exact,value\n";
        for (size_t i = 0; i < rep.values.size(); ++i)
            os << (i + 1) << "," << rep.values[i].str() << "," << fmt(rep.values[i].to_double())
               << "\n";
        os << "# sigma_p=" << fmt(rep.sigma.to_double()) << " stabilized="
           << (rep.stabilized ? "yes" : "NO (warning: sequence not stabilized)") << "\n";
    }
    return 0;
}

int run_series(const Common& common, long long prime_bound, int mmax) {
    LoadedModel lm = load_model_file(common.model_path);
    MobiusTable mob(lm.model);
    LocalDensities loc(lm.model, lm.form, mob);
    SeriesResult res = loc.singular_series(prime_bound, mmax, common.budget);
    Output out(common, &lm);
    if (out.json_mode()) {
        json j;
        j["value"] = res.value;
        j["tail_bound"] = res.tail_bound;
        j["prime_bound"] = res.prime_bound;
        j["m_max"] = res.m_max;
        json f = json::array();
        for (const auto& fac : res.factors)
            f.push_back({{"p", fac.p}, {"sigma_p", fac.sigma}, {"stabilized", fac.stabilized}});
        j["factors"] = f;
        out.emit_json(j);
    } else {
        out.csv_header();
        auto& os = out.stream();
        os << "p,sigma_p,stabilized\n";
        for (const auto& fac : res.factors)
            os << fac.p << "," << fmt(fac.sigma) << "," << (fac.stabilized ? 1 : 0) << "\n";
        os << "# S=" << fmt(res.value) << " tail_bound=" << fmt(res.tail_bound) << "\n";
    }
    return 0;
}

int run_density(const Common& common, long long samples, const std::string& eps_str,
                const std::string& method, double phi) {
    LoadedModel lm = load_model_file(common.model_path);
    Archimedean arch(lm.model, lm.form);
    DensityEstimate est;
    if (method == "oscillatory")
        est = arch.J_total_oscillatory(phi, samples, common.seed, common.workers);
    else
        est = arch.J_total(parse_d_list(eps_str), samples, common.seed, common.workers);
    Output out(common, &lm);
    json j;
    j["value"] = est.value;
    j["std_error"] = est.std_error;
    j["method"] = est.method;
    j["samples"] = est.samples;
    j["seed"] = est.seed;
    if (!est.eps.empty()) j["eps"] = est.eps;
    out.emit_json(j);
    return 0;
}

int run_constant(const Common& common, long long prime_bound, int mmax, long long samples,
                 const std::string& eps_str) {
    LoadedModel lm = load_model_file(common.model_path);
    SeriesConfig scfg{prime_bound, mmax, common.budget};
    DensityConfig dcfg{parse_d_list(eps_str), samples, common.seed, common.workers};
    ConstantBreakdown b = assemble_constant(lm.model, lm.form, scfg, dcfg);
    Output out(common, &lm);
    json j;
    j["alpha"] = b.alpha.str();
    j["alpha_value"] = b.alpha.to_double();
    j["beta"] = b.beta;
    j["series"] = {{"value", b.series.value}, {"tail_bound", b.series.tail_bound},
                   {"prime_bound", b.series.prime_bound}};
    j["J"] = {{"value", b.J.value}, {"std_error", b.J.std_error}, {"method", b.J.method}};
    j["tau_H"] = b.tau_H;
    j["C"] = b.C;
    j["C_error"] = b.C_error;
    out.emit_json(j);
    return 0;
}

int run_compare(const Common& common, const std::string& b_list, long long prime_bound, int mmax,
                long long samples, const std::string& eps_str) {
    LoadedModel lm = load_model_file(common.model_path);
    SeriesConfig scfg{prime_bound, mmax, common.budget};
    DensityConfig dcfg{parse_d_list(eps_str), samples, common.seed, common.workers};
    ConstantBreakdown cb = assemble_constant(lm.model, lm.form, scfg, dcfg);
    auto bs = parse_ll_list(b_list);
    Output out(common, &lm);
    out.csv_header();
    auto& os = out.stream();
    os << "B,count,prediction,ratio\n";
    for (long long B : bs) {
        CountOptions opt;
        opt.all_nonzero = true;
        opt.budget = common.budget;
        opt.workers = common.workers;
        CountRecord rec = count_torsor(lm.model, &lm.form, B, opt);
        double count = rec.rational.to_double();
        double pred = predict(cb, double(B));
        os << B << "," << fmt(count) << "," << fmt(pred) << "," << fmt(count / pred) << "\n";
    }
    return 0;
}

int run_probe(const Common& common, long long q, long long a, double beta, const std::string& P_str,
              long long samples) {
    LoadedModel lm = load_model_file(common.model_path);
    auto P = parse_ll_list(P_str);
    std::vector<long long> e;
    ArcProbe probe =
        major_arc_probe(lm.model, lm.form, e, P, a, q, beta, samples, common.seed, common.budget);
    Output out(common, &lm);
    json j;
    j["q"] = probe.q;
    j["a"] = probe.a;
    j["beta"] = probe.beta;
    j["P"] = probe.P;
    j["lhs"] = {probe.lhs.real(), probe.lhs.imag()};
    j["rhs"] = {probe.rhs.real(), probe.rhs.imag()};
    j["rel_err"] = probe.rel_err;
    out.emit_json(j);
    return 0;
}

int run_hyperbolic(const Common& common, const std::string& family, double P) {
    FiberFamily fam;
    if (family == "divisor") {
        fam.r = 2;
        fam.alpha = {1, 1};
        fam.h = [](std::span<const long long>) { return 1.0; };
    } else if (family == "synthetic21") {
        fam.r = 2;
        fam.alpha = {2, 1};
        fam.h = [](std::span<const long long> x) { return 2.0 * double(x[0]); };
    } else {
        throw ModelError(ModelFault::BadFile, "unknown family: " + family);
    }
    std::vector<std::pair<double, double>> samples;
    for (double p : {P / 100, P / 10, P}) samples.push_back({p, upsilon(fam, p, common.budget)});
    FitResult fit = fit_leading_constant(samples, fam.r);
    Output out(common, nullptr);
    out.csv_header();
    auto& os = out.stream();
    os << "P,upsilon,c_hat\n";
    for (auto [p, u] : samples) os << fmt(p) << "," << fmt(u) << "," << fmt(fit.c_hat) << "\n";
    os << "# a=" << fmt(fit.a) << " b=" << fmt(fit.b) << " residual=" << fmt(fit.residual) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toricount: bounded-height point counts and constant factors for toric hypersurfaces"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--out", common.out_path, "output file (default stdout)");
    app.add_option("--format", common.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", common.seed, "RNG seed");
    app.add_option("--workers", common.workers, "worker threads");
    app.add_option("--budget", common.budget, "work budget");

    auto add_model = [&](CLI::App* sub) {
        sub->fallthrough();
        sub->add_option("--model", common.model_path, "model JSON file")->required();
    };

    auto* validate = app.add_subcommand("validate", "validate a model file");
    add_model(validate);

    auto* count = app.add_subcommand("count", "exact bounded-height torsor count");
    add_model(count);
    double count_B = 0;
    bool all_nonzero = false;
    std::string e_str;
    count->add_option("--B", count_B, "height bound")->required();
    count->add_flag("--all-nonzero", all_nonzero, "require all coordinates nonzero");
    count->add_option("--e", e_str, "divisibility vector, comma separated");

    auto* locd = app.add_subcommand("local-density", "M*_p sequence and sigma_p");
    add_model(locd);
    long long prime = 2;
    int mmax = 3;
    locd->add_option("--prime", prime, "prime p")->required();
    locd->add_option("--mmax", mmax, "max level m");

    auto* series = app.add_subcommand("series", "truncated singular series");
    add_model(series);
    long long prime_bound = 100;
    series->add_option("--prime-bound", prime_bound, "largest prime");
    series->add_option("--mmax", mmax, "max level m");

    auto* density = app.add_subcommand("density", "archimedean factor J");
    add_model(density);
    double samples_d = 1e6;
    std::string eps_str = "1e-2,1e-3";
    std::string method = "shell";
    double phi = 64.0;
    density->add_option("--samples", samples_d, "Monte Carlo samples per cone");
    density->add_option("--eps", eps_str, "shell widths, decreasing");
    density->add_option("--method", method, "shell|oscillatory")
        ->check(CLI::IsMember({"shell", "oscillatory"}));
    density->add_option("--phi", phi, "oscillatory truncation");

    auto* constant = app.add_subcommand("constant", "assemble the predicted constant");
    add_model(constant);
    constant->add_option("--prime-bound", prime_bound, "largest prime");
    constant->add_option("--mmax", mmax, "max level m");
    constant->add_option("--samples", samples_d, "Monte Carlo samples per cone");
    constant->add_option("--eps", eps_str, "shell widths");

    auto* compare = app.add_subcommand("compare", "counts vs prediction");
    add_model(compare);
    std::string b_list;
    compare->add_option("--B-list", b_list, "comma separated height bounds")->required();
    compare->add_option("--prime-bound", prime_bound, "largest prime");
    compare->add_option("--mmax", mmax, "max level m");
    compare->add_option("--samples", samples_d, "Monte Carlo samples per cone");
    compare->add_option("--eps", eps_str, "shell widths");

    auto* probe = app.add_subcommand("probe", "major-arc factorization probe");
    add_model(probe);
    long long pq = 1, pa = 0;
    double pbeta = 0;
    std::string P_str = "20,20";
    probe->add_option("--q", pq, "denominator q")->required();
    probe->add_option("--a", pa, "numerator a")->required();
    probe->add_option("--beta", pbeta, "offset beta");
    probe->add_option("--P", P_str, "box bounds P_j, comma separated")->required();
    probe->add_option("--samples", samples_d, "Monte Carlo samples for I(beta)");

    auto* hyp = app.add_subcommand("hyperbolic-demo", "hyperbolic summation demo");
    hyp->fallthrough();
    std::string family = "divisor";
    double hyp_P = 1e7;
    hyp->add_option("--family", family, "divisor|synthetic21");
    hyp->add_option("--P", hyp_P, "largest P");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return run_validate(common);
        if (app.got_subcommand(count))
            return run_count(common, (long long)std::llround(count_B), all_nonzero, e_str);
        if (app.got_subcommand(locd)) return run_local_density(common, prime, mmax);
        if (app.got_subcommand(series)) return run_series(common, prime_bound, mmax);
        if (app.got_subcommand(density))
            return run_density(common, (long long)std::llround(samples_d), eps_str, method, phi);
        if (app.got_subcommand(constant))
            return run_constant(common, prime_bound, mmax, (long long)std::llround(samples_d),
                                eps_str);
        if (app.got_subcommand(compare))
            return run_compare(common, b_list, prime_bound, mmax,
                               (long long)std::llround(samples_d), eps_str);
        if (app.got_subcommand(probe))
            return run_probe(common, pq, pa, pbeta, P_str, (long long)std::llround(samples_d));
        if (app.got_subcommand(hyp)) return run_hyperbolic(common, family, hyp_P);
    } catch (const BudgetExceeded& ex) {
        std::cerr << "budget exceeded: " << ex.what() << "\n";
        return 2;
    } catch (const IoError& ex) {
        std::cerr << "io error: " << ex.what() << "\n";
        return 3;
    } catch (const ModelError& ex) {
        std::cerr << "invalid model: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
