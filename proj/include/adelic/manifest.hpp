#pragma once

#include <adelic/dichotomy.hpp>
#include <adelic/ecoracle.hpp>
#include <adelic/zeta.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adelic::cli {

using json = nlohmann::ordered_json;

struct Options {
    std::string manifest_path;
    std::string out_dir = ".";
    std::string format = "json";  // json | csv
    long budget_precision = 32;
    long budget_enum = 1000000;
    int jobs = 1;
    long seed = 0;
    int verbosity = 0;
};

namespace detail {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!obj.is_object()) throw Error("manifest: expected an object at " + where);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw Error("manifest: unknown key \"" + it.key() + "\" in " + where);
    }
}

inline Rat get_rat(const json& v, const std::string& where) {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    throw Error("manifest: expected exact rational (string) at " + where);
}

struct Context {
    std::map<std::string, FieldPtr> fields;
    std::map<std::string, PolyExpSeq> sequences;
    std::map<std::string, Place> places;

    FieldPtr field(const std::string& name) const {
        if (name == "Q") return rationals_field();
        auto it = fields.find(name);
        if (it == fields.end()) throw Error("manifest: unknown field \"" + name + "\"");
        return it->second;
    }
    const PolyExpSeq& sequence(const std::string& name) const {
        auto it = sequences.find(name);
        if (it == sequences.end()) throw Error("manifest: unknown sequence \"" + name + "\"");
        return it->second;
    }
    const Place& place(const std::string& name) const {
        auto it = places.find(name);
        if (it == places.end()) throw Error("manifest: unknown place \"" + name + "\"");
        return it->second;
    }
};

inline AlgebraicNumber parse_element(const json& v, const FieldPtr& f, const std::string& where) {
    if (v.is_string() || v.is_number_integer())
        return AlgebraicNumber::from_rat(f, get_rat(v, where));
    if (!v.is_array()) throw Error("manifest: element must be a coordinate array at " + where);
    std::vector<Rat> coords;
    for (const auto& c : v) coords.push_back(get_rat(c, where));
    coords.resize(f->degree(), Rat(0));
    return AlgebraicNumber(f, std::move(coords));
}

inline Place parse_place_selector(const std::string& sel, const FieldPtr& f) {
    auto colon = sel.find(':');
    if (colon == std::string::npos) throw Error("manifest: place selector needs ':' in " + sel);
    std::string head = sel.substr(0, colon);
    size_t idx = std::stoul(sel.substr(colon + 1));
    if (head == "inf") {
        auto arch = archimedean_places(f);
        if (idx >= arch.size()) throw Error("manifest: archimedean index out of range in " + sel);
        return arch[idx];
    }
    Int p(head);
    auto above = places_above(f, p);
    if (idx >= above.size()) throw Error("manifest: place index out of range in " + sel);
    return above[idx];
}

inline Context parse_context(const json& m) {
    Context ctx;
    if (m.contains("fields")) {
        for (auto it = m["fields"].begin(); it != m["fields"].end(); ++it) {
            check_keys(it.value(), {"min_poly"}, "fields." + it.key());
            std::vector<Rat> coeffs;
            for (const auto& c : it.value().at("min_poly")) coeffs.push_back(get_rat(c, it.key()));
            ctx.fields[it.key()] = make_number_field(QPoly(std::move(coeffs)));
        }
    }
    if (m.contains("sequences")) {
        for (auto it = m["sequences"].begin(); it != m["sequences"].end(); ++it) {
            const json& s = it.value();
            check_keys(s, {"field", "terms"}, "sequences." + it.key());
            FieldPtr f = ctx.field(s.at("field").get<std::string>());
            std::vector<SeqTerm> terms;
            for (const auto& t : s.at("terms")) {
                check_keys(t, {"poly", "root"}, "sequences." + it.key() + ".terms");
                APoly poly;
                for (const auto& c : t.at("poly")) poly.c.push_back(parse_element(c, f, it.key()));
                poly.trim();
                terms.push_back({poly, parse_element(t.at("root"), f, it.key())});
            }
            auto seq = PolyExpSeq::make(f, std::move(terms));
            if (!seq) throw Error("manifest: sequence \"" + it.key() + "\" is identically zero");
            ctx.sequences.emplace(it.key(), *seq);
        }
    }
    if (m.contains("places")) {
        for (auto it = m["places"].begin(); it != m["places"].end(); ++it) {
            check_keys(it.value(), {"field", "select"}, "places." + it.key());
            FieldPtr f = ctx.field(it.value().at("field").get<std::string>());
            ctx.places.emplace(it.key(),
                               parse_place_selector(it.value().at("select").get<std::string>(), f));
        }
    }
    return ctx;
}

// --- serializers ------------------------------------------------------------

inline json rat_json(const Rat& q) { return rat_to_string(q); }

inline json element_json(const AlgebraicNumber& a) {
    json arr = json::array();
    for (const auto& c : a.coords()) arr.push_back(rat_to_string(c));
    return arr;
}

inline json ppower_json(const Int& p, const Rat& exponent) {
    return json{{"p", p.get_str()},
                {"exponent_num", exponent.get_num().get_str()},
                {"exponent_den", exponent.get_den().get_str()}};
}

inline json radius_json(const RadiusInterval& r) {
    return json{{"lo", rat_to_string(r.lo)}, {"hi", rat_to_string(r.hi)},
                {"approx", r.mid_double()}};
}

inline json rational_function_json(const RationalFunction<Rat>& f) {
    json num = json::array(), den = json::array();
    for (const auto& c : f.num.c) num.push_back(rat_to_string(c));
    for (const auto& c : f.den.c) den.push_back(rat_to_string(c));
    return json{{"num", num}, {"den", den}};
}

inline json verdict_json(const DichotomyVerdict& v) {
    json j{{"verdict", verdict_name(v.kind)}, {"radius", radius_json(v.radius_interval)},
           {"witness", v.witness}};
    if (v.rational_witness) j["rational_witness"] = rational_function_json(*v.rational_witness);
    if (!v.zeros.empty()) {
        json zs = json::array();
        for (const auto& z : v.zeros) {
            zs.push_back(json{{"approx", z.approx.get_str()},
                              {"mod_exponent", z.modexp},
                              {"exact_integer", z.exact_integer}});
        }
        j["zeros"] = zs;
    }
    if (!v.unknown_classes.empty()) {
        json us = json::array();
        for (const auto& [rep, depth] : v.unknown_classes)
            us.push_back(json{{"class", rep.get_str()}, {"depth", depth}});
        j["unknown_classes"] = us;
    }
    return j;
}

inline json certificate_json(const AQCCertificate& c) {
    json good = json::array();
    for (const auto& g : c.good) {
        good.push_back(json{{"class", g.cls.get_str()},
                            {"value", ppower_json(c.p, -g.exponent)},
                            {"threshold", g.threshold}});
    }
    json bad = json::array();
    for (const auto& b : c.bad) bad.push_back(b.get_str());
    json j{{"depth", c.depth},
           {"modulus", c.modulus.get_str()},
           {"L", c.L},
           {"t", c.t},
           {"good", good},
           {"bad", bad},
           {"thresholds", json{{"global", c.threshold}}},
           {"good_fraction", c.good_fraction()},
           {"provenance",
            json{{"strassmann_bounds", c.strassmann_bounds},
                 {"lipschitz", ppower_json(c.p, -c.lipschitz_exponent)}}}};
    if (c.ell_exponent) j["provenance"]["ell"] = ppower_json(c.p, -*c.ell_exponent);
    json zs = json::array();
    for (const auto& z : c.zeros)
        zs.push_back(json{{"approx", z.approx.get_str()},
                          {"mod_exponent", z.modexp},
                          {"exact_integer", z.exact_integer}});
    j["zeros"] = zs;
    return j;
}

// --- task runners --------------------------------------------------------------

struct TaskResult {
    std::string name;
    json output;
    bool undecided = false;
    bool failed = false;
    std::vector<std::pair<std::string, std::string>> extra_files;  // (suffix, content)
};

inline PerturbedSeries parse_perturbed(const json& t, const Context& ctx) {
    PolyExpSeq base = ctx.sequence(t.at("base").get<std::string>());
    std::vector<PAdicFactorSpec> factors;
    if (t.contains("factors")) {
        for (const auto& f : t["factors"]) {
            check_keys(f, {"sequence", "place", "c"}, "factors");
            Rat c = f.contains("c") ? get_rat(f["c"], "factor c") : Rat(1);
            factors.push_back(PAdicFactorSpec::make(ctx.sequence(f.at("sequence").get<std::string>()),
                                                    ctx.place(f.at("place").get<std::string>()), c));
        }
    }
    std::optional<QuasiPolynomial> qp;
    if (t.contains("quasi_polynomial")) {
        const json& q = t["quasi_polynomial"];
        check_keys(q, {"modulus", "polys", "threshold"}, "quasi_polynomial");
        QuasiPolynomial qq;
        qq.modulus = q.at("modulus").get<long>();
        qq.threshold = q.contains("threshold") ? q["threshold"].get<long>() : 0;
        for (const auto& poly : q.at("polys")) {
            std::vector<Rat> c;
            for (const auto& cc : poly) c.push_back(get_rat(cc, "quasi_polynomial"));
            qq.polys.push_back(QPoly(std::move(c)));
        }
        if (static_cast<long>(qq.polys.size()) != qq.modulus)
            throw Error("manifest: quasi_polynomial needs one poly per class");
        qp = qq;
    }
    std::optional<Rat> f0;
    if (t.contains("f0")) f0 = get_rat(t["f0"], "f0");
    return PerturbedSeries::make(std::move(base), std::move(factors), std::move(qp), 0, f0);
}

inline TaskResult run_task(const json& t, const Context& ctx, const Options& opt) {
    TaskResult res;
    res.name = t.at("name").get<std::string>();
    std::string type = t.at("type").get<std::string>();

    if (type == "stability") {
        check_keys(t, {"type", "name", "sequence", "place"}, res.name);
        auto v = is_v_stable(ctx.sequence(t.at("sequence").get<std::string>()),
                             ctx.place(t.at("place").get<std::string>()));
        json sections = json::array();
        for (const auto& s : v.sections) sections.push_back(s.to_string());
        res.output = json{{"task", "stability"},
                          {"stable", v.stable},
                          {"L", v.L},
                          {"essential_indices", v.essential.indices},
                          {"sections", sections}};
        if (v.witness_class) res.output["witness_class"] = *v.witness_class;
    } else if (type == "certificate") {
        check_keys(t, {"type", "name", "sequence", "place", "c", "depth", "verify_samples"}, res.name);
        Rat c = t.contains("c") ? get_rat(t["c"], "c") : Rat(1);
        long depth = t.contains("depth") ? t["depth"].get<long>() : 3;
        auto spec = PAdicFactorSpec::make(ctx.sequence(t.at("sequence").get<std::string>()),
                                          ctx.place(t.at("place").get<std::string>()), c);
        auto cert = aqc_certificate(spec, depth);
        res.output = certificate_json(cert);
        res.output["task"] = "certificate";
        if (t.contains("verify_samples")) {
            auto rep = verify_certificate(cert, spec, t["verify_samples"].get<long>());
            res.output["verified_samples"] = rep.samples_checked;
            res.output["verify_ok"] = rep.ok();
        }
        if (!cert.unknown_classes.empty()) res.undecided = true;
    } else if (type == "classify-rw") {
        check_keys(t, {"type", "name", "base", "sequence", "places", "c", "depth"}, res.name);
        std::vector<Place> S;
        for (const auto& w : t.at("places")) S.push_back(ctx.place(w.get<std::string>()));
        std::vector<Rat> c;
        for (const auto& cv : t.at("c")) c.push_back(get_rat(cv, "c"));
        long depth = t.contains("depth") ? t["depth"].get<long>() : 6;
        auto v = classify_rw(ctx.sequence(t.at("base").get<std::string>()),
                             ctx.sequence(t.at("sequence").get<std::string>()), S, c, depth);
        res.output = verdict_json(v);
        res.output["task"] = "classify-rw";
        res.undecided = (v.kind == DichotomyVerdict::Kind::Undecided);
    } else if (type == "classify-bmw") {
        check_keys(t, {"type", "name", "curves", "terms"}, res.name);
        BMWSpec spec;
        for (const auto& cj : t.at("curves")) {
            check_keys(cj, {"field", "xi", "S"}, res.name + ".curves");
            BMWCurve cur;
            cur.K = ctx.field(cj.at("field").get<std::string>());
            cur.xi = parse_element(cj.at("xi"), cur.K, "xi");
            if (cj.contains("S")) {
                for (const auto& sv : cj["S"]) {
                    cur.S.push_back(parse_place_selector(sv.get<std::string>(), cur.K));
                }
            }
            spec.curves.push_back(cur);
        }
        long N = t.contains("terms") ? t["terms"].get<long>() : 160;
        auto r = classify_bmw(spec, N);
        res.output = json{{"task", "classify-bmw"},
                          {"F", verdict_json(r.F)},
                          {"Z", verdict_json(r.Z)}};
        res.undecided = false;
    } else if (type == "classify-main") {
        check_keys(t, {"type", "name", "base", "factors", "quasi_polynomial", "f0", "depth"}, res.name);
        long depth = t.contains("depth") ? t["depth"].get<long>() : 6;
        auto s = parse_perturbed(t, ctx);
        auto v = classify_main(s, depth);
        res.output = verdict_json(v);
        res.output["task"] = "classify-main";
        res.undecided = (v.kind == DichotomyVerdict::Kind::Undecided);
    } else if (type == "zeta") {
        check_keys(t, {"type", "name", "field", "xi", "p", "L", "r", "s", "coeffs"}, res.name);
        FieldPtr f = ctx.field(t.at("field").get<std::string>());
        std::vector<AlgebraicNumber> xi;
        for (const auto& x : t.at("xi")) xi.push_back(parse_element(x, f, "xi"));
        unsigned long L = t.contains("L") ? t["L"].get<unsigned long>() : 1;
        std::vector<Rat> r;
        for (const auto& rv : t.at("r")) r.push_back(get_rat(rv, "r"));
        std::vector<long> s;
        for (const auto& sv : t.at("s")) s.push_back(sv.get<long>());
        auto spec = ZetaSpec::make(f, xi, Int(t.at("p").get<std::string>()), L, r, s);
        auto v = classify_zeta(spec);
        res.output = verdict_json(v);
        res.output["task"] = "zeta";
        res.undecided = (v.kind == DichotomyVerdict::Kind::Undecided);
        if (t.contains("coeffs")) {
            long N = t["coeffs"].get<long>();
            auto zc = zeta_coeffs(spec, N);
            if (opt.format == "csv") {
                std::string csv = "n,z_n\n";
                for (long n = 0; n <= N; ++n) csv += std::to_string(n) + "," + rat_to_string(zc[n]) + "\n";
                res.extra_files.push_back({"_coeffs.csv", csv});
            } else {
                json arr = json::array();
                for (const auto& c : zc) arr.push_back(rat_to_string(c));
                res.output["coefficients"] = arr;
            }
        }
    } else if (type == "ec-verify") {
        check_keys(t, {"type", "name", "curve", "k_max", "torsion"}, res.name);
        const json& cj = t.at("curve");
        check_keys(cj, {"p", "a4", "a6"}, res.name + ".curve");
        ec::Curve E(cj.at("p").get<uint64_t>(), cj.at("a4").get<uint64_t>(), cj.at("a6").get<uint64_t>());
        int kmax = t.contains("k_max") ? t["k_max"].get<int>() : 3;
        auto rep = ec::crosscheck_Nk(E, kmax, static_cast<uint64_t>(opt.budget_enum));
        json entries = json::array();
        for (const auto& e : rep.entries) {
            entries.push_back(json{{"k", e.k},
                                   {"enumerated", e.enumerated},
                                   {"from_degrees", rat_to_string(e.from_degrees)},
                                   {"match", e.match}});
        }
        res.output = json{{"task", "ec-verify"},
                          {"trace", ec::frobenius_trace(E)},
                          {"supersingular", ec::is_supersingular(E)},
                          {"crosscheck", entries},
                          {"all_match", rep.all_match}};
        if (t.contains("torsion")) {
            json ts = json::array();
            for (const auto& tq : t["torsion"]) {
                long m = tq.at("m").get<long>();
                int r = tq.at("r").get<int>();
                ts.push_back(json{{"m", m}, {"r", r},
                                  {"count", ec::torsion_count(E, m, r)}});
            }
            res.output["torsion"] = ts;
        }
        if (!rep.all_match) res.failed = true;
    } else if (type == "series") {
        check_keys(t, {"type", "name", "base", "factors", "quasi_polynomial", "f0", "count", "mode"},
                   res.name);
        auto s = parse_perturbed(t, ctx);
        long N = t.contains("count") ? t["count"].get<long>() : 64;
        std::string mode = t.contains("mode") ? t["mode"].get<std::string>() : "exact";
        res.output = json{{"task", "series"}, {"mode", mode}, {"count", N}};
        if (mode == "exact") {
            auto coeffs = exact_coefficients(s, N);
            if (coeffs.rational()) {
                if (opt.format == "csv") {
                    std::string csv = "n,coefficient\n";
                    auto rv = coeffs.rational_values();
                    for (long n = 0; n < N; ++n) csv += std::to_string(n) + "," + rat_to_string(rv[n]) + "\n";
                    res.extra_files.push_back({"_coeffs.csv", csv});
                } else {
                    json arr = json::array();
                    for (const auto& v : coeffs.rational_values()) arr.push_back(rat_to_string(v));
                    res.output["coefficients"] = arr;
                }
            } else {
                res.output["field"] = qpoly_to_string(coeffs.field->min_poly());
                json arr = json::array();
                for (const auto& v : coeffs.values) arr.push_back(element_json(v));
                res.output["coefficients"] = arr;
            }
        } else if (mode == "float") {
            auto fc = float_coefficients(s, N);
            std::string csv = "n,value,abs_error\n";
            json arr = json::array();
            for (long n = 0; n < N; ++n) {
                csv += std::to_string(n) + "," + std::to_string(fc[n].first) + "," +
                       std::to_string(fc[n].second) + "\n";
                arr.push_back(json{{"value", fc[n].first}, {"err", fc[n].second}});
            }
            if (opt.format == "csv") res.extra_files.push_back({"_coeffs.csv", csv});
            else res.output["coefficients"] = arr;
            res.output["seed"] = opt.seed;
            res.output["tolerance"] = "absolute errors tracked per coefficient";
        } else {
            throw Error("manifest: series mode must be exact or float");
        }
    } else if (type == "pade-scan") {
        check_keys(t, {"type", "name", "base", "factors", "quasi_polynomial", "f0", "count", "orders"},
                   res.name);
        auto s = parse_perturbed(t, ctx);
        long N = t.contains("count") ? t["count"].get<long>() : 200;
        std::vector<std::pair<int, int>> orders;
        for (const auto& o : t.at("orders")) orders.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
        auto entries = pade_scan_series(s, N, orders);
        json ej = json::array();
        std::string csv = "L,M,re,im\n";
        for (const auto& e : entries) {
            json poles = json::array();
            for (const auto& z : e.poles) {
                poles.push_back(json{{"re", z.real()}, {"im", z.imag()}});
                csv += std::to_string(e.L) + "," + std::to_string(e.M) + "," +
                       std::to_string(z.real()) + "," + std::to_string(z.imag()) + "\n";
            }
            ej.push_back(json{{"L", e.L}, {"M", e.M}, {"ok", e.ok}, {"poles", poles}});
        }
        res.output = json{{"task", "pade-scan"}, {"seed", opt.seed}, {"entries", ej}};
        res.extra_files.push_back({"_poles.csv", csv});
    } else if (type == "step1-check") {
        check_keys(t, {"type", "name", "base", "factors", "quasi_polynomial", "f0", "d", "bad", "count"},
                   res.name);
        auto s = parse_perturbed(t, ctx);
        unsigned long d = t.at("d").get<unsigned long>();
        std::vector<long> bad;
        for (const auto& b : t.at("bad")) bad.push_back(b.get<long>());
        long N = t.contains("count") ? t["count"].get<long>() : 128;
        auto rep = step1_identity_check(s, bad, d, N);
        res.output = json{{"task", "step1-check"},
                          {"bad_classes_vanish", rep.bad_classes_vanish},
                          {"rank_half", rep.rank_half},
                          {"rank_full", rep.rank_full},
                          {"rank_stabilized", rep.rank_stabilized},
                          {"terms", rep.checked_terms}};
        if (!rep.bad_classes_vanish) res.failed = true;
    } else {
        throw Error("manifest: unknown task type \"" + type + "\"");
    }
    return res;
}

}  // namespace detail

// Runs every task in the manifest, writing one artifact per task into
// opt.out_dir. Returns the process exit code: 0 all decided, 2 some task
// undecided, 1 error.
inline int run_manifest(const Options& opt) {
    detail::Context ctx;
    json m;
    try {
        std::ifstream in(opt.manifest_path);
        if (!in) throw Error("cannot open manifest " + opt.manifest_path);
        in >> m;
        detail::check_keys(m, {"version", "fields", "sequences", "places", "tasks"}, "top level");
        if (!m.contains("version")) throw Error("manifest: missing version");
        ctx = detail::parse_context(m);
    } catch (const std::exception& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 1;
    }

    std::filesystem::create_directories(opt.out_dir);
    bool any_failed = false, any_undecided = false;
    const json& tasks = m.contains("tasks") ? m["tasks"] : json::array();

    std::vector<json> tasklist(tasks.begin(), tasks.end());
    std::vector<detail::TaskResult> results(tasklist.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= tasklist.size()) return;
            detail::TaskResult r;
            try {
                r = detail::run_task(tasklist[i], ctx, opt);
            } catch (const std::exception& e) {
                r.name = tasklist[i].contains("name") ? tasklist[i]["name"].get<std::string>()
                                                      : ("task" + std::to_string(i));
                r.failed = true;
                r.output = json{{"error", e.what()}};
            }
            results[i] = std::move(r);
        }
    };
    int jobs = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (auto& r : results) {
        if (opt.verbosity > 0) {
            std::cerr << "[adelic] task " << r.name << (r.failed ? " FAILED" : " ok") << "\n";
        }
        std::ofstream out(std::filesystem::path(opt.out_dir) / (r.name + ".json"));
        out << r.output.dump(2) << "\n";
        for (auto& [suffix, content] : r.extra_files) {
            std::ofstream ex(std::filesystem::path(opt.out_dir) / (r.name + suffix));
            ex << content;
        }
        any_failed = any_failed || r.failed;
        any_undecided = any_undecided || r.undecided;
    }
    if (any_failed) return 1;
    return any_undecided ? 2 : 0;
}

}  // namespace adelic::cli
