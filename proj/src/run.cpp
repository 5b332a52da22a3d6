#include "rcprob/run.h"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rcprob/prism.h"

namespace rcprob {

namespace fs = std::filesystem;

namespace {

struct IoError {
    std::string msg;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError{"cannot read '" + path + "'"};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text)) throw IoError{"cannot write '" + p.string() + "'"};
}

std::string group_key(const SpecAst& spec, const ProbProperty& p) {
    auto part = [&](const auto& w) -> std::string {
        using K = typename std::decay_t<decltype(w)>::Kind;
        if (w.kind == K::Ref) return w.ref;
        if (w.kind == K::Inline) return p.name;
        return "";
    };
    (void)spec;
    std::string d = part(p.definitions), m = part(p.modules);
    if (m.empty()) return d;
    return d + (d.empty() ? "" : "_") + m;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Diagnostic job_diagnostic(const JobRecord& r, const std::string& spec_file) {
    Diagnostic d;
    d.code = r.error_code;
    d.message = "property '" + r.property + "'" + (r.config.empty() ? "" : " [" + r.config + "]") + ": " + r.error;
    d.file = spec_file;
    return d;
}

std::string number_text(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

std::vector<Job> sweep_experiments(const SpecAst& spec, const Resolver& r, const std::vector<const ProbProperty*>& props) {
    std::vector<Job> jobs;
    for (const ProbProperty* p : props) {
        std::vector<Valuation> configs{{}};
        if (const ConstantsConfig* c = property_constants(spec, *p)) configs = expand_sweep(*c, r);
        for (auto& v : configs) jobs.push_back(Job{p, std::move(v), group_key(spec, *p)});
    }
    return jobs;
}

std::string record_json(const JobRecord& r, bool timings) {
    nlohmann::ordered_json j;
    j["property"] = r.property;
    j["config"] = r.config;
    if (r.result) {
        const CheckResult& c = *r.result;
        if (c.kind == CheckResult::Kind::Boolean) {
            j["verdict"] = c.verdict;
            if (c.engine == "smc") j["estimate"] = c.value;
        } else if (std::isinf(c.value)) {
            j["value"] = c.value > 0 ? "Infinity" : "-Infinity";
        } else {
            j["value"] = c.value;
        }
        j["mode"] = c.mode;
        j["engine"] = c.engine;
    }
    if (r.estimate) {
        const Estimate& e = *r.estimate;
        nlohmann::ordered_json s;
        s["method"] = to_string(e.method);
        s["n"] = e.n;
        if (e.method == SimMethod::CI || e.method == SimMethod::ACI) {
            s["w"] = e.w;
            s["alpha"] = e.alpha;
        } else if (e.method == SimMethod::APMC) {
            s["epsilon"] = e.epsilon;
            s["delta"] = e.delta;
        } else {
            s["alpha"] = e.alpha;
            s["delta"] = e.delta;
            s["decision"] = e.decision == Estimate::Decision::AcceptH0 ? "accept-H0"
                            : e.decision == Estimate::Decision::AcceptH1 ? "accept-H1"
                                                                          : "none";
        }
        s["seed"] = e.seed;
        s["capped"] = e.capped;
        j["smc"] = s;
    }
    j["states"] = r.states;
    j["transitions"] = r.transitions;
    j["buildMs"] = timings ? r.build_ms : 0.0;
    j["checkMs"] = timings && r.result ? r.result->check_ms : 0.0;
    if (!r.error_code.empty()) j["error"] = {{"code", r.error_code}, {"message", r.error}};
    return j.dump();
}

std::string report_table(const RunOutcome& o, bool timings) {
    std::vector<std::vector<std::string>> rows{{"property", "config", "result", "mode", "states", "transitions", "build ms", "check ms"}};
    for (const auto& r : o.records) {
        std::string res;
        std::string mode;
        if (!r.error_code.empty()) {
            res = "error " + r.error_code;
        } else if (r.result) {
            const CheckResult& c = *r.result;
            res = c.kind == CheckResult::Kind::Boolean ? (c.verdict ? "true" : "false") : number_text(c.value);
            mode = c.mode + "/" + c.engine;
        }
        std::ostringstream b, k;
        b << std::fixed << std::setprecision(1) << (timings ? r.build_ms : 0.0);
        k << std::fixed << std::setprecision(1) << (timings && r.result ? r.result->check_ms : 0.0);
        rows.push_back({r.property, r.config.empty() ? "-" : r.config, res, mode, std::to_string(r.states),
                        std::to_string(r.transitions), b.str(), k.str()});
    }
    std::vector<std::size_t> w(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], row[i].size());
    std::ostringstream os;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << row[i];
            if (i + 1 < row.size()) os << std::string(w[i] - row[i].size() + 2, ' ');
        }
        os << "\n";
    }
    for (const auto& d : o.diagnostics)
        os << (d.severity == Diagnostic::Severity::Error ? "error " : "warning ") << d.code << ": " << d.message << "\n";
    return os.str();
}

RunOutcome run(const RunPlan& plan) {
    RunOutcome out;
    std::shared_ptr<const ModelAst> model;
    std::shared_ptr<const SpecAst> spec;
    const ModelKind kind = plan.kind.value_or(plan.engine == Engine::Smc ? ModelKind::Dtmc : ModelKind::Mdp);
    try {
        std::string mt = slurp(plan.model_path), st = slurp(plan.spec_path);
        auto syntax = [&](const Error& e, const std::string& file) {
            Diagnostic d;
            d.code = e.code();
            d.message = e.message();
            d.file = file;
            d.line = e.pos().line;
            d.col = e.pos().col;
            out.diagnostics.push_back(d);
            out.exit_code = 2;
        };
        try {
            model = std::make_shared<const ModelAst>(parse_model(mt));
        } catch (const Error& e) {
            syntax(e, plan.model_path);
        }
        try {
            spec = std::make_shared<const SpecAst>(parse_spec(st));
        } catch (const Error& e) {
            syntax(e, plan.spec_path);
        }
        if (out.exit_code) return out;
        if (plan.engine == Engine::Smc && kind != ModelKind::Dtmc) {
            Diagnostic d;
            d.code = "USAGE";
            d.message = "the smc engine simulates dtmcs only; use --kind dtmc";
            out.diagnostics.push_back(d);
            out.exit_code = 2;
            return out;
        }

        ValidateOptions vo{plan.model_path, plan.spec_path, kind};
        out.diagnostics = validate(*model, *spec, vo);
        if (has_errors(out.diagnostics)) {
            out.exit_code = 2;
            return out;
        }

        std::vector<const ProbProperty*> props;
        for (const ProbProperty* p : spec->all<ProbProperty>())
            if (fnmatch(plan.prop_glob.c_str(), p->name.c_str(), 0) == 0) props.push_back(p);
        Resolver resolver(*model, spec.get());
        std::vector<Job> jobs = sweep_experiments(*spec, resolver, props);

        fs::create_directories(plan.out_dir);
        const std::string stem = fs::path(plan.model_path).stem().string();

        if (plan.engine == Engine::Emit) {
            // One PRISM model per definitions/modules group; constants stay symbolic.
            std::map<std::string, std::vector<const Job*>> groups;
            std::vector<std::string> order;
            for (const auto& j : jobs) {
                if (!groups.count(j.group)) order.push_back(j.group);
                groups[j.group].push_back(&j);
            }
            for (const auto& g : order) {
                EmitRequest req;
                std::vector<std::string> seen;
                try {
                    for (const Job* j : groups[g]) {
                        if (std::find(req.properties.begin(), req.properties.end(), j->property) == req.properties.end())
                            req.properties.push_back(j->property);
                        std::string key = valuation_str(j->config);
                        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                        seen.push_back(key);
                        auto cm = instantiate(model, spec, j->config, property_definitions(*spec, *j->property),
                                              property_modules(*spec, *j->property), kind);
                        auto mm = build_markov(cm, BuildOptions{plan.max_states});
                        merge_ranges(req.ranges, slot_ranges(mm));
                        if (!req.closed) req.closed = cm;
                        req.sweep.push_back(j->config);
                    }
                    EmittedPair ep = emit_prism(req);
                    const std::string base = stem + (g.empty() ? "" : "_" + g);
                    for (const auto& [ext, text] : std::vector<std::pair<std::string, std::string>>{
                             {".prism", ep.model}, {".props", ep.props}, {".namemap.tsv", ep.namemap}, {".sweep", ep.sweep}}) {
                        fs::path p = fs::path(plan.out_dir) / (base + ext);
                        write_file(p, text);
                        out.files.push_back(p.string());
                    }
                } catch (const Error& e) {
                    Diagnostic d;
                    d.code = e.code();
                    d.message = "emission of group '" + (g.empty() ? std::string("default") : g) + "': " + e.message();
                    d.file = plan.spec_path;
                    out.diagnostics.push_back(d);
                    out.exit_code = 2;
                }
            }
            return out;
        }

        // Jobs sharing a build (group and configuration) run together; builds run in parallel.
        std::map<std::string, std::vector<std::size_t>> builds;
        std::vector<std::string> build_order;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            std::string key = jobs[i].group + "\n" + valuation_str(jobs[i].config);
            if (!builds.count(key)) build_order.push_back(key);
            builds[key].push_back(i);
        }
        out.records.resize(jobs.size());
        std::atomic<std::size_t> cursor{0};
        auto worker = [&] {
            for (std::size_t b; (b = cursor++) < build_order.size();) {
                const auto& members = builds[build_order[b]];
                const Job& first = jobs[members[0]];
                std::optional<MarkovModel> mm;
                std::string fail_code, fail_msg;
                double build_ms = 0;
                auto t0 = std::chrono::steady_clock::now();
                try {
                    auto cm = instantiate(model, spec, first.config, property_definitions(*spec, *first.property),
                                          property_modules(*spec, *first.property), kind);
                    mm = build_markov(cm, BuildOptions{plan.max_states});
                } catch (const Error& e) {
                    fail_code = e.code();
                    fail_msg = e.message();
                }
                build_ms = ms_since(t0);
                for (std::size_t i : members) {
                    JobRecord& r = out.records[i];
                    r.property = jobs[i].property->name;
                    r.config = valuation_str(jobs[i].config);
                    r.build_ms = build_ms;
                    if (!mm) {
                        r.error_code = fail_code;
                        r.error = fail_msg;
                        continue;
                    }
                    r.states = mm->num_states();
                    r.transitions = mm->num_edges();
                    try {
                        CheckOptions co;
                        if (plan.tol) co.vi.tol = *plan.tol;
                        if (plan.engine == Engine::Smc) {
                            SmcOptions so;
                            so.seed = plan.seed;
                            so.exact = co;
                            Estimate est;
                            r.result = check_property_smc(*mm, *jobs[i].property, so, &est);
                            r.estimate = est;
                        } else {
                            r.result = check_property(*mm, *jobs[i].property, co);
                        }
                    } catch (const Error& e) {
                        r.error_code = e.code();
                        r.error = e.message();
                    }
                }
            }
        };
        unsigned n = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
        n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, build_order.size())));
        std::vector<std::thread> pool;
        for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        for (const auto& r : out.records) {
            if (!r.error_code.empty()) {
                out.diagnostics.push_back(job_diagnostic(r, plan.spec_path));
                out.exit_code = 2;
            } else if (r.result && r.result->kind == CheckResult::Kind::Boolean && !r.result->verdict &&
                       out.exit_code == 0) {
                out.exit_code = 1;
            }
        }

        std::string jsonl;
        for (const auto& r : out.records) jsonl += record_json(r, plan.timings) + "\n";
        fs::path jp = fs::path(plan.out_dir) / "report.jsonl", tp = fs::path(plan.out_dir) / "report.txt";
        write_file(jp, jsonl);
        write_file(tp, report_table(out, plan.timings));
        out.files = {jp.string(), tp.string()};
    } catch (const IoError& e) {
        Diagnostic d;
        d.code = "IO";
        d.message = e.msg;
        out.diagnostics.push_back(d);
        out.exit_code = 3;
    } catch (const fs::filesystem_error& e) {
        Diagnostic d;
        d.code = "IO";
        d.message = e.what();
        out.diagnostics.push_back(d);
        out.exit_code = 3;
    }
    return out;
}

}  // namespace rcprob
