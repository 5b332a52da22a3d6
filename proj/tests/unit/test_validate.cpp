#include <doctest.h>

#include <filesystem>
#include <set>

#include "oracles.h"
#include "rcprob/resolve.h"

using namespace rcprob;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kRules = {"WFREF-1", "WFREF-2", "WFProp-1", "WFProp-2", "WFProp-3", "WFProp-4", "WFExp-1",
                                      "WFExp-2", "WFExp-3", "WFExp-4",  "WFExp-5",  "WFExp-6",  "WFExp-7"};

const ModelAst& srw() {
    static ModelAst m = parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm")));
    return m;
}

std::vector<Diagnostic> check_text(const std::string& text) { return validate(srw(), parse_spec(text)); }

std::set<std::string> codes(const std::vector<Diagnostic>& ds) {
    std::set<std::string> out;
    for (const auto& d : ds) out.insert(d.code);
    return out;
}

const char* kPre = R"(
constants C1:
  SRWMod::SRWRP::MaxDist set to 3,
  SRWMod::SRWRP::MaxSteps set to 6, and
  SRWMod::SRWRP::Pl set to 0.5
defs D:
  pfunction Plus(v, maxv) = { return $$v }
  pfunction Minus(v, minv) = { return $$v }
  pfunction Update(v, maxv, origin) = { return $$v }
)";

std::string prop(const std::string& body, const std::string& with = "with constants C1 with definitions D") {
    return std::string(kPre) + "prob property p: " + body + "\n  " + with + "\n";
}

}  // namespace

TEST_SUITE("validate") {
    TEST_CASE("each rule is triggered by exactly one invalid corpus file") {
        std::map<std::string, std::vector<std::string>> by_rule;
        for (const auto& f : fs::directory_iterator(oracle::fixture("corpus/invalid"))) {
            for (const auto& c : codes(validate(srw(), parse_spec(oracle::slurp(f.path().string())))))
                if (kRules.count(c)) by_rule[c].push_back(f.path().filename().string());
        }
        for (const auto& rule : kRules) {
            INFO(rule);
            CHECK(by_rule[rule].size() == 1);
        }
    }

    TEST_CASE("the valid corpus and fixtures raise no errors") {
        std::vector<std::string> files = {oracle::fixture("fixtures/srw.rcp"), oracle::fixture("fixtures/srw_env.rcp"),
                                          oracle::fixture("fixtures/srw_qualitative.rcp")};
        for (const auto& f : fs::directory_iterator(oracle::fixture("corpus/valid"))) files.push_back(f.path().string());
        for (const auto& f : files) {
            INFO(f);
            auto ds = validate(srw(), parse_spec(oracle::slurp(f)));
            CHECK_FALSE(has_errors(ds));
            for (const auto& c : codes(ds)) CHECK(kRules.count(c) == 0);
        }
    }

    TEST_CASE("a name starting at the controller and skipping a level breaks both reference rules") {
        auto c = codes(check_text(prop("Forall [Globally SRWCtrl::SRWMod::x == 0]")));
        CHECK(c.count("WFREF-1"));
        CHECK(c.count("WFREF-2"));
    }

    TEST_CASE("is in takes the machine on the left") {
        CHECK(codes(check_text(prop("SRWMod::ctrl_ref::stm_ref is in SRWMod::ctrl_ref::stm_ref::Stuck"))).empty());
        CHECK(codes(check_text(prop("SRWMod::ctrl_ref::stm_ref::Stuck is in SRWMod::ctrl_ref::stm_ref"))).count("WFExp-5"));
        CHECK(codes(check_text(prop("SRWMod::ctrl_ref is in SRWMod::ctrl_ref::stm_ref::Stuck"))).count("WFExp-5"));
    }

    TEST_CASE("with clauses must name declarations of the right kind") {
        CHECK(codes(check_text(prop("Forall [Finally true]", "with constants D with definitions D"))).count("WFProp-2"));
        CHECK(codes(check_text(prop("Forall [Finally true]", "with constants C1 with definitions C1"))).count("WFProp-3"));
        CHECK(codes(check_text(prop("Forall [Finally true]", "with constants C1 with definitions D with modules C1")))
                  .count("WFProp-4"));
        CHECK(codes(check_text(prop("Forall [Finally true]", "with constants Nope with definitions D"))).count("WFProp-2"));
    }

    TEST_CASE("queries only at the top of a property body") {
        CHECK(codes(check_text(prop("Prob=? of [Finally true]"))).empty());
        CHECK(codes(check_text(prop("Prob=? of [Finally true] > 0.5"))).count("WFProp-1"));
        CHECK(codes(check_text(prop("not Prob=? of [Finally true]"))).count("WFProp-1"));
        CHECK(codes(check_text(prop("3 + 4"))).count("WFProp-1"));
    }

    TEST_CASE("expression typing rules") {
        CHECK(codes(check_text(prop("Forall [Globally (SRWMod::SRWRP::x /\\ true)]"))).count("WFExp-1"));
        CHECK(codes(check_text(prop("Forall [Globally SRWMod::SRWRP::x == false]"))).count("WFExp-2"));
        CHECK(codes(check_text(prop("Forall [Globally (true + 1) > 0]"))).count("WFExp-3"));
        CHECK(codes(check_text(prop("Forall [SRWMod::SRWRP::x == 0]"))).count("WFExp-6"));
        CHECK(codes(check_text(prop("Prob>=true of [Finally true]"))).count("WFExp-7"));
        CHECK(codes(check_text(prop("Prob=? of [Finally<=false true]"))).count("WFExp-7"));
    }

    TEST_CASE("every loose symbol must be covered") {
        std::string text = R"(
constants C2:
  SRWMod::SRWRP::MaxDist set to 3, and
  SRWMod::SRWRP::Pl set to 0.5
defs D:
  pfunction Plus(v, maxv) = { return $$v }
  pfunction Update(v, maxv, origin) = { return $$v }
prob property p: Forall [Finally true] with constants C2 with definitions D
)";
        auto ds = check_text(text);
        CHECK(has_errors(ds));
        bool steps = false, minus = false;
        for (const auto& d : ds) {
            steps = steps || d.message.find("MaxSteps") != std::string::npos;
            minus = minus || d.message.find("Minus") != std::string::npos;
        }
        CHECK(steps);
        CHECK(minus);
    }

    TEST_CASE("diagnostics carry positions and serialise as one JSON object per line") {
        auto ds = check_text(prop("Forall [Globally SRWRP::x <= 3]"));
        REQUIRE_FALSE(ds.empty());
        CHECK(ds[0].line > 0);
        CHECK(ds[0].col > 0);
        std::string j = to_json_line(ds[0]);
        CHECK(j.front() == '{');
        CHECK(j.find('\n') == std::string::npos);
        CHECK(j.find("\"code\":\"WFREF-1\"") != std::string::npos);
    }
}

TEST_SUITE("parse") {
    TEST_CASE("fixtures survive a print and reparse") {
        for (const char* f : {"fixtures/srw.rcp", "fixtures/srw_env.rcp", "fixtures/srw_qualitative.rcp",
                              "corpus/valid/tour.rcp"}) {
            INFO(f);
            SpecAst a = parse_spec(oracle::slurp(oracle::fixture(f)));
            CHECK(structurally_equal(parse_spec(print_spec(a)), a));
        }
        ModelAst m = parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm")));
        CHECK(structurally_equal(parse_model(print_model(m)), m));
    }

    TEST_CASE("syntax errors report where they happen") {
        try {
            parse_spec("label a = 1 +\nprob property p: #a");
            FAIL("expected a syntax error");
        } catch (const Error& e) {
            CHECK(e.code() == "SYNTAX");
            CHECK(e.pos().line == 2);
        }
        CHECK_THROWS_AS(parse_spec("label a = Finally true"), Error);
        CHECK_THROWS_AS(parse_model("module M { controller C { machine S { state A; } } "), Error);
    }

    TEST_CASE("duplicate declarations are rejected") {
        try {
            parse_spec("label a = true\nlabel a = false\n");
            FAIL("expected a duplicate");
        } catch (const Error& e) {
            CHECK(e.code() == "DUPLICATE");
        }
    }

    TEST_CASE("temporal operators bind loosest") {
        SpecAst s = parse_spec("prob property p: Forall [Globally Finally true => false]");
        const Expr& body = *s.all<ProbProperty>()[0]->body;
        const Expr& path = *body.children[0];
        CHECK(path.kind == ExprKind::Temporal);
        CHECK(path.op == Op::Globally);
        CHECK(path.children[0]->op == Op::Finally);
        CHECK(path.children[0]->children[0]->op == Op::Implies);
    }

    TEST_CASE("simulation clauses accept their parameters in any order") {
        SpecAst s = parse_spec(
            "prob property p: Prob=? of [Finally true] using sim with CI at n=100, and alpha=0.1\n"
            "prob property q: Prob=? of [Finally true] using sim with APMC at delta=0.01, epsilon=0.05\n");
        auto ps = s.all<ProbProperty>();
        REQUIRE(ps[0]->body->sim);
        CHECK(ps[0]->body->sim->method == SimMethod::CI);
        REQUIRE(ps[1]->body->sim);
        CHECK(ps[1]->body->sim->method == SimMethod::APMC);
    }
}
