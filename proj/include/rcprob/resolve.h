#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/model.h"
#include "rcprob/scope.h"
#include "rcprob/spec.h"

namespace rcprob {

enum class RefKind {
    Module,
    Platform,
    Controller,
    Machine,
    State,
    Junction,
    Transition,
    Variable,
    Constant,
    Event,
    Function,
    Operation,
    EnumLiteral,
    SpecConstant,
};
const char* to_string(RefKind k);

struct ResolvedRef {
    RefKind kind = RefKind::Module;
    std::vector<std::string> path;  // canonical, fully qualified
    std::optional<TypeRef> type;    // variables, constants, typed events, function results
    int machine = -1;               // Machine itself, or the machine owning a node/transition/event
    int index = -1;                 // Variable/Constant: ModelIndex index; EnumLiteral: ordinal
    std::string enum_name;

    friend bool operator==(const ResolvedRef& a, const ResolvedRef& b) {
        return a.kind == b.kind && a.path == b.path && a.index == b.index;
    }
};

/// Canonical `A::B::C` rendering of a reference; resolving it yields the same reference.
std::string pretty(const ResolvedRef& r);

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::string file;
    int line = 0;
    int col = 0;
};

std::string to_json_line(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& ds);

/// Name resolution over the containment tree
/// module → platform/controller → machine → node/transition/var/const/event/function.
class Resolver {
   public:
    Resolver(const ModelAst& model, const SpecAst* spec = nullptr);

    const ModelIndex& index() const { return index_; }
    const ModelAst& model() const { return *model_; }
    const SpecAst* spec() const { return spec_; }

    /// Appends WFREF-1 / WFREF-2 / SCOPE diagnostics on failure (and WFREF-1 even when
    /// the name still resolves through a non-module head).
    std::optional<ResolvedRef> resolve(const QualifiedName& qn, std::vector<Diagnostic>* diags,
                                       const std::string& file = {}) const;

   private:
    struct Entity {
        std::string name;
        std::map<std::string, int> children;
        ResolvedRef ref;
    };
    int add(int parent, const std::string& name, ResolvedRef ref);
    void alias(int parent, int child);

    const ModelAst* model_;
    const SpecAst* spec_;
    ModelIndex index_;
    std::vector<Entity> ents_;
    std::multimap<std::string, int> by_name_;
};

struct ResolveResult {
    std::optional<ResolvedRef> ref;
    std::vector<Diagnostic> diagnostics;
};

ResolveResult resolve_fqn(const ModelAst& model, const SpecAst& spec, const QualifiedName& qn);

struct TypeClass {
    enum class Kind { Boolean, Numeric, Set, Enum, FormulaQuery, PathFormula, RewardPath, Entity, Any, Error };
    Kind kind = Kind::Any;
    std::string enum_name;        // Enum; Set of Enum
    Kind elem = Kind::Any;        // Set only

    static TypeClass of(Kind k) { return TypeClass{k, {}, Kind::Any}; }
    std::string str() const;
    friend bool operator==(const TypeClass& a, const TypeClass& b) {
        return a.kind == b.kind && a.enum_name == b.enum_name && a.elem == b.elem;
    }
};

TypeClass type_class_of(const TypeRef& t);

/// Classification context for a spec expression.
struct ClassifyContext {
    const ProbProperty* property = nullptr;  // supplies definitions/modules for `&F` and `@v`
    bool inside_path = false;
};

/// Classifies a spec-side expression. Throws Error("TYPE" | "SCOPE" | ..., msg) on the first error.
TypeClass classify(const Expr& e, const Resolver& r, const ClassifyContext& ctx = {});

enum class ModelKind { Dtmc, Mdp };

struct ValidateOptions {
    std::string model_file;
    std::string spec_file;
    std::optional<ModelKind> kind;  // when known, min/max queries on dtmc produce a warning
};

/// Model-only checks (types of guards/actions, declared events, reachability of nodes).
std::vector<Diagnostic> validate_model(const ModelAst& model, const ValidateOptions& opts = {});

/// Full well-formedness check of a spec against its model (model checks included).
std::vector<Diagnostic> validate(const ModelAst& model, const SpecAst& spec, const ValidateOptions& opts = {});

/// Resolves a property's `with` clauses (inline bodies or references by name).
const ConstantsConfig* property_constants(const SpecAst& spec, const ProbProperty& p);
const DefinitionsDecl* property_definitions(const SpecAst& spec, const ProbProperty& p);
const PModulesDecl* property_modules(const SpecAst& spec, const ProbProperty& p);

}  // namespace rcprob
