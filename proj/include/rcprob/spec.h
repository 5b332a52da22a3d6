#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcprob/expr.h"

namespace rcprob {

struct ValueSpec {
    enum class Kind { Exactly, FromSet, Range };
    Kind kind = Kind::Exactly;
    std::vector<ExprPtr> values;  // Exactly: one value; FromSet: the listed values
    ExprPtr lo, hi, step;         // Range
    bool step_given = false;
    SourcePos pos;
};

struct ConstEntry {
    QualifiedName name;
    ValueSpec spec;
};

struct ConstantsConfig {
    std::string name;
    std::vector<ConstEntry> entries;
    SourcePos pos;
};

struct ConstantDecl {
    std::string name;
    ExprPtr value;
    SourcePos pos;
};

struct LabelDecl {
    std::string name;
    ExprPtr body;
    SourcePos pos;
};

struct FormulaDecl {
    std::string name;
    ExprPtr body;
    SourcePos pos;
};

struct RewardItem {
    std::optional<EventRef> event;  // transition reward when present
    ExprPtr guard;
    ExprPtr value;
    SourcePos pos;
};

struct RewardsDecl {
    std::string name;
    std::vector<RewardItem> items;
    SourcePos pos;
};

struct PFunction {
    std::string name;
    std::vector<std::string> params;
    ExprPtr body;
    SourcePos pos;
};

struct PAssignment {
    QualifiedName target;
    ExprPtr value;
    SourcePos pos;
};

struct POperation {
    std::string name;
    std::vector<std::string> params;
    std::vector<PAssignment> body;
    SourcePos pos;
};

struct DefinitionsDecl {
    std::string name;
    std::vector<PFunction> functions;
    std::vector<POperation> operations;
    SourcePos pos;

    const PFunction* find_function(const std::string& n) const;
    const POperation* find_operation(const std::string& n) const;
};

struct PVar {
    std::string name;
    bool is_bool = false;
    ExprPtr lo, hi;  // integer range when !is_bool
    ExprPtr init;    // null: lower bound / false
    SourcePos pos;
};

struct PUpdate {
    std::string var;
    ExprPtr value;
    SourcePos pos;
};

/// One probabilistic alternative of a command; no updates means `skip`.
struct PAlternative {
    ExprPtr prob;  // null: 1
    std::vector<PUpdate> updates;
};

struct PCommand {
    std::optional<EventRef> sync;
    ExprPtr guard;
    std::vector<PAlternative> alternatives;
    SourcePos pos;
};

struct PModule {
    std::string name;
    std::vector<PVar> vars;
    std::vector<PCommand> commands;
    SourcePos pos;
};

struct PModulesDecl {
    std::string name;
    std::vector<PModule> modules;
    SourcePos pos;
};

/// A `with` clause: absent, an inline body, or a reference by name.
template <typename T>
struct WithClause {
    enum class Kind { Absent, Inline, Ref };
    Kind kind = Kind::Absent;
    std::string ref;
    T inline_value{};
    SourcePos pos;

    bool present() const { return kind != Kind::Absent; }
};

struct ProbProperty {
    std::string name;
    ExprPtr body;
    WithClause<ConstantsConfig> constants;
    WithClause<DefinitionsDecl> definitions;
    WithClause<PModulesDecl> modules;
    SourcePos pos;
};

using Statement = std::variant<ConstantDecl, ConstantsConfig, LabelDecl, FormulaDecl, RewardsDecl,
                               DefinitionsDecl, PModulesDecl, ProbProperty>;

const char* statement_kind(const Statement& s);
const std::string& statement_name(const Statement& s);
SourcePos statement_pos(const Statement& s);

struct SpecAst {
    std::vector<Statement> statements;

    template <typename T>
    const T* find(const std::string& name) const {
        for (const auto& s : statements)
            if (const T* p = std::get_if<T>(&s); p && p->name == name) return p;
        return nullptr;
    }
    template <typename T>
    std::vector<const T*> all() const {
        std::vector<const T*> out;
        for (const auto& s : statements)
            if (const T* p = std::get_if<T>(&s)) out.push_back(p);
        return out;
    }
};

/// Parses `.rcp` text. Throws Error (SYNTAX, DUPLICATE) on failure.
SpecAst parse_spec(const std::string& text);

std::string print_spec(const SpecAst& s);
bool structurally_equal(const SpecAst& a, const SpecAst& b);

}  // namespace rcprob
