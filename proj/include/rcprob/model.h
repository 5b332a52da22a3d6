#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rcprob/expr.h"

namespace rcprob {

enum class TypeKind { Int, Nat, Bool, Real, Enum };

struct TypeRef {
    TypeKind kind = TypeKind::Int;
    std::string enum_name;  // TypeKind::Enum only
    SourcePos pos;

    std::string str() const;
    friend bool operator==(const TypeRef& a, const TypeRef& b) {
        return a.kind == b.kind && a.enum_name == b.enum_name;
    }
};

struct ConstDecl {
    std::string name;
    TypeRef type;
    ExprPtr value;  // null: loose
    SourcePos pos;
};

struct VarDecl {
    std::string name;
    TypeRef type;
    ExprPtr init;  // null: type default
    SourcePos pos;
};

struct EventDecl {
    std::string name;
    std::optional<TypeRef> type;
    SourcePos pos;
};

struct Param {
    std::string name;
    TypeRef type;
};

struct FunctionDecl {
    std::string name;
    std::vector<Param> params;
    TypeRef result;
    ExprPtr body;  // null: loose
    SourcePos pos;
};

/// Operation signatures are always loose; bodies come from a definitions block.
struct OperationDecl {
    std::string name;
    std::vector<Param> params;
    SourcePos pos;
};

enum class ActionKind { Skip, Assign, Comm, Call, Seq, If };

struct Action;
using ActionPtr = std::shared_ptr<const Action>;

struct Action {
    ActionKind kind = ActionKind::Skip;
    SourcePos pos;
    std::string target;          // Assign: variable; Comm: event; Call: operation
    ExprPtr value;               // Assign: rhs; Comm: sent value (Out) ; If: condition
    EventDir dir = EventDir::Out;  // Comm
    std::string input_var;       // Comm with `e?x`
    std::vector<ExprPtr> args;   // Call
    std::vector<ActionPtr> children;  // Seq (flattened), If (then, else)
};

/// Splits a (possibly nested) sequential composition into its atomic steps.
std::vector<ActionPtr> flatten_seq(const ActionPtr& a);
ActionPtr make_seq(std::vector<ActionPtr> parts, SourcePos pos = {});

enum class NodeKind { Initial, ProbJunction, State };

struct Node {
    NodeKind kind = NodeKind::State;
    std::string name;
    ActionPtr entry;  // State only
    ActionPtr exit;
    SourcePos pos;
};

struct Trigger {
    std::string event;
    EventDir dir = EventDir::In;
    std::string input_var;  // `e?x`
    ExprPtr output;         // `e!v`
    SourcePos pos;
};

struct Transition {
    std::string id;
    std::string source;
    std::string target;
    std::optional<Trigger> trigger;
    ExprPtr guard;  // null: true
    ExprPtr prob;   // only from probabilistic junctions
    ActionPtr action;
    SourcePos pos;
};

struct StateMachine {
    std::string name;
    std::vector<ConstDecl> constants;
    std::vector<VarDecl> variables;
    std::vector<EventDecl> events;
    std::vector<FunctionDecl> functions;
    std::vector<OperationDecl> operations;
    std::vector<Node> nodes;
    std::vector<Transition> transitions;
    SourcePos pos;

    const Node* find_node(const std::string& n) const;
    const EventDecl* find_event(const std::string& n) const;
    const Node& initial() const;
};

struct Endpoint {
    std::string node;
    std::string event;
    SourcePos pos;
    std::string str() const { return node + "." + event; }
};

struct Connection {
    Endpoint from;
    Endpoint to;
    bool async = false;
    SourcePos pos;
};

struct Platform {
    std::string name;
    std::vector<ConstDecl> constants;
    std::vector<VarDecl> variables;
    std::vector<EventDecl> events;
    std::vector<FunctionDecl> functions;
    std::vector<OperationDecl> operations;
    SourcePos pos;
};

struct Controller {
    std::string name;
    std::vector<std::string> requires_;
    std::vector<ConstDecl> constants;
    std::vector<VarDecl> variables;
    std::vector<EventDecl> events;
    std::vector<StateMachine> machines;
    std::vector<Connection> connections;
    SourcePos pos;

    const EventDecl* find_event(const std::string& n) const;
};

struct EnumDecl {
    std::string name;
    std::vector<std::string> literals;
    SourcePos pos;
};

struct ModelAst {
    std::string name;
    std::vector<Platform> platforms;
    std::vector<Controller> controllers;
    std::vector<Connection> connections;
    std::vector<EnumDecl> enums;
    SourcePos pos;

    const EnumDecl* find_enum(const std::string& n) const;
};

/// Parses `.rcm` text. Throws Error (SYNTAX, DUPLICATE, REFERENCE, STRUCTURE) on failure.
ModelAst parse_model(const std::string& text);

/// Canonical text form; parse_model(print_model(m)) is structurally equal to m.
std::string print_model(const ModelAst& m);
std::string print_action(const Action& a);

bool structurally_equal(const ModelAst& a, const ModelAst& b);

struct LooseSymbols {
    std::set<std::string> constants;   // qualified: Module::Container::Name
    std::set<std::string> functions;   // bare function names
    std::set<std::string> operations;  // bare operation names
};

LooseSymbols loose_symbols(const ModelAst& m);

}  // namespace rcprob
