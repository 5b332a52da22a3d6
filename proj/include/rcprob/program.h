#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/resolve.h"
#include "rcprob/value.h"

namespace rcprob {

enum class SlotKind { Var, Lock, Pc, Exit, ModVar, Latch };

/// One component of the flattened Markov state vector.
struct Slot {
    std::string name;  // short display name, e.g. "x", "lk", "pc"
    std::string path;  // qualified, e.g. SRWMod::SRWRP::x or SRWMod::ctrl_ref::stm_ref::pc
    SlotKind kind = SlotKind::Var;
    TypeRef type;
    bool bounded = false;  // pModule variable ranges
    std::int64_t lo = 0, hi = 0;
    int machine = -1;
};

enum ExitFlag : std::int64_t { EXIT_NONE = 0, EXIT_SUB_ACT = 1, EXIT_SUB_EXITED = 2 };

/// Compiled expression over a state vector.
struct CExpr {
    enum class K { Lit, Const, Slot, Param, Unary, Binary, Ite, Call, Deadlock, Init };
    K k = K::Lit;
    Op op = Op::None;
    Value lit;       // Lit; Const: the configured value of a loose constant
    int index = -1;  // Slot: slot index; Param: frame index; Call: function index; Const: constant index
    std::vector<CExpr> kids;
};

struct CFunction {
    std::string name;
    int nparams = 0;
    CExpr body;
};

/// An atomic action, executed as one Markov step.
struct CAction {
    enum class K { Skip, Assign, Comm, Call, If, Seq };
    K k = K::Skip;
    int slot = -1;  // Assign target; Comm input variable (-1: none)
    CExpr value;    // Assign rhs; Comm output value (when has_value); If condition
    bool has_value = false;
    int event_set = -1;
    EventDir dir = EventDir::Out;
    int op = -1;  // Call: operation index
    std::vector<CExpr> args;
    std::vector<CAction> kids;  // If: then/else; Seq
};

struct COperation {
    std::string name;
    int nparams = 0;
    std::vector<std::pair<int, CExpr>> assigns;  // sequential
};

/// A synchronisation set: event endpoints joined by (transitively closed) connections.
struct EventSet {
    std::string name;                // qualified name of the representative endpoint
    std::vector<std::string> members;  // qualified endpoint names
    std::vector<int> machines;       // machines owning an endpoint
    bool open = true;                // fewer than two machine endpoints: the environment takes part
    std::optional<TypeRef> type;
    int latch_slot = -1;
};

/// Event tag: set index and direction as seen by the emitting machine.
inline int make_tag(int set, EventDir d) { return set * 2 + (d == EventDir::Out ? 1 : 0); }
inline int tag_set(int tag) { return tag / 2; }
inline EventDir tag_dir(int tag) { return tag % 2 ? EventDir::Out : EventDir::In; }

struct CTrigger {
    int event_set = -1;
    EventDir dir = EventDir::In;
    int input_slot = -1;
    bool has_output = false;
    CExpr output;
};

struct TransInfo {
    std::string id;
    int source = -1, target = -1;  // node indices
    bool has_guard = false, has_prob = false;
    CExpr guard, prob;
    std::optional<CTrigger> trigger;
    std::vector<CAction> atoms;
    int act_point = -1;  // t_act; t_act_k = act_point + k
};

struct NodeInfo {
    std::string name;
    NodeKind kind = NodeKind::State;
    std::vector<CAction> entry, exit;
    int entering_point = -1;  // S_entering; S_a_e_k = entering_point + k
    int exit_point = -1;      // S_exit_1; S_exit_k = exit_point + k - 1
    std::vector<int> outgoing;  // transition indices, ordered by id
};

struct PointRole {
    enum class K { Node, TAct, Entry, Exit };
    K k = K::Node;
    int owner = -1;  // node or transition index
    int step = 0;    // TAct/Entry: actions done so far; Exit: k (1-based)
};

struct MachineProgram {
    std::string name, path;
    Owner scope;
    int lk_slot = -1, pc_slot = -1, exit_slot = -1;
    std::vector<NodeInfo> nodes;
    std::vector<TransInfo> trans;
    std::vector<std::string> points;  // pc value names, in encoding order
    std::vector<PointRole> roles;
    int initial_node = -1;
    std::map<std::string, int> event_sets;  // machine event name -> set
};

struct PCommandProgram {
    std::optional<int> sync_tag;
    std::string label;
    CExpr guard;
    struct Alt {
        CExpr prob;  // Lit 1 when absent
        std::vector<std::pair<int, CExpr>> updates;
    };
    std::vector<Alt> alts;
};

struct PModuleProgram {
    std::string name;
    std::vector<int> slots;
    std::vector<PCommandProgram> commands;
    std::vector<int> alphabet;  // sorted tags
};

struct ClosedModel;
class Program;

/// Lays out the state vector and compiles every machine and environment module of `cm`.
std::shared_ptr<Program> compile_program(ClosedModel& cm);

/// The compiled form of a closed model: state layout, functions, machines, environment modules.
class Program {
   public:
    std::vector<Slot> slots;
    std::vector<CFunction> functions;
    std::vector<COperation> operations;
    std::vector<MachineProgram> machines;
    std::vector<EventSet> event_sets;
    std::vector<PModuleProgram> pmodules;
    std::vector<std::int64_t> initial;

    int slot_of(const std::string& path) const;
    std::int64_t encode(const Value& v, int slot) const;
    Value decode(std::int64_t raw, int slot) const;
    std::string show(std::int64_t raw, int slot) const;

    /// Event tag of a reference `FQN.in/out` as seen from that endpoint.
    int tag_of(const ResolvedRef& ev, EventDir dir) const;
    std::string tag_name(int tag) const;

   private:
    friend class Compiler;
    friend std::shared_ptr<Program> compile_program(ClosedModel& cm);
    mutable std::vector<Rational> reals_;
    mutable std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> real_index_;
    std::map<std::string, int> slot_by_path_;
    std::map<std::string, int> set_by_endpoint_;  // "container::event" -> set
    std::map<std::string, bool> endpoint_is_platform_;
};

struct EvalEnv {
    const Program* prog = nullptr;
    const std::int64_t* state = nullptr;
    bool deadlock = false;
    bool is_init = false;
    const std::vector<Value>* frame = nullptr;
};

Value eval(const CExpr& e, const EvalEnv& env);

/// Compiles spec-side expressions (labels, reward guards, state formulas) against a closed model.
class Compiler {
   public:
    explicit Compiler(const ClosedModel& cm);

    /// Properties' `&F` and `@v` are resolved against the closed model's definitions and modules.
    CExpr spec_expr(const Expr& e) const;
    CExpr model_expr(const Expr& e, const Owner& scope, const std::vector<Param>* params = nullptr) const;
    int event_tag(const EventRef& ev) const;
    Value eval_const(const Expr& e) const;

   private:
    friend std::shared_ptr<Program> compile_program(ClosedModel& cm);
    struct SpecCtx {
        const std::vector<std::string>* params = nullptr;
        int depth = 0;
    };
    CExpr spec(const Expr& e, const SpecCtx& c) const;
    int pfunction(const std::string& name) const;
    int model_function(const FunctionDecl& f, const Owner& scope) const;
    CAction action(const Action& a, const Owner& scope, const MachineProgram& mp) const;
    int operation(const std::string& name) const;

    const ClosedModel& cm_;
    Program* prog_;  // functions are appended lazily
    mutable std::map<std::string, int> fn_index_;
    mutable std::map<std::string, int> op_index_;
};

}  // namespace rcprob
