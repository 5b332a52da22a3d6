#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/model.h"

namespace rcprob {

/// Owner of a declaration: exactly one of the three indices is set (the
/// controller index is also set for machine-owned declarations).
struct Owner {
    int platform = -1;
    int controller = -1;
    int machine = -1;  // global machine index
};

struct VarInfo {
    std::string path;  // Module::Container::name
    std::string name;
    TypeRef type;
    ExprPtr init;
    Owner owner;
};

struct ConstInfo {
    std::string path;
    std::string name;
    TypeRef type;
    ExprPtr value;  // null when loose
    Owner owner;
};

struct MachineInfo {
    std::string path;  // Module::ctrl::machine
    int controller = -1;
    const Controller* ctrl = nullptr;
    const StateMachine* sm = nullptr;
};

/// Flattened, index-based view of a model used by scoping, building and emission.
class ModelIndex {
   public:
    explicit ModelIndex(const ModelAst& m);

    const ModelAst& model() const { return *m_; }
    const std::vector<VarInfo>& vars() const { return vars_; }
    const std::vector<ConstInfo>& consts() const { return consts_; }
    const std::vector<MachineInfo>& machines() const { return machines_; }

    struct Symbol {
        enum class Kind { None, Var, Const };
        Kind kind = Kind::None;
        int index = -1;
    };

    /// Bare-name lookup as seen from `scope`: the container's own declarations,
    /// then its controller's, then those of the platforms the controller requires.
    Symbol lookup(const Owner& scope, const std::string& name) const;

    const FunctionDecl* function(const Owner& scope, const std::string& name) const;
    const OperationDecl* operation(const Owner& scope, const std::string& name) const;

    int var_index(const std::string& path) const;
    int const_index(const std::string& path) const;
    int machine_index(const std::string& path) const;

    /// `E::C` → (enum name, ordinal).
    std::optional<std::pair<std::string, int>> enum_literal(const QualifiedName& qn) const;

    /// Required platforms of a controller (indices).
    std::vector<int> required_platforms(int controller) const;

    Owner machine_owner(int machine) const { return Owner{-1, machines_[machine].controller, machine}; }

   private:
    const ModelAst* m_;
    std::vector<VarInfo> vars_;
    std::vector<ConstInfo> consts_;
    std::vector<MachineInfo> machines_;
    std::map<std::string, int> var_by_path_, const_by_path_, machine_by_path_;
};

}  // namespace rcprob
