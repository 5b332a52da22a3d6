#include "rcprob/scope.h"

namespace rcprob {

ModelIndex::ModelIndex(const ModelAst& m) : m_(&m) {
    auto add_decls = [&](const std::string& prefix, const std::vector<ConstDecl>& cs, const std::vector<VarDecl>& vs,
                         Owner owner) {
        for (const auto& c : cs) {
            const_by_path_[prefix + "::" + c.name] = static_cast<int>(consts_.size());
            consts_.push_back({prefix + "::" + c.name, c.name, c.type, c.value, owner});
        }
        for (const auto& v : vs) {
            var_by_path_[prefix + "::" + v.name] = static_cast<int>(vars_.size());
            vars_.push_back({prefix + "::" + v.name, v.name, v.type, v.init, owner});
        }
    };
    for (std::size_t p = 0; p < m.platforms.size(); ++p) {
        const auto& pl = m.platforms[p];
        add_decls(m.name + "::" + pl.name, pl.constants, pl.variables, Owner{static_cast<int>(p), -1, -1});
    }
    for (std::size_t c = 0; c < m.controllers.size(); ++c) {
        const auto& ct = m.controllers[c];
        std::string cpath = m.name + "::" + ct.name;
        add_decls(cpath, ct.constants, ct.variables, Owner{-1, static_cast<int>(c), -1});
        for (const auto& sm : ct.machines) {
            int mi = static_cast<int>(machines_.size());
            std::string mpath = cpath + "::" + sm.name;
            machines_.push_back({mpath, static_cast<int>(c), &ct, &sm});
            machine_by_path_[mpath] = mi;
            add_decls(mpath, sm.constants, sm.variables, Owner{-1, static_cast<int>(c), mi});
        }
    }
}

std::vector<int> ModelIndex::required_platforms(int controller) const {
    std::vector<int> out;
    if (controller < 0) return out;
    for (const auto& r : m_->controllers[controller].requires_) {
        for (std::size_t p = 0; p < m_->platforms.size(); ++p)
            if (m_->platforms[p].name == r) out.push_back(static_cast<int>(p));
    }
    return out;
}

ModelIndex::Symbol ModelIndex::lookup(const Owner& scope, const std::string& name) const {
    auto find_in = [&](auto pred) -> Symbol {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name && pred(vars_[i].owner)) return {Symbol::Kind::Var, static_cast<int>(i)};
        for (std::size_t i = 0; i < consts_.size(); ++i)
            if (consts_[i].name == name && pred(consts_[i].owner)) return {Symbol::Kind::Const, static_cast<int>(i)};
        return {};
    };
    if (scope.machine >= 0) {
        Symbol s = find_in([&](const Owner& o) { return o.machine == scope.machine; });
        if (s.kind != Symbol::Kind::None) return s;
    }
    if (scope.controller >= 0) {
        Symbol s = find_in([&](const Owner& o) { return o.machine < 0 && o.controller == scope.controller; });
        if (s.kind != Symbol::Kind::None) return s;
        for (int p : required_platforms(scope.controller)) {
            s = find_in([&](const Owner& o) { return o.platform == p; });
            if (s.kind != Symbol::Kind::None) return s;
        }
    }
    if (scope.platform >= 0) {
        Symbol s = find_in([&](const Owner& o) { return o.platform == scope.platform; });
        if (s.kind != Symbol::Kind::None) return s;
    }
    return {};
}

const FunctionDecl* ModelIndex::function(const Owner& scope, const std::string& name) const {
    if (scope.machine >= 0)
        for (const auto& f : machines_[scope.machine].sm->functions)
            if (f.name == name) return &f;
    std::vector<int> plats = required_platforms(scope.controller);
    if (scope.platform >= 0) plats.push_back(scope.platform);
    for (int p : plats)
        for (const auto& f : m_->platforms[p].functions)
            if (f.name == name) return &f;
    return nullptr;
}

const OperationDecl* ModelIndex::operation(const Owner& scope, const std::string& name) const {
    if (scope.machine >= 0)
        for (const auto& o : machines_[scope.machine].sm->operations)
            if (o.name == name) return &o;
    for (int p : required_platforms(scope.controller))
        for (const auto& o : m_->platforms[p].operations)
            if (o.name == name) return &o;
    return nullptr;
}

int ModelIndex::var_index(const std::string& path) const {
    auto it = var_by_path_.find(path);
    return it == var_by_path_.end() ? -1 : it->second;
}

int ModelIndex::const_index(const std::string& path) const {
    auto it = const_by_path_.find(path);
    return it == const_by_path_.end() ? -1 : it->second;
}

int ModelIndex::machine_index(const std::string& path) const {
    auto it = machine_by_path_.find(path);
    return it == machine_by_path_.end() ? -1 : it->second;
}

std::optional<std::pair<std::string, int>> ModelIndex::enum_literal(const QualifiedName& qn) const {
    if (qn.segments.size() != 2) return std::nullopt;
    const EnumDecl* e = m_->find_enum(qn.segments[0]);
    if (!e) return std::nullopt;
    for (std::size_t i = 0; i < e->literals.size(); ++i)
        if (e->literals[i] == qn.segments[1]) return std::make_pair(e->name, static_cast<int>(i));
    return std::nullopt;
}

}  // namespace rcprob
