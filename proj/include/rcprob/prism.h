#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rcprob/markov.h"

namespace rcprob {

/// Flattened PRISM identifiers and the qualified names they stand for.
class NameMap {
   public:
    struct Row {
        std::string ident, qualified, kind;
    };

    /// Identifier for `qualified` (segments joined with `_`); a clash with another name gets `_2`, `_3`, ...
    std::string mangle(const std::string& qualified, const std::string& kind = "name");
    /// Records an integer encoding such as pc=3 <-> Module::ctrl::stm::Move.
    void encoding(const std::string& ident, std::int64_t value, const std::string& qualified, const std::string& kind);

    const std::vector<Row>& rows() const { return rows_; }
    bool bijective() const;
    /// Tab-separated `ident<TAB>qualified<TAB>kind` lines.
    std::string tsv() const;

   private:
    std::vector<Row> rows_;
    std::map<std::string, std::string> by_qualified_;
    std::map<std::string, std::string> by_ident_;
};

/// Per-slot value range seen in a built model.
using SlotRanges = std::vector<std::pair<std::int64_t, std::int64_t>>;
SlotRanges slot_ranges(const MarkovModel& mm);
void merge_ranges(SlotRanges& into, const SlotRanges& more);

struct EmittedPair {
    std::string model, props, namemap, sweep;
};

struct EmitRequest {
    std::shared_ptr<const ClosedModel> closed;
    SlotRanges ranges;                             // union over every configuration being emitted
    std::vector<Valuation> sweep;                  // configurations of the loose constants
    std::vector<const ProbProperty*> properties;   // in source order
};

/// PRISM model (one module per machine and environment module) plus properties and the name table.
/// Throws Error("UNSUPPORTED") for constructs without a faithful PRISM rendering.
EmittedPair emit_prism(const EmitRequest& req);

/// PRISM text of a property body, e.g. `!E [ F "deadlock" ]`.
std::string translate_property(const Expr& body, const ClosedModel& cm, NameMap& names);

/// Syntax and declaration check for the PRISM subset produced by emit_prism. Returns one message per problem.
std::vector<std::string> validate_prism_model(const std::string& text);
std::vector<std::string> validate_prism_props(const std::string& text, const std::string& model_text);

}  // namespace rcprob
