#pragma once

#include <json.hpp>

#include "commsim/distribution.hpp"
#include "commsim/eval.hpp"
#include "commsim/protocol.hpp"
#include "commsim/round2.hpp"

namespace commsim {

using json = nlohmann::json;

inline void to_json(json& j, const ComplexityProfile& c) {
    j = json{{"half_norm", c.q_norm_half},
             {"third_norm", c.q_norm_third},
             {"renyi_half", c.renyi_half},
             {"h_star", c.h_star},
             {"h_star_value", c.h_star_value}};
}

inline void to_json(json& j, const GroupPlan& plan) {
    j = json{{"sizes", plan.group_sizes},
             {"max_membership", plan.max_membership()},
             {"capacity_used", plan.capacity_used()}};
}

inline void to_json(json& j, const EstimationResult& r) {
    j = json{{"scheme", scheme_name(r.scheme)},
             {"n", r.config.n},
             {"d", r.config.d},
             {"b", r.config.b},
             {"q", r.config.q},
             {"seed", r.config.seed},
             {"l1", r.l1},
             {"l2", r.l2},
             {"lq", r.lq},
             {"total_bits", r.stats.total_bits}};
}

inline void to_json(json& j, const CellSummary& c) {
    j = json{{"scheme", c.scheme},
             {"family", c.family},
             {"param", c.param},
             {"d", c.d},
             {"n", c.n},
             {"b", c.b},
             {"q", c.q},
             {"trials", c.trials},
             {"seed", c.seed},
             {"mean_loss", c.mean_loss},
             {"stderr", c.stderr_value},
             {"single_trial", c.single_trial},
             {"theory_bound", c.has_bound ? json(c.theory_bound) : json(nullptr)}};
}

inline void to_json(json& j, const SweepSpec& s) {
    j = json{{"schemes", s.schemes}, {"family", s.family},   {"param", s.param},
             {"n_grid", s.n_grid},   {"d_grid", s.d_grid},   {"b_grid", s.b_grid},
             {"trials", s.trials},   {"q", s.q},             {"base_seed", s.base_seed}};
}

inline void from_json(const json& j, SweepSpec& s) {
    static const char* known[] = {"schemes", "family", "param",     "n_grid", "d_grid",
                                  "b_grid",  "trials", "base_seed", "q"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok |= item.key() == k;
        if (!ok) throw validation_error("unknown key '" + item.key() + "' in sweep spec");
    }
    if (j.contains("schemes")) j.at("schemes").get_to(s.schemes);
    if (!j.contains("family")) throw validation_error("sweep spec is missing the 'family' key");
    j.at("family").get_to(s.family);
    if (j.contains("param")) j.at("param").get_to(s.param);
    if (j.contains("n_grid")) j.at("n_grid").get_to(s.n_grid);
    if (j.contains("d_grid")) j.at("d_grid").get_to(s.d_grid);
    if (j.contains("b_grid")) j.at("b_grid").get_to(s.b_grid);
    if (j.contains("trials")) j.at("trials").get_to(s.trials);
    if (j.contains("q")) j.at("q").get_to(s.q);
    if (j.contains("base_seed")) j.at("base_seed").get_to(s.base_seed);
}

}  // namespace commsim
