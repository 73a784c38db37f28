#include "dsp/scheduler.hpp"

#include <algorithm>

namespace dsp {

std::vector<int> total_order(const MethodAnalysis& analysis, int stmt_count) {
    const auto& classes = analysis.classes;
    std::vector<int> pending_deps(stmt_count, 0);
    for (int i = 0; i < stmt_count; ++i)
        pending_deps[i] = static_cast<int>(analysis.deps[i].size());

    std::vector<bool> scheduled(stmt_count, false);
    std::vector<int> order;
    order.reserve(stmt_count);

    // Verify statements are held back to the very end; nothing depends on
    // them, so maximal lateness is always legal.
    std::vector<bool> deferred(stmt_count, false);
    int active = 0;
    for (int i = 0; i < stmt_count; ++i) {
        if (analysis.is_verify[i]) {
            deferred[i] = true;
        } else {
            ++active;
        }
    }

    auto ready = [&](int i) { return !scheduled[i] && pending_deps[i] == 0; };

    while (static_cast<int>(order.size()) < active) {
        int pick = -1;
        // Deterministic statements first, source-earliest.
        for (int i = 0; i < stmt_count; ++i) {
            if (deferred[i] || !ready(i)) continue;
            if (classes[i] != StmtClass::Generator) {
                pick = i;
                break;
            }
            if (pick < 0) pick = i;  // earliest ready generator as fallback
        }
        if (pick < 0) break;  // cycle: analyzer already rejected, defensive
        scheduled[pick] = true;
        order.push_back(pick);
        for (int r : analysis.readers[pick]) --pending_deps[r];
    }

    for (int i = 0; i < stmt_count; ++i)
        if (deferred[i]) order.push_back(i);
    return order;
}

std::vector<ContinuationUnit> partition_units(const std::vector<int>& order,
                                              const std::vector<StmtClass>& classes) {
    std::vector<ContinuationUnit> units;
    ContinuationUnit cur;
    for (int s : order) {
        cur.stmts.push_back(s);
        if (classes[s] == StmtClass::Generator) {
            cur.trailing_generator = s;
            units.push_back(std::move(cur));
            cur = ContinuationUnit{};
        }
    }
    if (!cur.stmts.empty()) units.push_back(std::move(cur));
    return units;
}

ScheduledModule schedule(AnalyzedModule analyzed) {
    ScheduledModule out;
    out.methods.reserve(analyzed.methods.size());
    for (std::size_t m = 0; m < analyzed.methods.size(); ++m) {
        const auto& ma = analyzed.methods[m];
        ScheduledMethod sm;
        sm.order = total_order(ma, static_cast<int>(ma.classes.size()));
        sm.units = partition_units(sm.order, ma.classes);
        out.methods.push_back(std::move(sm));
    }
    out.analyzed = std::move(analyzed);
    return out;
}

}  // namespace dsp
