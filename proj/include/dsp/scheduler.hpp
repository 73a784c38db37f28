#pragma once

#include <optional>
#include <vector>

#include "dsp/analyzer.hpp"

namespace dsp {

// A maximal run of deterministic statements followed by at most one
// generator. Only the final unit of a method may lack a generator.
struct ContinuationUnit {
    std::vector<int> stmts;  // slice of the total order, generator last
    std::optional<int> trailing_generator;
};

// Total order of one method's statements:
//   * every dependency edge is respected (definer before reader);
//   * generators keep their pairwise source order where dependencies allow;
//   * calculators and testers run as early as their dependencies permit,
//     ties broken by source order;
//   * verify statements run last (they only annotate, never prune).
std::vector<int> total_order(const MethodAnalysis& analysis, int stmt_count);

std::vector<ContinuationUnit> partition_units(const std::vector<int>& order,
                                              const std::vector<StmtClass>& classes);

struct ScheduledMethod {
    std::vector<int> order;
    std::vector<ContinuationUnit> units;
};

struct ScheduledModule {
    AnalyzedModule analyzed;
    std::vector<ScheduledMethod> methods;
};

ScheduledModule schedule(AnalyzedModule analyzed);

}  // namespace dsp
