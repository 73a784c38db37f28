#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsp/value.hpp"

namespace dsp::rt {

class Vm;
struct Executable;
using ExecPtr = std::shared_ptr<Executable>;

// A goal in continuation-passing form. exec() performs one bounded piece
// of work and returns the next goal, or the success/failure sentinel. The
// VM loop owns all iteration over choice points.
struct Executable {
    virtual ~Executable() = default;
    virtual ExecPtr exec(Vm& vm) = 0;
};

const ExecPtr& success();
const ExecPtr& failure();

// Placeholder for one variable of an activation. Cells are freely
// overwritten when a goal re-executes after backtracking; nothing is ever
// restored. Storage is owned by the activation (or by the driver for
// top-level outputs); goals that retain a cell pointer also retain its
// owner through their continuation chain.
struct VarCell {
    std::optional<Value> slot;
    std::uint64_t last_write = 0;

    bool bound() const { return slot.has_value(); }
    const Value& peek() const {
        if (!slot) throw RuntimeFault(FaultKind::EmptyCellRead, "read of an unbound variable");
        return *slot;
    }
};

using CellPtr = VarCell*;

// Owning handle used by emitted code and drivers; the paper-style
// "output variable" object handed into a module instance.
using CellRef = std::shared_ptr<VarCell>;
inline CellRef make_cell() { return std::make_shared<VarCell>(); }

struct EngineStats {
    std::uint64_t exec_steps = 0;
    std::uint64_t cp_pushed = 0;
    std::uint64_t cp_peak = 0;
    std::uint64_t dcall_commits = 0;
};

// Recorded per dcall commit when tracing is on: stack depth at the call's
// entry and the depth observed just before truncation.
struct DcallTraceEntry {
    std::size_t entry_depth;
    std::size_t depth_at_success;
};

// The inference engine: a stack of Executable choice points. call() drives
// a goal to its first solution, redo() resumes from the latest choice
// point. There is no trail; resumed goals rewrite their cells.
class Vm {
public:
    Vm();
    explicit Vm(Vm& parent);  // shares counters, violations, write clock

    bool call(ExecPtr goal);
    bool redo();

    void push_choice(ExecPtr goal);
    std::size_t depth() const { return stack_.size(); }
    // Discards choice points above `depth` (the dcall commit).
    void commit_to(std::size_t depth);

    void write(CellPtr cell, Value v) {
        cell->slot = std::move(v);
        cell->last_write = ++shared_->write_clock;
    }
    const Value& read(const VarCell& cell) const {
        if (!cell.slot)
            throw RuntimeFault(FaultKind::EmptyCellRead, "read of an unbound variable");
        if (shared_->check_overwrite) check_not_stale(cell);
        return *cell.slot;
    }

    void log_violation(VerifyViolation v);
    std::vector<VerifyViolation> take_violations();

    EngineStats& stats() { return shared_->stats; }
    const EngineStats& stats() const { return shared_->stats; }

    // Optional instrumentation.
    void enable_overwrite_check(bool on) { shared_->check_overwrite = on; }
    void enable_dcall_trace(bool on) { shared_->trace_dcalls = on; }
    const std::vector<DcallTraceEntry>& dcall_trace() const {
        return shared_->dcall_trace;
    }

private:
    struct Choice {
        ExecPtr goal;
        std::uint64_t write_stamp;
    };

    // State shared with nested engines (find runs the callee in a child Vm).
    struct SharedState {
        EngineStats stats;
        std::vector<VerifyViolation> violations;
        std::uint64_t write_clock = 0;
        bool check_overwrite = false;
        bool trace_dcalls = false;
        std::vector<DcallTraceEntry> dcall_trace;
    };

    ExecPtr pop_for_resume();
    bool drive(ExecPtr goal);
    void check_not_stale(const VarCell& cell) const;

    std::vector<Choice> stack_;
    std::shared_ptr<SharedState> shared_;
    // Overwrite-discipline tracking: after a resume, reads of cells written
    // between the popped choice point's push and the resume are stale.
    std::uint64_t stale_floor_ = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t resume_stamp_ = 0;
};

// Primitive generator: numeric range with step. Yields ints when all
// three bounds are ints, reals otherwise (callers coerce the bounds to the
// declared type first). Real mode keeps the endpoint within a relative
// epsilon of 1e-9.
ExecPtr make_for(const Value& from, const Value& to, const Value& step,
                 CellPtr out, ExecPtr cont);

// Primitive generator: one choice point per list element, left to right.
// Elements are coerced into the declared slot type as they are written.
ExecPtr make_select(const Value& list, CellPtr out, ExecPtr cont,
                    DType elem_dtype = DType::Any);

// Continuation that truncates the stack to `saved_depth` and proceeds;
// appended after a dcall'ed goal to commit to its first solution.
ExecPtr make_commit(std::size_t saved_depth, ExecPtr next);

// Runs `make_goal(outs, success)` to exhaustion in a child engine and
// returns the ordered list of solutions. A callee with one output
// contributes bare values; multiple outputs contribute one list per
// solution. Never leaves choice points in the parent.
using GoalFactory =
    std::function<ExecPtr(const std::vector<CellPtr>& outs, ExecPtr cont)>;
Value find_all(Vm& parent, std::size_t out_count, const GoalFactory& make_goal);

}  // namespace dsp::rt
