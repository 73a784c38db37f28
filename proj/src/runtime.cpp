#include "dsp/runtime.hpp"

#include <algorithm>
#include <cmath>

namespace dsp::rt {

namespace {

struct Sentinel final : Executable {
    ExecPtr exec(Vm&) override {
        throw RuntimeFault(FaultKind::Internal, "sentinel executed");
    }
};

}  // namespace

const ExecPtr& success() {
    static const ExecPtr s = std::make_shared<Sentinel>();
    return s;
}

const ExecPtr& failure() {
    static const ExecPtr f = std::make_shared<Sentinel>();
    return f;
}

Vm::Vm() : shared_(std::make_shared<SharedState>()) { stack_.reserve(64); }

Vm::Vm(Vm& parent) : shared_(parent.shared_) { stack_.reserve(16); }

bool Vm::call(ExecPtr goal) { return drive(std::move(goal)); }

bool Vm::redo() { return drive(pop_for_resume()); }

bool Vm::drive(ExecPtr goal) {
    while (goal != nullptr) {
        if (goal == success()) return true;
        if (goal == failure()) {
            goal = pop_for_resume();
            continue;
        }
        ++shared_->stats.exec_steps;
        goal = goal->exec(*this);
    }
    return false;
}

void Vm::push_choice(ExecPtr goal) {
    stack_.push_back({std::move(goal), shared_->write_clock});
    ++shared_->stats.cp_pushed;
    shared_->stats.cp_peak = std::max<std::uint64_t>(shared_->stats.cp_peak, stack_.size());
}

ExecPtr Vm::pop_for_resume() {
    if (stack_.empty()) return nullptr;
    Choice c = std::move(stack_.back());
    stack_.pop_back();
    stale_floor_ = c.write_stamp;
    resume_stamp_ = shared_->write_clock;
    return std::move(c.goal);
}

void Vm::commit_to(std::size_t depth) {
    if (depth > stack_.size())
        throw RuntimeFault(FaultKind::Internal, "commit above current stack depth");
    if (shared_->trace_dcalls)
        shared_->dcall_trace.push_back({depth, stack_.size()});
    stack_.resize(depth);
    ++shared_->stats.dcall_commits;
}

void Vm::check_not_stale(const VarCell& cell) const {
    if (cell.last_write > stale_floor_ && cell.last_write <= resume_stamp_)
        throw RuntimeFault(FaultKind::StaleRead,
                           "read of a value written on an abandoned path");
}

void Vm::log_violation(VerifyViolation v) {
    shared_->violations.push_back(std::move(v));
}

std::vector<VerifyViolation> Vm::take_violations() {
    auto out = std::move(shared_->violations);
    shared_->violations.clear();
    return out;
}

namespace {

constexpr double kForEps = 1e-9;

inline bool within_real_bound(double v, double end) {
    return v <= end + kForEps * std::max(1.0, std::fabs(end));
}

// Generator steps advance themselves in place and re-push; one node per
// dispatch, not per yield.
struct ForRealStep final : Executable, std::enable_shared_from_this<ForRealStep> {
    double cur, end, step;
    CellPtr out;
    ExecPtr cont;

    ForRealStep(double c, double e, double s, CellPtr o, ExecPtr k)
        : cur(c), end(e), step(s), out(o), cont(std::move(k)) {}

    ExecPtr exec(Vm& vm) override {
        if (!within_real_bound(cur, end)) return failure();
        vm.write(out, Value::real(cur));
        cur += step;
        if (within_real_bound(cur, end)) vm.push_choice(shared_from_this());
        return cont;
    }
};

struct ForIntStep final : Executable, std::enable_shared_from_this<ForIntStep> {
    std::int64_t cur, end, step;
    CellPtr out;
    ExecPtr cont;

    ForIntStep(std::int64_t c, std::int64_t e, std::int64_t s, CellPtr o, ExecPtr k)
        : cur(c), end(e), step(s), out(o), cont(std::move(k)) {}

    ExecPtr exec(Vm& vm) override {
        if (cur > end) return failure();
        vm.write(out, Value::integer(cur));
        cur += step;
        if (cur <= end) vm.push_choice(shared_from_this());
        return cont;
    }
};

struct SelectStep final : Executable, std::enable_shared_from_this<SelectStep> {
    Value list;
    std::size_t index;
    CellPtr out;
    ExecPtr cont;
    DType elem_dtype;

    SelectStep(Value l, CellPtr o, ExecPtr k, DType t)
        : list(std::move(l)), index(0), out(o), cont(std::move(k)), elem_dtype(t) {}

    ExecPtr exec(Vm& vm) override {
        const auto& elems = list.as_list();
        if (index >= elems.size()) return failure();
        vm.write(out, ops::coerce(elems[index], elem_dtype));
        ++index;
        if (index < elems.size()) vm.push_choice(shared_from_this());
        return cont;
    }
};

struct CommitStep final : Executable {
    std::size_t saved_depth;
    ExecPtr next;

    CommitStep(std::size_t d, ExecPtr n) : saved_depth(d), next(std::move(n)) {}

    ExecPtr exec(Vm& vm) override {
        vm.commit_to(saved_depth);
        return next;
    }
};

}  // namespace

ExecPtr make_for(const Value& from, const Value& to, const Value& step,
                 CellPtr out, ExecPtr cont) {
    if (!from.is_numeric() || !to.is_numeric() || !step.is_numeric())
        throw RuntimeFault(FaultKind::DTypeFault, "for() bounds must be numeric");
    if (from.is_int() && to.is_int() && step.is_int()) {
        if (step.as_int() <= 0)
            throw RuntimeFault(FaultKind::NonPositiveStep,
                               "for() step must be positive, got " + step.to_string());
        return std::make_shared<ForIntStep>(from.as_int(), to.as_int(), step.as_int(),
                                            out, std::move(cont));
    }
    if (step.as_real() <= 0.0)
        throw RuntimeFault(FaultKind::NonPositiveStep,
                           "for() step must be positive, got " + step.to_string());
    return std::make_shared<ForRealStep>(from.as_real(), to.as_real(), step.as_real(),
                                         out, std::move(cont));
}

ExecPtr make_select(const Value& list, CellPtr out, ExecPtr cont, DType elem_dtype) {
    if (!list.is_list())
        throw RuntimeFault(FaultKind::DTypeFault,
                           std::string("select() needs a list, got ") +
                               dtype_name(list.dtype()));
    return std::make_shared<SelectStep>(list, out, std::move(cont), elem_dtype);
}

ExecPtr make_commit(std::size_t saved_depth, ExecPtr next) {
    return std::make_shared<CommitStep>(saved_depth, std::move(next));
}

Value find_all(Vm& parent, std::size_t out_count, const GoalFactory& make_goal) {
    std::vector<VarCell> storage(out_count);
    std::vector<CellPtr> outs;
    outs.reserve(out_count);
    for (auto& c : storage) outs.push_back(&c);

    Vm child(parent);
    Value::List collected;
    ExecPtr goal = make_goal(outs, success());
    for (bool found = child.call(std::move(goal)); found; found = child.redo()) {
        // Snapshot now: the cells are overwritten on backtracking.
        if (out_count == 1) {
            collected.push_back(storage[0].peek());
        } else {
            Value::List row;
            row.reserve(out_count);
            for (const auto& c : storage) row.push_back(c.peek());
            collected.push_back(Value::list(std::move(row)));
        }
    }
    return Value::list(std::move(collected));
}

}  // namespace dsp::rt
