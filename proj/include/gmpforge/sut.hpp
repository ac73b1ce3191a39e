#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmpforge/cfg.hpp"
#include "gmpforge/value.hpp"

namespace gmpforge {

inline constexpr int default_step_limit = 100'000;
inline constexpr int default_recursion_limit = 10'000;
inline constexpr std::int64_t default_numeric_bound = 1'000'000;
inline constexpr std::size_t default_text_bound = 256;

// Per-kind input bounds applied before a component runs. Numeric inputs are
// clamped into [-numeric_abs_max, numeric_abs_max]; text is truncated.
struct InputClamp {
    std::int64_t numeric_abs_max = default_numeric_bound;
    std::size_t text_max_chars = default_text_bound;
};

// Internal control-flow token thrown when an execution guard trips; invoke()
// converts it into a failed response carrying the partial trace.
struct GuardTripped {};

// Records the node visits of one instrumented execution and enforces the
// step and recursion guards.
class Tracer {
public:
    Tracer(int step_limit, int recursion_limit)
        : step_limit_(step_limit), recursion_limit_(recursion_limit) {
        trace_.visited.reserve(64);
    }

    void visit(int node) {
        if (static_cast<int>(trace_.visited.size()) >= step_limit_) throw GuardTripped{};
        trace_.visited.push_back(node);
    }

    int steps() const { return static_cast<int>(trace_.visited.size()); }
    ExecutionTrace take() { return std::move(trace_); }

    // RAII guard for recursive component bodies.
    class DepthGuard {
    public:
        explicit DepthGuard(Tracer& tracer) : tracer_(tracer) {
            if (++tracer_.depth_ > tracer_.recursion_limit_) {
                // The destructor will not run when the constructor throws.
                --tracer_.depth_;
                throw GuardTripped{};
            }
        }
        ~DepthGuard() { --tracer_.depth_; }
        DepthGuard(const DepthGuard&) = delete;
        DepthGuard& operator=(const DepthGuard&) = delete;

    private:
        Tracer& tracer_;
    };

private:
    ExecutionTrace trace_;
    int step_limit_;
    int recursion_limit_;
    int depth_ = 0;
};

// The outcome of invoking a component: the returned value (absent when the
// run failed on a guard or a domain error) and the recorded trace, which is
// partial when a guard tripped.
struct SutResponse {
    std::optional<RuntimeValue> value;
    ExecutionTrace trace;
    bool failed = false;
};

using SutBody =
    std::function<std::optional<RuntimeValue>(std::span<const RuntimeValue>, Tracer&)>;

// One instrumented component: its typing, its hand-declared control-flow
// graph, the traced implementation, and the execution guards.
struct SutDescriptor {
    std::string name;
    Signature signature;
    CfgGraph graph;
    SutBody body;
    int step_limit = default_step_limit;
    int recursion_limit = default_recursion_limit;
    InputClamp clamp;
};

// The fixed corpus of 20 components. Built once, immutable afterwards.
const std::vector<SutDescriptor>& registry();

// Case/punctuation-insensitive lookup; also accepts the historical aliases
// ("True or false", "And/Or", ...). Returns nullptr when unknown.
const SutDescriptor* find_sut(std::string_view name);

// Position of a component in the registry; used for stable seed derivation.
std::size_t registry_index(const SutDescriptor& sut);

// Filesystem-friendly lowercase name, e.g. "Euclidean - Iterative" ->
// "euclidean-iterative".
std::string sut_slug(std::string_view name);

RuntimeValue clamp_input(const RuntimeValue& value, const InputClamp& clamp);

// Runs the component on the given inputs. Inputs are clamped first; arity or
// kind mismatches raise ContractError. Guard trips and domain errors yield
// failed=true with the partial trace.
SutResponse invoke(const SutDescriptor& sut, std::span<const RuntimeValue> inputs);

} // namespace gmpforge
