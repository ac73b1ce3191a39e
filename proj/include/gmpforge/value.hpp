#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gmpforge/error.hpp"

namespace gmpforge {

// The three value kinds the whole system is typed over.
enum class ValueKind { Numeric, Text, Boolean };

const char* kind_name(ValueKind k);

// Parses the serialization tokens "num", "txt", "bool". Throws ParseError.
ValueKind kind_from_name(std::string_view name);

// A single runtime value. Numeric values are 64-bit signed integers, Text is
// a byte string, Boolean is a plain bool. The kind is fixed at construction.
class RuntimeValue {
public:
    RuntimeValue() : payload_(std::int64_t{0}) {}

    static RuntimeValue number(std::int64_t v) { return RuntimeValue(v); }
    static RuntimeValue text(std::string v) { return RuntimeValue(std::move(v)); }
    static RuntimeValue boolean(bool v) { return RuntimeValue(v); }

    // The neutral starting value of a kind: 0, "", false.
    static RuntimeValue default_of(ValueKind k);

    ValueKind kind() const;

    std::int64_t as_number() const;
    const std::string& as_text() const;
    bool as_boolean() const;

    bool operator==(const RuntimeValue& other) const = default;

    // Human-readable rendering used in diagnostics and the inspect command.
    std::string to_string() const;

private:
    explicit RuntimeValue(std::int64_t v) : payload_(v) {}
    explicit RuntimeValue(std::string v) : payload_(std::move(v)) {}
    explicit RuntimeValue(bool v) : payload_(v) {}

    std::variant<std::int64_t, std::string, bool> payload_;
};

// Input and output typing of a testable component: one kind per parameter
// plus the kind of the returned value.
struct Signature {
    std::vector<ValueKind> param_kinds;
    ValueKind return_kind = ValueKind::Numeric;

    bool operator==(const Signature& other) const = default;
};

} // namespace gmpforge
