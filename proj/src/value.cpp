#include "gmpforge/value.hpp"

namespace gmpforge {

const char* kind_name(ValueKind k) {
    switch (k) {
    case ValueKind::Numeric: return "num";
    case ValueKind::Text: return "txt";
    case ValueKind::Boolean: return "bool";
    }
    return "?";
}

ValueKind kind_from_name(std::string_view name) {
    if (name == "num") return ValueKind::Numeric;
    if (name == "txt") return ValueKind::Text;
    if (name == "bool") return ValueKind::Boolean;
    throw ParseError("unknown value kind '" + std::string(name) + "'");
}

RuntimeValue RuntimeValue::default_of(ValueKind k) {
    switch (k) {
    case ValueKind::Numeric: return number(0);
    case ValueKind::Text: return text("");
    case ValueKind::Boolean: return boolean(false);
    }
    return number(0);
}

ValueKind RuntimeValue::kind() const {
    switch (payload_.index()) {
    case 0: return ValueKind::Numeric;
    case 1: return ValueKind::Text;
    default: return ValueKind::Boolean;
    }
}

std::int64_t RuntimeValue::as_number() const {
    if (const auto* v = std::get_if<std::int64_t>(&payload_)) return *v;
    throw ContractError("value is not numeric");
}

const std::string& RuntimeValue::as_text() const {
    if (const auto* v = std::get_if<std::string>(&payload_)) return *v;
    throw ContractError("value is not text");
}

bool RuntimeValue::as_boolean() const {
    if (const auto* v = std::get_if<bool>(&payload_)) return *v;
    throw ContractError("value is not boolean");
}

std::string RuntimeValue::to_string() const {
    switch (kind()) {
    case ValueKind::Numeric: return std::to_string(as_number());
    case ValueKind::Text: return '"' + as_text() + '"';
    case ValueKind::Boolean: return as_boolean() ? "true" : "false";
    }
    return {};
}

} // namespace gmpforge
