// Error codes and the Result type shared by all twingraph modules.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace twingraph {

enum class Errc {
    // graph-core
    DuplicateTag,
    InvalidNode,
    InvalidEdge,
    UnknownEndpoint,
    NozzleOccupied,
    DirectionViolation,
    UnknownTag,
    WouldDangle,
    // transform
    UnspliceableInstrument,
    TagCollision,
    KindMismatch,
    BadProfile,
    BadRuleSet,
    // balance
    MissingBoundaryCondition,
    Underdetermined,
    Inconsistent,
    NegativeFlow,
    // export
    NotRewritten,
    // anything that violates a documented precondition
    Precondition,
    // file / config handling in the CLI
    Io,
};

const char* errc_name(Errc c);

struct Error {
    Errc code;
    std::string subject;  // tag or path the error is about, may be empty
    std::string message;

    std::string to_string() const;
};

inline Error make_error(Errc code, std::string subject, std::string message) {
    return Error{code, std::move(subject), std::move(message)};
}

/// Minimal expected-like carrier: either a value or an Error payload.
template <typename T, typename E = Error>
class [[nodiscard]] Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(E error) : v_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T& value() & { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }

    const T& operator*() const& { return value(); }
    T& operator*() & { return value(); }
    const T* operator->() const { return &value(); }
    T* operator->() { return &value(); }

    const E& error() const { return std::get<E>(v_); }

private:
    std::variant<T, E> v_;
};

template <typename E>
class [[nodiscard]] Result<void, E> {
public:
    Result() = default;
    Result(E error) : e_(std::move(error)) {}

    bool ok() const { return !e_.has_value(); }
    explicit operator bool() const { return ok(); }
    const E& error() const { return *e_; }

private:
    std::optional<E> e_;
};

}  // namespace twingraph
