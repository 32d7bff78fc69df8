#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace orbit5gc {

// Value-or-error return for fallible operations. E is a per-module error
// enum; status-only operations return the enum directly instead.
template <typename T, typename E>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(E error) : v_(error) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const {
        assert(ok());
        return std::get<T>(v_);
    }
    T& value() {
        assert(ok());
        return std::get<T>(v_);
    }
    T take() {
        assert(ok());
        return std::move(std::get<T>(v_));
    }

    E error() const {
        assert(!ok());
        return std::get<E>(v_);
    }

private:
    std::variant<T, E> v_;
};

}  // namespace orbit5gc
