#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace chordlift {

// Minimal value-or-error carrier, enough for parse results. Not a full
// std::expected; no monadic interface.
template <typename T, typename E>
class Expected {
public:
    Expected(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Expected(E error) : data_(std::in_place_index<1>, std::move(error)) {}

    bool has_value() const { return data_.index() == 0; }
    explicit operator bool() const { return has_value(); }

    const T& value() const {
        assert(has_value());
        return std::get<0>(data_);
    }
    T& value() {
        assert(has_value());
        return std::get<0>(data_);
    }
    const E& error() const {
        assert(!has_value());
        return std::get<1>(data_);
    }

    const T& operator*() const { return value(); }
    const T* operator->() const { return &value(); }

private:
    std::variant<T, E> data_;
};

}  // namespace chordlift
