#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mecanchor {

/// Node index in the backhaul graph. Edge sites are 0..E-1, the core is E.
using NodeId = int;

inline constexpr NodeId kNoNode = -1;

/// Edge sites hosting an anchor point (y / y').
using Deployment = std::set<NodeId>;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double euclidean(const Position& a, const Position& b);

/// Dense row-major square matrix.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    SquareMatrix(std::size_t n, T fill) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    const std::vector<T>& data() const { return data_; }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

/// Invalid configuration or input values (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input files (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mecanchor
