#pragma once

#include <stdexcept>
#include <string>

namespace sbmsel {

// Thrown when an exact/oracle computation is requested beyond its feasible
// scale (e.g. exhaustive likelihood sums with K'^n too large).
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a theoretical result is requested for parameters violating
// its premises (non-unique optimal merge, non-identifiable merged model).
class assumption_violation : public std::runtime_error {
public:
    explicit assumption_violation(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on malformed input files.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sbmsel
