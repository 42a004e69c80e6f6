#pragma once

#include <stdexcept>
#include <string>

namespace reachset {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidFrame : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class NontrivialityViolation : public Error {
public:
    using Error::Error;
};

// Raised when |tau| drops below the singular threshold of the torsion ODE.
class TorsionSingularity : public Error {
public:
    explicit TorsionSingularity(double arc_length)
        : Error("torsion singularity at s = " + std::to_string(arc_length)), at_(arc_length) {}
    double arc_length() const noexcept { return at_; }

private:
    double at_;
};

}  // namespace reachset
