#pragma once

#include <stdexcept>
#include <string>

namespace modmirror {

// Base class for all library errors. The CLI maps InvalidParameter (and
// config parse failures) to exit code 2 and every other Error to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain invariant was violated. `field()` names the offending input,
// e.g. "emitters[1].gamma2" or "drive.rabi".
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class StepSizeTooLarge : public Error {
public:
    using Error::Error;
};

class PositivityLost : public Error {
public:
    using Error::Error;
};

class NonStationary : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ZeroBackground : public Error {
public:
    using Error::Error;
};

class FitDiverged : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class UndefinedValue : public Error {
public:
    using Error::Error;
};

class AmplitudeTooSmall : public Error {
public:
    using Error::Error;
};

} // namespace modmirror
