#pragma once

#include <stdexcept>
#include <string>

namespace microasm {

// Error taxonomy mirrors the CLI exit codes: bad input data (2),
// bad configuration (3), file version mismatch (4).
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class input_error : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

class version_error : public error {
public:
    using error::error;
};

} // namespace microasm
