#pragma once

#include <stdexcept>
#include <string>

namespace mobsim {

struct EmptyVectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateBBoxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IdOutOfRangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EdgeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySamplesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mobsim
