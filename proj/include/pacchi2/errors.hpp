#pragma once

#include <stdexcept>
#include <string>

namespace pacchi2 {

// Problems with user-supplied files or their contents.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pacchi2
