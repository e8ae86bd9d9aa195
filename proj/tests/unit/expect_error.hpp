#pragma once

#include <gtest/gtest.h>

#include "routeboost/error.hpp"

namespace routeboost::testing {

/// Runs `fn` and returns the code of the Error it throws.
template <class Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace routeboost::testing
