#pragma once

#include "ssrchain/asymptotic.hpp"
#include "ssrchain/charfn.hpp"
#include "ssrchain/core.hpp"
#include "ssrchain/errors.hpp"
#include "ssrchain/rootfind.hpp"
#include "ssrchain/ssr.hpp"

namespace ssrchain {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ssrchain
