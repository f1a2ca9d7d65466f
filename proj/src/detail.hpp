#pragma once

#include <memory>

#include "c2fb/linops.hpp"

namespace c2fb::detail {

std::shared_ptr<const LinearOperator::Impl> make_dwt_impl(Shape shape, int levels);

}  // namespace c2fb::detail
