#pragma once

#include <cstddef>

#include "sentistock/models.hpp"

namespace sentistock::detail {

// Shared fit-time validation: rectangular, finite, enough rows.
void check_training_data(const Matrix& X, const std::vector<double>& y, std::size_t min_rows,
                         const char* what);

}  // namespace sentistock::detail
