// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "esrsim/csr.hpp"

namespace esrsim {
namespace linalg {

/// Plain-text CSR container:
///   esrsim-csr 1
///   <n_rows> <n_cols> <nnz>
///   <row> <col> <value>   (nnz entry lines, row-major, %.17g values)
void write_csr(const std::filesystem::path& path, const CsrMatrix& a);
CsrMatrix read_csr(const std::filesystem::path& path);

}  // namespace linalg
}  // namespace esrsim
