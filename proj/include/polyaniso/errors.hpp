// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <stdexcept>
#include <string>

namespace polyaniso {

struct NonPositiveJacobian : std::runtime_error {
  explicit NonPositiveJacobian(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedGroup : std::runtime_error {
  explicit UnsupportedGroup(const std::string& what) : std::runtime_error(what) {}
};

struct NotOrthogonal : std::runtime_error {
  explicit NotOrthogonal(const std::string& what) : std::runtime_error(what) {}
};

struct NotSPD : std::runtime_error {
  explicit NotSPD(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : std::runtime_error {
  explicit InvalidParams(const std::string& what) : std::runtime_error(what) {}
};

struct SlotNotPolyconvex : std::runtime_error {
  explicit SlotNotPolyconvex(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateBasisPoint : std::runtime_error {
  explicit DegenerateBasisPoint(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyDataset : std::runtime_error {
  explicit EmptyDataset(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedRecord : std::runtime_error {
  MalformedRecord(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  long line_number;
};

struct VariantNotPolyconvex : std::runtime_error {
  explicit VariantNotPolyconvex(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polyaniso
