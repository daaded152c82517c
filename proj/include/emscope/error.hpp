/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_ERROR_HPP
#define EMSCOPE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace emscope {

// All recoverable failures carry a stable machine-readable kind ("NoNumericRows",
// "WindowTooLong", ...) next to the human-readable message. The CLI prints the
// kind so scripts can match on it.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

}  // namespace emscope

#endif
