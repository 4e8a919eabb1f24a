#pragma once

#include <cstddef>

namespace locrpc {

// Byte range in a source buffer plus the 1-based line/column of its start.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 0;
  int column = 0;
};

}  // namespace locrpc
