#include "ile/matrix.hpp"

namespace ile {

Csr csr_transpose(const Csr& m) {
  Csr t;
  t.n_rows = m.n_cols;
  t.n_cols = m.n_rows;
  t.offs.assign(static_cast<std::size_t>(t.n_rows) + 1, 0);
  t.cols.resize(m.cols.size());
  t.vals.resize(m.vals.size());
  for (std::int32_t c : m.cols) t.offs[static_cast<std::size_t>(c) + 1]++;
  for (std::size_t i = 1; i < t.offs.size(); ++i) t.offs[i] += t.offs[i - 1];
  std::vector<std::int64_t> cursor(t.offs.begin(), t.offs.end() - 1);
  for (std::int32_t r = 0; r < m.n_rows; ++r) {
    for (std::int64_t p = m.offs[static_cast<std::size_t>(r)];
         p < m.offs[static_cast<std::size_t>(r) + 1]; ++p) {
      std::int32_t c = m.cols[static_cast<std::size_t>(p)];
      std::int64_t q = cursor[static_cast<std::size_t>(c)]++;
      t.cols[static_cast<std::size_t>(q)] = r;
      t.vals[static_cast<std::size_t>(q)] = m.vals[static_cast<std::size_t>(p)];
    }
  }
  return t;
}

}  // namespace ile
