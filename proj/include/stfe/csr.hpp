#pragma once

#include <string>
#include <vector>

namespace stfe {

// Square sparse matrix in compressed-sparse-row form.  Column indices are
// strictly increasing within each row and exact zeros are not stored (the
// diagonal entry is kept even when zero so the preconditioners can see it).
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;   // size n+1
  std::vector<int> col_idx;   // size nnz
  std::vector<double> vals;   // size nnz

  int nnz() const { return static_cast<int>(col_idx.size()); }

  // y = A x
  void apply(const double* x, double* y) const;

  // Pointer to entry (i,j), or nullptr when the entry is structurally zero.
  const double* find(int i, int j) const;
  double* find(int i, int j);
};

// Accumulates duplicate (i,j) contributions and assembles them into CSR.
class TripletBuilder {
 public:
  explicit TripletBuilder(int n) : n_(n) {}

  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t nnz) { entries_.reserve(nnz); }
  int size() const { return n_; }

  CsrMatrix build() const;

 private:
  struct Entry {
    int i, j;
    double v;
  };
  int n_;
  std::vector<Entry> entries_;
};

// Matrix Market exchange format ("%%MatrixMarket matrix coordinate real
// general"), 1-based indices, one entry per line.
void write_matrix_market(const std::string& path, const CsrMatrix& a);
CsrMatrix read_matrix_market(const std::string& path);

// Checks the sign structure that guarantees a discrete maximum principle:
// positive diagonal, non-positive off-diagonal entries (up to a relative
// slack of 1e-14 per row), and weak diagonal dominance on every row.  Rows
// listed in skip_rows (eliminated boundary rows) are ignored.
struct MMatrixReport {
  bool ok = true;
  int bad_row = -1;
  std::string reason;
};
MMatrixReport m_matrix_check(const CsrMatrix& a, const std::vector<char>& skip_rows);

}  // namespace stfe
