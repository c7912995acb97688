#include "stfe/csr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stfe {

void CsrMatrix::apply(const double* x, double* y) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += vals[k] * x[col_idx[k]];
    y[i] = acc;
  }
}

const double* CsrMatrix::find(int i, int j) const {
  const int* begin = col_idx.data() + row_ptr[i];
  const int* end = col_idx.data() + row_ptr[i + 1];
  const int* it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return nullptr;
  return vals.data() + (it - col_idx.data());
}

double* CsrMatrix::find(int i, int j) {
  return const_cast<double*>(static_cast<const CsrMatrix*>(this)->find(i, j));
}

CsrMatrix TripletBuilder::build() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  CsrMatrix a;
  a.n = n_;
  a.row_ptr.assign(n_ + 1, 0);
  std::size_t k = 0;
  for (int row = 0; row < n_; ++row) {
    a.row_ptr[row] = static_cast<int>(a.col_idx.size());
    while (k < sorted.size() && sorted[k].i == row) {
      const int col = sorted[k].j;
      if (col < 0 || col >= n_ || sorted[k].i < 0)
        throw std::out_of_range("TripletBuilder: index out of range");
      double v = 0.0;
      while (k < sorted.size() && sorted[k].i == row && sorted[k].j == col)
        v += sorted[k++].v;
      if (v != 0.0 || col == row) {
        a.col_idx.push_back(col);
        a.vals.push_back(v);
      }
    }
  }
  a.row_ptr[n_] = static_cast<int>(a.col_idx.size());
  return a;
}

void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n << " " << a.n << " " << a.nnz() << "\n";
  out.precision(17);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      out << i + 1 << " " << a.col_idx[k] + 1 << " " << a.vals[k] << "\n";
  if (!out) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_market: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("read_matrix_market: missing header in " + path);
  {
    std::istringstream hs(line);
    std::string tag, obj, fmt, field, sym;
    hs >> tag >> obj >> fmt >> field >> sym;
    if (obj != "matrix" || fmt != "coordinate" || field != "real" || sym != "general")
      throw std::runtime_error("read_matrix_market: unsupported type: " + line);
  }
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  int rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz))
      throw std::runtime_error("read_matrix_market: bad size line in " + path);
  }
  if (rows != cols) throw std::runtime_error("read_matrix_market: matrix not square");
  TripletBuilder builder(rows);
  builder.reserve(nnz);
  for (int e = 0; e < nnz; ++e) {
    int i, j;
    double v;
    if (!(in >> i >> j >> v))
      throw std::runtime_error("read_matrix_market: truncated entry list in " + path);
    builder.add(i - 1, j - 1, v);
  }
  return builder.build();
}

MMatrixReport m_matrix_check(const CsrMatrix& a, const std::vector<char>& skip_rows) {
  MMatrixReport rep;
  for (int i = 0; i < a.n; ++i) {
    if (!skip_rows.empty() && skip_rows[i]) continue;
    double diag = 0.0, offdiag_sum = 0.0, row_max = 0.0;
    bool have_diag = false;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      row_max = std::max(row_max, std::abs(a.vals[k]));
    const double slack = 1e-14 * row_max;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double v = a.vals[k];
      if (a.col_idx[k] == i) {
        diag = v;
        have_diag = true;
      } else {
        if (v > slack) {
          rep.ok = false;
          rep.bad_row = i;
          rep.reason = "positive off-diagonal entry";
          return rep;
        }
        offdiag_sum += std::min(v, 0.0);
      }
    }
    if (!have_diag || diag <= 0.0) {
      rep.ok = false;
      rep.bad_row = i;
      rep.reason = "non-positive diagonal";
      return rep;
    }
    if (diag + offdiag_sum < -slack) {
      rep.ok = false;
      rep.bad_row = i;
      rep.reason = "row not weakly diagonally dominant";
      return rep;
    }
  }
  return rep;
}

}  // namespace stfe
