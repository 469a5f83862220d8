#include "swdrem/linalg.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace swdrem {

namespace {

std::string shape(std::size_t r, std::size_t c)
{
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

void requireSameShape(const DenseMatrix& a, const DenseMatrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a.rows(), a.cols()) + " vs "
                             + shape(b.rows(), b.cols()));
}

void requireKernelSquare(const DenseMatrix& m, const char* op)
{
    if (!m.isSquare())
        throw DimensionError(std::string(op) + ": matrix must be square, got " + shape(m.rows(), m.cols()));
    if (m.rows() == 0 || m.rows() > kMaxKernelSide)
        throw DimensionError(std::string(op) + ": side must be in [1, 8], got " + std::to_string(m.rows()));
}

// Determinant of a row-major n x n block (n <= 8). Expands along rows top to
// bottom; sub[S] holds the determinant of the trailing |S| rows restricted to
// the column set S, so every cofactor is evaluated exactly once.
double expandDeterminant(const double* a, std::size_t n)
{
    if (n == 0)
        return 1.0;
    std::array<double, std::size_t{1} << kMaxKernelSide> sub{};
    sub[0] = 1.0;
    const unsigned full = (1u << n) - 1u;
    for (unsigned set = 1; set <= full; ++set) {
        const auto size = static_cast<std::size_t>(std::popcount(set));
        const std::size_t row = n - size;
        double acc = 0.0;
        int position = 0;
        for (std::size_t c = 0; c < n; ++c) {
            const unsigned bit = 1u << c;
            if ((set & bit) == 0)
                continue;
            const double term = a[row * n + c] * sub[set & ~bit];
            acc += (position % 2 == 0) ? term : -term;
            ++position;
        }
        sub[set] = acc;
    }
    return sub[full];
}

} // namespace

DenseVector::DenseVector(std::size_t dim, double value)
    : data_(dim, value)
{
}

DenseVector::DenseVector(std::initializer_list<double> values)
    : data_(values)
{
}

DenseVector::DenseVector(std::vector<double> values)
    : data_(std::move(values))
{
}

bool DenseVector::allFinite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseVector& DenseVector::operator+=(const DenseVector& other)
{
    if (dim() != other.dim())
        throw DimensionError("vector +=: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        data_[i] += other.data_[i];
    return *this;
}

DenseVector& DenseVector::operator-=(const DenseVector& other)
{
    if (dim() != other.dim())
        throw DimensionError("vector -=: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        data_[i] -= other.data_[i];
    return *this;
}

DenseVector& DenseVector::operator*=(double scale) noexcept
{
    for (auto& v : data_)
        v *= scale;
    return *this;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows)
    , cols_(cols)
    , data_(rows * cols, value)
{
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size())
    , cols_(rows.size() == 0 ? 0 : rows.begin()->size())
{
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw DimensionError("matrix literal: ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> rowMajor)
    : rows_(rows)
    , cols_(cols)
    , data_(std::move(rowMajor))
{
    if (data_.size() != rows_ * cols_)
        throw DimensionError("matrix: expected " + std::to_string(rows_ * cols_) + " entries, got "
                             + std::to_string(data_.size()));
}

DenseMatrix DenseMatrix::identity(std::size_t side)
{
    DenseMatrix m(side, side);
    for (std::size_t i = 0; i < side; ++i)
        m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::column(const DenseVector& v)
{
    return {v.dim(), 1, std::vector<double>(v.values().begin(), v.values().end())};
}

DenseMatrix DenseMatrix::row(const DenseVector& v)
{
    return {1, v.dim(), std::vector<double>(v.values().begin(), v.values().end())};
}

DenseMatrix DenseMatrix::transposed() const
{
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

DenseVector DenseMatrix::rowVector(std::size_t r) const
{
    if (r >= rows_)
        throw DimensionError("rowVector: index out of range");
    return DenseVector(std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                                           data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)));
}

DenseVector DenseMatrix::columnVector(std::size_t c) const
{
    if (c >= cols_)
        throw DimensionError("columnVector: index out of range");
    DenseVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        v[r] = (*this)(r, c);
    return v;
}

bool DenseMatrix::allFinite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other)
{
    requireSameShape(*this, other, "matrix +=");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other)
{
    requireSameShape(*this, other, "matrix -=");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double scale) noexcept
{
    for (auto& v : data_)
        v *= scale;
    return *this;
}

DenseVector operator+(DenseVector a, const DenseVector& b)
{
    return a += b;
}

DenseVector operator-(DenseVector a, const DenseVector& b)
{
    return a -= b;
}

DenseVector operator*(double s, DenseVector v)
{
    return v *= s;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b)
{
    return a += b;
}

DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b)
{
    return a -= b;
}

DenseMatrix operator*(double s, DenseMatrix m)
{
    return m *= s;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows())
        throw DimensionError("matrix product: " + shape(a.rows(), a.cols()) + " * " + shape(b.rows(), b.cols()));
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

DenseVector operator*(const DenseMatrix& a, const DenseVector& v)
{
    if (a.cols() != v.dim())
        throw DimensionError("matrix-vector product: " + shape(a.rows(), a.cols()) + " * "
                             + std::to_string(v.dim()));
    DenseVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < a.cols(); ++k)
            acc += a(i, k) * v[k];
        out[i] = acc;
    }
    return out;
}

double dot(const DenseVector& a, const DenseVector& b)
{
    if (a.dim() != b.dim())
        throw DimensionError("dot: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += a[i] * b[i];
    return acc;
}

double determinant(const DenseMatrix& m)
{
    requireKernelSquare(m, "determinant");
    return expandDeterminant(m.values().data(), m.rows());
}

DenseMatrix adjugate(const DenseMatrix& m)
{
    requireKernelSquare(m, "adjugate");
    const std::size_t n = m.rows();
    DenseMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1.0;
        return adj;
    }
    std::array<double, kMaxKernelSide * kMaxKernelSide> minor{};
    for (std::size_t skipRow = 0; skipRow < n; ++skipRow) {
        for (std::size_t skipCol = 0; skipCol < n; ++skipCol) {
            std::size_t k = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == skipRow)
                    continue;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != skipCol)
                        minor[k++] = m(r, c);
            }
            const double cofactor = expandDeterminant(minor.data(), n - 1);
            // adj = cofactor matrix transposed
            adj(skipCol, skipRow) = ((skipRow + skipCol) % 2 == 0) ? cofactor : -cofactor;
        }
    }
    return adj;
}

std::vector<double> characteristicPolynomial(const DenseMatrix& m)
{
    requireKernelSquare(m, "characteristicPolynomial");
    const std::size_t n = m.rows();
    // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k.
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    DenseMatrix mk(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk;
        for (std::size_t i = 0; i < n; ++i)
            mk(i, i) += c[k - 1];
        const DenseMatrix amk = m * mk;
        double trace = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            trace += amk(i, i);
        c[k] = -trace / static_cast<double>(k);
    }
    return c;
}

HurwitzResult routhHurwitz(std::span<const double> coefficients)
{
    if (coefficients.empty() || coefficients[0] == 0.0)
        throw DimensionError("routhHurwitz: leading coefficient must be nonzero");
    const std::size_t degree = coefficients.size() - 1;
    if (degree == 0)
        return {true, false};

    double scale = 0.0;
    for (double v : coefficients)
        scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * scale;
    const double lead = coefficients[0];

    const std::size_t width = degree / 2 + 1;
    std::vector<double> upper(width, 0.0);
    std::vector<double> lower(width, 0.0);
    for (std::size_t i = 0; i <= degree; ++i)
        ((i % 2 == 0) ? upper : lower)[i / 2] = coefficients[i] / lead;

    // Rows s^degree and s^{degree-1} are seeded; degree-1 more rows follow.
    for (std::size_t row = 1; row <= degree; ++row) {
        const double pivot = lower[0];
        if (std::abs(pivot) <= tol)
            return {false, true};
        if (pivot < 0.0)
            return {false, false};
        if (row == degree)
            break;
        std::vector<double> next(width, 0.0);
        for (std::size_t i = 0; i + 1 < width; ++i)
            next[i] = (pivot * upper[i + 1] - upper[0] * lower[i + 1]) / pivot;
        upper = std::move(lower);
        lower = std::move(next);
    }
    return {true, false};
}

HurwitzResult isHurwitz(const DenseMatrix& m)
{
    requireKernelSquare(m, "isHurwitz");
    const auto poly = characteristicPolynomial(m);
    return routhHurwitz(poly);
}

double norm2(const DenseVector& v)
{
    double acc = 0.0;
    for (double x : v.values())
        acc += x * x;
    return std::sqrt(acc);
}

double normInf(const DenseMatrix& m)
{
    double best = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c)
            sum += std::abs(m(r, c));
        best = std::max(best, sum);
    }
    return best;
}

double maxAbs(const DenseMatrix& m)
{
    double best = 0.0;
    for (double v : m.values())
        best = std::max(best, std::abs(v));
    return best;
}

void requireFinite(const DenseVector& v, const std::string& what)
{
    if (!v.allFinite())
        throw NonFiniteError(what + ": non-finite entry");
}

void requireFinite(const DenseMatrix& m, const std::string& what)
{
    if (!m.allFinite())
        throw NonFiniteError(what + ": non-finite entry");
}

} // namespace swdrem
