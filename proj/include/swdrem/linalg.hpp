#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swdrem {

/// Raised when operand shapes do not fit the requested operation.
class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a NaN or Inf would enter the pipeline.
class NonFiniteError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class DenseVector
{
public:
    DenseVector() = default;
    explicit DenseVector(std::size_t dim, double value = 0.0);
    DenseVector(std::initializer_list<double> values);
    explicit DenseVector(std::vector<double> values);

    [[nodiscard]] std::size_t dim() const noexcept { return data_.size(); }
    [[nodiscard]] double& operator[](std::size_t i) noexcept { return data_[i]; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return data_[i]; }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] bool allFinite() const noexcept;

    DenseVector& operator+=(const DenseVector& other);
    DenseVector& operator-=(const DenseVector& other);
    DenseVector& operator*=(double scale) noexcept;

    bool operator==(const DenseVector&) const = default;

private:
    std::vector<double> data_;
};

/// Row-major dense matrix. Sizes are small (side <= 8 for the square kernels).
class DenseMatrix
{
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> rowMajor);

    static DenseMatrix identity(std::size_t side);
    static DenseMatrix column(const DenseVector& v);
    static DenseMatrix row(const DenseVector& v);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool isSquare() const noexcept { return rows_ == cols_; }

    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] DenseMatrix transposed() const;
    [[nodiscard]] DenseVector rowVector(std::size_t r) const;
    [[nodiscard]] DenseVector columnVector(std::size_t c) const;
    [[nodiscard]] bool allFinite() const noexcept;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double scale) noexcept;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseVector operator+(DenseVector a, const DenseVector& b);
DenseVector operator-(DenseVector a, const DenseVector& b);
DenseVector operator*(double s, DenseVector v);
DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix m);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseVector operator*(const DenseMatrix& a, const DenseVector& v);

double dot(const DenseVector& a, const DenseVector& b);

/// Largest side accepted by determinant, adjugate and isHurwitz.
inline constexpr std::size_t kMaxKernelSide = 8;

/// Determinant by Laplace expansion along rows, memoised over column subsets.
double determinant(const DenseMatrix& m);

/// Transpose of the cofactor matrix. Well defined for singular input.
DenseMatrix adjugate(const DenseMatrix& m);

/// Coefficients c[0..n] of det(sI - M) = s^n + c[1] s^{n-1} + ... + c[n], with c[0] = 1.
std::vector<double> characteristicPolynomial(const DenseMatrix& m);

struct HurwitzResult
{
    bool hurwitz = false;
    // Set when the Routh table hit a zero leading entry; the matrix is then
    // reported as not Hurwitz (marginal or undecidable without perturbation).
    bool indeterminate = false;

    explicit operator bool() const noexcept { return hurwitz; }
};

/// Routh-Hurwitz test on a monic polynomial given highest power first.
HurwitzResult routhHurwitz(std::span<const double> coefficients);

HurwitzResult isHurwitz(const DenseMatrix& m);

double norm2(const DenseVector& v);
/// Maximum absolute row sum.
double normInf(const DenseMatrix& m);
double maxAbs(const DenseMatrix& m);

void requireFinite(const DenseVector& v, const std::string& what);
void requireFinite(const DenseMatrix& m, const std::string& what);

} // namespace swdrem
