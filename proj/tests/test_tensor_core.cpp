#include <gtest/gtest.h>

#include <sstream>

#include "fbcp/errors.hpp"
#include "fbcp/multilinear.hpp"
#include "fbcp/tensor_io.hpp"
#include "support.hpp"

namespace fbcp {
namespace {

DenseTensor iota_tensor(const Shape& shape) {
  DenseTensor t(shape);
  for (std::size_t p = 0; p < t.numel(); ++p) t[p] = static_cast<double>(p + 1);
  return t;
}

TEST(Shape, RejectsZeroExtentAndTooManyModes) {
  EXPECT_THROW(Shape({2, 0, 3}), ShapeError);
  EXPECT_THROW(Shape(std::vector<std::size_t>(9, 2)), ShapeError);
  EXPECT_THROW(Shape(std::vector<std::size_t>{}), ShapeError);
}

TEST(Shape, ParseAndLinearIndexRoundTrip) {
  const Shape s = parse_shape("3x4x5");
  EXPECT_EQ(s.dims(), (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(s.numel(), 60u);
  EXPECT_THROW(parse_shape("3xx4"), InvalidArgument);
  EXPECT_THROW(parse_shape("3x-4"), InvalidArgument);
  std::size_t idx[3];
  for (std::size_t p = 0; p < s.numel(); ++p) {
    s.multi_index(p, idx);
    EXPECT_EQ(s.linear_index(idx), p);
  }
  const std::size_t probe[3] = {1, 2, 3};
  EXPECT_EQ(s.linear_index(probe), 1 + 3 * (2 + 4 * 3));
}

TEST(Unfold, MatrixModeOneIsTheMatrix) {
  const DenseTensor t = iota_tensor(Shape{2, 2});
  const Matrix m = unfold(t, 0);
  EXPECT_EQ(m, (Matrix(2, 2) << 1, 3, 2, 4).finished());
}

TEST(Unfold, TwoByTwoByTwoModeOne) {
  const Matrix m = unfold(iota_tensor(Shape{2, 2, 2}), 0);
  EXPECT_EQ(m, (Matrix(2, 4) << 1, 3, 5, 7, 2, 4, 6, 8).finished());
}

TEST(Unfold, KoldaColumnOrderingOnOtherModes) {
  const Shape s{2, 3, 4};
  const DenseTensor t = iota_tensor(s);
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix m = unfold(t, n);
    std::size_t idx[3];
    for (std::size_t p = 0; p < s.numel(); ++p) {
      s.multi_index(p, idx);
      std::size_t col = 0, stride = 1;
      for (std::size_t k = 0; k < 3; ++k) {
        if (k == n) continue;
        col += idx[k] * stride;
        stride *= s[k];
      }
      EXPECT_EQ(m(static_cast<Eigen::Index>(idx[n]), static_cast<Eigen::Index>(col)), t[p]);
    }
  }
}

TEST(Unfold, ModeOutOfRangeThrows) {
  EXPECT_THROW(unfold(iota_tensor(Shape{2, 2}), 2), InvalidArgument);
}

TEST(Fold, RoundTripOnRandomShapes) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> order_d(1, 4), extent_d(1, 5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> dims(order_d(rng));
    for (auto& d : dims) d = extent_d(rng);
    const Shape s(dims);
    const DenseTensor t = test::random_tensor(s, rng);
    for (std::size_t n = 0; n < s.order(); ++n) EXPECT_EQ(fold(unfold(t, n), n, s), t);
  }
}

TEST(Fold, IntegerTensorModeTwo) {
  const Shape s{2, 3, 2};
  const DenseTensor t = iota_tensor(s);
  EXPECT_EQ(fold(unfold(t, 1), 1, s), t);
}

TEST(Fold, RowVectorToTensor) {
  const Matrix row = (Matrix(1, 3) << 4, 5, 6).finished();
  const DenseTensor t = fold(row, 0, Shape{1, 3});
  EXPECT_EQ(std::vector<double>(t.values().begin(), t.values().end()),
            (std::vector<double>{4, 5, 6}));
}

TEST(Fold, DimensionMismatchThrows) {
  EXPECT_THROW(fold(Matrix::Zero(2, 5), 0, Shape{2, 2, 2}), ShapeError);
}

TEST(KhatriRao, IdentityPair) {
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix pair[] = {id, id};
  const Matrix kr = khatri_rao(pair);
  EXPECT_EQ(kr, (Matrix(4, 2) << 1, 0, 0, 0, 0, 0, 0, 1).finished());
}

TEST(KhatriRao, ReverseOrderMatchesKruskalVectorization) {
  const Matrix a = (Matrix(2, 1) << 1, 2).finished();
  const Matrix b = (Matrix(2, 1) << 3, 4).finished();
  const Matrix ab[] = {a, b};
  const Matrix kr = khatri_rao_reverse(ab);
  EXPECT_EQ(kr, (Matrix(4, 1) << 3, 6, 4, 8).finished());
  const DenseTensor x = kruskal(ab);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(x[p], kr(static_cast<Eigen::Index>(p), 0));
  const Matrix ba[] = {b, a};
  EXPECT_EQ(khatri_rao(ba), kr);
}

TEST(KhatriRao, SingleMatrixAndShapes) {
  std::mt19937_64 rng(1);
  const Matrix a = test::random_matrix(3, 2, rng);
  const Matrix one[] = {a};
  EXPECT_EQ(khatri_rao(one), a);
  const Matrix three[] = {a, test::random_matrix(4, 2, rng), test::random_matrix(5, 2, rng)};
  const Matrix kr = khatri_rao(three);
  EXPECT_EQ(kr.rows(), 60);
  EXPECT_EQ(kr.cols(), 2);
  const Matrix bad[] = {a, test::random_matrix(4, 3, rng)};
  EXPECT_THROW(khatri_rao(bad), ShapeError);
}

TEST(Hadamard, Arithmetic) {
  const Matrix a = (Matrix(2, 2) << 1, 2, 3, 4).finished();
  const Matrix b = (Matrix(2, 2) << 2, 0, 1, 5).finished();
  const Matrix ab[] = {a, b};
  EXPECT_EQ(hadamard(ab), (Matrix(2, 2) << 2, 0, 3, 20).finished());
  const Matrix with_ones[] = {a, Matrix::Ones(2, 2)};
  EXPECT_EQ(hadamard(with_ones), a);
  const Matrix cubes[] = {a, a, a};
  EXPECT_EQ(hadamard(cubes), a.array().cube().matrix());
  const Matrix bad[] = {a, Matrix::Ones(3, 2)};
  EXPECT_THROW(hadamard(bad), ShapeError);
}

TEST(Kruskal, RankOneEntries) {
  const Matrix f[] = {(Matrix(2, 1) << 1, 2).finished(), (Matrix(2, 1) << 3, 4).finished(),
                      (Matrix(2, 1) << 5, 6).finished()};
  const DenseTensor x = kruskal(f);
  const std::size_t first[] = {0, 0, 0}, last[] = {1, 1, 1};
  EXPECT_EQ(x.at(first), 15.0);
  EXPECT_EQ(x.at(last), 48.0);
}

TEST(Kruskal, ZeroComponentIsInert) {
  std::mt19937_64 rng(2);
  std::vector<Matrix> one, two;
  for (Eigen::Index rows : {3, 4, 2}) {
    const Matrix a = test::random_matrix(rows, 1, rng);
    one.push_back(a);
    Matrix b(rows, 2);
    b << a, Matrix::Zero(rows, 1);
    two.push_back(b);
  }
  EXPECT_EQ(kruskal(one), kruskal(two));
}

TEST(Kruskal, UnfoldingIdentityAgainstElementwiseSum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Matrix> f;
    for (int n = 0; n < 3; ++n) f.push_back(test::random_matrix(3, 2, rng));
    const DenseTensor x = kruskal(f);
    std::size_t idx[3];
    for (std::size_t p = 0; p < x.numel(); ++p) {
      x.shape().multi_index(p, idx);
      double want = 0.0;
      for (Eigen::Index r = 0; r < 2; ++r)
        want += f[0](idx[0], r) * f[1](idx[1], r) * f[2](idx[2], r);
      EXPECT_NEAR(x[p], want, 1e-12);
    }
    for (std::size_t n = 0; n < 3; ++n) {
      const Matrix lhs = unfold(x, n);
      const Matrix rhs = f[n] * khatri_rao_except(f, n).transpose();
      EXPECT_LE((lhs - rhs).norm(), 1e-10 * lhs.norm());
    }
  }
}

TEST(Kruskal, EntryEqualsGeneralizedInnerProductOfRows) {
  std::mt19937_64 rng(4);
  std::vector<Matrix> f;
  for (Eigen::Index rows : {2, 3, 4, 2}) f.push_back(test::random_matrix(rows, 3, rng));
  const DenseTensor x = kruskal(f);
  std::size_t idx[4];
  for (std::size_t p = 0; p < x.numel(); ++p) {
    x.shape().multi_index(p, idx);
    std::vector<Vector> rows;
    for (std::size_t n = 0; n < 4; ++n) rows.push_back(f[n].row(idx[n]).transpose());
    EXPECT_NEAR(x[p], generalized_inner_product(rows), 1e-12);
  }
}

TEST(GeneralizedInnerProduct, Examples) {
  const Vector v[] = {Vector{{1, 2}}, Vector{{3, 4}}, Vector{{5, 6}}};
  EXPECT_EQ(generalized_inner_product(v), 63.0);
  const Vector with_zero[] = {Vector{{1, 2}}, Vector::Zero(2), Vector{{5, 6}}};
  EXPECT_EQ(generalized_inner_product(with_zero), 0.0);
  const Vector pair[] = {Vector{{1, -2, 3}}, Vector{{4, 5, 6}}};
  EXPECT_EQ(generalized_inner_product(pair), pair[0].dot(pair[1]));
  const Vector bad[] = {Vector{{1, 2}}, Vector{{1, 2, 3}}};
  EXPECT_THROW(generalized_inner_product(bad), ShapeError);
}

TEST(MaskedNorm, Examples) {
  const DenseTensor t(Shape{2, 2}, {1, 3, 2, 4});
  EXPECT_EQ(masked_sq_frobenius(t, ObservationMask::full(t.shape())), 30.0);
  EXPECT_EQ(masked_sq_frobenius(t, ObservationMask(t.shape(), {0, 0, 0, 0})), 0.0);
  EXPECT_EQ(masked_sq_frobenius(t, ObservationMask(t.shape(), {1, 0, 0, 1})), 17.0);
  EXPECT_THROW(masked_sq_frobenius(t, ObservationMask::full(Shape{4})), ShapeError);
}

TEST(Mask, SliceCachesEnumerateObservedPositions) {
  std::mt19937_64 rng(5);
  const Shape s{4, 3, 5};
  const ObservationMask m = test::random_mask(s, 0.5, rng);
  std::size_t seen = 0;
  for (std::size_t p = 0; p < s.numel(); ++p) seen += m.observed(p);
  EXPECT_EQ(seen, m.count());
  for (std::size_t n = 0; n < 3; ++n) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < s[n]; ++i) {
      for (std::uint32_t k : m.slice(n, i)) {
        EXPECT_EQ(m.observed_index(k)[n], i);
        EXPECT_TRUE(m.observed(m.positions()[k]));
      }
      total += m.slice(n, i).size();
    }
    EXPECT_EQ(total, m.count());
  }
}

TEST(TensorIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(6);
  const DenseTensor t = test::random_tensor(Shape{3, 1, 4, 2}, rng);
  std::stringstream ss;
  write_tensor(ss, t);
  EXPECT_EQ(ss.str().substr(0, 4), "BTF1");
  EXPECT_EQ(ss.str().size(), 4 + 4 + 4 * 4 + 8 * t.numel());
  EXPECT_EQ(read_tensor(ss), t);

  const ObservationMask m = test::random_mask(t.shape(), 0.3, rng);
  std::stringstream ms;
  write_mask(ms, m);
  EXPECT_EQ(ms.str().substr(0, 4), "BTM1");
  EXPECT_EQ(read_mask(ms), m);
}

TEST(TensorIo, LittleEndianHeader) {
  std::stringstream ss;
  write_tensor(ss, DenseTensor(Shape{2, 258}, 1.0));
  const std::string s = ss.str();
  EXPECT_EQ(s.substr(4, 4), std::string("\x02\x00\x00\x00", 4));
  EXPECT_EQ(s.substr(12, 4), std::string("\x02\x01\x00\x00", 4));
}

TEST(TensorIo, RejectsCorruptInput) {
  std::stringstream ok;
  write_tensor(ok, DenseTensor(Shape{2, 2}, 1.5));
  const std::string good = ok.str();

  auto read = [](const std::string& bytes) {
    std::stringstream ss(bytes);
    return read_tensor(ss);
  };
  EXPECT_THROW(read("XTF1" + good.substr(4)), FormatError);
  EXPECT_THROW(read(good.substr(0, good.size() - 3)), FormatError);
  EXPECT_THROW(read(good + "x"), FormatError);
  std::string zero_order = good;
  zero_order[4] = 0;
  EXPECT_THROW(read(zero_order), FormatError);
  std::string zero_extent = good;
  zero_extent[8] = 0;
  EXPECT_THROW(read(zero_extent), FormatError);

  std::stringstream mask_bytes;
  write_mask(mask_bytes, ObservationMask::full(Shape{2}));
  std::string bad_flag = mask_bytes.str();
  bad_flag.back() = 2;
  std::stringstream bf(bad_flag);
  EXPECT_THROW(read_mask(bf), FormatError);
  std::stringstream wrong_magic(good);
  EXPECT_THROW(read_mask(wrong_magic), FormatError);
  EXPECT_THROW(load_tensor("/nonexistent/dir/file.btf"), FormatError);
}

}  // namespace
}  // namespace fbcp
