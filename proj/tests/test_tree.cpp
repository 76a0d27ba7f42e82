#include <doctest.h>

#include <vector>

#include "mvboost/tree.hpp"

using namespace mvboost;

namespace {

Matrix column(const std::vector<double>& values) {
  Matrix x(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) x(i, 0) = values[i];
  return x;
}

}  // namespace

TEST_CASE("stump splits 1-d data at the midpoint between classes") {
  Matrix x = column({1.0, 2.0, 3.0, 4.0});
  std::vector<int> y = {-1, -1, 1, 1};
  DecisionTree t = DecisionTree::train(x, y, 1);

  REQUIRE(t.nodes().size() == 3);
  const TreeNode& root = t.nodes()[0];
  CHECK(!root.is_leaf());
  CHECK(root.feature == 0);
  CHECK(root.threshold == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(t.depth() == 1);

  CHECK(t.predict(std::vector<double>{0.0}) == -1);
  CHECK(t.predict(std::vector<double>{2.5}) == -1);  // boundary goes left
  CHECK(t.predict(std::vector<double>{2.500001}) == 1);
  CHECK(t.predict(std::vector<double>{100.0}) == 1);
  CHECK(training_error(t, x, y) == 0.0);
}

TEST_CASE("candidate thresholds are midpoints of consecutive distinct values") {
  Matrix x = column({1.0, 1.0, 3.0, 3.0});
  std::vector<int> y = {-1, -1, 1, 1};
  DecisionTree t = DecisionTree::train(x, y, 1);
  CHECK(t.nodes()[0].threshold == 2.0);
}

TEST_CASE("equal-quality splits resolve to the lowest feature index") {
  // Both features separate the classes perfectly.
  Matrix x(4, 2);
  double f0[] = {0, 0, 1, 1}, f1[] = {5, 5, 9, 9};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = f0[i];
    x(i, 1) = f1[i];
  }
  std::vector<int> y = {-1, -1, 1, 1};
  DecisionTree t = DecisionTree::train(x, y, 3);
  CHECK(t.nodes()[0].feature == 0);
  CHECK(t.depth() == 1);  // one perfect split, children are pure
}

TEST_CASE("zero-gain splits are taken, so depth 2 solves xor") {
  Matrix x(4, 2);
  double f0[] = {0, 0, 1, 1}, f1[] = {0, 1, 0, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = f0[i];
    x(i, 1) = f1[i];
  }
  std::vector<int> y = {-1, 1, 1, -1};  // label = xor of the two bits

  DecisionTree stump = DecisionTree::train(x, y, 1);
  CHECK(training_error(stump, x, y) == 0.5);  // no single split helps

  DecisionTree t = DecisionTree::train(x, y, 2);
  CHECK(t.depth() == 2);
  CHECK(training_error(t, x, y) == 0.0);
  CHECK(t.predict(std::vector<double>{0.0, 0.0}) == -1);
  CHECK(t.predict(std::vector<double>{0.0, 1.0}) == 1);
  CHECK(t.predict(std::vector<double>{1.0, 0.0}) == 1);
  CHECK(t.predict(std::vector<double>{1.0, 1.0}) == -1);
}

TEST_CASE("pure nodes become leaves regardless of depth budget") {
  Matrix x = column({1.0, 2.0, 3.0});
  std::vector<int> y = {1, 1, 1};
  DecisionTree t = DecisionTree::train(x, y, 5);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].is_leaf());
  CHECK(t.nodes()[0].label == 1);
  CHECK(t.depth() == 0);
}

TEST_CASE("unsplittable ties label the leaf +1") {
  // Identical feature values, conflicting labels: no split exists.
  Matrix x = column({7.0, 7.0});
  std::vector<int> y = {1, -1};
  DecisionTree t = DecisionTree::train(x, y, 3);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].label == 1);
}

TEST_CASE("majority leaves and depth limit") {
  Matrix x = column({1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  std::vector<int> y = {-1, -1, -1, -1, 1, -1};
  DecisionTree t = DecisionTree::train(x, y, 1);
  CHECK(t.depth() <= 1);
  // Whatever the split, at most one row can be carved out at depth 1.
  double err = training_error(t, x, y);
  CHECK(err <= 1.0 / 6.0);
  CHECK(err >= 0.0);
}

TEST_CASE("training is deterministic") {
  Rng rng(42);
  Matrix x(30, 3);
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 0) + x(i, 1) > 0 ? 1 : -1;
  }
  DecisionTree a = DecisionTree::train(x, y, 4);
  DecisionTree b = DecisionTree::train(x, y, 4);
  REQUIRE(a.nodes().size() == b.nodes().size());
  for (std::size_t k = 0; k < a.nodes().size(); ++k) {
    CHECK(a.nodes()[k].feature == b.nodes()[k].feature);
    CHECK(a.nodes()[k].threshold == b.nodes()[k].threshold);
    CHECK(a.nodes()[k].left == b.nodes()[k].left);
    CHECK(a.nodes()[k].right == b.nodes()[k].right);
    CHECK(a.nodes()[k].label == b.nodes()[k].label);
  }
}

TEST_CASE("predict_rows matches predict row by row") {
  Rng rng(7);
  Matrix x(20, 2);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = x(i, 1) > 0 ? 1 : -1;
  }
  DecisionTree t = DecisionTree::train(x, y, 3);
  std::vector<int> preds = t.predict_rows(x);
  REQUIRE(preds.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(preds[i] == t.predict(x.row(i)));
}

TEST_CASE("depth 0 trains a lone majority leaf") {
  Matrix x = column({1.0, 2.0, 3.0});
  std::vector<int> y = {-1, -1, 1};
  DecisionTree t = DecisionTree::train(x, y, 0);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].label == -1);
  CHECK(t.depth() == 0);
}

TEST_CASE("training rejects malformed inputs") {
  Matrix x = column({1.0, 2.0});
  CHECK_THROWS_AS(DecisionTree::train(x, std::vector<int>{1}, 1), InputError);
  CHECK_THROWS_AS(DecisionTree::train(x, std::vector<int>{1, 2}, 1), InputError);
  CHECK_THROWS_AS(DecisionTree::train(x, std::vector<int>{1, -1}, -1), InputError);
  Matrix empty;
  CHECK_THROWS_AS(DecisionTree::train(empty, std::vector<int>{}, 1), InputError);
}

TEST_CASE("node-list constructor validates structure") {
  // Valid stump.
  std::vector<TreeNode> ok(3);
  ok[0] = {0, 1.5, 1, 2, 0};
  ok[1] = {-1, 0.0, -1, -1, 1};
  ok[2] = {-1, 0.0, -1, -1, -1};
  DecisionTree t(ok);
  CHECK(t.predict(std::vector<double>{1.0}) == 1);
  CHECK(t.predict(std::vector<double>{2.0}) == -1);

  // Child index out of range.
  std::vector<TreeNode> bad = ok;
  bad[0].right = 9;
  CHECK_THROWS_AS(DecisionTree{bad}, InputError);

  // Leaf with an invalid label.
  std::vector<TreeNode> bad2 = ok;
  bad2[1].label = 0;
  CHECK_THROWS_AS(DecisionTree{bad2}, InputError);
}

TEST_CASE("predict rejects feature vectors that are too short") {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {1, 0.5, 1, 2, 0};  // tests feature index 1
  nodes[1] = {-1, 0.0, -1, -1, 1};
  nodes[2] = {-1, 0.0, -1, -1, -1};
  DecisionTree t(nodes);
  CHECK_THROWS_AS(t.predict(std::vector<double>{1.0}), InputError);
  CHECK(t.predict(std::vector<double>{0.0, 0.25}) == 1);
}
