#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "gwl/dataset.hpp"
#include "gwl/error.hpp"

using namespace gwl;

namespace {

Dataset from_csv(const std::string& text, LoadOptions opt = {}) {
  std::istringstream in(text);
  return parse(in, opt);
}

std::string error_of(const std::string& text, LoadOptions opt = {}) {
  try {
    from_csv(text, opt);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv with explicit label map") {
  LoadOptions opt;
  opt.label_map = parse_label_map("g:+1,b:-1");
  const auto ds = from_csv("1,2,g\n3,4,b\n5,6,g\n", opt);
  CHECK(ds.size() == 3);
  CHECK(ds.dim == 2);
  CHECK(ds.y == std::vector<double>{1, -1, 1});
  CHECK(ds.row(1)[0] == 3.0);
  CHECK(ds.positive_label == "g");
  CHECK(ds.negative_label == "b");
}

TEST_CASE("default mapping puts the smaller label at -1") {
  const auto ds = from_csv("0,R\n1,M\n");
  CHECK(ds.y == std::vector<double>{1, -1});
  // numeric order, not lexicographic: 10 > 9
  const auto num = from_csv("0,10\n1,9\n");
  CHECK(num.y == std::vector<double>{1, -1});
}

TEST_CASE("bad input is reported with a line number") {
  CHECK(error_of("").find("no samples") != std::string::npos);
  CHECK(error_of("# only a comment\n\n").find("no samples") != std::string::npos);
  const auto ragged = error_of("1,2,a\n3,4,b\n5,a\n");
  CHECK(ragged.find("line 3") != std::string::npos);
  CHECK(error_of("1,x,a\n2,3,b\n").find("line 1") != std::string::npos);
  CHECK_FALSE(error_of("1,a\n2,b\n3,c\n").empty());
  LoadOptions opt;
  opt.label_map = parse_label_map("a:+1,b:-1");
  CHECK(error_of("1,a\n2,c\n", opt).find("line 2") != std::string::npos);
}

TEST_CASE("missing file throws") {
  CHECK_THROWS_AS(load("/nonexistent/file.csv", {}), Error);
}

TEST_CASE("libsvm input is densified") {
  LoadOptions opt;
  opt.format = FileFormat::libsvm;
  const auto ds = from_csv("+1 1:0.5 3:2\n-1 2:1\n", opt);
  CHECK(ds.dim == 3);
  CHECK(ds.x == std::vector<double>{0.5, 0, 2, 0, 1, 0});
  CHECK(ds.y == std::vector<double>{1, -1});
  CHECK_THROWS_AS(from_csv("+1 3:1 2:1\n-1 1:1\n", opt), Error);
}

TEST_CASE("regression targets are kept") {
  LoadOptions opt;
  opt.task = Task::regression;
  opt.header = true;
  const auto ds = from_csv("\"a\",\"b\",\"q\"\n1,2,5\n3,4,6.5\n", opt);
  CHECK(ds.y == std::vector<double>{5, 6.5});
}

TEST_CASE("clean collapses duplicates and drops conflicts") {
  Dataset a;
  a.dim = 1;
  a.push_back(std::vector<double>{0.0}, 1);
  a.push_back(std::vector<double>{0.0}, 1);
  a.push_back(std::vector<double>{1.0}, -1);
  const auto ca = clean(a);
  CHECK(ca.size() == 2);
  CHECK(ca.removed_duplicates == 1);
  CHECK(ca.removed_inconsistent == 0);

  Dataset b;
  b.dim = 1;
  b.push_back(std::vector<double>{0.0}, 1);
  b.push_back(std::vector<double>{0.0}, -1);
  b.push_back(std::vector<double>{1.0}, -1);
  const auto cb = clean(b);
  CHECK(cb.size() == 1);
  CHECK(cb.y[0] == -1);
  CHECK(cb.removed_inconsistent == 2);

  const auto again = clean(ca);
  CHECK(again == ca);
}

TEST_CASE("clean on the fixture file") {
  LoadOptions opt;
  opt.label_map = parse_label_map("a:+1,b:-1");
  const auto ds = clean(load(GWL_FIXTURE_DIR "/dup_inconsistent.csv", opt));
  CHECK(ds.removed_duplicates == 1);
  CHECK(ds.removed_inconsistent == 2);
  CHECK(ds.size() == 3);
}

TEST_CASE("negative zero equals zero") {
  const auto ds = clean(from_csv("-0.0,a\n0,a\n1,b\n"));
  CHECK(ds.size() == 2);
  CHECK(ds.removed_duplicates == 1);
}

TEST_CASE("shuffle") {
  Dataset ds;
  ds.dim = 1;
  for (int i = 0; i < 50; ++i) ds.push_back(std::vector<double>{double(i)}, i % 2 ? 1 : -1);
  const auto a = shuffle(ds, 3), b = shuffle(ds, 3), c = shuffle(ds, 4);
  CHECK(a == b);
  CHECK_FALSE(a.x == c.x);
  auto sorted = a.x;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == ds.x);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.y[i] == (int(a.x[i]) % 2 ? 1 : -1));

  Dataset one;
  one.dim = 1;
  one.push_back(std::vector<double>{7.0}, 1);
  CHECK(shuffle(one, 9) == one);
}

TEST_CASE("kfold sizes") {
  auto sizes = [](std::size_t l, std::size_t k) {
    const auto f = kfold(l, k, 11);
    std::vector<std::size_t> n(k, 0);
    for (auto a : f.assignment) ++n[a];
    std::sort(n.rbegin(), n.rend());
    return n;
  };
  CHECK(sizes(10, 5) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(sizes(11, 5) == std::vector<std::size_t>{3, 2, 2, 2, 2});
  CHECK(sizes(7, 7) == std::vector<std::size_t>(7, 1));
  CHECK_THROWS_AS(kfold(3, 4, 0), Error);
  CHECK_THROWS_AS(kfold(3, 1, 0), Error);

  const auto f = kfold(11, 5, 2);
  for (std::size_t k = 0; k < 5; ++k) {
    auto tr = f.train_indices(k), te = f.test_indices(k);
    CHECK(tr.size() + te.size() == 11);
    for (auto i : te) CHECK(std::find(tr.begin(), tr.end(), i) == tr.end());
  }
  CHECK(kfold(11, 5, 2).assignment == f.assignment);
}

TEST_CASE("standardizer fits on one split only") {
  Dataset tr;
  tr.dim = 2;
  tr.push_back(std::vector<double>{1, 5}, 1);
  tr.push_back(std::vector<double>{3, 5}, -1);
  const auto s = Standardizer::fit(tr);
  CHECK(s.mean() == std::vector<double>{2, 5});
  CHECK(s.scale()[1] == 1.0);
  const auto z = s.apply(tr);
  CHECK(z.row(0)[0] == doctest::Approx(-1.0));
  CHECK(z.row(1)[0] == doctest::Approx(1.0));
  CHECK(z.row(0)[1] == 0.0);
}
