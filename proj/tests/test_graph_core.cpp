#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lfgw/dataset_io.hpp"
#include "lfgw/wl.hpp"
#include "test_helpers.hpp"

using namespace lfgw;
namespace fs = std::filesystem;

TEST_CASE("measure graph validation") {
  Matrix x = Matrix::Zero(2, 1);
  Matrix a = Matrix::Zero(2, 2);
  Vector mu = uniform_measure(2);

  CHECK_NOTHROW(make_measure_graph(x, a, mu));

  SUBCASE("asymmetric structure rejected") {
    Matrix bad = a;
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(make_measure_graph(x, bad, mu), InputError);
  }
  SUBCASE("measure must sum to one") {
    Vector bad = mu * 0.5;
    CHECK_THROWS_AS(make_measure_graph(x, a, bad), InputError);
  }
  SUBCASE("negative measure rejected") {
    Vector bad(2);
    bad << 1.5, -0.5;
    CHECK_THROWS_AS(make_measure_graph(x, a, bad), InputError);
  }
  SUBCASE("feature row count must match") {
    Matrix bad = Matrix::Zero(3, 1);
    CHECK_THROWS_AS(make_measure_graph(bad, a, mu), InputError);
  }
  SUBCASE("featureless graphs allowed") {
    CHECK_NOTHROW(make_measure_graph(Matrix(2, 0), a, mu));
  }
}

TEST_CASE("wl_propagate identity at depth 0") {
  std::mt19937_64 rng(7);
  MeasureGraph g = testing::random_graph(rng, 5, 3);
  MeasureGraph out = wl_propagate(g, 0);
  CHECK((out.features - g.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.feature_dim() == 3);
}

TEST_CASE("wl_propagate on the 3-path with features 0,2,4") {
  MeasureGraph g = testing::path_graph({0.0, 2.0, 4.0});
  MeasureGraph out = wl_propagate(g, 1);
  REQUIRE(out.feature_dim() == 2);
  // a:(0,1)  b:(2,2)  c:(4,3), each row = (x, (x + neighbor-mean)/2)
  CHECK(out.features(0, 0) == doctest::Approx(0.0));
  CHECK(out.features(0, 1) == doctest::Approx(1.0));
  CHECK(out.features(1, 0) == doctest::Approx(2.0));
  CHECK(out.features(1, 1) == doctest::Approx(2.0));
  CHECK(out.features(2, 0) == doctest::Approx(4.0));
  CHECK(out.features(2, 1) == doctest::Approx(3.0));
}

TEST_CASE("wl_propagate dimensional bookkeeping and edge cases") {
  std::mt19937_64 rng(11);
  MeasureGraph g = testing::random_graph(rng, 6, 3);
  CHECK(wl_propagate(g, 2).feature_dim() == 9);

  SUBCASE("isolated node keeps its own feature") {
    Matrix x(2, 1);
    x << 5.0, -1.0;
    MeasureGraph iso = make_measure_graph(x, Matrix::Zero(2, 2), uniform_measure(2));
    MeasureGraph out = wl_propagate(iso, 1);
    CHECK(out.features(0, 1) == doctest::Approx(5.0));
    CHECK(out.features(1, 1) == doctest::Approx(-1.0));
  }
  SUBCASE("featureless graph rejected") {
    MeasureGraph bare = make_measure_graph(Matrix(2, 0), Matrix::Zero(2, 2), uniform_measure(2));
    CHECK_THROWS_AS(wl_propagate(bare, 1), InputError);
  }
}

TEST_CASE("wl_propagate commutes with node permutation") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    MeasureGraph g = testing::random_graph(rng, 6, 2);
    auto perm = testing::random_permutation(rng, 6);
    MeasureGraph a = wl_propagate(permute_graph(g, perm), 2);
    MeasureGraph b = permute_graph(wl_propagate(g, 2), perm);
    CHECK((a.features - b.features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.structure - b.structure).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mixing_diameter closed forms") {
  SUBCASE("single node is zero for any alpha") {
    MeasureGraph g = make_measure_graph(Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                                        uniform_measure(1));
    CHECK(mixing_diameter(g, 0.0) == 0.0);
    CHECK(mixing_diameter(g, 0.7) == 0.0);
  }
  SUBCASE("two nodes, features 0 and 3, one edge, alpha one half") {
    MeasureGraph g = testing::path_graph({0.0, 3.0});
    CHECK(mixing_diameter(g, 0.5) == doctest::Approx(5.0));  // 0.5*9 + 0.5*1
  }
  SUBCASE("alpha 0 on a binary adjacency with an edge and a non-edge") {
    MeasureGraph g = testing::path_graph({1.0, 1.0, 1.0});
    CHECK(mixing_diameter(g, 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("mixing_diameter permutation invariance and alpha monotonicity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    MeasureGraph g = testing::random_graph(rng, 5, 2);
    auto perm = testing::random_permutation(rng, 5);
    CHECK(mixing_diameter(g, 0.4) ==
          doctest::Approx(mixing_diameter(permute_graph(g, perm), 0.4)));
    const double at0 = mixing_diameter(g, 0.0);
    const double at1 = mixing_diameter(g, 1.0);
    const double mid = mixing_diameter(g, 0.5);
    if (at1 > at0) {
      CHECK(mid >= at0 - 1e-12);
      CHECK(mid <= at1 + 1e-12);
    } else {
      CHECK(mid <= at0 + 1e-12);
      CHECK(mid >= at1 - 1e-12);
    }
  }
}

namespace {

// Minimal TU-format fixture: two triangles and one path, two classes.
void write_tu_fixture(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream a(dir / (name + "_A.txt"));
  a << "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n"  // triangle over nodes 1..3
       "4, 5\n5, 4\n"                          // edge in graph 2
       "6, 7\n7, 6\n7, 8\n8, 7\n";             // path over nodes 6..8
  std::ofstream ind(dir / (name + "_graph_indicator.txt"));
  ind << "1\n1\n1\n2\n2\n3\n3\n3\n";
  std::ofstream labels(dir / (name + "_graph_labels.txt"));
  labels << "1\n-1\n1\n";
  std::ofstream attrs(dir / (name + "_node_attributes.txt"));
  for (int i = 0; i < 8; ++i) attrs << 0.5 * i << ", " << 1.0 - 0.1 * i << "\n";
}

}  // namespace

TEST_CASE("tu loader on a fixture") {
  const fs::path dir = fs::temp_directory_path() / "lfgw_tu_fixture";
  write_tu_fixture(dir, "FIX");
  GraphDataset ds = load_tu_dataset(dir, "FIX");

  CHECK(ds.size() == 3);
  CHECK(ds.num_classes == 2);
  CHECK(ds.feature_dim() == 2);
  CHECK(ds.graphs[0].num_nodes() == 3);
  CHECK(ds.graphs[1].num_nodes() == 2);
  CHECK(ds.graphs[2].num_nodes() == 3);
  CHECK(ds.graphs[0].structure.sum() == doctest::Approx(6.0));  // triangle
  CHECK(ds.graphs[2].structure.sum() == doctest::Approx(4.0));  // path
  // labels -1,1 remap to 0,1 in sorted order
  CHECK(*ds.graphs[0].label == 1);
  CHECK(*ds.graphs[1].label == 0);
  CHECK(ds.graphs[0].features(1, 0) == doctest::Approx(0.5));
  CHECK(ds.graphs[0].measure.sum() == doctest::Approx(1.0));

  SUBCASE("missing indicator file is a format error") {
    fs::remove(dir / "FIX_graph_indicator.txt");
    CHECK_THROWS_AS(load_tu_dataset(dir, "FIX"), FormatError);
    write_tu_fixture(dir, "FIX");
  }
  SUBCASE("node index out of range is a corruption error") {
    std::ofstream a(dir / "FIX_A.txt", std::ios::app);
    a << "9, 1\n";
    a.close();
    CHECK_THROWS_AS(load_tu_dataset(dir, "FIX"), CorruptionError);
    write_tu_fixture(dir, "FIX");
  }
  SUBCASE("gap in graph ids is a zero-node graph") {
    std::ofstream ind(dir / "FIX_graph_indicator.txt");
    ind << "1\n1\n1\n2\n2\n4\n4\n4\n";  // graph 3 has no nodes
    ind.close();
    CHECK_THROWS_AS(load_tu_dataset(dir, "FIX"), CorruptionError);
    write_tu_fixture(dir, "FIX");
  }
}

TEST_CASE("tu loader one-hot encodes discrete node labels") {
  const fs::path dir = fs::temp_directory_path() / "lfgw_tu_onehot";
  fs::create_directories(dir);
  {
    std::ofstream a(dir / "OH_A.txt");
    a << "1, 2\n2, 1\n";
    std::ofstream ind(dir / "OH_graph_indicator.txt");
    ind << "1\n1\n";
    std::ofstream nl(dir / "OH_node_labels.txt");
    nl << "7\n3\n";
  }
  GraphDataset ds = load_tu_dataset(dir, "OH");
  CHECK(ds.feature_dim() == 2);
  CHECK(ds.graphs[0].features(0, 1) == doctest::Approx(1.0));  // label 7 -> second code
  CHECK(ds.graphs[0].features(1, 0) == doctest::Approx(1.0));  // label 3 -> first code
}

TEST_CASE("tu loader without node information uses a constant feature") {
  const fs::path dir = fs::temp_directory_path() / "lfgw_tu_plain";
  fs::create_directories(dir);
  {
    std::ofstream a(dir / "PL_A.txt");
    a << "1, 2\n2, 1\n";
    std::ofstream ind(dir / "PL_graph_indicator.txt");
    ind << "1\n1\n";
  }
  GraphDataset ds = load_tu_dataset(dir, "PL");
  CHECK(ds.feature_dim() == 1);
  CHECK(ds.graphs[0].features.minCoeff() == 1.0);
  CHECK(ds.num_classes == 1);
  CHECK_FALSE(ds.graphs[0].label.has_value());
}

TEST_CASE("dataset JSON round trip preserves counts, edges and labels") {
  const fs::path dir = fs::temp_directory_path() / "lfgw_tu_roundtrip";
  write_tu_fixture(dir, "FIX");
  GraphDataset ds = load_tu_dataset(dir, "FIX");

  const std::string text = dataset_to_json(ds);
  GraphDataset back = dataset_from_json(text);

  REQUIRE(back.size() == ds.size());
  CHECK(back.num_classes == ds.num_classes);
  for (Index i = 0; i < ds.size(); ++i) {
    const auto& a = ds.graphs[static_cast<size_t>(i)];
    const auto& b = back.graphs[static_cast<size_t>(i)];
    CHECK(a.num_nodes() == b.num_nodes());
    CHECK((a.structure - b.structure).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.label == b.label);
  }
}

TEST_CASE("shortest path structure") {
  MeasureGraph g = testing::path_graph({0.0, 1.0, 2.0});
  MeasureGraph sp = to_shortest_path_structure(g);
  CHECK(sp.structure(0, 2) == doctest::Approx(2.0));
  CHECK(sp.structure(0, 1) == doctest::Approx(1.0));
  CHECK(sp.structure(1, 1) == 0.0);

  SUBCASE("disconnected pairs get the longest distance plus one") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    MeasureGraph two = make_measure_graph(Matrix::Zero(3, 1), a, uniform_measure(3));
    MeasureGraph d = to_shortest_path_structure(two);
    CHECK(d.structure(0, 2) == doctest::Approx(2.0));  // longest finite is 1
  }
}

TEST_CASE("measure graph JSON round trip") {
  std::mt19937_64 rng(3);
  MeasureGraph g = testing::random_graph(rng, 4, 2);
  MeasureGraph back = measure_graph_from_json(measure_graph_to_json(g));
  CHECK((g.features - back.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.structure - back.structure).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.measure - back.measure).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthetic generator shapes and labels") {
  SyntheticSpec spec;
  spec.graphs_per_class = 5;
  spec.num_classes = 2;
  spec.nodes_min = 4;
  spec.nodes_max = 6;
  spec.edge_probs = {0.8, 0.2};
  spec.feature_dim = 2;
  spec.seed = 9;
  GraphDataset ds = make_synthetic_dataset(spec);
  CHECK(ds.size() == 10);
  CHECK(ds.num_classes == 2);
  for (const auto& g : ds.graphs) {
    CHECK(g.num_nodes() >= 4);
    CHECK(g.num_nodes() <= 6);
  }
  // same seed reproduces the dataset
  GraphDataset again = make_synthetic_dataset(spec);
  CHECK((ds.graphs[3].structure - again.graphs[3].structure).cwiseAbs().maxCoeff() == 0.0);
}

// Benchmark-dataset statistics; engaged only when the TU files are available.
TEST_CASE("benchmark dataset statistics" * doctest::skip(std::getenv("LFGW_DATASET_ROOT") == nullptr)) {
  const char* root = std::getenv("LFGW_DATASET_ROOT");
  REQUIRE(root != nullptr);
  if (fs::exists(fs::path(root) / "COX2" / "COX2_A.txt")) {
    GraphDataset cox2 = load_tu_dataset(root, "COX2");
    CHECK(cox2.size() == 467);
    CHECK(cox2.feature_dim() == 3);
    double mean_nodes = 0.0;
    for (const auto& g : cox2.graphs) mean_nodes += static_cast<double>(g.num_nodes());
    mean_nodes /= static_cast<double>(cox2.size());
    CHECK(mean_nodes == doctest::Approx(41.22).epsilon(0.01));
  }
  if (fs::exists(fs::path(root) / "ENZYMES" / "ENZYMES_A.txt")) {
    GraphDataset enzymes = load_tu_dataset(root, "ENZYMES");
    CHECK(enzymes.size() == 600);
    CHECK(enzymes.num_classes == 6);
    CHECK(enzymes.feature_dim() == 18);
  }
}
