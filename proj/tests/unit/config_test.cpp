#include <doctest.h>

#include <functional>

#include "helpers.hpp"
#include "jasmine/config.hpp"

using namespace jasmine;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("method names round trip") {
    for (Method m : all_methods()) CHECK(parse_method(method_name(m)) == m);
    CHECK(all_methods().size() == 6);
    CHECK(method_name(Method::kJasMain) == "jas.main");
    CHECK(parse_method("ala.lite") == Method::kAlaMain);
    CHECK_THROWS_AS(parse_method("jas.best"), ConfigError);
  }

  TEST_CASE("serialize then parse reproduces the config") {
    for (const char* name : {"smoke", "desk", "paper"}) {
      auto c = ExperimentConfig::preset(name);
      c.jasmine.tau = 1.0 / 300;
      c.gbm.extra["histogram_type"] = "QuantilesGlobal";
      auto text = c.serialize();
      auto back = ExperimentConfig::parse(text);
      CHECK(back.serialize() == text);
      CHECK(back.hash() == c.hash());
    }
    auto a = ExperimentConfig::preset("smoke");
    auto b = a;
    b.seed = 2;
    CHECK(a.hash() != b.hash());
  }

  TEST_CASE("settings") {
    ExperimentConfig c;
    c.apply("# comment\nQ = 20\nN = 400\njasmine.tau = 1/800\nmethods = jas.main, jas.rand\ngbm.nbins_cats = 64\n");
    CHECK(c.q == 20);
    CHECK(c.n == 400);
    CHECK(c.iterations() == 20);
    CHECK(c.jasmine.tau == 1.0 / 800);
    CHECK(c.methods == std::vector<Method>{Method::kJasMain, Method::kJasRand});
    CHECK(c.gbm.extra.at("nbins_cats") == "64");
    c.set("gbm.timing", "work");
    CHECK(c.gbm_timing == TuneTiming::kWork);
  }

  TEST_CASE("errors name the field") {
    ExperimentConfig c;
    CHECK(field_of([&] { c.set("Q", "abc"); }) == "Q");
    CHECK(field_of([&] { c.set("nonsense", "1"); }) == "nonsense");
    CHECK(field_of([&] { c.set("jasmine.beta", "x"); }) == "jasmine.beta");
    CHECK(field_of([&] { c.set("methods", "jas.main,foo"); }) == "methods");
    auto bad = ExperimentConfig::preset("smoke");
    bad.q = 1;
    CHECK(field_of([&] { bad.validate(); }) == "Q");
    bad = ExperimentConfig::preset("smoke");
    bad.n = 5;
    CHECK(field_of([&] { bad.validate(); }) == "N");
    bad = ExperimentConfig::preset("smoke");
    bad.dataset.kind = "nslkdd";
    bad.dataset.train_path.clear();
    CHECK(field_of([&] { bad.validate(); }) == "train_path");
    bad = ExperimentConfig::preset("smoke");
    bad.jasmine.gamma = 0;
    CHECK(field_of([&] { bad.validate(); }).rfind("jasmine", 0) == 0);
    CHECK(field_of([] { ExperimentConfig::preset("huge"); }) == "scale");
  }

  TEST_CASE("presets") {
    auto desk = ExperimentConfig::preset("desk");
    CHECK(desk.initial_labeled == 125);
    CHECK(desk.q == 40);
    CHECK(desk.n == 2000);
    CHECK(desk.sims == 5);
    CHECK(desk.iterations() == 50);
    CHECK(desk.tune_gbm);
    CHECK(desk.gbm_timing == TuneTiming::kWork);
    auto paper = ExperimentConfig::preset("paper");
    CHECK(paper.n == 15000);
    CHECK(paper.iterations() == 375);
    CHECK(paper.sims == 30);
    CHECK(paper.methods.size() == 6);
    CHECK(paper.tune_jasmine);
    CHECK_NOTHROW(ExperimentConfig::preset("smoke").validate());
  }

  TEST_CASE("data paths are resolved from a directory") {
    auto dir = testing::scratch_dir("datadir");
    testing::write_file(dir / "KDDTrain+.txt", "x");
    testing::write_file(dir / "KDDTest+.txt", "x");
    DatasetConfig d;
    d.kind = "nslkdd";
    auto r = resolve_data_paths(d, dir);
    CHECK(r.train_path == dir / "KDDTrain+.txt");
    CHECK(r.test_path == dir / "KDDTest+.txt");
    d.train_path = "/elsewhere/train.csv";
    CHECK(resolve_data_paths(d, dir).train_path == "/elsewhere/train.csv");
  }

  TEST_CASE("loading datasets") {
    auto dir = testing::scratch_dir("load");
    auto a = testing::small_synthetic(30, 1);
    auto b = testing::small_synthetic(20, 2);
    write_csv(a, dir / "train.csv");
    write_csv(b, dir / "test.csv");
    DatasetConfig csv;
    csv.kind = "csv";
    csv.data_path = dir / "train.csv";
    CHECK(load_dataset(csv).data.size() == 30);

    DatasetConfig missing;
    missing.kind = "csv";
    missing.data_path = dir / "absent.csv";
    CHECK_THROWS(load_dataset(missing));

    DatasetConfig synth;
    synth.kind = "synthetic";
    synth.synthetic.rows = 77;
    auto s = load_dataset(synth);
    CHECK(s.data.size() == 77);
    CHECK_FALSE(s.fixed_eval.has_value());
  }
}
