#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mmr;
using namespace mmr_test;

TEST(Ingest, ThreeLineCsv) {
  const auto d = load_dataset("a,b\n1,x\n2,y", DataFormat::csv);
  ASSERT_EQ(d.column_count(), 2u);
  EXPECT_EQ(d.row_count(), 2u);
  EXPECT_EQ(d.columns()[0].name, "a");
  EXPECT_EQ(d.columns()[1].name, "b");
  EXPECT_EQ(d.raw_rows()[1][1], Value{std::string("y")});
}

TEST(Ingest, QuotedCsvCells) {
  const auto d = load_dataset("name,note\n\"Smith, J\",\"said \"\"hi\"\"\"\nLee,\"two\nlines\"\n", DataFormat::csv);
  ASSERT_EQ(d.row_count(), 2u);
  EXPECT_EQ(d.raw_rows()[0][0], Value{std::string("Smith, J")});
  EXPECT_EQ(d.raw_rows()[0][1], Value{std::string("said \"hi\"")});
  EXPECT_EQ(d.raw_rows()[1][1], Value{std::string("two\nlines")});
}

TEST(Ingest, EmptyCsvCellIsNull) {
  const auto d = load_dataset("a,b\n1,\n,2\n", DataFormat::csv);
  EXPECT_TRUE(is_null(d.raw_rows()[0][1]));
  EXPECT_TRUE(is_null(d.raw_rows()[1][0]));
}

TEST(Ingest, GapminderHasSixColumns) {
  const auto& d = fixture("gapminder.json");
  EXPECT_EQ(d.column_count(), 6u);
  for (const char* name : {"year", "country", "life_expect", "fertility"}) {
    EXPECT_TRUE(d.column_index(name).has_value()) << name;
  }
}

TEST(Ingest, HeterogeneousRecordsMatchHandBuiltTable) {
  const std::string text = R"([
    {"a": 1, "b": "x"},
    {"b": "y", "c": true},
    {"a": 3},
    {"c": false, "d": 2.5, "a": null},
    {"d": 4, "b": "z"}
  ])";
  const auto d = load_dataset(text, DataFormat::json_records);

  // Union of keys in first-seen order; every absent key is a null.
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const Value n{};
  const std::vector<Row> expected{
      {Value{1.0}, Value{std::string("x")}, n, n},
      {n, Value{std::string("y")}, Value{std::string("true")}, n},
      {Value{3.0}, n, n, n},
      {n, n, Value{std::string("false")}, Value{2.5}},
      {n, Value{std::string("z")}, n, Value{4.0}},
  };
  ASSERT_EQ(d.column_count(), names.size());
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(d.columns()[i].name, names[i]);
  EXPECT_EQ(d.raw_rows(), expected);
}

TEST(Ingest, MalformedJsonReportsLine) {
  try {
    load_dataset("[\n{\"a\": 1},\n{\"a\": }\n]", DataFormat::json_records);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), "parse-error");
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Ingest, UnterminatedQuoteReportsLine) {
  try {
    load_dataset("a,b\n1,2\n3,\"open\n", DataFormat::csv);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Ingest, RaggedRowsRejected) {
  try {
    load_dataset("a,b\n1,2\n3\n", DataFormat::csv);
    FAIL() << "expected ragged-rows";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "ragged-rows");
  }
}

TEST(InferTypes, IsoDatesAreTemporal) {
  const auto d = load_dataset("d\n2020-01-01\n2020-02-15\n2021-12-31\n", DataFormat::csv);
  EXPECT_EQ(infer_types(d).at("d"), MeasureType::temporal);
}

TEST(InferTypes, DecimalsAreQuantitative) {
  const auto d = load_dataset("v\n1.5\n-2.25\n3e2\n", DataFormat::csv);
  EXPECT_EQ(infer_types(d).at("v"), MeasureType::quantitative);
}

TEST(InferTypes, ThreeStringsOverThreeHundredRowsAreNominal) {
  std::string csv = "s\n";
  const char* words[] = {"red", "green", "blue"};
  for (int i = 0; i < 300; ++i) csv += std::string(words[i % 3]) + "\n";
  const auto d = load_dataset(csv, DataFormat::csv);
  std::set<Value> distinct;
  for (const auto& r : d.raw_rows()) distinct.insert(r[0]);
  ASSERT_EQ(distinct.size(), 3u);
  ASSERT_EQ(d.row_count(), 300u);
  EXPECT_EQ(infer_types(d).at("s"), MeasureType::nominal);
}

TEST(InferTypes, YearsAreTemporalAndMixedIsNominal) {
  const auto d = load_dataset("y,m\n1990,1\n1995,x\n", DataFormat::csv);
  const auto t = infer_types(d);
  EXPECT_EQ(t.at("y"), MeasureType::temporal);
  EXPECT_EQ(t.at("m"), MeasureType::nominal);
}

TEST(InferTypes, FixtureTypes) {
  const auto& g = fixture("gapminder.json");
  EXPECT_EQ(g.type_of("year"), MeasureType::temporal);
  EXPECT_EQ(g.type_of("country"), MeasureType::nominal);
  EXPECT_EQ(g.type_of("life_expect"), MeasureType::quantitative);
  const auto& s = fixture("stocks.csv");
  EXPECT_EQ(s.type_of("date"), MeasureType::temporal);
  EXPECT_EQ(s.type_of("symbol"), MeasureType::nominal);
  EXPECT_EQ(s.type_of("price"), MeasureType::quantitative);
}

TEST(InferKey, GapminderAllFields) {
  const auto& g = fixture("gapminder.json");
  std::vector<std::string> all;
  for (const auto& c : g.columns()) all.push_back(c.name);
  EXPECT_EQ(infer_key(g, all), (std::vector<std::string>{"year", "country"}));
}

TEST(InferKey, UniqueIdColumn) {
  const auto d = load_typed("id,grp,v\nr1,a,1\nr2,a,2\nr3,b,3\n", DataFormat::csv);
  EXPECT_EQ(infer_key(d, {"id", "grp", "v"}), (std::vector<std::string>{"id"}));
}

TEST(InferKey, NoKeyWhenOnlyQuantitative) {
  const auto d = load_typed("a,b\n1,2\n3,4\n", DataFormat::csv);
  EXPECT_TRUE(infer_key(d, {"a", "b"}).empty());
}

TEST(InferKey, NullsDisqualifyCandidate) {
  const auto d = load_typed("id,other\nx,p\n,q\nz,r\n", DataFormat::csv);
  EXPECT_EQ(infer_key(d, {"id", "other"}), (std::vector<std::string>{"other"}));
}

TEST(InferKey, FixtureKeys) {
  EXPECT_EQ(infer_key(fixture("stocks.csv"), {"symbol", "date", "price"}),
            (std::vector<std::string>{"symbol", "date"}));
  const auto& b = fixture("barley.json");
  std::vector<std::string> all;
  for (const auto& c : b.columns()) all.push_back(c.name);
  EXPECT_EQ(infer_key(b, all), brute_force_key(b, all));
}

bool projection_unique(const Dataset& d, const std::vector<std::string>& key) {
  std::set<std::vector<Value>> seen;
  for (const auto& row : d.rows()) {
    std::vector<Value> t;
    for (const auto& k : key) t.push_back(row[d.require_column(k)]);
    if (!seen.insert(t).second) return false;
  }
  return true;
}

TEST(InferKey, RandomTablesMatchExhaustiveSearch) {
  std::mt19937 rng(20241017);
  int nonempty = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto g = random_table(rng, 50, 6, trial % 5 == 0 ? 0.05 : 0.0);
    const auto key = infer_key(g.data, g.names);
    ASSERT_EQ(key, brute_force_key(g.data, g.names)) << "trial " << trial;
    if (key.empty()) continue;
    ++nonempty;
    EXPECT_TRUE(projection_unique(g.data, key));
    // Minimality: dropping any one field breaks uniqueness.
    for (std::size_t i = 0; i < key.size() && key.size() > 1; ++i) {
      auto sub = key;
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(i));
      EXPECT_FALSE(projection_unique(g.data, sub));
    }
  }
  EXPECT_GT(nonempty, 30);
}

TEST(Ingest, DeterministicLoading) {
  const std::string bytes = read_file(data_path("penguins.json"));
  const auto a = load_typed(bytes, DataFormat::json_records);
  const auto b = load_typed(bytes, DataFormat::json_records);
  EXPECT_EQ(a, b);
  std::vector<std::string> all;
  for (const auto& c : a.columns()) all.push_back(c.name);
  EXPECT_EQ(infer_key(a, all), infer_key(b, all));
}

TEST(Ingest, TemporalGrain) {
  EXPECT_EQ(fixture("gapminder.json").column("year").grain, TimeGrain::year);
  EXPECT_EQ(fixture("stocks.csv").column("date").grain, TimeGrain::day);
}
