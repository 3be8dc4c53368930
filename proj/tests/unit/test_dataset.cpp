#include <fstream>
#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "densekit/dataset.hpp"
#include "densekit/error.hpp"

using namespace densekit;

namespace {

const std::string kTwoImages = R"({
  "images": [
    {"id": 1, "file_name": "a.jpg", "width": 100, "height": 80},
    {"id": 2, "file_name": "b.jpg", "width": 50, "height": 50}
  ],
  "annotations": [
    {"image_id": 1, "bbox": [0, 0, 10, 10]},
    {"image_id": 1, "bbox": [20, 20, 5, 5]},
    {"image_id": 1, "bbox": [95, 70, 10, 20]},
    {"image_id": 2, "bbox": [1, 1, 2, 2]},
    {"image_id": 2, "bbox": [3, 3, 4, 4]},
    {"image_id": 2, "bbox": [10, 10, 30, 30]}
  ]
})";

Dataset counts_dataset(const std::vector<std::size_t>& counts) {
    Dataset d;
    ImageId id = 0;
    for (const auto n : counts) {
        ImageRecord r{id++, ImageDims{100, 100}, {}, ""};
        for (std::size_t k = 0; k < n; ++k) {
            r.boxes.push_back(Box{0, 0, 10, 10});
        }
        d.records.push_back(std::move(r));
    }
    return d;
}

}  // namespace

TEST(Dataset, ParsesSyntheticTwoImageFile) {
    const auto loaded = parse_annotations(kTwoImages, "tiny");
    EXPECT_EQ(loaded.dataset.records.size(), 2u);
    EXPECT_EQ(loaded.dataset.annotation_count(), 6u);
    EXPECT_EQ(loaded.report.clamped, 1u);
    // Overhanging box clamped to the image.
    EXPECT_EQ(loaded.dataset.records[0].boxes[2], (Box{95, 70, 100, 80}));
    EXPECT_EQ(loaded.dataset.records[1].file_name, "b.jpg");
}

TEST(Dataset, EmptyDocumentGivesEmptyDataset) {
    EXPECT_TRUE(parse_annotations(R"({"images": [], "annotations": []})").dataset.empty());
    EXPECT_TRUE(parse_annotations("{}").dataset.empty());
}

TEST(Dataset, DropsInvalidAnnotationsAndCountsThem) {
    const auto loaded = parse_annotations(R"({
      "images": [{"id": 5, "width": 10, "height": 10}],
      "annotations": [
        {"image_id": 5, "bbox": [1, 1, 0, 3]},
        {"image_id": 5, "bbox": [1, 1, 3, -2]},
        {"image_id": 6, "bbox": [1, 1, 3, 3]},
        {"image_id": 5, "bbox": [12, 1, 3, 3]},
        {"image_id": 5, "bbox": [1, 1, 3, 3]}
      ]})");
    const auto& r = loaded.report;
    EXPECT_EQ(r.dropped_non_positive, 2u);
    EXPECT_EQ(r.dropped_missing_image, 1u);
    EXPECT_EQ(r.dropped_outside_image, 1u);
    EXPECT_EQ(r.annotations_kept, 1u);
    EXPECT_EQ(r.dropped() + r.annotations_kept, r.annotations_read);
}

TEST(Dataset, DuplicateImageIdIsAHardErrorNamingTheId) {
    try {
        (void)parse_annotations(R"({"images": [{"id": 77, "width": 1, "height": 1},
                                              {"id": 77, "width": 2, "height": 2}]})");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("77"), std::string::npos);
    }
}

TEST(Dataset, MalformedDocumentsAreDataErrors) {
    EXPECT_THROW((void)parse_annotations("{not json"), DataError);
    EXPECT_THROW((void)parse_annotations("[1,2]"), DataError);
    EXPECT_THROW((void)parse_annotations(R"({"images": [{"id": 1, "width": 0, "height": 3}]})"),
                 DataError);
    EXPECT_THROW((void)parse_annotations(
                     R"({"images": [{"id": 1, "width": 4, "height": 3}],
                         "annotations": [{"image_id": 1, "bbox": [1, 2]}]})"),
                 DataError);
    EXPECT_THROW((void)load_annotations("/nonexistent/file.json"), DataError);
}

TEST(Dataset, LoadIsDeterministic) {
    const auto a = parse_annotations(kTwoImages).dataset;
    const auto b = parse_annotations(kTwoImages).dataset;
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].image_id, b.records[i].image_id);
        EXPECT_EQ(a.records[i].boxes, b.records[i].boxes);
    }
}

TEST(Dataset, CsvReaderMatchesCocoRules) {
    const auto path = std::filesystem::temp_directory_path() / "densekit_test_annotations.csv";
    {
        std::ofstream f(path);
        f << "a.jpg,0,0,10,10,object,100,80\n"
             "a.jpg,95,70,105,90,object,100,80\n"
             "b.jpg,5,5,5,9,object,50,50\n"
             "b.jpg,1,1,3,3,object,50,50\r\n";
    }
    const auto loaded = load_csv_annotations(path);
    std::filesystem::remove(path);
    ASSERT_EQ(loaded.dataset.records.size(), 2u);
    EXPECT_EQ(loaded.dataset.records[0].boxes[1], (Box{95, 70, 100, 80}));
    EXPECT_EQ(loaded.report.dropped_non_positive, 1u);
    EXPECT_EQ(loaded.dataset.annotation_count(), 3u);
}

TEST(CountStats, ConstantCounts) {
    const auto s = count_stats(counts_dataset({2, 2, 2}));
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(s.max, 2u);
    EXPECT_EQ(s.min, 2u);
    EXPECT_EQ(s.p995, 2u);
    EXPECT_EQ(s.p005, 2u);
}

TEST(CountStats, NearestRankPercentiles) {
    std::vector<std::size_t> v(200);
    std::iota(v.begin(), v.end(), std::size_t{1});
    // ceil(0.995 * 200) = 199, ceil(0.005 * 200) = 1
    EXPECT_EQ(nearest_rank(v, 0.995), 199u);
    EXPECT_EQ(nearest_rank(v, 0.005), 1u);
    EXPECT_EQ(nearest_rank(v, 1.0), 200u);
    std::vector<std::size_t> w(1000);
    std::iota(w.begin(), w.end(), std::size_t{1});
    EXPECT_EQ(nearest_rank(w, 0.995), 995u);
    EXPECT_EQ(nearest_rank(w, 0.005), 5u);
    EXPECT_THROW(nearest_rank({}, 0.5), std::invalid_argument);
    EXPECT_THROW(nearest_rank({1}, 0.0), std::invalid_argument);
}

TEST(CountStats, OrderingInvariantOnVariedCounts) {
    const auto s = count_stats(counts_dataset({1, 5, 9, 40, 41, 300, 12, 7}));
    EXPECT_LE(s.min, s.p005);
    EXPECT_LE(static_cast<double>(s.p005), s.mean);
    EXPECT_LE(s.mean, static_cast<double>(s.p995));
    EXPECT_LE(s.p995, s.max);
    EXPECT_EQ(s.mean_rounded, 52);
}

TEST(CountStats, EmptyDatasetIsAnError) {
    EXPECT_THROW((void)count_stats(Dataset{}), std::invalid_argument);
    EXPECT_THROW((void)scale_histogram(Dataset{}, 1333, 800), std::invalid_argument);
    EXPECT_THROW((void)small_object_fraction(Dataset{}, 1333, 800), std::invalid_argument);
}

TEST(ScaleHistogram, RescaledScaleOfSingleBox) {
    Dataset d;
    d.records.push_back({1, ImageDims{2666, 1600}, {Box::from_xywh(10, 10, 80, 80)}, ""});
    const auto scales = rescaled_scales(d, 1333, 800);
    ASSERT_EQ(scales.size(), 1u);
    EXPECT_DOUBLE_EQ(scales[0], 40.0);
    const auto h = scale_histogram(d, 1333, 800, 8.0);
    EXPECT_EQ(h.counts[5], 1u);
}

TEST(ScaleHistogram, ZeroAreaBoxFallsInFirstBin) {
    Dataset d;
    d.records.push_back({1, ImageDims{100, 100}, {Box{5, 5, 5, 9}, Box{0, 0, 50, 50}}, ""});
    const auto h = scale_histogram(d, 1333, 800, 8.0);
    EXPECT_EQ(h.counts.front(), 1u);
    EXPECT_EQ(h.total(), d.annotation_count());
}

TEST(SmallObjects, Fractions) {
    Dataset d;
    ImageRecord r{1, ImageDims{1333, 800}, {}, ""};
    for (int i = 0; i < 4; ++i) r.boxes.push_back(Box::from_xywh(0, 0, 10, 10));
    for (int i = 0; i < 6; ++i) r.boxes.push_back(Box::from_xywh(0, 0, 40, 40));
    d.records.push_back(r);
    EXPECT_DOUBLE_EQ(small_object_fraction(d, 1333, 800, 32), 0.4);
    EXPECT_DOUBLE_EQ(small_object_fraction(d, 1333, 800, 5), 0.0);
    EXPECT_DOUBLE_EQ(small_object_fraction(d, 1333, 800, 1000), 1.0);
    EXPECT_THROW((void)small_object_fraction(d, 1333, 800, 0), std::invalid_argument);
}

TEST(SyntheticFixture, MatchesFrozenStatistics) {
    const std::filesystem::path dir = DENSEKIT_TEST_DATA_DIR;
    const auto loaded = load_annotations(dir / "synthetic_200.json");
    std::ifstream ef(dir / "synthetic_200_expected.json");
    const auto ex = nlohmann::json::parse(ef);
    const auto& d = loaded.dataset;
    EXPECT_EQ(d.records.size(), ex["images"].get<std::size_t>());
    EXPECT_EQ(d.annotation_count(), ex["annotations"].get<std::size_t>());
    EXPECT_EQ(loaded.report.annotations_read, ex["annotations_read"].get<std::size_t>());
    EXPECT_EQ(loaded.report.dropped_non_positive, ex["dropped_non_positive"].get<std::size_t>());
    EXPECT_EQ(loaded.report.dropped_missing_image, ex["dropped_missing_image"].get<std::size_t>());
    EXPECT_EQ(loaded.report.dropped_outside_image, ex["dropped_outside_image"].get<std::size_t>());
    EXPECT_EQ(loaded.report.clamped, ex["clamped"].get<std::size_t>());
    const auto h = scale_histogram(d, 1333, 800, 8.0);
    EXPECT_EQ(h.counts, ex["histogram_counts"].get<std::vector<std::uint64_t>>());
    EXPECT_EQ(h.total(), d.annotation_count());
}
