#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "densekit/augment.hpp"
#include "densekit/coverage.hpp"
#include "densekit/dataset.hpp"
#include "densekit/doe.hpp"
#include "densekit/error.hpp"
#include "densekit/evalmap.hpp"
#include "densekit/io.hpp"
#include "densekit/nms.hpp"
#include "densekit/parallel.hpp"
#include "densekit/rng.hpp"
#include "densekit/sampler.hpp"
#include "manifest.hpp"

#ifndef DENSEKIT_VERSION
#define DENSEKIT_VERSION "0.0.0"
#endif

namespace densekit::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Size2 {
    double first{0.0};
    double second{0.0};
};

// "1333x800" -> {1333, 800}
Size2 parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    Size2 s;
    if (x != std::string::npos) {
        const char* b = text.data();
        const auto r1 = std::from_chars(b, b + x, s.first);
        const auto r2 = std::from_chars(b + x + 1, b + text.size(), s.second);
        if (r1.ec == std::errc{} && r1.ptr == b + x && r2.ec == std::errc{} &&
            r2.ptr == b + text.size() && s.first > 0.0 && s.second > 0.0) {
            return s;
        }
    }
    throw std::invalid_argument("expected a size like 1333x800, got '" + text + "'");
}

// Output directory plus bookkeeping for the manifest.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw DataError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) {
            throw DataError("cannot write " + (dir_ / name).string());
        }
        f << content;
        names_.push_back(name);
    }

    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

struct Common {
    std::string out_dir{"."};
    std::size_t threads{0};
    std::uint64_t seed{0};

    [[nodiscard]] std::size_t worker_count() const {
        return threads > 0 ? threads : default_thread_count();
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out-dir", c.out_dir, "Directory for outputs and the run manifest")
        ->capture_default_str();
    sub->add_option("--threads", c.threads,
                    "Worker threads (default: DENSEKIT_THREADS or available cores)");
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

LoadedDataset load_any(const fs::path& path) {
    if (path.extension() == ".csv") {
        return load_csv_annotations(path);
    }
    return load_annotations(path);
}

ordered_json histogram_json(const Histogram& h) {
    return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"cumulative_ratio", h.cumulative_ratio}};
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream ss;
    write_histogram_csv(ss, h);
    return ss.str();
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', '_');
    return s;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
    Common common;
    std::vector<std::string> gt;
    std::string target{"1333x800"};
    double bin_width{8.0};
    double small_threshold{32.0};
};

ordered_json run_stats(const StatsArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    const Size2 target = parse_size(a.target);
    ordered_json splits = ordered_json::array();
    std::ostringstream csv;
    csv << "split,images,annotations,mean,mean_rounded,max,min,p99_5,p0_5,small_object_fraction\n";
    std::size_t total_images = 0;
    std::size_t total_annotations = 0;
    for (const auto& path : a.gt) {
        inputs.emplace_back(path);
        const auto loaded = load_any(path);
        const Dataset& d = loaded.dataset;
        const CountStats cs = count_stats(d);
        const double small = small_object_fraction(d, target.first, target.second, a.small_threshold);
        const Histogram h = scale_histogram(d, target.first, target.second, a.bin_width);
        total_images += d.records.size();
        total_annotations += d.annotation_count();

        const auto& r = loaded.report;
        splits.push_back(
            {{"split", d.split_name},
             {"images", d.records.size()},
             {"annotations", d.annotation_count()},
             {"dropped",
              {{"non_positive", r.dropped_non_positive},
               {"missing_image", r.dropped_missing_image},
               {"outside_image", r.dropped_outside_image},
               {"total", r.dropped()}}},
             {"clamped", r.clamped},
             {"count_stats",
              {{"mean", cs.mean},
               {"mean_rounded", cs.mean_rounded},
               {"max", cs.max},
               {"min", cs.min},
               {"p99_5", cs.p995},
               {"p0_5", cs.p005}}},
             {"small_object_fraction", small},
             {"histogram_total", h.total()}});
        csv << csv_safe(d.split_name) << ',' << d.records.size() << ',' << d.annotation_count() << ','
            << format_number(cs.mean) << ',' << cs.mean_rounded << ',' << cs.max << ',' << cs.min
            << ',' << cs.p995 << ',' << cs.p005 << ',' << format_number(small) << '\n';
        out.write("scale_histogram_" + csv_safe(d.split_name) + ".csv", histogram_csv(h));
    }
    ordered_json doc;
    doc["target"] = {target.first, target.second};
    doc["small_object_threshold"] = a.small_threshold;
    doc["bin_width"] = a.bin_width;
    doc["splits"] = std::move(splits);
    doc["total"] = {{"images", total_images}, {"annotations", total_annotations}};
    out.write("stats.json", doc.dump(2) + "\n");
    out.write("stats.csv", csv.str());
    return doc;
}

// ---------------------------------------------------------------- crop

struct CropArgs {
    Common common;
    std::string gt;
    std::string strategy{"uniform"};
    double crop_w{800.0};
    double crop_h{800.0};
    double keep_iou{kDefaultKeepIou};
};

ordered_json run_crop(const CropArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    inputs.emplace_back(a.gt);
    const CropStrategy strategy = parse_crop_strategy(a.strategy);
    const CropSize crop{a.crop_w, a.crop_h};
    if (!(a.keep_iou >= 0.0 && a.keep_iou <= 1.0)) {
        throw std::invalid_argument("--keep-iou must lie in [0, 1]");
    }
    const auto loaded = load_any(a.gt);
    const auto& recs = loaded.dataset.records;
    std::vector<CroppedRecord> cropped(recs.size());
    parallel_for(recs.size(), a.common.worker_count(), [&](std::size_t i) {
        Rng rng = Rng::stream(a.common.seed, i);
        const CropWindow w = sample_crop(strategy, recs[i].dims, crop, rng);
        cropped[i] = CroppedRecord{recs[i].image_id, recs[i].file_name,
                                   apply_crop(w, recs[i].boxes, a.keep_iou)};
    });
    std::size_t kept = 0;
    std::size_t dropped = 0;
    for (const auto& c : cropped) {
        kept += c.crop.kept_boxes.size();
        dropped += c.crop.dropped_count;
    }
    out.write("cropped.json", cropped_to_json(cropped));
    return {{"images", cropped.size()}, {"kept_boxes", kept}, {"dropped_boxes", dropped}};
}

// ---------------------------------------------------------------- coverage

struct CoverageArgs {
    Common common;
    std::string strategy{"uniform"};
    double img_w{0.0};
    double img_h{0.0};
    double crop_w{0.0};
    double crop_h{0.0};
    std::size_t epochs{12};
    std::size_t trials{1000};
    std::size_t bins{20};
};

ordered_json run_coverage(const CoverageArgs& a, Outputs& out) {
    CoverageConfig cfg;
    cfg.strategy = parse_crop_strategy(a.strategy);
    cfg.epochs = a.epochs;
    cfg.trials = a.trials;
    cfg.seed = a.common.seed;
    cfg.threads = a.common.worker_count();
    cfg.histogram_bins = a.bins;
    const auto dist = simulate_coverage(ImageDims{a.img_w, a.img_h}, CropSize{a.crop_w, a.crop_h}, cfg);

    std::ostringstream samples;
    samples << "trial,coverage\n";
    for (std::size_t t = 0; t < dist.samples.size(); ++t) {
        samples << t << ',' << format_number(dist.samples[t]) << '\n';
    }
    out.write("coverage_samples.csv", samples.str());
    out.write("coverage_histogram.csv", histogram_csv(dist.histogram));
    ordered_json doc{{"strategy", std::string(to_string(cfg.strategy))},
                     {"image", {a.img_w, a.img_h}},
                     {"crop", {a.crop_w, a.crop_h}},
                     {"epochs", a.epochs},
                     {"trials", a.trials},
                     {"mean", dist.mean},
                     {"stddev", dist.stddev},
                     {"histogram", histogram_json(dist.histogram)}};
    out.write("coverage_summary.json", doc.dump(2) + "\n");
    return doc;
}

// ---------------------------------------------------------------- nms

struct NmsArgs {
    Common common;
    std::string dets;
    NmsConfig cfg;
};

DetectionSet nms_all(const DetectionSet& dets, const NmsConfig& cfg) {
    DetectionSet out;
    for (const auto& [id, list] : dets) {
        out[id] = nms(list, cfg);
    }
    return out;
}

ordered_json run_nms(const NmsArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    inputs.emplace_back(a.dets);
    a.cfg.validate();
    const DetectionSet dets = load_detections(a.dets);
    const DetectionSet kept = nms_all(dets, a.cfg);
    std::size_t before = 0;
    std::size_t after = 0;
    for (const auto& [id, list] : dets) {
        before += list.size();
    }
    for (const auto& [id, list] : kept) {
        after += list.size();
    }
    out.write("nms_results.json", detections_to_json(kept));
    return {{"images", dets.size()}, {"input_detections", before}, {"output_detections", after}};
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    Common common;
    std::string gt;
    std::string dets;
    std::size_t max_det{400};
};

ordered_json eval_json(const EvalResult& r, std::size_t max_det) {
    ordered_json by_area = ordered_json::object();
    for (const auto& [name, ap] : r.ap_by_area) {
        by_area[name] = ap ? ordered_json(*ap) : ordered_json(nullptr);
    }
    return {{"mmAP", r.mmap},
            {"has_ground_truth", r.has_ground_truth},
            {"max_det", max_det},
            {"iou_thresholds", r.iou_thresholds},
            {"ap_per_threshold", r.ap_per_threshold},
            {"recall_per_threshold", r.recall_per_threshold},
            {"AR", r.ar},
            {"ap_by_area", by_area}};
}

ordered_json run_eval(const EvalArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    inputs.emplace_back(a.gt);
    inputs.emplace_back(a.dets);
    EvalConfig cfg;
    cfg.max_det = a.max_det;
    cfg.threads = a.common.worker_count();
    cfg.validate();
    const auto gt = load_any(a.gt);
    const auto dets = load_detections(a.dets);
    const auto doc = eval_json(evaluate(gt.dataset, dets, cfg), a.max_det);
    out.write("eval.json", doc.dump(2) + "\n");
    return doc;
}

// ---------------------------------------------------------------- tune

struct TuneArgs {
    Common common;
    std::string gt;
    std::string dets;
    std::vector<std::string> factors;
    std::size_t max_det{400};
    bool minimize{false};
    std::string response{"mmap"};
};

enum class NmsField { PreTopk, ScoreThr, IouThr, MaxOut };

NmsField parse_field(std::string name) {
    std::replace(name.begin(), name.end(), '-', '_');
    if (name == "pre_topk") return NmsField::PreTopk;
    if (name == "score_thr") return NmsField::ScoreThr;
    if (name == "iou_thr") return NmsField::IouThr;
    if (name == "max_out") return NmsField::MaxOut;
    throw std::invalid_argument("unknown NMS factor '" + name +
                                "' (expected pre_topk|score_thr|iou_thr|max_out)");
}

FactorSpec parse_factor(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("--factor expects name=v1,v2,v3, got '" + text + "'");
    }
    FactorSpec f;
    f.name = text.substr(0, eq);
    std::replace(f.name.begin(), f.name.end(), '-', '_');
    std::stringstream ss(text.substr(eq + 1));
    std::size_t n = 0;
    for (std::string item; std::getline(ss, item, ',');) {
        double v = 0.0;
        const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
        if (r.ec != std::errc{} || r.ptr != item.data() + item.size() || n >= kL9Levels) {
            throw std::invalid_argument("--factor " + f.name + ": expected three numeric levels");
        }
        f.levels[n++] = v;
    }
    if (n != kL9Levels) {
        throw std::invalid_argument("--factor " + f.name + ": expected three numeric levels");
    }
    f.validate();
    return f;
}

std::size_t as_count(double v, const std::string& name) {
    if (!(v >= 1.0) || v != std::floor(v)) {
        throw std::invalid_argument("factor " + name + " needs positive integer levels");
    }
    return static_cast<std::size_t>(v);
}

ordered_json run_tune(const TuneArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    if (a.factors.size() != kL9Factors) {
        throw std::invalid_argument("tune needs exactly four --factor options");
    }
    std::array<FactorSpec, kL9Factors> factors;
    std::array<NmsField, kL9Factors> fields{};
    for (std::size_t i = 0; i < kL9Factors; ++i) {
        factors[i] = parse_factor(a.factors[i]);
        fields[i] = parse_field(factors[i].name);
        for (std::size_t j = 0; j < i; ++j) {
            if (fields[j] == fields[i]) {
                throw std::invalid_argument("factor '" + factors[i].name + "' given twice");
            }
        }
        if (fields[i] == NmsField::PreTopk || fields[i] == NmsField::MaxOut) {
            for (double v : factors[i].levels) {
                as_count(v, factors[i].name);
            }
        }
    }

    ResponseFn respond;
    std::string response_desc = a.response;
    if (a.response.rfind("constant=", 0) == 0) {
        const std::string v = a.response.substr(9);
        double c = 0.0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), c);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
            throw std::invalid_argument("--response constant=<number> expected");
        }
        respond = [c](const FactorValues&) { return c; };
    } else if (a.response == "mmap") {
        if (a.gt.empty() || a.dets.empty()) {
            throw std::invalid_argument("tune --response mmap needs --gt and --dets");
        }
        inputs.emplace_back(a.gt);
        inputs.emplace_back(a.dets);
        auto gt = std::make_shared<Dataset>(load_any(a.gt).dataset);
        auto dets = std::make_shared<DetectionSet>(load_detections(a.dets));
        EvalConfig eval_cfg;
        eval_cfg.max_det = a.max_det;
        eval_cfg.validate();
        respond = [gt, dets, fields, factors, eval_cfg](const FactorValues& v) {
            NmsConfig cfg;
            for (std::size_t i = 0; i < kL9Factors; ++i) {
                switch (fields[i]) {
                    case NmsField::PreTopk: cfg.pre_topk = as_count(v[i], factors[i].name); break;
                    case NmsField::ScoreThr: cfg.score_threshold = v[i]; break;
                    case NmsField::IouThr: cfg.iou_threshold = v[i]; break;
                    case NmsField::MaxOut: cfg.max_out = as_count(v[i], factors[i].name); break;
                }
            }
            return evaluate(*gt, nms_all(*dets, cfg), eval_cfg).mmap;
        };
    } else {
        throw std::invalid_argument("--response must be 'mmap' or 'constant=<number>'");
    }

    const OrthogonalArray oa = build_l9();
    const auto scores = run_experiment(oa, factors, respond, a.common.worker_count());
    const AnorReport rep = anor(oa, scores, factors, a.minimize);

    ordered_json doc;
    doc["response"] = response_desc;
    doc["max_det"] = a.max_det;
    auto& fj = doc["factors"] = ordered_json::array();
    for (const auto& f : factors) {
        fj.push_back({{"name", f.name}, {"levels", f.levels}});
    }
    auto& runs = doc["runs"] = ordered_json::array();
    for (std::size_t r = 0; r < kL9Runs; ++r) {
        runs.push_back({{"run", r},
                        {"levels", oa.runs[r]},
                        {"values", run_values(oa, factors, r)},
                        {"score", scores[r]}});
    }
    ordered_json analysis = ordered_json::array();
    for (const auto& fa : rep.factors) {
        analysis.push_back({{"name", fa.name},
                            {"level_means", fa.level_means},
                            {"range", fa.range},
                            {"best_level", fa.best_level},
                            {"best_value", fa.best_value}});
    }
    ordered_json ranking = ordered_json::array();
    for (const std::size_t i : rep.ranking) {
        ranking.push_back(rep.factors[i].name);
    }
    ordered_json recommended = ordered_json::object();
    for (std::size_t i = 0; i < kL9Factors; ++i) {
        recommended[rep.factors[i].name] = rep.recommended_values[i];
    }
    doc["anor"] = {{"minimize", rep.minimize},
                   {"factors", analysis},
                   {"ranking", ranking},
                   {"recommended", recommended}};
    out.write("tune.json", doc.dump(2) + "\n");
    return doc;
}

// ---------------------------------------------------------------- sampler

struct SamplerArgs {
    Common common;
    std::string gt;
    std::string input_size{"1333x800"};
    AssignConfig assign;
    bool no_low_quality{false};
    double bin_width{16.0};
    std::size_t default_num{256};
    std::size_t raised_num{512};
    double pos_fraction{0.5};
};

ordered_json run_sampler(const SamplerArgs& a, Outputs& out, std::vector<fs::path>& inputs) {
    inputs.emplace_back(a.gt);
    const Size2 size = parse_size(a.input_size);
    AssignConfig assign = a.assign;
    assign.match_low_quality = !a.no_low_quality;
    assign.validate();
    const SamplerConfig def{a.default_num, a.pos_fraction};
    const SamplerConfig raised{a.raised_num, a.pos_fraction};
    def.validate();
    raised.validate();

    const auto loaded = load_any(a.gt);
    const auto pc = positive_histogram(loaded.dataset, size.first, size.second, AnchorConfig{},
                                       assign, a.bin_width, a.common.worker_count());

    const auto cap_of = [](const SamplerConfig& c) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(c.num) * c.pos_fraction));
    };
    const std::size_t def_cap = cap_of(def);
    const std::size_t raised_cap = cap_of(raised);
    std::size_t over_def = 0;
    std::size_t over_raised = 0;
    double sum = 0.0;
    std::ostringstream per_image;
    per_image << "image_id,gt_boxes,positives\n";
    for (std::size_t i = 0; i < pc.per_image.size(); ++i) {
        const auto n = pc.per_image[i];
        over_def += n > def_cap ? 1 : 0;
        over_raised += n > raised_cap ? 1 : 0;
        sum += static_cast<double>(n);
        per_image << loaded.dataset.records[i].image_id << ','
                  << loaded.dataset.records[i].boxes.size() << ',' << n << '\n';
    }
    const double images = static_cast<double>(pc.per_image.size());
    out.write("positives_histogram.csv", histogram_csv(pc.histogram));
    out.write("positives_per_image.csv", per_image.str());
    ordered_json doc{{"images", pc.per_image.size()},
                     {"input_size", {size.first, size.second}},
                     {"pos_iou", assign.pos_iou},
                     {"neg_iou", assign.neg_iou},
                     {"match_low_quality", assign.match_low_quality},
                     {"mean_positives", sum / images},
                     {"default_positive_cap", def_cap},
                     {"fraction_over_default_cap", static_cast<double>(over_def) / images},
                     {"raised_positive_cap", raised_cap},
                     {"fraction_over_raised_cap", static_cast<double>(over_raised) / images}};
    out.write("sampler_summary.json", doc.dump(2) + "\n");
    return doc;
}

// ---------------------------------------------------------------- dispatch

std::map<std::string, std::string> collect_flags(const CLI::App* sub) {
    std::map<std::string, std::string> flags;
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h" || name == "--help,-h") {
            continue;
        }
        if (opt->count() > 0) {
            std::string joined;
            for (const auto& r : opt->results()) {
                joined += (joined.empty() ? "" : ";") + r;
            }
            flags[opt->get_single_name()] = opt->get_expected_min() == 0 && joined.empty() ? "true" : joined;
        } else if (!opt->get_default_str().empty()) {
            flags[opt->get_single_name()] = opt->get_default_str();
        }
    }
    return flags;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"densekit: dataset, augmentation, NMS and evaluation tooling for dense detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(DENSEKIT_VERSION));

    StatsArgs stats;
    auto* s_stats = app.add_subcommand("stats", "Dataset statistics and scale histograms");
    add_common(s_stats, stats.common);
    s_stats->add_option("--gt", stats.gt, "Annotation file(s), COCO JSON or retail CSV")->required();
    s_stats->add_option("--target", stats.target, "Rescale target LONGxSHORT")->capture_default_str();
    s_stats->add_option("--bin-width", stats.bin_width, "Scale histogram bin width")->capture_default_str();
    s_stats->add_option("--small-thr", stats.small_threshold, "Small-object scale threshold")
        ->capture_default_str();

    CropArgs crop;
    auto* s_crop = app.add_subcommand("crop", "Random / seven-anchor crops with box clipping");
    add_common(s_crop, crop.common);
    s_crop->add_option("--gt", crop.gt, "Annotation file")->required();
    s_crop->add_option("--strategy", crop.strategy, "uniform|seven")->capture_default_str();
    s_crop->add_option("--crop-w", crop.crop_w, "Crop width")->capture_default_str();
    s_crop->add_option("--crop-h", crop.crop_h, "Crop height")->capture_default_str();
    s_crop->add_option("--keep-iou", crop.keep_iou, "Keep clipped boxes with IoU above this")
        ->capture_default_str();

    CoverageArgs cov;
    auto* s_cov = app.add_subcommand("coverage", "Monte-Carlo crop coverage over epochs");
    add_common(s_cov, cov.common);
    s_cov->add_option("--strategy", cov.strategy, "uniform|seven")->capture_default_str();
    s_cov->add_option("--img-w", cov.img_w, "Image width")->required();
    s_cov->add_option("--img-h", cov.img_h, "Image height")->required();
    s_cov->add_option("--crop-w", cov.crop_w, "Crop width")->required();
    s_cov->add_option("--crop-h", cov.crop_h, "Crop height")->required();
    s_cov->add_option("--epochs", cov.epochs, "Crops per trial")->capture_default_str();
    s_cov->add_option("--trials", cov.trials, "Independent trials")->capture_default_str();
    s_cov->add_option("--bins", cov.bins, "Histogram bins over [0, 1]")->capture_default_str();

    NmsArgs nms_args;
    auto* s_nms = app.add_subcommand("nms", "Greedy NMS over a COCO results file");
    add_common(s_nms, nms_args.common);
    s_nms->add_option("--dets", nms_args.dets, "COCO results file")->required();
    s_nms->add_option("--pre-topk", nms_args.cfg.pre_topk)->capture_default_str();
    s_nms->add_option("--score-thr", nms_args.cfg.score_threshold)->capture_default_str();
    s_nms->add_option("--iou-thr", nms_args.cfg.iou_threshold)->capture_default_str();
    s_nms->add_option("--max-out", nms_args.cfg.max_out)->capture_default_str();

    EvalArgs eval;
    auto* s_eval = app.add_subcommand("eval", "COCO-style mmAP");
    add_common(s_eval, eval.common);
    s_eval->add_option("--gt", eval.gt, "Ground-truth annotation file")->required();
    s_eval->add_option("--dets", eval.dets, "COCO results file")->required();
    s_eval->add_option("--max-det", eval.max_det, "Per-image detection cap")->capture_default_str();

    TuneArgs tune;
    auto* s_tune = app.add_subcommand("tune", "L9 orthogonal search over NMS parameters");
    add_common(s_tune, tune.common);
    s_tune->add_option("--gt", tune.gt, "Ground-truth annotation file");
    s_tune->add_option("--dets", tune.dets, "Raw (pre-NMS) COCO results file");
    s_tune->add_option("--factor", tune.factors, "name=v1,v2,v3 (four times)")->required();
    s_tune->add_option("--max-det", tune.max_det, "Evaluation maxDet")->capture_default_str();
    s_tune->add_flag("--minimize", tune.minimize, "Pick the lowest mean response");
    s_tune->add_option("--response", tune.response, "mmap | constant=<value>")->capture_default_str();

    SamplerArgs samp;
    auto* s_samp = app.add_subcommand("sampler", "Positive-anchor counts per image");
    add_common(s_samp, samp.common);
    s_samp->add_option("--gt", samp.gt, "Annotation file")->required();
    s_samp->add_option("--input-size", samp.input_size, "Rescale target LONGxSHORT")
        ->capture_default_str();
    s_samp->add_option("--pos-iou", samp.assign.pos_iou)->capture_default_str();
    s_samp->add_option("--neg-iou", samp.assign.neg_iou)->capture_default_str();
    s_samp->add_flag("--no-low-quality", samp.no_low_quality, "Disable the best-anchor rule");
    s_samp->add_option("--bin-width", samp.bin_width, "Histogram bin width")->capture_default_str();
    s_samp->add_option("--default-num", samp.default_num, "Baseline sampler size")
        ->capture_default_str();
    s_samp->add_option("--raised-num", samp.raised_num, "Raised sampler size")->capture_default_str();
    s_samp->add_option("--pos-fraction", samp.pos_fraction)->capture_default_str();

    if (!args.empty() && !args.front().empty() && args.front().front() != '-' &&
        app.get_subcommand_no_throw(args.front()) == nullptr) {
        err << "unknown subcommand '" << args.front() << "'\n\n" << app.help();
        return kExitUsage;
    }

    std::vector<std::string> argv_store{"densekit"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << DENSEKIT_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const auto started = std::chrono::steady_clock::now();
    try {
        const Common* common = nullptr;
        std::vector<fs::path> inputs;
        ordered_json summary;
        const std::string name = sub->get_name();
        std::unique_ptr<Outputs> outputs;
        auto open = [&](const Common& c) {
            common = &c;
            outputs = std::make_unique<Outputs>(c.out_dir);
            return std::ref(*outputs);
        };
        if (name == "stats") {
            summary = run_stats(stats, open(stats.common), inputs);
        } else if (name == "crop") {
            summary = run_crop(crop, open(crop.common), inputs);
        } else if (name == "coverage") {
            summary = run_coverage(cov, open(cov.common));
        } else if (name == "nms") {
            summary = run_nms(nms_args, open(nms_args.common), inputs);
        } else if (name == "eval") {
            summary = run_eval(eval, open(eval.common), inputs);
        } else if (name == "tune") {
            summary = run_tune(tune, open(tune.common), inputs);
        } else {
            summary = run_sampler(samp, open(samp.common), inputs);
        }

        RunManifest m;
        m.subcommand = name;
        m.flags = collect_flags(sub);
        m.seed = common->seed;
        m.inputs = inputs;
        m.outputs = outputs->names();
        m.tool_version = DENSEKIT_VERSION;
        m.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        outputs->write("manifest.json", m.to_json());
        out << summary.dump(2) << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "densekit " << sub->get_name() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "densekit " << sub->get_name() << ": " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace densekit::cli
