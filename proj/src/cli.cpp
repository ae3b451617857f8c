#include "tvc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tvc/classpair.hpp"
#include "tvc/config.hpp"
#include "tvc/convert.hpp"
#include "tvc/io.hpp"
#include "tvc/selftest.hpp"
#include "tvc/synth.hpp"

namespace tvc {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    long long seed_override = -1;
};

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    if (args.seed_override >= 0) cfg.seed = uint64_t(args.seed_override);
    cfg.validate();
    return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

TokenizerBundle load_bundle_or_die(const CommonArgs& args, const std::string& explicit_path) {
    const std::string path =
        explicit_path.empty() ? (fs::path(args.out_dir) / "bundle.tart").string() : explicit_path;
    if (!fs::exists(path))
        fail(Err::MissingCheckpoint, path + " (run the warmup command first)");
    return load_bundle(path);
}

void write_loss_curve(const std::vector<LossBreakdown>& curve, const std::string& path) {
    std::ostringstream body;
    body.precision(17);
    body << "step,modality,recon,quant,commit,total\n";
    for (size_t i = 0; i < curve.size(); ++i) {
        const auto& l = curve[i];
        body << i << ',' << (l.modality == Modality::Visual ? "visual" : "temporal") << ','
             << l.recon << ',' << l.quant << ',' << l.commit << ',' << l.total << '\n';
    }
    write_text_file(path, body.str());
}

// first/last total loss per modality in the curve
void curve_endpoints(const std::vector<LossBreakdown>& curve, Modality m, double* first,
                     double* last) {
    *first = *last = 0.0;
    bool seen = false;
    for (const auto& l : curve) {
        if (l.modality != m) continue;
        if (!seen) {
            *first = l.total;
            seen = true;
        }
        *last = l.total;
    }
}

int cmd_synth_data(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const BundleConfig bc = cfg.bundle_config();

    std::vector<int> series_labels, image_labels;
    const auto series = desk_train_series(bc.series_length(), cfg.seed, &series_labels);
    const auto images =
        desk_train_images(bc.image_height(), bc.image_width(), cfg.seed, &image_labels);

    save_series_csv(series, out_path(args, "series.csv"));
    {
        std::ostringstream body;
        for (int v : series_labels) body << v << '\n';
        write_text_file(out_path(args, "series_labels.csv"), body.str());
    }
    fs::create_directories(fs::path(args.out_dir) / "images");
    {
        std::ostringstream body;
        for (size_t i = 0; i < images.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "images/img_%04zu.pgm", i);
            save_image(images[i], out_path(args, name));
            body << name << ',' << image_labels[i] << '\n';
        }
        write_text_file(out_path(args, "image_labels.csv"), body.str());
    }
    std::cout << "synth-data: wrote " << series.size() << " series and " << images.size()
              << " images under " << args.out_dir << "\n";
    return 0;
}

int cmd_warmup(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const BundleConfig bc = cfg.bundle_config();
    const auto series = desk_train_series(bc.series_length(), cfg.seed);
    const auto images = desk_train_images(bc.image_height(), bc.image_width(), cfg.seed);

    const WarmupResult res = run_warmup(series, images, bc, cfg.warmup_config());
    save_bundle(res.bundle, out_path(args, "bundle.tart"));
    write_loss_curve(res.curve, out_path(args, "loss_curve.csv"));

    double v0, v1, t0, t1;
    curve_endpoints(res.curve, Modality::Visual, &v0, &v1);
    curve_endpoints(res.curve, Modality::Temporal, &t0, &t1);
    double min_util = 1.0;
    for (double u : res.tail_utilization) min_util = std::min(min_util, u);
    std::cout << "warmup: " << cfg.steps << " steps, visual " << v0 << " -> " << v1
              << ", temporal " << t0 << " -> " << t1 << ", min head utilization " << min_util
              << ", bundle " << out_path(args, "bundle.tart") << "\n";
    return 0;
}

int cmd_align_forecast(const CommonArgs& args, const std::string& bundle_path) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);
    const int window = bundle.cfg.series_length();

    const auto long_series = make_sine_series(1, 16 * window, 1, cfg.seed ^ 0xA11Eu, nullptr);
    const auto wide_image = make_stripe_images(1, bundle.cfg.image_height(),
                                               16 * bundle.cfg.image_width(), 1, cfg.seed ^ 0xB22Fu,
                                               nullptr);
    const auto pairs =
        build_sliding_pairs(long_series[0], wide_image[0], window, window / 2, bundle);

    const AlignTrainResult trained =
        train_alignment(pairs, bundle, Direction::TemporalToVisual, cfg.align_config());
    save_alignment(trained.model, out_path(args, "align_t2v.tart"));
    std::cout << "align-forecast: " << pairs.size() << " sliding pairs, cross-entropy "
              << trained.loss_curve.front() << " -> " << trained.loss_curve.back() << ", model "
              << out_path(args, "align_t2v.tart") << "\n";
    return 0;
}

int cmd_align_classify(const CommonArgs& args, const std::string& bundle_path) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);
    const BundleConfig& bc = bundle.cfg;

    std::vector<int> series_labels, image_labels;
    const auto series = desk_train_series(bc.series_length(), cfg.seed, &series_labels);
    const auto images =
        desk_train_images(bc.image_height(), bc.image_width(), cfg.seed, &image_labels);

    const int classes = 3;
    std::vector<std::vector<IndexSequence>> t_subsets(classes), v_subsets(classes);
    std::vector<std::vector<TimeSeries>> t_raw(classes);
    std::vector<std::vector<Image>> v_raw(classes);
    for (size_t i = 0; i < series.size(); ++i) {
        t_subsets[size_t(series_labels[i])].push_back(extract_indices(series[i], bundle));
        t_raw[size_t(series_labels[i])].push_back(series[i]);
    }
    for (size_t i = 0; i < images.size(); ++i) {
        v_subsets[size_t(image_labels[i])].push_back(extract_indices(images[i], bundle));
        v_raw[size_t(image_labels[i])].push_back(images[i]);
    }

    std::vector<IndexHistogram> t_hists, v_hists;
    for (int c = 0; c < classes; ++c) {
        t_hists.push_back(index_histogram(t_subsets[size_t(c)], bc.heads, bc.codes));
        v_hists.push_back(index_histogram(v_subsets[size_t(c)], bc.heads, bc.codes));
    }
    const Mat costs = cost_matrix(t_hists, v_hists);
    const Assignment assignment = hungarian_assign(costs);

    {
        std::ostringstream body;
        body.precision(17);
        body << "temporal_class,visual_class,jsd\n";
        for (size_t m = 0; m < assignment.col_of_row.size(); ++m)
            body << m << ',' << assignment.col_of_row[m] << ','
                 << costs(int(m), assignment.col_of_row[m]) << '\n';
        write_text_file(out_path(args, "assignment.csv"), body.str());
    }

    const auto pairs = build_paired_dataset(t_subsets, v_subsets, assignment, cfg.seed ^ 0xC33Du);
    const AlignTrainResult trained =
        train_alignment(pairs, bundle, Direction::TemporalToVisual, cfg.align_config());
    save_alignment(trained.model, out_path(args, "align_cls.tart"));

    std::ostringstream map;
    for (size_t m = 0; m < assignment.col_of_row.size(); ++m)
        map << (m ? " " : "") << m << "->" << assignment.col_of_row[m];
    std::cout << "align-classify: assignment " << map.str() << ", cost " << assignment.cost
              << ", cross-entropy " << trained.loss_curve.back() << ", model "
              << out_path(args, "align_cls.tart") << "\n";
    return 0;
}

int cmd_classify(const CommonArgs& args, const std::string& bundle_path,
                 const std::string& align_path) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);
    const std::string apath =
        align_path.empty() ? (fs::path(args.out_dir) / "align_cls.tart").string() : align_path;
    if (!fs::exists(apath))
        fail(Err::MissingCheckpoint, apath + " (run the align-classify command first)");
    const AlignmentModel model = load_alignment(apath);

    // rebuild the class assignment from its CSV
    std::vector<int> visual_of_temporal;
    {
        std::ifstream in(fs::path(args.out_dir) / "assignment.csv");
        require(in.good(), Err::MissingCheckpoint, "assignment.csv not found in out dir");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const size_t c1 = line.find(',');
            const size_t c2 = line.find(',', c1 + 1);
            require(c1 != std::string::npos && c2 != std::string::npos, Err::ParseError,
                    "bad assignment.csv row");
            visual_of_temporal.push_back(std::stoi(line.substr(c1 + 1, c2 - c1 - 1)));
        }
    }

    const BundleConfig& bc = bundle.cfg;
    std::vector<int> image_labels;
    const auto images =
        desk_train_images(bc.image_height(), bc.image_width(), cfg.seed, &image_labels);
    std::vector<std::vector<Image>> refs(visual_of_temporal.size());
    for (size_t t_cls = 0; t_cls < visual_of_temporal.size(); ++t_cls)
        for (size_t i = 0; i < images.size(); ++i)
            if (image_labels[i] == visual_of_temporal[t_cls]) refs[t_cls].push_back(images[i]);
    const NearestCentroidClassifier classifier(refs);

    std::vector<int> truth;
    const auto heldout = desk_heldout_series(bc.series_length(), cfg.seed, 150, &truth);
    int hits = 0;
    for (size_t i = 0; i < heldout.size(); ++i)
        if (classify_series(heldout[i], model, bundle, classifier) == truth[i]) ++hits;
    const double accuracy = double(hits) / double(heldout.size());

    {
        std::ostringstream body;
        body << "samples,correct,accuracy\n"
             << heldout.size() << ',' << hits << ',' << accuracy << '\n';
        write_text_file(out_path(args, "accuracy.csv"), body.str());
    }
    std::cout << "classify: accuracy " << accuracy << " on " << heldout.size()
              << " held-out series\n";
    return 0;
}

int cmd_convert(const CommonArgs& args, const std::string& bundle_path, const std::string& input,
                const std::string& direction, double mean, double sd) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);

    std::string dir = direction;
    if (dir.empty()) {
        if (input.empty() || input.ends_with(".csv"))
            dir = "t2i";
        else
            dir = "i2t";
    }

    if (dir == "t2i") {
        TimeSeries x;
        if (input.empty()) {
            x = desk_heldout_series(bundle.cfg.series_length(), cfg.seed, 1)[0];
        } else {
            x = load_series_csv(input, 0)[0];
        }
        const Image img = series_to_image(x, bundle);
        save_image(img, out_path(args, "converted.pgm"));
        std::cout << "convert: series(" << x.length() << ") -> image " << img.width << "x"
                  << img.height << " at " << out_path(args, "converted.pgm") << "\n";
        return 0;
    }
    if (dir == "i2t") {
        require(!input.empty(), Err::EmptyFile, "i2t conversion needs --input image");
        const Image img = load_image(input);
        const TimeSeries x = image_to_series(img, bundle, {mean, sd});
        save_series_csv({x}, out_path(args, "converted.csv"));
        std::cout << "convert: image " << img.width << "x" << img.height << " -> series("
                  << x.length() << ") at " << out_path(args, "converted.csv") << "\n";
        return 0;
    }
    fail(Err::ParseError, "direction must be t2i or i2t");
}

int cmd_forecast(const CommonArgs& args, const std::string& bundle_path, const std::string& input,
                 const std::string& painter_name) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);
    const ForecastConfig fc = cfg.forecast_config();

    TimeSeries full;
    std::string dataset = "synthetic";
    if (input.empty()) {
        full = desk_heldout_series(fc.context_length + fc.horizon, cfg.seed ^ 0xF04Eu, 1)[0];
    } else {
        full = load_series_csv(input, 0)[0];
        dataset = fs::path(input).stem().string();
    }
    require(full.length() >= fc.context_length, Err::GeometryMismatch,
            "need at least context_length values");

    TimeSeries context;
    context.values.assign(full.values.begin(), full.values.begin() + fc.context_length);
    const bool have_truth = full.length() >= fc.context_length + fc.horizon;

    TimeSeries pred;
    if (painter_name == "oracle") {
        require(have_truth, Err::GeometryMismatch,
                "oracle outpainter needs context_length + horizon values");
        TimeSeries future;
        future.values.assign(full.values.begin() + fc.context_length,
                             full.values.begin() + fc.context_length + fc.horizon);
        const OracleOutpainter painter(bundle, future, compute_norm_stats(context.values));
        pred = forecast(context, fc, bundle, painter);
    } else if (painter_name == "tile") {
        const TileOutpainter painter;
        pred = forecast(context, fc, bundle, painter);
    } else {
        fail(Err::ParseError, "outpainter must be tile or oracle");
    }

    save_series_csv({pred}, out_path(args, "forecast.csv"));
    std::ostringstream line;
    line << "forecast: horizon " << fc.horizon << " via " << painter_name;
    if (have_truth) {
        std::vector<double> truth(full.values.begin() + fc.context_length,
                                  full.values.begin() + fc.context_length + fc.horizon);
        const ForecastErrors err = eval_forecast(pred.values, truth);
        std::ostringstream body;
        body.precision(17);
        body << "dataset,horizon,mse,mae\n"
             << dataset << ',' << fc.horizon << ',' << err.mse << ',' << err.mae << '\n';
        write_text_file(out_path(args, "forecast_report.csv"), body.str());
        line << ", mse " << err.mse << ", mae " << err.mae;
    }
    line << ", values " << out_path(args, "forecast.csv");
    std::cout << line.str() << "\n";
    return 0;
}

int cmd_stylize(const CommonArgs& args, const std::string& bundle_path, const std::string& image_in,
                const std::string& series_in) {
    const RunConfig cfg = resolve_config(args);
    const TokenizerBundle bundle = load_bundle_or_die(args, bundle_path);

    Image img;
    if (image_in.empty())
        img = desk_heldout_images(bundle.cfg.image_height(), bundle.cfg.image_width(),
                                  cfg.seed ^ 0x57E1u, 1)[0];
    else
        img = load_image(image_in);

    TimeSeries x;
    if (series_in.empty())
        x = desk_heldout_series(bundle.cfg.series_length(), cfg.seed ^ 0x57E2u, 1)[0];
    else
        x = load_series_csv(series_in, 0)[0];

    const Image styled = stylize(img, x, bundle);
    save_image(styled, out_path(args, "stylized.pgm"));
    std::cout << "stylize: wrote " << out_path(args, "stylized.pgm") << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    std::ostringstream body;
    int metrics = 0;
    auto grab_last_line = [](const fs::path& p) -> std::string {
        std::ifstream in(p);
        std::string line, last;
        while (std::getline(in, line))
            if (!line.empty()) last = line;
        return last;
    };

    const fs::path out(args.out_dir);
    body << "source,detail\n";
    if (fs::exists(out / "loss_curve.csv")) {
        body << "warmup_final," << grab_last_line(out / "loss_curve.csv") << '\n';
        ++metrics;
    }
    if (fs::exists(out / "forecast_report.csv")) {
        body << "forecast," << grab_last_line(out / "forecast_report.csv") << '\n';
        ++metrics;
    }
    if (fs::exists(out / "accuracy.csv")) {
        body << "classification," << grab_last_line(out / "accuracy.csv") << '\n';
        ++metrics;
    }
    if (fs::exists(out / "assignment.csv")) {
        body << "assignment," << grab_last_line(out / "assignment.csv") << '\n';
        ++metrics;
    }
    write_text_file(out_path(args, "report.csv"), body.str());
    std::cout << "report: " << metrics << " result files summarized in "
              << out_path(args, "report.csv") << "\n";
    return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"temporal-visual conversion toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string bundle_path, align_path, input, direction, painter = "tile";
    std::string image_in, series_in;
    double mean = 0.0, sd = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_out = true) {
        sub->add_option("--config", common.config_path, "run configuration file");
        sub->add_option("--seed", common.seed_override, "override the config seed");
        if (needs_out) sub->add_option("--out", common.out_dir, "output directory");
    };

    auto* synth = app.add_subcommand("synth-data", "generate the synthetic corpora");
    add_common(synth);
    auto* warmup = app.add_subcommand("warmup", "train the dual autoencoders and codebook");
    add_common(warmup);
    auto* alignf = app.add_subcommand("align-forecast", "train sliding-window alignment");
    add_common(alignf);
    alignf->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    auto* alignc = app.add_subcommand("align-classify", "class pairing and alignment training");
    add_common(alignc);
    alignc->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    auto* convert = app.add_subcommand("convert", "convert between series and images");
    add_common(convert);
    convert->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    convert->add_option("--input", input, "input CSV or PGM file");
    convert->add_option("--direction", direction, "t2i or i2t");
    convert->add_option("--mean", mean, "denormalization mean for i2t");
    convert->add_option("--std", sd, "denormalization std for i2t");
    auto* fcast = app.add_subcommand("forecast", "outpainting forecast");
    add_common(fcast);
    fcast->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    fcast->add_option("--input", input, "input series CSV (first column)");
    fcast->add_option("--outpainter", painter, "tile or oracle");
    auto* classify = app.add_subcommand("classify", "classify held-out series");
    add_common(classify);
    classify->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    classify->add_option("--align", align_path, "alignment checkpoint");
    auto* style = app.add_subcommand("stylize", "fuse a series into an image");
    add_common(style);
    style->add_option("--bundle", bundle_path, "tokenizer bundle checkpoint");
    style->add_option("--image", image_in, "input PGM image");
    style->add_option("--series", series_in, "input series CSV");
    auto* report = app.add_subcommand("report", "summarize results in the out directory");
    add_common(report);
    auto* selftest = app.add_subcommand("selftest", "run the oracle suites");
    add_common(selftest, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth_data(common);
        if (warmup->parsed()) return cmd_warmup(common);
        if (alignf->parsed()) return cmd_align_forecast(common, bundle_path);
        if (alignc->parsed()) return cmd_align_classify(common, bundle_path);
        if (convert->parsed()) return cmd_convert(common, bundle_path, input, direction, mean, sd);
        if (fcast->parsed()) return cmd_forecast(common, bundle_path, input, painter);
        if (classify->parsed()) return cmd_classify(common, bundle_path, align_path);
        if (style->parsed()) return cmd_stylize(common, bundle_path, image_in, series_in);
        if (report->parsed()) return cmd_report(common);
        if (selftest->parsed()) {
            const int failures = run_selftest(std::cout);
            if (failures == 0) {
                std::cout << "selftest: PASS (7 suites)\n";
                return 0;
            }
            std::cout << "selftest: FAIL (" << failures << " suites)\n";
            return 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace tvc
