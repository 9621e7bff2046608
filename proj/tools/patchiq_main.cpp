// Copyright 2026 The patchiq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "patchiq/degrade.hpp"
#include "patchiq/error.hpp"
#include "patchiq/eval.hpp"
#include "patchiq/frc.hpp"
#include "patchiq/image_io.hpp"
#include "patchiq/net.hpp"
#include "patchiq/predict.hpp"
#include "patchiq/synth.hpp"
#include "patchiq/train.hpp"
#include "patchiq/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patchiq;

namespace {

// JSON config files: top level holds global flags, one nested object per
// subcommand. Command-line flags override config values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump_app(app, default_also).dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        walk(j, "", {}, items);
        return items;
    }

private:
    static json dump_app(const CLI::App* app, bool default_also) {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames()[0];
            if (opt->get_type_size() != 0) {
                if (opt->count() == 1) j[name] = opt->results().at(0);
                else if (opt->count() > 1) j[name] = opt->results();
                else if (default_also && !opt->get_default_str().empty())
                    j[name] = opt->get_default_str();
            } else if (opt->count() > 0) {
                j[name] = true;
            } else if (default_also) {
                j[name] = false;
            }
        }
        for (const CLI::App* sub : app->get_subcommands({}))
            j[sub->get_name()] = dump_app(sub, default_also);
        return j;
    }

    static void walk(const json& j, const std::string& name, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& out) {
        if (j.is_object()) {
            if (!name.empty()) parents.push_back(name);
            for (auto it = j.begin(); it != j.end(); ++it) walk(it.value(), it.key(), parents, out);
            return;
        }
        if (name.empty()) throw CLI::ConversionError("config top level must be a JSON object");
        CLI::ConfigItem item;
        item.name = name;
        item.parents = std::move(parents);
        if (j.is_array()) {
            for (const auto& v : j) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else if (j.is_string()) {
            item.inputs = {j.get<std::string>()};
        } else {
            item.inputs = {j.dump()};
        }
        out.push_back(std::move(item));
    }
};

struct GlobalOpts {
    uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = static_cast<int>(std::thread::hardware_concurrency());
};

// Every run documents itself: the resolved option set that reproduces it.
void write_resolved_config(const CLI::App& root, const std::string& out_dir,
                           const std::string& subcommand) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / (subcommand + "_config.json"));
    if (!out) throw DataError("cannot write resolved config in " + out_dir);
    out << root.config_to_str(/*default_also=*/true, /*write_description=*/false) << '\n';
}

// ---- small CSV reader: header + comma-separated fields, no quoting ----
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw DataError("CSV is missing column '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            fields.resize(t.header.size());
            t.rows.push_back(std::move(fields));
        }
    }
    if (first) throw DataError("empty CSV: " + path);
    return t;
}

// id -> image path pairs from a manifest (optionally one split) or from
// explicit files (id = file stem).
std::vector<std::pair<std::string, std::string>> collect_inputs(
    const std::string& manifest_path, const std::string& split_name,
    const std::vector<std::string>& files) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!manifest_path.empty()) {
        DatasetManifest manifest = load_manifest(manifest_path);
        for (const auto& e : manifest.entries) {
            if (!split_name.empty() && e.split != split_from_string(split_name)) continue;
            pairs.emplace_back(e.id, e.image_path);
        }
    }
    for (const auto& f : files) pairs.emplace_back(fs::path(f).stem().string(), f);
    if (pairs.empty()) throw UsageError("no inputs: pass --manifest and/or image files");
    return pairs;
}

std::map<std::string, double> load_scores(const std::string& predictions_csv) {
    CsvTable t = read_csv(predictions_csv);
    int id_col = t.column("id");
    int score_col = t.column("score");
    std::map<std::string, double> scores;
    for (const auto& row : t.rows) {
        if (row[score_col].empty()) continue; // failed prediction row
        scores[row[id_col]] = std::stod(row[score_col]);
    }
    if (scores.empty()) throw DataError("no usable scores in " + predictions_csv);
    return scores;
}

// ---- subcommand bodies ----

void run_simulate(const GlobalOpts& g, const std::string& spec_path, const std::string& format) {
    std::ifstream in(spec_path);
    if (!in) throw DataError("cannot read " + spec_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("spec file is not valid JSON: ") + e.what());
    }
    json list = j.is_array() ? j : j.value("structures", json::array());
    if (!list.is_array() || list.empty())
        throw DataError("spec file must be a JSON array of structure specs");

    fs::create_directories(g.out_dir);
    std::ofstream index(fs::path(g.out_dir) / "simulate_index.csv");
    index << "id,path\n";
    std::string ext = format == "png" ? ".png" : format == "tif" ? ".tif" : ".f32";
    int i = 0;
    for (const auto& item : list) {
        StructureSpec spec = structure_spec_from_json(item);
        std::string id = item.value("id", to_string(spec.kind) + "_" + std::to_string(i));
        if (!item.contains("seed")) spec.seed = mix_seed(g.seed, fnv1a(id));
        Image img = gen_structure(spec);
        std::string path = (fs::path(g.out_dir) / (id + ext)).string();
        write_image(img, path);
        index << id << ',' << path << '\n';
        ++i;
    }
    std::cout << "wrote " << i << " images to " << g.out_dir << "\n";
}

void run_degrade(const GlobalOpts& g, const std::string& preset) {
    DatasetRecipe recipe;
    if (preset == "paper") recipe = paper_recipe(g.seed);
    else if (preset == "desk") recipe = desk_recipe(g.seed);
    else if (preset == "noisefree") recipe = noisefree_recipe(g.seed);
    else if (preset == "graded") recipe = graded_recipe(g.seed);
    else throw UsageError("unknown preset '" + preset + "' (paper|desk|noisefree|graded)");
    DatasetManifest manifest = build_dataset(recipe, g.out_dir, g.threads);
    std::cout << "preset " << preset << ": " << manifest.entries.size() << " images under "
              << g.out_dir << "\n";
}

int write_frc_csv(const std::vector<std::pair<std::string, std::string>>& inputs,
                  const FrcOptions& opts, int threads, const std::string& csv_path) {
    struct Row {
        std::string id;
        ResolutionEstimate est;
        std::string error;
    };
    std::vector<Row> rows(inputs.size());
    parallel_for(static_cast<int64_t>(inputs.size()), threads, [&](int64_t i) {
        rows[i].id = inputs[i].first;
        try {
            Image img = rescale_unit(read_image(inputs[i].second));
            rows[i].est = frc_resolution(img, opts);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write " + csv_path);
    csv.precision(10);
    csv << "id,cutoff_freq,resolution_px,resolution_um,no_crossing_flag\n";
    int written = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            warn("frc failed for '" + r.id + "': " + r.error);
            continue;
        }
        csv << r.id << ',' << r.est.cutoff_frequency << ',' << r.est.resolution_px << ',';
        if (r.est.resolution_um) csv << *r.est.resolution_um;
        csv << ',' << (r.est.no_crossing ? 1 : 0) << '\n';
        ++written;
    }
    return written;
}

void run_frc(const GlobalOpts& g, const std::string& manifest_path, const std::string& split,
             const std::vector<std::string>& files, const FrcOptions& opts) {
    auto inputs = collect_inputs(manifest_path, split, files);
    fs::create_directories(g.out_dir);
    std::string csv_path = (fs::path(g.out_dir) / "frc.csv").string();
    if (write_frc_csv(inputs, opts, g.threads, csv_path) == 0)
        throw DataError("FRC failed for every input");

    json meta{{"threshold", opts.threshold},
              {"smoothing_window", opts.smoothing_window},
              {"images", inputs.size()}};
    std::ofstream js(fs::path(g.out_dir) / "frc_meta.json");
    js << meta.dump(2) << '\n';
    std::cout << "frc estimates for " << inputs.size() << " images -> " << csv_path << "\n";
}

void run_label(const GlobalOpts& g, const std::string& manifest_path, const std::string& from,
               const std::string& csv_path, const FrcOptions& opts, std::string out_path) {
    DatasetManifest manifest = load_manifest(manifest_path);
    if (out_path.empty()) out_path = manifest_path;

    if (from == "frc") {
        parallel_for(static_cast<int64_t>(manifest.entries.size()), g.threads, [&](int64_t i) {
            auto& e = manifest.entries[i];
            try {
                Image img = rescale_unit(read_image(e.image_path));
                e.label = frc_resolution(img, opts).resolution_px;
            } catch (const std::exception& ex) {
                warn("label skipped for '" + e.id + "': " + ex.what());
            }
        });
    } else if (from == "csv") {
        if (csv_path.empty()) throw UsageError("--from csv requires --csv");
        CsvTable t = read_csv(csv_path);
        int id_col = t.column("id");
        int label_col = t.column("label");
        std::map<std::string, double> labels;
        for (const auto& row : t.rows) labels[row[id_col]] = std::stod(row[label_col]);
        for (auto& e : manifest.entries) {
            auto it = labels.find(e.id);
            if (it != labels.end()) e.label = it->second;
        }
    } else {
        throw UsageError("--from must be frc or csv");
    }

    save_manifest(manifest, out_path);
    fs::create_directories(g.out_dir);
    std::ofstream labels_csv(fs::path(g.out_dir) / "labels.csv");
    labels_csv.precision(10);
    labels_csv << "id,label\n";
    int labeled = 0;
    for (const auto& e : manifest.entries)
        if (e.label) {
            labels_csv << e.id << ',' << *e.label << '\n';
            ++labeled;
        }
    std::cout << labeled << "/" << manifest.entries.size() << " entries labeled -> " << out_path
              << "\n";
}

void run_train(const GlobalOpts& g, const std::string& manifest_path, TrainConfig cfg,
               const std::string& checkpoint, std::string model_path) {
    if (checkpoint == "best") cfg.checkpoint_policy = CheckpointPolicy::BestValidation;
    else if (checkpoint == "final") cfg.checkpoint_policy = CheckpointPolicy::Final;
    else throw UsageError("--checkpoint must be best or final");
    cfg.seed = g.seed;

    DatasetManifest manifest = load_manifest(manifest_path);
    auto train_samples = load_samples(manifest, Split::Train);
    auto val_samples = load_samples(manifest, Split::Val);

    ModelSpec spec;
    Model model = init_model(spec, g.seed);

    fs::create_directories(g.out_dir);
    if (model_path.empty()) model_path = (fs::path(g.out_dir) / "model.bin").string();
    std::string history_path = (fs::path(g.out_dir) / "history.csv").string();
    std::string live_log = (fs::path(g.out_dir) / "train_log.csv").string();

    TrainHistory history = train_model(model, std::move(train_samples), val_samples, cfg, live_log);
    history.save_csv(history_path);
    save_model(model, model_path);

    json meta{{"manifest", manifest_path},
              {"epochs", cfg.epochs},
              {"batch_patches", cfg.batch_patches},
              {"learning_rate", cfg.learning_rate},
              {"seed", cfg.seed},
              {"checkpoint", checkpoint},
              {"best_epoch", history.best_epoch},
              {"label_mean", model.label_mean},
              {"label_std", model.label_std},
              {"parameter_count", model.net.parameter_count()},
              {"final_train_e_wp", history.epochs.empty() ? 0.0 : history.epochs.back().train_e_wp},
              {"final_val_mse", history.epochs.empty() ? 0.0 : history.epochs.back().val_mse}};
    std::ofstream js(fs::path(g.out_dir) / "train_meta.json");
    js << meta.dump(2) << '\n';
    std::cout << "trained " << cfg.epochs << " epochs, best epoch " << history.best_epoch
              << ", model -> " << model_path << "\n";
}

void run_predict(const GlobalOpts& g, const std::string& model_path,
                 const std::string& manifest_path, const std::string& split,
                 const std::vector<std::string>& files, bool heatmaps) {
    Model model = load_model(model_path);
    auto inputs = collect_inputs(manifest_path, split, files);
    BatchReport report = predict_batch(model, inputs, g.out_dir, heatmaps);
    int ok = 0;
    for (const auto& item : report.items) ok += item.ok ? 1 : 0;
    if (ok == 0) throw DataError("prediction failed for every input");
    std::cout << ok << "/" << report.items.size() << " predictions -> "
              << (fs::path(g.out_dir) / "predictions.csv").string() << "\n";
}

void run_rank(const GlobalOpts& g, const std::string& predictions_csv) {
    auto scores = load_scores(predictions_csv);
    std::vector<std::string> ids;
    std::vector<double> vals;
    for (const auto& [id, s] : scores) {
        ids.push_back(id);
        vals.push_back(s);
    }
    auto ranking = build_ranking(ids, vals);
    fs::create_directories(g.out_dir);
    save_ranking_csv(ranking, (fs::path(g.out_dir) / "ranking.csv").string());
    save_ranking_chart(ranking, (fs::path(g.out_dir) / "ranking.png").string());
    std::cout << "ranked " << ranking.size() << " images; best '" << ranking.front().id << "' ("
              << ranking.front().score << ")\n";
}

void run_krcc(const GlobalOpts& g, const std::string& manifest_path,
              const std::string& predictions_csv, const std::string& kind_name) {
    DatasetManifest manifest = load_manifest(manifest_path);
    auto scores = load_scores(predictions_csv);

    std::vector<ArtifactKind> kinds;
    if (kind_name.empty() || kind_name == "all") {
        kinds = {ArtifactKind::Blur, ArtifactKind::Vignetting};
    } else {
        kinds = {artifact_kind_from_string(kind_name)};
    }

    json out = json::array();
    for (ArtifactKind kind : kinds) {
        std::vector<int> level;
        std::vector<double> score;
        for (const auto& e : manifest.entries) {
            if (e.artifact.kind != kind || !e.artifact.level || *e.artifact.level < 0) continue;
            auto it = scores.find(e.id);
            if (it == scores.end()) continue;
            level.push_back(*e.artifact.level);
            score.push_back(it->second);
        }
        if (level.empty()) {
            warn("no leveled '" + to_string(kind) + "' entries matched the predictions");
            continue;
        }
        double tau = grouped_krcc(level, score);
        // Scores are resolution estimates (higher = worse); the quality
        // convention flips the sign.
        out.push_back(json{{"artifact", to_string(kind)},
                           {"samples", level.size()},
                           {"krcc", tau},
                           {"krcc_quality", -tau}});
        std::cout << to_string(kind) << ": grouped KRCC " << tau << " (quality convention "
                  << -tau << ")\n";
    }
    if (out.empty()) throw DataError("no artifact levels to correlate against");
    fs::create_directories(g.out_dir);
    std::ofstream js(fs::path(g.out_dir) / "krcc.json");
    js << out.dump(2) << '\n';
}

void run_report(const GlobalOpts& g, const std::string& predictions_csv,
                const std::string& manifest_path, const std::string& labels_csv) {
    auto scores = load_scores(predictions_csv);
    std::map<std::string, double> labels;
    if (!manifest_path.empty()) {
        DatasetManifest manifest = load_manifest(manifest_path);
        for (const auto& e : manifest.entries)
            if (e.label) labels[e.id] = *e.label;
    } else if (!labels_csv.empty()) {
        CsvTable t = read_csv(labels_csv);
        int id_col = t.column("id");
        int label_col = t.column("label");
        for (const auto& row : t.rows) labels[row[id_col]] = std::stod(row[label_col]);
    } else {
        throw UsageError("report needs --manifest or --labels");
    }

    std::vector<std::string> ids;
    std::vector<double> lab, pred;
    for (const auto& [id, s] : scores) {
        auto it = labels.find(id);
        if (it == labels.end()) continue;
        ids.push_back(id);
        lab.push_back(it->second);
        pred.push_back(s);
    }
    if (ids.size() < 2) throw DataError("fewer than two ids shared by predictions and labels");

    RegressionReport rep = regression_report(lab, pred);
    fs::create_directories(g.out_dir);
    save_scatter_csv(ids, lab, pred, (fs::path(g.out_dir) / "scatter.csv").string());
    json j{{"n", rep.n},          {"slope", rep.slope}, {"intercept", rep.intercept},
           {"pearson_r", rep.pearson_r}, {"mse", rep.mse},     {"mae", rep.mae},
           {"kendall_tau", rep.tau}};
    std::ofstream js(fs::path(g.out_dir) / "report.json");
    js << j.dump(2) << '\n';
    std::cout << "n=" << rep.n << " r=" << rep.pearson_r << " tau=" << rep.tau
              << " mae=" << rep.mae << "\n";
}

void run_bench(const GlobalOpts& g, const std::string& model_path,
               const std::string& manifest_path, const std::string& split,
               const std::vector<std::string>& files) {
    Model model = load_model(model_path);
    auto inputs = collect_inputs(manifest_path, split, files);
    std::vector<std::string> paths;
    for (const auto& [id, p] : inputs) paths.push_back(p);
    BenchReport rep = bench(model, paths);
    fs::create_directories(g.out_dir);
    save_bench_json(rep, (fs::path(g.out_dir) / "bench.json").string());
    std::cout << rep.images << " images | frc " << rep.frc_per_image_ms << " ms/image | model "
              << rep.model_per_image_ms << " ms/image | " << rep.hardware << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"patch-based image quality estimation pipeline"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file mirroring all flags");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker thread cap")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "render clean parametric structures");
    std::string sim_spec, sim_format = "f32";
    sim->add_option("--spec", sim_spec, "JSON array of structure specs")->required();
    sim->add_option("--format", sim_format, "f32|png|tif")->capture_default_str();

    // degrade
    auto* deg = app.add_subcommand("degrade", "build a degraded image corpus");
    std::string deg_preset = "desk";
    deg->add_option("--preset", deg_preset, "paper|desk|noisefree|graded")->capture_default_str();

    // frc
    auto* frc_cmd = app.add_subcommand("frc", "single-image FRC resolution estimates");
    std::string frc_manifest, frc_split;
    std::vector<std::string> frc_files;
    FrcOptions frc_opts;
    frc_cmd->add_option("--manifest", frc_manifest, "dataset manifest");
    frc_cmd->add_option("--split", frc_split, "restrict manifest entries to one split");
    frc_cmd->add_option("files", frc_files, "image files");
    frc_cmd->add_option("--threshold", frc_opts.threshold, "FRC cutoff threshold")
        ->capture_default_str();
    frc_cmd->add_option("--window", frc_opts.smoothing_window, "curve smoothing window")
        ->capture_default_str();

    // label
    auto* lab = app.add_subcommand("label", "attach quality labels to a manifest");
    std::string lab_manifest, lab_from = "frc", lab_csv, lab_out;
    FrcOptions lab_opts;
    lab->add_option("--manifest", lab_manifest, "dataset manifest")->required();
    lab->add_option("--from", lab_from, "frc|csv")->capture_default_str();
    lab->add_option("--csv", lab_csv, "external labels CSV (id,label)");
    lab->add_option("--out", lab_out, "labeled manifest path (default: in place)");
    lab->add_option("--threshold", lab_opts.threshold, "FRC cutoff threshold")
        ->capture_default_str();
    lab->add_option("--window", lab_opts.smoothing_window, "curve smoothing window")
        ->capture_default_str();

    // train
    auto* trn = app.add_subcommand("train", "train the patch quality model");
    std::string trn_manifest, trn_checkpoint = "best", trn_model;
    TrainConfig trn_cfg;
    trn->add_option("--manifest", trn_manifest, "labeled dataset manifest")->required();
    trn->add_option("--epochs", trn_cfg.epochs, "training epochs")->capture_default_str();
    trn->add_option("--batch", trn_cfg.batch_patches, "patches per batch")->capture_default_str();
    trn->add_option("--lr", trn_cfg.learning_rate, "Adam learning rate")->capture_default_str();
    trn->add_option("--checkpoint", trn_checkpoint, "best|final")->capture_default_str();
    trn->add_option("--model-out", trn_model, "model path (default <out-dir>/model.bin)");

    // predict
    auto* prd = app.add_subcommand("predict", "score images with a trained model");
    std::string prd_model, prd_manifest, prd_split;
    std::vector<std::string> prd_files;
    bool prd_heatmaps = false;
    prd->add_option("--model", prd_model, "trained model file")->required();
    prd->add_option("--manifest", prd_manifest, "dataset manifest");
    prd->add_option("--split", prd_split, "restrict manifest entries to one split");
    prd->add_option("files", prd_files, "image files");
    prd->add_flag("--heatmaps", prd_heatmaps, "write patch-wise quality/weight maps");

    // rank
    auto* rnk = app.add_subcommand("rank", "order images by predicted quality score");
    std::string rnk_csv;
    rnk->add_option("--predictions", rnk_csv, "predictions.csv from the predict step")->required();

    // krcc
    auto* krc = app.add_subcommand("krcc", "grouped Kendall correlation against artifact levels");
    std::string krc_manifest, krc_csv, krc_kind = "all";
    krc->add_option("--manifest", krc_manifest, "manifest with leveled artifact entries")->required();
    krc->add_option("--predictions", krc_csv, "predictions.csv")->required();
    krc->add_option("--kind", krc_kind, "blur|vignetting|all")->capture_default_str();

    // report
    auto* rep = app.add_subcommand("report", "prediction-vs-label regression report");
    std::string rep_csv, rep_manifest, rep_labels;
    rep->add_option("--predictions", rep_csv, "predictions.csv")->required();
    rep->add_option("--manifest", rep_manifest, "labeled manifest");
    rep->add_option("--labels", rep_labels, "labels CSV (id,label)");

    // bench
    auto* bch = app.add_subcommand("bench", "wall-clock FRC vs model comparison");
    std::string bch_model, bch_manifest, bch_split;
    std::vector<std::string> bch_files;
    bch->add_option("--model", bch_model, "trained model file")->required();
    bch->add_option("--manifest", bch_manifest, "dataset manifest");
    bch->add_option("--split", bch_split, "restrict manifest entries to one split");
    bch->add_option("files", bch_files, "image files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        write_resolved_config(app, g.out_dir, sub);
        if (g.threads < 1) g.threads = 1;
        if (*sim) run_simulate(g, sim_spec, sim_format);
        else if (*deg) run_degrade(g, deg_preset);
        else if (*frc_cmd) run_frc(g, frc_manifest, frc_split, frc_files, frc_opts);
        else if (*lab) run_label(g, lab_manifest, lab_from, lab_csv, lab_opts, lab_out);
        else if (*trn) run_train(g, trn_manifest, trn_cfg, trn_checkpoint, trn_model);
        else if (*prd) run_predict(g, prd_model, prd_manifest, prd_split, prd_files, prd_heatmaps);
        else if (*rnk) run_rank(g, rnk_csv);
        else if (*krc) run_krcc(g, krc_manifest, krc_csv, krc_kind);
        else if (*rep) run_report(g, rep_csv, rep_manifest, rep_labels);
        else if (*bch) run_bench(g, bch_model, bch_manifest, bch_split, bch_files);
    } catch (const UsageError& e) {
        std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}.dump() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "data"}, {"message", e.what()}}}}.dump() << "\n";
        return 3;
    }
    return 0;
}
