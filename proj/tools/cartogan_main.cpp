// Command-line front end for the map style-transfer pipeline:
// dataset -> train -> transfer -> train-ismap -> evaluate, plus tileset
// ingestion and a read-only HTTP tile endpoint.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cartogan/pipeline.hpp"
#include "cartogan/serve.hpp"

using cartogan::pipeline::PipelineConfig;

int main(int argc, char** argv) {
    CLI::App app{"cartogan: procedural tilesets, GAN map style transfer and map/non-map "
                 "classification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string model = "pix2pix";
    int zoom = -1;
    std::string split = "test";
    std::string ingest_dir, ingest_role = "simple";
    std::string serve_root;
    int serve_port = 8080;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    };
    auto add_model_zoom = [&](CLI::App* cmd) {
        cmd->add_option("--model", model, "pix2pix | cyclegan")
            ->check(CLI::IsMember({"pix2pix", "cyclegan"}));
        cmd->add_option("--zoom", zoom, "zoom level from the config")->required();
    };

    CLI::App* dataset = app.add_subcommand("dataset", "generate the simple/target/nonmap tilesets");
    add_config(dataset);

    CLI::App* train = app.add_subcommand("train", "train a style-transfer model at one zoom");
    add_config(train);
    add_model_zoom(train);

    CLI::App* transfer = app.add_subcommand("transfer", "apply a trained generator to tiles");
    add_config(transfer);
    add_model_zoom(transfer);
    transfer->add_option("--split", split, "which simple-tileset split to style (train|test)")
        ->check(CLI::IsMember({"train", "test"}));

    CLI::App* train_ismap =
        app.add_subcommand("train-ismap", "train the map/non-map classifier");
    add_config(train_ismap);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score transfer tiles with the classifier");
    add_config(evaluate);
    add_model_zoom(evaluate);

    CLI::App* ingest = app.add_subcommand("ingest", "build a manifest from a z/x/y tile tree");
    ingest->add_option("--dir", ingest_dir, "tileset directory")->required();
    ingest->add_option("--role", ingest_role, "simple | target | transfer | nonmap");

    CLI::App* serve = app.add_subcommand("serve", "read-only HTTP endpoint over a tileset");
    serve->add_option("--root", serve_root, "tileset directory with manifest.json")->required();
    serve->add_option("--port", serve_port, "listen port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dataset->parsed()) {
            cartogan::pipeline::cmd_dataset(PipelineConfig::from_file(config_path));
        } else if (train->parsed()) {
            cartogan::pipeline::cmd_train(PipelineConfig::from_file(config_path), model, zoom);
        } else if (transfer->parsed()) {
            cartogan::pipeline::cmd_transfer(PipelineConfig::from_file(config_path), model, zoom,
                                             split);
        } else if (train_ismap->parsed()) {
            cartogan::pipeline::cmd_train_ismap(PipelineConfig::from_file(config_path));
        } else if (evaluate->parsed()) {
            cartogan::pipeline::cmd_evaluate(PipelineConfig::from_file(config_path), model, zoom);
        } else if (ingest->parsed()) {
            auto result = cartogan::pipeline::cmd_ingest(ingest_dir, ingest_role);
            for (const auto& w : result.warnings)
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::printf("ingest: %zu tiles, %zu rejected\n", result.manifest.tiles.size(),
                        result.warnings.size());
        } else if (serve->parsed()) {
            cartogan::pipeline::cmd_serve(serve_root, serve_port);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
