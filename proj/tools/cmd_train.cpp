#include <cstdio>
#include <fstream>

#include "facets/render.hpp"
#include "common.hpp"

namespace facets::cli {

namespace {

Dataset dataset_for_task(const Options& opt) {
    const std::string task = opt.str("task");
    CircleParams p;
    p.per_class = opt.count("n_per_class");
    p.inner_radius = opt.num("inner_radius");
    p.annulus_inner = opt.num("annulus_inner");
    p.annulus_outer = opt.num("annulus_outer");
    p.center_scale = opt.num("center_scale");
    const std::uint64_t seed = opt.seed("seed");
    if (task == "xor4") return make_xor4();
    if (task == "circle") return make_circle_annulus(p, seed);
    if (task == "circles_grid") return make_circles_grid(p, seed);
    if (task == "digits") {
        if (opt.str("data").empty())
            throw UsageError("task=digits needs data=<dataset spec>");
        return load_dataset_spec(opt.str("data"));
    }
    throw UsageError("unknown task '" + task + "'");
}

} // namespace

int cmd_train(const std::vector<std::string>& args) {
    Options opt("train",
                "train an MLP with minibatch SGD and write weight snapshots");
    opt.add("task", "xor4 | circle | circles_grid | digits", "", true)
        .add("data", "dataset spec for task=digits (see README)")
        .add("arch", "layer widths, e.g. 2-8-1", "", true)
        .add("lr", "learning rate", "0.01")
        .add("momentum", "momentum coefficient", "0.5")
        .add("weight_decay", "L2 coefficient applied to weights and biases", "0.01")
        .add("batch_size", "minibatch size", "64")
        .add("epochs", "training epochs", "30")
        .add("loss", "mse | cross_entropy", "mse")
        .add("seed", "root seed for init, shuffling and sampling", "0")
        .add("snapshot_every", "epochs between weight snapshots (0: init+final)", "0")
        .add("n_per_class", "samples per class for the circle tasks", "250")
        .add("inner_radius", "disk radius for the circle tasks", "0.5")
        .add("annulus_inner", "annulus inner radius", "0.75")
        .add("annulus_outer", "annulus outer radius", "1.0")
        .add("center_scale", "group spacing for circles_grid", "1.0")
        .add("frames", "render one region SVG per snapshot (2-input nets)", "false")
        .add("frames_mode", "by_class | by_region", "by_class")
        .add("bbox", "frame viewport xmin,ymin,xmax,ymax (default: data bbox +20%)")
        .add("outdir", "output directory", "", true);
    opt.parse(args);

    Dataset data = dataset_for_task(opt);
    const auto widths = parse_arch(opt.str("arch"));
    if (widths.front() != data.inputs.cols())
        throw UsageError("arch input width does not match the dataset");

    TrainConfig cfg;
    cfg.lr = opt.num("lr");
    cfg.momentum = opt.num("momentum");
    cfg.weight_decay = opt.num("weight_decay");
    cfg.batch_size = opt.count("batch_size");
    cfg.epochs = opt.count("epochs");
    cfg.seed = opt.seed("seed");
    cfg.snapshot_every = opt.count("snapshot_every");
    const std::string loss = opt.str("loss");
    if (loss == "mse")
        cfg.loss = Loss::mse;
    else if (loss == "cross_entropy")
        cfg.loss = Loss::cross_entropy;
    else
        throw UsageError("loss must be mse or cross_entropy");

    const auto outdir = ensure_outdir(opt);
    Mlp net = init_net(widths, cfg.seed);
    TrainRun run = train(net, data, cfg);

    for (const auto& [epoch, snap] : run.snapshots) {
        char name[40];
        std::snprintf(name, sizeof(name), "weights_epoch_%04zu.txt", epoch);
        save_mlp(outdir / name, snap);
    }
    save_mlp(outdir / "weights_final.txt", run.final_net);

    {
        std::ofstream os(outdir / "loss.txt");
        char buf[64];
        for (std::size_t e = 0; e < run.loss_curve.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%zu %.17g\n", e, run.loss_curve[e]);
            os << buf;
        }
    }
    {
        std::ofstream os(outdir / "report.txt");
        const double acc = classification_accuracy(run.final_net, data);
        std::size_t correct = std::size_t(acc * double(data.size()) + 0.5);
        os << "task " << opt.str("task") << "\n";
        os << "arch " << opt.str("arch") << "\n";
        os << "epochs " << cfg.epochs << "\n";
        os << "train_correct " << correct << "/" << data.size() << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "final_loss %.17g\n", run.loss_curve.back());
        os << buf;
    }

    if (opt.flag("frames")) {
        if (net.input_dim() != 2) throw UsageError("frames need a 2-input net");
        const BBox box = opt.str("bbox").empty() ? data.bounding_box(0.2)
                                                 : parse_bbox(opt.str("bbox"));
        const RegionFillMode mode = opt.str("frames_mode") == "by_region"
                                        ? RegionFillMode::by_region
                                        : RegionFillMode::by_class;
        render_frames(run, box, outdir / "frames", mode);
    }
    return 0;
}

} // namespace facets::cli
