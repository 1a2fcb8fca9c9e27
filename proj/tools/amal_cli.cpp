// amal: train a movement model from skeleton videos, assess new performances,
// debug temporal alignment, synthesize test fixtures and inspect models.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "amal/amal.hpp"

namespace {

using namespace amal;

constexpr int kExitDomain = 1;  // assessment-domain failure
constexpr int kExitUsage = 2;   // usage / IO error

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SkeletonVideo load_video(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open video file '" + path + "'");
    return parse_video(in);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file '" + path + "'");
    return parse_model(in);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
}

std::string format_pois(const PoISet& p) {
    std::ostringstream out;
    out << "pois";
    for (int i : p.indices) out << " " << i;
    return out.str();
}

struct CommonFlags {
    std::string config_path;
    std::string warp = "poi";
    bool no_joint_grouping = false;
    bool no_deviation_segmentation = false;
    std::map<std::string, double> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--warp", warp, "warping method: poi, dtw or none")
            ->check(CLI::IsMember({"poi", "dtw", "none"}));
        cmd->add_flag("--no-joint-grouping", no_joint_grouping,
                      "blend the active/non-active score weights");
        cmd->add_flag("--no-deviation-segmentation", no_deviation_segmentation,
                      "treat every thresholded frame as deviating");
        for (const char* key :
             {"p_joint", "eta", "p_rest", "rho_gap", "eta_decay", "alpha_a", "alpha_n", "alpha_t",
              "gamma", "epsilon", "lambda", "rho_unstable", "xi", "alpha_decay", "d_cap"})
            cmd->add_option_function<double>(
                std::string("--") + key, [this, key](double v) { overrides[key] = v; },
                "override constant " + std::string(key));
    }

    PipelineOptions options() const {
        PipelineOptions opt;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
            apply_config(parse_config_file(in), opt);
        }
        std::map<std::string, std::string> flag_kv;
        for (const auto& [k, v] : overrides) {
            std::ostringstream s;
            s.precision(17);
            s << v;
            flag_kv[k] = s.str();
        }
        flag_kv["warp"] = warp;
        apply_config(flag_kv, opt);  // flag beats file beats default
        opt.scoring.joint_grouping = !no_joint_grouping;
        opt.scoring.deviation_segmentation = !no_deviation_segmentation;
        return opt;
    }
};

void print_report(const AssessmentResult& r, bool score_only, bool feedback_only) {
    std::ostringstream out;
    out.precision(6);
    if (!feedback_only) {
        out << "score " << r.score << "\n";
        out << "subscore A " << r.score_a << "\n";
        out << "subscore N " << r.score_n << "\n";
        out << "subscore T " << r.score_t << "\n";
    }
    if (!score_only && !feedback_only)
        for (const auto& s : r.segments)
            out << "segment\t" << s.key << "\t" << s.start << "\t" << s.end << "\t"
                << dev_class_name(s.dev_class) << "\t" << s.confidence << "\t" << s.mean_deviation
                << "\n";
    if (!score_only)
        for (const auto& f : r.feedback)
            out << "feedback\t" << f.text << "\t" << f.key << "\t" << f.loss << "\n";
    std::cout << out.str();
}

int cmd_train(const std::vector<std::string>& inputs, const std::string& out_path,
              const std::vector<std::string>& persons, const CommonFlags& flags) {
    if (inputs.size() < 3) {
        std::cerr << "train: need >= 3 input videos\n";
        return kExitUsage;
    }
    std::vector<SkeletonVideo> videos;
    for (const auto& p : inputs) videos.push_back(load_video(p));
    std::vector<std::string> ids = persons;
    if (ids.empty())
        for (std::size_t i = 0; i < inputs.size(); ++i) ids.push_back("person" + std::to_string(i));
    if (ids.size() != videos.size()) throw std::runtime_error("--person count must match inputs");

    TrainArtifacts art = train(videos, ids, flags.options());
    write_file(out_path, serialize_model(art.model));
    std::cerr << "active joints:";
    for (int j : art.model.active.active) std::cerr << " " << art.model.topology.joint_names[j];
    std::cerr << "\nrest count: " << art.model.rest_count()
              << "\nreference video: " << inputs[art.reference_index] << "\n";
    return 0;
}

int cmd_assess(const std::string& model_path, const std::string& video_path,
               const std::string& reference_path, bool score_only, bool feedback_only,
               const CommonFlags& flags) {
    TrainedModel model = load_model(model_path);
    SkeletonVideo video = load_video(video_path);
    PipelineOptions opt = flags.options();
    SkeletonVideo reference;
    const SkeletonVideo* ref_ptr = nullptr;
    if (opt.warp == WarpMethod::Dtw) {
        if (reference_path.empty())
            throw std::runtime_error("--warp dtw needs --reference <skv>");
        reference = normalize_video(load_video(reference_path), model.designated);
        ref_ptr = &reference;
    }
    AssessmentResult r = assess(model, video, opt, ref_ptr);
    print_report(r, score_only, feedback_only);
    return 0;
}

int cmd_align(const std::string& video_path, const std::string& model_path,
              const std::string& reference_path, const std::string& out_path,
              const CommonFlags& flags) {
    SkeletonVideo video = load_video(video_path);
    PipelineOptions opt = flags.options();

    TrainedModel model;
    if (!model_path.empty()) {
        model = load_model(model_path);
    } else if (!reference_path.empty()) {
        // Build a throwaway designated/active/PoI context from the pair.
        SkeletonVideo ref = load_video(reference_path);
        std::vector<SkeletonVideo> pair{ref, video};
        model.topology = ref.topology;
        model.designated = compute_designated_skeleton(pair, {"ref", "input"});
        std::vector<SkeletonVideo> norm;
        for (const auto& v : pair) norm.push_back(normalize_video(v, model.designated));
        model.active = detect_active_joints(norm, opt.align);
        std::vector<std::vector<RestSequence>> rests;
        for (const auto& v : norm) rests.push_back(detect_rest_sequences(v, model.active, opt.align));
        auto pois = reconcile_rest_counts(rests, norm, model.active, opt.align);
        model.reference_pois = pois[0];
        model.reference_length = norm[0].frame_count();
    } else {
        throw std::runtime_error("align needs --model or --reference");
    }

    SkeletonVideo norm = normalize_video(video, model.designated);
    PoISet own;
    SkeletonVideo warped;
    if (opt.warp == WarpMethod::Dtw) {
        SkeletonVideo ref_norm = normalize_video(load_video(reference_path), model.designated);
        warped = dtw_align(norm, ref_norm, model.active);
    } else {
        own = detect_rest_sequences(norm, model.active, opt.align, model.rest_count()).empty()
                  ? PoISet{}
                  : pois_from_rests(detect_rest_sequences(norm, model.active, opt.align,
                                                          model.rest_count()));
        warped = warp_to_reference(norm, own, model.reference_pois, model.reference_length);
    }
    if (!out_path.empty()) write_file(out_path, serialize_video(warped));
    std::cout << "input " << format_pois(own) << "\n";
    std::cout << "reference " << format_pois(model.reference_pois) << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, int count, unsigned seed,
              const std::string& perturb_desc) {
    MovementSpec spec;
    spec.seed = seed;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw UsageError("cannot open spec '" + spec_path + "'");
        auto kv = parse_config_file(in);
        auto getd = [&](const char* k, double& t) { if (kv.count(k)) t = std::stod(kv.at(k)); };
        auto geti = [&](const char* k, int& t) { if (kv.count(k)) t = std::stoi(kv.at(k)); };
        geti("duration", spec.duration);
        getd("fps", spec.fps);
        getd("noise_std", spec.noise_std);
        getd("limb_scale", spec.limb_scale);
        if (kv.count("seed")) spec.seed = static_cast<unsigned>(std::stoul(kv.at("seed")));
        if (kv.count("count")) count = std::stoi(kv.at("count"));
        if (kv.count("rests")) {
            spec.rest_plan.clear();
            std::istringstream rs(kv.at("rests"));
            std::string tok;
            while (std::getline(rs, tok, ',')) {
                auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error("rests entries must be start:duration");
                spec.rest_plan.push_back({std::stod(tok.substr(0, colon)),
                                          std::stod(tok.substr(colon + 1))});
            }
        }
    }

    Perturbation pert;
    bool do_perturb = false;
    if (!perturb_desc.empty()) {
        std::istringstream ps(perturb_desc);
        std::string kind, mag, target;
        std::getline(ps, kind, ':');
        std::getline(ps, mag, ':');
        std::getline(ps, target, ':');
        static const std::map<std::string, PerturbationKind> kinds = {
            {"amplitude", PerturbationKind::AmplitudeScale},
            {"tempo", PerturbationKind::TempoScale},
            {"tremor", PerturbationKind::Tremor},
            {"hold-shorten", PerturbationKind::HoldShorten},
            {"wrong-joint", PerturbationKind::WrongJointActivation},
            {"elbow-bend", PerturbationKind::ElbowBend}};
        auto it = kinds.find(kind);
        if (it == kinds.end() || mag.empty())
            throw std::runtime_error("perturb must be kind:magnitude[:joint]");
        pert.kind = it->second;
        pert.magnitude = std::stod(mag);
        pert.target_joint = target;
        do_perturb = true;
    }

    for (int i = 0; i < count; ++i) {
        MovementSpec s = spec;
        s.seed = spec.seed + static_cast<unsigned>(i);
        s.limb_scale = spec.limb_scale * (1.0 + 0.02 * (static_cast<int>(i % 11) - 5));
        SkeletonVideo v = generate(s);
        if (do_perturb) v = perturb(v, pert);
        write_file(out_dir + "/synth_" + std::to_string(i) + ".skv", serialize_video(v));
    }
    std::cerr << "wrote " << count << " videos to " << out_dir << "\n";
    return 0;
}

int cmd_inspect(const std::string& model_path) {
    TrainedModel m = load_model(model_path);
    int by_class[3] = {0, 0, 0};
    for (const auto& s : m.series) {
        int present = 0;
        for (const auto& t : s.per_frame) present += t.present;
        by_class[s.cls == ParamClass::Active ? 0 : 1] += present;
    }
    by_class[2] = static_cast<int>(m.time.size());
    std::cout << "joints " << m.topology.joint_count() << "\n";
    std::cout << "active";
    for (int j : m.active.active) std::cout << " " << m.topology.joint_names[j];
    std::cout << "\nrests " << m.rest_count() << "\n";
    std::cout << "reference_length " << m.reference_length << "\n";
    std::cout << "parameters A " << by_class[0] << "\n";
    std::cout << "parameters N " << by_class[1] << "\n";
    std::cout << "parameters T " << by_class[2] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"A-MAL movement assessment"};
    app.require_subcommand(1);

    CommonFlags train_flags, assess_flags, align_flags;

    auto* train_cmd = app.add_subcommand("train", "learn a model from proper performances");
    std::vector<std::string> train_inputs, train_persons;
    std::string train_out = "model.amal";
    train_cmd->add_option("inputs", train_inputs, "SKV files (>= 3)")->required();
    train_cmd->add_option("--out", train_out, "output model file");
    train_cmd->add_option("--person", train_persons, "person id per input video");
    train_flags.attach(train_cmd);

    auto* assess_cmd = app.add_subcommand("assess", "score a performance against a model");
    std::string assess_model, assess_video, assess_reference;
    bool score_only = false, feedback_only = false;
    assess_cmd->add_option("--model", assess_model, "model file")->required();
    assess_cmd->add_option("video", assess_video, "SKV file to assess")->required();
    assess_cmd->add_option("--reference", assess_reference, "reference SKV for --warp dtw");
    assess_cmd->add_flag("--score-only", score_only);
    assess_cmd->add_flag("--feedback-only", feedback_only);
    assess_flags.attach(assess_cmd);

    auto* align_cmd = app.add_subcommand("align", "warp a video onto a reference timeline");
    std::string align_video, align_model, align_reference, align_out;
    align_cmd->add_option("video", align_video)->required();
    align_cmd->add_option("--model", align_model);
    align_cmd->add_option("--reference", align_reference);
    align_cmd->add_option("--out", align_out, "warped SKV output path");
    align_flags.attach(align_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic fixtures");
    std::string synth_spec, synth_out = ".", synth_perturb;
    int synth_count = 1;
    unsigned synth_seed = 1;
    synth_cmd->add_option("--spec", synth_spec, "movement spec config file");
    synth_cmd->add_option("--out-dir", synth_out);
    synth_cmd->add_option("--count", synth_count);
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--perturb", synth_perturb, "kind:magnitude[:joint]");

    auto* inspect_cmd = app.add_subcommand("inspect", "summarize a model file");
    std::string inspect_model;
    inspect_cmd->add_option("model", inspect_model)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_inputs, train_out, train_persons, train_flags);
        if (assess_cmd->parsed())
            return cmd_assess(assess_model, assess_video, assess_reference, score_only,
                              feedback_only, assess_flags);
        if (align_cmd->parsed())
            return cmd_align(align_video, align_model, align_reference, align_out, align_flags);
        if (synth_cmd->parsed())
            return cmd_synth(synth_spec, synth_out, synth_count, synth_seed, synth_perturb);
        if (inspect_cmd->parsed()) return cmd_inspect(inspect_model);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const amal::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
