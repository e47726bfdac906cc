#include "ergoload/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ergoload {

using nlohmann::json;

namespace {

// One JSON object of the config. Keys that were never asked for are errors.
class Section {
public:
    Section(const json* obj, std::string name) : obj_(obj), name_(std::move(name))
    {
        if (obj_ && !obj_->is_object())
            throw ConfigError(name_ + ": expected an object");
    }

    Section child(const char* key)
    {
        used_.insert(key);
        return Section(has(key) ? &obj_->at(key) : nullptr, path(key));
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        used_.insert(key);
        if (!has(key))
            return;
        try {
            obj_->at(key).get_to(out);
        } catch (const json::exception&) {
            throw ConfigError(path(key) + ": wrong type");
        }
    }

    template <int N>
    void get(const char* key, Eigen::Matrix<double, N, 1>& out)
    {
        used_.insert(key);
        if (!has(key))
            return;
        const json& v = obj_->at(key);
        const std::string msg = path(key) + ": expected an array of " + std::to_string(N) + " numbers";
        if (!v.is_array() || v.size() != static_cast<std::size_t>(N))
            throw ConfigError(msg);
        for (int i = 0; i < N; ++i) {
            if (!v[i].is_number())
                throw ConfigError(msg);
            out(i) = v[i].get<double>();
        }
    }

    void get(const char* key, TauMax& out)
    {
        used_.insert(key);
        if (!has(key))
            return;
        const json& v = obj_->at(key);
        const std::string msg = path(key) + ": expected an array of 6 numbers or nulls";
        if (!v.is_array() || v.size() != 6)
            throw ConfigError(msg);
        for (std::size_t i = 0; i < 6; ++i) {
            if (v[i].is_null())
                out.limits[i].reset();
            else if (v[i].is_number())
                out.limits[i] = v[i].get<double>();
            else
                throw ConfigError(msg);
        }
    }

    void require(const char* key) const
    {
        if (!has(key))
            throw ConfigError(path(key) + ": required field missing");
    }

    bool has(const char* key) const { return obj_ && obj_->contains(key); }
    const json& at(const char* key) const { return obj_->at(key); }

    void reject_unknown() const
    {
        if (!obj_)
            return;
        for (const auto& item : obj_->items())
            if (!used_.count(item.key()))
                throw ConfigError(path(item.key()) + ": unknown key");
    }

    std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

private:
    const json* obj_;
    std::string name_;
    std::set<std::string> used_;
};

template <typename V>
json vec(const V& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

char parse_experiment(const json& v)
{
    if (!v.is_string() || v.get<std::string>().size() != 1 || v.get<std::string>()[0] < 'A' ||
        v.get<std::string>()[0] > 'E')
        throw ConfigError("scenario.experiment_id: expected one of \"A\"..\"E\"");
    return v.get<std::string>()[0];
}

void read_geometry(Section s, ArmGeometry& g)
{
    s.get("l12", g.l12);
    s.get("l23", g.l23);
    s.get("l34", g.l34);
    s.get("theta_lower", g.theta_lower);
    s.get("theta_upper", g.theta_upper);
    s.reject_unknown();
}

void read_exo(Section s, ScenarioConfig& cfg)
{
    ExoConfig& e = cfg.exo;
    s.get("a", e.a);
    s.get("b", e.b);
    s.get("c", e.c);
    s.get("d", e.d);
    s.get("forearm_weight", e.forearm_weight);
    s.get("compensable_load", e.compensable_load);
    s.get("lever_length", e.lever_length);
    s.get("gamma", e.gamma);
    {
        Section pid = s.child("pid");
        pid.get("kp", cfg.pid.kp);
        pid.get("ki", cfg.pid.ki);
        pid.get("kd", cfg.pid.kd);
        pid.reject_unknown();
    }
    {
        Section sea = s.child("sea");
        sea.get("stiffness", cfg.sea.stiffness);
        sea.get("time_constant", cfg.sea.time_constant);
        sea.get("integral_limit", cfg.sea.integral_limit);
        sea.get("output_scale", cfg.sea.output_scale);
        sea.reject_unknown();
    }
    s.reject_unknown();
}

void read_cobot(Section s, ScenarioConfig& cfg)
{
    s.get("k_trans", cfg.impedance.k_trans);
    s.get("k_rot", cfg.impedance.k_rot);
    s.get("damping_ratio", cfg.impedance.damping_ratio);
    s.get("virtual_mass", cfg.impedance.virtual_mass);
    s.get("virtual_inertia", cfg.impedance.virtual_inertia);
    s.get("offset_e", cfg.trajectory.offset_e);
    s.get("reach_time", cfg.trajectory.reach_time);
    {
        Section ee = s.child("calibration_ee_pose");
        Vector3d pos = cfg.calibration_ee_pose.position;
        Vector3d rpy = cfg.calibration_ee_pose.rpy();
        ee.get("position", pos);
        ee.get("rpy", rpy);
        ee.reject_unknown();
        if (ee.has("position") || ee.has("rpy"))
            cfg.calibration_ee_pose = Pose::from_rpy(pos, rpy);
    }
    s.get("calibration_pose", cfg.calibration_pose);
    s.reject_unknown();
}

void read_optimizer(Section s, ScenarioConfig& cfg)
{
    Vector6d w = cfg.weights.w;
    s.get("weights", w);
    cfg.weights = WeightMatrix(w);
    s.get("p_lower", cfg.p_lower);
    s.get("p_upper", cfg.p_upper);
    s.get("tau_max", cfg.tau_max);
    s.get("rate_hz", cfg.optimizer_rate_hz);
    s.get("penalty_init", cfg.solver.penalty_init);
    s.get("penalty_growth", cfg.solver.penalty_growth);
    s.get("max_outer", cfg.solver.max_outer);
    s.get("max_inner", cfg.solver.max_inner);
    s.get("inner_grad_tol", cfg.solver.inner_grad_tol);
    s.get("feasibility_tol", cfg.solver.feasibility_tol);
    s.get("box_restart", cfg.solver.box_restart);
    {
        Section ck = s.child("clik");
        ck.get("gain", cfg.clik.gain);
        ck.get("damping", cfg.clik.damping);
        ck.get("step_dt", cfg.clik.step_dt);
        ck.get("max_iters", cfg.clik.max_iters);
        ck.get("tol", cfg.clik.tol);
        ck.reject_unknown();
    }
    s.reject_unknown();
}

void read_scenario(Section s, ScenarioConfig& cfg)
{
    std::string id;
    s.get("experiment_id", id);
    s.get("payload_kg", cfg.payload_kg);
    s.get("theta_init", cfg.theta_init);
    s.get("exo_active", cfg.exo.active);
    s.get("duration_s", cfg.duration_s);
    s.get("tick_dt", cfg.tick_dt);
    s.get("rng_seed", cfg.rng_seed);
    s.get("activation_s", cfg.activation_s);
    s.get("metrics_window_s", cfg.metrics_window_s);
    s.get("dagger_threshold", cfg.dagger_threshold);
    {
        Section tol = s.child("theta_tolerance");
        tol.get("center", cfg.theta_tolerance.center);
        tol.get("half_width", cfg.theta_tolerance.half_width);
        tol.reject_unknown();
    }
    s.reject_unknown();
}

void read_follower(Section s, HumanFollowerParams& f)
{
    s.get("max_joint_speed", f.max_joint_speed);
    s.get("noise_std", f.noise_std);
    s.get("settle_band", f.settle_band);
    s.reject_unknown();
}

} // namespace

ScenarioConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config: malformed JSON: ") + ex.what());
    }
    if (!doc.is_object())
        throw ConfigError("config: expected a JSON object");
    Section root(&doc, "");
    Section sc = root.child("scenario");
    sc.require("experiment_id");
    sc.require("payload_kg");

    ScenarioConfig cfg = preset(parse_experiment(sc.at("experiment_id")));
    read_geometry(root.child("geometry"), cfg.geometry);
    read_exo(root.child("exo"), cfg);
    read_cobot(root.child("cobot"), cfg);
    read_optimizer(root.child("optimizer"), cfg);
    read_scenario(std::move(sc), cfg);
    read_follower(root.child("follower"), cfg.follower);
    root.reject_unknown();

    try {
        cfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const ScenarioConfig& cfg)
{
    json tau_max = json::array();
    for (const auto& lim : cfg.tau_max.limits)
        tau_max.push_back(lim ? json(*lim) : json(nullptr));

    return {
        {"geometry",
         {{"l12", vec(cfg.geometry.l12)},
          {"l23", vec(cfg.geometry.l23)},
          {"l34", cfg.geometry.l34},
          {"theta_lower", vec(cfg.geometry.theta_lower)},
          {"theta_upper", vec(cfg.geometry.theta_upper)}}},
        {"exo",
         {{"a", cfg.exo.a},
          {"b", cfg.exo.b},
          {"c", cfg.exo.c},
          {"d", cfg.exo.d},
          {"forearm_weight", cfg.exo.forearm_weight},
          {"compensable_load", cfg.exo.compensable_load},
          {"lever_length", cfg.exo.lever_length},
          {"gamma", cfg.exo.gamma},
          {"pid", {{"kp", cfg.pid.kp}, {"ki", cfg.pid.ki}, {"kd", cfg.pid.kd}}},
          {"sea",
           {{"stiffness", cfg.sea.stiffness},
            {"time_constant", cfg.sea.time_constant},
            {"integral_limit", cfg.sea.integral_limit},
            {"output_scale", cfg.sea.output_scale}}}}},
        {"cobot",
         {{"k_trans", vec(cfg.impedance.k_trans)},
          {"k_rot", vec(cfg.impedance.k_rot)},
          {"damping_ratio", cfg.impedance.damping_ratio},
          {"virtual_mass", cfg.impedance.virtual_mass},
          {"virtual_inertia", cfg.impedance.virtual_inertia},
          {"offset_e", cfg.trajectory.offset_e},
          {"reach_time", cfg.trajectory.reach_time},
          {"calibration_pose", vec(cfg.calibration_pose)},
          {"calibration_ee_pose",
           {{"position", vec(cfg.calibration_ee_pose.position)}, {"rpy", vec(cfg.calibration_ee_pose.rpy())}}}}},
        {"optimizer",
         {{"weights", vec(cfg.weights.w)},
          {"p_lower", vec(cfg.p_lower)},
          {"p_upper", vec(cfg.p_upper)},
          {"tau_max", tau_max},
          {"rate_hz", cfg.optimizer_rate_hz},
          {"penalty_init", cfg.solver.penalty_init},
          {"penalty_growth", cfg.solver.penalty_growth},
          {"max_outer", cfg.solver.max_outer},
          {"max_inner", cfg.solver.max_inner},
          {"inner_grad_tol", cfg.solver.inner_grad_tol},
          {"feasibility_tol", cfg.solver.feasibility_tol},
          {"box_restart", cfg.solver.box_restart},
          {"clik",
           {{"gain", cfg.clik.gain},
            {"damping", cfg.clik.damping},
            {"step_dt", cfg.clik.step_dt},
            {"max_iters", cfg.clik.max_iters},
            {"tol", cfg.clik.tol}}}}},
        {"scenario",
         {{"experiment_id", std::string(1, cfg.experiment_id)},
          {"payload_kg", cfg.payload_kg},
          {"theta_init", vec(cfg.theta_init)},
          {"exo_active", cfg.exo.active},
          {"duration_s", cfg.duration_s},
          {"tick_dt", cfg.tick_dt},
          {"rng_seed", cfg.rng_seed},
          {"activation_s", cfg.activation_s},
          {"metrics_window_s", cfg.metrics_window_s},
          {"dagger_threshold", cfg.dagger_threshold},
          {"theta_tolerance", {{"center", cfg.theta_tolerance.center}, {"half_width", cfg.theta_tolerance.half_width}}}}},
        {"follower",
         {{"max_joint_speed", cfg.follower.max_joint_speed},
          {"noise_std", cfg.follower.noise_std},
          {"settle_band", cfg.follower.settle_band}}},
    };
}

const std::vector<std::string> kCsvColumns = {
    "t",      "theta1", "theta2", "theta3", "theta4",   "theta5", "theta6", "avatar1", "avatar2", "avatar3",
    "avatar4", "avatar5", "avatar6", "tau1", "tau2",     "tau3",   "tau4",   "tau5",    "tau6",    "tau5_net",
    "F_R",    "F_M",    "ee_x",   "ee_y",   "ee_z",     "ref_x",  "ref_y",  "ref_z",   "hand_x",  "hand_y",
    "hand_z"};

namespace {

void put(std::string& line, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    if (!line.empty())
        line += ',';
    line += buf;
}

template <typename V>
void put_all(std::string& line, const V& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        put(line, v(i));
}

} // namespace

void write_timeseries_csv(std::ostream& os, const TimeSeriesLog& log)
{
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
        os << (i ? "," : "") << kCsvColumns[i];
    os << '\n';
    std::string line;
    for (const auto& r : log.records) {
        line.clear();
        put(line, r.t);
        put_all(line, r.theta);
        put_all(line, r.avatar);
        put_all(line, r.tau);
        put(line, r.tau5_net);
        put(line, r.force_ref);
        put(line, r.force_measured);
        put_all(line, r.ee);
        put_all(line, r.ref);
        put_all(line, r.hand);
        os << line << '\n';
    }
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeriesLog& log)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_timeseries_csv(out, log);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

TimeSeriesLog read_timeseries_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("timeseries: empty file");
    {
        std::vector<std::string> header;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            header.push_back(cell);
        if (header != kCsvColumns)
            throw std::runtime_error("timeseries: unexpected header");
    }

    TimeSeriesLog log;
    std::vector<double> v(kCsvColumns.size());
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const char* p = line.c_str();
        for (std::size_t i = 0; i < v.size(); ++i) {
            char* end = nullptr;
            v[i] = std::strtod(p, &end);
            const bool last = i + 1 == v.size();
            if (end == p || (last ? (*end != '\0' && *end != '\r') : *end != ','))
                throw std::runtime_error("timeseries: malformed row at line " + std::to_string(lineno));
            p = end + 1;
        }
        LogRecord r;
        std::size_t c = 0;
        r.t = v[c++];
        for (int i = 0; i < 6; ++i) r.theta(i) = v[c++];
        for (int i = 0; i < 6; ++i) r.avatar(i) = v[c++];
        for (int i = 0; i < 6; ++i) r.tau(i) = v[c++];
        r.tau5_net = v[c++];
        r.force_ref = v[c++];
        r.force_measured = v[c++];
        for (int i = 0; i < 3; ++i) r.ee(i) = v[c++];
        for (int i = 0; i < 3; ++i) r.ref(i) = v[c++];
        for (int i = 0; i < 3; ++i) r.hand(i) = v[c++];
        log.records.push_back(r);
    }
    return log;
}

TimeSeriesLog read_timeseries_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_timeseries_csv(in);
}

json report_to_json(const MetricsReport& rep)
{
    json effort = json::object();
    for (std::size_t i = 0; i < kEffortChannels.size(); ++i)
        effort[kEffortChannels[i]] = rep.effort_rms[i];
    return {
        {"theta_errors", {{"theta1", rep.theta_errors_deg[0]}, {"theta2", rep.theta_errors_deg[1]},
                          {"theta5", rep.theta_errors_deg[2]}}},
        {"f_e", rep.f_e},
        {"p_e", rep.p_e},
        {"tau_change_pct", {{"tau1", rep.tau_change_pct[0]}, {"tau2", rep.tau_change_pct[1]},
                            {"tau5", rep.tau_change_pct[2]}}},
        {"tau_change_dagger", {{"tau1", rep.tau_change_dagger[0]}, {"tau2", rep.tau_change_dagger[1]},
                               {"tau5", rep.tau_change_dagger[2]}}},
        {"effort_rms", effort},
    };
}

json optimizer_to_json(const OptimizerSummary& opt)
{
    return {
        {"triggered", opt.triggered},
        {"trigger_time", opt.trigger_time},
        {"solves", opt.solves},
        {"converged", opt.converged},
        {"frozen", opt.frozen},
        {"freeze_time", opt.freeze_time},
        {"constraint_violation", opt.constraint_violation},
        {"objective_value", opt.objective_value},
        {"error", opt.error.empty() ? json(nullptr) : json(opt.error)},
    };
}

void write_run(const std::filesystem::path& dir, const ScenarioConfig& cfg, const ScenarioResult& res)
{
    std::filesystem::create_directories(dir);
    write_timeseries_csv(dir / "timeseries.csv", res.log);

    auto dump = [&](const std::string& name, const json& j) {
        std::ofstream out(dir / name);
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
        out << j.dump(2) << '\n';
    };
    dump("report.json", report_to_json(res.report));
    dump("run.json", {{"optimizer", optimizer_to_json(res.optimizer)}, {"config", config_to_json(cfg)}});
}

std::string format_sweep_table(const std::vector<SweepRow>& rows)
{
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-4s %8s %8s %8s %7s %7s %9s %9s %9s\n", "exp", "exo", "th1E", "th2E", "th5E",
                  "F_E", "P_E", "tau1%", "tau2%", "tau5%");
    out += buf;
    for (const auto& r : rows) {
        std::string tau[3];
        for (int j = 0; j < 3; ++j) {
            std::snprintf(buf, sizeof buf, "%.1f%s", r.report.tau_change_pct[j], r.report.tau_change_dagger[j] ? "+" : "");
            tau[j] = buf;
        }
        std::snprintf(buf, sizeof buf, "%-4c %-4s %8.2f %8.2f %8.2f %7.2f %7.2f %9s %9s %9s\n", r.experiment_id,
                      r.exo_active ? "W/" : "W/O", r.report.theta_errors_deg[0], r.report.theta_errors_deg[1],
                      r.report.theta_errors_deg[2], r.report.f_e, r.report.p_e, tau[0].c_str(), tau[1].c_str(),
                      tau[2].c_str());
        out += buf;
    }
    out += "angles in deg, F_E in N, P_E in mm; '+' marks a final-state denominator\n";
    return out;
}

} // namespace ergoload
