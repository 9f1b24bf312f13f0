#include "dispersive/runner.hpp"

#include "dispersive/errors.hpp"
#include "presets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace dispersive {

using nlohmann::json;

std::string_view experiment_name(Experiment e)
{
    switch (e) {
    case Experiment::validate_soliton:
        return "validate-soliton";
    case Experiment::spectrum:
        return "spectrum";
    case Experiment::periodicity:
        return "periodicity";
    }
    return "";
}

namespace {

// Strict object reader: every key must be consumed exactly once.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where))
    {
        if (!obj_.is_object())
            throw ConfigError(where_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& required(const std::string& key)
    {
        if (!obj_.contains(key))
            throw ConfigError(where_ + ": missing required key '" + key + "'");
        seen_.insert(key);
        return obj_.at(key);
    }

    const json* optional(const std::string& key)
    {
        if (!obj_.contains(key))
            return nullptr;
        seen_.insert(key);
        return &obj_.at(key);
    }

    double number(const std::string& key)
    {
        return as_number(required(key), key);
    }

    double number_or(const std::string& key, double fallback)
    {
        const json* v = optional(key);
        return v ? as_number(*v, key) : fallback;
    }

    std::size_t count(const std::string& key) { return as_count(required(key), key); }

    std::size_t count_or(const std::string& key, std::size_t fallback)
    {
        const json* v = optional(key);
        return v ? as_count(*v, key) : fallback;
    }

    std::string string(const std::string& key)
    {
        const json& v = required(key);
        if (!v.is_string())
            throw ConfigError(where_ + ": '" + key + "' must be a string");
        return v.get<std::string>();
    }

    bool boolean_or(const std::string& key, bool fallback)
    {
        const json* v = optional(key);
        if (!v)
            return fallback;
        if (!v->is_boolean())
            throw ConfigError(where_ + ": '" + key + "' must be true or false");
        return v->get<bool>();
    }

    std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback)
    {
        const json* v = optional(key);
        if (!v)
            return fallback;
        if (!v->is_array())
            throw ConfigError(where_ + ": '" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *v)
            out.push_back(as_number(e, key));
        return out;
    }

    void finish() const
    {
        for (const auto& [key, value] : obj_.items())
            if (!seen_.count(key))
                throw ConfigError(where_ + ": unknown key '" + key + "'");
    }

    const std::string& where() const { return where_; }

private:
    double as_number(const json& v, const std::string& key) const
    {
        if (!v.is_number())
            throw ConfigError(where_ + ": '" + key + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            throw ConfigError(where_ + ": '" + key + "' must be finite");
        return d;
    }

    std::size_t as_count(const json& v, const std::string& key) const
    {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(where_ + ": '" + key + "' must be a nonnegative integer");
        return v.get<std::size_t>();
    }

    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

Experiment parse_experiment(const std::string& s)
{
    if (s == "validate-soliton")
        return Experiment::validate_soliton;
    if (s == "spectrum")
        return Experiment::spectrum;
    if (s == "periodicity")
        return Experiment::periodicity;
    throw ConfigError("unknown experiment '" + s + "'");
}

ModelSpec parse_model(const json& j)
{
    ObjectReader r(j, "model");
    ModelSpec m;
    m.family = parse_family(r.string("family"));
    m.alpha = r.number_or("alpha", 0.0);
    m.beta = r.number_or("beta", 0.0);
    m.mu = r.number_or("mu", 0.0);
    m.delta = r.number_or("delta", 0.0);
    m.gamma_damp = r.number_or("gamma_damp", 0.0);
    m.bbm_neumann = r.boolean_or("bbm_neumann", false);
    m.allow_zero_mu = r.boolean_or("allow_zero_mu", false);
    r.finish();
    m.validate();
    return m;
}

ForcingSpec parse_forcing(const json& j)
{
    ObjectReader r(j, "forcing");
    const std::string kind = r.string("kind");
    ForcingSpec f = ForcingSpec::sin_tanh();
    if (kind == "sin-tanh") {
        const double period = r.number_or("period", 0.1);
        if (period != 0.1)
            throw ConfigError("forcing: sin-tanh has period 0.1");
    } else if (kind == "zero") {
        f = ForcingSpec::zero(r.number_or("period", 0.1));
    } else if (kind == "custom-table") {
        const double period = r.number("period");
        const json& samples = r.required("samples");
        if (!samples.is_array())
            throw ConfigError("forcing: samples must be an array of [t, g] pairs");
        std::vector<std::pair<double, double>> tab;
        for (const auto& s : samples) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
                throw ConfigError("forcing: each sample must be [t, g]");
            tab.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        f = ForcingSpec::custom_table(std::move(tab), period);
    } else {
        throw ConfigError("forcing: unknown kind '" + kind + "'");
    }
    r.finish();
    return f;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    os << text;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    fn(os);
}

void prepare_out(const RunOptions& opts)
{
    if (opts.out_dir.empty())
        return;
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + opts.out_dir.string() + ": " +
                          ec.message());
}

void write_snapshots_csv(std::ostream& os, const SimulationRecord& rec, std::size_t n)
{
    os << std::setprecision(17) << 't';
    for (std::size_t i = 0; i < n; ++i)
        os << ",u" << i;
    os << '\n';
    for (const auto& s : rec.snapshots) {
        os << s.t;
        for (double v : s.state)
            os << ',' << v;
        os << '\n';
    }
}

void write_common(const RunConfig& cfg, const RunOptions& opts, const Discretization& disc,
                  const SimulationRecord* rec)
{
    if (opts.out_dir.empty())
        return;
    const auto probes = rec ? rec->probes : locate_probes(disc.nodes, cfg.probes);
    write_text(opts.out_dir / "meta.json", make_meta(cfg, disc, probes).dump(2) + "\n");
    if (opts.dump_operators) {
        const std::pair<const std::optional<DiffOperator>*, const char*> ops[] = {
            {&disc.ops.d1, "D1.txt"}, {&disc.ops.d2, "D2.txt"}, {&disc.ops.d3, "D3.txt"}};
        for (const auto& [op, file] : ops)
            if (*op)
                write_file(opts.out_dir / file,
                           [&](std::ostream& os) { write_coordinate_text(os, **op); });
    }
    if (rec) {
        if (!rec->probes.empty())
            write_file(opts.out_dir / "probes.csv",
                       [&](std::ostream& os) { write_probes_csv(os, *rec); });
        if (!rec->snapshots.empty())
            write_file(opts.out_dir / "snapshots.csv", [&](std::ostream& os) {
                write_snapshots_csv(os, *rec, disc.nodes.size());
            });
    }
}

IntegratorConfig integrator_config(const RunConfig& cfg)
{
    IntegratorConfig ic;
    ic.dt = cfg.dt;
    ic.t_max = cfg.t_max;
    ic.snapshot_stride = cfg.snapshot_stride;
    ic.probe_points = cfg.probes;
    return ic;
}

} // namespace

RunConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    try {
        ObjectReader r(doc, "config");
        RunConfig cfg;
        cfg.source_text = std::string(text);
        cfg.name = r.has("name") ? r.string("name") : std::string("run");
        cfg.experiment = parse_experiment(r.string("experiment"));

        const json& interval = r.required("interval");
        if (!interval.is_array() || interval.size() != 2 || !interval[0].is_number() ||
            !interval[1].is_number())
            throw ConfigError("config: 'interval' must be [a, b]");
        cfg.a = interval[0].get<double>();
        cfg.b = interval[1].get<double>();
        if (!(cfg.a < cfg.b))
            throw ConfigError("config: interval must satisfy a < b");

        cfg.nodes = r.count("nodes");
        cfg.stencil = r.count("stencil");
        if (cfg.nodes < min_nodes)
            throw ConfigError("config: nodes must be at least 4");
        if (cfg.stencil < min_stencil || cfg.stencil > cfg.nodes)
            throw ConfigError("config: stencil must satisfy 4 <= stencil <= nodes");

        cfg.shape = r.number("shape");
        if (!(cfg.shape > 0.0))
            throw ConfigError("config: shape must be positive");
        if (const json* m = r.optional("shape_mode")) {
            if (*m == "absolute")
                cfg.shape_mode = ShapeMode::absolute;
            else if (*m == "proportional")
                cfg.shape_mode = ShapeMode::proportional;
            else
                throw ConfigError("config: shape_mode must be 'absolute' or 'proportional'");
        }

        cfg.model = parse_model(r.required("model"));
        if (const json* f = r.optional("forcing"))
            cfg.forcing = parse_forcing(*f);
        cfg.period = cfg.forcing.period();

        if (const json* s = r.optional("soliton")) {
            ObjectReader sr(*s, "soliton");
            SolitonSpec spec;
            spec.speed_c = sr.number("c");
            spec.beta = cfg.model.beta;
            spec.gamma_disp = cfg.model.mu;
            sr.finish();
            spec.validate();
            cfg.soliton = spec;
        }
        const bool classic = cfg.model.family == Family::kdv_classic;
        if (classic && !cfg.soliton)
            throw ConfigError("config: kdv-classic runs need a 'soliton' block");
        if (!classic && cfg.soliton)
            throw ConfigError("config: 'soliton' applies only to the kdv-classic family");
        if (cfg.experiment == Experiment::validate_soliton && !classic)
            throw ConfigError("config: validate-soliton requires the kdv-classic family");

        cfg.dt = r.number("dt");
        cfg.t_max = r.number("t_max");
        if (!(cfg.dt > 0.0))
            throw ConfigError("config: dt must be positive");
        if (cfg.t_max < 0.0)
            throw ConfigError("config: t_max must be nonnegative");

        cfg.probes = r.numbers_or("probes", {});
        for (double p : cfg.probes)
            if (p < cfg.a || p > cfg.b)
                throw ConfigError("config: probe point outside the interval");
        cfg.snapshot_stride = r.count_or("snapshot_stride", 100);
        cfg.report_times = r.numbers_or("report_times", {});

        if (const json* p = r.optional("periodicity")) {
            ObjectReader pr(*p, "periodicity");
            cfg.period = pr.number_or("period", cfg.period);
            cfg.periodicity_tol = pr.number_or("tolerance", cfg.periodicity_tol);
            pr.finish();
            if (!(cfg.period > 0.0) || cfg.periodicity_tol < 0.0)
                throw ConfigError("periodicity: period must be positive, tolerance nonnegative");
        }

        cfg.linearization = classic ? Linearization::initial : Linearization::zero;
        if (const json* l = r.optional("linearization")) {
            if (*l == "initial")
                cfg.linearization = Linearization::initial;
            else if (*l == "zero")
                cfg.linearization = Linearization::zero;
            else
                throw ConfigError("config: linearization must be 'initial' or 'zero'");
        }
        r.finish();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& p : detail::bundled_presets())
        out.emplace_back(p.name);
    return out;
}

std::optional<std::string_view> preset_text(std::string_view name)
{
    for (const auto& p : detail::bundled_presets())
        if (p.name == name)
            return p.text;
    return std::nullopt;
}

RunConfig load_config(const std::string& target)
{
    if (auto text = preset_text(target))
        return parse_config(*text);

    std::ifstream is(target, std::ios::binary);
    if (!is)
        throw ConfigError("'" + target + "' is neither a preset nor a readable config file");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

Discretization discretize(const RunConfig& cfg)
{
    NodeSet nodes = build_nodes(cfg.a, cfg.b, cfg.nodes, NodeLayout::uniform);
    StencilMap stencils = build_stencils(nodes, cfg.stencil);
    const KernelConfig kernel = resolve_shape(cfg.shape, cfg.shape_mode, nodes);
    OperatorSet ops = build_operator_set(nodes, stencils, kernel, cfg.model.family);
    return {std::move(nodes), std::move(stencils), kernel, std::move(ops)};
}

BoundaryData boundary_for(const RunConfig& cfg, const NodeSet& nodes)
{
    if (cfg.model.family == Family::kdv_classic)
        return soliton_boundary(*cfg.soliton, nodes.a(), nodes.b());
    return forced_boundary(cfg.forcing);
}

Eigen::VectorXd initial_state(const RunConfig& cfg, const NodeSet& nodes)
{
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
    if (cfg.model.family == Family::kdv_classic)
        for (std::size_t i = 0; i < nodes.size(); ++i)
            u[static_cast<Eigen::Index>(i)] = soliton_exact(nodes[i], 0.0, *cfg.soliton);
    return u;
}

nlohmann::json make_meta(const RunConfig& cfg, const Discretization& disc,
                         const std::vector<ProbeInfo>& probes)
{
    json probe_list = json::array();
    for (const auto& p : probes)
        probe_list.push_back({{"requested_x", p.requested}, {"node", p.node}, {"node_x", p.node_x}});

    json meta;
    meta["program"] = "dispersive-rbffd";
    meta["name"] = cfg.name;
    meta["experiment"] = experiment_name(cfg.experiment);
    meta["config_source"] = cfg.source_text;
    meta["resolved"] = {
        {"spacing_h", disc.nodes.spacing()},
        {"shape_C", disc.kernel.shape()},
        {"steps", cfg.dt > 0.0 ? std::llround(cfg.t_max / cfg.dt) : 0},
        {"family", family_name(cfg.model.family)},
        {"neumann_row", cfg.model.neumann_active()},
        {"probes", std::move(probe_list)},
    };
    return meta;
}

void write_probes_csv(std::ostream& os, const SimulationRecord& record)
{
    const auto old_precision = os.precision(17);
    os << 't';
    for (const auto& p : record.probes)
        os << ",x=" << p.node_x;
    os << '\n';
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        os << record.times[k];
        for (const auto& s : record.probe_series)
            os << ',' << s[k];
        os << '\n';
    }
    os.precision(old_precision);
}

ValidationResult run_validate_soliton(const RunConfig& cfg, const RunOptions& opts)
{
    if (cfg.experiment != Experiment::validate_soliton || !cfg.soliton)
        throw ConfigError("run_validate_soliton needs a validate-soliton config");

    prepare_out(opts);
    const auto start = std::chrono::steady_clock::now();
    Discretization disc = discretize(cfg);
    ValidationResult result;

    const auto write_errors = [&] {
        if (opts.out_dir.empty())
            return;
        write_file(opts.out_dir / "errors.csv", [&](std::ostream& os) {
            os << std::setprecision(17) << "t,linf,l2,wall_seconds\n";
            for (const auto& e : result.errors)
                os << e.t << ',' << e.linf << ',' << e.l2 << ',' << e.wall_seconds << '\n';
        });
    };

    if (cfg.t_max == 0.0) {
        write_common(cfg, opts, disc, nullptr);
        write_errors();
        return result;
    }

    std::vector<std::pair<std::size_t, double>> targets;
    for (double t : cfg.report_times) {
        if (t <= 0.0 || t > cfg.t_max + 0.5 * cfg.dt)
            continue;
        targets.emplace_back(static_cast<std::size_t>(std::llround(t / cfg.dt)), t);
    }

    const RhsEvaluator rhs = build_rhs(cfg.model, disc.ops, boundary_for(cfg, disc.nodes));
    const auto& nodes = disc.nodes;
    std::vector<double> exact(nodes.size());
    const auto observer = [&](std::size_t step, double t, const Eigen::VectorXd& u) {
        for (const auto& [target_step, target_t] : targets) {
            if (target_step != step)
                continue;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                exact[i] = soliton_exact(nodes[i], t, *cfg.soliton);
            const std::span<const double> approx(u.data(), static_cast<std::size_t>(u.size()));
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.errors.push_back({target_t, linf_error(exact, approx),
                                     l2_error(exact, approx, nodes.spacing()), wall});
        }
    };
    result.record = simulate(rhs, nodes, integrator_config(cfg), initial_state(cfg, nodes), observer);

    write_common(cfg, opts, disc, &result.record);
    write_errors();
    return result;
}

SpectrumReport run_spectrum(const RunConfig& cfg, const RunOptions& opts)
{
    prepare_out(opts);
    Discretization disc = discretize(cfg);
    const RhsEvaluator rhs = build_rhs(cfg.model, disc.ops, boundary_for(cfg, disc.nodes));
    const Eigen::VectorXd state =
        cfg.linearization == Linearization::initial
            ? initial_state(cfg, disc.nodes)
            : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc.nodes.size()));
    SpectrumReport rep = spectrum_check(rhs, cfg.dt, state);

    if (!opts.out_dir.empty()) {
        write_common(cfg, opts, disc, nullptr);
        write_file(opts.out_dir / "spectrum.csv",
                   [&](std::ostream& os) { write_spectrum_csv(os, rep); });
        write_text(opts.out_dir / "spectrum.json", to_json(rep).dump(2) + "\n");
    }
    return rep;
}

PeriodicityResult run_periodicity(const RunConfig& cfg, const RunOptions& opts)
{
    prepare_out(opts);
    Discretization disc = discretize(cfg);
    const RhsEvaluator rhs = build_rhs(cfg.model, disc.ops, boundary_for(cfg, disc.nodes));

    PeriodicityResult res;
    res.record = simulate(rhs, disc.nodes, integrator_config(cfg), initial_state(cfg, disc.nodes));
    res.report = periodicity_report(res.record, cfg.period, cfg.periodicity_tol);

    if (!opts.out_dir.empty()) {
        write_common(cfg, opts, disc, &res.record);
        write_text(opts.out_dir / "periodicity.json", to_json(res.report).dump(2) + "\n");
    }
    return res;
}

void run_experiment(const RunConfig& cfg, const RunOptions& opts)
{
    switch (cfg.experiment) {
    case Experiment::validate_soliton:
        run_validate_soliton(cfg, opts);
        break;
    case Experiment::spectrum:
        run_spectrum(cfg, opts);
        break;
    case Experiment::periodicity:
        run_periodicity(cfg, opts);
        break;
    }
}

} // namespace dispersive
