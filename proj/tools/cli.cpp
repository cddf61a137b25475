#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <racecurve/assignment.hpp>
#include <racecurve/curve_model.hpp>
#include <racecurve/csv.hpp>
#include <racecurve/dataset_io.hpp>
#include <racecurve/design.hpp>
#include <racecurve/errors.hpp>
#include <racecurve/estimation.hpp>
#include <racecurve/names.hpp>
#include <racecurve/power.hpp>
#include <racecurve/rng.hpp>

#include "table.hpp"

namespace racecurve::cli {

namespace {

using Cell = nlohmann::ordered_json;
using nlohmann::json;

struct Globals {
    std::uint64_t seed = 1;
    std::string output;
    std::string format = "csv";
    int threads = 0;
};

struct CurveFlags {
    double alpha = 0.8;
    double beta = 0.2;
    double gamma = 1.0;
};

struct FitFlags {
    std::string direction = "auto";
    double epsilon = 1e-3;
    std::size_t max_iter = 500;
    bool accelerate = false;

    FitOptions options() const
    {
        FitOptions o;
        o.epsilon = epsilon;
        o.max_iter = max_iter;
        o.accelerate = accelerate;
        if (direction != "auto") o.direction = parse_direction(direction);
        return o;
    }
};

struct NameFiles {
    std::string first_names;
    std::string last_names;
    std::string totals;
    std::uint64_t m_white = 0;
    std::uint64_t m_black = 0;

    NameFrequencyTable load() const
    {
        PopulationTotals t{m_white, m_black};
        if (!totals.empty()) {
            std::ifstream in(totals);
            if (!in) throw DomainError("cannot open " + totals);
            t = read_totals(in, totals);
        }
        return load_frequency_tables(first_names, last_names, t);
    }
};

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    return in;
}

void add_name_files(CLI::App* cmd, NameFiles& f)
{
    cmd->add_option("--first-names", f.first_names, "First-name counts CSV (name,white_count,black_count)")
        ->required();
    cmd->add_option("--last-names", f.last_names, "Last-name counts CSV (name,white_count,black_count)")
        ->required();
    auto* totals = cmd->add_option("--totals", f.totals, "File with m_white=<int> and m_black=<int>");
    auto* mw = cmd->add_option("--m-white", f.m_white, "White population total");
    auto* mb = cmd->add_option("--m-black", f.m_black, "Black population total");
    mw->needs(mb);
    mb->needs(mw);
    totals->excludes(mw)->excludes(mb);
}

void add_fit_flags(CLI::App* cmd, FitFlags& f)
{
    cmd->add_option("--direction", f.direction, "Monotone branch: auto, increasing or decreasing")
        ->check(CLI::IsMember({"auto", "increasing", "decreasing"}))
        ->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "Stopping threshold on the largest coordinate change")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iter", f.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--accelerate", f.accelerate, "Add a guarded Fisher-scoring step to every coordinate cycle");
}

Cell number_or_null(const std::optional<double>& x) { return x ? Cell(*x) : Cell(nullptr); }

// ---------------------------------------------------------------- fit files

json fit_to_json(const FitResult& fr)
{
    json j;
    j["direction"] = std::string(to_string(fr.working.direction));
    j["a"] = fr.working.a;
    j["b"] = fr.working.b;
    j["gamma"] = fr.working.gamma;
    j["flat_level"] = fr.working.flat_level;
    j["alpha"] = fr.natural.alpha;
    j["beta"] = fr.natural.beta;
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["epsilon"] = fr.epsilon;
    j["boundary_flag"] = fr.boundary_flag;
    j["singular_fisher"] = fr.singular_fisher;
    j["log_likelihood"] = fr.log_likelihood;
    const auto matrix = [](const auto& m) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json r = json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
            rows.push_back(r);
        }
        return rows;
    };
    j["covariance_working"] = fr.covariance_working ? matrix(*fr.covariance_working) : json(nullptr);
    j["covariance_alpha_beta"] = fr.covariance_alpha_beta ? matrix(*fr.covariance_alpha_beta) : json(nullptr);
    json levels = json::array();
    for (const auto& l : fr.levels) levels.push_back({{"xi", l.xi}, {"n", l.n}, {"responses", l.responses}});
    j["levels"] = levels;
    return j;
}

FitResult fit_from_json(const json& j)
{
    FitResult fr;
    fr.working.direction = parse_direction(j.at("direction").get<std::string>());
    fr.working.a = j.at("a").get<double>();
    fr.working.b = j.at("b").get<double>();
    fr.working.gamma = j.at("gamma").get<double>();
    fr.working.flat_level = j.at("flat_level").get<double>();
    fr.natural = {j.at("alpha").get<double>(), j.at("beta").get<double>(), fr.working.gamma};
    fr.converged = j.at("converged").get<bool>();
    fr.iterations = j.at("iterations").get<std::size_t>();
    fr.epsilon = j.at("epsilon").get<double>();
    fr.boundary_flag = j.at("boundary_flag").get<bool>();
    fr.singular_fisher = j.at("singular_fisher").get<bool>();
    fr.log_likelihood = j.at("log_likelihood").get<double>();
    if (!j.at("covariance_working").is_null()) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = j["covariance_working"][r][c].get<double>();
        fr.covariance_working = m;
    }
    if (!j.at("covariance_alpha_beta").is_null()) {
        Mat2 m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m(r, c) = j["covariance_alpha_beta"][r][c].get<double>();
        fr.covariance_alpha_beta = m;
    }
    for (const auto& l : j.at("levels")) {
        fr.levels.push_back({l.at("xi").get<double>(), l.at("n").get<std::size_t>(), l.at("responses").get<std::size_t>()});
    }
    if (fr.levels.empty()) throw DomainError("fit file has no levels");
    return fr;
}

// ------------------------------------------------------------------- design

struct DesignFlags {
    std::vector<double> alpha{0.2};
    std::vector<double> beta{0.8};
    std::vector<double> gamma{1.0};
    std::vector<std::size_t> ks;
    std::size_t n = 1200;
    bool standard_scenarios_flag = false;
};

Table cmd_design(const DesignFlags& f)
{
    std::vector<CurveParams> scenarios;
    if (f.standard_scenarios_flag) {
        scenarios = standard_scenarios();
    } else {
        if (f.alpha.size() != f.beta.size()) throw CLI::ValidationError("--beta", "needs as many values as --alpha");
        for (std::size_t i = 0; i < f.alpha.size(); ++i)
            for (double g : f.gamma) scenarios.push_back({f.alpha[i], f.beta[i], g});
    }
    const std::vector<std::size_t> ks = f.ks.empty() ? standard_k_values() : f.ks;
    const auto sweeps = sweep_scenarios(scenarios, ks, f.n);
    Table t({"kind", "alpha", "beta", "gamma", "k", "n", "criterion", "normalized"});
    for (const auto& sweep : sweeps) {
        for (const auto& r : sweep) {
            t.add({"criterion", r.params.alpha, r.params.beta, r.params.gamma, r.k, f.n, r.criterion, r.normalized});
        }
    }
    t.add({"recommended", nullptr, nullptr, nullptr, recommend_k(sweeps), f.n, nullptr, nullptr});
    return t;
}

// ---------------------------------------------------------------------- fit

struct FitCmdFlags {
    std::string data;
    std::string save;
    double level = 0.95;
    bool allow_partial = false;
    bool by_block = false;
    FitFlags fit;
};

void report_fit(Table& t, const std::string& block, const FitResult& fr, double level, std::ostream& err)
{
    const auto row = [&](const std::string& q, Cell value, Cell se = nullptr, Cell lo = nullptr, Cell hi = nullptr) {
        t.add({block, q, std::move(value), std::move(se), std::move(lo), std::move(hi)});
    };
    const bool monotone = fr.working.direction != Direction::Flat;
    const bool have_cov = fr.covariance_working.has_value();
    const auto sd = [](double v) { return std::sqrt(std::max(v, 0.0)); };

    row("direction", std::string(to_string(fr.working.direction)));
    row("n", total_units(fr.levels));
    row("levels", fr.levels.size());
    row("alpha", fr.natural.alpha, have_cov ? Cell(sd((*fr.covariance_alpha_beta)(0, 0))) : Cell(nullptr));
    row("beta", fr.natural.beta, have_cov ? Cell(sd((*fr.covariance_alpha_beta)(1, 1))) : Cell(nullptr));
    if (monotone) {
        row("a", fr.working.a, have_cov ? Cell(sd((*fr.covariance_working)(0, 0))) : Cell(nullptr));
        row("b", fr.working.b, have_cov ? Cell(sd((*fr.covariance_working)(1, 1))) : Cell(nullptr));
    }
    if (have_cov && fr.converged) {
        const auto g = gamma_ci(fr, level);
        row("gamma", g.estimate, g.standard_error, g.lower, g.upper);
        const auto e = treatment_effect_ci(fr, level);
        row("beta_minus_alpha", e.estimate, e.standard_error, e.lower, e.upper);
    } else {
        row("gamma", monotone ? Cell(fr.working.gamma) : Cell(nullptr));
        row("beta_minus_alpha", fr.natural.beta - fr.natural.alpha);
    }
    row("ci_level", level);
    row("converged", fr.converged);
    row("iterations", fr.iterations);
    row("epsilon", fr.epsilon);
    row("boundary_flag", fr.boundary_flag);
    row("singular_fisher", fr.singular_fisher);
    row("log_likelihood", fr.log_likelihood);

    const std::string where = block.empty() ? "" : " (block " + block + ")";
    if (!monotone) {
        err << "warning" << where << ": extreme-level proportions tie; fitted a constant response curve\n";
        row("warning", "flat fit: no covariance for (a, b, gamma)");
    } else if (fr.singular_fisher) {
        err << "warning" << where << ": Fisher information is singular at the estimate; covariances omitted\n";
        row("warning", "singular Fisher information: covariances omitted");
    }
    if (fr.boundary_flag) {
        err << "warning" << where << ": estimate reached a parameter bound\n";
        row("warning", "estimate at a parameter bound");
    }
}

int cmd_fit(const FitCmdFlags& f, const Globals& g, std::ostream& out, std::ostream& err,
            const std::function<void(const Table&)>& emit)
{
    (void)out;
    (void)g;
    auto in = open_input(f.data);
    const Dataset data = read_dataset(in, f.data);
    const FitOptions opts = f.fit.options();
    Table t({"block", "quantity", "value", "std_error", "lower", "upper"});

    std::vector<std::pair<std::string, Dataset>> parts{{"all", data}};
    if (f.by_block && data.has_blocks()) {
        std::vector<std::string> names(data.blocks().begin(), data.blocks().end());
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        for (const auto& b : names) parts.emplace_back(b, data.block_subset(b));
    }

    bool all_converged = true;
    json saved;
    for (const auto& [name, part] : parts) {
        FitResult fr;
        try {
            fr = fit(part, opts);
        } catch (const DomainError& e) {
            if (name == "all") throw;
            err << "warning (block " << name << "): " << e.what() << '\n';
            t.add({name, "warning", e.what(), nullptr, nullptr, nullptr});
            continue;
        }
        all_converged = all_converged && fr.converged;
        report_fit(t, name, fr, f.level, err);
        if (name == "all") saved = fit_to_json(fr);
    }
    if (!f.save.empty()) {
        std::ofstream s(f.save);
        if (!s) throw DomainError("cannot write " + f.save);
        s << saved.dump(2) << '\n';
    }
    emit(t);
    if (!all_converged) {
        err << "error: fit did not converge within --max-iter=" << f.fit.max_iter << '\n';
        return f.allow_partial ? kOk : kComputeFailure;
    }
    return kOk;
}

// ------------------------------------------------------------------ predict

struct PredictFlags {
    std::string fit;
    std::size_t grid = 50;
    double level = 0.95;
};

Table cmd_predict(const PredictFlags& f, std::ostream& err)
{
    auto in = open_input(f.fit);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError(f.fit + ": not a fit file (" + e.what() + ")");
    }
    const FitResult fr = fit_from_json(j);
    const bool bands = fr.converged && fr.covariance_working.has_value();
    if (!bands) err << "warning: no usable covariance in the fit; intervals omitted\n";

    Table t({"kind", "xi", "probability", "lower", "upper", "n"});
    const auto add_point = [&](const char* kind, double xi, Cell n) {
        if (bands) {
            const auto p = predict_with_ci(fr, RaceLevel{xi}, f.level);
            t.add({kind, xi, p.probability, p.interval.lower, p.interval.upper, std::move(n)});
        } else {
            t.add({kind, xi, response_prob(fr.working, RaceLevel{xi}), nullptr, nullptr, std::move(n)});
        }
    };
    const double lo = fr.levels.front().xi;
    const double hi = fr.levels.back().xi;
    for (std::size_t i = 0; i < f.grid; ++i) {
        const double xi = i + 1 == f.grid ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(f.grid - 1);
        add_point("curve", xi, nullptr);
    }
    for (const auto& l : fr.levels) add_point("level", l.xi, l.n);
    const auto props = naive_proportions(fr.levels);
    for (std::size_t i = 0; i < fr.levels.size(); ++i) {
        t.add({"observed", fr.levels[i].xi, props[i], nullptr, nullptr, fr.levels[i].n});
    }
    return t;
}

// -------------------------------------------------------------------- power

struct PowerFlags {
    CurveFlags curve;
    std::size_t k = 6;
    std::vector<std::size_t> n_list{1000, 1200, 1400, 1600, 1800, 2000};
    std::size_t replicates = 200;
    double level = 0.95;
    FitFlags fit;
};

Table cmd_power(const PowerFlags& f, const Globals& g)
{
    PowerScenario s;
    s.params = {f.curve.alpha, f.curve.beta, f.curve.gamma};
    s.k = f.k;
    s.n_values = f.n_list;
    s.replicates = f.replicates;
    s.ci_level = f.level;
    s.seed = g.seed;
    s.fit_options = f.fit.options();
    Table t({"n", "delta1", "delta2", "power_gamma", "power_effect", "successes", "failures"});
    for (const auto& e : estimate_power(s)) {
        const bool any = e.successes > 0;
        t.add({e.n, any ? Cell(e.delta1) : Cell(nullptr), any ? Cell(e.delta2) : Cell(nullptr),
               any ? Cell(1.0 - e.delta1) : Cell(nullptr), any ? Cell(1.0 - e.delta2) : Cell(nullptr), e.successes,
               e.failures});
    }
    return t;
}

// ----------------------------------------------------------------- simulate

struct SimulateFlags {
    CurveFlags curve;
    std::size_t k = 6;
    std::size_t n = 1200;
    std::string plan;
};

Table cmd_simulate(const SimulateFlags& f, const Globals& g)
{
    const CurveParams params{f.curve.alpha, f.curve.beta, f.curve.gamma};
    params.validate();
    RandomStream rng(g.seed);
    if (!f.plan.empty()) {
        auto in = open_input(f.plan);
        const auto plan = read_plan(in, f.plan);
        const auto wp = to_working(params);
        Table t({"xi", "y", "block"});
        for (const auto& r : plan.rows) {
            const double p = response_prob(wp, RaceLevel{r.race_level});
            t.add({r.race_level, rng.bernoulli(p) ? 1 : 0, r.block.label()});
        }
        return t;
    }
    const auto data = simulate_dataset(params, level_grid(f.k, f.n), rng);
    Table t({"xi", "y"});
    for (const auto& o : data.observations()) t.add({o.xi.value(), o.y});
    return t;
}

// ---------------------------------------------------------------- name odds

struct OddsFlags {
    NameFiles files;
    std::vector<std::string> names;
    bool smoothing = false;
};

std::pair<std::string, std::string> split_full_name(const std::string& full)
{
    const auto t = csv::trim(full);
    const auto space = t.find_last_of(' ');
    if (space == std::string::npos) throw CLI::ValidationError("--name", "expected 'First Last', got '" + full + "'");
    return {csv::trim(t.substr(0, space)), csv::trim(t.substr(space + 1))};
}

Table cmd_name_odds(const OddsFlags& f)
{
    const auto table = f.files.load();
    Table t({"first", "last", "prob_white", "prob_black"});
    for (const auto& full : f.names) {
        const auto [first, last] = split_full_name(full);
        const auto odds = race_probability(table, first, last, {f.smoothing});
        t.add({first, last, odds.prob_white, odds.prob_black});
    }
    return t;
}

// ------------------------------------------------------------- select names

struct SelectFlags {
    NameFiles files;
    std::string candidates;
    std::size_t k = 6;
    std::vector<double> targets;
    bool smoothing = false;
    bool as_panel = false;
};

Table cmd_select_names(const SelectFlags& f, std::ostream& err)
{
    const auto table = f.files.load();
    auto in = open_input(f.candidates);
    std::vector<std::pair<std::string, std::string>> cands;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no) || csv::split(line) != std::vector<std::string>{"first", "last"}) {
        throw ParseError(f.candidates, line_no, "expected header 'first,last'");
    }
    while (csv::next_record(in, line, line_no)) {
        const auto fields = csv::split(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(f.candidates, line_no, "expected 'first,last'");
        }
        cands.emplace_back(fields[0], fields[1]);
    }
    std::vector<double> targets = f.targets;
    if (targets.empty()) targets = level_grid(f.k, f.k).levels;
    const auto sel = select_name_panel(cands, table, targets, {f.smoothing});
    for (const auto& w : sel.warnings) err << "warning: " << w << '\n';
    err << "total deviation " << csv::format_double(sel.total_deviation) << '\n';
    if (f.as_panel) {
        Table t({"name", "race_level"});
        for (const auto& c : sel.chosen) t.add({c.first + " " + c.last, c.achieved});
        return t;
    }
    Table t({"target", "first", "last", "achieved", "deviation"});
    for (const auto& c : sel.chosen) t.add({c.target, c.first, c.last, c.achieved, std::abs(c.achieved - c.target)});
    return t;
}

// ------------------------------------------------------------------- assign

struct AssignFlags {
    std::string roster;
    std::string female_panel;
    std::string male_panel;
    bool any_panel_size = false;
    bool dedupe = false;
};

Table cmd_assign(const AssignFlags& f, const Globals& g, std::ostream& err)
{
    auto rin = open_input(f.roster);
    auto roster = read_roster(rin, f.roster);
    if (f.dedupe) roster = deduplicate_roster(roster);
    auto fin = open_input(f.female_panel);
    auto min = open_input(f.male_panel);
    const auto female = read_panel(fin, f.female_panel);
    const auto male = read_panel(min, f.male_panel);
    RandomizeOptions opts;
    opts.allow_other_panel_size = f.any_panel_size;
    const auto blocks = block_units(roster);
    for (const auto& [key, units] : blocks) err << "block " << key.label() << ": " << units.size() << '\n';
    const auto plan = randomize(blocks, female, male, g.seed, opts);
    Table t({"id", "block", "sender_gender", "sender_name", "race_level", "seed"});
    for (const auto& r : plan.rows) {
        t.add({r.unit_id, r.block.label(), std::string(to_string(r.sender_gender)), r.sender_name, r.race_level,
               std::to_string(plan.seed)});
    }
    return t;
}

// -------------------------------------------------------------------- setup

void add_curve_flags(CLI::App* cmd, CurveFlags& c)
{
    cmd->add_option("--alpha", c.alpha, "Response probability as xi -> 0")->capture_default_str();
    cmd->add_option("--beta", c.beta, "Response probability as xi -> 1")->capture_default_str();
    cmd->add_option("--gamma", c.gamma, "Shape of the weighting function")->capture_default_str();
}

std::string echo_config(const CLI::App& app, const CLI::App& sub)
{
    std::ostringstream os;
    os << "# command: " << sub.get_name() << '\n';
    const auto dump = [&](const CLI::App& a) {
        for (const CLI::Option* opt : a.get_options()) {
            if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
            std::string value;
            if (opt->get_expected_max() == 0) {
                value = opt->count() > 0 ? "true" : "false";
            } else if (opt->count() > 0) {
                const auto& res = opt->results();
                for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
            } else {
                value = opt->get_default_str();
            }
            os << "# " << opt->get_lnames().front() << " = " << value << '\n';
        }
    };
    dump(app);
    dump(sub);
    return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Planning and analysis tools for graded race-signal correspondence experiments", "racecurve"};
    app.require_subcommand(1);
    app.allow_extras(false);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--output", g.output, "Write the table to this file instead of stdout");
    app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the default or RACECURVE_THREADS)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    DesignFlags design;
    auto* c_design = app.add_subcommand("design", "D-optimality sweep over the number of levels");
    c_design->add_option("--alpha", design.alpha, "Comma-separated alpha values")->delimiter(',')->capture_default_str();
    c_design->add_option("--beta", design.beta, "Comma-separated beta values, paired with --alpha")
        ->delimiter(',')
        ->capture_default_str();
    c_design->add_option("--gamma", design.gamma, "Comma-separated gamma values, crossed with the pairs")
        ->delimiter(',')
        ->capture_default_str();
    c_design->add_option("--k-list", design.ks, "Comma-separated level counts (default 3,4,5,6,8,10,12,15,20)")
        ->delimiter(',');
    c_design->add_option("--n", design.n, "Total units")->capture_default_str();
    c_design->add_flag("--standard-scenarios", design.standard_scenarios_flag,
                       "Use the 32 standard scenarios (4 alpha/beta pairs x gamma 0.25..2)");

    FitCmdFlags fitf;
    auto* c_fit = app.add_subcommand("fit", "Maximum-likelihood fit with Wald intervals");
    c_fit->add_option("--data", fitf.data, "Dataset CSV (xi,y[,block])")->required();
    c_fit->add_option("--save", fitf.save, "Save the fit as JSON for 'predict'");
    c_fit->add_option("--level", fitf.level, "Confidence level")->capture_default_str();
    c_fit->add_flag("--allow-partial", fitf.allow_partial, "Exit 0 even if the fit did not converge");
    c_fit->add_flag("--by-block", fitf.by_block, "Also fit each block separately");
    add_fit_flags(c_fit, fitf.fit);

    PredictFlags pred;
    auto* c_pred = app.add_subcommand("predict", "Fitted curve with pointwise confidence band");
    c_pred->add_option("--fit", pred.fit, "Fit JSON written by 'fit --save'")->required();
    c_pred->add_option("--grid", pred.grid, "Curve points between the extreme observed levels")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}))
        ->capture_default_str();
    c_pred->add_option("--level", pred.level, "Confidence level")->capture_default_str();

    PowerFlags powf;
    auto* c_power = app.add_subcommand("power", "Monte-Carlo power of the Wald tests");
    add_curve_flags(c_power, powf.curve);
    c_power->add_option("--k", powf.k, "Number of levels")->capture_default_str();
    c_power->add_option("--n-list", powf.n_list, "Comma-separated sample sizes")->delimiter(',')->capture_default_str();
    c_power->add_option("--replicates", powf.replicates, "Datasets per sample size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_power->add_option("--level", powf.level, "Confidence level")->capture_default_str();
    add_fit_flags(c_power, powf.fit);

    SimulateFlags simf;
    auto* c_sim = app.add_subcommand("simulate", "Simulate binary outcomes from a response curve");
    add_curve_flags(c_sim, simf.curve);
    c_sim->add_option("--k", simf.k, "Number of levels")->capture_default_str();
    c_sim->add_option("--n", simf.n, "Total units")->capture_default_str();
    c_sim->add_option("--plan", simf.plan, "Assignment plan CSV; simulate one outcome per planned unit");

    OddsFlags oddf;
    auto* c_odds = app.add_subcommand("name-odds", "Naive-Bayes race odds of full names");
    add_name_files(c_odds, oddf.files);
    c_odds->add_option("--name", oddf.names, "Full name 'First Last' (repeatable)")->required();
    c_odds->add_flag("--smoothing", oddf.smoothing, "Add one to every name count");

    SelectFlags self;
    auto* c_sel = app.add_subcommand("select-names", "Pick names whose race levels match a target grid");
    add_name_files(c_sel, self.files);
    c_sel->add_option("--candidates", self.candidates, "Candidate CSV (first,last)")->required();
    c_sel->add_option("--k", self.k, "Target the standard k-level grid")->capture_default_str();
    c_sel->add_option("--targets", self.targets, "Explicit comma-separated target levels")->delimiter(',');
    c_sel->add_flag("--smoothing", self.smoothing, "Add one to every name count");
    c_sel->add_flag("--as-panel", self.as_panel, "Emit a name,race_level panel file");

    AssignFlags asg;
    auto* c_asg = app.add_subcommand("assign", "Blocked randomization of units to senders and names");
    c_asg->add_option("--roster", asg.roster, "Roster CSV (id,practice_area,gender,race)")->required();
    c_asg->add_option("--female-panel", asg.female_panel, "Female sender panel CSV (name,race_level)")->required();
    c_asg->add_option("--male-panel", asg.male_panel, "Male sender panel CSV (name,race_level)")->required();
    c_asg->add_flag("--any-panel-size", asg.any_panel_size, "Allow panels with other than six names");
    c_asg->add_flag("--dedupe", asg.dedupe, "Keep only the first row of repeated unit ids");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, m;
        const int code = app.exit(e, o, m);
        out << o.str();
        err << m.str();
        return code == 0 ? kOk : kUsage;
    }

    if (g.threads > 0) {
        omp_set_num_threads(g.threads);
    } else if (const char* env = std::getenv("RACECURVE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App* sub = app.get_subcommands().front();
    err << echo_config(app, *sub);

    const Format format = g.format == "json" ? Format::Json : Format::Csv;
    const auto emit = [&](const Table& t) {
        if (g.output.empty()) {
            t.write(out, format);
            return;
        }
        std::ofstream file(g.output);
        if (!file) throw DomainError("cannot write " + g.output);
        t.write(file, format);
    };

    try {
        if (sub == c_design) emit(cmd_design(design));
        else if (sub == c_fit) return cmd_fit(fitf, g, out, err, emit);
        else if (sub == c_pred) emit(cmd_predict(pred, err));
        else if (sub == c_power) emit(cmd_power(powf, g));
        else if (sub == c_sim) emit(cmd_simulate(simf, g));
        else if (sub == c_odds) emit(cmd_name_odds(oddf));
        else if (sub == c_sel) emit(cmd_select_names(self, err));
        else if (sub == c_asg) emit(cmd_assign(asg, g, err));
        return kOk;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kComputeFailure;
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kComputeFailure;
    } catch (const SingularFisherError& e) {
        err << "error: " << e.what() << '\n';
        return kComputeFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kComputeFailure;
    }
}

}  // namespace racecurve::cli
