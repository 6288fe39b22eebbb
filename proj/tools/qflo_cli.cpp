#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qflo/benchmarks.hpp"
#include "qflo/generator.hpp"
#include "qflo/parallel.hpp"
#include "qflo/pipeline.hpp"
#include "qflo/qdrift.hpp"
#include "qflo/richardson.hpp"
#include "qflo/scan.hpp"

namespace {

using json = nlohmann::ordered_json;
using qflo::scan::format_double;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Outputs {
    std::string csv_path;
    std::string json_path;
};

class Csv {
  public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string> &cells)
    {
        if (cells.size() != width_) {
            throw std::logic_error("csv row width mismatch");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

  private:
    std::size_t width_;
    std::ostringstream out_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

void write_text(const std::string &path, const std::string &text, std::ostream &fallback)
{
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::invalid_argument("cannot open output file '" + path + "'");
    }
    f << text;
}

void emit(const Outputs &out, const Csv &csv, const json &summary)
{
    write_text(out.csv_path, csv.str(), std::cout);
    write_text(out.json_path, summary.dump(2) + "\n", std::cerr);
}

std::uint64_t resolve_seed(std::uint64_t seed)
{
    if (seed != 0) {
        return seed;
    }
    const auto derived = qflo::entropy_seed();
    std::cerr << "seed: " << derived << "\n";
    return derived;
}

std::string read_file(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::invalid_argument("cannot read file '" + path + "'");
    }
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string default_state(int qubits) { return std::string(static_cast<std::size_t>(qubits), '0'); }

json fit_json(const std::optional<qflo::scan::SlopeFit> &fit)
{
    if (!fit) {
        return nullptr;
    }
    return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r_squared", fit->r_squared}};
}

json weights_json(const qflo::richardson::Weights &w) { return {{"b", w.b}, {"one_norm", w.one_norm}}; }

void add_outputs(CLI::App *cmd, Outputs &out)
{
    cmd->add_option("--out", out.csv_path, "CSV output path (default stdout)");
    cmd->add_option("--json", out.json_path, "JSON summary path (default stderr)");
}

// ---- nodes ----

struct NodesArgs {
    int m = 2;
    std::string variant = "squared";
    Outputs out;
};

int cmd_nodes(const NodesArgs &a)
{
    const auto variant =
        a.variant == "squared" ? qflo::richardson::NodeVariant::Squared : qflo::richardson::NodeVariant::Unsquared;
    const auto nodes = qflo::richardson::build_nodes(a.m, variant);
    const auto w = qflo::richardson::ideal_weights(nodes);
    Csv csv({"j", "x", "k", "y", "b"});
    for (std::size_t j = 0; j < nodes.k.size(); ++j) {
        csv.row({std::to_string(j + 1), fmt(nodes.x[j]), fmt(nodes.k[j]), fmt(nodes.y[j]), fmt(w.b[j])});
    }
    std::vector<double> sizes;
    for (const auto y : nodes.y) {
        sizes.push_back(1.0 / static_cast<double>(y));
    }
    const auto report = qflo::richardson::conditioning_report(w);
    json summary = {{"command", "nodes"},
                    {"m", a.m},
                    {"variant", a.variant},
                    {"radius", nodes.radius},
                    {"weights", weights_json(w)},
                    {"moment_residuals", qflo::richardson::vandermonde_residuals(w, sizes, a.m - 1)},
                    {"amplification_warning", report.amplification_warning}};
    emit(a.out, csv, summary);
    return 0;
}

// ---- qdrift ----

struct QdriftArgs {
    std::string hamiltonian;
    std::string observable;
    std::string state;
    double time = 1.0;
    std::int64_t steps = 1;
    std::int64_t shots = 1;
    std::uint64_t seed = 1;
    Outputs out;
};

int cmd_qdrift(const QdriftArgs &a)
{
    const auto h = qflo::load_hamiltonian(a.hamiltonian);
    const auto obs = qflo::benchmarks::parse_observable(read_file(a.observable));
    const std::string label = a.state.empty() ? default_state(h.qubits()) : a.state;
    const auto psi = qflo::benchmarks::parse_state(label, h.qubits());
    if (a.steps < 1 || a.shots < 1) {
        throw std::invalid_argument("--steps and --shots must be >= 1");
    }
    const auto seed = resolve_seed(a.seed);
    const qflo::QdriftSampler sampler(h, qflo::InitialState(psi), obs, a.time, a.steps);
    const auto values = sampler.shots(seed, 0, static_cast<std::size_t>(a.shots), qflo::thread_count());
    Csv csv({"shot", "value"});
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv.row({std::to_string(i), fmt(values[i])});
    }
    const auto summary_stats = qflo::summarize(values);
    const auto rho0 = qflo::DensityMatrix::pure(psi);
    json summary = {{"command", "qdrift"},
                    {"hamiltonian", a.hamiltonian},
                    {"observable", a.observable},
                    {"state", label},
                    {"time", a.time},
                    {"steps", a.steps},
                    {"shots", a.shots},
                    {"seed", seed},
                    {"lambda", h.lambda()},
                    {"mean", summary_stats.mean},
                    {"standard_error", summary_stats.standard_error},
                    {"channel_expectation", qflo::expectation_exact(h, obs, rho0, a.time, a.steps)},
                    {"exact_evolution", qflo::expectation_exact_evolution(h, obs, rho0, a.time)}};
    emit(a.out, csv, summary);
    return 0;
}

// ---- scan ----

struct ScanArgs {
    std::string hamiltonian;
    std::string observable;
    std::string state;
    double time = 1.0;
    std::vector<std::int64_t> n_list{8, 16, 32, 64, 128, 256, 512, 1024};
    Outputs out;
};

int cmd_scan(const ScanArgs &a)
{
    const auto h = qflo::load_hamiltonian(a.hamiltonian);
    const auto obs = qflo::benchmarks::parse_observable(read_file(a.observable));
    const std::string label = a.state.empty() ? default_state(h.qubits()) : a.state;
    const auto rho0 = qflo::DensityMatrix::pure(qflo::benchmarks::parse_state(label, h.qubits()));
    for (const auto n : a.n_list) {
        if (n < 1) {
            throw std::invalid_argument("--n-list entries must be >= 1");
        }
    }
    const auto result = qflo::scan::convergence_scan(h, obs, rho0, a.time, a.n_list, qflo::thread_count());
    Csv csv({"N", "s", "value", "exact", "abs_error"});
    for (const auto &row : result.rows) {
        csv.row({fmt(static_cast<std::int64_t>(row.meta[0].second)), fmt(row.x), fmt(row.meta[1].second),
                 fmt(row.meta[2].second), fmt(row.y)});
    }
    // slope against N is the negative of the slope against s = 1/N
    json fit = fit_json(result.fit);
    if (result.fit) {
        fit["slope_in_N"] = -result.fit->slope;
    }
    json summary = {{"command", "scan"},     {"hamiltonian", a.hamiltonian}, {"observable", a.observable},
                    {"state", label},        {"time", a.time},               {"n_list", a.n_list},
                    {"fit", fit}};
    emit(a.out, csv, summary);
    return 0;
}

// ---- generator ----

struct GeneratorArgs {
    std::string hamiltonian;
    double time = 1.0;
    std::vector<double> s_list{1.0 / 256, 1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16};
    std::vector<int> ek_orders;
    Outputs out;
};

int cmd_generator(const GeneratorArgs &a)
{
    const auto h = qflo::load_hamiltonian(a.hamiltonian);
    for (const double s : a.s_list) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("--s-list entries must be positive");
        }
        const auto check = qflo::generator::log_existence_check(h, s * a.time);
        if (!check.exists) {
            throw qflo::NumericalError("channel logarithm does not exist at s = " + format_double(s) +
                                       " (min |eigenvalue| = " + format_double(check.min_eig_modulus) + ")");
        }
    }
    const auto result = qflo::scan::generator_scan(h, a.time, a.s_list);
    Csv csv({"s", "deviation", "min_eig_modulus", "eigvec_condition"});
    for (const auto &row : result.rows) {
        csv.row({fmt(row.x), fmt(row.y), fmt(row.meta[0].second), fmt(row.meta[1].second)});
    }
    json probes = json::array();
    for (const int k : a.ek_orders) {
        const auto p = qflo::generator::ek_bound_probe(h, a.time, k);
        probes.push_back({{"k", k},
                          {"h", p.h},
                          {"estimate", p.estimate},
                          {"bound", p.bound},
                          {"condition", p.condition},
                          {"skipped", p.skipped},
                          {"within_bound", p.within_bound()}});
    }
    json summary = {{"command", "generator"}, {"hamiltonian", a.hamiltonian}, {"time", a.time},
                    {"s_list", a.s_list},     {"fit", fit_json(result.fit)},  {"ek_probes", probes}};
    emit(a.out, csv, summary);
    return 0;
}

// ---- qflo ----

struct QfloArgs {
    std::string hamiltonian;
    std::string observable;
    std::string state;
    double time = 1.0;
    double epsilon = 0.05;
    double delta = 0.1;
    std::uint64_t seed = 1;
    std::string mode = "noiseless";
    std::string order_policy = "ceil";
    std::string schedule = "canonical";
    Outputs out;
};

int cmd_qflo(const QfloArgs &a)
{
    using namespace qflo::pipeline;
    const auto h = qflo::load_hamiltonian(a.hamiltonian);
    const auto obs = qflo::benchmarks::parse_observable(read_file(a.observable));
    const std::string label = a.state.empty() ? default_state(h.qubits()) : a.state;
    const auto psi = qflo::benchmarks::parse_state(label, h.qubits());

    QfloRequest request{h, qflo::InitialState(psi), obs};
    request.total_time = a.time;
    request.epsilon = a.epsilon;
    request.delta = a.delta;
    request.mode = a.mode == "noiseless" ? Mode::Noiseless : Mode::ShotSampled;
    request.order_policy = a.order_policy == "ceil" ? OrderPolicy::Ceil : OrderPolicy::LogLog;
    request.schedule = a.schedule == "canonical" ? ScheduleVariant::Canonical : ScheduleVariant::Pseudocode;
    request.threads = qflo::thread_count();
    validate(request);
    request.master_seed = request.mode == Mode::ShotSampled ? resolve_seed(a.seed) : a.seed;

    const auto r = run(request);
    const double exact =
        qflo::expectation_exact_evolution(h, obs, qflo::DensityMatrix::pure(psi), request.total_time);

    Csv csv({"j", "N", "step_time", "shots", "mean", "standard_error", "b"});
    for (std::size_t j = 0; j < r.per_node.size(); ++j) {
        const auto &n = r.per_node[j];
        csv.row({std::to_string(j + 1), fmt(n.steps), fmt(r.schedule.step_times[j]), fmt(n.shots), fmt(n.mean),
                 fmt(n.standard_error), fmt(r.weights.b[j])});
    }
    json nodes = json::array();
    for (const auto &n : r.per_node) {
        nodes.push_back({{"N", n.steps}, {"shots", n.shots}, {"mean", n.mean}, {"standard_error", n.standard_error}});
    }
    json summary = {
        {"command", "qflo"},
        {"inputs",
         {{"hamiltonian", a.hamiltonian},
          {"observable", a.observable},
          {"state", label},
          {"time", a.time},
          {"epsilon", a.epsilon},
          {"delta", a.delta},
          {"seed", request.master_seed},
          {"mode", a.mode},
          {"order_policy", a.order_policy},
          {"schedule", a.schedule}}},
        {"estimate", r.estimate},
        {"exact_evolution", exact},
        {"abs_error", std::abs(r.estimate - exact)},
        {"order", r.order},
        {"nodes_k", r.nodes.k},
        {"nodes_y", r.nodes.y},
        {"per_node", nodes},
        {"weights", weights_json(r.weights)},
        {"ideal_one_norm", r.ideal_one_norm},
        {"budget", {{"extrapolation", r.budget.extrapolation}, {"data", r.budget.data}}},
        {"base_steps", r.base_steps},
        {"scale", r.schedule.scale},
        {"shot_budget", r.shot_budget},
        {"total_gate_count", r.total_gate_count},
        {"max_depth", r.max_depth},
        {"observable_norm", r.observable_norm},
        {"theoretical_bound",
         {{"value", r.theoretical_bound.converges ? json(r.theoretical_bound.value) : json(nullptr)},
          {"ratio", r.theoretical_bound.ratio},
          {"converges", r.theoretical_bound.converges},
          {"terms", r.theoretical_bound.terms}}}};
    emit(a.out, csv, summary);
    if (!r.theoretical_bound.converges) {
        std::cerr << "error: theoretical bound does not converge (8 lambda T s_m = "
                  << format_double(r.theoretical_bound.ratio) << ")\n";
        return kExitNumerical;
    }
    return 0;
}

// ---- orderfit ----

struct OrderfitArgs {
    std::string hamiltonian;
    std::string observable;
    std::string state;
    double time = 1.0;
    std::vector<int> m_list{2, 3, 4};
    std::vector<double> scale_list{1.0, 0.5, 0.25, 0.125};
    Outputs out;
};

int cmd_orderfit(const OrderfitArgs &a)
{
    auto bench = qflo::benchmarks::one_qubit();
    auto h = bench.hamiltonian;
    auto obs = bench.observable;
    std::string label = "0";
    if (!a.hamiltonian.empty()) {
        h = qflo::load_hamiltonian(a.hamiltonian);
        label = default_state(h.qubits());
        if (a.observable.empty()) {
            throw std::invalid_argument("--observable is required with --hamiltonian");
        }
    }
    if (!a.observable.empty()) {
        obs = qflo::benchmarks::parse_observable(read_file(a.observable));
    }
    if (!a.state.empty()) {
        label = a.state;
    }
    const auto rho0 = qflo::DensityMatrix::pure(qflo::benchmarks::parse_state(label, h.qubits()));

    Csv csv({"m", "scale", "N_m", "s_m", "estimate", "abs_error"});
    json fits = json::array();
    for (const int m : a.m_list) {
        if (m < 1) {
            throw std::invalid_argument("--m-list entries must be >= 1");
        }
        const auto result = qflo::scan::order_scan(h, obs, rho0, a.time, m, a.scale_list);
        for (const auto &row : result.rows) {
            csv.row({std::to_string(m), fmt(row.meta[1].second), fmt(static_cast<std::int64_t>(row.meta[2].second)),
                     fmt(row.x), fmt(row.meta[4].second), fmt(row.y)});
        }
        json f = fit_json(result.fit);
        fits.push_back({{"m", m}, {"fit", f}});
    }
    json summary = {{"command", "orderfit"},
                    {"hamiltonian", a.hamiltonian.empty() ? std::string("builtin:one_qubit") : a.hamiltonian},
                    {"state", label},
                    {"time", a.time},
                    {"m_list", a.m_list},
                    {"scale_list", a.scale_list},
                    {"fits", fits}};
    emit(a.out, csv, summary);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"qFLO: qDRIFT with Richardson extrapolation toward the zero-step limit"};
    app.require_subcommand(1);

    NodesArgs nodes;
    auto *c_nodes = app.add_subcommand("nodes", "Chebyshev node table and extrapolation weights");
    c_nodes->add_option("--m", nodes.m, "Extrapolation order")->required()->check(CLI::Range(1, 64));
    c_nodes->add_option("--variant", nodes.variant)->check(CLI::IsMember({"squared", "unsquared"}));
    add_outputs(c_nodes, nodes.out);

    QdriftArgs qd;
    auto *c_qdrift = app.add_subcommand("qdrift", "Sampled qDRIFT shots");
    c_qdrift->add_option("--hamiltonian", qd.hamiltonian)->required();
    c_qdrift->add_option("--observable", qd.observable)->required();
    c_qdrift->add_option("--state", qd.state, "Basis label (e.g. 00) or plus^n");
    c_qdrift->add_option("--time", qd.time)->check(CLI::PositiveNumber);
    c_qdrift->add_option("--steps", qd.steps)->required();
    c_qdrift->add_option("--shots", qd.shots);
    c_qdrift->add_option("--seed", qd.seed, "Master seed; 0 draws one from entropy");
    add_outputs(c_qdrift, qd.out);

    ScanArgs sc;
    auto *c_scan = app.add_subcommand("scan", "Noiseless qDRIFT convergence against exact evolution");
    c_scan->add_option("--hamiltonian", sc.hamiltonian)->required();
    c_scan->add_option("--observable", sc.observable)->required();
    c_scan->add_option("--state", sc.state);
    c_scan->add_option("--time", sc.time)->check(CLI::PositiveNumber);
    c_scan->add_option("--n-list", sc.n_list)->delimiter(',');
    add_outputs(c_scan, sc.out);

    GeneratorArgs gen;
    auto *c_gen = app.add_subcommand("generator", "Generator deviation from ad_H via the channel logarithm");
    c_gen->add_option("--hamiltonian", gen.hamiltonian)->required();
    c_gen->add_option("--time", gen.time)->check(CLI::PositiveNumber);
    c_gen->add_option("--s-list", gen.s_list)->delimiter(',');
    c_gen->add_option("--ek", gen.ek_orders, "E_k bound probes to run")->delimiter(',')->check(CLI::Range(2, 4));
    add_outputs(c_gen, gen.out);

    QfloArgs qa;
    auto *c_qflo = app.add_subcommand("qflo", "Full qFLO estimate");
    c_qflo->add_option("--hamiltonian", qa.hamiltonian)->required();
    c_qflo->add_option("--observable", qa.observable)->required();
    c_qflo->add_option("--state", qa.state);
    c_qflo->add_option("--time", qa.time)->check(CLI::PositiveNumber);
    c_qflo->add_option("--epsilon", qa.epsilon);
    c_qflo->add_option("--delta", qa.delta);
    c_qflo->add_option("--seed", qa.seed, "Master seed; 0 draws one from entropy");
    c_qflo->add_option("--mode", qa.mode)->check(CLI::IsMember({"noiseless", "shots"}));
    c_qflo->add_option("--order-policy", qa.order_policy)->check(CLI::IsMember({"ceil", "loglog"}));
    c_qflo->add_option("--schedule", qa.schedule)->check(CLI::IsMember({"canonical", "pseudocode"}));
    add_outputs(c_qflo, qa.out);

    OrderfitArgs of;
    auto *c_of = app.add_subcommand("orderfit", "Order-m error slopes under a scale sweep");
    c_of->add_option("--hamiltonian", of.hamiltonian, "Defaults to the built-in one-qubit benchmark");
    c_of->add_option("--observable", of.observable);
    c_of->add_option("--state", of.state);
    c_of->add_option("--time", of.time)->check(CLI::PositiveNumber);
    c_of->add_option("--m-list", of.m_list)->delimiter(',');
    c_of->add_option("--scale-list", of.scale_list)->delimiter(',');
    add_outputs(c_of, of.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*c_nodes) {
            return cmd_nodes(nodes);
        }
        if (*c_qdrift) {
            return cmd_qdrift(qd);
        }
        if (*c_scan) {
            return cmd_scan(sc);
        }
        if (*c_gen) {
            return cmd_generator(gen);
        }
        if (*c_qflo) {
            return cmd_qflo(qa);
        }
        if (*c_of) {
            return cmd_orderfit(of);
        }
    } catch (const qflo::NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
