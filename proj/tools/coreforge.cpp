// Command-line front end: committee search, stability checks, certificate
// construction/verification, priceability checks, counterexample lookup, and
// proof rendering. Every run writes one JSON run record plus its artifacts.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coreforge/backend.hpp"
#include "coreforge/combinatorics.hpp"
#include "coreforge/duality.hpp"
#include "coreforge/election.hpp"
#include "coreforge/milp.hpp"
#include "coreforge/oracle.hpp"
#include "coreforge/priceability.hpp"
#include "coreforge/rational.hpp"

namespace {

using nlohmann::json;
using namespace coreforge;

// exit codes: 0 verified/success, 1 property fails, 2 undecided, 3 usage
// error, 4 solver/runtime error
constexpr int kOk = 0;
constexpr int kPropertyFails = 1;
constexpr int kUndecided = 2;
constexpr int kUsageError = 3;
constexpr int kRuntimeError = 4;

struct CommonOpts {
    std::string solver;
    double tolerance = 1e-4;
    double timeout = 0.0;
    int threads = 1;
    unsigned seed = 0;
    std::string output_dir = ".";
    std::string export_lp;
    std::string export_mps;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--solver", opts.solver, "solver backend id (default: CORE_FORGE_SOLVER or scipy)");
    cmd->add_option("--tolerance", opts.tolerance, "solver tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--timeout", opts.timeout, "time limit in seconds (0 = none)");
    cmd->add_option("--threads", opts.threads, "solver threads");
    cmd->add_option("--seed", opts.seed, "solver seed");
    cmd->add_option("--output-dir", opts.output_dir, "directory for run records and artifacts");
    cmd->add_option("--export-lp", opts.export_lp, "also write the model in LP format to this path");
    cmd->add_option("--export-mps", opts.export_mps, "also write the model in MPS format to this path");
}

BackendConfig to_config(const CommonOpts& opts) {
    BackendConfig cfg;
    cfg.solver = opts.solver;
    cfg.tolerance = opts.tolerance;
    cfg.time_limit_sec = opts.timeout;
    cfg.threads = opts.threads;
    cfg.seed = opts.seed;
    return cfg;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

/// One record per run: command, parameters, backend config, timestamps,
/// result payload, artifact paths.
struct RunRecord {
    json record;
    std::string output_dir;
    std::string started = timestamp();

    RunRecord(const std::string& command, const CommonOpts& opts, json parameters)
        : output_dir(opts.output_dir) {
        record["command"] = command;
        record["parameters"] = std::move(parameters);
        record["backend"] = {{"solver", opts.solver.empty() ? "(default)" : opts.solver},
                             {"tolerance", opts.tolerance},
                             {"timeout", opts.timeout},
                             {"threads", opts.threads},
                             {"seed", opts.seed}};
        record["artifacts"] = json::array();
    }

    std::string artifact(const std::string& name, const std::string& content) {
        std::string path = output_dir + "/" + name;
        write_text(path, content);
        record["artifacts"].push_back(path);
        return path;
    }

    void finish(json result, int exit_code) {
        record["started_at"] = started;
        record["finished_at"] = timestamp();
        record["result"] = std::move(result);
        record["exit_code"] = exit_code;
        std::string path = output_dir + "/run_" + record["command"].get<std::string>() + ".json";
        write_text(path, record.dump(2) + "\n");
    }
};

std::vector<int> parse_committee(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(std::stoi(part));
    }
    return out;
}

void maybe_export(const OptModel& model, const CommonOpts& opts, RunRecord& run) {
    if (!opts.export_lp.empty()) {
        write_text(opts.export_lp, model.export_lp());
        run.record["artifacts"].push_back(opts.export_lp);
    }
    if (!opts.export_mps.empty()) {
        write_text(opts.export_mps, model.export_mps());
        run.record["artifacts"].push_back(opts.export_mps);
    }
}

int cmd_search(int m, int k, const std::string& quota_name_, double big_m, const CommonOpts& opts) {
    Quota quota = quota_from_name(quota_name_);
    RunRecord run("search", opts,
                  {{"m", m}, {"k", k}, {"quota", quota_name_}, {"big_m", big_m}});

    MilpProgram prog = build_milp(m, k, quota, big_m);
    maybe_export(prog.model, opts, run);

    auto backend = make_backend(opts.solver);
    BackendConfig cfg = to_config(opts);
    MilpSolution sol = solve_search(prog, *backend, cfg);

    json result{{"status", solve_status_name(sol.status)}, {"message", sol.message}};
    if (sol.status == SolveStatus::error || sol.status == SolveStatus::infeasible ||
        sol.status == SolveStatus::unbounded) {
        run.finish(result, kRuntimeError);
        std::cerr << "search failed: " << sol.message << "\n";
        return kRuntimeError;
    }

    result["mu"] = sol.mu;
    result["bound_interval"] = {sol.mu - sol.gap, sol.mu + sol.gap};
    VerificationReport report = verify_solution(prog, sol, cfg.tolerance);
    result["verified"] = report.ok;
    result["exact_value"] = rational_to_string(report.exact_value);
    if (!report.message.empty()) result["verification_message"] = report.message;

    run.artifact("search_distribution.json", distribution_to_json(report.rationalized).dump(2) + "\n");
    if (!report.least_core.witnesses.empty()) {
        auto committees = enumerate_committees(CommitteeSpace(m, k));
        result["witness_committee"] = candidate_set_to_json(
            committees[report.least_core.witnesses.front()]);
    }

    int code = kOk;
    if (sol.status == SolveStatus::time_limit) code = kUndecided;
    else if (!report.ok) code = kPropertyFails;
    run.finish(result, code);
    std::cout << "value " << sol.mu << " (exact recheck " << rational_to_string(report.exact_value)
              << ", " << (report.ok ? "verified" : "NOT verified") << ")\n";
    return code;
}

int cmd_check(const std::string& instance_path, const std::string& committee_spec,
              const std::string& quota_name_, const CommonOpts& opts) {
    Quota quota = quota_from_name(quota_name_);
    VoteDistribution x = distribution_from_json(read_json(instance_path));
    auto ids = parse_committee(committee_spec);
    CandidateSet W = CandidateSet::from_indices(ids, x.m());
    int k = W.size();

    RunRecord run("check", opts, {{"instance", instance_path},
                                  {"committee", candidate_set_to_json(W)},
                                  {"quota", quota_name_}});

    CandidateSet worst;
    Rational worst_excess;
    bool have = false;
    CommitteeSpace space(x.m(), k);
    for (const auto& Wp : enumerate_deviations(space)) {
        Rational excess = deviation_excess(x, W, Wp, k, quota);
        if (!have || excess > worst_excess) {
            worst = Wp;
            worst_excess = excess;
            have = true;
        }
    }
    bool stable = !excess_defeats(quota, worst_excess);

    json result{{"stable", stable},
                {"worst_deviation", candidate_set_to_json(worst)},
                {"excess", rational_to_string(worst_excess)}};
    int code = stable ? kOk : kPropertyFails;
    run.finish(result, code);
    std::cout << "committee " << W.to_string() << " is " << (stable ? "stable" : "unstable")
              << " (worst deviation " << worst.to_string() << ", excess "
              << rational_to_string(worst_excess) << ")\n";
    return code;
}

int cmd_certify(int m, int k, const std::string& quota_name_, const std::string& mode,
                const std::string& deviations_path, const std::string& certificate_path,
                const CommonOpts& opts) {
    Quota quota = quota_from_name(quota_name_);
    RunRecord run("certify", opts, {{"m", m}, {"k", k}, {"quota", quota_name_}, {"mode", mode}});

    if (mode == "lower-bound") {
        LowerBoundAssignment lb = lower_bound_assignment(m, k, quota);
        AssignmentCheck check = verify_assignment_exact(lb.x, lb.D, lb.mu, quota);
        json result{{"mu", rational_to_string(lb.mu)},
                    {"feasible", check.feasible},
                    {"mu_maximal", check.mu_maximal},
                    {"message", check.message}};
        run.artifact("lower_bound_distribution.json", distribution_to_json(lb.x).dump(2) + "\n");
        run.artifact("lower_bound_deviations.json", deviation_function_to_json(lb.D).dump(2) + "\n");
        int code = check.feasible ? kOk : kPropertyFails;
        run.finish(result, code);
        std::cout << "lower bound mu = " << rational_to_string(lb.mu)
                  << (check.feasible ? " (verified exactly)" : " (FAILED: " + check.message + ")")
                  << "\n";
        return code;
    }

    DeviationFunction D = deviation_function_from_json(read_json(deviations_path));
    DualCertificate cert;
    if (mode == "singleton") {
        cert = certificate_singleton(m, k, D, quota);
    } else if (mode == "kplusone") {
        cert = certificate_kplusone(m, D, quota);
    } else if (mode == "verify") {
        cert = certificate_from_json(read_json(certificate_path));
    } else {
        std::cerr << "unknown certify mode: " << mode << "\n";
        return kUsageError;
    }

    CertificateCheck check = verify_certificate(cert, D, m, k, quota);
    json result{{"feasible", check.feasible}, {"message", check.message}};
    if (check.feasible) result["objective"] = rational_to_string(check.objective);
    if (check.violating_ballot)
        result["violating_ballot"] = candidate_set_to_json(CandidateSet(*check.violating_ballot, m));
    if (mode != "verify")
        run.artifact("certificate.json", certificate_to_json(cert).dump(2) + "\n");
    int code = check.feasible ? kOk : kPropertyFails;
    run.finish(result, code);
    if (check.feasible)
        std::cout << "certificate feasible, objective " << rational_to_string(check.objective) << "\n";
    else
        std::cout << "certificate rejected: " << check.message << "\n";
    return code;
}

/// Self-contained certificate file: the instance, committee, kind and the
/// dual multipliers together, so render-proof needs nothing else.
json priceability_bundle(const VoteDistribution& x, const CandidateSet& W, PriceKind kind,
                         const InfeasibilityCertificate& cert) {
    return json{{"instance", distribution_to_json(x)},
                {"committee", candidate_set_to_json(W)},
                {"kind", price_kind_name(kind)},
                {"certificate", infeasibility_certificate_to_json(cert)}};
}

int cmd_priceability(const std::string& instance_path, const std::string& committee_spec,
                     const std::string& kind_name, const CommonOpts& opts) {
    VoteDistribution x = distribution_from_json(read_json(instance_path));
    CandidateSet W = CandidateSet::from_indices(parse_committee(committee_spec), x.m());
    int k = W.size();

    RunRecord run("priceability", opts, {{"instance", instance_path},
                                         {"committee", candidate_set_to_json(W)},
                                         {"kind", kind_name}});
    auto backend = make_backend(opts.solver);
    BackendConfig cfg = to_config(opts);

    if (kind_name == "peters") {
        PetersCheckResult res = check_peters_priceable(x, W, k, *backend, cfg);
        json result{{"decision", res.decision == PriceDecision::priceable
                                     ? "priceable"
                                     : (res.decision == PriceDecision::not_priceable ? "not_priceable"
                                                                                     : "undecided")},
                    {"lp_value", res.lp_value},
                    {"message", res.message}};
        if (res.payment) result["price"] = rational_to_string(res.payment->price);
        int code = res.decision == PriceDecision::priceable
                       ? kOk
                       : (res.decision == PriceDecision::not_priceable ? kPropertyFails : kUndecided);
        run.finish(result, code);
        std::cout << "peters: " << result["decision"].get<std::string>() << "\n";
        return code;
    }

    PriceKind kind = price_kind_from_name(kind_name);
    PriceCheckResult res = check_priceable(x, W, k, kind, *backend, cfg);
    json result{{"lp_value", res.lp_value}, {"message", res.message}};
    int code = kUndecided;
    if (res.decision == PriceDecision::priceable) {
        result["decision"] = "priceable";
        run.artifact("price_system.json", price_system_to_json(*res.system).dump(2) + "\n");
        code = kOk;
    } else if (res.decision == PriceDecision::not_priceable) {
        result["decision"] = "not_priceable";
        run.artifact("infeasibility_certificate.json",
                     priceability_bundle(x, W, kind, *res.certificate).dump(2) + "\n");
        code = kPropertyFails;
    } else {
        result["decision"] = "undecided";
    }
    run.finish(result, code);
    std::cout << kind_name << ": " << result["decision"].get<std::string>() << "\n";
    return code;
}

int cmd_counterexample(int m, int k, const std::string& quota_name_, const std::string& kind_name,
                       const CommonOpts& opts) {
    Quota quota = quota_from_name(quota_name_);
    PriceKind kind = price_kind_from_name(kind_name);
    RunRecord run("counterexample", opts,
                  {{"m", m}, {"k", k}, {"quota", quota_name_}, {"kind", kind_name}});

    LinQipProgram prog = build_linqip(m, k, quota, kind);
    maybe_export(prog.model, opts, run);

    auto backend = make_backend(opts.solver);
    BackendConfig cfg = to_config(opts);

    if (!backend->supports_bilinear()) {
        // verification-only fallback: re-verify the bundled distributions
        for (const auto& x : counterexample_candidates(m, k, kind)) {
            if (!is_stable(x, prog.committee, k, quota)) continue;
            PriceCheckResult res = check_priceable(x, prog.committee, k, kind, *backend, cfg);
            if (res.decision != PriceDecision::not_priceable) continue;
            json result{{"decision", "counterexample"},
                        {"source", "bundled distribution, verified exactly"},
                        {"committee", candidate_set_to_json(prog.committee)}};
            run.artifact("counterexample_distribution.json",
                         distribution_to_json(x).dump(2) + "\n");
            run.artifact("infeasibility_certificate.json",
                         priceability_bundle(x, prog.committee, kind, *res.certificate).dump(2) + "\n");
            run.finish(result, kOk);
            std::cout << "counterexample found: " << quota_name_ << " core-stable committee "
                      << prog.committee.to_string() << " is not " << kind_name << " priceable\n";
            return kOk;
        }
        json result{{"decision", "undecided"},
                    {"message", "backend '" + backend->name() +
                                    "' cannot solve bilinear programs and no bundled "
                                    "distribution matches (m, k, kind); verification-only "
                                    "fallback exhausted"}};
        run.finish(result, kUndecided);
        std::cout << result["message"].get<std::string>() << "\n";
        return kUndecided;
    }

    SolveResult solved = backend->solve(prog.model, cfg);
    json result{{"status", solve_status_name(solved.status)}, {"message", solved.message}};
    if (solved.status != SolveStatus::optimal) {
        run.finish(result, kRuntimeError);
        return kRuntimeError;
    }
    result["objective"] = solved.objective;
    bool exists = quota == Quota::hare ? solved.objective < -cfg.tolerance
                                       : solved.objective <= cfg.tolerance;
    result["decision"] = exists ? "counterexample" : "none";
    run.finish(result, exists ? kOk : kPropertyFails);
    return exists ? kOk : kPropertyFails;
}

int cmd_render_proof(const std::string& bundle_path, const CommonOpts& opts) {
    json bundle = read_json(bundle_path);
    VoteDistribution x = distribution_from_json(bundle.at("instance"));
    CandidateSet W = candidate_set_from_json(bundle.at("committee"), x.m());
    PriceKind kind = price_kind_from_name(bundle.at("kind").get<std::string>());
    InfeasibilityCertificate cert = infeasibility_certificate_from_json(bundle.at("certificate"));

    RunRecord run("render-proof", opts, {{"certificate", bundle_path}});
    std::string proof;
    try {
        proof = render_proof(cert, x, W, kind);
    } catch (const std::exception& e) {
        run.finish(json{{"error", e.what()}}, kPropertyFails);
        std::cerr << e.what() << "\n";
        return kPropertyFails;
    }
    run.artifact("proof.txt", proof);
    run.finish(json{{"proof_lines", std::count(proof.begin(), proof.end(), '\n')}}, kOk);
    std::cout << proof;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact analysis of core stability and priceability for approval committees"};
    app.require_subcommand(1);

    CommonOpts opts;

    int m = 0, k = 0;
    std::string quota = "hare";
    double big_m = 3.0;
    auto* search = app.add_subcommand("search", "search for a least-core-maximizing vote distribution");
    search->add_option("m", m, "number of candidates")->required();
    search->add_option("k", k, "committee size")->required();
    search->add_option("--quota", quota, "hare or droop");
    search->add_option("--big-m", big_m, "big-M constant");
    add_common(search, opts);

    std::string instance, committee = "";
    auto* check = app.add_subcommand("check", "exact core-stability check of a committee");
    check->add_option("instance", instance, "distribution JSON file")->required();
    check->add_option("--committee", committee, "comma-separated candidate indices")->required();
    check->add_option("--quota", quota, "hare or droop");
    add_common(check, opts);

    std::string mode = "lower-bound", deviations_path, certificate_path;
    auto* certify = app.add_subcommand("certify", "construct or verify dual certificates");
    certify->add_option("m", m, "number of candidates")->required();
    certify->add_option("k", k, "committee size")->required();
    certify->add_option("--quota", quota, "hare or droop");
    certify->add_option("--mode", mode, "lower-bound, singleton, kplusone, or verify");
    certify->add_option("--deviations", deviations_path, "deviation function JSON file");
    certify->add_option("--certificate", certificate_path, "certificate JSON file (verify mode)");
    add_common(certify, opts);

    std::string kind = "weak";
    auto* price = app.add_subcommand("priceability", "check weak/lindahl/peters priceability");
    price->add_option("instance", instance, "distribution JSON file")->required();
    price->add_option("--committee", committee, "comma-separated candidate indices")->required();
    price->add_option("--kind", kind, "weak, lindahl, or peters");
    add_common(price, opts);

    auto* counter = app.add_subcommand("counterexample",
                                       "search (or verify) a core-stable non-priceable instance");
    counter->add_option("--m", m, "number of candidates")->required();
    counter->add_option("--k", k, "committee size")->required();
    counter->add_option("--quota", quota, "hare or droop");
    counter->add_option("--kind", kind, "weak or lindahl");
    add_common(counter, opts);

    std::string bundle_path;
    auto* render = app.add_subcommand("render-proof", "render a contradiction proof from a certificate");
    render->add_option("certificate", bundle_path, "bundled certificate JSON file")->required();
    add_common(render, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (search->parsed()) return cmd_search(m, k, quota, big_m, opts);
        if (check->parsed()) return cmd_check(instance, committee, quota, opts);
        if (certify->parsed())
            return cmd_certify(m, k, quota, mode, deviations_path, certificate_path, opts);
        if (price->parsed()) return cmd_priceability(instance, committee, kind, opts);
        if (counter->parsed()) return cmd_counterexample(m, k, quota, kind, opts);
        if (render->parsed()) return cmd_render_proof(bundle_path, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}
