// sigmak: batch front end. Every run writes one metadata record, then one
// or more tables, as CSV or JSON lines.
#include "sigmak/sigmak.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace sigmak;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Exit status for a run whose computation finished but failed a check.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, bool, u64, long, double, std::string, ordered_json>;

Cell big(const BigInt& v) { return v.str(); }
Cell opt(const std::optional<bool>& b) { return b ? Cell{*b} : Cell{}; }
Cell opt(const std::optional<double>& d) { return d ? Cell{*d} : Cell{}; }

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_cell(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(u64 v) const { return std::to_string(v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return fmt_double(v); }
        std::string operator()(const std::string& s) const { return csv_quote(s); }
        std::string operator()(const ordered_json& j) const { return csv_quote(j.dump()); }
    } visit;
    return std::visit(visit, c);
}

ordered_json json_cell(const Cell& c) {
    struct {
        ordered_json operator()(std::monostate) const { return nullptr; }
        ordered_json operator()(bool b) const { return b; }
        ordered_json operator()(u64 v) const { return v; }
        ordered_json operator()(long v) const { return v; }
        ordered_json operator()(double v) const { return v; }
        ordered_json operator()(const std::string& s) const { return s; }
        ordered_json operator()(const ordered_json& j) const { return j; }
    } visit;
    return std::visit(visit, c);
}

class Emitter {
public:
    Emitter(std::ostream& os, bool jsonl) : os_(os), jsonl_(jsonl) {}

    void meta(const ordered_json& m) {
        if (jsonl_) {
            ordered_json line{{"type", "meta"}};
            for (const auto& [k, v] : m.items()) line[k] = v;
            os_ << line.dump() << '\n';
        } else {
            os_ << "# sigmak";
            for (const auto& [k, v] : m.items()) {
                if (k == "flags") {
                    for (const auto& [fk, fv] : v.items()) os_ << ' ' << fk << '=' << fv.get<std::string>();
                } else {
                    os_ << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
                }
            }
            os_ << '\n';
        }
    }

    void table(const std::string& name, const std::vector<std::string>& columns) {
        name_ = name;
        columns_ = columns;
        if (jsonl_) return;
        os_ << "# table=" << name << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
        os_ << '\n';
    }

    void row(const std::vector<Cell>& cells) {
        if (cells.size() != columns_.size()) throw std::logic_error("row width mismatch in " + name_);
        if (jsonl_) {
            ordered_json line{{"type", name_}};
            for (std::size_t i = 0; i < cells.size(); ++i) line[columns_[i]] = json_cell(cells[i]);
            os_ << line.dump() << '\n';
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_cell(cells[i]);
            os_ << '\n';
        }
    }

private:
    std::ostream& os_;
    bool jsonl_;
    std::string name_;
    std::vector<std::string> columns_;
};

Threads parse_threads(const std::string& s) {
    if (s == "auto") return Threads::automatic();
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || v == 0 || v > 4096) throw PreconditionError("--threads must be 'auto' or a positive integer");
    return Threads{static_cast<unsigned>(v)};
}

std::vector<u64> parse_u64_list(const std::string& s) {
    std::vector<u64> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        u64 v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size()) throw PreconditionError("bad integer list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// Flat key=value file merged under the command line: keys absent from
/// argv are appended as --key value (true/false for switches).
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot read config file " + path);
    auto present = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> extra;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw PreconditionError("config line without '=': " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "config" || present(key)) continue;
        if (value == "true") extra.push_back("--" + key);
        else if (value != "false") {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

std::string option_value(const CLI::Option* o) {
    if (o->get_type_size() == 0) return o->count() ? "true" : "false";
    if (o->count() == 0) return o->get_default_str();
    std::string out;
    for (const auto& r : o->results()) out += (out.empty() ? "" : ",") + r;
    return out;
}

ordered_json flag_set(const CLI::App& app, const CLI::App& sub) {
    std::map<std::string, std::string> flags;
    for (const CLI::App* a : {&app, &sub})
        for (const CLI::Option* o : a->get_options()) {
            if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
            flags[o->get_lnames()[0]] = option_value(o);
        }
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : flags) j[k] = v;
    return j;
}

struct Globals {
    u64 seed = 0;
    std::string threads = "auto";
    std::string format = "csv";
    std::string output;
    std::string config;
    bool timestamp = false;
};

struct Options {
    // search / density
    u64 k = 2;
    u64 limit = 0;
    bool annotate = false;
    std::string points;
    // error-sets / model / period-check
    u64 x = 0;
    u64 y = 0;
    unsigned r = 0;
    double eps = 0.0;
    bool verify_inclusion = false;
    bool exact = false;
    u64 mc = 0;
    std::string ls = "0.01,0.05,0.1";
    // classify
    u64 n = 0;
    // schinzel
    u64 x_limit = 0;
    // schedule
    double log_x = 0.0;
    // primes
    u64 theta_check = 0;
    u64 mertens = 0;
};

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size() || !(v > 0)) throw PreconditionError("bad L entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

const std::vector<std::string> kVerdictColumns{"n",       "k",         "sigma",     "zumkeller",  "k_layered",
                                               "practical", "abundant", "perfect",   "k_perfect", "semiperfect",
                                               "search_status"};

std::vector<Cell> verdict_cells(const ClassifierVerdict& v) {
    return {v.n,
            v.k,
            big(v.sigma),
            opt(v.flags.zumkeller),
            opt(v.flags.k_layered),
            v.flags.practical,
            v.flags.abundant,
            v.flags.perfect,
            v.flags.k_perfect,
            opt(v.flags.semiperfect),
            std::string(v.search_status == SearchStatus::decided ? "decided" : "timeout")};
}

void run_search(Emitter& out, const Options& o, Threads threads) {
    SearchConfig cfg;
    cfg.threads = threads;
    const auto records = search(o.k, o.limit, cfg);
    std::vector<std::string> cols{"n", "k", "sigma_n", "sigma_n1"};
    if (o.annotate) {
        cols.insert(cols.end(), {"n1_sigma", "zumkeller", "k_layered", "practical", "abundant", "perfect",
                                 "k_perfect", "semiperfect", "search_status", "k_divides_sigma"});
    }
    out.table("solution", cols);
    std::vector<AnnotatedSolution> ann;
    if (o.annotate) ann = annotate_solutions(records);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::vector<Cell> row{r.n, r.k, r.sigma_n, r.sigma_n1};
        if (o.annotate) {
            auto v = verdict_cells(ann[i].n1);
            row.insert(row.end(), v.begin() + 2, v.end());
            row.push_back(ann[i].k_divides_sigma);
        }
        out.row(row);
    }
    // published lists are complete up to their last entry
    const auto pub = published_solutions(o.k);
    if (!pub.empty()) {
        std::vector<u64> expect, got;
        const u64 top = std::min(o.limit, pub.back());
        for (u64 n : pub)
            if (n <= top) expect.push_back(n);
        for (const auto& r : records)
            if (r.n <= top) got.push_back(r.n);
        if (expect != got) {
            std::string msg = "solution list differs from the published list up to " + std::to_string(top) + ":";
            // each discrepancy is re-examined by direct factorisation
            auto is_solution = [&](u64 n) {
                return sigma(factorize(n + 1)) == BigInt(o.k) * sigma(factorize(n));
            };
            for (u64 n : got)
                if (!std::binary_search(expect.begin(), expect.end(), n))
                    msg += " unlisted " + std::to_string(n) + (is_solution(n) ? " (confirmed)" : " (not a solution)");
            for (u64 n : expect)
                if (!std::binary_search(got.begin(), got.end(), n))
                    msg += " missing " + std::to_string(n) + (is_solution(n) ? " (is a solution)" : " (not a solution)");
            throw VerificationFailure(msg);
        }
    }
}

void run_density(Emitter& out, const Options& o, Threads threads) {
    SearchConfig cfg;
    cfg.threads = threads;
    const auto xs = parse_u64_list(o.points);
    out.table("density_point", {"x", "count", "ratio", "bound"});
    for (const auto& p : count_series(o.k, xs, cfg)) out.row({p.x, p.count, p.ratio, opt(p.bound)});
}

void run_error_sets(Emitter& out, const Options& o, Threads threads) {
    const TruncationParams params(o.y, o.r, o.eps);
    ErrorSetConfig cfg;
    cfg.threads = threads;
    const auto rep = error_sets(o.x, params, o.k, cfg);
    out.table("error_set_report", {"x", "k", "y", "r", "eps", "e0", "e1", "e2", "s", "union_all", "e0_bound",
                                   "e1_bound_shape", "e2_bound_shape", "e2_union_bound", "s_model"});
    const auto& c = rep.counts;
    const auto& b = rep.bounds;
    out.row({rep.x, rep.k, rep.y, static_cast<u64>(rep.r), rep.eps, c.e0, c.e1, c.e2, c.s, c.union_all, b.e0_bound,
             b.e1_bound_shape, b.e2_bound_shape, b.e2_union_bound, opt(b.s_model)});
    std::string failure;
    if (static_cast<double>(c.e0) > std::ceil(b.e0_bound)) failure += " #E0 above ceil(1/eps);";
    if (static_cast<double>(c.e2) > b.e2_union_bound) failure += " #E2 above its union bound;";
    if (o.verify_inclusion) {
        const auto inc = verify_inclusion(o.x, params, o.k, cfg);
        out.table("membership", {"n", "e0", "e1", "e2", "s", "covered"});
        for (const auto& m : inc.members) out.row({m.n, m.e0, m.e1, m.e2, m.s, m.covered()});
        out.table("inclusion_report", {"solutions", "covered", "violations"});
        out.row({inc.solutions, inc.covered, static_cast<u64>(inc.violations.size())});
        for (u64 n : inc.violations) failure += " solution " + std::to_string(n) + " outside every error set;";
    }
    if (!failure.empty()) throw VerificationFailure("error-sets:" + failure);
}

void run_model(Emitter& out, const Options& o, const Globals& g, Threads threads) {
    if (o.exact && o.mc) throw PreconditionError("--exact and --mc are mutually exclusive");
    const bool petrov = o.eps > 0.0;
    const TruncationParams params(o.y, o.r, petrov ? o.eps : 0.1);
    ModelConfig mcfg;
    mcfg.threads = threads;
    McConfig ccfg;
    ccfg.threads = threads;
    bool exact = o.exact;
    if (!o.exact && !o.mc) exact = atom_count_product(params.small_primes(), params.r()) <= mcfg.exact_budget;
    const u64 samples = o.mc ? o.mc : 1'000'000;
    const Pmf w = exact ? w_pmf_exact(params, {}, mcfg) : w_pmf_mc(params, samples, g.seed, {}, ccfg);
    const double eps_stat = exact ? 0.0 : dkw_epsilon(samples);

    out.table("pmf_atom", {"num", "den", "log_value", "prob_num", "prob_den"});
    for (const auto& [v, p] : w.atoms()) {
        const auto j = atom_json(v, p);
        out.row({j["num"].get<std::string>(), j["den"].get<std::string>(), v.value(), j["prob_num"].get<std::string>(),
                 j["prob_den"].get<std::string>()});
    }
    out.table("concentration", {"L", "q", "witness_a", "exact", "eps_stat"});
    for (double L : parse_double_list(o.ls)) {
        const auto q = q_concentration(w, L);
        out.row({L, q.q, q.witness_a, exact, eps_stat});
    }
    out.table("lemma_check", {"p", "r", "L", "holds"});
    bool lemma_ok = true;
    for (u64 p : primes_up_to(o.y)) {
        if (p < 5) continue;
        const double L = 0.9 * ell(p, 1).value();
        const bool holds = lemma32_check(p, o.r, L);
        lemma_ok = lemma_ok && holds;
        out.row({p, static_cast<u64>(o.r), L, holds});
    }
    if (petrov) {
        PetrovConfig pcfg;
        pcfg.mode = exact ? ModelMode::exact : ModelMode::monte_carlo;
        pcfg.samples = samples;
        pcfg.seed = g.seed;
        pcfg.model = mcfg;
        pcfg.mc = ccfg;
        const auto rep = petrov_eval(params, o.k, pcfg);
        std::string primes;
        for (u64 p : rep.effective_primes) primes += (primes.empty() ? "" : " ") + std::to_string(p);
        out.table("petrov_report", {"eps", "L", "k", "effective_primes", "exact", "samples", "eps_stat",
                                    "target_probability", "q_measured", "rhs_core", "implied_A", "mertens_ratio"});
        out.row({rep.eps, rep.L, rep.k, primes, rep.exact, rep.samples, rep.eps_stat, rep.target_probability,
                 rep.q_measured, rep.rhs_core, rep.implied_A, rep.mertens_ratio});
    }
    if (!lemma_ok) throw VerificationFailure("concentration lemma failed on the grid");
}

void run_period_check(Emitter& out, const Options& o, Threads threads) {
    const TruncationParams params(o.y, o.r, 0.1);
    ModelConfig cfg;
    cfg.threads = threads;
    const auto rep = period_model_equivalence(params, cfg);
    out.table("period_equivalence", {"y", "r", "period", "match", "period_atoms", "model_atoms"});
    out.row({o.y, static_cast<u64>(o.r), big(rep.period), rep.match, static_cast<u64>(rep.period_pmf.size()),
             static_cast<u64>(rep.model_pmf.size())});
    if (!rep.match) throw VerificationFailure("period distribution differs from the convolution model");
}

void run_classify(Emitter& out, const Options& o) {
    if (o.n < 1) throw PreconditionError("--n must be positive");
    const auto v = is_k_layered(o.n, o.k);
    auto cols = kVerdictColumns;
    cols.push_back("certificate");
    out.table("classifier_verdict", cols);
    auto row = verdict_cells(v);
    row.push_back(v.certificate ? Cell{certificate_json(*v.certificate)} : Cell{});
    out.row(row);
    if (v.certificate && !verify_certificate(*v.certificate))
        throw VerificationFailure("partition certificate failed re-verification");
}

void run_schinzel(Emitter& out, const Options& o, Threads threads) {
    const auto id = identity_check();
    auto poly_str = [](const Poly& p) {
        std::string s;
        for (std::size_t i = p.size(); i-- > 0;) s += (s.empty() ? "" : " ") + p[i].str();
        return s;
    };
    out.table("identity", {"left", "right", "ok"});
    out.row({poly_str(id.left), poly_str(id.right), id.ok});
    const auto hits = family_search(o.x_limit, threads);
    out.table("family_hit", {"x", "p1", "p2", "q1", "q2", "n", "sigma_n", "sigma_n1", "verified", "direct_checked"});
    bool all_ok = id.ok;
    for (const auto& h : hits) {
        out.row({h.x, h.primes[0], h.primes[1], h.primes[2], h.primes[3], big(h.n), big(h.sigma_n), big(h.sigma_n1),
                 h.verified, h.direct_checked});
        all_ok = all_ok && h.verified;
    }
    const auto forms = family_forms();
    const auto fd = fixed_divisor_check(forms);
    auto join = [](const std::vector<u64>& v) {
        std::string s;
        for (u64 x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
        return s;
    };
    out.table("fixed_divisor_report",
              {"candidate_primes", "fixed_divisors", "p1", "p2", "gcd_P1_P2", "printed_p1", "printed_p2"});
    out.row({join(fd.candidate_primes), join(fd.fixed_divisors), big(fd.p1), big(fd.p2), big(fd.gcd_P1_P2),
             std::string("4550025"), std::string("25459480")});
    if (!all_ok) throw VerificationFailure("family identity or a hit failed verification");
}

void run_schedule(Emitter& out, const Options& o) {
    if (o.x && o.log_x > 0) throw PreconditionError("give --x or --log-x, not both");
    if (!o.x && !(o.log_x > 0)) throw PreconditionError("schedule needs --x or --log-x");
    const auto s = o.x ? schedule(o.x) : schedule_from_log(o.log_x);
    out.table("schedule", {"x", "log_x", "r", "y", "eps", "clamped", "raw_r", "raw_y"});
    out.row({s.x ? Cell{s.x} : Cell{}, s.log_x, s.r, s.y, s.eps, s.clamped, s.raw_r, s.raw_y});
}

void run_primes(Emitter& out, const Options& o) {
    if (!o.theta_check == !o.mertens) throw PreconditionError("primes needs exactly one of --theta-check, --mertens");
    if (o.theta_check) {
        const auto t = theta_check(o.theta_check);
        const auto first = theta_first_failure(o.theta_check);
        out.table("theta_report", {"x", "theta", "bound", "ok", "first_failure"});
        out.row({t.x, t.theta, t.bound, t.ok && !first, first ? Cell{*first} : Cell{}});
        if (!t.ok || first) throw VerificationFailure("theta(x) < 1.02 x failed");
    } else {
        const auto m = mertens_report(o.mertens);
        out.table("mertens_report", {"x", "sum", "loglog", "delta"});
        out.row({m.x, m.sum, m.loglog, m.delta});
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma(n+1) = k sigma(n): search, error sets, probability model, classifiers"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("sigmak ") + kVersion);

    Globals g;
    Options o;
    app.add_option("--seed", g.seed, "seed for Monte Carlo sampling");
    app.add_option("--threads", g.threads, "worker threads: auto or a positive integer");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--output", g.output, "write data to PATH instead of stdout");
    app.add_option("--config", g.config, "flat key=value file; flags on the command line win");
    app.add_flag("--timestamp", g.timestamp, "add the wall-clock time to the metadata record");

    auto* search_cmd = app.add_subcommand("search", "solutions of sigma(n+1) = k sigma(n) for n <= limit");
    search_cmd->add_option("--k", o.k)->required()->check(CLI::Range(u64{1}, u64{1'000'000}));
    search_cmd->add_option("--limit", o.limit)->required();
    search_cmd->add_flag("--annotate", o.annotate, "classify n+1 for every solution");

    auto* density_cmd = app.add_subcommand("density", "counts A_k(x) at the given points");
    density_cmd->add_option("--k", o.k)->required();
    density_cmd->add_option("--points", o.points, "ascending comma-separated x values")->required();

    auto* err_cmd = app.add_subcommand("error-sets", "sizes of E0, E1, E2, S up to x");
    err_cmd->add_option("--x", o.x)->required();
    err_cmd->add_option("--y", o.y)->required();
    err_cmd->add_option("--r", o.r)->required();
    err_cmd->add_option("--eps", o.eps)->required();
    err_cmd->add_option("--k", o.k)->required();
    err_cmd->add_flag("--verify-inclusion", o.verify_inclusion, "check every solution lies in the union");

    auto* model_cmd = app.add_subcommand("model", "distribution of W_{y,r} and its concentration");
    model_cmd->add_option("--y", o.y)->required();
    model_cmd->add_option("--r", o.r)->required();
    model_cmd->add_flag("--exact", o.exact, "force exact convolution");
    model_cmd->add_option("--mc", o.mc, "Monte Carlo with this many samples");
    model_cmd->add_option("--eps", o.eps, "epsilon for the Petrov report");
    model_cmd->add_option("--k", o.k, "target k for the Petrov report");
    model_cmd->add_option("--L", o.ls, "comma-separated window lengths for Q_L");

    auto* period_cmd = app.add_subcommand("period-check", "full-period distribution of D against the model");
    period_cmd->add_option("--y", o.y)->required();
    period_cmd->add_option("--r", o.r)->required();

    auto* classify_cmd = app.add_subcommand("classify", "divisor classifiers for n");
    classify_cmd->add_option("--n", o.n)->required();
    classify_cmd->add_option("--k", o.k)->check(CLI::Range(u64{2}, u64{1'000'000}));

    auto* schinzel_cmd = app.add_subcommand("schinzel", "prime quadruples of the k = 2 family");
    schinzel_cmd->add_option("--x-limit", o.x_limit)->required();

    auto* schedule_cmd = app.add_subcommand("schedule", "parameter schedule r(x), y(x), eps(x)");
    schedule_cmd->add_option("--x", o.x);
    schedule_cmd->add_option("--log-x", o.log_x, "natural log of x, for x beyond 64 bits");

    auto* primes_cmd = app.add_subcommand("primes", "Chebyshev and Mertens checks");
    primes_cmd->add_option("--theta-check", o.theta_check);
    primes_cmd->add_option("--mertens", o.mertens);

    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        args = merge_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, std::cerr, std::cerr);
        return rc == 0 ? 0 : 2;
    } catch (const PreconditionError& e) {
        std::cerr << "sigmak: " << e.what() << '\n';
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!g.output.empty()) {
        file.open(g.output, std::ios::binary);
        if (!file) {
            std::cerr << "sigmak: cannot open " << g.output << " for writing\n";
            return 2;
        }
        os = &file;
    }
    try {
        const Threads threads = parse_threads(g.threads);
        Emitter out(*os, g.format == "jsonl");
        ordered_json meta;
        meta["tool"] = "sigmak";
        meta["version"] = kVersion;
        meta["command"] = sub->get_name();
        meta["seed"] = g.seed;
        meta["flags"] = flag_set(app, *sub);
        if (g.timestamp) {
            const auto now = std::chrono::system_clock::now().time_since_epoch();
            meta["unix_time"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
        }
        out.meta(meta);

        const std::string name = sub->get_name();
        if (name == "search") run_search(out, o, threads);
        else if (name == "density") run_density(out, o, threads);
        else if (name == "error-sets") run_error_sets(out, o, threads);
        else if (name == "model") run_model(out, o, g, threads);
        else if (name == "period-check") run_period_check(out, o, threads);
        else if (name == "classify") run_classify(out, o);
        else if (name == "schinzel") run_schinzel(out, o, threads);
        else if (name == "schedule") run_schedule(out, o);
        else if (name == "primes") run_primes(out, o);
        os->flush();
    } catch (const VerificationFailure& e) {
        os->flush();
        std::cerr << "sigmak: verification failed: " << e.what() << '\n';
        return 1;
    } catch (const BudgetError& e) {
        std::cerr << "sigmak: budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "sigmak: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sigmak: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
