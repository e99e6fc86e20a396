#include "dpsi/cli.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "dpsi/adversary.hpp"
#include "dpsi/metrics.hpp"
#include "dpsi/protocol.hpp"

namespace dpsi {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string prime = "2305843009213693951";
    std::size_t c = 50;
    std::size_t d = 10;
    std::optional<std::size_t> bins;
    double fail_prob = kDefaultFailProb;
    std::string scheme = "improved";
    std::string seed;
    bool dump_secrets = false;
};

void add_setup_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--prime", o.prime, "Field modulus (decimal, prime, below 2^63)")->capture_default_str();
    cmd->add_option("--cardinality,-c", o.c, "Maximum set size c")->capture_default_str();
    cmd->add_option("--bin-capacity,-d", o.d, "Bin capacity d")->capture_default_str();
    cmd->add_option("--bins", o.bins, "Force the number of bins h");
    cmd->add_option("--fail-prob", o.fail_prob, "Target bin overflow probability when h is derived");
}

void add_seed_option(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seed, "Session root key, 32 hex digits (random and printed when omitted)");
}

void add_scheme_option(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--scheme", o.scheme, "Protocol variant")->check(CLI::IsMember({"eo", "improved"}))->capture_default_str();
}

SetupConfig make_setup(const CommonOptions& o) {
    SetupConfig cfg;
    cfg.prime = PrimeField::from_decimal(o.prime).modulus();
    cfg.c = o.c;
    cfg.d = o.d;
    cfg.bins = o.bins;
    cfg.fail_prob = o.fail_prob;
    return cfg;
}

Key resolve_seed(const CommonOptions& o, std::ostream& err) {
    if (!o.seed.empty()) return Key::from_hex(o.seed);
    std::random_device rd;
    Key::Bytes b;
    for (auto& x : b) x = static_cast<std::uint8_t>(rd());
    Key k(b);
    err << "seed: " << k.hex() << '\n';
    return k;
}

void print_set(std::ostream& out, std::span<const u64> values) {
    for (u64 v : values) out << v << '\n';
}

void emit_set(const std::string& path, std::ostream& out, std::span<const u64> values) {
    if (path.empty()) {
        print_set(out, values);
        return;
    }
    std::ostringstream s;
    print_set(s, values);
    auto text = s.str();
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void dump_keys(std::ostream& err, const SessionKeys& k) {
    err << "mk_A: " << k.mk_a.hex() << "\nmk_B: " << k.mk_b.hex() << "\ntk/tk1: " << k.tk.hex() << "\ntk2: " << k.tk2.hex()
        << '\n';
}

nlohmann::json counters_json(const OpCounters& c) {
    nlohmann::json j = nlohmann::json::object();
    for (Party p : {Party::A, Party::B, Party::C}) {
        for (Phase ph : {Phase::setup, Phase::outsource, Phase::online}) {
            auto cell = [](const Tally& t) {
                return nlohmann::json{{"adds", t.adds},
                                      {"muls", t.muls},
                                      {"invs", t.invs},
                                      {"interpolations", t.interpolations},
                                      {"factorizations", t.factorizations}};
            };
            j[std::string(to_string(p))][std::string(to_string(ph))] = {{"table", cell(c.table(p, ph))},
                                                                         {"nested", cell(c.nested(p, ph))}};
        }
    }
    return j;
}

std::vector<LabeledKey> labeled_keys(const SessionKeys& k) {
    return {{"mk_A", k.mk_a}, {"mk_B", k.mk_b}, {"tk", k.tk}, {"tk2", k.tk2}};
}

// File-based step pipeline. Every message lives in its own file; the
// transcript is rebuilt from the files present after each step.
struct StepFiles {
    fs::path dir;

    fs::path params() const { return dir / "params.bin"; }
    fs::path session() const { return dir / "session.json"; }
    fs::path outsource(Party p) const { return dir / ("outsource_" + std::string(to_string(p)) + ".msg"); }
    fs::path start() const { return dir / "start.msg"; }
    fs::path q_to_b() const { return dir / "q_to_b.msg"; }
    fs::path delegation() const { return dir / "delegation.msg"; }
    fs::path result() const { return dir / "result.msg"; }
    fs::path transcript() const { return dir / "transcript.bin"; }

    std::vector<fs::path> flow_order() const {
        return {outsource(Party::A), outsource(Party::B), start(), q_to_b(), delegation(), result()};
    }
};

std::vector<std::uint8_t> require_file(const fs::path& path, std::string_view what) {
    if (!fs::exists(path)) throw IoError("missing " + std::string(what) + ": " + path.string());
    return read_file(path);
}

void write_message(const fs::path& path, const Message& m, const PrimeField& field) {
    write_file(path, encode_message(m, field));
}

Message read_message(const fs::path& path, std::string_view what, const PrimeField& field) {
    return decode_message(require_file(path, what), field);
}

void rebuild_transcript(const StepFiles& files, const PublicParams& params) {
    Transcript t;
    for (const auto& path : files.flow_order())
        if (fs::exists(path)) t.append_bytes(read_file(path), params.field);
    write_file(files.transcript(), encode_transcript_file(params, t));
}

struct StepContext {
    StepFiles files;
    PublicParams params;
    Scheme scheme;
    SessionKeys keys;
};

StepContext load_step_context(const std::string& store_dir, const CommonOptions& o, bool scheme_given) {
    StepContext ctx{StepFiles{store_dir}, {}, Scheme::improved, {}};
    ctx.params = decode_params(require_file(ctx.files.params(), "public parameters (run 'step setup' first)"));
    auto session = nlohmann::json::parse(std::string(
        [&] {
            auto b = require_file(ctx.files.session(), "session file");
            return std::string(b.begin(), b.end());
        }()));
    ctx.scheme = parse_scheme(session.at("scheme").get<std::string>());
    if (scheme_given && parse_scheme(o.scheme) != ctx.scheme)
        throw ConfigError("--scheme " + o.scheme + " does not match the scheme chosen at setup (" +
                          std::string(to_string(ctx.scheme)) + ")");
    if (o.seed.empty()) throw ConfigError("--seed is required for protocol steps");
    ctx.keys = SessionKeys::derive(Key::from_hex(o.seed));
    return ctx;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const ProtocolError*>(&e) || dynamic_cast<const OverflowError*>(&e) ||
        dynamic_cast<const DomainError*>(&e))
        return kExitProtocol;
    return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delegated private set intersection over a cloud: sessions, attacks and benchmarks", "dpsi"};
    app.require_subcommand(1);

    CommonOptions o;

    // run
    auto* run = app.add_subcommand("run", "Run one full session and print the intersection");
    std::string set_a_path, set_b_path, transcript_path, out_path, counters_path;
    run->add_option("set_a", set_a_path, "Set file of client A")->required();
    run->add_option("set_b", set_b_path, "Set file of client B")->required();
    add_setup_options(run, o);
    add_scheme_option(run, o);
    add_seed_option(run, o);
    run->add_option("--transcript", transcript_path, "Write the transcript file here");
    run->add_option("--out", out_path, "Write the intersection here instead of stdout");
    run->add_option("--counters", counters_path, "Write operation counters as JSON here");
    run->add_flag("--dump-secrets", o.dump_secrets, "Print session keys to stderr (debugging only)");

    // attack
    auto* attack = app.add_subcommand("attack", "Replay passive attacks against a transcript file");
    std::string attack_file, channels = "all", truth_a, truth_b;
    attack->add_option("transcript", attack_file, "Transcript file")->required();
    attack->add_option("--channels", channels, "Tapped channels: all, or a list such as A>B,B>A")->capture_default_str();
    attack->add_option("--seed", o.seed, "Session root key; enables the key-material scan");
    attack->add_option("--set-a", truth_a, "Actual set of A, to fill matched_truth");
    attack->add_option("--set-b", truth_b, "Actual set of B, to fill matched_truth");

    // bench
    auto* bench = app.add_subcommand("bench", "Sweep set sizes and compare operation counts with the closed forms");
    std::vector<std::size_t> c_list{64, 128, 256, 512, 1024};
    std::string bench_out = "bench.csv";
    std::size_t trials = 1;
    bool no_timing = false;
    std::string bench_scheme = "both";
    bench->add_option("--c-list", c_list, "Cardinalities to sweep")->delimiter(',')->capture_default_str();
    bench->add_option("--bin-capacity,-d", o.d, "Bin capacity d")->capture_default_str();
    bench->add_option("--trials", trials, "Sessions per (scheme, c)")->capture_default_str();
    bench->add_option("--out", bench_out, "CSV output path")->capture_default_str();
    bench->add_option("--scheme", bench_scheme, "eo, improved or both")
        ->check(CLI::IsMember({"eo", "improved", "both"}))
        ->capture_default_str();
    bench->add_option("--bins", o.bins, "Force the number of bins h");
    bench->add_flag("--no-timing", no_timing, "Write ms = 0 so the CSV is reproducible");
    add_seed_option(bench, o);

    // step
    auto* step = app.add_subcommand("step", "Run one protocol step against files in a store directory");
    step->require_subcommand(1);
    std::string store_dir = "dpsi-store";
    std::string party = "A", set_path, step_out;
    auto* st_setup = step->add_subcommand("setup", "Cloud setup: publish parameters");
    auto* st_out = step->add_subcommand("outsource", "Client outsourcing of one party's set");
    auto* st_del = step->add_subcommand("delegate", "Client B starts, client A delegates");
    auto* st_cloud = step->add_subcommand("cloud", "Cloud computation");
    auto* st_ret = step->add_subcommand("retrieve", "Client B retrieves the intersection");
    for (auto* s : {st_setup, st_out, st_del, st_cloud, st_ret}) {
        s->add_option("--store-dir", store_dir, "Directory holding parameters, messages and the cloud store")
            ->capture_default_str();
        add_seed_option(s, o);
        add_scheme_option(s, o);
    }
    add_setup_options(st_setup, o);
    st_out->add_option("--party", party, "A or B")->check(CLI::IsMember({"A", "B"}))->capture_default_str();
    st_out->add_option("set", set_path, "Set file of that party")->required();
    st_ret->add_option("set", set_path, "Set file of client B")->required();
    st_ret->add_option("--out", step_out, "Write the intersection here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            auto set_a = read_set_file(set_a_path);
            auto set_b = read_set_file(set_b_path);
            SetupConfig cfg = make_setup(o);
            Key root = resolve_seed(o, err);
            auto outcome = run_session(parse_scheme(o.scheme), set_a, set_b, root, cfg);
            if (o.dump_secrets) dump_keys(err, outcome.keys);
            if (!transcript_path.empty())
                write_file(transcript_path, encode_transcript_file(outcome.params, outcome.transcript));
            if (!counters_path.empty()) {
                auto text = counters_json(outcome.counters).dump(2) + "\n";
                write_file(counters_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
            }
            emit_set(out_path, out, outcome.intersection);
            return kExitOk;
        }

        if (*attack) {
            auto bytes = read_file(attack_file);
            auto [params, transcript] = decode_transcript_file(bytes);
            auto view = EavesdropperView::capture(params, transcript, parse_channels(channels));
            auto reports = run_all_attacks(view);
            if (!truth_a.empty() || !truth_b.empty()) {
                std::optional<std::vector<u64>> a, b;
                if (!truth_a.empty()) a = read_set_file(truth_a);
                if (!truth_b.empty()) b = read_set_file(truth_b);
                auto sorted = [](std::vector<u64> v) {
                    std::sort(v.begin(), v.end());
                    return v;
                };
                for (auto& r : reports) {
                    if (!r.applicable) continue;
                    std::optional<std::vector<u64>> truth;
                    if ((r.attack == kAttackUnblindA || r.attack == kAnalysisQPrime) && a) truth = sorted(*a);
                    if (r.attack == kAttackKeyLeak && b) truth = sorted(*b);
                    if (r.attack == kAttackSubtract && a && b) {
                        std::vector<u64> both;
                        auto sa = sorted(*a), sb = sorted(*b);
                        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
                        truth = both;
                    }
                    if (truth) r.matched_truth = r.recovered == *truth;
                }
            }
            for (const auto& r : reports) out << r.to_json().dump() << '\n';
            nlohmann::json scan{{"attack", "key_scan"}, {"channels", view.channels.str()}};
            if (o.seed.empty()) {
                scan["applicable"] = false;
                scan["detail"] = "pass --seed to scan for the session keys";
            } else {
                Transcript tapped;
                for (const auto& e : view.messages) tapped.append_bytes(e.bytes, params.field);
                auto keys = labeled_keys(SessionKeys::derive(Key::from_hex(o.seed)));
                nlohmann::json hits = nlohmann::json::array();
                for (const auto& h : scan_key_material(tapped, keys))
                    hits.push_back({{"message", tapped.entries()[h.index].seq}, {"key", h.label}});
                scan["applicable"] = true;
                scan["hits"] = hits;
            }
            out << scan.dump() << '\n';
            return kExitOk;
        }

        if (*bench) {
            if (c_list.empty()) throw ConfigError("--c-list must name at least one cardinality");
            BenchConfig cfg;
            cfg.c_values = c_list;
            cfg.d = o.d;
            cfg.trials = trials;
            cfg.timing = !no_timing;
            cfg.seed = resolve_seed(o, err);
            cfg.bins = o.bins;
            std::vector<Scheme> schemes;
            if (bench_scheme == "both") schemes = {Scheme::eo, Scheme::improved};
            else schemes = {parse_scheme(bench_scheme)};
            auto result = bench_sweep(schemes, cfg);
            std::ostringstream csv;
            write_bench_csv(csv, result.rows);
            auto text = csv.str();
            write_file(bench_out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
            for (Scheme s : schemes) {
                for (const auto& pt : sweep_totals(result.rows, s))
                    out << to_string(s) << " c=" << pt.c << " online_muls=" << static_cast<u64>(pt.total_muls)
                        << " bytes=" << static_cast<u64>(pt.total_bytes) << '\n';
            }
            out << result.conformance.str() << '\n';
            out << "csv: " << bench_out << '\n';
            return result.conformance.exact() ? kExitOk : kExitProtocol;
        }

        if (*step) {
            const bool scheme_given = step->get_subcommands().front()->count("--scheme") > 0;
            if (*st_setup) {
                if (o.seed.empty()) throw ConfigError("--seed is required for protocol steps");
                SetupConfig cfg = make_setup(o);
                auto keys = SessionKeys::derive(Key::from_hex(o.seed));
                cfg.xs_seed = keys.xs_seed;
                Scheme scheme = parse_scheme(o.scheme);
                auto params = cloud_setup(cfg);
                StepFiles files{store_dir};
                fs::create_directories(files.dir);
                for (const auto& p : files.flow_order()) fs::remove(p);
                for (Party p : {Party::A, Party::B}) fs::remove(CloudStore::file_for(files.dir, p));
                write_file(files.params(), encode_params(params));
                auto text = nlohmann::json{{"scheme", to_string(scheme)}}.dump() + "\n";
                write_file(files.session(), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
                rebuild_transcript(files, params);
                out << "h=" << params.h() << " d=" << params.d() << " n=" << params.n() << '\n';
                return kExitOk;
            }

            auto ctx = load_step_context(store_dir, o, scheme_given);
            const auto& params = ctx.params;
            const auto& k = ctx.keys;
            OpCounters counters;

            if (*st_out) {
                Party who = party == "A" ? Party::A : Party::B;
                auto set = read_set_file(set_path);
                auto result = client_outsource(who, set, who == Party::A ? k.mk_a : k.mk_b, params, ctx.scheme,
                                               who == Party::A ? k.pad_a : k.pad_b, counters);
                write_message(ctx.files.outsource(who), result.message, params.field);
                CloudStore store = CloudStore::load(ctx.files.dir, params.field);
                store.put(who, std::get<Outsource>(result.message.payload).o);
                store.save(ctx.files.dir, params.field);
                rebuild_transcript(ctx.files, params);
                return kExitOk;
            }

            if (*st_del) {
                if (ctx.scheme == Scheme::improved) {
                    write_message(ctx.files.start(), Message{Party::B, Party::A, StartRequest{Party::B}}, params.field);
                    auto m = improved_delegate(k.mk_a, k.tk.with_role(KeyRole::tk1), params, counters);
                    write_message(ctx.files.delegation(), m, params.field);
                } else {
                    Message start{Party::B, Party::A, StartRequestWithKey{Party::B, k.mk_b}};
                    write_message(ctx.files.start(), start, params.field);
                    auto [to_b, to_cloud] = eopsi_delegate(k.mk_a, k.mk_b, k.tk, params, counters);
                    write_message(ctx.files.q_to_b(), to_b, params.field);
                    write_message(ctx.files.delegation(), to_cloud, params.field);
                }
                rebuild_transcript(ctx.files, params);
                return kExitOk;
            }

            if (*st_cloud) {
                auto request = read_message(ctx.files.delegation(), "delegation message (run 'step delegate' first)",
                                            params.field);
                for (Party p : {Party::A, Party::B})
                    require_file(CloudStore::file_for(ctx.files.dir, p),
                                 "outsourced data of party " + std::string(to_string(p)));
                CloudStore store = CloudStore::load(ctx.files.dir, params.field);
                Message reply = ctx.scheme == Scheme::improved
                                    ? improved_cloud_compute(std::get<DelegationToCloud>(request.payload), k.tk2, store,
                                                             params, counters)
                                    : eopsi_cloud_compute(std::get<DelegationKeyToCloud>(request.payload), store, params,
                                                          counters);
                write_message(ctx.files.result(), reply, params.field);
                rebuild_transcript(ctx.files, params);
                return kExitOk;
            }

            if (*st_ret) {
                auto set = read_set_file(set_path);
                auto result_msg = read_message(ctx.files.result(), "cloud result (run 'step cloud' first)", params.field);
                RetrievalResult r;
                if (ctx.scheme == Scheme::improved) {
                    r = improved_retrieve(std::get<CloudResultImproved>(result_msg.payload), k.mk_b, set, params,
                                          counters, k.split_seed);
                } else {
                    auto q = read_message(ctx.files.q_to_b(), "q message (run 'step delegate' first)", params.field);
                    r = eopsi_retrieve(std::get<CloudResultEO>(result_msg.payload), std::get<QToB>(q.payload), set,
                                       params, counters, k.split_seed);
                }
                emit_set(step_out, out, r.intersection);
                return kExitOk;
            }
        }
    } catch (const std::bad_variant_access&) {
        err << "error: a message file holds the wrong message type\n";
        return kExitProtocol;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitUsage;
}

}  // namespace dpsi
