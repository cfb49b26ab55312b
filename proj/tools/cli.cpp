#include "cli.hpp"

#include "chainstamp/chain_store.hpp"
#include "chainstamp/config.hpp"
#include "chainstamp/error.hpp"
#include "chainstamp/http_server.hpp"
#include "chainstamp/service.hpp"
#include "chainstamp/verifier.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace chainstamp::cli {

namespace {

using json = nlohmann::json;

constexpr std::size_t kChunkBytes = 4 * 1024 * 1024;

/// Raised inside a subcommand to end it with a specific exit code.
struct Exit {
    int code;
    std::string message;
};

Digest32 hash_stream(std::istream& in)
{
    Sha256 h;
    std::vector<char> buf(kChunkBytes);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto n = in.gcount();
        if (n > 0) h.update(ByteView(reinterpret_cast<const std::uint8_t*>(buf.data()), static_cast<std::size_t>(n)));
    }
    if (in.bad()) throw Exit{kExitUnreadableInput, "read error"};
    return h.finish();
}

Digest32 hash_file(const std::string& path)
{
    if (std::filesystem::is_directory(path)) throw Exit{kExitUnreadableInput, path + ": is a directory"};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Exit{kExitUnreadableInput, path + ": cannot open file"};
    return hash_stream(in);
}

std::string read_text(const std::string& path, int code)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Exit{code, path + ": cannot open file"};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Digest32 parse_digest(const std::string& text, int code)
{
    try {
        return Digest32::from_hex(text);
    } catch (const Error& e) {
        throw Exit{code, "invalid digest '" + text + "': " + e.what()};
    }
}

class ServerClient {
public:
    explicit ServerClient(const std::string& url) : url_(url), client_(url)
    {
        if (!client_.is_valid()) throw Exit{kExitNetwork, "invalid server URL " + url};
        client_.set_connection_timeout(5);
        client_.set_read_timeout(30);
    }

    /// Returns the response; network failures raise exit 3, non-2xx exit 4.
    httplib::Result get(const std::string& path) { return check(client_.Get(path)); }
    httplib::Result post(const std::string& path, const std::string& body)
    {
        return check(client_.Post(path, body, "application/json"));
    }

private:
    httplib::Result check(httplib::Result res)
    {
        if (!res) throw Exit{kExitNetwork, "cannot reach " + url_ + ": " + httplib::to_string(res.error())};
        if (res->status < 200 || res->status >= 300) {
            std::string detail = res->body;
            try {
                const auto j = json::parse(res->body);
                detail = j.value("error", "") + ": " + j.value("detail", "");
            } catch (const json::exception&) {
            }
            throw Exit{kExitRejected, "server answered " + std::to_string(res->status) + " (" + detail + ")"};
        }
        return res;
    }

    std::string url_;
    httplib::Client client_;
};

void print_fields(std::ostream& out, const json& j)
{
    for (const auto& [key, value] : j.items())
        out << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
}

std::vector<Block> read_valid_chain(const std::string& path)
{
    std::vector<Block> blocks;
    try {
        if (!std::filesystem::exists(path)) throw Error(ErrorCode::io_error, path + ": no such chain file");
        blocks = read_chain_file(path);
    } catch (const Error& e) {
        throw Exit{kExitInvalidChain, e.what()};
    }
    const auto result = validate_chain(blocks);
    if (!result.ok())
        throw Exit{kExitInvalidChain, "chain invalid at height " + std::to_string(result.violation->height) + " (" +
                                          std::string(to_string(result.violation->kind)) +
                                          "): " + result.violation->detail};
    return blocks;
}

// --- serve ----------------------------------------------------------------------------

int serve(const std::optional<std::string>& config_path, std::ostream& out, std::ostream& err)
{
    ServiceConfig config;
    try {
        config = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    // Signals are taken synchronously by a dedicated thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::unique_ptr<StampService> service;
    try {
        service = std::make_unique<StampService>(config);
    } catch (const Error& e) {
        err << "cannot start service: " << e.what() << "\n";
        return e.code() == ErrorCode::config_error ? kExitConfig : kExitUnreadableInput;
    }
    HttpServer server(*service);
    try {
        server.bind(config.host, config.port);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitConfig;
    }
    out << "listening on http://" << config.host << ":" << server.port() << "\n" << std::flush;

    std::jthread scheduler([&](std::stop_token stop) { service->run_scheduler(stop); });
    std::thread([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    }).detach();
    server.run();
    scheduler.request_stop();
    out << "stopped\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"chainstamp: trusted timestamps committed to a simulated block chain"};
    app.require_subcommand(1);

    std::string server = kDefaultServer;
    bool json_out = false;

    // hash
    std::string hash_path;
    auto* hash_cmd = app.add_subcommand("hash", "Print the SHA-256 of a file or stdin");
    hash_cmd->add_option("path", hash_path, "File to hash; '-' or omitted reads stdin");

    // stamp
    std::string stamp_digest, stamp_file;
    bool priority = false;
    auto* stamp_cmd = app.add_subcommand("stamp", "Submit a digest (or a locally hashed file) for stamping");
    stamp_cmd->add_option("digest", stamp_digest, "64-hex SHA-256 digest");
    stamp_cmd->add_option("--file", stamp_file, "Hash this file locally and submit only the digest");
    stamp_cmd->add_flag("--priority", priority, "Request an immediate single-hash commitment");
    stamp_cmd->add_option("--server", server, "Service URL");
    stamp_cmd->add_flag("--json", json_out, "Print the raw JSON response");

    // status
    std::string status_digest;
    auto* status_cmd = app.add_subcommand("status", "Show the status of a stamped digest");
    status_cmd->add_option("digest", status_digest, "64-hex digest")->required();
    status_cmd->add_option("--server", server, "Service URL");
    status_cmd->add_flag("--json", json_out, "Print the raw JSON response");

    // proof
    std::string proof_digest, proof_out;
    auto* proof_cmd = app.add_subcommand("proof", "Download the proof bundle of a digest");
    proof_cmd->add_option("digest", proof_digest, "64-hex digest")->required();
    proof_cmd->add_option("--out", proof_out, "Write the bundle here instead of stdout");
    proof_cmd->add_option("--server", server, "Service URL");

    // verify
    std::string bundle_path, verify_file, verify_digest, chain_path;
    int finality_depth = kDefaultFinalityDepth;
    auto* verify_cmd = app.add_subcommand("verify", "Verify a proof bundle against a chain file");
    verify_cmd->add_option("--bundle", bundle_path, "Proof bundle JSON")->required();
    auto* vf = verify_cmd->add_option("--file", verify_file, "The stamped document");
    auto* vd = verify_cmd->add_option("--digest", verify_digest, "Digest of the stamped document");
    vf->excludes(vd);
    verify_cmd->add_option("--chain", chain_path, "Chain file")->required();
    verify_cmd->add_option("--finality-depth", finality_depth, "Confirmations required")->check(CLI::PositiveNumber);
    verify_cmd->add_flag("--json", json_out, "Print a JSON report");

    // serve
    std::string config_path;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service and the commitment scheduler");
    serve_cmd->add_option("--config", config_path, "JSON config file (CHAINSTAMP_* env vars override)");

    // mine
    int blocks = 1;
    std::string mine_chain;
    unsigned difficulty = kDefaultDifficultyBits;
    auto* mine_cmd = app.add_subcommand("mine", "Append blocks to the simulated chain");
    mine_cmd->add_option("--blocks", blocks, "Number of blocks")->check(CLI::Range(0, 100000));
    auto* mc = mine_cmd->add_option("--chain", mine_chain, "Mine into this chain file");
    auto* ms = mine_cmd->add_option("--server", server, "Ask this service to mine");
    mc->excludes(ms);
    mine_cmd->add_option("--difficulty", difficulty, "Difficulty for a new chain file")
        ->check(CLI::Range(0u, kMaxDifficultyBits));

    // export-chain
    std::string export_out;
    auto* export_cmd = app.add_subcommand("export-chain", "Download the service's chain file");
    export_cmd->add_option("--out", export_out, "Destination chain file")->required();
    export_cmd->add_option("--server", server, "Service URL");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitUnreadableInput;
    }

    try {
        if (hash_cmd->parsed()) {
            const Digest32 d = hash_path.empty() || hash_path == "-" ? hash_stream(in) : hash_file(hash_path);
            out << d.hex() << "\n";
            return kExitOk;
        }

        if (stamp_cmd->parsed()) {
            if (stamp_digest.empty() == stamp_file.empty())
                throw Exit{kExitRejected, "give exactly one of a digest argument or --file"};
            const Digest32 d =
                stamp_file.empty() ? parse_digest(stamp_digest, kExitRejected) : hash_file(stamp_file);
            ServerClient client(server);
            const auto res = client.post("/v1/stamps", json{{"hash", d.hex()}, {"priority", priority}}.dump());
            if (json_out) out << res->body << "\n";
            else print_fields(out, json::parse(res->body));
            return kExitOk;
        }

        if (status_cmd->parsed()) {
            const Digest32 d = parse_digest(status_digest, kExitRejected);
            ServerClient client(server);
            const auto res = client.get("/v1/stamps/" + d.hex());
            if (json_out) out << res->body << "\n";
            else print_fields(out, json::parse(res->body));
            return kExitOk;
        }

        if (proof_cmd->parsed()) {
            const Digest32 d = parse_digest(proof_digest, kExitRejected);
            ServerClient client(server);
            const auto res = client.get("/v1/stamps/" + d.hex() + "/proof");
            if (proof_out.empty()) {
                out << res->body << "\n";
            } else {
                std::ofstream f(proof_out, std::ios::binary | std::ios::trunc);
                f << res->body << "\n";
                if (!f) throw Exit{kExitUnreadableInput, proof_out + ": cannot write"};
            }
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            if (verify_file.empty() == verify_digest.empty())
                throw Exit{kExitUnreadableInput, "give exactly one of --file or --digest"};
            ProofBundle bundle;
            try {
                bundle = ProofBundle::from_json(read_text(bundle_path, kExitBadBundle));
            } catch (const Error& e) {
                throw Exit{kExitBadBundle, std::string("bad bundle: ") + e.what()};
            }
            const Digest32 d =
                verify_file.empty() ? parse_digest(verify_digest, kExitUnreadableInput) : hash_file(verify_file);
            const auto chain_blocks = read_valid_chain(chain_path);
            const unsigned bits = chain_blocks.empty() ? 0 : chain_blocks.front().header.difficulty_bits;
            const Chain chain = Chain::from_blocks_unchecked(chain_blocks, bits);
            VerifyPolicy policy;
            policy.finality_depth = finality_depth;
            const auto report = verify_with_bundle(d, bundle, chain, policy);
            if (json_out) {
                json j{{"verdict", std::string(to_string(report.verdict))}, {"confirmations", report.confirmations}};
                if (report.attested_time) j["attested_time"] = format_rfc3339(*report.attested_time);
                if (report.failed_check) j["failed_check"] = static_cast<int>(*report.failed_check);
                if (report.failure_detail) j["detail"] = *report.failure_detail;
                out << j.dump() << "\n";
            } else {
                out << report.render();
            }
            return report.verdict == Verdict::verified ? kExitOk : kExitNotVerified;
        }

        if (serve_cmd->parsed())
            return serve(config_path.empty() ? std::nullopt : std::optional(config_path), out, err);

        if (mine_cmd->parsed()) {
            if (blocks == 0) {
                out << "mined=0\n";
                return kExitOk;
            }
            if (!mine_chain.empty()) {
                const auto existing = std::filesystem::exists(mine_chain) ? read_valid_chain(mine_chain)
                                                                          : std::vector<Block>{};
                const unsigned bits = existing.empty() ? difficulty : existing.front().header.difficulty_bits;
                Chain chain(bits);
                for (const auto& b : existing) chain.append_block(b);
                for (int i = 0; i < blocks; ++i) append_chain_record(mine_chain, chain.mine_block(system_now()));
                out << "mined=" << blocks << "\ntip_height=" << chain.tip_height() << "\n";
                return kExitOk;
            }
            ServerClient client(server);
            const auto res = client.post("/v1/chain/mine", json{{"blocks", blocks}}.dump());
            print_fields(out, json::parse(res->body));
            return kExitOk;
        }

        if (export_cmd->parsed()) {
            ServerClient client(server);
            const auto res = client.get("/v1/chain/export");
            std::ofstream f(export_out, std::ios::binary | std::ios::trunc);
            f.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
            if (!f) throw Exit{kExitUnreadableInput, export_out + ": cannot write"};
            out << "bytes=" << res->body.size() << "\n";
            return kExitOk;
        }
    } catch (const Exit& e) {
        if (!e.message.empty()) err << "chainstamp: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        err << "chainstamp: " << e.what() << "\n";
        return kExitUnreadableInput;
    }
    return kExitOk;
}

} // namespace chainstamp::cli
