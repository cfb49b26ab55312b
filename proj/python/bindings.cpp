#include "chainstamp/address.hpp"
#include "chainstamp/aggregator.hpp"
#include "chainstamp/base58.hpp"
#include "chainstamp/chain.hpp"
#include "chainstamp/chain_store.hpp"
#include "chainstamp/error.hpp"
#include "chainstamp/verifier.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace chainstamp;

namespace {

ByteView view(const py::bytes& b, std::string& storage)
{
    storage = b;
    return as_bytes(storage);
}

py::bytes to_py(ByteView b)
{
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<Digest32> digests(const std::vector<std::string>& hexes)
{
    std::vector<Digest32> out;
    out.reserve(hexes.size());
    for (const auto& h : hexes) out.push_back(Digest32::from_hex(h));
    return out;
}

py::dict report_dict(const VerificationReport& r)
{
    py::dict d;
    d["verdict"] = std::string(to_string(r.verdict));
    d["confirmations"] = r.confirmations;
    d["attested_time"] = r.attested_time ? py::cast(unix_seconds(*r.attested_time)) : py::none();
    d["failed_check"] = r.failed_check ? py::cast(static_cast<int>(*r.failed_check)) : py::none();
    d["detail"] = r.failure_detail ? py::cast(*r.failure_detail) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Trusted timestamping on a simulated block chain";

    static py::exception<Error> error_type(m, "ChainstampError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error_type, ("[" + std::string(to_string(e.code())) + "] " + e.what()).c_str());
        }
    });

    m.def("sha256_hex", [](const py::bytes& data) {
        std::string s;
        return sha256(view(data, s)).hex();
    });
    m.def("double_sha256_hex", [](const py::bytes& data) {
        std::string s;
        return double_sha256(view(data, s)).hex();
    });
    m.def("hash160_hex", [](const py::bytes& data) {
        std::string s;
        return hash160(view(data, s)).hex();
    });
    m.def("ripemd160_hex", [](const py::bytes& data) {
        std::string s;
        return ripemd160(view(data, s)).hex();
    });
    m.def("base58check_encode", [](int version, const py::bytes& payload) {
        std::string s;
        return base58check_encode(static_cast<std::uint8_t>(version), view(payload, s));
    });
    m.def("base58check_decode", [](const std::string& text) {
        const auto v = base58check_decode(text);
        return py::make_tuple(static_cast<int>(v.version), to_py(v.payload));
    });
    m.def("aggregate", [](const std::vector<std::string>& hashes) { return aggregate(digests(hashes)).hex(); },
          "SHA-256 over the sorted, de-duplicated concatenation of the digests");
    m.def(
        "derive_address",
        [](const std::string& aggregated_hex, bool testnet) {
            return derive_address(Digest32::from_hex(aggregated_hex), testnet ? kTestnetP2pkh : kMainnetP2pkh)
                .encoded;
        },
        py::arg("aggregated_hash"), py::arg("testnet") = false);
    m.def(
        "annual_cost",
        [](Satoshi dust, Satoshi fee, std::int64_t windows, const std::string& price) {
            const CostModel model{dust, fee, parse_decimal(price)};
            const auto usd = annual_cost_usd(model, windows);
            py::dict d;
            d["satoshi"] = annual_cost_satoshi(model, windows);
            d["btc"] = annual_cost_btc(model, windows).str();
            d["usd"] = usd.str();
            d["usd_float"] = usd.convert_to<double>();
            return d;
        },
        py::arg("dust_satoshi"), py::arg("fee_satoshi"), py::arg("windows_per_year"), py::arg("btc_price_usd"));
    m.def("attack_success_rate", &attack_success_rate, py::arg("target_depth"), py::arg("attacker_fraction"),
          py::arg("max_steps"), py::arg("trials"), py::arg("seed"));

    py::class_<Chain>(m, "Chain")
        .def(py::init<unsigned>(), py::arg("difficulty_bits") = kDefaultDifficultyBits)
        .def_static(
            "load",
            [](const std::string& path, unsigned difficulty_bits) { return load_chain(path, difficulty_bits); },
            py::arg("path"), py::arg("difficulty_bits"))
        .def("save", [](const Chain& c, const std::string& path) { write_chain_file(path, c.blocks()); })
        .def_property_readonly("difficulty_bits", &Chain::difficulty_bits)
        .def_property_readonly("tip_height", &Chain::tip_height)
        .def(
            "build_transaction",
            [](Chain& c, const std::string& address, Satoshi dust, Satoshi fee) {
                return c.build_transaction(address, dust, fee).txid().hex();
            },
            py::arg("address"), py::arg("dust_satoshi") = 1, py::arg("fee_satoshi") = 10'000)
        .def(
            "mine_block",
            [](Chain& c, std::int64_t unix_time) {
                const Block& b = c.mine_block(utc_from_unix(unix_time));
                return py::make_tuple(b.header.height, b.hash().hex());
            },
            py::arg("unix_time"))
        .def("confirmations",
             [](const Chain& c, const std::string& txid) { return c.confirmations(Digest32::from_hex(txid)); })
        .def("block_time",
             [](const Chain& c, std::int64_t height) {
                 return unix_seconds(c.blocks().at(static_cast<std::size_t>(height)).header.timestamp);
             })
        .def("validate", [](const Chain& c) -> py::tuple {
            const auto r = validate_chain(c.blocks());
            if (r.ok()) return py::make_tuple(true, py::none());
            return py::make_tuple(false, std::string(to_string(r.violation->kind)));
        });

    m.def(
        "verify_bundle",
        [](const std::string& digest_hex, const std::string& bundle_json, const Chain& chain, int finality_depth) {
            VerifyPolicy policy;
            policy.finality_depth = finality_depth;
            return report_dict(
                verify_with_bundle(Digest32::from_hex(digest_hex), ProofBundle::from_json(bundle_json), chain, policy));
        },
        py::arg("digest"), py::arg("bundle_json"), py::arg("chain"), py::arg("finality_depth") = kDefaultFinalityDepth);
}
