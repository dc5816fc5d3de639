#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tilekit/cyclotomic.hpp"
#include "tilekit/errors.hpp"
#include "tilekit/integer_tile.hpp"
#include "tilekit/phitree.hpp"
#include "tilekit/polyring.hpp"
#include "tilekit/productform.hpp"
#include "tilekit/spectra.hpp"
#include "tilekit/tilecheck.hpp"

using nlohmann::json;
using namespace tilekit;

namespace {

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trimmed(tok);
        if (tok.empty()) throw std::invalid_argument("empty entry in integer list '" + text + "'");
        std::size_t pos = 0;
        out.push_back(std::stoll(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("bad integer '" + tok + "'");
    }
    return out;
}

// "a,b;c,d" — rows split on ';', entries on ','
std::vector<std::vector<std::int64_t>> parse_rows(const std::string& text) {
    std::vector<std::vector<std::int64_t>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_int_list(row));
    return rows;
}

std::string fmt_list(const std::vector<std::int64_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

std::string fmt_set(const DigitSet& d) { return fmt_list(d.elements()); }

std::string fmt_point(const std::vector<std::int64_t>& v) {
    if (v.size() == 1) return std::to_string(v[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

const char* kernel_type_name(KernelType t) {
    switch (t) {
    case KernelType::I: return "I";
    case KernelType::II: return "II";
    default: return "III";
    }
}

// m / l vectors drop the unused slot 0 for display and input
std::vector<std::int64_t> tail_of(const std::vector<std::int64_t>& v) {
    return v.empty() ? v : std::vector<std::int64_t>(v.begin() + 1, v.end());
}

json stage_to_json(const ProductFormStage& st) {
    return json{{"part", st.part.elements()},
                {"exponent", st.exponent},
                {"modulus", st.modulus},
                {"offsets", st.offsets}};
}

json chain_to_json(const ProductFormChain& c) {
    json stages = json::array();
    for (const auto& st : c.stages) stages.push_back(stage_to_json(st));
    return json{{"base", c.base},
                {"order", c.order},
                {"stages", stages},
                {"resulting_set", c.resulting_set.elements()},
                {"kernel_nodes", c.kernel_nodes}};
}

ProductFormChain chain_from_json(const json& doc) {
    ProductFormChain c;
    c.base = doc.at("base").get<std::int64_t>();
    if (doc.contains("order")) c.order = doc["order"].get<std::int64_t>();
    for (const json& sj : doc.at("stages")) {
        ProductFormStage st;
        st.part = DigitSet(sj.at("part").get<std::vector<std::int64_t>>());
        if (sj.contains("exponent")) st.exponent = sj["exponent"].get<std::int64_t>();
        if (sj.contains("modulus")) st.modulus = sj["modulus"].get<std::int64_t>();
        if (sj.contains("offsets")) st.offsets = sj["offsets"].get<std::vector<std::int64_t>>();
        c.stages.push_back(std::move(st));
    }
    return c;
}

std::string stage_line(const ProductFormStage& st) {
    return "stage E=" + fmt_set(st.part) + " l=" + std::to_string(st.exponent) +
           " n=" + std::to_string(st.modulus) + " offsets=" + fmt_list(st.offsets);
}

int indent_level(const std::string& line) {
    std::size_t tabs = 0, spaces = 0, i = 0;
    for (; i < line.size() && (line[i] == ' ' || line[i] == '\t'); ++i)
        ++(line[i] == '\t' ? tabs : spaces);
    if (tabs > 0 && spaces > 0)
        throw std::invalid_argument("chain file mixes tabs and spaces in one indent");
    if (spaces % 4 != 0)
        throw std::invalid_argument("chain file indentation must use 4-space units");
    return static_cast<int>(tabs + spaces / 4);
}

ProductFormStage parse_stage_line(const std::string& body) {
    ProductFormStage st;
    std::stringstream ss(body);
    std::string tok;
    bool have_part = false;
    while (ss >> tok) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in chain file, got '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "E") {
            st.part = DigitSet(parse_int_list(val));
            have_part = true;
        } else if (key == "l") {
            st.exponent = std::stoll(val);
        } else if (key == "n") {
            st.modulus = std::stoll(val);
        } else if (key == "offsets") {
            st.offsets = val.empty() ? std::vector<std::int64_t>{} : parse_int_list(val);
        } else {
            throw std::invalid_argument("unknown chain-file key '" + key + "'");
        }
    }
    if (!have_part) throw std::invalid_argument("chain-file stage line is missing E=");
    return st;
}

struct Report {
    std::string verdict;
    json certificate = json::object();
    std::vector<std::string> lines;
};

void report_chain(const ProductFormChain& chain, Report& rep) {
    rep.lines.push_back("order = " + std::to_string(chain.order));
    if (!chain.kernel_nodes.empty())
        rep.lines.push_back("kernel nodes = " + fmt_list(chain.kernel_nodes));
    for (const auto& st : chain.stages) rep.lines.push_back(stage_line(st));
}

// exit 2: the input violated a precondition; exit 3: computation failed
int error_exit_code(const Error& e) {
    static const std::set<std::string> usage = {
        "NonMonicDivisor", "ZeroConstantTerm",  "IndexOne",
        "ZeroPolynomial",  "CardinalityMismatch", "ForeignPrime",
        "NotATreeNode",    "NotAnchored",       "BadPeriod",
        "IncompleteResidues", "UnequalClassSizes", "NotPrimePowerCardinality",
        "PreconditionViolated", "NotAFactorization", "CollisionInSum",
        "OffsetCollision", "ModulusMismatch",   "LayerNotAFactorization",
        "ParameterOutOfRange", "UnsupportedBase", "NotExpanding"};
    return usage.count(e.code()) ? 2 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tilekit — exact classification of tile digit sets over Z"};
    app.require_subcommand(1);
    bool json_out = false;

    std::string digits_str, base_str, matrix_str, type_str = "I", m_str, l_str, chain_path;
    std::int64_t base = 0, p = 2, q = 3, alpha = 1, n = 1, depth = 2, k_max = 4;
    int bound = 16;
    bool assume_expanding = false;

    CLI::App* c_spectrum = app.add_subcommand("spectrum", "cyclotomic spectrum of a digit set's mask");
    c_spectrum->add_option("--digits", digits_str, "comma-separated digits")->required();

    CLI::App* c_tile = app.add_subcommand("tile-digit", "blocking decision for a base-b digit set");
    c_tile->add_option("--base", base, "base b")->required();
    c_tile->add_option("--digits", digits_str, "comma-separated digits")->required();

    CLI::App* c_int = app.add_subcommand("integer-tile", "Coven-Meyerowitz integer-tile decision");
    c_int->add_option("--digits", digits_str, "comma-separated digits")->required();
    c_int->add_option("--bound", bound, "fallback complement-search bound (default 16)");

    CLI::App* c_classify = app.add_subcommand("classify", "product-form classification of a digit set");
    c_classify->add_option("--base", base, "base b")->required();
    c_classify->add_option("--digits", digits_str, "comma-separated digits")->required();

    CLI::App* c_construct = app.add_subcommand("construct", "build a (modulo/order-k) product-form from a chain file");
    c_construct->add_option("--chain-file", chain_path, "stage file; '{' starts JSON, else E=.. l=.. n=.. offsets=.. lines, order-k layers indent by 4 spaces")
        ->required()
        ->check(CLI::ExistingFile);
    c_construct->add_option("--base", base, "base b (line-format files)");

    CLI::App* c_kernel = app.add_subcommand("kernel", "build a displayed kernel K_I / K_II / K_III");
    c_kernel->add_option("--type", type_str, "I, II, or III")->required();
    c_kernel->add_option("--p", p, "prime p")->required();
    c_kernel->add_option("--q", q, "prime q")->required();
    c_kernel->add_option("--alpha", alpha, "p-exponent of the base (default 1)");
    c_kernel->add_option("--n", n, "q-exponent of the spectrum (default 1)");
    c_kernel->add_option("--m", m_str, "comma list m_1..m_alpha (default zeros)");
    c_kernel->add_option("--l", l_str, "type II: comma list l_1..l_alpha (l_1 ignored)");

    CLI::App* c_tree = app.add_subcommand("phi-tree", "print the truncated base-b cyclotomic tree");
    c_tree->add_option("--base", base, "base b")->required();
    c_tree->add_option("--depth", depth, "levels to expand (default 2)");

    CLI::App* c_count = app.add_subcommand("count", "radix-expansion counting oracle");
    c_count->add_option("--base", base, "scalar base b");
    c_count->add_option("--matrix", matrix_str, "expanding matrix 'a,b;c,d'");
    c_count->add_option("--digits", digits_str, "digits: comma list (scalar) or 'x,y;x,y' vectors (matrix)")->required();
    c_count->add_option("--k", k_max, "depth K (default 4)");
    c_count->add_flag("--assume-expanding", assume_expanding, "skip the eigenvalue screen");

    for (CLI::App* sub : {c_spectrum, c_tile, c_int, c_classify, c_construct, c_kernel, c_tree, c_count})
        sub->add_flag("--json", json_out, "emit a single JSON document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    std::string command;
    json inputs = json::object();

    try {
        if (app.got_subcommand(c_spectrum)) {
            command = "spectrum";
            inputs["digits"] = digits_str;
            const DigitSet d(parse_int_list(digits_str));
            const Spectrum s = compute_spectrum(mask_polynomial(d));
            rep.verdict = "COMPUTED";
            rep.certificate = {{"full", s.full}, {"prime_power", s.prime_power}};
            rep.lines.push_back("full = " + fmt_list(s.full));
            rep.lines.push_back("prime_power = " + fmt_list(s.prime_power));
        } else if (app.got_subcommand(c_tile)) {
            command = "tile-digit";
            inputs = {{"base", base}, {"digits", digits_str}};
            const DigitSet d(parse_int_list(digits_str));
            const TileDigitDecision dec = is_tile_digit_set(d, base);
            rep.verdict = dec.accept ? "ACCEPT" : "REJECT";
            rep.lines.push_back("verdict " + rep.verdict);
            rep.certificate["candidates"] = dec.candidates;
            if (dec.accept) {
                rep.certificate["blocking"] = dec.blocking.nodes;
                rep.certificate["kernel"] = dec.kernel.str();
                rep.lines.push_back("blocking = " + fmt_list(dec.blocking.nodes));
                rep.lines.push_back("kernel = " + dec.kernel.str());
            } else {
                rep.certificate["witness_path"] = dec.witness_path;
                rep.lines.push_back("candidates = " + fmt_list(dec.candidates));
                rep.lines.push_back("witness path = " + fmt_list(dec.witness_path));
            }
        } else if (app.got_subcommand(c_int)) {
            command = "integer-tile";
            inputs = {{"digits", digits_str}, {"bound", bound}};
            const DigitSet d(parse_int_list(digits_str));
            const IntegerTileResult r = is_integer_tile(d, bound);
            rep.verdict = r.verdict == TileVerdict::Yes    ? "YES"
                          : r.verdict == TileVerdict::No   ? "NO"
                                                           : "UNKNOWN";
            rep.lines.push_back("verdict " + rep.verdict);
            rep.lines.push_back(std::string("how = ") + r.how);
            rep.certificate = {{"how", r.how},
                               {"t1", {{"ok", r.t1.ok},
                                       {"cardinality", r.t1.cardinality.str()},
                                       {"product", r.t1.product.str()},
                                       {"factors", r.t1.factors}}},
                               {"t2", {{"ok", r.t2.ok},
                                       {"witness", r.t2.witness},
                                       {"witness_product", r.t2.witness_product}}}};
            if (r.certificate) {
                rep.certificate["complement"] = r.certificate->complement.elements();
                rep.certificate["period"] = r.certificate->period;
                rep.lines.push_back("complement = " + fmt_set(r.certificate->complement));
                rep.lines.push_back("period = " + std::to_string(r.certificate->period));
            }
        } else if (app.got_subcommand(c_classify)) {
            command = "classify";
            inputs = {{"base", base}, {"digits", digits_str}};
            const DigitSet d(parse_int_list(digits_str));
            const Classification c = classify(d, base);
            rep.verdict = c.accepted ? "ACCEPT" : "REJECT";
            rep.lines.push_back("verdict " + rep.verdict);
            const char* shape = c.shape == BaseShape::PrimePower ? "prime power"
                                : c.shape == BaseShape::PQ       ? "pq"
                                                                 : "p^alpha q";
            rep.lines.push_back(std::string("shape = ") + shape);
            rep.certificate = {{"shape", shape}, {"spectrum", c.spectrum}};
            if (!c.accepted) {
                rep.certificate["witness_path"] = c.decision.witness_path;
                rep.lines.push_back("witness path = " + fmt_list(c.decision.witness_path));
            } else if (c.shape == BaseShape::PrimePower) {
                rep.certificate["prime"] = c.prime_power.prime;
                rep.certificate["exponents"] = c.prime_power.exponents;
                rep.lines.push_back("prime = " + std::to_string(c.prime_power.prime));
                rep.lines.push_back("exponents = " + fmt_list(c.prime_power.exponents));
            } else {
                const KernelSpec& ks = c.kernel;
                rep.certificate["kernel"] = {
                    {"type", kernel_type_name(ks.type)}, {"p", ks.p},     {"q", ks.q},
                    {"alpha", ks.alpha},                 {"n", ks.n},     {"m", tail_of(ks.m)},
                    {"l", tail_of(ks.l)},                {"blocking", ks.blocking_nodes},
                    {"optional", ks.optional_nodes},     {"polynomial", ks.polynomial.str()}};
                rep.certificate["order"] = c.order;
                rep.certificate["extra_divisors"] = c.extra_divisors;
                rep.certificate["chain"] = chain_to_json(c.chain);
                rep.lines.push_back(std::string("kernel type = ") + kernel_type_name(ks.type));
                rep.lines.push_back("p = " + std::to_string(ks.p));
                rep.lines.push_back("q = " + std::to_string(ks.q));
                rep.lines.push_back("alpha = " + std::to_string(ks.alpha));
                rep.lines.push_back("n = " + std::to_string(ks.n));
                rep.lines.push_back("m = " + fmt_list(tail_of(ks.m)));
                if (ks.type == KernelType::II)
                    rep.lines.push_back("l = " + fmt_list(tail_of(ks.l)));
                rep.lines.push_back("order = " + std::to_string(c.order));
                if (!c.extra_divisors.empty())
                    rep.lines.push_back("extra divisors = " + fmt_list(c.extra_divisors));
                for (const auto& st : c.chain.stages) rep.lines.push_back(stage_line(st));
            }
        } else if (app.got_subcommand(c_construct)) {
            command = "construct";
            inputs["chain_file"] = chain_path;
            if (base != 0) inputs["base"] = base;
            std::ifstream in(chain_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            const std::string text = buffer.str();
            const std::string head = trimmed(text);
            DigitSet result;
            ProductFormChain flat;
            if (!head.empty() && head[0] == '{') {
                const json doc = json::parse(text);
                if (doc.contains("layers")) {
                    std::vector<ProductFormChain> layers;
                    for (const json& lj : doc["layers"]) layers.push_back(chain_from_json(lj));
                    result = order_k_execute(layers);
                    flat = layers.back();
                } else {
                    flat = chain_from_json(doc);
                    bool stored = !flat.stages.empty();
                    for (const auto& st : flat.stages) stored = stored && st.modulus >= 1;
                    result = stored ? replay_chain(flat) : make_modulo_product_form(flat);
                    if (stored) flat.resulting_set = result;
                }
            } else {
                if (base < 2)
                    throw std::invalid_argument("line-format chain files need --base");
                std::vector<std::vector<ProductFormStage>> layer_stages;
                std::stringstream lines(text);
                std::string line;
                int prev_level = 0;
                while (std::getline(lines, line)) {
                    const std::string body = trimmed(line);
                    if (body.empty() || body[0] == '#') continue;
                    const int level = indent_level(line);
                    if (level > prev_level + 1)
                        throw std::invalid_argument("chain-file indentation jumps a level");
                    if (level < prev_level)
                        throw std::invalid_argument("chain-file layers must not dedent");
                    while (static_cast<int>(layer_stages.size()) <= level) layer_stages.emplace_back();
                    layer_stages[static_cast<std::size_t>(level)].push_back(parse_stage_line(body));
                    prev_level = level;
                }
                if (layer_stages.empty() || layer_stages[0].empty())
                    throw std::invalid_argument("chain file holds no stages");
                if (layer_stages.size() == 1) {
                    flat.base = base;
                    flat.stages = layer_stages[0];
                    bool stored = true;
                    for (const auto& st : flat.stages) stored = stored && st.modulus >= 1;
                    result = stored ? replay_chain(flat) : make_modulo_product_form(flat);
                    if (stored) flat.resulting_set = result;
                } else {
                    std::vector<ProductFormChain> layers(layer_stages.size());
                    for (std::size_t i = 0; i < layer_stages.size(); ++i) {
                        layers[i].base = base;
                        layers[i].stages = layer_stages[i];
                    }
                    result = order_k_execute(layers);
                    flat = layers.back();
                }
            }
            rep.verdict = "CONSTRUCTED";
            rep.certificate = {{"digits", result.elements()}, {"chain", chain_to_json(flat)}};
            rep.lines.push_back("digits = " + fmt_set(result));
            report_chain(flat, rep);
        } else if (app.got_subcommand(c_kernel)) {
            command = "kernel";
            inputs = {{"type", type_str}, {"p", p}, {"q", q}, {"alpha", alpha}, {"n", n}};
            if (!m_str.empty()) inputs["m"] = m_str;
            if (!l_str.empty()) inputs["l"] = l_str;
            KernelType type;
            if (type_str == "I" || type_str == "i") type = KernelType::I;
            else if (type_str == "II" || type_str == "ii") type = KernelType::II;
            else if (type_str == "III" || type_str == "iii") type = KernelType::III;
            else throw std::invalid_argument("--type must be I, II, or III");
            std::vector<std::int64_t> m(static_cast<std::size_t>(alpha) + 1, 0);
            if (!m_str.empty()) {
                const auto entries = parse_int_list(m_str);
                if (entries.size() != static_cast<std::size_t>(alpha))
                    throw std::invalid_argument("--m needs exactly alpha entries");
                std::copy(entries.begin(), entries.end(), m.begin() + 1);
            }
            std::vector<std::int64_t> l;
            if (type == KernelType::II) {
                l.assign(static_cast<std::size_t>(alpha) + 1, 0);
                const auto entries = parse_int_list(l_str);
                if (entries.size() != static_cast<std::size_t>(alpha))
                    throw std::invalid_argument("--l needs exactly alpha entries");
                std::copy(entries.begin(), entries.end(), l.begin() + 1);
            }
            const KernelSpec spec = kernel_build(type, p, q, alpha, n, m, l);
            const ProductFormChain chain = canonical_chain(spec);
            rep.verdict = "CONSTRUCTED";
            rep.certificate = {{"base", spec.base},
                               {"blocking", spec.blocking_nodes},
                               {"optional", spec.optional_nodes},
                               {"polynomial", spec.polynomial.str()},
                               {"digits", chain.resulting_set.elements()},
                               {"order", chain.order},
                               {"chain", chain_to_json(chain)}};
            rep.lines.push_back("base = " + std::to_string(spec.base));
            rep.lines.push_back("order = " + std::to_string(chain.order));
            rep.lines.push_back("blocking = " + fmt_list(spec.blocking_nodes));
            if (!spec.optional_nodes.empty())
                rep.lines.push_back("optional = " + fmt_list(spec.optional_nodes));
            rep.lines.push_back("polynomial = " + spec.polynomial.str());
            rep.lines.push_back("digits = " + fmt_set(chain.resulting_set));
        } else if (app.got_subcommand(c_tree)) {
            command = "phi-tree";
            inputs = {{"base", base}, {"depth", depth}};
            if (depth < 1) throw std::invalid_argument("--depth must be >= 1");
            json edges = json::array();
            std::vector<std::int64_t> level = children(1, base);
            rep.lines.push_back("1: " + [&] {
                std::string s;
                for (std::size_t i = 0; i < level.size(); ++i)
                    s += (i ? " " : "") + std::to_string(level[i]);
                return s;
            }());
            edges.push_back({{"node", 1}, {"children", level}});
            for (std::int64_t lvl = 2; lvl <= depth; ++lvl) {
                std::vector<std::int64_t> next;
                for (std::int64_t d : level) {
                    const std::vector<std::int64_t> kids = children(d, base);
                    std::string s = std::to_string(d) + ":";
                    for (std::int64_t c : kids) s += " " + std::to_string(c);
                    rep.lines.push_back(s);
                    edges.push_back({{"node", d}, {"children", kids}});
                    next.insert(next.end(), kids.begin(), kids.end());
                }
                std::sort(next.begin(), next.end());
                level = std::move(next);
            }
            rep.verdict = "COMPUTED";
            rep.certificate = {{"depth", depth}, {"edges", edges}};
        } else if (app.got_subcommand(c_count)) {
            command = "count";
            inputs = {{"digits", digits_str}, {"k", k_max}};
            DigitSystem sys;
            if (!matrix_str.empty()) {
                inputs["matrix"] = matrix_str;
                sys = matrix_system(parse_rows(matrix_str), parse_rows(digits_str),
                                    assume_expanding);
            } else {
                if (base < 2) throw std::invalid_argument("count needs --base or --matrix");
                inputs["base"] = base;
                sys = scalar_system(base, DigitSet(parse_int_list(digits_str)));
            }
            const CountReport r = counting_check(sys, k_max);
            rep.verdict = r.pass ? "PASS" : "FAIL";
            rep.lines.push_back("verdict " + rep.verdict);
            rep.lines.push_back("counts = " + fmt_list(r.counts));
            rep.certificate = {{"counts", r.counts}, {"k", k_max}};
            if (!r.pass) {
                rep.certificate["failing_k"] = r.checked_k;
                rep.certificate["collision_value"] = r.collision_value;
                rep.certificate["witness_a"] = r.witness_a;
                rep.certificate["witness_b"] = r.witness_b;
                rep.lines.push_back("failing k = " + std::to_string(r.checked_k));
                rep.lines.push_back("collision value = " + fmt_point(r.collision_value));
                const auto digit_row = [&](const std::vector<std::size_t>& seq) {
                    std::string s;
                    for (std::size_t i = 0; i < seq.size(); ++i)
                        s += (i ? " " : "") + fmt_point(sys.digits[seq[i]]);
                    return s;
                };
                rep.lines.push_back("witness a = " + digit_row(r.witness_a));
                rep.lines.push_back("witness b = " + digit_row(r.witness_b));
            }
        }
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return error_exit_code(e);
    } catch (const json::exception& e) {
        std::cerr << "bad chain file: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    if (json_out) {
        const json doc = {{"command", command},
                          {"inputs", inputs},
                          {"verdict", rep.verdict},
                          {"certificate", rep.certificate},
                          {"elapsed_ms", elapsed.count()}};
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const std::string& line : rep.lines) std::cout << line << "\n";
    }
    return 0;
}
