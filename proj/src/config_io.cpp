#include "janus/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "janus/error.hpp"

#ifndef JANUS_PRESET_DIR
#define JANUS_PRESET_DIR "presets"
#endif

namespace janus {

using nlohmann::json;

std::string to_string(PresetId id) {
    switch (id) {
        case PresetId::JanusBaseline: return "janus_baseline";
        case PresetId::UsdcLike: return "usdc_like";
        case PresetId::DaiLike: return "dai_like";
        case PresetId::UstLike: return "ust_like";
        case PresetId::FlatcoinLike: return "flatcoin_like";
    }
    return "unknown";
}

const std::vector<PresetId>& all_presets() {
    static const std::vector<PresetId> ids{PresetId::JanusBaseline, PresetId::UsdcLike,
                                           PresetId::DaiLike, PresetId::UstLike,
                                           PresetId::FlatcoinLike};
    return ids;
}

std::optional<PresetId> parse_preset_id(std::string_view name) {
    for (PresetId id : all_presets())
        if (to_string(id) == name) return id;
    return std::nullopt;
}

std::filesystem::path preset_directory() {
    if (const char* env = std::getenv("JANUS_PRESET_DIR"); env && *env) return env;
    return JANUS_PRESET_DIR;
}

namespace {

// Reads one JSON object, remembering consumed keys so leftovers can be
// reported as typos.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_, "expected an object");
    }

    std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ValidationError(field(key), "missing required field");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ValidationError(field(key), "expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        return has(key) ? number(key) : fallback;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ValidationError(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ValidationError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ValidationError(field(key), "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Bounds bounds(const std::string& key, Bounds fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto v = numbers(key);
        if (v.size() != 2) throw ValidationError(field(key), "expected [min, max]");
        return {v[0], v[1]};
    }

    void mark(const std::string& key) { seen_.insert(key); }

    Section child(const std::string& key) { return Section(raw(key), field(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(field(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

AssetKind parse_kind(const std::string& s, const std::string& field) {
    if (s == "crypto") return AssetKind::Crypto;
    if (s == "rwa") return AssetKind::Rwa;
    throw ValidationError(field, "kind must be \"crypto\" or \"rwa\"");
}

TokenMarket parse_market(Section s) {
    TokenMarket m;
    m.depth = s.number("depth");
    m.anchor_gain = s.number("anchor_gain", 0.0);
    m.anchor_width = s.number("anchor_width", 0.02);
    m.yield_anchor = s.number("yield_anchor", 0.0);
    m.noise_vol = s.number("noise_vol", 0.0);
    m.crypto_beta = s.number("crypto_beta", 0.0);
    m.absorption = s.number("absorption", 0.0);
    s.finish();
    return m;
}

TokenInit parse_token(Section s) {
    TokenInit t;
    t.price = s.number("price");
    t.supply = s.number("supply");
    s.finish();
    return t;
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
    ScenarioConfig c;
    Section root(j, "");
    if (root.has("name")) root.string("name");
    if (root.has("description")) root.string("description");

    {
        const json& assets = root.raw("assets");
        if (!assets.is_array()) throw ValidationError("assets", "expected an array");
        for (std::size_t i = 0; i < assets.size(); ++i) {
            Section a(assets[i], "assets[" + std::to_string(i) + "]");
            AssetSpec spec;
            spec.id = i;
            spec.kind = parse_kind(a.string("kind"), a.field("kind"));
            spec.drift = a.number("drift", 0.0);
            spec.vol = a.number("vol", 0.0);
            spec.yield = a.number("yield", 0.0);
            a.finish();
            c.assets.push_back(spec);
        }
    }
    {
        const json& rows = root.raw("correlation");
        if (!rows.is_array()) throw ValidationError("correlation", "expected a square array");
        Matrix m(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].is_array() || rows[i].size() != rows.size())
                throw ValidationError("correlation", "expected a square array");
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (!rows[i][k].is_number()) throw ValidationError("correlation", "entries must be numbers");
                m(i, k) = rows[i][k].get<double>();
            }
        }
        c.correlation = CorrelationMatrix::make(std::move(m));
    }
    {
        Section d = root.child("demand");
        c.demand.base_inflow = d.number("base_inflow", 0.0);
        c.demand.sentiment_gain = d.number("sentiment_gain", 0.0);
        c.demand.deviation_gain = d.number("deviation_gain", 0.0);
        c.demand.noise_vol = d.number("noise_vol", 0.0);
        c.demand.churn = d.number("churn", 0.0);
        c.demand.redeem_fee_elasticity = d.number("redeem_fee_elasticity", 0.0);
        d.finish();
    }
    {
        Section m = root.child("mint_policy");
        c.mint_policy.min_collateral_ratio = m.number("min_collateral_ratio");
        c.mint_policy.mint_fee = m.number("mint_fee", 0.0);
        c.mint_policy.redeem_fee = m.number("redeem_fee", 0.0);
        c.mint_policy.alpha_omega_split = m.number("alpha_omega_split", 0.5);
        m.finish();
    }
    {
        Section k = root.child("controller");
        ControllerParams& p = c.controller;
        p.fee_gain = k.number("fee_gain", 0.0);
        p.reward_gain = k.number("reward_gain", 0.0);
        p.rate_gain = k.number("rate_gain", 0.0);
        p.fee_bounds = k.bounds("fee_bounds", p.fee_bounds);
        p.reward_bounds = k.bounds("reward_bounds", p.reward_bounds);
        p.rate_bounds = k.bounds("rate_bounds", p.rate_bounds);
        p.reward_neutral = k.number("reward_neutral", 0.0);
        p.rate_neutral = k.number("rate_neutral", 0.0);
        p.relaxation = k.number("relaxation", 0.0);
        p.fee_neutral = c.mint_policy.redeem_fee;
        k.finish();
    }
    {
        Section b = root.child("band");
        c.band = PegBand::make(b.number("epsilon"));
        b.finish();
    }
    {
        Section r = root.child("reference");
        const double p0 = r.number("p0", 1.0);
        double g = r.number("growth_rate", 0.0);
        if (r.has("annual_growth")) {
            if (g != 0.0) throw ValidationError("reference", "give growth_rate or annual_growth, not both");
            g = ReferencePricePolicy::daily_from_annual(r.number("annual_growth"));
        }
        r.number("annual_growth", 0.0);
        c.ref_policy = ReferencePricePolicy::make(p0, g);
        r.finish();
    }
    {
        Section g = root.child("governance");
        if (g.has("equal_holders")) {
            const auto n = g.integer("equal_holders", 1);
            if (n < 1) throw ValidationError("governance.equal_holders", "must be >= 1");
            c.governance = GovernanceDistribution::uniform(static_cast<std::size_t>(n));
        } else {
            c.governance = GovernanceDistribution::make(g.numbers("weights"));
        }
        g.integer("equal_holders", 1);
        g.finish();
    }
    {
        Section s = root.child("simulation");
        c.horizon = s.integer("horizon", 365);
        c.burn_in = s.integer("burn_in", 30);
        const auto seed = s.integer("seed", 0);
        if (seed < 0) throw ValidationError("simulation.seed", "must be >= 0");
        c.seed = static_cast<std::uint64_t>(seed);
        s.finish();
    }
    {
        Section s = root.child("initial_state");
        c.initial_state.alpha = parse_token(s.child("alpha"));
        c.initial_state.omega = parse_token(s.child("omega"));
        c.initial_state.collateral_values = s.numbers("collateral");
        if (s.has("vaults")) {
            const json& vs = s.raw("vaults");
            if (!vs.is_array()) throw ValidationError("initial_state.vaults", "expected an array");
            for (std::size_t i = 0; i < vs.size(); ++i) {
                Section v(vs[i], "initial_state.vaults[" + std::to_string(i) + "]");
                const auto kind = parse_vault_kind(v.string("kind"));
                if (!kind) throw ValidationError(v.field("kind"), "unknown vault kind");
                std::optional<std::int64_t> maturity;
                if (v.has("maturity")) maturity = v.integer("maturity", 0);
                v.integer("maturity", 0);
                c.initial_state.vaults.push_back(
                    VaultPosition::make(*kind, v.number("principal"), v.number("rate", 0.0), maturity));
                v.finish();
            }
        }
        s.mark("vaults");
        s.finish();
    }
    if (root.has("stress")) {
        Section s = root.child("stress");
        StressOverlay o;
        const std::string kind = s.string("kind");
        if (kind == "CryptoCrash") o.kind = StressKind::CryptoCrash;
        else if (kind == "RwaShortfall") o.kind = StressKind::RwaShortfall;
        else if (kind == "DemandCollapse") o.kind = StressKind::DemandCollapse;
        else throw ValidationError("stress.kind", "unknown stress kind");
        o.onset = s.integer("onset", 0);
        o.magnitude = s.number("magnitude");
        o.duration = s.integer("duration", 0);
        s.finish();
        c.stress = o;
    }
    root.mark("stress");
    {
        Section f = root.child("failure");
        c.failure.grace = f.integer("grace", 14);
        c.failure.floor = f.number("floor", 0.5);
        f.finish();
    }
    {
        Section m = root.child("markets");
        c.alpha_market = parse_market(m.child("alpha"));
        c.omega_market = parse_market(m.child("omega"));
        m.finish();
    }
    {
        Section t = root.child("treasury");
        c.treasury.treasury_split = t.number("treasury_split", 1.0);
        c.treasury.reserve_multiple = t.number("reserve_multiple", 1.0);
        c.treasury.release_rate = t.number("release_rate", 0.0);
        c.treasury.rebalance_rate = t.number("rebalance_rate", 0.0);
        c.treasury.target_weights = t.numbers("target_weights");
        t.finish();
    }
    {
        Section v = root.child("vault_model");
        c.vault_model.lock_base = v.number("lock_base", 0.0);
        c.vault_model.lock_elasticity = v.number("lock_elasticity", 0.0);
        c.vault_model.lock_speed = v.number("lock_speed", 0.0);
        v.finish();
    }
    {
        Section l = root.child("liquidation");
        c.liquidation.enabled = l.boolean("enabled", true);
        c.liquidation.penalty = l.number("penalty", 0.1);
        c.liquidation.omega_senior = l.boolean("omega_senior", false);
        l.finish();
    }
    root.finish();
    c.validate();
    return c;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config", std::string("malformed JSON in ") + path.string() + ": " + e.what());
    }
}

LoadedConfig load_config_file(const std::filesystem::path& path) {
    LoadedConfig out;
    out.source = read_json_file(path);
    out.config = parse_config(out.source);
    out.label = path.stem().string();
    return out;
}

LoadedConfig load_preset(const std::string& name) {
    const auto path = preset_directory() / (name + ".json");
    if (!std::filesystem::exists(path)) throw ValidationError("preset", "unknown preset " + name);
    LoadedConfig out = load_config_file(path);
    out.label = name;
    return out;
}

ScenarioConfig preset_config(PresetId id) { return load_preset(to_string(id)).config; }

std::string config_hash(const json& source) {
    const std::string text = source.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FrontierGrid parse_grid(const json& j, std::vector<std::string>* presets) {
    Section g(j, "grid");
    FrontierGrid grid;
    if (g.has("min_collateral_ratio")) grid.min_collateral_ratio = g.numbers("min_collateral_ratio");
    if (g.has("epsilon")) grid.epsilon = g.numbers("epsilon");
    if (g.has("controller_gain_scale")) grid.controller_gain_scale = g.numbers("controller_gain_scale");
    if (g.has("theta")) {
        const json& t = g.raw("theta");
        if (!t.is_array()) throw ValidationError("grid.theta", "expected an array of weight vectors");
        for (const auto& row : t) {
            if (!row.is_array()) throw ValidationError("grid.theta", "expected an array of weight vectors");
            std::vector<double> w;
            double sum = 0.0;
            for (const auto& x : row) {
                if (!x.is_number()) throw ValidationError("grid.theta", "weights must be numbers");
                w.push_back(x.get<double>());
                sum += w.back();
            }
            if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("grid.theta", "each candidate must sum to 1");
            grid.theta.push_back(std::move(w));
        }
    }
    std::vector<std::string> names;
    if (g.has("presets")) {
        const json& p = g.raw("presets");
        if (!p.is_array()) throw ValidationError("grid.presets", "expected an array of preset names");
        for (const auto& x : p) {
            if (!x.is_string()) throw ValidationError("grid.presets", "expected preset names");
            names.push_back(x.get<std::string>());
        }
    }
    for (const char* k : {"min_collateral_ratio", "epsilon", "controller_gain_scale", "theta", "presets"})
        g.mark(k);
    g.finish();
    if (grid.empty() && names.empty()) throw ValidationError("grid", "grid has no cells");
    if (presets) *presets = std::move(names);
    return grid;
}

}  // namespace janus
