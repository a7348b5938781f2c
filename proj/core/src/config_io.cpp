#include "decoyqkd/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace decoyqkd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigParseError("config field '" + field + "': " + what, {field}, 0, 0);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, std::string("expected a number, got ") + j.type_name());
    return j.get<double>();
}

Count count(const json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<Count>();
    if (j.is_number_integer()) fail(field, "must not be negative");
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<Count>(v);
        fail(field, "expected a non-negative integer");
    }
    fail(field, std::string("expected a non-negative integer, got ") + j.type_name());
}

bool boolean(const json& j, const std::string& field) {
    if (!j.is_boolean()) fail(field, std::string("expected true or false, got ") + j.type_name());
    return j.get<bool>();
}

AttackDescriptor attack_from_json(const json& j) {
    if (j.is_null()) return AttackDescriptor::none();
    if (!j.is_object()) fail("attack", std::string("expected an object, got ") + j.type_name());
    AttackDescriptor a;
    bool kind_given = false;
    for (const auto& [key, value] : j.items()) {
        const std::string field = "attack." + key;
        if (key == "kind") {
            if (!value.is_string()) fail(field, "expected \"none\" or \"pns\"");
            const std::string k = value.get<std::string>();
            if (k == "none") {
                a.kind = AttackKind::None;
            } else if (k == "pns") {
                a.kind = AttackKind::PNS;
            } else {
                fail(field, "unknown attack kind \"" + k + "\" (expected \"none\" or \"pns\")");
            }
            kind_given = true;
        } else if (key == "block_fraction") {
            a.block_fraction = number(value, field);
        } else if (key == "split_fraction") {
            a.split_fraction = number(value, field);
        } else if (key == "bypass_bob_loss") {
            a.bypass_bob_loss = boolean(value, field);
        } else {
            fail(field, "unknown key");
        }
    }
    if (!kind_given) fail("attack.kind", "missing");
    return a;
}

// 1-based line/column of a byte offset.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

SessionConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigParseError(std::string("config must be a JSON object, got ") + j.type_name(), {}, 0, 0);
    }
    SessionConfig cfg;
    if (j.contains("channel_loss_db") && j.contains("channel_transmittance")) {
        fail("channel_loss_db", "give either channel_loss_db or channel_transmittance, not both");
    }
    if (j.contains("bob_loss_db") && j.contains("bob_transmittance")) {
        fail("bob_loss_db", "give either bob_loss_db or bob_transmittance, not both");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "mu") cfg.mu = number(value, key);
        else if (key == "nu") cfg.nu = number(value, key);
        else if (key == "decoy_probability") cfg.decoy_probability = number(value, key);
        else if (key == "clock_rate_hz") cfg.clock_rate_hz = number(value, key);
        else if (key == "channel_transmittance") cfg.channel_transmittance = number(value, key);
        else if (key == "bob_transmittance") cfg.bob_transmittance = number(value, key);
        else if (key == "detector_efficiency") cfg.detector_efficiency = number(value, key);
        else if (key == "channel_loss_db") cfg.channel_loss_db = number(value, key);
        else if (key == "bob_loss_db") cfg.bob_loss_db = number(value, key);
        else if (key == "dark_count_prob") cfg.dark_count_prob = number(value, key);
        else if (key == "optical_error_prob") cfg.optical_error_prob = number(value, key);
        else if (key == "afterpulse_prob") cfg.afterpulse_prob = number(value, key);
        else if (key == "attack") cfg.attack = attack_from_json(value);
        else if (key == "target_sifted_bits") cfg.target_sifted_bits = count(value, key);
        else if (key == "bound_sigmas") cfg.bound_sigmas = number(value, key);
        else if (key == "f_ec_assumed") cfg.f_ec_assumed = number(value, key);
        else if (key == "alarm_lower_tol") {
            if (!value.is_null()) cfg.alarm_lower_tol = number(value, key);
        } else if (key == "alarm_upper_tol") {
            if (!value.is_null()) cfg.alarm_upper_tol = number(value, key);
        } else if (key == "seed") cfg.seed = count(value, key);
        else fail(key, "unknown key");
    }
    return validate_config(cfg);
}

SessionConfig parse_config(std::string_view text, std::string_view source) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is one past the offending character.
        const auto [line, column] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << source << ":" << line << ":" << column << ": JSON syntax error: " << e.what();
        throw ConfigParseError(msg.str(), {}, line, column);
    }
    try {
        return config_from_json(j);
    } catch (const ConfigParseError& e) {
        throw ConfigParseError(std::string(source) + ": " + e.what(), e.fields(), 0, 0);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(source) + ": " + e.what(), e.fields());
    }
}

SessionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

json config_to_json(const SessionConfig& raw) {
    const SessionConfig cfg = validate_config(raw);
    json attack = {{"kind", cfg.attack.active() ? "pns" : "none"}};
    if (cfg.attack.active()) {
        attack["block_fraction"] = cfg.attack.block_fraction;
        attack["split_fraction"] = cfg.attack.split_fraction;
        attack["bypass_bob_loss"] = cfg.attack.bypass_bob_loss;
    }
    json j = {
        {"mu", cfg.mu},
        {"nu", cfg.nu},
        {"decoy_probability", cfg.decoy_probability},
        {"clock_rate_hz", cfg.clock_rate_hz},
        {"channel_transmittance", cfg.channel_transmittance},
        {"bob_transmittance", cfg.bob_transmittance},
        {"detector_efficiency", cfg.detector_efficiency},
        {"dark_count_prob", cfg.dark_count_prob},
        {"optical_error_prob", cfg.optical_error_prob},
        {"afterpulse_prob", cfg.afterpulse_prob},
        {"attack", attack},
        {"target_sifted_bits", cfg.target_sifted_bits},
        {"bound_sigmas", cfg.bound_sigmas},
        {"f_ec_assumed", cfg.f_ec_assumed},
        {"alarm_lower_tol", cfg.alarm_lower_tol ? json(*cfg.alarm_lower_tol) : json(nullptr)},
        {"alarm_upper_tol", cfg.alarm_upper_tol ? json(*cfg.alarm_upper_tol) : json(nullptr)},
        {"seed", cfg.seed},
    };
    return j;
}

}  // namespace decoyqkd
