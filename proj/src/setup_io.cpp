#include <sstream>
#include <stdexcept>

#include "quphox/setup.hpp"

namespace quphox {

std::string detection_to_string(const DetectionSpec& detection) {
    std::string out = path_name(detection.trigger_path) + ":";
    out += detection.trigger_oam ? std::to_string(*detection.trigger_oam) : "any";
    return out;
}

std::string to_text(const Setup& setup) {
    std::ostringstream out;
    out << "paths:";
    for (int p = 0; p < setup.num_paths; ++p) out << " " << path_name(p);
    out << "\n";
    out << "cutoff: " << setup.mode_cutoff << "\n";
    for (const Spdc& s : setup.sources) out << "source: " << spdc_to_string(s) << "\n";
    if (setup.source_modes) {
        out << "source_modes:";
        for (int m : *setup.source_modes) out << " " << m;
        out << "\n";
    }
    out << "doubles: " << (setup.include_double_emission ? "on" : "off") << "\n";
    out << "trigger: " << detection_to_string(setup.detection) << "\n";
    out << "coincidence:";
    for (int p : setup.detection.coincidence_paths) out << " " << path_name(p);
    out << "\n";
    for (const Element& e : setup.elements) out << e.to_string() << "\n";
    return out.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(size_t line_no, const std::string& what) {
    throw std::invalid_argument("setup file line " + std::to_string(line_no) + ": " + what);
}

} // namespace

Setup parse_setup(const std::string& text) {
    Setup setup;
    setup.num_paths = 0;
    bool have_trigger = false;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        auto header = [&line](const char* key) -> std::optional<std::string> {
            std::string prefix = std::string(key) + ":";
            if (line.rfind(prefix, 0) != 0) return std::nullopt;
            std::string rest = line.substr(prefix.size());
            while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
            return rest;
        };

        if (auto rest = header("paths")) {
            auto names = split_ws(*rest);
            if (names.empty()) fail(line_no, "no paths listed");
            for (size_t k = 0; k < names.size(); ++k) {
                auto p = parse_path_name(names[k]);
                if (!p || *p != static_cast<int>(k)) {
                    fail(line_no, "paths must be consecutive letters from 'a'");
                }
            }
            setup.num_paths = static_cast<int>(names.size());
        } else if (auto rest = header("cutoff")) {
            try {
                setup.mode_cutoff = std::stoi(*rest);
            } catch (const std::exception&) {
                fail(line_no, "bad cutoff");
            }
        } else if (auto rest = header("source")) {
            auto s = parse_spdc(*rest);
            if (!s) fail(line_no, "bad source: " + *rest);
            setup.sources.push_back(*s);
        } else if (auto rest = header("source_modes")) {
            std::vector<int> modes;
            for (const std::string& tok : split_ws(*rest)) {
                try {
                    modes.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    fail(line_no, "bad source mode");
                }
            }
            if (modes.empty()) fail(line_no, "empty source_modes");
            setup.source_modes = modes;
        } else if (auto rest = header("doubles")) {
            if (*rest == "on") setup.include_double_emission = true;
            else if (*rest == "off") setup.include_double_emission = false;
            else fail(line_no, "doubles must be on/off");
        } else if (auto rest = header("trigger")) {
            auto colon = rest->find(':');
            if (colon == std::string::npos) fail(line_no, "trigger needs path:mode");
            auto p = parse_path_name(rest->substr(0, colon));
            if (!p) fail(line_no, "bad trigger path");
            setup.detection.trigger_path = *p;
            std::string mode_text = rest->substr(colon + 1);
            if (mode_text == "any") {
                setup.detection.trigger_oam = std::nullopt;
            } else {
                try {
                    setup.detection.trigger_oam = std::stoi(mode_text);
                } catch (const std::exception&) {
                    fail(line_no, "bad trigger mode");
                }
            }
            have_trigger = true;
        } else if (auto rest = header("coincidence")) {
            setup.detection.coincidence_paths.clear();
            for (const std::string& tok : split_ws(*rest)) {
                auto p = parse_path_name(tok);
                if (!p) fail(line_no, "bad coincidence path");
                setup.detection.coincidence_paths.push_back(*p);
            }
        } else {
            auto element = Element::parse(line);
            if (!element) fail(line_no, "unrecognized line: " + line);
            setup.elements.push_back(*element);
        }
    }
    if (setup.num_paths == 0) throw std::invalid_argument("setup file: missing paths header");
    if (!have_trigger) throw std::invalid_argument("setup file: missing trigger header");
    if (setup.detection.coincidence_paths.empty()) {
        throw std::invalid_argument("setup file: missing coincidence header");
    }
    validate(setup, static_cast<int>(setup.elements.size()) + 1);
    return setup;
}

} // namespace quphox
