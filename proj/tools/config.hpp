#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace facets::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HelpRequested {};

/// Key registry for one subcommand: declared keys with defaults and docs,
/// filled from a key=value config file plus command-line overrides. Unknown
/// keys abort before any work starts.
class Options {
public:
    Options(std::string command, std::string summary)
        : command_(std::move(command)), summary_(std::move(summary)) {}

    Options& add(const std::string& key, const std::string& description,
                 const std::string& default_value = "", bool required = false,
                 bool repeatable = false) {
        specs_.push_back({key, description, default_value, required, repeatable});
        return *this;
    }

    void parse(const std::vector<std::string>& args) {
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--help" || a == "-h") {
                print_help(std::cout);
                throw HelpRequested{};
            }
            if (a == "--config") {
                if (i + 1 >= args.size()) throw UsageError("--config needs a file");
                load_file(args[++i]);
                continue;
            }
            std::string kv = a;
            if (kv.rfind("--", 0) == 0) kv = kv.substr(2);
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw UsageError("expected key=value, got '" + a + "'");
            set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const Spec& s : specs_)
            if (s.required && values_.find(s.key) == values_.end())
                throw UsageError(command_ + ": missing required key '" + s.key + "'");
    }

    bool has(const std::string& key) const {
        return values_.count(key) > 0 || !spec_of(key).default_value.empty();
    }

    std::string str(const std::string& key) const {
        auto it = values_.find(key);
        if (it != values_.end()) return it->second.back();
        return spec_of(key).default_value;
    }

    double num(const std::string& key) const {
        try {
            std::size_t used = 0;
            const std::string v = str(key);
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw UsageError(command_ + ": key '" + key + "' wants a number, got '" +
                             str(key) + "'");
        }
    }

    std::size_t count(const std::string& key) const {
        const double d = num(key);
        if (d < 0 || d != double(std::uint64_t(d)))
            throw UsageError(command_ + ": key '" + key + "' wants a count");
        return std::size_t(d);
    }

    std::uint64_t seed(const std::string& key) const {
        try {
            return std::stoull(str(key));
        } catch (const std::exception&) {
            throw UsageError(command_ + ": key '" + key + "' wants an integer seed");
        }
    }

    bool flag(const std::string& key) const {
        const std::string v = str(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
        throw UsageError(command_ + ": key '" + key + "' wants true/false");
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
        return out;
    }

    std::vector<std::string> repeated(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return {};
        return it->second;
    }

    void print_help(std::ostream& os) const {
        os << "facets " << command_ << " -- " << summary_ << "\n\n";
        os << "usage: facets " << command_ << " [--config FILE] [key=value ...]\n\n";
        os << "keys:\n";
        for (const Spec& s : specs_) {
            os << "  " << s.key;
            if (!s.default_value.empty()) os << " (default " << s.default_value << ")";
            if (s.required) os << " (required)";
            if (s.repeatable) os << " (repeatable)";
            os << "\n      " << s.description << "\n";
        }
    }

private:
    struct Spec {
        std::string key, description, default_value;
        bool required = false;
        bool repeatable = false;
    };

    const Spec& spec_of(const std::string& key) const {
        for (const Spec& s : specs_)
            if (s.key == key) return s;
        throw UsageError(command_ + ": unknown key '" + key + "'");
    }

    void set(const std::string& key, const std::string& value) {
        const Spec& s = spec_of(key); // rejects unknown keys
        auto& slot = values_[key];
        if (!s.repeatable) slot.clear();
        slot.push_back(value);
    }

    void load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw UsageError("cannot open config file " + path);
        std::string line;
        while (std::getline(is, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto strip = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            line = strip(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError("config line is not key=value: '" + line + "'");
            set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
        }
    }

    std::string command_, summary_;
    std::vector<Spec> specs_;
    std::map<std::string, std::vector<std::string>> values_;
};

} // namespace facets::cli
