#include "bstac/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "bstac/error.hpp"
#include "bstac/text.hpp"

namespace bstac {

namespace {

constexpr std::string_view kMagic = "bstacgp-model";

std::string mode_name(BinMode m) { return m == BinMode::FloatResolution ? "float" : "fixed"; }

}  // namespace

std::string write_model(const EnsembleStack& stack) {
    std::ostringstream out;
    const auto& c = stack.config;
    out << kMagic << ' ' << kModelFormatVersion << '\n';
    out << "config max_boost_epoch=" << c.max_boost_epoch << " max_gp_epoch=" << c.max_gp_epoch
        << " new_pop_size=" << c.new_pop_size << " gap=" << c.gap << " mode=" << mode_name(c.mode)
        << " num_bin=" << c.num_bin << " beta=" << format_real(c.beta) << " alpha=" << format_real(c.alpha)
        << " seed=" << c.seed << " best_fit=" << best_fit_policy_name(c.best_fit)
        << " on_stall=" << stall_policy_name(c.on_stall) << '\n';
    out << "attributes " << stack.attribute_names.size() << '\n';
    for (std::size_t i = 0; i < stack.attribute_names.size(); ++i)
        out << "attribute " << i << ' ' << stack.attribute_names[i] << '\n';
    out << "classes " << stack.class_names.size() << '\n';
    for (std::size_t i = 0; i < stack.class_names.size(); ++i) out << "class " << i << ' ' << stack.class_names[i] << '\n';
    out << "fallback " << stack.fallback_class << '\n';
    out << "stalled " << (stack.log.stalled ? 1 : 0) << '\n';
    out << "generations " << stack.log.generations << '\n';
    out << "residuals " << stack.log.residual_sizes.size();
    for (auto r : stack.log.residual_sizes) out << ' ' << r;
    out << '\n';
    out << "entries " << stack.entries.size() << '\n';
    for (std::size_t i = 0; i < stack.entries.size(); ++i) {
        const auto& e = stack.entries[i];
        out << "entry " << i + 1 << '\n';
        out << "tree " << e.tree.to_string() << '\n';
        out << "geometry " << mode_name(e.geometry.mode) << ' ' << e.geometry.num_bin << ' '
            << format_real(e.geometry.lo) << ' ' << format_real(e.geometry.hi) << '\n';
        out << "beta " << format_real(e.beta) << '\n';
        out << "fitness " << format_real(e.fitness) << '\n';
        out << "boost_epoch " << e.boost_epoch << '\n';
        out << "claimed " << e.records_claimed << '\n';
        out << "pure " << e.pure_bins.size() << '\n';
        for (const auto& p : e.pure_bins)
            out << p.key << ' ' << format_real(p.value) << ' ' << p.label << ' ' << p.total << ' ' << p.majority << '\n';
        out << "ambiguous " << e.ambiguous_bins.size() << '\n';
        for (std::size_t k = 0; k < e.ambiguous_bins.size(); ++k)
            out << (k ? " " : "") << e.ambiguous_bins[k];
        if (!e.ambiguous_bins.empty()) out << '\n';
    }
    out << "end\n";
    return out.str();
}

namespace {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    std::size_t line_number() const { return line_no_; }

    std::string_view next() {
        if (pos_ >= text_.size()) fail("unexpected end of file");
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) end = text_.size();
        auto line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = end + 1;
        ++line_no_;
        return line;
    }

    // "<keyword> <rest>"; returns rest.
    std::string_view expect(std::string_view keyword) {
        const auto line = next();
        if (line.substr(0, keyword.size()) != keyword ||
            (line.size() > keyword.size() && line[keyword.size()] != ' '))
            fail("expected '" + std::string(keyword) + "'");
        return line.size() > keyword.size() ? line.substr(keyword.size() + 1) : std::string_view{};
    }

    bool at_end() const { return pos_ >= text_.size(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw ModelFormatError("model line " + std::to_string(line_no_) + ": " + what);
    }

    template <class T>
    T integer(std::string_view s) const {
        T v{};
        s = trim(s);
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) fail("bad integer '" + std::string(s) + "'");
        return v;
    }

    double real(std::string_view s) const {
        const auto v = parse_real(s);
        if (!v) fail("bad number '" + std::string(s) + "'");
        return *v;
    }

    std::vector<std::string_view> words(std::string_view s) const {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && s[i] == ' ') ++i;
            const auto start = i;
            while (i < s.size() && s[i] != ' ') ++i;
            if (i > start) out.push_back(s.substr(start, i - start));
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

BinMode parse_mode(const LineReader& in, std::string_view s) {
    if (s == "fixed") return BinMode::Fixed;
    if (s == "float") return BinMode::FloatResolution;
    in.fail("unknown bin mode '" + std::string(s) + "'");
}

// "<index> <name>" where name runs to end of line.
std::string indexed_name(const LineReader& in, std::string_view rest, std::size_t expected) {
    const auto sp = rest.find(' ');
    const auto idx = in.integer<std::size_t>(rest.substr(0, sp));
    if (idx != expected) in.fail("expected index " + std::to_string(expected));
    return sp == std::string_view::npos ? std::string{} : std::string(rest.substr(sp + 1));
}

}  // namespace

EnsembleStack read_model(std::string_view text) {
    LineReader in(text);
    EnsembleStack stack;

    {
        const auto header = in.words(in.next());
        if (header.size() != 2 || header[0] != kMagic) in.fail("not a bstacgp model file");
        const int version = in.integer<int>(header[1]);
        if (version != kModelFormatVersion)
            in.fail("unsupported model format version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
    }

    auto& c = stack.config;
    for (auto kv : in.words(in.expect("config"))) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) in.fail("config entry without '='");
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "max_boost_epoch") c.max_boost_epoch = in.integer<std::size_t>(val);
        else if (key == "max_gp_epoch") c.max_gp_epoch = in.integer<std::size_t>(val);
        else if (key == "new_pop_size") c.new_pop_size = in.integer<std::size_t>(val);
        else if (key == "gap") c.gap = in.integer<std::size_t>(val);
        else if (key == "mode") c.mode = parse_mode(in, val);
        else if (key == "num_bin") c.num_bin = in.integer<std::uint32_t>(val);
        else if (key == "beta") c.beta = in.real(val);
        else if (key == "alpha") c.alpha = in.real(val);
        else if (key == "seed") c.seed = in.integer<std::uint64_t>(val);
        else if (key == "best_fit") {
            try {
                c.best_fit = parse_best_fit_policy(val);
            } catch (const ConfigError& e) {
                in.fail(e.what());
            }
        }
        else if (key == "on_stall") {
            try {
                c.on_stall = parse_stall_policy(val);
            } catch (const ConfigError& e) {
                in.fail(e.what());
            }
        }
        else in.fail("unknown config key '" + std::string(key) + "'");
    }

    const auto num_attr = in.integer<std::size_t>(in.expect("attributes"));
    for (std::size_t i = 0; i < num_attr; ++i) stack.attribute_names.push_back(indexed_name(in, in.expect("attribute"), i));
    const auto num_classes = in.integer<std::size_t>(in.expect("classes"));
    for (std::size_t i = 0; i < num_classes; ++i) stack.class_names.push_back(indexed_name(in, in.expect("class"), i));
    stack.fallback_class = in.integer<ClassId>(in.expect("fallback"));
    if (stack.fallback_class >= num_classes && num_classes > 0) in.fail("fallback class out of range");
    stack.log.stalled = in.integer<int>(in.expect("stalled")) != 0;
    stack.log.generations = in.integer<std::size_t>(in.expect("generations"));
    {
        const auto w = in.words(in.expect("residuals"));
        if (w.empty() || in.integer<std::size_t>(w[0]) != w.size() - 1) in.fail("residual list length mismatch");
        for (std::size_t i = 1; i < w.size(); ++i) stack.log.residual_sizes.push_back(in.integer<std::size_t>(w[i]));
    }

    const auto num_entries = in.integer<std::size_t>(in.expect("entries"));
    for (std::size_t i = 0; i < num_entries; ++i) {
        if (in.integer<std::size_t>(in.expect("entry")) != i + 1) in.fail("entries out of order");
        ChampionEntry e;
        try {
            e.tree = ProgramTree::parse(in.expect("tree"));
        } catch (const std::exception& ex) {
            in.fail(ex.what());
        }
        if (e.tree.attribute_span() > num_attr) in.fail("tree references an attribute beyond the schema");
        {
            const auto g = in.words(in.expect("geometry"));
            if (g.size() != 4) in.fail("geometry needs mode, num_bin, lo, hi");
            e.geometry = {parse_mode(in, g[0]), in.integer<std::uint32_t>(g[1]), in.real(g[2]), in.real(g[3])};
        }
        e.beta = in.real(in.expect("beta"));
        e.fitness = in.real(in.expect("fitness"));
        e.boost_epoch = in.integer<std::size_t>(in.expect("boost_epoch"));
        e.records_claimed = in.integer<std::size_t>(in.expect("claimed"));
        const auto num_pure = in.integer<std::size_t>(in.expect("pure"));
        e.pure_bins.reserve(num_pure);
        for (std::size_t k = 0; k < num_pure; ++k) {
            const auto w = in.words(in.next());
            if (w.size() != 5) in.fail("pure bin needs key, value, label, total, majority");
            PureBin p{in.integer<BinKey>(w[0]), in.real(w[1]), in.integer<ClassId>(w[2]), in.integer<std::size_t>(w[3]),
                      in.integer<std::size_t>(w[4])};
            if (p.label >= num_classes) in.fail("pure bin label out of range");
            e.pure_bins.push_back(p);
        }
        const auto num_amb = in.integer<std::size_t>(in.expect("ambiguous"));
        if (num_amb > 0) {
            const auto w = in.words(in.next());
            if (w.size() != num_amb) in.fail("ambiguous bin list length mismatch");
            for (auto k : w) e.ambiguous_bins.push_back(in.integer<BinKey>(k));
        }
        stack.entries.push_back(std::move(e));
    }
    in.expect("end");
    return stack;
}

void save_model(const EnsembleStack& stack, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot write " + path.string());
    out << write_model(stack);
}

EnsembleStack load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_model(ss.str());
}

}  // namespace bstac
