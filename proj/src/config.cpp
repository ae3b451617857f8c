#include "tvc/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tvc {

BundleConfig RunConfig::bundle_config() const {
    return {n_tokens, dim, heads, codes, factor, segment, depth};
}

WarmupConfig RunConfig::warmup_config() const {
    return {learning_rate, steps, batch_size, seed, 0.0};
}

AlignTrainConfig RunConfig::align_config() const {
    AlignTrainConfig c;
    c.learning_rate = 0.05;
    c.steps = steps;
    c.batch_size = batch_size;
    c.embed_dim = embed_dim;
    c.seed = seed;
    return c;
}

ForecastConfig RunConfig::forecast_config() const {
    return {context_length, horizon, w_obs, w_out};
}

void RunConfig::validate() const {
    bundle_config().validate();
    require(embed_dim >= 1, Err::ShapeMismatch, "E must be >= 1");
    require(learning_rate > 0.0, Err::ShapeMismatch, "learning_rate must be > 0");
    require(steps >= 1, Err::ShapeMismatch, "steps must be >= 1");
    require(batch_size >= 1, Err::ShapeMismatch, "batch_size must be >= 1");
    require(context_length == bundle_config().series_length(), Err::ShapeMismatch,
            "context_length must equal N*l");
    require(horizon >= 1, Err::ShapeMismatch, "horizon must be >= 1");
    require(w_obs == bundle_config().image_width(), Err::ShapeMismatch,
            "w_obs must equal the image width f*sqrt(N)");
    require(w_out > w_obs && (w_out - w_obs) % w_obs == 0, Err::ShapeMismatch,
            "w_out must widen w_obs by a whole number of blocks");
}

namespace {

bool parse_int(const std::string& s, long long* out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_float(const std::string& s, double* out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        require(eq != std::string::npos, Err::ParseError,
                "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        long long iv = 0;
        double fv = 0.0;
        auto want_int = [&](int* field) {
            require(parse_int(val, &iv), Err::ParseError,
                    "line " + std::to_string(lineno) + ": integer expected for " + key);
            *field = int(iv);
        };

        if (key == "seed") {
            require(parse_int(val, &iv) && iv >= 0, Err::ParseError, "seed must be an integer");
            cfg.seed = uint64_t(iv);
        } else if (key == "N") {
            want_int(&cfg.n_tokens);
        } else if (key == "D") {
            want_int(&cfg.dim);
        } else if (key == "M") {
            want_int(&cfg.heads);
        } else if (key == "K") {
            want_int(&cfg.codes);
        } else if (key == "f") {
            want_int(&cfg.factor);
        } else if (key == "l") {
            want_int(&cfg.segment);
        } else if (key == "depth") {
            want_int(&cfg.depth);
        } else if (key == "E") {
            want_int(&cfg.embed_dim);
        } else if (key == "learning_rate") {
            require(parse_float(val, &fv), Err::ParseError, "learning_rate must be a number");
            cfg.learning_rate = fv;
        } else if (key == "steps") {
            want_int(&cfg.steps);
        } else if (key == "batch_size") {
            want_int(&cfg.batch_size);
        } else if (key == "context_length") {
            want_int(&cfg.context_length);
        } else if (key == "horizon") {
            want_int(&cfg.horizon);
        } else if (key == "w_obs") {
            want_int(&cfg.w_obs);
        } else if (key == "w_out") {
            want_int(&cfg.w_out);
        } else if (key == "mode") {
            if (val == "strict")
                cfg.mode = SegmentMode::Strict;
            else if (val == "lenient")
                cfg.mode = SegmentMode::Lenient;
            else
                fail(Err::ParseError, "mode must be strict or lenient");
        } else {
            fail(Err::ParseError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), Err::EmptyFile, "cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "seed=" << cfg.seed << "\n"
        << "N=" << cfg.n_tokens << "\n"
        << "D=" << cfg.dim << "\n"
        << "M=" << cfg.heads << "\n"
        << "K=" << cfg.codes << "\n"
        << "f=" << cfg.factor << "\n"
        << "l=" << cfg.segment << "\n"
        << "depth=" << cfg.depth << "\n"
        << "E=" << cfg.embed_dim << "\n"
        << "learning_rate=" << cfg.learning_rate << "\n"
        << "steps=" << cfg.steps << "\n"
        << "batch_size=" << cfg.batch_size << "\n"
        << "context_length=" << cfg.context_length << "\n"
        << "horizon=" << cfg.horizon << "\n"
        << "w_obs=" << cfg.w_obs << "\n"
        << "w_out=" << cfg.w_out << "\n"
        << "mode=" << (cfg.mode == SegmentMode::Strict ? "strict" : "lenient") << "\n";
    return out.str();
}

}  // namespace tvc
