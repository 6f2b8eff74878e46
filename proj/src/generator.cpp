#include "aerq/generator.hpp"

#include <cmath>
#include <sstream>

#include "aerq/error.hpp"

namespace aerq {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double parse_param(const std::string& text, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InputError("invalid distribution parameter in '" + whole + "'");
    }
    return v;
}

double draw_error(const ErrorLaw& law, std::mt19937_64& rng) {
    switch (law.kind) {
    case ErrorLaw::Kind::Normal: return std::normal_distribution<double>()(rng);
    case ErrorLaw::Kind::StudentT: return std::student_t_distribution<double>(law.param)(rng);
    case ErrorLaw::Kind::Pareto: {
        // Inverse CDF of Pareto(1, a) on (0, 1].
        const double u = 1.0 - std::uniform_real_distribution<double>()(rng);
        return std::pow(u, -1.0 / law.param);
    }
    }
    return 0.0;
}

void check_law(const ErrorLaw& law) {
    if (law.kind != ErrorLaw::Kind::Normal && !(law.param > 0.0 && std::isfinite(law.param))) {
        throw InputError("distribution parameter must be positive and finite in '" + to_string(law) + "'");
    }
}

} // namespace

ErrorLaw parse_error_law(const std::string& text) {
    std::string name = text;
    std::string arg;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') throw InputError("unbalanced parentheses in '" + text + "'");
        name = text.substr(0, open);
        arg = text.substr(open + 1, text.size() - open - 2);
    } else if (const auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    ErrorLaw law;
    if (name == "normal" && arg.empty()) {
        law.kind = ErrorLaw::Kind::Normal;
    } else if (name == "t" || name == "student-t") {
        law.kind = ErrorLaw::Kind::StudentT;
        law.param = parse_param(arg, text);
    } else if (name == "pareto") {
        law.kind = ErrorLaw::Kind::Pareto;
        law.param = parse_param(arg, text);
    } else {
        throw InputError("unknown error distribution '" + text + "' (normal, t(df), pareto(tail))");
    }
    check_law(law);
    return law;
}

std::vector<ErrorLaw> parse_error_laws(const std::string& text) {
    std::vector<ErrorLaw> out;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(parse_error_law(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(parse_error_law(cur));
    return out;
}

std::string to_string(const ErrorLaw& law) {
    std::ostringstream s;
    switch (law.kind) {
    case ErrorLaw::Kind::Normal: s << "normal"; break;
    case ErrorLaw::Kind::StudentT: s << "t(" << law.param << ")"; break;
    case ErrorLaw::Kind::Pareto: s << "pareto(" << law.param << ")"; break;
    }
    return s.str();
}

std::mt19937_64 instance_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    std::uint64_t mixed_index = index;
    state ^= splitmix64(mixed_index);
    std::uint32_t words[8];
    for (int k = 0; k < 4; ++k) {
        const std::uint64_t v = splitmix64(state);
        words[2 * k] = static_cast<std::uint32_t>(v);
        words[2 * k + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return std::mt19937_64(seq);
}

GeneratedInstance generate(const GeneratorSpec& spec, std::mt19937_64& rng) {
    if (spec.n < 1 || spec.p < 0) throw InputError("generator: need n >= 1 and p >= 0");
    check_law(spec.law);
    if (!(spec.hetero >= 0.0 && std::isfinite(spec.hetero))) {
        throw InputError("generator: heteroscedasticity multiplier must be finite and >= 0");
    }
    const Index n = spec.n;
    const Index p = spec.p;
    Vector beta = Vector::Zero(p + 1);
    if (spec.beta) {
        if (spec.beta->size() != p + 1) {
            std::ostringstream msg;
            msg << "generator: beta needs p + 1 = " << p + 1 << " entries, got " << spec.beta->size();
            throw InputError(msg.str());
        }
        beta = *spec.beta;
    }

    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix x(n, p);
    Vector e(n);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) x(i, j) = unif(rng);
        e(i) = draw_error(spec.law, rng);
        const double scale = p > 0 ? 1.0 + spec.hetero * std::abs(x(i, 0)) : 1.0;
        e(i) *= scale;
        y(i) = beta(0) + x.row(i).dot(beta.tail(p)) + e(i);
    }

    GeneratedInstance out{validate_dataset(std::move(y), std::move(x)), GeneratorTruth{}};
    out.truth.beta0 = beta(0);
    out.truth.slopes = beta.tail(p);
    out.truth.errors = std::move(e);
    return out;
}

GeneratedInstance generate(const GeneratorSpec& spec, std::uint64_t seed, std::uint64_t index) {
    auto rng = instance_stream(seed, index);
    return generate(spec, rng);
}

GeneratedInstance corpus_instance(const CorpusSpec& spec, std::uint64_t seed, std::uint64_t index) {
    if (spec.laws.empty()) throw InputError("corpus: no error laws given");
    if (spec.n_min > spec.n_max || spec.p_min > spec.p_max || spec.p_min < 0) {
        throw InputError("corpus: invalid n or p range");
    }
    auto rng = instance_stream(seed, index);
    GeneratorSpec g;
    g.p = std::uniform_int_distribution<Index>(spec.p_min, spec.p_max)(rng);
    g.n = std::uniform_int_distribution<Index>(std::max(spec.n_min, g.p + 2), std::max(spec.n_max, g.p + 2))(rng);
    g.law = spec.laws[index % spec.laws.size()];
    g.hetero = std::bernoulli_distribution(spec.hetero_fraction)(rng) ? spec.hetero : 0.0;
    if (spec.beta) {
        g.beta = spec.beta;
    } else {
        std::normal_distribution<double> gauss;
        Vector beta(g.p + 1);
        for (Index j = 0; j <= g.p; ++j) beta(j) = gauss(rng);
        g.beta = beta;
    }
    return generate(g, rng);
}

} // namespace aerq
