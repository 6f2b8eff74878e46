#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aerq/aerq.hpp"
#include "aerq/core.hpp"

namespace aerq {

struct ErrorLaw {
    enum class Kind { Normal, StudentT, Pareto };
    Kind kind = Kind::Normal;
    /// Degrees of freedom for StudentT, tail index for Pareto.
    double param = 0.0;
};

/// Accepts `normal`, `t(DF)` / `t:DF`, `pareto(A)` / `pareto:A`.
ErrorLaw parse_error_law(const std::string& text);
std::string to_string(const ErrorLaw& law);

/// Comma-separated list of laws; commas inside parentheses are not separators.
std::vector<ErrorLaw> parse_error_laws(const std::string& text);

/// y_i = beta0 + x_i'slopes + s_i e_i with x_i ~ U[-1, 1]^p and
/// s_i = 1 + hetero |x_i1| (s_i = 1 when p = 0 or hetero = 0).
struct GeneratorSpec {
    Index n = 20;
    Index p = 1;
    ErrorLaw law;
    double hetero = 0.0;
    /// p + 1 entries (intercept first); zeros when absent.
    std::optional<Vector> beta;
};

struct GeneratedInstance {
    Dataset data;
    GeneratorTruth truth;
};

/// Independent stream for (seed, index); streams do not depend on the order
/// in which instances are drawn.
std::mt19937_64 instance_stream(std::uint64_t seed, std::uint64_t index);

/// Throws InputError for invalid sizes or law parameters.
GeneratedInstance generate(const GeneratorSpec& spec, std::mt19937_64& rng);
GeneratedInstance generate(const GeneratorSpec& spec, std::uint64_t seed, std::uint64_t index = 0);

/// Mixed corpus: instance i takes law i mod |laws|; n, p, the
/// heteroscedasticity switch (probability hetero_fraction) and, when beta is
/// absent, N(0, 1) true coefficients are drawn from the instance stream.
struct CorpusSpec {
    Index n_min = 8;
    Index n_max = 60;
    Index p_min = 1;
    Index p_max = 5;
    std::vector<ErrorLaw> laws{ErrorLaw{}};
    double hetero_fraction = 0.0;
    double hetero = 1.0;
    std::optional<Vector> beta;
};

GeneratedInstance corpus_instance(const CorpusSpec& spec, std::uint64_t seed, std::uint64_t index);

} // namespace aerq
