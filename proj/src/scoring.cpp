#include "roughness/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace roughness {

namespace {

constexpr std::array<std::string_view, ParameterVector::kSize> kNames = {
    "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "alpha7",
    "alpha8", "alpha9", "alpha10", "v", "omega", "zeta"};

constexpr std::array<std::size_t, 5> kExponentIndices = {1, 3, 5, 7, 9};

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

double ParameterVector::get(std::size_t index) const
{
    if (index < 10)
        return alpha[index];
    switch (index) {
    case kV: return v;
    case kOmega: return static_cast<double>(omega);
    case kZeta: return zeta;
    default: throw std::out_of_range("ParameterVector index");
    }
}

ParameterVector ParameterVector::with(std::size_t index, double value) const
{
    ParameterVector out = *this;
    if (index < 10) {
        out.alpha[index] = value;
        return out;
    }
    switch (index) {
    case kV: out.v = value; break;
    case kOmega: {
        const double r = std::round(value);
        // Far outside int range is as invalid as < 1; clamp so the cast is defined.
        out.omega = static_cast<int>(std::clamp(r, -1.0, 1.0e9));
        break;
    }
    case kZeta: out.zeta = value; break;
    default: throw std::out_of_range("ParameterVector index");
    }
    return out;
}

bool ParameterVector::is_valid() const
{
    for (double a : alpha)
        if (!std::isfinite(a))
            return false;
    for (std::size_t i : kExponentIndices)
        if (alpha[i] < 0.0)
            return false;
    return omega >= 1 && std::isfinite(v) && v >= 0.0 && std::isfinite(zeta) && zeta > 0.0;
}

void ParameterVector::validate() const
{
    for (std::size_t i = 0; i < 10; ++i) {
        if (!std::isfinite(alpha[i]))
            throw SchemaError(std::string(kNames[i]), "must be finite");
    }
    for (std::size_t i : kExponentIndices)
        if (alpha[i] < 0.0)
            throw SchemaError(std::string(kNames[i]), "exponent must be non-negative");
    if (!(std::isfinite(v) && v >= 0.0))
        throw SchemaError("v", "must be finite and non-negative");
    if (omega < 1)
        throw SchemaError("omega", "must be an integer >= 1");
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw SchemaError("zeta", "must be finite and positive");
}

std::string_view ParameterVector::name(std::size_t index) { return kNames.at(index); }

ParameterVector ParameterVector::initial_guess()
{
    ParameterVector p;
    p.alpha = {1.0, 1.0, 0.1, 1.0, 0.1, 1.0, 0.1, 1.0, 0.1, 1.0};
    p.v = 1.5;
    p.omega = 10;
    p.zeta = 1.0;
    return p;
}

double delta(const LaserPoint& a, const LaserPoint& b, const ParameterVector& p)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return kernels::pair_delta(std::abs(a.z - b.z), std::abs(a.tau - b.tau),
                               std::sqrt(dx * dx + dy * dy), std::abs(a.roll_rate),
                               std::abs(b.roll_rate), std::abs(a.pitch_rate),
                               std::abs(b.pitch_rate), p.alpha);
}

std::vector<double> top_scores(std::span<double> scores, int omega)
{
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(omega, 0)), scores.size());
    if (keep < scores.size())
        std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep), scores.end(),
                         std::greater<>());
    std::vector<double> w(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(w.begin(), w.end());
    return w;
}

std::vector<double> score_window(const kernels::PointColumns& points, const ParameterVector& p)
{
    if (points.size() < 2)
        throw UnscorablePatchError("score_window needs at least two points");
    // Scratch reused across calls on the same thread.
    thread_local std::vector<double> scratch;
    scratch.resize(points.pair_count());
    kernels::pair_scores(points, p.alpha, scratch);
    return top_scores(scratch, p.omega);
}

std::vector<double> score_window(std::span<const LaserPoint> points, const ParameterVector& p)
{
    return score_window(kernels::PointColumns(points), p);
}

double accumulate(std::span<const double> w, double v, int omega)
{
    (void)omega;  // |W| <= omega is the caller's contract
    double total = 0.0;
    double weight = 1.0;
    for (double value : w) {
        total += value * weight;
        weight *= v;
    }
    return total;
}

double combine(double r_left, double r_right, double zeta)
{
    return std::pow(r_left, zeta) + std::pow(r_right, zeta);
}

bool classify(double r_combined, const ClassifierModel& model) { return r_combined > model.mu; }

RoughnessScore score_patch(const kernels::PointColumns& left, const kernels::PointColumns& right,
                           const ParameterVector& p)
{
    RoughnessScore s;
    if (left.size() < 2 || right.size() < 2) {
        s.scorable = false;
        return s;
    }
    s.r_left = accumulate(score_window(left, p), p.v, p.omega);
    s.r_right = accumulate(score_window(right, p), p.v, p.omega);
    s.r_combined = combine(std::max(s.r_left, 0.0), std::max(s.r_right, 0.0), p.zeta);
    return s;
}

RoughnessScore score_patch(std::span<const LaserPoint> left, std::span<const LaserPoint> right,
                           const ParameterVector& p)
{
    return score_patch(kernels::PointColumns(left), kernels::PointColumns(right), p);
}

void write_model(std::ostream& out, const ClassifierModel& model)
{
    out << "# terrain roughness classifier\n";
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i)
        out << kNames[i] << " = " << format_double(model.params.get(i)) << '\n';
    out << "mu = " << format_double(model.mu) << '\n';
}

ClassifierModel read_model(std::istream& in)
{
    std::map<std::string, double, std::less<>> values;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#')
            continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw SchemaError(std::string(trim(view)), "expected 'name = value'");
        const std::string key(trim(view.substr(0, eq)));
        const std::string_view text = trim(view.substr(eq + 1));

        const bool known = key == "mu" || std::find(kNames.begin(), kNames.end(), key) != kNames.end();
        if (!known)
            throw SchemaError(key, "unknown model field");
        if (values.count(key))
            throw SchemaError(key, "duplicate model field");

        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value))
            throw SchemaError(key, "not a finite number: '" + std::string(text) + "'");
        values.emplace(key, value);
    }

    ClassifierModel model;
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
        const auto it = values.find(kNames[i]);
        if (it == values.end())
            throw SchemaError(std::string(kNames[i]), "missing model field");
        if (i == ParameterVector::kOmega && it->second != std::round(it->second))
            throw SchemaError("omega", "must be an integer");
        model.params = model.params.with(i, it->second);
    }
    const auto mu = values.find("mu");
    if (mu == values.end())
        throw SchemaError("mu", "missing model field");
    model.mu = mu->second;
    model.params.validate();
    return model;
}

}  // namespace roughness
