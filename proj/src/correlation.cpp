#include "skyreview/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace skyreview {

using ordered_json = nlohmann::ordered_json;

namespace {

// Continued-fraction evaluation of the regularized incomplete beta
// function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double nu) {
    if (!(nu > 0)) throw CorrelationError("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = nu / (nu + t * t);
    double p = incbeta(nu / 2.0, 0.5, x);
    if (p < 1e-300) p = 0.0;
    return std::clamp(p, 0.0, 1.0);
}

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw CorrelationError("length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw CorrelationError("insufficient pairs");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    // two-pass shifted sums
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw CorrelationError("degenerate variable");

    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    double p;
    if (std::fabs(r) >= 1.0) {
        p = 0.0;
    } else {
        const double nu = static_cast<double>(n - 2);
        const double t = r * std::sqrt(nu / (1.0 - r * r));
        p = student_t_two_sided_p(t, nu);
    }
    return {r, p, n};
}

std::optional<PearsonResult> pearson_pairwise(
    const std::vector<std::optional<double>>& x,
    const std::vector<std::optional<double>>& y) {
    if (x.size() != y.size()) throw CorrelationError("length mismatch");
    std::vector<double> xc, yc;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
            xc.push_back(*x[i]);
            yc.push_back(*y[i]);
        }
    }
    if (xc.size() < 3) return std::nullopt;
    try {
        return pearson(xc, yc);
    } catch (const CorrelationError&) {
        return std::nullopt;
    }
}

std::optional<std::size_t> CorrelationReport::index_of(const std::string& name) const {
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables.begin());
}

CorrelationReport correlation_matrix(const Dataset& d) {
    if (d.records.empty()) throw CorrelationError("empty dataset");

    CorrelationReport rep;
    rep.category = d.category;
    rep.variables = d.schema().features;
    rep.variables.push_back("overall");
    rep.variables.push_back("sentiment");
    const std::size_t k = rep.variables.size();

    // columns of optionally-present values, one per variable
    std::vector<std::vector<std::optional<double>>> cols(
        k, std::vector<std::optional<double>>(d.records.size()));
    const auto& feats = d.schema().features;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        const auto& rec = d.records[i];
        for (std::size_t f = 0; f < feats.size(); ++f) {
            auto it = rec.ratings.find(feats[f]);
            if (it != rec.ratings.end()) cols[f][i] = static_cast<double>(it->second);
        }
        if (rec.overall) cols[feats.size()][i] = static_cast<double>(*rec.overall);
        if (rec.sentiment) cols[feats.size() + 1][i] = *rec.sentiment;
    }

    rep.r.assign(k, std::vector<std::optional<double>>(k));
    rep.p.assign(k, std::vector<std::optional<double>>(k));
    rep.n.assign(k, std::vector<std::size_t>(k, 0));

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            std::size_t complete = 0;
            for (std::size_t t = 0; t < cols[i].size(); ++t)
                if (cols[i][t] && cols[j][t]) ++complete;
            rep.n[i][j] = rep.n[j][i] = complete;
            if (i == j) {
                if (complete >= 2) {
                    rep.r[i][i] = 1.0;
                    rep.p[i][i] = 0.0;
                }
                continue;
            }
            if (auto res = pearson_pairwise(cols[i], cols[j])) {
                rep.r[i][j] = rep.r[j][i] = res->r;
                rep.p[i][j] = rep.p[j][i] = res->p;
            }
        }
    }
    return rep;
}

std::vector<std::string> select_features(const CorrelationReport& rep, double threshold,
                                         bool include_overall) {
    auto oi = rep.index_of("overall");
    if (!oi) throw CorrelationError("report has no overall row");

    std::vector<std::pair<double, std::string>> picked;
    for (std::size_t i = 0; i < rep.variables.size(); ++i) {
        if (i == *oi) continue;
        const auto& rv = rep.r[i][*oi];
        if (rv && *rv > threshold) picked.emplace_back(*rv, rep.variables[i]);
    }
    std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<std::string> out;
    if (include_overall) out.push_back("overall");
    for (auto& [r, name] : picked) out.push_back(std::move(name));
    return out;
}

namespace {

ordered_json opt_matrix_to_json(const std::vector<std::vector<std::optional<double>>>& m) {
    ordered_json out = ordered_json::array();
    for (const auto& row : m) {
        ordered_json jr = ordered_json::array();
        for (const auto& v : row) jr.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
        out.push_back(std::move(jr));
    }
    return out;
}

std::vector<std::vector<std::optional<double>>> opt_matrix_from_json(const ordered_json& j) {
    std::vector<std::vector<std::optional<double>>> m;
    for (const auto& row : j) {
        std::vector<std::optional<double>> r;
        for (const auto& v : row)
            r.push_back(v.is_null() ? std::optional<double>{} : std::optional<double>(v.get<double>()));
        m.push_back(std::move(r));
    }
    return m;
}

}  // namespace

std::string report_to_json(const CorrelationReport& rep) {
    ordered_json j;
    j["format"] = "skyreview-correlation";
    j["version"] = 1;
    j["category"] = category_name(rep.category);
    j["variables"] = rep.variables;
    j["r"] = opt_matrix_to_json(rep.r);
    j["p"] = opt_matrix_to_json(rep.p);
    j["n"] = rep.n;
    return j.dump(2) + "\n";
}

CorrelationReport report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.value("format", "") != "skyreview-correlation")
        throw std::runtime_error("not a correlation report");
    CorrelationReport rep;
    rep.category = category_from_name(j.at("category").get<std::string>());
    rep.variables = j.at("variables").get<std::vector<std::string>>();
    rep.r = opt_matrix_from_json(j.at("r"));
    rep.p = opt_matrix_from_json(j.at("p"));
    rep.n = j.at("n").get<std::vector<std::vector<std::size_t>>>();
    return rep;
}

std::string report_to_csv(const CorrelationReport& rep) {
    std::ostringstream os;
    os << "# skyreview correlation matrix, category=" << category_name(rep.category) << "\n";
    os << "variable";
    for (const auto& v : rep.variables) os << ',' << v;
    os << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < rep.variables.size(); ++i) {
        os << rep.variables[i];
        for (std::size_t jn = 0; jn < rep.variables.size(); ++jn) {
            os << ',';
            if (rep.r[i][jn]) os << *rep.r[i][jn];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace skyreview
