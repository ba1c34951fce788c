#include "spike/tracy_widom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/airy.hpp>

#include "spike/errors.hpp"

namespace spike {

namespace {

struct Quadrature {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
Quadrature gauss_legendre(int n) {
    Quadrature q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

// Fritsch-Carlson slopes; keeps the interpolant monotone on monotone data.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    return d;
}

}  // namespace

double tw2_fredholm_cdf(double s, int nodes) {
    if (s > 40.0) return 1.0;
    static thread_local int cached_n = -1;
    static thread_local Quadrature rule;
    if (cached_n != nodes) {
        rule = gauss_legendre(nodes);
        cached_n = nodes;
    }
    // Ai(x)^2 ~ exp(-4/3 x^{3/2}) is below 1e-40 past x = 14.
    const double lo = s;
    const double hi = std::max(s, 0.0) + 14.0;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);

    std::vector<double> x(nodes), sw(nodes), ai(nodes), aip(nodes);
    for (int i = 0; i < nodes; ++i) {
        x[i] = mid + half * rule.x[i];
        sw[i] = std::sqrt(half * rule.w[i]);
        ai[i] = boost::math::airy_ai(x[i]);
        aip[i] = boost::math::airy_ai_prime(x[i]);
    }
    Eigen::MatrixXd a(nodes, nodes);
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            double k;
            if (i == j) {
                k = aip[i] * aip[i] - x[i] * ai[i] * ai[i];
            } else {
                k = (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
            }
            a(i, j) = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
        }
    }
    const double det = a.partialPivLu().determinant();
    return std::clamp(det, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

Tw2Table::Tw2Table(std::vector<double> s, std::vector<double> F) : s_(std::move(s)), F_(std::move(F)) {
    if (s_.size() != F_.size() || s_.size() < 2) {
        throw IoError("Tracy-Widom table needs at least two (s, F) rows");
    }
    for (std::size_t i = 1; i < s_.size(); ++i) {
        if (!(s_[i] > s_[i - 1])) throw IoError("Tracy-Widom grid must be increasing");
        // Rounding in the determinant can wiggle the far tails by ~1e-16.
        F_[i] = std::max(F_[i], F_[i - 1]);
    }
    slope_ = pchip_slopes(s_, F_);
}

Tw2Table Tw2Table::generate(double lo, double hi, double step) {
    const int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
    std::vector<double> s(count), F(count);
    for (int i = 0; i < count; ++i) {
        s[i] = lo + step * i;
        F[i] = tw2_fredholm_cdf(s[i]);
    }
    return Tw2Table(std::move(s), std::move(F));
}

Tw2Table Tw2Table::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open Tracy-Widom table " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("# tw2 v1", 0) != 0) {
        throw IoError("bad Tracy-Widom table header in " + path.string());
    }
    std::vector<double> s, F;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        if (!(row >> a >> b)) throw IoError("malformed row in " + path.string() + ": " + line);
        s.push_back(a);
        F.push_back(b);
    }
    return Tw2Table(std::move(s), std::move(F));
}

void Tw2Table::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write Tracy-Widom table " + path.string());
    char buf[64];
    std::snprintf(buf, sizeof buf, "# tw2 v1 grid=%.6g\n", spacing());
    out << buf;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.4f %.15e\n", s_[i], F_[i]);
        out << buf;
    }
}

double Tw2Table::spacing() const { return (s_.back() - s_.front()) / static_cast<double>(s_.size() - 1); }

double Tw2Table::cdf(double s) const {
    if (std::isnan(s)) return s;
    if (s <= s_.front()) return s == s_.front() ? F_.front() : 0.0;
    if (s >= s_.back()) return s == s_.back() ? F_.back() : 1.0;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * F_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
                     (-2 * t3 + 3 * t2) * F_[i + 1] + (t3 - t2) * h * slope_[i + 1];
    return std::clamp(v, 0.0, 1.0);
}

double Tw2Table::quantile(double p) const {
    if (!(p > 1e-12 && p < 1.0 - 1e-12)) {
        throw DomainError("Tracy-Widom quantile needs p in (1e-12, 1 - 1e-12), got " + std::to_string(p));
    }
    double lo = s_.front();
    double hi = s_.back();
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

const Tw2Table& tw2_table() {
    static const Tw2Table table = [] {
        if (const char* env = std::getenv("SPIKE_TW2_TABLE"); env && *env) {
            return Tw2Table::load(env);
        }
        const std::filesystem::path shipped = std::filesystem::path(SPIKE_DEFAULT_DATA_DIR) / "tw2_table.txt";
        if (std::filesystem::exists(shipped)) return Tw2Table::load(shipped);
        return Tw2Table::generate();
    }();
    return table;
}

double tw2_cdf(double s) { return tw2_table().cdf(s); }
double tw2_quantile(double p) { return tw2_table().quantile(p); }

}  // namespace spike
