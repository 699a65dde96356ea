#include "qpbe/power_series.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qpbe {

namespace {

int total_degree(const std::vector<int>& k) {
    int d = 0;
    for (int e : k) {
        if (e < 0) throw std::invalid_argument("PowerSeries: negative exponent");
        d += e;
    }
    return d;
}

void check_compatible(const PowerSeries& a, const PowerSeries& b) {
    if (a.dimension != b.dimension || a.order != b.order) {
        throw std::invalid_argument("PowerSeries: mismatched dimension or truncation order");
    }
}

}  // namespace

PowerSeries::PowerSeries(int dimension_, int order_) : dimension(dimension_), order(order_) {
    if (dimension < 1) throw std::invalid_argument("PowerSeries: dimension must be positive");
    if (order < 0) throw std::invalid_argument("PowerSeries: order must be nonnegative");
}

double PowerSeries::at(const std::vector<int>& k) const {
    auto it = coeff.find(k);
    return it == coeff.end() ? 0.0 : it->second;
}

PowerSeries& PowerSeries::set(const std::vector<int>& k, double value) {
    if (static_cast<int>(k.size()) != dimension) {
        throw std::invalid_argument("PowerSeries: exponent dimension mismatch");
    }
    if (total_degree(k) > order) throw std::invalid_argument("PowerSeries: exponent beyond order");
    if (value == 0.0) {
        coeff.erase(k);
    } else {
        coeff[k] = value;
    }
    return *this;
}

double PowerSeries::constant_term() const { return at(std::vector<int>(dimension, 0)); }

PowerSeries series_add(const PowerSeries& a, const PowerSeries& b) {
    check_compatible(a, b);
    PowerSeries out = a;
    for (const auto& [k, v] : b.coeff) {
        const double s = out.at(k) + v;
        out.set(k, s);
    }
    return out;
}

PowerSeries series_scale(const PowerSeries& a, double c) {
    PowerSeries out(a.dimension, a.order);
    if (c == 0.0) return out;
    for (const auto& [k, v] : a.coeff) out.coeff[k] = v * c;
    return out;
}

PowerSeries series_product(const PowerSeries& a, const PowerSeries& b) {
    check_compatible(a, b);
    PowerSeries out(a.dimension, a.order);
    std::vector<int> k(a.dimension);
    for (const auto& [ka, va] : a.coeff) {
        const int da = total_degree(ka);
        for (const auto& [kb, vb] : b.coeff) {
            if (da + total_degree(kb) > a.order) continue;
            for (int i = 0; i < a.dimension; ++i) k[i] = ka[i] + kb[i];
            out.coeff[k] += va * vb;
        }
    }
    std::erase_if(out.coeff, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

PowerSeries series_exp(const PowerSeries& a) {
    if (a.constant_term() != 0.0) {
        throw std::invalid_argument("series_exp: constant term must be zero");
    }
    PowerSeries out(a.dimension, a.order);
    out.set(std::vector<int>(a.dimension, 0), 1.0);
    PowerSeries power = out;  // a^0
    double factorial = 1.0;
    for (int k = 1; k <= a.order; ++k) {
        power = series_product(power, a);
        factorial *= k;
        out = series_add(out, series_scale(power, 1.0 / factorial));
    }
    return out;
}

PowerSeries series_log(const PowerSeries& a) {
    if (std::abs(a.constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument("series_log: constant term must be 1");
    }
    PowerSeries w = a;
    w.set(std::vector<int>(a.dimension, 0), 0.0);
    PowerSeries out(a.dimension, a.order);
    PowerSeries power(a.dimension, a.order);
    power.set(std::vector<int>(a.dimension, 0), 1.0);  // w^0
    for (int k = 1; k <= a.order; ++k) {
        power = series_product(power, w);
        const double c = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
        out = series_add(out, series_scale(power, c));
    }
    return out;
}

int Poly1::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        if (c[i] != 0.0) return i;
    }
    return 0;
}

double Poly1::eval(double x) const {
    double v = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
    return v;
}

Poly1 Poly1::operator+(const Poly1& o) const {
    Poly1 out;
    out.c.resize(std::max(c.size(), o.c.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) out.c[i] += o.c[i];
    return out;
}

Poly1 Poly1::operator*(const Poly1& o) const {
    if (c.empty() || o.c.empty()) return Poly1();
    Poly1 out;
    out.c.assign(c.size() + o.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < o.c.size(); ++j) out.c[i + j] += c[i] * o.c[j];
    }
    return out;
}

Poly1 Poly1::operator*(double s) const {
    Poly1 out = *this;
    for (double& v : out.c) v *= s;
    return out;
}

}  // namespace qpbe
