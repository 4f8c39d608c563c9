#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace oracle {

namespace {

constexpr double kPi = std::numbers::pi;

long double factorial(int n) {
    long double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

long double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

double sh_table(int l, int m, const V3& d) {
    const double x = d[0], y = d[1], z = d[2];
    switch (l * 10 + (m + 5)) {
        case 5: return 0.5 * std::sqrt(1.0 / kPi);
        case 14: return std::sqrt(3.0 / (4 * kPi)) * y;
        case 15: return std::sqrt(3.0 / (4 * kPi)) * z;
        case 16: return std::sqrt(3.0 / (4 * kPi)) * x;
        case 23: return 0.5 * std::sqrt(15.0 / kPi) * x * y;
        case 24: return 0.5 * std::sqrt(15.0 / kPi) * y * z;
        case 25: return 0.25 * std::sqrt(5.0 / kPi) * (3 * z * z - 1);
        case 26: return 0.5 * std::sqrt(15.0 / kPi) * x * z;
        case 27: return 0.25 * std::sqrt(15.0 / kPi) * (x * x - y * y);
        case 32: return 0.25 * std::sqrt(35.0 / (2 * kPi)) * y * (3 * x * x - y * y);
        case 33: return 0.5 * std::sqrt(105.0 / kPi) * x * y * z;
        case 34: return 0.25 * std::sqrt(21.0 / (2 * kPi)) * y * (5 * z * z - 1);
        case 35: return 0.25 * std::sqrt(7.0 / kPi) * z * (5 * z * z - 3);
        case 36: return 0.25 * std::sqrt(21.0 / (2 * kPi)) * x * (5 * z * z - 1);
        case 37: return 0.25 * std::sqrt(105.0 / kPi) * z * (x * x - y * y);
        case 38: return 0.25 * std::sqrt(35.0 / (2 * kPi)) * x * (x * x - 3 * y * y);
        default: throw std::invalid_argument("sh_table covers l <= 3");
    }
}

double sh_rodrigues(int l, int m, const V3& d) {
    if (l > 10 || std::abs(m) > l) throw std::invalid_argument("sh_rodrigues covers l <= 10");
    const int am = std::abs(m);
    // Legendre polynomial coefficients: P_l(x) = 2^-l sum_k (-1)^k C(l,k) C(2l-2k,l) x^(l-2k)
    std::vector<long double> c(l + 1, 0.0L);
    for (int k = 0; 2 * k <= l; ++k) {
        c[l - 2 * k] = (k % 2 ? -1.0L : 1.0L) * binomial(l, k) * binomial(2 * l - 2 * k, l) / std::pow(2.0L, l);
    }
    for (int i = 0; i < am; ++i) {
        for (int p = 0; p + 1 < static_cast<int>(c.size()); ++p) c[p] = c[p + 1] * (p + 1);
        c.back() = 0.0L;
    }
    const long double z = d[2];
    long double poly = 0.0L;
    for (int p = static_cast<int>(c.size()) - 1; p >= 0; --p) poly = poly * z + c[p];
    const long double sin_theta = std::sqrt(std::max(0.0L, 1.0L - z * z));
    const long double plm = std::pow(sin_theta, am) * poly;
    const long double norm =
        std::sqrt((2 * l + 1) / (4 * std::numbers::pi_v<long double>) * factorial(l - am) / factorial(l + am));
    const long double phi = std::atan2(static_cast<long double>(d[1]), static_cast<long double>(d[0]));
    if (m == 0) return static_cast<double>(norm * plm);
    const long double trig = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
    return static_cast<double>(std::sqrt(2.0L) * norm * plm * trig);
}

V3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    while (true) {
        V3 v{n(rng), n(rng), n(rng)};
        const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (len > 1e-9) return {v[0] / len, v[1] / len, v[2] / len};
    }
}

double determinant(Matrix a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (a[pivot][col] == 0.0) return 0.0;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
        }
    }
    return det;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<double>(b.front().size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b.front().size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.front().size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    }
    return t;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    }
    return m;
}

Matrix identity(int n) {
    Matrix m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

std::array<V3, 3> random_rotation(std::mt19937_64& rng) {
    const V3 k = random_direction(rng);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const double t = u(rng), c = std::cos(t), s = std::sin(t);
    std::array<V3, 3> r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) r[i][j] = (1 - c) * k[i] * k[j] + (i == j ? c : 0.0);
    }
    r[0][1] -= s * k[2];
    r[1][0] += s * k[2];
    r[0][2] += s * k[1];
    r[2][0] -= s * k[1];
    r[1][2] -= s * k[0];
    r[2][1] += s * k[0];
    return r;
}

V3 rotate(const std::array<V3, 3>& r, const V3& v) {
    V3 out{};
    for (int i = 0; i < 3; ++i) out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    return out;
}

double cot_angle(const V3& a, const V3& b, const V3& c) {
    V3 u{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    V3 v{c[0] - b[0], c[1] - b[1], c[2] - b[2]};
    const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double angle = std::acos(std::clamp(dot / (nu * nv), -1.0, 1.0));
    return 1.0 / std::tan(angle);
}

double otsu_scan(const std::vector<double>& values, const std::vector<double>& weights, int bins) {
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    auto bin_of = [&](double v) { return std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins)); };
    double best = -1.0, best_t = lo;
    for (int edge = 1; edge < bins; ++edge) {
        double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double w = weights.empty() ? 1.0 : weights[i];
            const double b = bin_of(values[i]);
            if (b < edge) {
                w0 += w;
                s0 += w * b;
            } else {
                w1 += w;
                s1 += w * b;
            }
        }
        if (w0 <= 0 || w1 <= 0) continue;
        const double between = w0 * w1 * std::pow(s0 / w0 - s1 / w1, 2);
        if (between > best * (1 + 1e-12) + 1e-300) {
            best = between;
            best_t = lo + edge * (hi - lo) / bins;
        }
    }
    return best_t;
}

int count_label_components(const std::vector<std::array<int, 3>>& faces, const std::vector<int>& labels) {
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        for (int k = 0; k < 3; ++k) {
            int a = faces[f][k], b = faces[f][(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_faces[{a, b}].push_back(f);
        }
    }
    std::vector<std::vector<int>> adj(faces.size());
    for (const auto& [e, fs] : edge_faces) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
            for (std::size_t j = i + 1; j < fs.size(); ++j) {
                adj[fs[i]].push_back(fs[j]);
                adj[fs[j]].push_back(fs[i]);
            }
        }
    }
    std::vector<char> seen(faces.size(), 0);
    int count = 0;
    for (std::size_t s = 0; s < faces.size(); ++s) {
        if (seen[s]) continue;
        ++count;
        std::queue<int> q;
        q.push(static_cast<int>(s));
        seen[s] = 1;
        while (!q.empty()) {
            const int f = q.front();
            q.pop();
            for (int g : adj[f]) {
                if (!seen[g] && labels[g] == labels[f]) {
                    seen[g] = 1;
                    q.push(g);
                }
            }
        }
    }
    return count;
}

V3 hsv_to_rgb(double h, double s, double v) {
    if (s == 0.0) return {v, v, v};
    const double hh = 6.0 * (h - std::floor(h));
    const int sector = static_cast<int>(hh) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

double circular_distance(double a, double b) {
    a -= std::floor(a);
    b -= std::floor(b);
    const double d = std::abs(a - b);
    return d < 1 - d ? d : 1 - d;
}

}  // namespace oracle
