#include "curvedrt/fem_core.hpp"

#include <cmath>
#include <functional>

namespace curvedrt {

GaussRule gauss_legendre(int n) {
    if (n < 1)
        throw ConfigError("gauss_legendre: n must be >= 1");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // root of P_n on [-1,1] by Newton from the Chebyshev estimate
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        r.nodes[n - 1 - i] = 0.5 * (1 + x);
        r.weights[n - 1 - i] = 1.0 / ((1 - x * x) * dp * dp);
    }
    return r;
}

TriangleRule triangle_rule(int degree) {
    if (degree < 0 || degree > 20)
        throw ConfigError("triangle_rule: unsupported degree " + std::to_string(degree));
    // collapse the square (u,v) -> (x,y) = (u, v(1-u)); the Jacobian 1-u raises
    // the u-degree by one
    int m = (degree + 3) / 2;
    GaussRule g = gauss_legendre(m);
    TriangleRule r;
    r.degree = degree;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double u = g.nodes[i], v = g.nodes[j];
            r.points.push_back({u, v * (1 - u)});
            r.weights.push_back(g.weights[i] * g.weights[j] * (1 - u));
        }
    return r;
}

double legendre01(int m, double s) {
    double x = 2 * s - 1;
    double p0 = 1, p1 = x;
    if (m == 0)
        return p0;
    for (int j = 1; j < m; ++j) {
        double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

namespace {

std::vector<std::array<int, 2>> monomials_upto(int deg) {
    std::vector<std::array<int, 2>> m;
    for (int d = 0; d <= deg; ++d)
        for (int a = 0; a <= d; ++a)
            m.push_back({d - a, a});
    return m;
}

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i)
        r *= x;
    return r;
}

} // namespace

Vec2 FluxSpan::eval(int j, const Vec2& x) const {
    Vec2 X = (x - origin) / scale;
    int npk = (k + 1) * (k + 2) / 2;
    if (j < 2 * npk) {
        auto mono = monomials_upto(k)[j % npk];
        double v = ipow(X.x(), mono[0]) * ipow(X.y(), mono[1]);
        return j < npk ? Vec2(v, 0) : Vec2(0, v);
    }
    int a = j - 2 * npk; // X * (homogeneous monomial X^(k-a) Y^a)
    double v = ipow(X.x(), k - a) * ipow(X.y(), a);
    return v * X;
}

double FluxSpan::div(int j, const Vec2& x) const {
    Vec2 X = (x - origin) / scale;
    int npk = (k + 1) * (k + 2) / 2;
    if (j < 2 * npk) {
        auto mono = monomials_upto(k)[j % npk];
        int p = mono[0], q = mono[1];
        double d = j < npk ? (p ? p * ipow(X.x(), p - 1) * ipow(X.y(), q) : 0.0)
                           : (q ? q * ipow(X.x(), p) * ipow(X.y(), q - 1) : 0.0);
        return d / scale;
    }
    int a = j - 2 * npk;
    // div(X * m) = (2 + k) m for homogeneous m of degree k
    return (2 + k) * ipow(X.x(), k - a) * ipow(X.y(), a) / scale;
}

namespace {

// canonical functionals applied to an arbitrary field on the reference triangle
Eigen::MatrixXd ref_dofs_applied(int k, const std::function<Vec2(int, const Vec2&)>& field,
                                 int nfields) {
    const Vec2 v[3] = {{0, 0}, {1, 0}, {0, 1}};
    const Vec2 nrm[3] = {{0, -1}, {M_SQRT1_2, M_SQRT1_2}, {-1, 0}};
    int nk = (k + 1) * (k + 3);
    Eigen::MatrixXd D(nk, nfields);
    GaussRule g = gauss_legendre(k + 2);
    for (int l = 0; l < 3; ++l) {
        Vec2 a = v[l], d = v[(l + 1) % 3] - v[l];
        for (int m = 0; m <= k; ++m)
            for (int j = 0; j < nfields; ++j) {
                double acc = 0;
                for (size_t q = 0; q < g.nodes.size(); ++q) {
                    double s = g.nodes[q];
                    acc += g.weights[q] * field(j, a + s * d).dot(nrm[l]) * legendre01(m, s);
                }
                D(l * (k + 1) + m, j) = acc;
            }
    }
    if (k >= 1) {
        TriangleRule tr = triangle_rule(2 * k + 2);
        auto monos = monomials_upto(k - 1);
        int base = 3 * (k + 1);
        for (int c = 0; c < 2; ++c)
            for (size_t i = 0; i < monos.size(); ++i)
                for (int j = 0; j < nfields; ++j) {
                    double acc = 0;
                    for (size_t q = 0; q < tr.points.size(); ++q) {
                        const Vec2& p = tr.points[q];
                        acc += tr.weights[q] * field(j, p)[c] * ipow(p.x(), monos[i][0]) *
                               ipow(p.y(), monos[i][1]);
                    }
                    // normalize by the reference area 1/2
                    D(base + c * monos.size() + i, j) = 2 * acc;
                }
    }
    return D;
}

} // namespace

Vec2 RefFluxBasis::eval(int j, const Vec2& xhat) const {
    Vec2 r(0, 0);
    for (int i = 0; i < dim(); ++i)
        r += coeff(i, j) * span.eval(i, xhat);
    return r;
}

double RefFluxBasis::eval_div(int j, const Vec2& xhat) const {
    double r = 0;
    for (int i = 0; i < dim(); ++i)
        r += coeff(i, j) * span.div(i, xhat);
    return r;
}

Eigen::MatrixXd RefFluxBasis::dof_matrix() const {
    return ref_dofs_applied(k, [this](int j, const Vec2& x) { return eval(j, x); }, dim());
}

RefFluxBasis rt_basis(int k) {
    if (k < 0)
        throw ConfigError("rt_basis: k must be >= 0");
    RefFluxBasis b;
    b.k = k;
    b.span.k = k;
    int nk = b.dim();
    Eigen::MatrixXd V = ref_dofs_applied(
        k, [&b](int j, const Vec2& x) { return b.span.eval(j, x); }, nk);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    b.coeff = lu.solve(Eigen::MatrixXd::Identity(nk, nk));
    if ((V * b.coeff - Eigen::MatrixXd::Identity(nk, nk)).norm() > 1e-8)
        throw IllConditioned("rt_basis: canonical functional matrix is ill-conditioned");
    return b;
}

PiolaMap piola_map(const Vec2& a0, const Vec2& a1, const Vec2& a2) {
    PiolaMap F;
    F.B.col(0) = a1 - a0;
    F.B.col(1) = a2 - a0;
    F.b = a0;
    F.detB = F.B.determinant();
    if (F.detB == 0)
        throw Error("piola_map: degenerate triangle");
    F.Binv = F.B.inverse();
    return F;
}

Vec2 piola_push_eval(const RefFluxBasis& basis, int j, const PiolaMap& F, const Vec2& x) {
    return piola_push(F, basis.eval(j, F.to_reference(x)));
}

double piola_push_div(const RefFluxBasis& basis, int j, const PiolaMap& F, const Vec2& x) {
    return basis.eval_div(j, F.to_reference(x)) / F.detB;
}

Vec2 ElementBasis::eval(const Eigen::VectorXd& span_coef, const Vec2& x) const {
    Vec2 r(0, 0);
    for (int i = 0; i < dim(); ++i)
        r += span_coef(i) * span.eval(i, x);
    return r;
}

double ElementBasis::eval_div(const Eigen::VectorXd& span_coef, const Vec2& x) const {
    double r = 0;
    for (int i = 0; i < dim(); ++i)
        r += span_coef(i) * span.div(i, x);
    return r;
}

ElementBasis element_basis(const Mesh& mesh, int tri, int k) {
    if (k < 0)
        throw ConfigError("element_basis: k must be >= 0");
    ElementBasis eb;
    eb.k = k;
    eb.tri = tri;
    auto [a, b, c] = mesh.tri_coords(tri);
    eb.span.k = k;
    eb.span.origin = (a + b + c) / 3.0;
    eb.span.scale = mesh.h_tri[tri];

    int nk = eb.dim();
    Eigen::MatrixXd V(nk, nk);
    GaussRule g = gauss_legendre(k + 1);
    const auto& tv = mesh.triangles[tri];
    for (int l = 0; l < 3; ++l) {
        int va = tv[l], vb = tv[(l + 1) % 3];
        int lo = std::min(va, vb), hi = std::max(va, vb);
        Vec2 plo = mesh.vertices[lo], phi = mesh.vertices[hi];
        Vec2 d = phi - plo;
        eb.edge_len[l] = d.norm();
        eb.edge_normal[l] = rot_cw(d.normalized());
        Vec2 outward = rot_cw((mesh.vertices[vb] - mesh.vertices[va]).normalized());
        eb.out_sign[l] = eb.edge_normal[l].dot(outward) > 0 ? 1.0 : -1.0;
        eb.edge_nodes[l].clear();
        for (int m = 0; m <= k; ++m) {
            Vec2 M = plo + g.nodes[m] * d;
            eb.edge_nodes[l].push_back(M);
            for (int j = 0; j < nk; ++j)
                V(eb.edge_dof(l, m), j) = eb.span.eval(j, M).dot(eb.edge_normal[l]);
        }
    }
    if (k >= 1) {
        TriangleRule tr = triangle_rule(2 * k + 2);
        PiolaMap F = piola_map(a, b, c);
        double area = mesh.tri_area(tri);
        auto monos = monomials_upto(k - 1);
        int base = eb.n_edge_dofs();
        Eigen::MatrixXd I = Eigen::MatrixXd::Zero(2 * monos.size(), nk);
        for (size_t q = 0; q < tr.points.size(); ++q) {
            Vec2 x = F.to_physical(tr.points[q]);
            Vec2 X = (x - eb.span.origin) / eb.span.scale;
            double w = tr.weights[q] * std::abs(F.detB) / area;
            for (size_t i = 0; i < monos.size(); ++i) {
                double phi = ipow(X.x(), monos[i][0]) * ipow(X.y(), monos[i][1]);
                for (int j = 0; j < nk; ++j) {
                    Vec2 sj = eb.span.eval(j, x);
                    I(i, j) += w * phi * sj.x();
                    I(monos.size() + i, j) += w * phi * sj.y();
                }
            }
        }
        V.block(base, 0, 2 * monos.size(), nk) = I;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    eb.coeff = lu.solve(Eigen::MatrixXd::Identity(nk, nk));
    if ((V * eb.coeff - Eigen::MatrixXd::Identity(nk, nk)).norm() > 1e-7)
        throw IllConditioned("element_basis: degree-of-freedom matrix is ill-conditioned");
    return eb;
}

} // namespace curvedrt
