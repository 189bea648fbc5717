#include "qpt/oflattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpt {

Ambient ambient_Qn(int k) {
    Ambient A;
    A.dim = k;
    A.places.assign(k, {1});
    A.embed = [k](const std::vector<Rat>& v, int w) {
        return std::make_pair(Iv::exact(v[w]), Iv((f128)0));
    };
    A.gram.assign(k, std::vector<Rat>(k, Rat(0)));
    for (int i = 0; i < k; ++i) A.gram[i][i] = 1;
    A.F_disc = 1;
    return A;
}

Ambient ambient_biquad(const BiquadField& M, int ncopies, bool over_L) {
    if (ncopies != 1 && ncopies != 2) throw std::invalid_argument("ncopies in {1,2}");
    Ambient A;
    A.dim = 4 * ncopies;
    for (int c = 0; c < ncopies; ++c)
        for (auto& pl : M.places) A.places.push_back({pl.dw});
    int nplaces = (int)M.places.size();
    A.embed = [&M, nplaces](const std::vector<Rat>& v, int w) {
        int copy = w / nplaces, mw = w % nplaces;
        std::array<Rat, 4> oc;
        for (int i = 0; i < 4; ++i) oc[i] = v[4 * copy + i];
        return M.embed(M.from_omega(oc), mw);
    };
    // block-diagonal trace Gram of the integral basis
    std::vector<std::vector<Rat>> G4(4, std::vector<Rat>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) G4[i][j] = M.trace_elem(M.mul(M.omega(i), M.omega(j)));
    A.gram.assign(A.dim, std::vector<Rat>(A.dim, Rat(0)));
    for (int c = 0; c < ncopies; ++c)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) A.gram[4 * c + i][4 * c + j] = G4[i][j];
    if (!over_L) return A;
    // F = L = Q(sqrt d): multiplication by omega_L, block-diagonal
    A.F_disc = M.sub_disc[0];
    MElem wl;
    if (((M.a % 4) + 4) % 4 == 1) {
        wl.c[0] = rat(1, 2);
        wl.c[1] = rat(1, 2);
    } else {
        wl.c[1] = 1;
    }
    std::vector<std::vector<Rat>> act4(4, std::vector<Rat>(4));
    for (int j = 0; j < 4; ++j) {
        auto oc = M.to_omega(M.mul(wl, M.omega(j)));
        for (int i = 0; i < 4; ++i) act4[i][j] = oc[i];
    }
    A.F_action.assign(A.dim, std::vector<Rat>(A.dim, Rat(0)));
    for (int c = 0; c < ncopies; ++c)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) A.F_action[4 * c + i][4 * c + j] = act4[i][j];
    return A;
}

OFLattice lattice_from_ideal(const Ambient& amb, const BiquadField& M, const MIdeal& I,
                             int ncopies) {
    OFLattice L;
    L.amb = &amb;
    L.den = I.den;
    int dim = 4 * ncopies;
    L.basis.assign(dim, std::vector<Int>(dim, 0));
    for (int c = 0; c < ncopies; ++c)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) L.basis[4 * c + i][4 * c + j] = I.mat[i][j];
    // columns: basis[.][col]
    return L;
}

OFLattice lattice_standard(const Ambient& amb) {
    OFLattice L;
    L.amb = &amb;
    L.basis.assign(amb.dim, std::vector<Int>(amb.dim, 0));
    for (int i = 0; i < amb.dim; ++i) L.basis[i][i] = 1;
    return L;
}

bool is_F_stable(const OFLattice& L) {
    const Ambient& A = *L.amb;
    if (A.F_action.empty()) return true;
    int n = A.dim;
    // image columns of F_action * basis must lie in the lattice: solve via
    // exact rational linear algebra against the basis matrix
    std::vector<std::vector<Rat>> B(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B[i][j] = Rat(L.basis[i][j]);
    // invert B
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    std::vector<std::vector<Rat>> a = B;
    for (int i = 0; i < n; ++i) {
        int piv = -1;
        for (int r = i; r < n; ++r)
            if (a[r][i] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::runtime_error("rank-deficient lattice basis");
        std::swap(a[piv], a[i]);
        std::swap(inv[piv], inv[i]);
        Rat d = a[i][i];
        for (int c = 0; c < n; ++c) {
            a[i][c] /= d;
            inv[i][c] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == i || a[r][i] == 0) continue;
            Rat f = a[r][i];
            for (int c = 0; c < n; ++c) {
                a[r][c] -= f * a[i][c];
                inv[r][c] -= f * inv[i][c];
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Rat s = 0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += inv[i][k] * A.F_action[k][l] * Rat(L.basis[l][j]);
            if (s.get_den() != 1) return false;
        }
    }
    return true;
}

SkewBall unit_ball(const Ambient& amb) {
    SkewBall b;
    b.scale.assign(amb.places.size(), (f128)1);
    return b;
}

static Rat gram_det(const std::vector<std::vector<Rat>>& g) {
    int n = (int)g.size();
    std::vector<std::vector<Rat>> a = g;
    Rat det = 1;
    for (int i = 0; i < n; ++i) {
        int piv = -1;
        for (int r = i; r < n; ++r)
            if (a[r][i] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Rat(0);
        if (piv != i) {
            std::swap(a[piv], a[i]);
            det = -det;
        }
        det *= a[i][i];
        for (int r = i + 1; r < n; ++r) {
            if (a[r][i] == 0) continue;
            Rat f = a[r][i] / a[i][i];
            for (int c = i; c < n; ++c) a[r][c] -= f * a[i][c];
        }
    }
    return det;
}

DetF det_F(const OFLattice& L) {
    const Ambient& A = *L.amb;
    int n = A.dim;
    // Delta_{Lambda/Q} = det(B^T G B) / den^{2n}
    std::vector<std::vector<Rat>> BtGB(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat s = 0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += Rat(L.basis[k][i]) * A.gram[k][l] * Rat(L.basis[l][j]);
            BtGB[i][j] = s;
        }
    Rat disc_Q = gram_det(BtGB);
    Rat denpow = 1;
    for (int i = 0; i < 2 * n; ++i) denpow *= Rat(L.den);
    disc_Q /= denpow;
    if (disc_Q == 0) throw std::runtime_error("det_F: rank-deficient lattice");
    int rank = L.rank_F();
    Rat fd = 1;
    if (A.deg_F() == 2) {
        Rat dpow = 1;
        i64 adf = std::abs(A.F_disc);
        for (int i = 0; i < rank; ++i) dpow *= Rat(adf);
        fd = dpow;
    }
    DetF out;
    Rat sq = abs(disc_Q) / fd;
    out.squared = sq;
    // exact square root when possible
    Int num = sq.get_num(), den2 = sq.get_den();
    Int rn = sqrt(num), rd = sqrt(den2);
    if (rn * rn == num && rd * rd == den2) {
        out.is_rational = true;
        out.rational_value = Rat{rn, rd};
        out.rational_value.canonicalize();
        out.value = Iv::exact(out.rational_value);
    } else {
        out.is_rational = false;
        out.value = iv_sqrt(Iv::exact(sq));
    }
    return out;
}

Rat index_norm(const OFLattice& L1, const OFLattice& L2) {
    if (L1.amb != L2.amb) throw std::invalid_argument("index_norm: ambient mismatch");
    int n = L1.amb->dim;
    auto pres_det = [&](const OFLattice& L) {
        std::vector<std::vector<Rat>> B(n, std::vector<Rat>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                B[i][j] = Rat(L.basis[i][j]) / Rat(L.den);
            }
        return gram_det(B);
    };
    Rat r = pres_det(L2) / pres_det(L1);
    return abs(r);
}

// ---- enumeration -------------------------------------------------------------

namespace {

struct RealRows {
    // rows of the scaled real embedding matrix applied to basis columns, and
    // the per-row bound (bound = r for every row after scaling)
    std::vector<std::vector<double>> rowsB;  // nrows x dim
    std::vector<int> row_place;              // owning place
    int nrows = 0;
};

RealRows real_rows(const OFLattice& L, const SkewBall& ball) {
    const Ambient& A = *L.amb;
    int n = A.dim;
    RealRows R;
    std::vector<Rat> col(n);
    std::vector<std::vector<double>> emb;  // rows of embedding of each basis col
    for (size_t w = 0; w < A.places.size(); ++w) {
        int reix = R.nrows;
        R.rowsB.emplace_back(n, 0.0);
        R.row_place.push_back((int)w);
        ++R.nrows;
        int imix = -1;
        if (A.places[w].dw == 2) {
            imix = R.nrows;
            R.rowsB.emplace_back(n, 0.0);
            R.row_place.push_back((int)w);
            ++R.nrows;
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) col[i] = Rat(L.basis[i][j]) / Rat(L.den);
            auto [re, im] = A.embed(col, (int)w);
            double sc = (double)ball.scale[w];
            R.rowsB[reix][j] = (double)re.mid / sc;
            if (imix >= 0) R.rowsB[imix][j] = (double)im.mid / sc;
        }
    }
    return R;
}

}  // namespace

std::vector<BoxPoint> enumerate_box(const OFLattice& L, const SkewBall& ball, f128 r, f128 slack) {
    const Ambient& A = *L.amb;
    int n = A.dim;
    RealRows R = real_rows(L, ball);
    double rd = (double)r;
    // coefficient ranges: |n_j| <= sum_k |inv_{jk}| * r over a square subsystem;
    // use the pseudo-inverse via normal equations for nrows >= n
    // Here nrows == n always (sum dw = deg and complex contributes 2 rows).
    if (R.nrows != n) throw std::runtime_error("enumerate_box: row count mismatch");
    // invert rowsB
    std::vector<std::vector<double>> m(n, std::vector<double>(2 * n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = R.rowsB[i][j];
        m[i][n + i] = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        int piv = i;
        for (int k = i + 1; k < n; ++k)
            if (std::abs(m[k][i]) > std::abs(m[piv][i])) piv = k;
        std::swap(m[i], m[piv]);
        if (m[i][i] == 0) throw std::runtime_error("enumerate_box: singular embedding");
        double d = m[i][i];
        for (int j = 0; j < 2 * n; ++j) m[i][j] /= d;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            double f = m[k][i];
            if (f == 0) continue;
            for (int j = 0; j < 2 * n; ++j) m[k][j] -= f * m[i][j];
        }
    }
    std::vector<i64> lim(n);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += std::abs(m[i][n + j]) * rd;
        if (s > 2e8) throw std::runtime_error("enumeration budget exceeded");
        lim[i] = (i64)(s * (1 + 1e-9) + 1e-9) + 1;
    }
    // per-row max contribution of coordinate j (for pruning)
    std::vector<std::vector<double>> contrib(R.nrows, std::vector<double>(n));
    for (int i = 0; i < R.nrows; ++i)
        for (int j = 0; j < n; ++j) contrib[i][j] = std::abs(R.rowsB[i][j]) * (double)lim[j];
    std::vector<std::vector<double>> tail(R.nrows, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < R.nrows; ++i)
        for (int j = n - 1; j >= 0; --j) tail[i][j] = tail[i][j + 1] + contrib[i][j];

    std::vector<BoxPoint> out;
    std::vector<i64> cur(n, 0);
    std::vector<double> partial(R.nrows, 0.0);
    double rb = rd * (1 + 1e-7);
    std::function<void(int)> rec = [&](int depth) {
        if (depth == n) {
            bool zero = true;
            for (i64 v : cur)
                if (v) zero = false;
            if (zero) return;
            // exact-ish check with intervals
            std::vector<Rat> coords(n);
            for (int i = 0; i < n; ++i) {
                Rat s = 0;
                for (int j = 0; j < n; ++j)
                    if (cur[j] != 0) s += Rat(L.basis[i][j]) * Rat(cur[j]);
                coords[i] = s / Rat(L.den);
            }
            Iv norm((f128)0);
            for (size_t w = 0; w < A.places.size(); ++w) {
                auto [re, im] = A.embed(coords, (int)w);
                Iv aw = iv_sqrt(re * re + im * im) / Iv(ball.scale[w]);
                norm = iv_max(norm, aw);
            }
            Cmp c = iv_cmp(norm, Iv(r), slack * (r > 1 ? r : (f128)1));
            if (c == Cmp::Above) return;
            BoxPoint bp;
            bp.coords.resize(n);
            for (int i = 0; i < n; ++i) {
                Rat v = coords[i] * Rat(L.den);
                bp.coords[i] = v.get_num();
            }
            bp.norm = norm;
            bp.flag = c;
            out.push_back(std::move(bp));
            return;
        }
        for (i64 v = -lim[depth]; v <= lim[depth]; ++v) {
            cur[depth] = v;
            bool ok = true;
            for (int i = 0; i < R.nrows && ok; ++i) {
                double pi = partial[i] + R.rowsB[i][depth] * (double)v;
                if (std::abs(pi) - tail[i][depth + 1] > rb) ok = false;
            }
            if (!ok) continue;
            for (int i = 0; i < R.nrows; ++i) partial[i] += R.rowsB[i][depth] * (double)v;
            rec(depth + 1);
            for (int i = 0; i < R.nrows; ++i) partial[i] -= R.rowsB[i][depth] * (double)v;
        }
        cur[depth] = 0;
    };
    rec(0);
    return out;
}

// exact rank over F of the coordinate vectors (uses the O_F generator action)
static int f_rank(const Ambient& A, const std::vector<std::vector<Rat>>& vecs) {
    std::vector<std::vector<Rat>> rows;
    for (const auto& v : vecs) {
        rows.push_back(v);
        if (!A.F_action.empty()) {
            std::vector<Rat> wv(A.dim, Rat(0));
            for (int i = 0; i < A.dim; ++i)
                for (int j = 0; j < A.dim; ++j) wv[i] += A.F_action[i][j] * v[j];
            rows.push_back(wv);
        }
    }
    // rational row echelon rank
    int rank = 0;
    int n = A.dim;
    for (int c = 0; c < n && rank < (int)rows.size(); ++c) {
        int piv = -1;
        for (int r = rank; r < (int)rows.size(); ++r)
            if (rows[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[piv], rows[rank]);
        for (int r = 0; r < (int)rows.size(); ++r) {
            if (r == rank || rows[r][c] == 0) continue;
            Rat f = rows[r][c] / rows[rank][c];
            for (int cc = c; cc < n; ++cc) rows[r][cc] -= f * rows[rank][cc];
        }
        ++rank;
    }
    if (A.F_action.empty()) return rank;
    if (rank % 2) throw std::logic_error("f_rank: doubled set has odd rank");
    return rank / 2;
}

std::vector<Iv> successive_minima(const OFLattice& L, const SkewBall& ball, int howmany) {
    const Ambient& A = *L.amb;
    int want = howmany > 0 ? howmany : L.rank_F();
    // initial radius guess from the covolume
    DetF df = det_F(L);
    double covol = (double)df.value.mid;
    double r = std::pow(covol, 1.0 / A.dim);
    if (!(r > 1e-9)) r = 1.0;
    std::vector<Iv> minima;
    for (int rounds = 0; rounds < 60; ++rounds) {
        std::vector<BoxPoint> pts = enumerate_box(L, ball, (f128)r);
        std::sort(pts.begin(), pts.end(),
                  [](const BoxPoint& x, const BoxPoint& y) { return x.norm.mid < y.norm.mid; });
        minima.clear();
        std::vector<std::vector<Rat>> chosen;
        for (const BoxPoint& bp : pts) {
            std::vector<Rat> v(A.dim);
            for (int i = 0; i < A.dim; ++i) v[i] = Rat(bp.coords[i]) / Rat(L.den);
            chosen.push_back(v);
            if (f_rank(A, chosen) == (int)minima.size() + 1)
                minima.push_back(bp.norm);
            else
                chosen.pop_back();
            if ((int)minima.size() == want) break;
        }
        if ((int)minima.size() == want && minima.back().hi() <= (f128)r) return minima;
        r *= 1.8;
    }
    throw std::runtime_error("successive_minima: enumeration budget exceeded");
}

CountResult count_points(const OFLattice& L, const SkewBall& ball, f128 bounding_radius,
                         const std::function<Cmp(const std::vector<Rat>&)>& predicate) {
    CountResult res;
    {   // the zero vector is a lattice point too
        std::vector<Rat> zero(L.amb->dim, Rat(0));
        Cmp c = predicate(zero);
        if (c == Cmp::Below) ++res.inside;
        else if (c == Cmp::Boundary) ++res.boundary;
    }
    std::vector<BoxPoint> pts = enumerate_box(L, ball, bounding_radius, (f128)1e-7L);
    for (const BoxPoint& bp : pts) {
        std::vector<Rat> v(L.amb->dim);
        for (int i = 0; i < L.amb->dim; ++i) v[i] = Rat(bp.coords[i]) / Rat(L.den);
        switch (predicate(v)) {
            case Cmp::Below: ++res.inside; break;
            case Cmp::Boundary: ++res.boundary; break;
            case Cmp::Above: break;
        }
    }
    return res;
}

DavenportEstimate davenport_estimate(const OFLattice& L, const SkewBall& ball, double R, double N,
                                     double vol, i64 exact_count) {
    const Ambient& A = *L.amb;
    int n = L.rank_F();
    int d = A.deg_F();
    DetF df = det_F(L);
    double denom = std::pow(std::abs((double)A.F_disc), n / 2.0) * (double)df.value.mid;
    DavenportEstimate est;
    est.main = vol / denom;
    std::vector<Iv> mins = successive_minima(L, ball, n);
    std::vector<double> lam(n);
    for (int i = 0; i < n; ++i) lam[i] = (double)mins[i].mid;
    double top = std::pow(R, n * d - 1);
    for (int i = 0; i < n - 1; ++i) top /= std::pow(lam[i], d);
    top /= std::pow(lam[n - 1], d - 1);
    double sum = 0;
    for (int i = 0; i <= n - 1; ++i) {
        double term = std::pow(R, i * d);
        for (int j = 0; j < i; ++j) term /= std::pow(lam[j], d);
        sum += term;
    }
    est.bracket = N * (top + sum);
    est.ratio = std::abs((double)exact_count - est.main) / est.bracket;
    return est;
}

}  // namespace qpt
