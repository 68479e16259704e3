#include "holo.hpp"

#include <cctype>
#include <cmath>
#include <utility>
#include <vector>

namespace epsteinlab {

// ---------------------------------------------------------------------------
// Jet arithmetic.

HoloJet3 jet_identity(cplx z) { return HoloJet3{z, 1.0, 0.0, 0.0}; }

HoloJet3 jet_constant(cplx c) { return HoloJet3{c, 0.0, 0.0, 0.0}; }

HoloJet3 jet_add(const HoloJet3& a, const HoloJet3& b) {
    return HoloJet3{a.f + b.f, a.df + b.df, a.d2f + b.d2f, a.d3f + b.d3f};
}

HoloJet3 jet_scale(cplx s, const HoloJet3& a) {
    return HoloJet3{s * a.f, s * a.df, s * a.d2f, s * a.d3f};
}

HoloJet3 jet_mul(const HoloJet3& a, const HoloJet3& b) {
    HoloJet3 j;
    j.f = a.f * b.f;
    j.df = a.df * b.f + a.f * b.df;
    j.d2f = a.d2f * b.f + 2.0 * a.df * b.df + a.f * b.d2f;
    j.d3f = a.d3f * b.f + 3.0 * a.d2f * b.df + 3.0 * a.df * b.d2f + a.f * b.d3f;
    return j;
}

HoloJet3 jet_compose(const HoloJet3& outer, const HoloJet3& inner) {
    // Faa di Bruno up to order three.
    HoloJet3 j;
    const cplx g1 = inner.df, g2 = inner.d2f, g3 = inner.d3f;
    j.f = outer.f;
    j.df = outer.df * g1;
    j.d2f = outer.d2f * g1 * g1 + outer.df * g2;
    j.d3f = outer.d3f * g1 * g1 * g1 + 3.0 * outer.d2f * g1 * g2 + outer.df * g3;
    return j;
}

// ---------------------------------------------------------------------------
// Expression nodes.

class ExprNode {
public:
    virtual ~ExprNode() = default;
    virtual HoloJet3 jet(cplx z) const = 0;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct IdentityNode final : ExprNode {
    HoloJet3 jet(cplx z) const override { return jet_identity(z); }
};

struct ConstantNode final : ExprNode {
    cplx c;
    explicit ConstantNode(cplx c_) : c(c_) {}
    HoloJet3 jet(cplx) const override { return jet_constant(c); }
};

struct AffineNode final : ExprNode {
    cplx a, b;
    AffineNode(cplx a_, cplx b_) : a(a_), b(b_) {
        if (std::abs(a) == 0.0)
            throw BadArgument("affine: leading coefficient must be nonzero");
    }
    HoloJet3 jet(cplx z) const override { return HoloJet3{a * z + b, a, 0.0, 0.0}; }
};

struct MoebiusNode final : ExprNode {
    MoebiusMap m;
    explicit MoebiusNode(MoebiusMap m_) : m(std::move(m_)) {}
    HoloJet3 jet(cplx z) const override { return m.jet(z); }
};

struct PowerNode final : ExprNode {
    int n;
    explicit PowerNode(int n_) : n(n_) {}
    HoloJet3 jet(cplx z) const override {
        if (n < 0 && std::abs(z) < 1e-150)
            throw DomainError("power: negative exponent at 0");
        auto ipow = [](cplx base, int k) {
            cplx r = 1.0;
            cplx b = base;
            int e = k;
            if (e < 0) {
                b = 1.0 / b;
                e = -e;
            }
            while (e > 0) {
                if (e & 1) r *= b;
                b *= b;
                e >>= 1;
            }
            return r;
        };
        HoloJet3 j;
        j.f = ipow(z, n);
        j.df = double(n) * ipow(z, n - 1);
        j.d2f = double(n) * double(n - 1) * ipow(z, n - 2);
        j.d3f = double(n) * double(n - 1) * double(n - 2) * ipow(z, n - 3);
        // z = 0 with small positive n: the limits are finite, fix them up.
        if (std::abs(z) == 0.0 && n >= 0) {
            j.f = (n == 0) ? 1.0 : 0.0;
            j.df = (n == 1) ? 1.0 : 0.0;
            j.d2f = (n == 2) ? 2.0 : 0.0;
            j.d3f = (n == 3) ? 6.0 : 0.0;
        }
        return j;
    }
};

void require_off_cut(cplx z, const char* who) {
    if (std::abs(z) < 1e-150 || (z.imag() == 0.0 && z.real() < 0.0))
        throw DomainError(std::string(who) + ": principal branch cut at " +
                          std::to_string(z.real()) + "+" +
                          std::to_string(z.imag()) + "i");
}

struct RPowNode final : ExprNode {
    double alpha;
    explicit RPowNode(double a_) : alpha(a_) {}
    HoloJet3 jet(cplx z) const override {
        require_off_cut(z, "rpow");
        HoloJet3 j;
        j.f = std::exp(alpha * std::log(z)); // principal branch
        j.df = alpha * j.f / z;
        j.d2f = (alpha - 1.0) * j.df / z;
        j.d3f = (alpha - 2.0) * j.d2f / z;
        return j;
    }
};

struct ExpNode final : ExprNode {
    HoloJet3 jet(cplx z) const override {
        const cplx e = std::exp(z);
        return HoloJet3{e, e, e, e};
    }
};

struct LogNode final : ExprNode {
    HoloJet3 jet(cplx z) const override {
        require_off_cut(z, "log");
        const cplx iz = 1.0 / z;
        return HoloJet3{std::log(z), iz, -iz * iz, 2.0 * iz * iz * iz};
    }
};

struct KoebeNode final : ExprNode {
    HoloJet3 jet(cplx z) const override {
        const cplx om = 1.0 - z;
        if (std::abs(om) < 1e-150)
            throw DomainError("koebe: pole at 1");
        const cplx om2 = om * om;
        HoloJet3 j;
        j.f = z / om2;
        j.df = (1.0 + z) / (om2 * om);
        j.d2f = (4.0 + 2.0 * z) / (om2 * om2);
        j.d3f = (18.0 + 6.0 * z) / (om2 * om2 * om);
        return j;
    }
};

struct SumNode final : ExprNode {
    NodePtr f, g;
    SumNode(NodePtr f_, NodePtr g_) : f(std::move(f_)), g(std::move(g_)) {}
    HoloJet3 jet(cplx z) const override { return jet_add(f->jet(z), g->jet(z)); }
};

struct ProductNode final : ExprNode {
    NodePtr f, g;
    ProductNode(NodePtr f_, NodePtr g_) : f(std::move(f_)), g(std::move(g_)) {}
    HoloJet3 jet(cplx z) const override { return jet_mul(f->jet(z), g->jet(z)); }
};

struct ComposeNode final : ExprNode {
    NodePtr outer, inner;
    ComposeNode(NodePtr o, NodePtr i) : outer(std::move(o)), inner(std::move(i)) {}
    HoloJet3 jet(cplx z) const override {
        const HoloJet3 gi = inner->jet(z);
        return jet_compose(outer->jet(gi.f), gi);
    }
};

HoloExpr wrap(NodePtr n, bool univalent = false) {
    return HoloExpr{std::move(n), univalent};
}

} // namespace

HoloJet3 HoloExpr::jet(cplx z) const {
    if (!root)
        throw BadArgument("HoloExpr: empty expression");
    return root->jet(z);
}

HoloExpr expr_identity() { return wrap(std::make_shared<IdentityNode>(), true); }
HoloExpr expr_constant(cplx c) { return wrap(std::make_shared<ConstantNode>(c)); }
HoloExpr expr_affine(cplx a, cplx b) {
    return wrap(std::make_shared<AffineNode>(a, b), true);
}
HoloExpr expr_mobius(const MoebiusMap& m) {
    return wrap(std::make_shared<MoebiusNode>(m), true);
}
HoloExpr expr_power(int n) { return wrap(std::make_shared<PowerNode>(n)); }
HoloExpr expr_rpow(double alpha) { return wrap(std::make_shared<RPowNode>(alpha)); }
HoloExpr expr_exp() { return wrap(std::make_shared<ExpNode>()); }
HoloExpr expr_log() { return wrap(std::make_shared<LogNode>()); }
HoloExpr expr_koebe() { return wrap(std::make_shared<KoebeNode>(), true); }
HoloExpr expr_sum(HoloExpr f, HoloExpr g) {
    return wrap(std::make_shared<SumNode>(std::move(f.root), std::move(g.root)));
}
HoloExpr expr_product(HoloExpr f, HoloExpr g) {
    return wrap(std::make_shared<ProductNode>(std::move(f.root), std::move(g.root)));
}
HoloExpr expr_compose(HoloExpr outer, HoloExpr inner) {
    const bool uni = outer.declared_univalent && inner.declared_univalent;
    return wrap(std::make_shared<ComposeNode>(std::move(outer.root),
                                              std::move(inner.root)),
                uni);
}

// ---------------------------------------------------------------------------
// Parser. Prefix notation, e.g. compose(koebe, mobius(1,0,0,1)).

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression parse error at offset " +
                         std::to_string(pos) + ": " + msg);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c))
            fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start)
            fail("expected a name");
        return text.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(text.substr(pos), &consumed);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos += consumed;
        return v;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool peek_imag_unit() {
        skip_ws();
        if (pos >= text.size() || (text[pos] != 'i' && text[pos] != 'I'))
            return false;
        // Reject identifiers starting with i (e.g. "identity").
        const size_t next = pos + 1;
        return next >= text.size() ||
               !(std::isalnum(static_cast<unsigned char>(text[next])) || text[next] == '_');
    }

    // number, number 'i', 'i', and the combinations a+bi / a-bi.
    cplx scalar() {
        skip_ws();
        double sign = 1.0;
        if (eat('-')) sign = -1.0;
        else eat('+');
        if (peek_imag_unit()) {
            ++pos;
            return cplx(0.0, sign);
        }
        const double first = sign * number();
        if (peek_imag_unit()) {
            ++pos;
            return cplx(0.0, first);
        }
        skip_ws();
        if (peek_is('+') || peek_is('-')) {
            const double s2 = eat('-') ? -1.0 : (eat('+'), 1.0);
            double second;
            if (peek_imag_unit()) {
                second = 1.0;
            } else {
                second = number();
            }
            if (!peek_imag_unit())
                fail("expected 'i' after the imaginary part");
            ++pos;
            return cplx(first, s2 * second);
        }
        return cplx(first, 0.0);
    }

    HoloExpr expr() {
        const std::string name = ident();
        auto args_open = [&]() { expect('('); };
        if (name == "identity" || name == "id") {
            return expr_identity();
        } else if (name == "constant" || name == "const") {
            args_open();
            const cplx c = scalar();
            expect(')');
            return expr_constant(c);
        } else if (name == "affine") {
            args_open();
            const cplx a = scalar();
            expect(',');
            const cplx b = scalar();
            expect(')');
            return expr_affine(a, b);
        } else if (name == "mobius" || name == "moebius") {
            args_open();
            const cplx a = scalar();
            expect(',');
            const cplx b = scalar();
            expect(',');
            const cplx c = scalar();
            expect(',');
            const cplx d = scalar();
            expect(')');
            return expr_mobius(MoebiusMap(a, b, c, d));
        } else if (name == "power" || name == "pow") {
            args_open();
            const double n = number();
            expect(')');
            const int ni = static_cast<int>(std::lround(n));
            if (std::abs(n - ni) > 1e-12)
                fail("power exponent must be an integer (use rpow for real powers)");
            return expr_power(ni);
        } else if (name == "rpow") {
            args_open();
            const double a = number();
            expect(')');
            return expr_rpow(a);
        } else if (name == "exp") {
            return expr_exp();
        } else if (name == "log") {
            return expr_log();
        } else if (name == "koebe") {
            return expr_koebe();
        } else if (name == "sum" || name == "product" || name == "compose") {
            args_open();
            std::vector<HoloExpr> parts;
            parts.push_back(expr());
            while (eat(','))
                parts.push_back(expr());
            expect(')');
            if (parts.size() < 2)
                fail(name + " needs at least two arguments");
            HoloExpr acc = parts[0];
            for (size_t i = 1; i < parts.size(); ++i) {
                if (name == "sum")
                    acc = expr_sum(std::move(acc), std::move(parts[i]));
                else if (name == "product")
                    acc = expr_product(std::move(acc), std::move(parts[i]));
                else
                    acc = expr_compose(std::move(acc), std::move(parts[i]));
            }
            return acc;
        }
        fail("unknown node '" + name + "'");
    }
};

} // namespace

HoloExpr parse_expr(const std::string& text) {
    Parser p(text);
    HoloExpr e = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
        p.fail("trailing input");
    return e;
}

// ---------------------------------------------------------------------------
// Schwarzian.

cplx schwarzian(const HoloJet3& jet) {
    const double scale = 1.0 + std::abs(jet.d2f) + std::abs(jet.d3f);
    if (std::abs(jet.df) < 1e-13 * scale)
        throw CriticalPointError("schwarzian: vanishing derivative");
    const cplx a = jet.d2f / jet.df;
    return jet.d3f / jet.df - 1.5 * a * a;
}

cplx schwarzian(const HoloExpr& e, cplx z) { return schwarzian(e.jet(z)); }

double schwarzian_compose_check(const HoloExpr& f, const HoloExpr& g, cplx z) {
    const HoloJet3 gj = g.jet(z);
    const cplx lhs = schwarzian(expr_compose(f, g), z);
    const cplx rhs = schwarzian(f, gj.f) * gj.df * gj.df + schwarzian(gj);
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Quadratic differentials.

QuadDifferentialSample quad_pullback(const std::function<cplx(cplx)>& phi,
                                     const HoloExpr& g, cplx z) {
    const HoloJet3 gj = g.jet(z);
    return QuadDifferentialSample{z, phi(gj.f) * gj.df * gj.df};
}

double pointwise_norm(cplx phi_value, double rho) {
    if (!(rho > 0.0))
        throw BadArgument("pointwise_norm: density must be positive");
    return std::abs(phi_value) / rho;
}

double disk_density(cplx z) {
    const double s = 1.0 - std::norm(z);
    if (!(s > 0.0))
        throw DomainError("disk_density: point outside the unit disk");
    return 4.0 / (s * s);
}

// ---------------------------------------------------------------------------
// Nehari scan.

NehariScanResult nehari_scan(const HoloExpr& e, const GridSpec& grid,
                             double tolerance) {
    if (grid.nr < 1 || grid.ntheta < 1 || !(grid.rmax > 0.0) || grid.rmax >= 1.0)
        throw BadArgument("nehari_scan: bad grid");
    NehariScanResult res;
    res.sup_norm = -1.0;
    for (int ir = 0; ir < grid.nr; ++ir) {
        const double r = (grid.nr == 1) ? 0.0 : grid.rmax * ir / (grid.nr - 1);
        const int nth = (r == 0.0) ? 1 : grid.ntheta;
        for (int it = 0; it < nth; ++it) {
            const double th = 2.0 * M_PI * it / grid.ntheta;
            const cplx z = std::polar(r, th);
            const double n = pointwise_norm(schwarzian(e, z), disk_density(z));
            if (n > res.sup_norm) {
                res.sup_norm = n;
                res.argmax = z;
            }
        }
    }
    res.within_bound = res.sup_norm <= 1.5 + tolerance;
    return res;
}

} // namespace epsteinlab
