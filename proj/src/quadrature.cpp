#include "vexdelay/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace vexdelay
{

namespace
{

constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for kronrod_nodes[1], [3], [5], [7].
constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece
{
    double a, b, value, error;
    bool operator<(const Piece& other) const { return error < other.error; }
};

Piece gauss_kronrod(const std::function<double(double)>& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1)
            gauss += gauss_weights[i / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, int max_intervals)
{
    std::priority_queue<Piece> pieces;
    Piece first = gauss_kronrod(f, a, b);
    double value = first.value;
    double error = first.error;
    pieces.push(first);

    QuadratureResult out;
    while (true) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
            out.converged = true;
            break;
        }
        if (int(pieces.size()) >= max_intervals)
            break;
        const Piece worst = pieces.top();
        pieces.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Piece left = gauss_kronrod(f, worst.a, mid);
        const Piece right = gauss_kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        pieces.push(left);
        pieces.push(right);
    }
    // Re-sum to drop the drift accumulated by the incremental updates.
    double sum = 0;
    double err = 0;
    out.intervals = int(pieces.size());
    while (!pieces.empty()) {
        sum += pieces.top().value;
        err += pieces.top().error;
        pieces.pop();
    }
    out.value = sum;
    out.error = err;
    return out;
}

}  // namespace vexdelay
