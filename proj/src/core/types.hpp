#ifndef MA2D_TYPES_HPP
#define MA2D_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace ma2d {

/// Generic failure with a message; subclasses distinguish API error classes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

class SolveError : public Error {
public:
    explicit SolveError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    /// z-component of the 3D cross product.
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2x2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    Sym2x2() = default;
    Sym2x2(double a11_, double a12_, double a22_) : a11(a11_), a12(a12_), a22(a22_) {}

    static Sym2x2 identity() { return {1.0, 0.0, 1.0}; }

    Sym2x2 operator+(const Sym2x2& o) const { return {a11 + o.a11, a12 + o.a12, a22 + o.a22}; }
    Sym2x2 operator-(const Sym2x2& o) const { return {a11 - o.a11, a12 - o.a12, a22 - o.a22}; }
    Sym2x2 operator*(double a) const { return {a * a11, a * a12, a * a22}; }

    Vec2 apply(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
    double trace() const { return a11 + a22; }
};

inline Sym2x2 operator*(double a, const Sym2x2& m) { return m * a; }

inline double det2(const Sym2x2& a) { return a.a11 * a.a22 - a.a12 * a.a12; }

inline Sym2x2 cof2(const Sym2x2& a) { return {a.a22, -a.a12, a.a11}; }

/// Frobenius inner product A:B; off-diagonal counted twice.
inline double frobenius(const Sym2x2& a, const Sym2x2& b) {
    return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

struct EigPair {
    double lambda1 = 0.0;  // smallest
    double lambda2 = 0.0;  // largest
};

inline EigPair eig2(const Sym2x2& a) {
    const double mean = 0.5 * (a.a11 + a.a22);
    const double rad = std::hypot(0.5 * (a.a11 - a.a22), a.a12);
    return {mean - rad, mean + rad};
}

}  // namespace ma2d

#endif
