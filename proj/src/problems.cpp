#include "pameli/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pameli/indicators.hpp"

namespace pameli {

namespace {

constexpr double PI = std::numbers::pi;

// g of DTLZ1/DTLZ3: 100 * (k + sum((xi - 0.5)^2 - cos(20 pi (xi - 0.5)))).
double g_rastrigin(const Solution& x, std::size_t first)
{
    double s = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        const double z = x[i] - 0.5;
        s += z * z - std::cos(20.0 * PI * z);
    }
    return 100.0 * (static_cast<double>(x.size() - first) + s);
}

// g of DTLZ2/DTLZ4/DTLZ5: sum((xi - 0.5)^2).
double g_sphere(const Solution& x, std::size_t first)
{
    double s = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        const double z = x[i] - 0.5;
        s += z * z;
    }
    return s;
}

// f of the DTLZ2 family for angles theta (radians in [0, pi/2]).
ObjectiveVector spherical_objectives(const std::vector<double>& theta, std::size_t m, double g)
{
    ObjectiveVector f(m, 1.0 + g);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m - 1 - i; ++j)
            f[i] *= std::cos(theta[j]);
        if (i > 0)
            f[i] *= std::sin(theta[m - 1 - i]);
    }
    return f;
}

} // namespace

DtlzInstance::DtlzInstance(int variant_, std::size_t d_, std::size_t m_)
    : variant(variant_), d(d_), m(m_)
{
    if (variant < 1 || variant > 7)
        throw std::invalid_argument("DTLZ variant must be in [1, 7]");
    if (m < 2 || d < m)
        throw std::invalid_argument("DTLZ requires m >= 2 and d >= m");
}

DtlzInstance DtlzInstance::paper(int variant)
{
    switch (variant) {
    case 1:
        return DtlzInstance(1, 7, 3);
    case 7:
        return DtlzInstance(7, 22, 3);
    default:
        return DtlzInstance(variant, 12, 3);
    }
}

std::string DtlzInstance::name() const
{
    return "dtlz" + std::to_string(variant);
}

ObjectiveVector DtlzInstance::evaluate(const Solution& x) const
{
    if (x.size() != d)
        throw std::domain_error("DTLZ: solution dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0))
            throw std::domain_error("DTLZ: coordinate " + std::to_string(i) + " outside [0, 1]");
    }
    const std::size_t pos = m - 1; // position variables x_0 .. x_{pos-1}

    switch (variant) {
    case 1: {
        const double g = g_rastrigin(x, pos);
        ObjectiveVector f(m, 0.5 * (1.0 + g));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m - 1 - i; ++j)
                f[i] *= x[j];
            if (i > 0)
                f[i] *= 1.0 - x[m - 1 - i];
        }
        return f;
    }
    case 2:
    case 3:
    case 4: {
        const double g = (variant == 3) ? g_rastrigin(x, pos) : g_sphere(x, pos);
        const double alpha = (variant == 4) ? 100.0 : 1.0;
        std::vector<double> theta(pos);
        for (std::size_t j = 0; j < pos; ++j)
            theta[j] = 0.5 * PI * std::pow(x[j], alpha);
        return spherical_objectives(theta, m, g);
    }
    case 5:
    case 6: {
        double g = 0.0;
        if (variant == 5) {
            g = g_sphere(x, pos);
        } else {
            for (std::size_t i = pos; i < d; ++i)
                g += std::pow(x[i], 0.1);
        }
        std::vector<double> theta(pos);
        if (pos > 0)
            theta[0] = 0.5 * PI * x[0];
        for (std::size_t j = 1; j < pos; ++j)
            theta[j] = PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[j]);
        return spherical_objectives(theta, m, g);
    }
    case 7: {
        double g = 0.0;
        for (std::size_t i = pos; i < d; ++i)
            g += x[i];
        g = 1.0 + 9.0 / static_cast<double>(k()) * g;
        ObjectiveVector f(m);
        for (std::size_t i = 0; i < pos; ++i)
            f[i] = x[i];
        double h = static_cast<double>(m);
        for (std::size_t i = 0; i < pos; ++i)
            h -= f[i] / (1.0 + g) * (1.0 + std::sin(3.0 * PI * f[i]));
        f[m - 1] = (1.0 + g) * h;
        return f;
    }
    default:
        throw std::logic_error("unreachable");
    }
}

Problem DtlzInstance::make_problem() const
{
    DtlzInstance copy = *this;
    return Problem(name(), space(), m, [copy](const Solution& x) { return copy.evaluate(x); });
}

std::vector<ObjectiveVector> simplex_lattice_weights(std::size_t m, std::size_t degree)
{
    std::vector<ObjectiveVector> out;
    ObjectiveVector w(m, 0.0);
    // Depth-first enumeration of compositions of `degree` into m parts.
    auto recurse = [&](auto&& self, std::size_t dim, std::size_t remaining) -> void {
        if (dim == m - 1) {
            w[dim] = static_cast<double>(remaining) / static_cast<double>(degree);
            out.push_back(w);
            return;
        }
        for (std::size_t c = 0; c <= remaining; ++c) {
            w[dim] = static_cast<double>(c) / static_cast<double>(degree);
            self(self, dim + 1, remaining - c);
        }
    };
    if (degree == 0)
        throw std::invalid_argument("simplex_lattice_weights: degree must be >= 1");
    recurse(recurse, 0, degree);
    return out;
}

std::size_t simplex_lattice_degree_for(std::size_t m, std::size_t target_size)
{
    auto count = [m](std::size_t h) {
        // C(h + m - 1, m - 1)
        double c = 1.0;
        for (std::size_t i = 1; i < m; ++i)
            c *= static_cast<double>(h + i) / static_cast<double>(i);
        return c;
    };
    std::size_t h = 1;
    while (count(h) < static_cast<double>(target_size))
        ++h;
    if (h > 1 && std::abs(count(h - 1) - static_cast<double>(target_size)) < std::abs(count(h) - static_cast<double>(target_size)))
        --h;
    return h;
}

namespace {

// 1-D support of the DTLZ7 front: positions u where s(u) = u (1 + sin(3 pi u))
// sets a strict record. The front is the product of this set with itself.
std::vector<double> dtlz7_axis_support(std::size_t samples)
{
    std::vector<double> support;
    double record = -1.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(samples - 1);
        const double s = u * (1.0 + std::sin(3.0 * PI * u));
        if (s > record) {
            record = s;
            support.push_back(u);
        }
    }
    return support;
}

} // namespace

ReferenceFront generate_reference_front(const DtlzInstance& instance, std::size_t target_size)
{
    if (target_size < instance.m)
        throw std::invalid_argument("generate_reference_front: target_size must be >= m");
    const std::size_t m = instance.m;
    ReferenceFront front;

    switch (instance.variant) {
    case 1: {
        const std::size_t h = simplex_lattice_degree_for(m, target_size);
        for (ObjectiveVector w : simplex_lattice_weights(m, h)) {
            for (double& v : w)
                v *= 0.5;
            front.points.push_back(std::move(w));
        }
        break;
    }
    case 2:
    case 3:
    case 4: {
        const std::size_t h = simplex_lattice_degree_for(m, target_size);
        for (ObjectiveVector w : simplex_lattice_weights(m, h)) {
            double norm = 0.0;
            for (double v : w)
                norm += v * v;
            norm = std::sqrt(norm);
            for (double& v : w)
                v /= norm;
            front.points.push_back(std::move(w));
        }
        break;
    }
    case 5:
    case 6: {
        if (m != 3)
            throw std::invalid_argument("DTLZ5/6 reference front implemented for m = 3");
        // Degenerate curve: f = (cos t / sqrt2, cos t / sqrt2, sin t).
        front.points.reserve(target_size);
        for (std::size_t i = 0; i < target_size; ++i) {
            const double t = 0.5 * PI * static_cast<double>(i) / static_cast<double>(target_size - 1);
            const double c = std::cos(t) / std::sqrt(2.0);
            front.points.push_back({c, c, std::sin(t)});
        }
        break;
    }
    case 7: {
        if (m != 3)
            throw std::invalid_argument("DTLZ7 reference front implemented for m = 3");
        const std::vector<double> support = dtlz7_axis_support(200001);
        const std::size_t per_axis = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(target_size))));
        auto pick = [&](std::size_t i) {
            const std::size_t idx = (per_axis == 1) ? 0 : i * (support.size() - 1) / (per_axis - 1);
            return support[idx];
        };
        std::vector<ObjectiveVector> grid;
        grid.reserve(per_axis * per_axis);
        for (std::size_t a = 0; a < per_axis; ++a) {
            for (std::size_t b = 0; b < per_axis; ++b) {
                const double f1 = pick(a);
                const double f2 = pick(b);
                const double h = 3.0 - 0.5 * (f1 * (1.0 + std::sin(3.0 * PI * f1)) + f2 * (1.0 + std::sin(3.0 * PI * f2)));
                grid.push_back({f1, f2, 2.0 * h});
            }
        }
        // The support construction already excludes dominated grid points;
        // filter once more to drop boundary ties.
        for (std::size_t idx : nondominated_filter(grid))
            front.points.push_back(grid[idx]);
        break;
    }
    default:
        throw std::logic_error("unreachable");
    }

    const double ratio = static_cast<double>(front.points.size()) / static_cast<double>(target_size);
    if (ratio < 0.95 || ratio > 1.05)
        throw std::runtime_error("generate_reference_front: size " + std::to_string(front.points.size()) + " misses target " + std::to_string(target_size) + " by more than 5%");
    return front;
}

void save_reference_front(const ReferenceFront& front, const DtlzInstance& instance, const std::filesystem::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write reference front to " + file.string());
    out << "# " << instance.name() << " m=" << instance.m << " size=" << front.points.size() << "\n";
    char buf[64];
    for (const ObjectiveVector& p : front.points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[j]); // exact round-trip
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    if (!out)
        throw std::runtime_error("write failed for " + file.string());
}

ReferenceFront load_reference_front(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open reference front " + file.string());
    std::string header;
    std::getline(in, header);
    std::size_t m = 0, size = 0;
    {
        std::istringstream hs(header);
        std::string hash, name, mfield, sizefield;
        hs >> hash >> name >> mfield >> sizefield;
        if (hash != "#" || name.rfind("dtlz", 0) != 0 || mfield.rfind("m=", 0) != 0 || sizefield.rfind("size=", 0) != 0)
            throw std::runtime_error("malformed reference front header in " + file.string());
        m = std::stoul(mfield.substr(2));
        size = std::stoul(sizefield.substr(5));
    }
    ReferenceFront front;
    front.points.reserve(size);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        ObjectiveVector p(m);
        for (std::size_t j = 0; j < m; ++j) {
            if (!(ls >> p[j]))
                throw std::runtime_error("malformed reference front row in " + file.string());
        }
        front.points.push_back(std::move(p));
    }
    if (front.points.size() != size)
        throw std::runtime_error("reference front " + file.string() + " declares " + std::to_string(size) + " points but contains " + std::to_string(front.points.size()));
    return front;
}

ReferenceFront load_or_generate_front(const DtlzInstance& instance, std::size_t target_size,
                                      const std::filesystem::path& cache_dir)
{
    std::filesystem::create_directories(cache_dir);
    const std::filesystem::path file = cache_dir
        / (instance.name() + "_m" + std::to_string(instance.m) + "_n" + std::to_string(target_size) + ".txt");
    if (std::filesystem::exists(file))
        return load_reference_front(file);
    ReferenceFront front = generate_reference_front(instance, target_size);
    save_reference_front(front, instance, file);
    return front;
}

} // namespace pameli
